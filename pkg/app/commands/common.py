"""Helpers shared by the subcommands: config files, inputs, reports, manifests."""
import argparse
import csv
import json
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from app.data.store import dataset_digest, load_dataset
from app.estimators.spec import EstimatorSpec, load_estimator
from app.exceptions import EstimatorError, UsageError
from app.models.dataset import Dataset, TaskType
from app.models.manifest import RunManifest
from app.models.scores import MetricName

logger = logging.getLogger(__name__)

MANIFEST_SUFFIX = ".manifest.json"
RUN_MANIFEST = "manifest.json"

# argparse destinations that are not part of a command's configuration
_NOT_CONFIG = {"func", "config", "command", "log_level"}


def load_config_file(path: str) -> Dict[str, Dict[str, Any]]:
    """Read a TOML config: one table per subcommand."""
    try:
        with open(path, "rb") as handle:
            data = tomllib.load(handle)
    except FileNotFoundError as e:
        raise UsageError(f"config file not found: {path}") from e
    except tomllib.TOMLDecodeError as e:
        raise UsageError(f"invalid config file {path}: {e}") from e
    for command, table in data.items():
        if not isinstance(table, dict):
            raise UsageError(f"{path}: '{command}' must be a table")
    return data


def apply_config(
    subparsers: Mapping[str, argparse.ArgumentParser], tables: Mapping[str, Dict[str, Any]]
) -> None:
    """Turn config tables into argparse defaults so explicit flags still win."""
    for command, table in tables.items():
        parser = subparsers.get(command)
        if parser is None:
            raise UsageError(f"config table [{command}] names no subcommand")
        known = {action.dest for action in parser._actions}
        defaults = {}
        for key, value in table.items():
            dest = key.replace("-", "_")
            if dest not in known or dest in _NOT_CONFIG:
                raise UsageError(f"config table [{command}] has unknown key '{key}'")
            defaults[dest] = value
        parser.set_defaults(**defaults)


def require(args: argparse.Namespace, *names: str) -> None:
    """Raise UsageError for options that are neither flagged nor configured."""
    for name in names:
        value = getattr(args, name, None)
        if value is None or value == []:
            raise UsageError(f"missing required option --{name.replace('_', '-')}")


def default_task(metric: str, task: Optional[str]) -> TaskType:
    """Explicit ``--task``, else binary for roc_auc and continuous for prr."""
    if task:
        return TaskType(task)
    return TaskType.BINARY if MetricName(metric) == MetricName.ROC_AUC else TaskType.CONTINUOUS


def load_inputs(paths: Sequence[str], task: TaskType) -> List[Tuple[Dataset, str]]:
    """Datasets (named by file stem) with their digests."""
    loaded: List[Tuple[Dataset, str]] = []
    names = set()
    for path in paths:
        dataset = load_dataset(path, task)
        if dataset.name in names:
            raise UsageError(f"two datasets are named '{dataset.name}'")
        names.add(dataset.name)
        loaded.append((dataset, dataset_digest(dataset)))
    return loaded


def resolve_estimators(operands: Iterable[str]) -> List[Tuple[str, EstimatorSpec]]:
    """(label, spec) per operand; labels are built-in names or file stems."""
    resolved = []
    for operand in operands:
        try:
            spec = load_estimator(operand)
        except EstimatorError as e:
            raise UsageError(str(e)) from e
        label = operand if "." not in Path(operand).name else Path(operand).stem
        resolved.append((label, spec))
    return resolved


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(value) for value in row])
    logger.info(f"Wrote {path}")
    return path


def write_json(path: Path, payload: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def manifest_path(output: Path) -> Path:
    """``<output>.manifest.json``, or ``manifest.json`` inside a run directory."""
    if output.is_dir():
        return output / RUN_MANIFEST
    return output.with_name(output.name + MANIFEST_SUFFIX)


def _jsonable(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return value


def write_manifest(
    output: Path,
    args: argparse.Namespace,
    digests: Mapping[str, str],
    results: Optional[Dict[str, Any]] = None,
) -> Path:
    config = {
        key: _jsonable(value) for key, value in sorted(vars(args).items())
        if key not in _NOT_CONFIG
    }
    manifest = RunManifest(
        command=args.command,
        config=config,
        input_digests=dict(digests),
        results=results or {},
    )
    return write_json(manifest_path(output), manifest.model_dump(mode="json"))

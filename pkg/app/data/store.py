"""JSONL ingestion, serialization and splitting of datasets."""
import hashlib
import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from app.exceptions import DatasetError
from app.models.dataset import Dataset, SequenceSample, TaskType

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _format_validation_error(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"])
        message = item["msg"]
        parts.append(f"{location}: {message}" if location else message)
    return "; ".join(parts)


def _sample_to_record(sample: SequenceSample) -> Dict:
    tokens = []
    for token in sample.tokens:
        entry: Dict = {"lp": token.logprob, "ent": token.entropy}
        if token.channels:
            entry["ch"] = dict(sorted(token.channels.items()))
        tokens.append(entry)
    record: Dict = {"id": sample.id, "quality": sample.quality, "tokens": tokens}
    if sample.meta:
        record["meta"] = dict(sorted(sample.meta.items()))
    return record


def dataset_lines(dataset: Dataset) -> Iterable[str]:
    """Canonical JSONL lines (no trailing newline) for ``dataset``."""
    for sample in dataset.samples:
        yield json.dumps(_sample_to_record(sample), separators=(",", ":"), allow_nan=False)


def write_dataset(dataset: Dataset, path: PathLike) -> Path:
    """Write ``dataset`` as JSONL, one sample per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for line in dataset_lines(dataset):
            handle.write(line)
            handle.write("\n")
    logger.info(f"Wrote {len(dataset)} samples to {path}")
    return path


def dataset_digest(dataset: Dataset) -> str:
    """SHA-256 of the canonical JSONL text of ``dataset``."""
    digest = hashlib.sha256()
    for line in dataset_lines(dataset):
        digest.update(line.encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()


def load_dataset(
    path: PathLike,
    expected_task: TaskType,
    name: Optional[str] = None,
    required_channels: Iterable[str] = (),
) -> Dataset:
    """
    Load and validate a JSONL dataset.

    Args:
        path: JSONL file, one sample object per line
        expected_task: binary (quality exactly 0 or 1) or continuous (quality in [0, 1])
        name: dataset name; defaults to the file stem
        required_channels: channels every token of every sample must carry

    Returns:
        Validated Dataset with samples in file order

    Raises:
        DatasetError: malformed line, schema violation, duplicate id, bad quality,
            single-class binary dataset
    """
    path = Path(path)
    task = TaskType(expected_task)
    if not path.is_file():
        raise DatasetError(f"dataset file not found: {path}")

    samples: List[SequenceSample] = []
    seen: Dict[str, int] = {}
    with path.open("r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise DatasetError(f"line {line_number}: malformed JSON: {e.msg}") from e
            if not isinstance(record, dict):
                raise DatasetError(f"line {line_number}: expected a JSON object")
            try:
                sample = SequenceSample.model_validate(record)
            except ValidationError as e:
                raise DatasetError(
                    f"line {line_number}: {_format_validation_error(e)}"
                ) from e
            if sample.id in seen:
                raise DatasetError(
                    f"line {line_number}: duplicate id '{sample.id}' "
                    f"(first seen on line {seen[sample.id]})"
                )
            if task == TaskType.BINARY and sample.quality not in (0.0, 1.0):
                raise DatasetError(f"line {line_number}: quality not in {{0,1}}")
            seen[sample.id] = line_number
            samples.append(sample)

    dataset = build_dataset(name or path.stem, task, samples, frozenset(required_channels))
    logger.info(f"Loaded dataset '{dataset.name}' ({task.value}) with {len(dataset)} samples")
    return dataset


def build_dataset(
    name: str,
    task: TaskType,
    samples: List[SequenceSample],
    required_channels: frozenset,
) -> Dataset:
    """Validate ``samples`` into a Dataset; schema violations become DatasetError."""
    try:
        return Dataset(
            name=name, task=task, samples=samples, required_channels=required_channels
        )
    except ValidationError as e:
        raise DatasetError(f"dataset '{name}': {_format_validation_error(e)}") from e


def _train_count(size: int, train_fraction: float) -> int:
    return int(np.floor(train_fraction * size + 0.5))


def _group_cuts(sizes: List[int], train_fraction: float) -> List[int]:
    """
    Per-group train counts summing to the rounded overall count.

    Each group is rounded on its own except the largest, which takes the remainder;
    its count then stays within one of its exact share.
    """
    largest = int(np.argmax(sizes))
    cuts = [_train_count(size, train_fraction) for size in sizes]
    others = sum(cut for i, cut in enumerate(cuts) if i != largest)
    cuts[largest] = _train_count(sum(sizes), train_fraction) - others
    return cuts


def split_dataset(
    dataset: Dataset, train_fraction: float, seed: int
) -> Tuple[Dataset, Dataset]:
    """
    Deterministic train/test partition.

    Binary datasets are split per class (stratified shuffle) so both splits keep
    both classes. The train split always holds round(train_fraction * N) samples.
    """
    if not 0.0 < train_fraction < 1.0:
        raise DatasetError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    rng = np.random.default_rng(seed)
    qualities = np.array(dataset.qualities)

    if dataset.task == TaskType.BINARY:
        groups = [np.flatnonzero(qualities == label) for label in (0.0, 1.0)]
    else:
        groups = [np.arange(len(dataset))]

    train_idx: List[int] = []
    test_idx: List[int] = []
    cuts = _group_cuts([len(group) for group in groups], train_fraction)
    for group, cut in zip(groups, cuts):
        shuffled = rng.permutation(group)
        train_idx.extend(int(i) for i in shuffled[:cut])
        test_idx.extend(int(i) for i in shuffled[cut:])

    for label, indices in (("train", train_idx), ("test", test_idx)):
        if not indices:
            raise DatasetError(f"split leaves the {label} split empty")
        if dataset.task == TaskType.BINARY and len({qualities[i] for i in indices}) < 2:
            raise DatasetError(f"split leaves the {label} split with a single class")

    def subset(indices: List[int], suffix: str) -> Dataset:
        chosen = [dataset.samples[i] for i in sorted(indices)]
        return build_dataset(
            f"{dataset.name}-{suffix}", dataset.task, chosen, dataset.required_channels
        )

    return subset(train_idx, "train"), subset(test_idx, "test")

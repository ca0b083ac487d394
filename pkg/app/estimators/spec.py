"""Serializable estimator specifications and their dispatch."""
import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.data.arrays import SampleLike, as_arrays, prepare
from app.dsl.program import Program, parse
from app.estimators.baselines import (
    check_gamma,
    exp_weighted_logprob,
    linear_weighted_logprob,
    mean_token_entropy,
    perplexity_uncertainty,
    position_logprob_correlation,
    seq_log_prob_uncertainty,
)
from app.estimators.catalog import CATALOG_VERSION, check_feature_names, extract_features
from app.exceptions import DSLError, EstimatorError
from app.models.dataset import Dataset
from app.models.scores import ScoreVector

logger = logging.getLogger(__name__)

Estimator = Callable[[SampleLike], float]


class EstimatorKind(str, Enum):
    SEQ_LOG_PROB = "seq_log_prob"
    PERPLEXITY = "perplexity"
    MEAN_TOKEN_ENTROPY = "mean_token_entropy"
    EXP_WEIGHTED = "exp_weighted"
    LIN_WEIGHTED = "lin_weighted"
    POS_CORR = "pos_corr"
    LINEAR = "linear"
    PRODUCT_COMPOSITE = "product_composite"
    DSL_PROGRAM = "dsl_program"


_PARAMETERLESS = {
    EstimatorKind.SEQ_LOG_PROB,
    EstimatorKind.PERPLEXITY,
    EstimatorKind.MEAN_TOKEN_ENTROPY,
    EstimatorKind.LIN_WEIGHTED,
    EstimatorKind.POS_CORR,
}


def _normalize_params(kind: EstimatorKind, params: Dict[str, Any]) -> Dict[str, Any]:
    if kind in _PARAMETERLESS:
        if params:
            raise ValueError(f"{kind.value} takes no parameters")
        return {}
    if kind == EstimatorKind.EXP_WEIGHTED:
        return {"gamma": check_gamma(float(params["gamma"]))}
    if kind == EstimatorKind.LINEAR:
        names = check_feature_names(params["feature_names"])
        weights = [float(w) for w in params["weights"]]
        if len(weights) != len(names):
            raise ValueError(
                f"{len(weights)} weights for {len(names)} features: length mismatch"
            )
        bias = float(params.get("bias", 0.0))
        return {"feature_names": names, "weights": weights, "bias": bias}
    if kind == EstimatorKind.PRODUCT_COMPOSITE:
        return {
            part: EstimatorSpec.model_validate(params[part]).model_dump(mode="json")
            for part in ("a", "b")
        }
    source = str(params["source"])
    parse(source)
    return {"source": source}


class EstimatorSpec(BaseModel):
    """
    Identity and parameters of an estimator.

    ``params`` by kind: ``exp_weighted`` {gamma}; ``linear`` {feature_names, weights,
    bias}; ``product_composite`` {a, b} (nested specs); ``dsl_program`` {source}; the
    others take none. ``catalog_version`` pins the feature catalog linear weights refer to.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: EstimatorKind
    params: Dict[str, Any] = Field(default_factory=dict)
    catalog_version: int = CATALOG_VERSION

    @model_validator(mode="before")
    @classmethod
    def _check_params(cls, data: Any) -> Any:
        if not isinstance(data, dict) or "kind" not in data:
            return data
        try:
            kind = EstimatorKind(data["kind"])
        except ValueError:
            return data
        params = dict(data.get("params") or {})
        try:
            normalized = _normalize_params(kind, params)
        except KeyError as e:
            raise ValueError(f"{kind.value} requires parameter {e.args[0]!r}") from e
        except (EstimatorError, DSLError) as e:
            raise ValueError(str(e)) from e
        return {**data, "params": normalized}

    @model_validator(mode="after")
    def _check_catalog(self) -> "EstimatorSpec":
        if self.kind == EstimatorKind.LINEAR and self.catalog_version != CATALOG_VERSION:
            raise ValueError(
                f"linear weights fitted on catalog v{self.catalog_version}, "
                f"this build has v{CATALOG_VERSION}"
            )
        return self

    def child(self, part: str) -> "EstimatorSpec":
        return EstimatorSpec.model_validate(self.params[part])

    def to_json(self) -> str:
        return self.model_dump_json()

    @classmethod
    def from_json(cls, text: str) -> "EstimatorSpec":
        try:
            return cls.model_validate(json.loads(text))
        except (json.JSONDecodeError, ValidationError) as e:
            raise EstimatorError(f"invalid estimator spec: {e}") from e


def linear_estimate(
    sample: SampleLike,
    weights: Sequence[float],
    bias: float,
    feature_names: Sequence[str],
) -> float:
    """``bias + sum_j weights[j] * feature_j(sample)`` over catalog features."""
    if len(weights) != len(feature_names):
        raise EstimatorError(
            f"{len(weights)} weights for {len(feature_names)} features: length mismatch"
        )
    features = extract_features(sample, feature_names)
    return bias + float(np.dot(np.asarray(weights, dtype=np.float64), features.as_array()))


def product_composite(a: "EstimatorSpec", b: "EstimatorSpec", sample: SampleLike) -> float:
    """Product of two estimators, e.g. sequence probability times mean entropy."""
    arrays = as_arrays(sample)
    return estimate(a, arrays) * estimate(b, arrays)


def build_estimator(spec: EstimatorSpec) -> Estimator:
    """Compile ``spec`` into a callable ``f(sample) -> uncertainty``."""
    kind = spec.kind
    if kind == EstimatorKind.SEQ_LOG_PROB:
        return seq_log_prob_uncertainty
    if kind == EstimatorKind.PERPLEXITY:
        return perplexity_uncertainty
    if kind == EstimatorKind.MEAN_TOKEN_ENTROPY:
        return mean_token_entropy
    if kind == EstimatorKind.LIN_WEIGHTED:
        return linear_weighted_logprob
    if kind == EstimatorKind.POS_CORR:
        return position_logprob_correlation
    if kind == EstimatorKind.EXP_WEIGHTED:
        gamma = spec.params["gamma"]
        return lambda sample: exp_weighted_logprob(sample, gamma)
    if kind == EstimatorKind.LINEAR:
        weights = spec.params["weights"]
        bias = spec.params["bias"]
        names = spec.params["feature_names"]
        return lambda sample: linear_estimate(sample, weights, bias, names)
    if kind == EstimatorKind.PRODUCT_COMPOSITE:
        first = build_estimator(spec.child("a"))
        second = build_estimator(spec.child("b"))

        def composite(sample: SampleLike) -> float:
            arrays = as_arrays(sample)
            return first(arrays) * second(arrays)

        return composite
    return parse(spec.params["source"]).evaluate


def estimate(spec: EstimatorSpec, sample: SampleLike) -> float:
    return build_estimator(spec)(sample)


def program_spec(source: str) -> EstimatorSpec:
    return EstimatorSpec(kind=EstimatorKind.DSL_PROGRAM, params={"source": source})


BUILTIN_ESTIMATORS: Dict[str, EstimatorSpec] = {
    "seq_log_prob": EstimatorSpec(kind=EstimatorKind.SEQ_LOG_PROB),
    "perplexity": EstimatorSpec(kind=EstimatorKind.PERPLEXITY),
    "mean_token_entropy": EstimatorSpec(kind=EstimatorKind.MEAN_TOKEN_ENTROPY),
    "exp_weighted": EstimatorSpec(kind=EstimatorKind.EXP_WEIGHTED, params={"gamma": 0.8}),
    "lin_weighted": EstimatorSpec(kind=EstimatorKind.LIN_WEIGHTED),
    "pos_corr": EstimatorSpec(kind=EstimatorKind.POS_CORR),
    "sp_x_mean_entropy": EstimatorSpec(
        kind=EstimatorKind.PRODUCT_COMPOSITE,
        params={"a": {"kind": "seq_log_prob"}, "b": {"kind": "mean_token_entropy"}},
    ),
}


EstimatorLike = Union[EstimatorSpec, Program, Estimator]


def score_samples(estimator: EstimatorLike, dataset: Dataset) -> np.ndarray:
    """Uncertainty of every sample, in dataset order."""
    if isinstance(estimator, EstimatorSpec):
        fn = build_estimator(estimator)
    elif isinstance(estimator, Program):
        fn = estimator.evaluate
    else:
        fn = estimator
    scores = np.array([fn(arrays) for arrays in prepare(dataset)], dtype=np.float64)
    if not np.all(np.isfinite(scores)):
        raise EstimatorError(f"non-finite uncertainty on dataset '{dataset.name}'")
    return scores


def score_dataset(estimator: EstimatorLike, dataset: Dataset) -> ScoreVector:
    """Score vector aligned to ``dataset``."""
    return ScoreVector.from_array(dataset.ids, score_samples(estimator, dataset))


def load_estimator(operand: str) -> EstimatorSpec:
    """
    Resolve an estimator operand.

    Args:
        operand: built-in name, DSL source file (``.dsl``/``.uq``) or spec file (``.json``)

    Raises:
        EstimatorError: unknown name, unreadable file, invalid spec or program
    """
    if operand in BUILTIN_ESTIMATORS:
        return BUILTIN_ESTIMATORS[operand]
    path = Path(operand)
    if path.suffix in (".dsl", ".uq", ".json"):
        if not path.is_file():
            raise EstimatorError(f"estimator file not found: {path}")
        text = path.read_text(encoding="utf-8")
        if path.suffix == ".json":
            return EstimatorSpec.from_json(text)
        try:
            return program_spec(text)
        except ValidationError as e:
            raise EstimatorError(f"{path}: {e.errors()[0]['msg']}") from e
    raise EstimatorError(
        f"unknown estimator '{operand}'; available: {', '.join(sorted(BUILTIN_ESTIMATORS))}"
    )


def available_estimators() -> List[str]:
    return sorted(BUILTIN_ESTIMATORS)

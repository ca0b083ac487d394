"""Complexity proxies of a candidate program."""
from typing import ClassVar, Tuple

from pydantic import BaseModel, ConfigDict, Field


class ComplexityReport(BaseModel):
    """Line count, AST size, operator counts and Halstead volume."""

    model_config = ConfigDict(frozen=True)

    line_count: int = Field(ge=0)
    ast_nodes: int = Field(ge=0)
    unary_ops: int = Field(ge=0)
    binary_ops: int = Field(ge=0)
    halstead_volume: float = Field(ge=0.0)

    # column order of complexity reports
    FIELDS: ClassVar[Tuple[str, ...]] = (
        "line_count",
        "ast_nodes",
        "unary_ops",
        "binary_ops",
        "halstead_volume",
    )

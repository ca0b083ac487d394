"""Reproducibility manifest written beside every command output."""
from typing import Any, Dict

from pydantic import BaseModel, Field

from app import __version__


class RunManifest(BaseModel):
    """Command, resolved configuration and input digests of one invocation."""

    command: str
    config: Dict[str, Any]
    input_digests: Dict[str, str] = Field(default_factory=dict)
    tool_version: str = __version__
    results: Dict[str, Any] = Field(default_factory=dict)

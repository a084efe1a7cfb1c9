"""Language-model players and their transports."""

from .extract import Extraction, Rejection, extract_action
from .player import (
    LlmAgent,
    LlmPlayerConfig,
    SelfConsistentAgent,
    llm_agent,
    majority_vote,
    self_consistent,
)
from .prompts import render_prompt
from .transport import Completion, HttpTransport, MockTransport, parse_completion

__all__ = [
    "Completion",
    "Extraction",
    "HttpTransport",
    "LlmAgent",
    "LlmPlayerConfig",
    "MockTransport",
    "Rejection",
    "SelfConsistentAgent",
    "extract_action",
    "llm_agent",
    "majority_vote",
    "parse_completion",
    "render_prompt",
    "self_consistent",
]

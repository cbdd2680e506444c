"""Turning raw model replies into typed values, or precise errors.

Replies are expected to carry a JSON object (optionally inside a markdown
fence) and, for improvement replies, a fenced code block.  Parsing is
deliberately forgiving about surrounding prose and strict about the payload:

* no JSON object anywhere               -> NoJson
* object present but wrong shape/types  -> BadShape
* right shape, value out of range       -> OutOfRange
* improvement reply without usable code -> NoCodeBlock
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, Iterator

from .errors import QuestError
from .models import Verdict


class ReplyParseError(QuestError):
    """A model reply could not be turned into a typed value."""


class NoJson(ReplyParseError):
    pass


class BadShape(ReplyParseError):
    pass


class OutOfRange(ReplyParseError):
    pass


class NoCodeBlock(ReplyParseError):
    pass


@dataclass(frozen=True, slots=True)
class EvaluationReply:
    """Parsed dimension evaluation: one insight, five statement scores."""

    insight: str
    scores: tuple[int, ...]

    @property
    def verdicts(self) -> list[Verdict]:
        return [Verdict(v) for v in self.scores]


@dataclass(frozen=True, slots=True)
class ImprovementReply:
    """Parsed improvement reply: points, explanations and the new code."""

    improvement_points: tuple[str, ...]
    explanation_report: tuple[str, ...]
    improved_code: str


@dataclass(frozen=True, slots=True)
class BaselineReply:
    """Parsed whole-code assessment: one insight, one integer score."""

    insight: str
    score: int


_FENCE = re.compile(r"```([^\n`]*)\n(.*?)```", re.DOTALL)


def _fences(text: str) -> list[tuple[str, str]]:
    """All fenced blocks as (tag, content) with one trailing newline removed."""
    blocks = []
    for match in _FENCE.finditer(text):
        content = match.group(2)
        if content.endswith("\n"):
            content = content[:-1]
        blocks.append((match.group(1).strip().lower(), content))
    return blocks


def _candidate_objects(text: str) -> Iterator[dict[str, Any]]:
    """JSON objects found in the reply, most plausible first.

    Content of ```json fences is tried before a whole-text scan, so an
    improvement reply whose code happens to contain dict literals does not
    shadow the actual payload.
    """
    decoder = json.JSONDecoder()
    for tag, content in _fences(text):
        if tag == "json":
            try:
                obj = json.loads(content)
            except ValueError:
                continue
            if isinstance(obj, dict):
                yield obj
    pos = 0
    while True:
        start = text.find("{", pos)
        if start < 0:
            return
        try:
            obj, _ = decoder.raw_decode(text, start)
        except ValueError:
            pos = start + 1
            continue
        if isinstance(obj, dict):
            yield obj
        pos = start + 1


def _payload(text: str, required: tuple[str, ...]) -> dict[str, Any]:
    """First JSON object carrying all required keys."""
    found_any = False
    for obj in _candidate_objects(text):
        found_any = True
        if all(key in obj for key in required):
            return obj
    if found_any:
        raise BadShape(f"reply has a JSON object, but none with keys {list(required)}")
    raise NoJson("reply contains no JSON object")


def _require_str(payload: dict[str, Any], key: str) -> str:
    value = payload[key]
    if not isinstance(value, str):
        raise BadShape(f"{key!r} must be a string, got {type(value).__name__}")
    return value


def _require_int(value: Any, what: str) -> int:
    # bool is an int subclass; reject it explicitly.
    if isinstance(value, bool) or not isinstance(value, int):
        raise BadShape(f"{what} must be an integer, got {value!r}")
    return value


def parse_evaluation_reply(text: str) -> EvaluationReply:
    """Parse a dimension-evaluation reply: insight + exactly five scores in {-1, 0, 1}."""
    payload = _payload(text, ("insight", "scores"))
    insight = _require_str(payload, "insight")
    scores = payload["scores"]
    if not isinstance(scores, list) or len(scores) != 5:
        raise BadShape(f"'scores' must be a list of 5 integers, got {scores!r}")
    values = tuple(_require_int(v, "statement score") for v in scores)
    for v in values:
        if v not in (-1, 0, 1):
            raise OutOfRange(f"statement score {v} outside {{-1, 0, 1}}")
    return EvaluationReply(insight=insight, scores=values)


def parse_baseline_reply(text: str) -> BaselineReply:
    """Parse a whole-code assessment reply: insight + integer score in [-5, 5]."""
    payload = _payload(text, ("insight", "score"))
    insight = _require_str(payload, "insight")
    score = _require_int(payload["score"], "score")
    if not -5 <= score <= 5:
        raise OutOfRange(f"score {score} outside [-5, 5]")
    return BaselineReply(insight=insight, score=score)


def _string_list(payload: dict[str, Any], key: str) -> tuple[str, ...]:
    value = payload[key]
    if not isinstance(value, list):
        raise BadShape(f"{key!r} must be a list of strings, got {type(value).__name__}")
    for item in value:
        if not isinstance(item, str):
            raise BadShape(f"{key!r} must contain only strings, got {item!r}")
    return tuple(value)


def extract_improved_code(text: str) -> str:
    """The candidate code carried by an improvement reply.

    Prefers the first ```improved_code fence.  Failing that, falls back to
    the last fenced block that is not tagged ``json`` (the JSON payload
    travels in its own fence and is never code).
    """
    fences = _fences(text)
    fallback = None
    for tag, content in fences:
        if tag == "improved_code":
            if not content.strip():
                raise NoCodeBlock("improved_code fence is empty")
            return content
        if tag != "json" and content.strip():
            fallback = content
    if fallback is None:
        raise NoCodeBlock("reply carries no fenced code block")
    return fallback


def parse_improvement_reply(text: str) -> ImprovementReply:
    """Parse an improvement reply: points, explanations and fenced code."""
    payload = _payload(text, ("improvement_points", "explanation_report"))
    return ImprovementReply(
        improvement_points=_string_list(payload, "improvement_points"),
        explanation_report=_string_list(payload, "explanation_report"),
        improved_code=extract_improved_code(text),
    )

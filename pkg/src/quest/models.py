"""Domain vocabulary: code units, verdicts, assessments, optimization runs.

Scoring rules live here and nowhere else:

* a verdict on one statement is worth +1 (true), -1 (false) or 0 (not
  applicable / not enough evidence);
* a dimension score is the sum of its five verdicts, hence an integer in
  [-5, 5] for a single sample, or the mean of several such sums when the
  evaluator draws more than one sample;
* the overall score is the arithmetic mean of the ten dimension scores.

Scores are kept at full float precision everywhere; rounding to one decimal
is a rendering concern (see :mod:`quest.reports`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

PYTHON = "python"
JAVASCRIPT = "javascript"
SUPPORTED_LANGUAGES = frozenset({PYTHON, JAVASCRIPT})

#: Tolerance used when validating stored aggregates against recomputation.
_SCORE_TOL = 1e-9


class Verdict(enum.IntEnum):
    """Answer to a single quality statement, valued as its score delta."""

    TRUE = 1
    FALSE = -1
    NOT_APPLICABLE = 0


def verdict_value(verdict: Verdict) -> int:
    """Numeric contribution of a verdict: +1, -1 or 0."""
    return int(verdict)


def dimension_score(verdicts: Sequence[Verdict]) -> int:
    """Sum the five statement verdicts of one dimension sample.

    Raises ValueError unless exactly five verdicts are given.
    """
    if len(verdicts) != 5:
        raise ValueError(f"a dimension sample has exactly 5 verdicts, got {len(verdicts)}")
    return sum(verdict_value(v) for v in verdicts)


def overall_score(dimension_scores: Sequence[float]) -> float:
    """Arithmetic mean of the ten dimension scores."""
    if len(dimension_scores) != 10:
        raise ValueError(f"an overall score averages exactly 10 dimension scores, got {len(dimension_scores)}")
    for s in dimension_scores:
        if not -5.0 <= float(s) <= 5.0:
            raise ValueError(f"dimension score {s!r} outside [-5, 5]")
    return sum(float(s) for s in dimension_scores) / 10.0


@dataclass(slots=True)
class CodeUnit:
    """One piece of code under assessment.

    ``test_command`` may contain the placeholder ``{code}``, substituted with
    the path of the candidate file when functional tests run.  ``provenance``
    is a free-form source label (e.g. the corpus a file came from).
    """

    id: str
    language: str
    source: str
    test_command: str | None = None
    provenance: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("CodeUnit.id must be non-empty")
        if not self.source:
            raise ValueError(f"CodeUnit {self.id!r} has empty source text")
        if not self.language:
            raise ValueError(f"CodeUnit {self.id!r} has empty language tag")

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "language": self.language,
            "source": self.source,
            "test_command": self.test_command,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CodeUnit":
        return cls(
            id=data["id"],
            language=data["language"],
            source=data["source"],
            test_command=data.get("test_command"),
            provenance=data.get("provenance"),
        )


@dataclass(slots=True)
class DimensionAssessment:
    """Verdicts, score and insight for one quality dimension.

    ``samples`` holds one verdict vector per self-consistency draw; ``score``
    is the mean over samples of the per-sample sums.
    """

    dimension: str
    score: float
    insight: str
    samples: list[list[Verdict]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.samples:
            raise ValueError(f"dimension {self.dimension!r} has no verdict samples")
        for sample in self.samples:
            if len(sample) != 5:
                raise ValueError(
                    f"dimension {self.dimension!r}: sample has {len(sample)} verdicts, expected 5"
                )
        expected = sum(dimension_score(s) for s in self.samples) / len(self.samples)
        if not math.isclose(self.score, expected, abs_tol=_SCORE_TOL):
            raise ValueError(
                f"dimension {self.dimension!r}: stored score {self.score} does not match "
                f"verdicts (expected {expected})"
            )

    @classmethod
    def from_samples(
        cls, dimension: str, samples: Iterable[Sequence[Verdict]], insight: str
    ) -> "DimensionAssessment":
        """Build an assessment, deriving the score from the verdicts."""
        normalized = [list(s) for s in samples]
        if not normalized:
            raise ValueError(f"dimension {dimension!r} has no verdict samples")
        score = sum(dimension_score(s) for s in normalized) / len(normalized)
        return cls(dimension=dimension, score=score, insight=insight, samples=normalized)

    def to_dict(self) -> dict[str, Any]:
        return {
            "dimension": self.dimension,
            "score": self.score,
            "insight": self.insight,
            "samples": [[verdict_value(v) for v in sample] for sample in self.samples],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DimensionAssessment":
        return cls(
            dimension=data["dimension"],
            score=data["score"],
            insight=data["insight"],
            samples=[[Verdict(v) for v in sample] for sample in data["samples"]],
        )


@dataclass(slots=True)
class CodeAssessment:
    """Full ten-dimension assessment of one code unit."""

    dimensions: list[DimensionAssessment]
    overall: float
    summary: str

    def __post_init__(self) -> None:
        if len(self.dimensions) != 10:
            raise ValueError(f"an assessment covers exactly 10 dimensions, got {len(self.dimensions)}")
        names = [d.dimension for d in self.dimensions]
        if len(set(names)) != 10:
            raise ValueError(f"duplicate dimension in assessment: {names}")
        expected = overall_score([d.score for d in self.dimensions])
        if not math.isclose(self.overall, expected, abs_tol=_SCORE_TOL):
            raise ValueError(
                f"stored overall {self.overall} does not match dimension scores (expected {expected})"
            )

    @classmethod
    def from_dimensions(
        cls, dimensions: Sequence[DimensionAssessment], summary: str
    ) -> "CodeAssessment":
        dims = list(dimensions)
        return cls(
            dimensions=dims,
            overall=overall_score([d.score for d in dims]),
            summary=summary,
        )

    def dimension(self, name: str) -> DimensionAssessment:
        for d in self.dimensions:
            if d.dimension == name:
                return d
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "dimensions": [d.to_dict() for d in self.dimensions],
            "overall": self.overall,
            "summary": self.summary,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CodeAssessment":
        return cls(
            dimensions=[DimensionAssessment.from_dict(d) for d in data["dimensions"]],
            overall=data["overall"],
            summary=data["summary"],
        )


@dataclass(slots=True)
class ValidationResult:
    """Outcome of checking one candidate (syntax gate, optional tests).

    ``duration`` is wall-clock seconds and is deliberately not serialized:
    run reports must be byte-identical under replay.
    """

    syntax_ok: bool
    tests_ok: bool | None
    detail: str
    duration: float = 0.0

    @property
    def passed(self) -> bool:
        """True when the syntax gate and any requested tests both passed."""
        return self.syntax_ok and self.tests_ok is not False

    def to_dict(self) -> dict[str, Any]:
        return {"syntax_ok": self.syntax_ok, "tests_ok": self.tests_ok, "detail": self.detail}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ValidationResult":
        return cls(
            syntax_ok=data["syntax_ok"],
            tests_ok=data["tests_ok"],
            detail=data["detail"],
        )


class IterationStatus(enum.Enum):
    """Why an optimizer attempt ended the way it did."""

    ACCEPTED = "accepted"
    REJECTED_VALIDATION = "rejected_validation"
    REJECTED_SCORE = "rejected_score"
    REJECTED_PARSE = "rejected_parse"


@dataclass(slots=True)
class IterationOutcome:
    """Record of one improvement attempt.

    Whatever the status, the attempt consumed one iteration.  Fields are
    filled as far as the attempt got: a parse failure has no candidate code,
    a validation failure has no assessment, and so on.
    """

    index: int
    status: IterationStatus
    candidate_code: str | None = None
    validation: ValidationResult | None = None
    assessment: CodeAssessment | None = None
    improvement_points: list[str] = field(default_factory=list)
    explanations: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError("iteration indices start at 1")
        if self.status is IterationStatus.ACCEPTED:
            if self.candidate_code is None or self.assessment is None:
                raise ValueError(f"iteration {self.index}: accepted without code or assessment")
            if self.validation is None or not self.validation.passed:
                raise ValueError(f"iteration {self.index}: accepted without passing validation")
        if self.status is IterationStatus.REJECTED_SCORE and self.assessment is None:
            raise ValueError(f"iteration {self.index}: rejected on score without an assessment")

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "status": self.status.value,
            "candidate_code": self.candidate_code,
            "validation": self.validation.to_dict() if self.validation else None,
            "assessment": self.assessment.to_dict() if self.assessment else None,
            "improvement_points": list(self.improvement_points),
            "explanations": list(self.explanations),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "IterationOutcome":
        return cls(
            index=data["index"],
            status=IterationStatus(data["status"]),
            candidate_code=data.get("candidate_code"),
            validation=ValidationResult.from_dict(data["validation"]) if data.get("validation") else None,
            assessment=CodeAssessment.from_dict(data["assessment"]) if data.get("assessment") else None,
            improvement_points=list(data.get("improvement_points", [])),
            explanations=list(data.get("explanations", [])),
        )


@dataclass(slots=True)
class OptimizerConfig:
    """Knobs for the improvement loop."""

    max_iterations: int = 5
    target_score: float = 5.0
    self_consistency: int = 1
    run_tests: bool = False

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.self_consistency < 1:
            raise ValueError("self_consistency must be at least 1")
        if not -5.0 <= self.target_score <= 5.0:
            raise ValueError("target_score must lie in [-5, 5]")

    def to_dict(self) -> dict[str, Any]:
        return {
            "max_iterations": self.max_iterations,
            "target_score": self.target_score,
            "self_consistency": self.self_consistency,
            "run_tests": self.run_tests,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "OptimizerConfig":
        return cls(
            max_iterations=data["max_iterations"],
            target_score=data["target_score"],
            self_consistency=data.get("self_consistency", 1),
            run_tests=data.get("run_tests", False),
        )


@dataclass(slots=True)
class OptimizationRun:
    """Complete record of one improvement loop over one code unit."""

    initial_code: CodeUnit
    initial_assessment: CodeAssessment
    attempts: list[IterationOutcome]
    final_code: CodeUnit
    final_assessment: CodeAssessment
    config: OptimizerConfig

    def __post_init__(self) -> None:
        if len(self.attempts) > self.config.max_iterations:
            raise ValueError(
                f"{len(self.attempts)} attempts recorded but max_iterations is {self.config.max_iterations}"
            )
        indices = [a.index for a in self.attempts]
        if indices != list(range(1, len(indices) + 1)):
            raise ValueError(f"attempt indices must be 1..n in order, got {indices}")
        # Accepted scores must climb strictly, starting above the initial score.
        floor = self.initial_assessment.overall
        for attempt in self.attempts:
            if attempt.status is IterationStatus.ACCEPTED:
                assert attempt.assessment is not None
                if attempt.assessment.overall <= floor:
                    raise ValueError(
                        f"iteration {attempt.index}: accepted score {attempt.assessment.overall} "
                        f"does not improve on {floor}"
                    )
                floor = attempt.assessment.overall
        if self.final_assessment.overall < self.initial_assessment.overall:
            raise ValueError("final score below initial score")

    @property
    def accepted(self) -> list[IterationOutcome]:
        return [a for a in self.attempts if a.status is IterationStatus.ACCEPTED]

    def to_dict(self) -> dict[str, Any]:
        return {
            "initial_code": self.initial_code.to_dict(),
            "initial_assessment": self.initial_assessment.to_dict(),
            "attempts": [a.to_dict() for a in self.attempts],
            "final_code": self.final_code.to_dict(),
            "final_assessment": self.final_assessment.to_dict(),
            "config": self.config.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "OptimizationRun":
        return cls(
            initial_code=CodeUnit.from_dict(data["initial_code"]),
            initial_assessment=CodeAssessment.from_dict(data["initial_assessment"]),
            attempts=[IterationOutcome.from_dict(a) for a in data["attempts"]],
            final_code=CodeUnit.from_dict(data["final_code"]),
            final_assessment=CodeAssessment.from_dict(data["final_assessment"]),
            config=OptimizerConfig.from_dict(data["config"]),
        )

"""Ten-dimension code assessment driven by chat completions.

Per dimension: ask for five statement verdicts (retrying malformed replies
up to three total attempts), optionally several times for self-consistency,
then score = mean over draws of the verdict sums.  With several draws the
insights are condensed by one extra summary completion; a final completion
summarizes the whole assessment.

Request nonces are allocated deterministically — draw ``s``, parse attempt
``r`` maps to nonce ``3*s + r``; summary completions use nonce 0 — so a
recorded transcript lines up exactly on replay.

Dimensions may be evaluated concurrently; results are assembled in catalog
order, which keeps the output independent of execution order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from .catalog import QualityDimension, StatementCatalog, default_catalog
from .errors import QuestError
from .gateway import ChatRequest, LlmGateway, ModelParams
from .models import CodeAssessment, CodeUnit, DimensionAssessment
from .parsing import (
    BaselineReply,
    ReplyParseError,
    parse_baseline_reply,
    parse_evaluation_reply,
)
from .prompts import (
    render_baseline_prompt,
    render_code_summary_prompt,
    render_dimension_prompt,
    render_dimension_summary_prompt,
)

#: Total completions requested per sample before giving up on a dimension.
PARSE_ATTEMPTS = 3


class EvaluatorError(QuestError):
    """The evaluator could not produce an assessment."""


class DimensionUnavailable(EvaluatorError):
    """Every parse attempt for one dimension came back malformed."""

    def __init__(self, dimension: str, attempts: int, last_error: Exception):
        self.dimension = dimension
        super().__init__(
            f"dimension {dimension!r}: no parseable reply after {attempts} attempts "
            f"(last error: {last_error})"
        )


def sample_nonce(sample_index: int, attempt: int) -> int:
    """Nonce for parse attempt ``attempt`` of self-consistency draw ``sample_index``."""
    return sample_index * PARSE_ATTEMPTS + attempt


class Evaluator:
    """Assesses code units through a completion gateway."""

    def __init__(
        self,
        gateway: LlmGateway,
        model: ModelParams,
        self_consistency: int = 1,
        parallelism: int = 1,
    ):
        if self_consistency < 1:
            raise ValueError("self_consistency must be at least 1")
        if parallelism < 1:
            raise ValueError("parallelism must be at least 1")
        self.gateway = gateway
        self.model = model
        self.self_consistency = self_consistency
        self.parallelism = parallelism

    # -- single dimension ------------------------------------------------

    def evaluate_dimension(self, code: str, dimension: QualityDimension) -> DimensionAssessment:
        system, user = render_dimension_prompt(code, dimension)
        samples = []
        insights = []
        for draw in range(self.self_consistency):
            reply = self._complete_with_parse_retry(system, user, dimension, draw)
            samples.append(reply.verdicts)
            insights.append(reply.insight)
        if len(insights) == 1:
            insight = insights[0]
        else:
            insight = self._condense_insights(dimension.name, insights)
        return DimensionAssessment.from_samples(dimension.name, samples, insight)

    def _complete_with_parse_retry(self, system, user, dimension, draw):
        last_error: Exception | None = None
        for attempt in range(PARSE_ATTEMPTS):
            request = ChatRequest.build(
                system, user, self.model, attempt_nonce=sample_nonce(draw, attempt)
            )
            text = self.gateway.complete(request)
            try:
                return parse_evaluation_reply(text)
            except ReplyParseError as exc:
                last_error = exc
        raise DimensionUnavailable(dimension.name, PARSE_ATTEMPTS, last_error)

    def _condense_insights(self, dimension_name: str, insights: list[str]) -> str:
        system, user = render_dimension_summary_prompt(dimension_name, insights)
        request = ChatRequest.build(system, user, self.model)
        return self.gateway.complete(request).strip()

    # -- whole code ------------------------------------------------------

    def evaluate(self, code: CodeUnit | str, catalog: StatementCatalog | None = None) -> CodeAssessment:
        """Assess all ten dimensions and summarize, (11 + extras) completions."""
        source = code.source if isinstance(code, CodeUnit) else code
        catalog = catalog or default_catalog()
        if self.parallelism > 1:
            with ThreadPoolExecutor(max_workers=self.parallelism) as pool:
                dimensions = list(
                    pool.map(lambda d: self.evaluate_dimension(source, d), catalog)
                )
        else:
            dimensions = [self.evaluate_dimension(source, d) for d in catalog]
        system, user = render_code_summary_prompt((d.dimension, d.insight) for d in dimensions)
        summary = self.gateway.complete(ChatRequest.build(system, user, self.model)).strip()
        return CodeAssessment.from_dimensions(dimensions, summary)

    # -- ablation baseline ----------------------------------------------

    def evaluate_baseline(self, code: CodeUnit | str) -> BaselineReply:
        """Single-prompt whole-code score on the same -5..5 scale."""
        source = code.source if isinstance(code, CodeUnit) else code
        system, user = render_baseline_prompt(source)
        last_error: Exception | None = None
        for attempt in range(PARSE_ATTEMPTS):
            request = ChatRequest.build(system, user, self.model, attempt_nonce=attempt)
            text = self.gateway.complete(request)
            try:
                return parse_baseline_reply(text)
            except ReplyParseError as exc:
                last_error = exc
        raise EvaluatorError(
            f"baseline assessment: no parseable reply after {PARSE_ATTEMPTS} attempts "
            f"(last error: {last_error})"
        )

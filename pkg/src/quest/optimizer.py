"""Iterative improvement loop: improve, validate, re-assess, maybe accept.

Each iteration asks the model for an improved version of the *current best*
code (rejected candidates never feed forward), gates it on syntax (and
optionally the unit's tests), re-assesses it, and accepts only a strictly
higher overall score — ties lose.  Every attempt consumes an iteration
whatever its outcome, so a run makes at most ``max_iterations`` improvement
completions.  The loop stops early once the current score reaches
``target_score``.

If a model call fails mid-run — requesting an improvement or assessing the
candidate it produced — the work done so far is preserved:
``OptimizationAborted`` carries a valid partial run.  A failure during the
*initial* assessment propagates as-is; there is nothing to preserve yet.
"""

from __future__ import annotations

from dataclasses import replace

from .catalog import StatementCatalog, default_catalog
from .errors import QuestError
from .evaluator import Evaluator, EvaluatorError
from .gateway import ChatRequest, GatewayError
from .models import (
    CodeAssessment,
    CodeUnit,
    IterationOutcome,
    IterationStatus,
    OptimizationRun,
    OptimizerConfig,
)
from .parsing import ReplyParseError, parse_improvement_reply
from .prompts import render_improvement_prompt
from .validation import ValidationSettings, validate_candidate


def accept_candidate(previous_overall: float, candidate_overall: float) -> bool:
    """Strict improvement rule: equal scores are rejected."""
    return candidate_overall > previous_overall


class OptimizationAborted(QuestError):
    """A candidate assessment failed; ``partial_run`` holds progress so far."""

    def __init__(self, iteration: int, cause: Exception, partial_run: OptimizationRun):
        self.iteration = iteration
        self.cause = cause
        self.partial_run = partial_run
        super().__init__(f"optimization aborted at iteration {iteration}: {cause}")


class Optimizer:
    """Runs improvement loops using one evaluator and one validation policy."""

    def __init__(self, evaluator: Evaluator, validation: ValidationSettings | None = None):
        self.evaluator = evaluator
        self.validation = validation or ValidationSettings()

    def optimize(
        self,
        unit: CodeUnit,
        config: OptimizerConfig | None = None,
        catalog: StatementCatalog | None = None,
    ) -> OptimizationRun:
        config = config or OptimizerConfig()
        catalog = catalog or default_catalog()

        current = unit
        current_assessment = self.evaluator.evaluate(current, catalog)
        initial_assessment = current_assessment
        attempts: list[IterationOutcome] = []

        def partial() -> OptimizationRun:
            return OptimizationRun(
                initial_code=unit,
                initial_assessment=initial_assessment,
                attempts=list(attempts),
                final_code=current,
                final_assessment=current_assessment,
                config=config,
            )

        for iteration in range(1, config.max_iterations + 1):
            if current_assessment.overall >= config.target_score:
                break

            system, user = render_improvement_prompt(current.source, current_assessment)
            request = ChatRequest.build(
                system, user, self.evaluator.model, attempt_nonce=iteration
            )
            try:
                reply_text = self.evaluator.gateway.complete(request)
            except GatewayError as exc:
                raise OptimizationAborted(iteration, exc, partial()) from exc
            try:
                reply = parse_improvement_reply(reply_text)
            except ReplyParseError:
                attempts.append(
                    IterationOutcome(index=iteration, status=IterationStatus.REJECTED_PARSE)
                )
                continue

            candidate = replace(current, source=reply.improved_code)
            validation = validate_candidate(candidate, self.validation, with_tests=config.run_tests)
            if not validation.passed:
                attempts.append(
                    IterationOutcome(
                        index=iteration,
                        status=IterationStatus.REJECTED_VALIDATION,
                        candidate_code=candidate.source,
                        validation=validation,
                        improvement_points=list(reply.improvement_points),
                        explanations=list(reply.explanation_report),
                    )
                )
                continue

            try:
                candidate_assessment = self.evaluator.evaluate(candidate, catalog)
            except (EvaluatorError, GatewayError) as exc:
                raise OptimizationAborted(iteration, exc, partial()) from exc

            if accept_candidate(current_assessment.overall, candidate_assessment.overall):
                status = IterationStatus.ACCEPTED
            else:
                status = IterationStatus.REJECTED_SCORE
            attempts.append(
                IterationOutcome(
                    index=iteration,
                    status=status,
                    candidate_code=candidate.source,
                    validation=validation,
                    assessment=candidate_assessment,
                    improvement_points=list(reply.improvement_points),
                    explanations=list(reply.explanation_report),
                )
            )
            if status is IterationStatus.ACCEPTED:
                current = candidate
                current_assessment = candidate_assessment

        return partial()

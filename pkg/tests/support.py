"""Shared machinery for building replay transcripts in tests.

The builder renders prompts through the package's own renderers and pairs
them with hand-authored response texts, so a test fully controls what the
"model" says while request digests line up exactly with what the code under
test will ask for.
"""

from __future__ import annotations

import json
import stat
from pathlib import Path

from quest.catalog import StatementCatalog, default_catalog
from quest.evaluator import sample_nonce
from quest.gateway import ChatExchange, ChatRequest, ModelParams
from quest.models import CodeAssessment, DimensionAssessment, Verdict
from quest.prompts import (
    render_baseline_prompt,
    render_code_summary_prompt,
    render_dimension_prompt,
    render_dimension_summary_prompt,
    render_improvement_prompt,
)

MODEL = ModelParams(name="test-model", temperature=0.0, seed=7)

FIXTURE_TIMESTAMP = "2026-01-01T00:00:00+00:00"


# -- stand-in external tools --------------------------------------------


def make_tool(directory: Path, name: str, body: str) -> str:
    """Write an executable shell script and return its path."""
    path = directory / name
    path.write_text("#!/bin/sh\n" + body, encoding="utf-8")
    path.chmod(path.stat().st_mode | stat.S_IXUSR)
    return str(path)


def bandit_capture(low: int, medium: int, high: int, indent: str = "    ") -> str:
    """Output in the shape bandit prints after scanning one file."""
    deep = indent * 2
    return (
        "Test results:\n"
        f"{indent}No issues identified.\n"
        "\n"
        "Code scanned:\n"
        f"{indent}Total lines of code: 15\n"
        f"{indent}Total lines skipped (#nosec): 0\n"
        "\n"
        "Run metrics:\n"
        f"{indent}Total issues (by severity):\n"
        f"{deep}Undefined: 0\n"
        f"{deep}Low: {low}\n"
        f"{deep}Medium: {medium}\n"
        f"{deep}High: {high}\n"
        f"{indent}Total issues (by confidence):\n"
        f"{deep}Undefined: 0\n"
        f"{deep}Low: {low}\n"
        f"{deep}Medium: {medium}\n"
        f"{deep}High: {high}\n"
        "Files skipped (0):\n"
    )


# -- canned reply texts -------------------------------------------------


def evaluation_reply(insight: str, scores: list[int]) -> str:
    body = json.dumps({"insight": insight, "scores": scores})
    return f"Here is my assessment.\n```json\n{body}\n```"


def baseline_reply(insight: str, score: int) -> str:
    body = json.dumps({"insight": insight, "score": score})
    return f"```json\n{body}\n```"


def improvement_reply(points: list[str], explanations: list[str], improved_code: str) -> str:
    body = json.dumps({"improvement_points": points, "explanation_report": explanations})
    return f"```json\n{body}\n```\n\nThen quote your code:\n```improved_code\n{improved_code}\n```"


# -- assessment fixtures ------------------------------------------------


def spread_vectors(levels: list[int]) -> dict[str, list[int]]:
    """One verdict vector per dimension, each summing to the given level."""
    catalog = default_catalog()
    assert len(levels) == 10
    vectors = {}
    for dim, level in zip(catalog, levels):
        vec = [0, 0, 0, 0, 0]
        remaining = level
        for i in range(5):
            if remaining > 0:
                vec[i] = 1
                remaining -= 1
            elif remaining < 0:
                vec[i] = -1
                remaining += 1
        assert sum(vec) == level
        vectors[dim.name] = vec
    return vectors


def make_assessment(
    vectors: dict[str, list[int]],
    insights: dict[str, str],
    summary: str,
    catalog: StatementCatalog | None = None,
) -> CodeAssessment:
    """The assessment the evaluator is expected to produce for these replies."""
    catalog = catalog or default_catalog()
    dims = [
        DimensionAssessment.from_samples(
            dim.name,
            [[Verdict(v) for v in vectors[dim.name]]],
            insights[dim.name],
        )
        for dim in catalog
    ]
    return CodeAssessment.from_dimensions(dims, summary)


# -- transcript construction --------------------------------------------


class TranscriptBuilder:
    """Accumulates exchanges and writes them as a JSONL transcript."""

    def __init__(self, model: ModelParams = MODEL):
        self.model = model
        self.exchanges: list[ChatExchange] = []

    def add(self, system: str, user: str, nonce: int, response_text: str) -> None:
        request = ChatRequest.build(system, user, self.model, attempt_nonce=nonce)
        self.exchanges.append(
            ChatExchange(request=request, response_text=response_text, timestamp=FIXTURE_TIMESTAMP)
        )

    def add_dimension_replies(
        self, code: str, dimension, texts: list[str], draw: int = 0
    ) -> None:
        """Replies for successive parse attempts of one self-consistency draw."""
        system, user = render_dimension_prompt(code, dimension)
        for attempt, text in enumerate(texts):
            self.add(system, user, sample_nonce(draw, attempt), text)

    def add_evaluation(
        self,
        code: str,
        vectors: dict[str, list[int]],
        insights: dict[str, str],
        summary: str,
        catalog: StatementCatalog | None = None,
    ) -> CodeAssessment:
        """Full 11-exchange evaluation script; returns the expected assessment."""
        catalog = catalog or default_catalog()
        for dim in catalog:
            self.add_dimension_replies(
                code, dim, [evaluation_reply(insights[dim.name], vectors[dim.name])]
            )
        expected = make_assessment(vectors, insights, summary, catalog)
        system, user = render_code_summary_prompt(
            (d.dimension, d.insight) for d in expected.dimensions
        )
        self.add(system, user, 0, summary)
        return expected

    def add_self_consistent_evaluation(
        self,
        code: str,
        draws: dict[str, list[list[int]]],
        draw_insights: dict[str, list[str]],
        condensed: dict[str, str],
        summary: str,
        catalog: StatementCatalog | None = None,
    ) -> CodeAssessment:
        """Evaluation with k > 1 draws per dimension plus condensation replies."""
        catalog = catalog or default_catalog()
        dims = []
        for dim in catalog:
            system, user = render_dimension_prompt(code, dim)
            for draw, (vector, insight) in enumerate(
                zip(draws[dim.name], draw_insights[dim.name])
            ):
                self.add(system, user, sample_nonce(draw, 0), evaluation_reply(insight, vector))
            system, user = render_dimension_summary_prompt(
                dim.name, draw_insights[dim.name]
            )
            self.add(system, user, 0, condensed[dim.name])
            dims.append(
                DimensionAssessment.from_samples(
                    dim.name,
                    [[Verdict(v) for v in vec] for vec in draws[dim.name]],
                    condensed[dim.name],
                )
            )
        expected = CodeAssessment.from_dimensions(dims, summary)
        system, user = render_code_summary_prompt((d.dimension, d.insight) for d in dims)
        self.add(system, user, 0, summary)
        return expected

    def add_improvement(
        self, code: str, assessment: CodeAssessment, iteration: int, response_text: str
    ) -> None:
        system, user = render_improvement_prompt(code, assessment)
        self.add(system, user, iteration, response_text)

    def add_baseline(self, code: str, texts: list[str]) -> None:
        system, user = render_baseline_prompt(code)
        for attempt, text in enumerate(texts):
            self.add(system, user, attempt, text)

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        lines = [json.dumps(e.to_dict(), sort_keys=True) for e in self.exchanges]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path


class CountingGateway:
    """Wraps a gateway, counting completions."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = 0

    def complete(self, request) -> str:
        self.calls += 1
        return self.inner.complete(request)


# -- standard optimizer fixture scripts ---------------------------------

INITIAL_CODE = "def add(a, b):\n    return a + b\n"

CANDIDATE_DOCSTRING = (
    'def add(a, b):\n    """Add two numbers."""\n    return a + b\n'
)

CANDIDATE_BROKEN = "def add(a, b:\n    return a + b\n"

CANDIDATE_WORSE = (
    "def add(a, b):\n    # adds things\n    result = a + b\n    return result\n"
)

CANDIDATE_TYPED = (
    'def add(a: float, b: float) -> float:\n    """Add two numbers."""\n    return a + b\n'
)

CANDIDATE_FINAL = (
    'def add(a: float, b: float) -> float:\n'
    '    """Return the sum of ``a`` and ``b``."""\n'
    "    return a + b\n"
)


def level_insights(tag: str) -> dict[str, str]:
    return {name: f"{name} notes for {tag}." for name in (d.name for d in default_catalog())}


# -- "rough dynamic-programming snippet" evaluation fixture -------------
#
# A classic longest-pair-chain implementation with the usual warts: 'max'
# shadows the builtin, terse names, no comments, no validation.  The canned
# verdicts sum per dimension to [-3, -1, 1, -2, -3, 0, -4, -2, -3, 4],
# totalling -13, i.e. an overall of -1.3.

MBPP_CODE = """\
class Pair(object):
    def __init__(self, a, b):
        self.a = a
        self.b = b

def max_chain_length(arr, n):
    max = 0
    mcl = [1 for i in range(n)]
    for i in range(1, n):
        for j in range(0, i):
            if (arr[i].a > arr[j].b and mcl[i] < mcl[j] + 1):
                mcl[i] = mcl[j] + 1
    for i in range(n):
        if (max < mcl[i]):
            max = mcl[i]
    return max
"""

MBPP_VECTORS = {
    "Readability": [-1, -1, -1, 1, -1],
    "Maintainability": [1, -1, -1, 0, 0],
    "Testability": [1, 1, -1, 0, 0],
    "Efficiency": [-1, -1, 0, 0, 0],
    "Robustness": [-1, -1, -1, 0, 0],
    "Security": [1, -1, 0, 0, 0],
    "Documentation": [-1, -1, -1, -1, 0],
    "Modularity": [0, -1, -1, 1, -1],
    "Scalability": [-1, 0, -1, -1, 0],
    "Portability": [1, 1, 1, 1, 0],
}

MBPP_INSIGHTS = {
    "Readability": "Variable names are terse and 'max' shadows a builtin; no comments explain the nested loops.",
    "Maintainability": "The structure is understandable but repetitive, with no clear interfaces.",
    "Testability": "Deterministic and free of globals, but the nested control flow complicates testing.",
    "Efficiency": "The quadratic pairwise scan repeats work that a sort-based approach would avoid.",
    "Robustness": "Inputs are never validated and there is no error handling at all.",
    "Security": "No injection surface, though nothing follows secure-coding practice explicitly.",
    "Documentation": "There are no docstrings, no comments, and no description of inputs or outputs.",
    "Modularity": "All logic sits in one function with deep nesting and no separable parts.",
    "Scalability": "O(n^2) time over the pair list limits growth and there is no path to distribution.",
    "Portability": "Pure standard-library code with no platform assumptions or hardcoded paths.",
}

MBPP_SUMMARY = (
    "A straightforward dynamic-programming chain-length implementation whose logic is "
    "correct but rough: terse naming (including shadowing 'max'), no comments or "
    "documentation, no input validation, and a quadratic scan that limits scalability. "
    "Its one strength is portability, relying only on the standard library."
)

MBPP_OVERALL = -1.3

MBPP_BASELINE_SCORE = 2
MBPP_BASELINE_INSIGHT = (
    "The code is functional and implements the chain-length logic correctly, but lacks "
    "comments, shadows the builtin 'max', and has no error handling."
)


def build_mbpp_transcript(path: str | Path, model: ModelParams = MODEL) -> dict:
    """Evaluation + baseline script for the rough DP snippet."""
    builder = TranscriptBuilder(model)
    expected = builder.add_evaluation(MBPP_CODE, MBPP_VECTORS, MBPP_INSIGHTS, MBPP_SUMMARY)
    builder.add_baseline(
        MBPP_CODE, [baseline_reply(MBPP_BASELINE_INSIGHT, MBPP_BASELINE_SCORE)]
    )
    builder.write(path)
    return {"path": Path(path), "expected": expected, "exchanges": len(builder.exchanges)}


# -- standard optimizer script ------------------------------------------
#
# Five iterations covering every outcome: accept, syntax rejection, score
# rejection, then two more accepts.  Improvement prompts for iterations 2-4
# all render from candidate A (the current best): a transcript lookup would
# fail loudly if a rejected candidate ever fed forward.

OPTIMIZER_STAGES = {
    "initial": (INITIAL_CODE, [1] * 10, 1.0),
    "a": (CANDIDATE_DOCSTRING, [2] * 10, 2.0),
    "c": (CANDIDATE_WORSE, [2] * 5 + [1] * 5, 1.5),
    "d": (CANDIDATE_TYPED, [3] * 10, 3.0),
    "e": (CANDIDATE_FINAL, [4] * 5 + [3] * 5, 3.5),
}


def build_optimizer_transcript(path: str | Path, model: ModelParams = MODEL) -> dict:
    builder = TranscriptBuilder(model)
    expected = {}
    for stage, (code, levels, overall) in OPTIMIZER_STAGES.items():
        expected[stage] = builder.add_evaluation(
            code,
            spread_vectors(levels),
            level_insights(stage),
            f"Summary of stage {stage}.",
        )
        assert expected[stage].overall == overall

    def improve(on_stage: str, iteration: int, new_code: str, note: str) -> None:
        code, _, _ = OPTIMIZER_STAGES[on_stage]
        builder.add_improvement(
            code,
            expected[on_stage],
            iteration,
            improvement_reply([note], [f"Applied: {note}"], new_code),
        )

    improve("initial", 1, CANDIDATE_DOCSTRING, "Add a docstring.")
    improve("a", 2, CANDIDATE_BROKEN, "Refactor the signature.")
    improve("a", 3, CANDIDATE_WORSE, "Name the intermediate result.")
    improve("a", 4, CANDIDATE_TYPED, "Add type annotations.")
    improve("d", 5, CANDIDATE_FINAL, "Expand the docstring.")

    builder.write(path)
    return {"path": Path(path), "expected": expected, "exchanges": len(builder.exchanges)}

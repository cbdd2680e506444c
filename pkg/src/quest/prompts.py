"""Prompt construction for every completion the package requests.

The templates are fixed text; rendering only substitutes the named
placeholders (``{code}``, ``{dimension_statements}``, ``{quality_dimension}``,
``{quality_insight}``, ...).  Substitution is a single regex pass, so code
that itself contains a placeholder-looking token cannot be re-expanded, and
the literal braces of the JSON output examples are never touched.
``{improved_code_here}`` in the improvement template is part of the
instructions shown to the model, not a placeholder.

All prompts share one system message.  Scores quoted inside the feedback
blocks are rendered to one decimal (``-3.0``), matching how scores are
displayed everywhere else.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

from .catalog import QualityDimension
from .models import CodeAssessment

SYSTEM_MESSAGE = (
    "You are a helpful and harmless AI software engineer.\n"
    "You must provide an answer to the following request.\n"
    "Be brief and precise."
)

DIMENSION_TEMPLATE = """\
### CODE:
```
{code}
```

### STATEMENTS:
{dimension_statements}

### TASK:
Think step by step to assess the veracity of each STATEMENT
in light of the CODE provided.
Your answer to each statement must come from one of the following:
* -1 if the statement is false,
* 1 if the statement is true,
* 0 if the statement is not applicable or there is not enough
evidence in the CODE to address it.

You must also provide a short summary about the quality of the
code from a {quality_dimension} perspective, justifying your
answers across the various statements.

### OUTPUT:
Return your answer in valid JSON as shown below:
```json
{  "insight": <code quality summary:str>,
    "scores": [<score_to_statement1:int>, ...]
}
```"""

IMPROVEMENT_TEMPLATE = """\
### Code:
```
{code}
```
### Quality Dimensions Feedback:
{quality_insight}

### TASK:
You are provided with a code script and detailed feedback
for each quality dimension.
For each quality dimension, you are provided with:
* A score from -5 to 5.The higher the score,
    the better the quality.
* Dimension insights,highlighting potential areas
    of improvement.

Think step by step to complete the following:
1) For each dimension, reflect on the score and insights.
2) Condense a list of improvement points, so that the code
would be evaluated at a higher score for each dimension.
3) Improve the code script according to the improvement
points, prioritizing dimensions with lower scores.
4) Return:
* the improvement points identified
* the improved version of the code script
* explanations for each of the changes you've made
Note:
* ALL improvement points MUST be addressed via meaningful
changes to the code.
### OUTPUT:
Your final output contains two parts:
Return your answer in a valid JSON as shown below:
```json
{
    "improvement_points": List[str],
    "explanation_report": List[str]
}
```
Then quote your code in the following section:
```improved_code
{improved_code_here}
```"""

BASELINE_TEMPLATE = """\
### CODE:
```
{code}
```

### TASK:
Think step by step to produce both a quantitative and
qualitative assessment of the CODE provided.

* Your qualitative assessment must be a short summary
about the quality of the CODE.

* Your quantitative assessment must be an integer on
a scale from -5 to 5, which respectively represent the
low and high-quality ends of the scale.

Both types of evaluations must agree with each other.

### OUTPUT:
Return your answer in a valid JSON as shown below:
```json
{
    "insight": <qualitative assessment:str>,
    "score": <quantitative assessment:int>
}
```"""

DIMENSION_SUMMARY_TEMPLATE = """\
### INSIGHTS:
{insights}

### TASK:
The INSIGHTS above are {count} independent assessments of the
same code from a {quality_dimension} perspective.
Think step by step to condense them into a single short summary
that preserves the points they agree on.
Respond with the summary text only."""

CODE_SUMMARY_TEMPLATE = """\
### EVALUATIONS:
{evaluations}

### TASK:
The EVALUATIONS above assess the same code, one quality
dimension each.
Think step by step to write a single short paragraph on the
overall quality of the code, covering the main strengths and
weaknesses reported.
Respond with the summary text only."""

_PLACEHOLDER = re.compile(
    r"\{(code|dimension_statements|quality_dimension|quality_insight|insights|count|evaluations)\}"
)


def _fill(template: str, **values: str) -> str:
    def replace(match: re.Match[str]) -> str:
        return values[match.group(1)]

    return _PLACEHOLDER.sub(replace, template)


def format_statements(dimension: QualityDimension) -> str:
    """Number the five statements 1..5, one per line."""
    return "\n".join(f"{i}. {text}" for i, text in enumerate(dimension.statements, start=1))


def quality_feedback_block(assessment: CodeAssessment) -> str:
    """Per-dimension feedback fed back to the model during improvement."""
    blocks = [
        f"{d.dimension} (score: {d.score:.1f})\n{d.insight}" for d in assessment.dimensions
    ]
    return "\n\n".join(blocks)


def render_dimension_prompt(code: str, dimension: QualityDimension) -> tuple[str, str]:
    """(system, user) pair asking for the five verdicts of one dimension."""
    user = _fill(
        DIMENSION_TEMPLATE,
        code=code,
        dimension_statements=format_statements(dimension),
        quality_dimension=dimension.name,
    )
    return SYSTEM_MESSAGE, user


def render_improvement_prompt(code: str, assessment: CodeAssessment) -> tuple[str, str]:
    """(system, user) pair asking for an improved version of ``code``."""
    user = _fill(
        IMPROVEMENT_TEMPLATE,
        code=code,
        quality_insight=quality_feedback_block(assessment),
    )
    return SYSTEM_MESSAGE, user


def render_baseline_prompt(code: str) -> tuple[str, str]:
    """(system, user) pair for the single-completion whole-code assessment."""
    return SYSTEM_MESSAGE, _fill(BASELINE_TEMPLATE, code=code)


def render_dimension_summary_prompt(dimension_name: str, insights: Sequence[str]) -> tuple[str, str]:
    """Condense the insights of several self-consistency draws into one."""
    rendered = "\n\n".join(
        f"Assessment {i}:\n{text}" for i, text in enumerate(insights, start=1)
    )
    user = _fill(
        DIMENSION_SUMMARY_TEMPLATE,
        insights=rendered,
        count=str(len(insights)),
        quality_dimension=dimension_name,
    )
    return SYSTEM_MESSAGE, user


def render_code_summary_prompt(insights: Iterable[tuple[str, str]]) -> tuple[str, str]:
    """Summarize the per-dimension insights into one whole-code paragraph.

    ``insights`` yields (dimension name, insight text) pairs in catalog order.
    """
    rendered = "\n\n".join(f"{name}:\n{text}" for name, text in insights)
    return SYSTEM_MESSAGE, _fill(CODE_SUMMARY_TEMPLATE, evaluations=rendered)

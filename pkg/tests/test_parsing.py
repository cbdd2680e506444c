import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quest.models import Verdict
from quest.parsing import (
    BadShape,
    NoCodeBlock,
    NoJson,
    OutOfRange,
    ReplyParseError,
    extract_improved_code,
    parse_baseline_reply,
    parse_evaluation_reply,
    parse_improvement_reply,
)


# -- evaluation replies --------------------------------------------------


def test_parses_bare_json():
    reply = parse_evaluation_reply('{"insight": "fine", "scores": [1, -1, 0, 1, 1]}')
    assert reply.insight == "fine"
    assert reply.scores == (1, -1, 0, 1, 1)
    assert reply.verdicts == [
        Verdict.TRUE,
        Verdict.FALSE,
        Verdict.NOT_APPLICABLE,
        Verdict.TRUE,
        Verdict.TRUE,
    ]


def test_parses_fenced_json_with_prose():
    text = (
        "Let me think step by step about each statement.\n\n"
        "```json\n"
        '{"insight": "solid code", "scores": [1, 1, 1, 0, -1]}\n'
        "```\n"
        "Hope this helps!"
    )
    assert parse_evaluation_reply(text).scores == (1, 1, 1, 0, -1)


def test_parses_json_after_unrelated_braces():
    text = 'The set {1, 2} is small. {"insight": "x", "scores": [0, 0, 0, 0, 0]}'
    assert parse_evaluation_reply(text).scores == (0,) * 5


def test_no_json_at_all():
    with pytest.raises(NoJson):
        parse_evaluation_reply("I cannot answer that.")


def test_json_without_required_keys_is_bad_shape():
    with pytest.raises(BadShape):
        parse_evaluation_reply('{"verdicts": [1, 1, 1, 1, 1]}')


@pytest.mark.parametrize(
    "scores",
    [[1, 1, 1, 1], [1, 1, 1, 1, 1, 1], "11111", [1, 1, 1, 1, None], [1, 1, 1, 1, 0.0], [1, 1, 1, 1, True]],
)
def test_malformed_scores_are_bad_shape(scores):
    payload = json.dumps({"insight": "x", "scores": scores})
    with pytest.raises(BadShape):
        parse_evaluation_reply(payload)


def test_score_out_of_range():
    with pytest.raises(OutOfRange):
        parse_evaluation_reply('{"insight": "x", "scores": [1, 1, 2, 1, 1]}')
    with pytest.raises(OutOfRange):
        parse_evaluation_reply('{"insight": "x", "scores": [-2, 1, 0, 1, 1]}')


def test_non_string_insight_is_bad_shape():
    with pytest.raises(BadShape):
        parse_evaluation_reply('{"insight": 42, "scores": [1, 1, 1, 1, 1]}')


@given(st.lists(st.sampled_from([-1, 0, 1]), min_size=5, max_size=5))
def test_all_valid_score_vectors_parse(scores):
    payload = json.dumps({"insight": "property", "scores": scores})
    assert parse_evaluation_reply(payload).scores == tuple(scores)


def test_error_taxonomy_is_distinct():
    for exc in (NoJson, BadShape, OutOfRange, NoCodeBlock):
        assert issubclass(exc, ReplyParseError)
    assert not issubclass(NoJson, BadShape)


# -- baseline replies ----------------------------------------------------


def test_baseline_reply_parses():
    reply = parse_baseline_reply('{"insight": "decent", "score": 2}')
    assert (reply.insight, reply.score) == ("decent", 2)


def test_baseline_reply_bounds():
    assert parse_baseline_reply('{"insight": "", "score": -5}').score == -5
    assert parse_baseline_reply('{"insight": "", "score": 5}').score == 5
    with pytest.raises(OutOfRange):
        parse_baseline_reply('{"insight": "", "score": 6}')
    with pytest.raises(BadShape):
        parse_baseline_reply('{"insight": "", "score": 2.5}')
    with pytest.raises(BadShape):
        parse_baseline_reply('{"insight": "", "score": true}')
    with pytest.raises(BadShape):
        parse_baseline_reply('{"insight": "", "score": "2"}')


# -- improvement replies -------------------------------------------------

GOOD_IMPROVEMENT = (
    "```json\n"
    '{"improvement_points": ["Add docs"], "explanation_report": ["Added a docstring"]}\n'
    "```\n"
    "```improved_code\n"
    "def add(a, b):\n"
    '    """Add two numbers."""\n'
    "    return a + b\n"
    "```\n"
)


def test_improvement_reply_parses():
    reply = parse_improvement_reply(GOOD_IMPROVEMENT)
    assert reply.improvement_points == ("Add docs",)
    assert reply.explanation_report == ("Added a docstring",)
    assert reply.improved_code.startswith("def add")
    assert reply.improved_code.endswith("return a + b")


def test_improvement_falls_back_to_last_untagged_fence():
    text = (
        '{"improvement_points": ["p"], "explanation_report": ["e"]}\n'
        "First a sketch:\n```\n# outline\n```\n"
        "And the final version:\n```python\nx = 1\n```\n"
    )
    assert parse_improvement_reply(text).improved_code == "x = 1"


def test_improvement_json_only_is_no_code_block():
    text = '```json\n{"improvement_points": ["p"], "explanation_report": ["e"]}\n```\n'
    with pytest.raises(NoCodeBlock):
        parse_improvement_reply(text)


def test_improvement_empty_code_fence_is_no_code_block():
    text = (
        '{"improvement_points": ["p"], "explanation_report": ["e"]}\n'
        "```improved_code\n\n```\n"
    )
    with pytest.raises(NoCodeBlock):
        parse_improvement_reply(text)


def test_improvement_missing_lists_is_bad_shape():
    text = '{"improvement_points": "not a list", "explanation_report": []}\n```improved_code\nx\n```'
    with pytest.raises(BadShape):
        parse_improvement_reply(text)
    text = '{"improvement_points": [1], "explanation_report": []}\n```improved_code\nx\n```'
    with pytest.raises(BadShape):
        parse_improvement_reply(text)


def test_improvement_code_with_braces_does_not_shadow_payload():
    code = 'CONFIG = {"improvement_points": 0, "explanation_report": 1}\nrun(CONFIG)'
    text = (
        "```improved_code\n"
        f"{code}\n"
        "```\n"
        "```json\n"
        '{"improvement_points": ["Use a mapping"], "explanation_report": ["Replaced globals"]}\n'
        "```\n"
    )
    reply = parse_improvement_reply(text)
    assert reply.improvement_points == ("Use a mapping",)
    assert reply.improved_code == code


def test_extract_improved_code_prefers_tagged_fence():
    text = "```python\nwrong = True\n```\n```improved_code\nright = True\n```\n"
    assert extract_improved_code(text) == "right = True"


def test_extract_improved_code_requires_some_fence():
    with pytest.raises(NoCodeBlock):
        extract_improved_code("no fences here")


def test_multiline_code_survives_exactly():
    body = "line1\n\nline3\n    indented\n"
    text = f"```improved_code\n{body}```\n"
    assert extract_improved_code(text) == "line1\n\nline3\n    indented"

import os
import stat
import sys
import time
from pathlib import Path

import pytest

from quest.errors import ToolUnavailable, UnsupportedLanguage
from quest.models import JAVASCRIPT, PYTHON, CodeUnit
from quest.validation import ValidationSettings, check_syntax, run_tests, validate_candidate

GOOD_PY = "def add(a, b):\n    return a + b\n"
BAD_PY = "def add(a, b:\n    return a + b\n"
GOOD_JS = "function add(a, b) { return a + b; }\n"
BAD_JS = "function add(a, b { return a + b; }\n"


def test_python_syntax_pass():
    result = check_syntax(GOOD_PY, PYTHON)
    assert result.syntax_ok
    assert result.tests_ok is None
    assert result.duration >= 0


def test_python_syntax_fail():
    result = check_syntax(BAD_PY, PYTHON)
    assert not result.syntax_ok
    assert result.tests_ok is None
    assert result.detail


def test_javascript_syntax_pass_and_fail():
    assert check_syntax(GOOD_JS, JAVASCRIPT).syntax_ok
    assert not check_syntax(BAD_JS, JAVASCRIPT).syntax_ok


def test_unknown_language_rejected():
    with pytest.raises(UnsupportedLanguage):
        check_syntax("puts 1", "ruby")


def test_missing_tool_is_distinct_from_syntax_failure():
    settings = ValidationSettings(python_command="definitely-not-a-real-binary-7f3a")
    with pytest.raises(ToolUnavailable, match="definitely-not-a-real-binary-7f3a"):
        check_syntax(GOOD_PY, PYTHON, settings)


def test_details_do_not_leak_temp_paths():
    detail = check_syntax(BAD_PY, PYTHON).detail
    assert "/tmp" not in detail
    assert "<candidate>" in detail or "SyntaxError" in detail
    # Identical candidates must produce identical details run to run.
    assert detail == check_syntax(BAD_PY, PYTHON).detail


def _hang_script(tmp_path: Path) -> str:
    script = tmp_path / "hang"
    script.write_text("#!/bin/sh\nsleep 30\n", encoding="utf-8")
    script.chmod(script.stat().st_mode | stat.S_IEXEC)
    return str(script)


def test_syntax_timeout_is_bounded(tmp_path):
    settings = ValidationSettings(python_command=_hang_script(tmp_path), syntax_timeout=1.0)
    started = time.monotonic()
    result = check_syntax(GOOD_PY, PYTHON, settings)
    elapsed = time.monotonic() - started
    assert not result.syntax_ok
    assert "timed out" in result.detail
    assert elapsed < 3.0  # timeout + 2s of slack


def test_run_tests_pass_and_fail(tmp_path):
    check = tmp_path / "check_add.py"
    check.write_text(
        "import importlib.util, sys\n"
        "spec = importlib.util.spec_from_file_location('candidate', sys.argv[1])\n"
        "module = importlib.util.module_from_spec(spec)\n"
        "spec.loader.exec_module(module)\n"
        "assert module.add(2, 3) == 5\n",
        encoding="utf-8",
    )
    command = f"{sys.executable} {check} {{code}}"
    passed, detail, _ = run_tests(GOOD_PY, PYTHON, command)
    assert passed and detail == "tests passed"

    mutant = "def add(a, b):\n    return a - b\n"
    passed, detail, _ = run_tests(mutant, PYTHON, command)
    assert not passed
    assert "AssertionError" in detail


def test_run_tests_timeout_is_bounded():
    command = f"{sys.executable} -c 'import time; time.sleep(30)'"
    settings = ValidationSettings(test_timeout=1.0)
    started = time.monotonic()
    passed, detail, _ = run_tests(GOOD_PY, PYTHON, command, settings)
    assert not passed
    assert "timed out" in detail
    assert time.monotonic() - started < 3.0


def test_environment_is_restricted(tmp_path):
    probe = tmp_path / "probe.py"
    probe.write_text(
        "import os, sys\n"
        "sys.exit(1 if 'LEAKY_SECRET' in os.environ else 0)\n",
        encoding="utf-8",
    )
    os.environ["LEAKY_SECRET"] = "hunter2"
    try:
        command = f"{sys.executable} {probe}"
        passed, _, _ = run_tests(GOOD_PY, PYTHON, command)
        assert passed, "secret leaked into the candidate environment"
        allowed, _, _ = run_tests(
            GOOD_PY, PYTHON, command, ValidationSettings(env_passthrough=("LEAKY_SECRET",))
        )
        assert not allowed, "whitelisted variable should have been passed through"
    finally:
        del os.environ["LEAKY_SECRET"]


def test_working_tree_untouched(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    before = sorted(Path.cwd().rglob("*"))
    check_syntax(GOOD_PY, PYTHON)
    check_syntax(BAD_PY, PYTHON)
    run_tests(GOOD_PY, PYTHON, f"{sys.executable} -c 'open(\"dropped.txt\", \"w\")'")
    after = sorted(Path.cwd().rglob("*"))
    assert before == after  # files created by the candidate land in the temp dir


def test_validate_candidate_combines_stages(tmp_path):
    check = tmp_path / "always_pass.py"
    check.write_text("raise SystemExit(0)\n", encoding="utf-8")
    unit = CodeUnit(
        id="u.py",
        language=PYTHON,
        source=GOOD_PY,
        test_command=f"{sys.executable} {check} {{code}}",
    )
    syntax_only = validate_candidate(unit)
    assert syntax_only.syntax_ok and syntax_only.tests_ok is None

    with_tests = validate_candidate(unit, with_tests=True)
    assert with_tests.syntax_ok and with_tests.tests_ok is True
    assert with_tests.passed

    broken = CodeUnit(id="u.py", language=PYTHON, source=BAD_PY, test_command=unit.test_command)
    gated = validate_candidate(broken, with_tests=True)
    assert not gated.syntax_ok
    assert gated.tests_ok is None  # tests never run when syntax fails

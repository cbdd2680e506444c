"""Syntax gating and optional functional testing of candidate code.

Candidates are untrusted text.  Everything here runs in a throwaway
temporary directory with a stripped environment (PATH plus an explicit
whitelist), under a timeout, in its own process group so runaway children
are killed as a unit.  The project working tree is never touched.

Tool output quoted back in ``ValidationResult.detail`` has the temporary
paths replaced by stable tokens, so identical candidates produce identical
details run after run.
"""

from __future__ import annotations

import os
import shlex
import signal
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ToolUnavailable, UnsupportedLanguage
from .models import JAVASCRIPT, PYTHON, CodeUnit, ValidationResult

_DETAIL_LIMIT = 2000

_EXTENSIONS = {PYTHON: ".py", JAVASCRIPT: ".js"}


@dataclass(slots=True)
class ValidationSettings:
    """How candidate checks are executed."""

    python_command: str = "python3"
    node_command: str = "node"
    syntax_timeout: float = 30.0
    test_timeout: float = 60.0
    env_passthrough: tuple[str, ...] = field(default_factory=tuple)

    def environment(self) -> dict[str, str]:
        env = {"PATH": os.environ.get("PATH", "")}
        for name in self.env_passthrough:
            if name in os.environ:
                env[name] = os.environ[name]
        return env


def _run(
    cmd: list[str], cwd: Path, env: dict[str, str], timeout: float
) -> tuple[int | None, str, str, bool]:
    """Run ``cmd``; returns (returncode, stdout, stderr, timed_out)."""
    try:
        proc = subprocess.Popen(
            cmd,
            cwd=str(cwd),
            env=env,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
            start_new_session=True,
        )
    except (FileNotFoundError, PermissionError) as exc:
        raise ToolUnavailable(cmd[0], str(exc)) from exc
    try:
        out, err = proc.communicate(timeout=timeout)
        return proc.returncode, out, err, False
    except subprocess.TimeoutExpired:
        # Kill the whole group: the command may have spawned children that
        # would otherwise keep the pipes (and us) alive.
        try:
            os.killpg(proc.pid, signal.SIGKILL)
        except ProcessLookupError:
            pass
        out, err = proc.communicate()
        return None, out, err, True


def _scrub(text: str, workdir: Path, candidate: Path) -> str:
    text = text.replace(str(candidate), "<candidate>").replace(str(workdir), "<workdir>")
    return text.strip()[:_DETAIL_LIMIT]


def _syntax_command(language: str, command_for: ValidationSettings, path: Path) -> list[str]:
    if language == PYTHON:
        return [command_for.python_command, "-m", "py_compile", str(path)]
    if language == JAVASCRIPT:
        return [command_for.node_command, "--check", str(path)]
    raise UnsupportedLanguage(f"no syntax checker for language {language!r}")


def check_syntax(
    code: str, language: str, settings: ValidationSettings | None = None
) -> ValidationResult:
    """Gate a candidate on parseability alone (``tests_ok`` stays None)."""
    settings = settings or ValidationSettings()
    started = time.monotonic()
    with tempfile.TemporaryDirectory(prefix="quest-syntax-") as tmp:
        workdir = Path(tmp)
        path = workdir / f"candidate{_EXTENSIONS[language] if language in _EXTENSIONS else ''}"
        if language not in _EXTENSIONS:
            raise UnsupportedLanguage(f"no syntax checker for language {language!r}")
        path.write_text(code, encoding="utf-8")
        cmd = _syntax_command(language, settings, path)
        returncode, _, err, timed_out = _run(
            cmd, workdir, settings.environment(), settings.syntax_timeout
        )
        duration = time.monotonic() - started
        if timed_out:
            detail = f"syntax check timed out after {settings.syntax_timeout:g}s"
            return ValidationResult(syntax_ok=False, tests_ok=None, detail=detail, duration=duration)
        if returncode != 0:
            detail = _scrub(err, workdir, path) or f"syntax checker exited with {returncode}"
            return ValidationResult(syntax_ok=False, tests_ok=None, detail=detail, duration=duration)
        return ValidationResult(syntax_ok=True, tests_ok=None, detail="syntax ok", duration=duration)


def run_tests(
    code: str,
    language: str,
    test_command: str,
    settings: ValidationSettings | None = None,
) -> tuple[bool, str, float]:
    """Run the unit's test command against a candidate written to a temp file.

    ``{code}`` inside the command is replaced (per token, after shell-style
    splitting) with the candidate path.  Returns (passed, detail, duration).
    """
    settings = settings or ValidationSettings()
    started = time.monotonic()
    with tempfile.TemporaryDirectory(prefix="quest-tests-") as tmp:
        workdir = Path(tmp)
        path = workdir / f"candidate{_EXTENSIONS.get(language, '')}"
        path.write_text(code, encoding="utf-8")
        tokens = [t.replace("{code}", str(path)) for t in shlex.split(test_command)]
        if not tokens:
            raise ValueError("test command is empty")
        returncode, out, err, timed_out = _run(
            tokens, workdir, settings.environment(), settings.test_timeout
        )
        duration = time.monotonic() - started
        if timed_out:
            return False, f"tests timed out after {settings.test_timeout:g}s", duration
        if returncode != 0:
            combined = _scrub(f"{out}\n{err}".strip(), workdir, path)
            return False, combined or f"tests exited with {returncode}", duration
        return True, "tests passed", duration


def validate_candidate(
    unit: CodeUnit,
    settings: ValidationSettings | None = None,
    with_tests: bool = False,
) -> ValidationResult:
    """Syntax gate first; optionally the unit's test command afterwards."""
    settings = settings or ValidationSettings()
    result = check_syntax(unit.source, unit.language, settings)
    if not result.syntax_ok or not with_tests or not unit.test_command:
        return result
    passed, detail, test_duration = run_tests(unit.source, unit.language, unit.test_command, settings)
    return ValidationResult(
        syntax_ok=True,
        tests_ok=passed,
        detail=f"{result.detail}; {detail}",
        duration=result.duration + test_duration,
    )

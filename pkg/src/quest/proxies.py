"""Rule-based quality scores from classic Python analysis tools.

Three tools approximate different slices of quality, each mapped onto a
0..10 scale:

* pylint's own rating (style, naming, documentation), clamped to [0, 10] —
  pylint happily reports negative scores for rough code;
* radon's maintainability index (0..100), divided by 10;
* bandit findings folded through a simple penalty: 10 - (low + 3*medium +
  5*high), clamped to [0, 10].

The overall proxy score is the plain mean of the three.  Python only: these
tools have no counterpart wired up for other languages.

Parsing is separated from tool invocation so the parsers can be exercised
against captured output even where the tools are not installed; a missing
binary raises ToolUnavailable rather than crashing.
"""

from __future__ import annotations

import re
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import QuestError, ToolUnavailable, UnsupportedLanguage
from .models import PYTHON

# Cyclomatic complexity stays with radon; loading pylint's mccabe plugin
# would double-count it.
_EXCLUDED_PYLINT_EXTENSION = "pylint.extensions.mccabe"


class ProxyError(QuestError):
    """A proxy tool ran but its output could not be scored."""


@dataclass(slots=True)
class ProxySettings:
    pylint_command: str = "pylint"
    radon_command: str = "radon"
    bandit_command: str = "bandit"
    timeout: float = 60.0


@dataclass(slots=True)
class ProxyReport:
    """Per-tool scores on 0..10 plus their mean."""

    pylint: float
    radon_mi: float
    bandit: float
    overall: float
    tool_versions: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "pylint": self.pylint,
            "radon_mi": self.radon_mi,
            "bandit": self.bandit,
            "overall": self.overall,
            "tool_versions": dict(self.tool_versions),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ProxyReport":
        return cls(
            pylint=data["pylint"],
            radon_mi=data["radon_mi"],
            bandit=data["bandit"],
            overall=data["overall"],
            tool_versions=dict(data.get("tool_versions", {})),
        )


def _clamp(value: float, low: float = 0.0, high: float = 10.0) -> float:
    return max(low, min(high, value))


# -- output parsers (pure text -> score) --------------------------------

_PYLINT_RATING = re.compile(r"rated at (-?\d+(?:\.\d+)?)/10")


def parse_pylint_output(text: str) -> float:
    """Extract pylint's 'rated at X/10' figure, clamped to [0, 10]."""
    match = _PYLINT_RATING.search(text)
    if not match:
        raise ProxyError(f"pylint output has no rating line: {text[:300]!r}")
    return _clamp(float(match.group(1)))


_RADON_MI = re.compile(r"\((-?\d+(?:\.\d+)?)\)")


def parse_radon_output(text: str) -> float:
    """Extract radon's maintainability index and rescale 0..100 -> 0..10."""
    match = _RADON_MI.search(text)
    if not match:
        raise ProxyError(f"radon output has no MI value: {text[:300]!r}")
    return _clamp(float(match.group(1)) / 10.0)


_BANDIT_SEVERITY_BLOCK = re.compile(
    r"Total issues \(by severity\):\s*\n"
    r"\s*Undefined:\s*(\d+)\s*\n"
    r"\s*Low:\s*(\d+)\s*\n"
    r"\s*Medium:\s*(\d+)\s*\n"
    r"\s*High:\s*(\d+)"
)


def parse_bandit_output(text: str) -> float:
    """Score bandit findings: 10 - (low + 3*medium + 5*high), clamped to [0, 10]."""
    match = _BANDIT_SEVERITY_BLOCK.search(text)
    if not match:
        raise ProxyError(f"bandit output has no severity block: {text[:300]!r}")
    _, low, medium, high = (int(g) for g in match.groups())
    return _clamp(10.0 - (low + 3 * medium + 5 * high))


# -- tool invocation ----------------------------------------------------


def _run_tool(cmd: list[str], cwd: Path | None, timeout: float) -> tuple[int, str]:
    try:
        proc = subprocess.run(
            cmd,
            cwd=str(cwd) if cwd else None,
            capture_output=True,
            text=True,
            timeout=timeout,
        )
    except (FileNotFoundError, PermissionError) as exc:
        raise ToolUnavailable(cmd[0], str(exc)) from exc
    except subprocess.TimeoutExpired as exc:
        raise ProxyError(f"{cmd[0]} timed out after {timeout:g}s") from exc
    return proc.returncode, proc.stdout + proc.stderr


def tool_version(command: str, timeout: float = 10.0) -> str:
    """First line of ``command --version``, or 'unknown'."""
    try:
        _, output = _run_tool([command, "--version"], None, timeout)
    except ToolUnavailable:
        raise
    except ProxyError:
        return "unknown"
    first = output.strip().splitlines()
    return first[0].strip() if first else "unknown"


def _pylint_plugins(command: str, timeout: float) -> list[str]:
    """Default pylint extensions, minus the cyclomatic-complexity one.

    Discovered from the tool itself so the list tracks whatever version is
    installed; older pylints without ``--list-extensions`` fall back to no
    extra plugins.
    """
    try:
        code, output = _run_tool([command, "--list-extensions"], None, timeout)
    except ToolUnavailable:
        raise
    if code != 0:
        return []
    plugins = [
        line.strip()
        for line in output.splitlines()
        if line.strip().startswith("pylint.extensions.")
    ]
    return [p for p in plugins if p != _EXCLUDED_PYLINT_EXTENSION]


def pylint_score(code: str, settings: ProxySettings | None = None) -> float:
    settings = settings or ProxySettings()
    with tempfile.TemporaryDirectory(prefix="quest-proxy-") as tmp:
        path = Path(tmp) / "candidate.py"
        path.write_text(code, encoding="utf-8")
        cmd = [settings.pylint_command]
        plugins = _pylint_plugins(settings.pylint_command, settings.timeout)
        if plugins:
            cmd.append("--load-plugins=" + ",".join(plugins))
        cmd.append(str(path))
        # Non-zero exit just means findings; the rating line is still there.
        _, output = _run_tool(cmd, Path(tmp), settings.timeout)
        return parse_pylint_output(output)


def radon_mi_score(code: str, settings: ProxySettings | None = None) -> float:
    settings = settings or ProxySettings()
    with tempfile.TemporaryDirectory(prefix="quest-proxy-") as tmp:
        path = Path(tmp) / "candidate.py"
        path.write_text(code, encoding="utf-8")
        _, output = _run_tool(
            [settings.radon_command, "mi", "-s", str(path)], Path(tmp), settings.timeout
        )
        return parse_radon_output(output)


def bandit_score(code: str, settings: ProxySettings | None = None) -> float:
    settings = settings or ProxySettings()
    with tempfile.TemporaryDirectory(prefix="quest-proxy-") as tmp:
        path = Path(tmp) / "candidate.py"
        path.write_text(code, encoding="utf-8")
        _, output = _run_tool(
            [settings.bandit_command, str(path)], Path(tmp), settings.timeout
        )
        return parse_bandit_output(output)


def proxy_report(code: str, language: str = PYTHON, settings: ProxySettings | None = None) -> ProxyReport:
    """Run all three tools and average their scores."""
    if language != PYTHON:
        raise UnsupportedLanguage(f"proxy scoring supports python only, not {language!r}")
    settings = settings or ProxySettings()
    scores = {
        "pylint": pylint_score(code, settings),
        "radon_mi": radon_mi_score(code, settings),
        "bandit": bandit_score(code, settings),
    }
    versions = {
        "pylint": tool_version(settings.pylint_command),
        "radon": tool_version(settings.radon_command),
        "bandit": tool_version(settings.bandit_command),
    }
    overall = sum(scores.values()) / 3.0
    return ProxyReport(
        pylint=scores["pylint"],
        radon_mi=scores["radon_mi"],
        bandit=scores["bandit"],
        overall=overall,
        tool_versions=versions,
    )

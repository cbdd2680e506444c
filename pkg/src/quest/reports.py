"""Report documents: stable JSON rendering and atomic file writes.

Reports are the durable interface of the package, so their bytes are kept
boring and reproducible: keys sorted, two-space indent, UTF-8, trailing
newline, written via a temp file + rename so readers never observe a
half-written document.  Scores live in reports at full precision; the
1-decimal form (``-1.3``) is for human-facing lines only.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any

from .models import CodeAssessment, CodeUnit, OptimizationRun
from .parsing import BaselineReply
from .proxies import ProxyReport


def render_score(score: float) -> str:
    """Display form of a score: one decimal place."""
    return f"{score:.1f}"


def dumps_stable(document: Any) -> str:
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_text_atomic(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(text.encode("utf-8"))
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except FileNotFoundError:
            pass
        raise
    return path


def write_json_atomic(path: str | Path, document: Any) -> Path:
    return write_text_atomic(path, dumps_stable(document))


def load_json(path: str | Path) -> Any:
    with Path(path).open("r", encoding="utf-8") as fh:
        return json.load(fh)


# -- document shapes ----------------------------------------------------


def _identity(unit: CodeUnit) -> dict[str, Any]:
    return {"code_id": unit.id, "language": unit.language, "provenance": unit.provenance}


def assessment_document(unit: CodeUnit, assessment: CodeAssessment) -> dict[str, Any]:
    return {**_identity(unit), "assessment": assessment.to_dict()}


def baseline_document(unit: CodeUnit, reply: BaselineReply) -> dict[str, Any]:
    return {**_identity(unit), "baseline": {"insight": reply.insight, "score": reply.score}}


def proxy_document(unit: CodeUnit, report: ProxyReport) -> dict[str, Any]:
    return {**_identity(unit), "proxy": report.to_dict()}


def run_document(run: OptimizationRun) -> dict[str, Any]:
    return run.to_dict()


def run_from_document(document: dict[str, Any]) -> OptimizationRun:
    return OptimizationRun.from_dict(document)


def assessment_from_document(document: dict[str, Any]) -> CodeAssessment:
    return CodeAssessment.from_dict(document["assessment"])

"""Example corpora: manifest loading and batch processing.

A manifest is a JSON document listing code files relative to its own
directory::

    {"entries": [
        {"id": "mbpp/601", "path": "code/601.py", "language": "python",
         "test_command": "python3 {dir}/tests/check_601.py {code}",
         "source": "mbpp"}
    ]}

``{dir}`` in a test command expands to the manifest's directory (absolute),
``{code}`` is left for validation time.  Batch processing walks the entries
in manifest order, keeps going when one entry fails, and writes one report
per entry plus an ``index.json``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .catalog import StatementCatalog
from .errors import QuestError
from .evaluator import Evaluator
from .models import SUPPORTED_LANGUAGES, CodeUnit, OptimizerConfig
from .optimizer import OptimizationAborted, Optimizer
from .proxies import ProxySettings, proxy_report
from .reports import (
    assessment_document,
    proxy_document,
    run_document,
    write_json_atomic,
    write_text_atomic,
)

BATCH_MODES = ("evaluate", "optimize", "proxy")

_EXTENSIONS = {"python": ".py", "javascript": ".js"}


class ManifestError(QuestError):
    """A corpus manifest is malformed or references missing files."""


@dataclass(frozen=True, slots=True)
class ManifestEntry:
    id: str
    path: str
    language: str
    test_command: str | None = None
    source: str | None = None

    def load(self, root: Path) -> CodeUnit:
        file_path = root / self.path
        command = self.test_command
        if command:
            command = command.replace("{dir}", str(root))
        return CodeUnit(
            id=self.id,
            language=self.language,
            source=file_path.read_text(encoding="utf-8"),
            test_command=command,
            provenance=self.source,
        )


@dataclass(frozen=True, slots=True)
class CorpusManifest:
    root: Path
    entries: tuple[ManifestEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def load_manifest(path: str | Path) -> CorpusManifest:
    """Load and validate a manifest; all referenced files must exist."""
    import json

    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict) or not isinstance(data.get("entries"), list):
        raise ManifestError(f"manifest {path}: expected an object with an 'entries' list")

    root = path.parent.resolve()
    entries = []
    seen_ids: set[str] = set()
    for position, raw in enumerate(data["entries"]):
        if not isinstance(raw, dict):
            raise ManifestError(f"manifest {path}: entry {position} is not an object")
        try:
            entry = ManifestEntry(
                id=raw["id"],
                path=raw["path"],
                language=raw["language"],
                test_command=raw.get("test_command"),
                source=raw.get("source"),
            )
        except KeyError as exc:
            raise ManifestError(f"manifest {path}: entry {position} lacks key {exc}") from exc
        if entry.id in seen_ids:
            raise ManifestError(f"manifest {path}: duplicate entry id {entry.id!r}")
        seen_ids.add(entry.id)
        if entry.language not in SUPPORTED_LANGUAGES:
            raise ManifestError(
                f"manifest {path}: entry {entry.id!r} has unsupported language {entry.language!r}"
            )
        if not (root / entry.path).is_file():
            raise ManifestError(f"manifest {path}: entry {entry.id!r} file not found: {entry.path}")
        entries.append(entry)
    return CorpusManifest(root=root, entries=tuple(entries))


def slugify(entry_id: str) -> str:
    """Filesystem-safe version of an entry id."""
    return re.sub(r"[^A-Za-z0-9._-]+", "_", entry_id)


@dataclass(slots=True)
class BatchSummary:
    mode: str
    succeeded: list[str] = field(default_factory=list)
    failed: dict[str, str] = field(default_factory=dict)
    reports: dict[str, str] = field(default_factory=dict)

    @property
    def all_ok(self) -> bool:
        return not self.failed

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode,
            "succeeded": list(self.succeeded),
            "failed": dict(self.failed),
            "reports": dict(self.reports),
        }


def run_batch(
    manifest: CorpusManifest,
    mode: str,
    out_dir: str | Path,
    evaluator: Evaluator | None = None,
    optimizer: Optimizer | None = None,
    optimizer_config: OptimizerConfig | None = None,
    proxy_settings: ProxySettings | None = None,
    catalog: StatementCatalog | None = None,
) -> BatchSummary:
    """Process every manifest entry; one entry's failure never stops the rest.

    Per-entry reports land in ``out_dir`` (``<slug>.assessment.json``,
    ``<slug>.run.json`` plus ``<slug>.improved.<ext>``, or
    ``<slug>.proxy.json`` depending on mode), followed by an ``index.json``.
    """
    if mode not in BATCH_MODES:
        raise ValueError(f"unknown batch mode {mode!r}; expected one of {BATCH_MODES}")
    if mode == "evaluate" and evaluator is None:
        raise ValueError("evaluate mode needs an evaluator")
    if mode == "optimize" and optimizer is None:
        raise ValueError("optimize mode needs an optimizer")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = BatchSummary(mode=mode)

    for entry in manifest:
        slug = slugify(entry.id)
        try:
            unit = entry.load(manifest.root)
            if mode == "evaluate":
                assessment = evaluator.evaluate(unit, catalog)
                report_path = out / f"{slug}.assessment.json"
                write_json_atomic(report_path, assessment_document(unit, assessment))
            elif mode == "optimize":
                run = optimizer.optimize(unit, optimizer_config, catalog)
                report_path = out / f"{slug}.run.json"
                write_json_atomic(report_path, run_document(run))
                improved = out / f"{slug}.improved{_EXTENSIONS[unit.language]}"
                write_text_atomic(improved, run.final_code.source)
            else:
                report = proxy_report(unit.source, unit.language, proxy_settings)
                report_path = out / f"{slug}.proxy.json"
                write_json_atomic(report_path, proxy_document(unit, report))
        except OptimizationAborted as exc:
            # Keep what the aborted run achieved before the failure.
            report_path = out / f"{slug}.run.json"
            write_json_atomic(report_path, run_document(exc.partial_run))
            summary.failed[entry.id] = str(exc)
            summary.reports[entry.id] = report_path.name
            continue
        except (QuestError, OSError) as exc:
            summary.failed[entry.id] = str(exc)
            continue
        summary.succeeded.append(entry.id)
        summary.reports[entry.id] = report_path.name

    write_json_atomic(out / "index.json", summary.to_dict())
    return summary

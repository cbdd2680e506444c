"""Quality-dimension catalog: ten dimensions, five assessment statements each.

The built-in catalog ships as package data; custom catalogs (reworded
statements, e.g. for ablations) can be loaded from a JSON file of the same
shape: an object mapping dimension name to a list of five statement strings.
Dimension names are fixed — a catalog may rephrase statements but cannot
invent new dimensions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import QuestError

#: Canonical dimension names, in presentation order.
DIMENSION_NAMES = (
    "Readability",
    "Maintainability",
    "Testability",
    "Efficiency",
    "Robustness",
    "Security",
    "Documentation",
    "Modularity",
    "Scalability",
    "Portability",
)


class CatalogError(QuestError):
    """A statement catalog failed validation."""


@dataclass(frozen=True, slots=True)
class QualityDimension:
    """One dimension and the five statements an evaluator must judge."""

    name: str
    statements: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.name not in DIMENSION_NAMES:
            raise CatalogError(f"unknown dimension {self.name!r}; expected one of {DIMENSION_NAMES}")
        if len(self.statements) != 5:
            raise CatalogError(
                f"dimension {self.name!r} has {len(self.statements)} statements, expected exactly 5"
            )
        if any(not s.strip() for s in self.statements):
            raise CatalogError(f"dimension {self.name!r} contains a blank statement")


@dataclass(frozen=True, slots=True)
class StatementCatalog:
    """Ordered collection of the ten quality dimensions."""

    dimensions: tuple[QualityDimension, ...]

    def __post_init__(self) -> None:
        names = [d.name for d in self.dimensions]
        if names != list(DIMENSION_NAMES):
            raise CatalogError(
                f"catalog must define all ten dimensions in canonical order; got {names}"
            )

    def __iter__(self):
        return iter(self.dimensions)

    def __len__(self) -> int:
        return len(self.dimensions)

    def get(self, name: str) -> QualityDimension:
        for dim in self.dimensions:
            if dim.name == name:
                return dim
        raise KeyError(name)


def _reject_duplicate_keys(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise CatalogError(f"duplicate dimension {key!r} in catalog")
        seen[key] = value
    return seen


def catalog_from_mapping(data: dict[str, list[str]]) -> StatementCatalog:
    """Build a catalog from a name -> statements mapping, in canonical order."""
    missing = [n for n in DIMENSION_NAMES if n not in data]
    if missing:
        raise CatalogError(f"catalog is missing dimensions: {missing}")
    extra = [n for n in data if n not in DIMENSION_NAMES]
    if extra:
        raise CatalogError(f"catalog defines unknown dimensions: {extra}")
    return StatementCatalog(
        dimensions=tuple(
            QualityDimension(name=name, statements=tuple(data[name])) for name in DIMENSION_NAMES
        )
    )


def load_statement_catalog(path: str | Path) -> StatementCatalog:
    """Load and validate a catalog from a JSON file."""
    raw = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(raw, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"catalog {path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise CatalogError(f"catalog {path}: top level must be an object")
    return catalog_from_mapping(data)


def default_catalog() -> StatementCatalog:
    """The built-in catalog shipped with the package."""
    raw = resources.files("quest.data").joinpath("statements.json").read_text(encoding="utf-8")
    return catalog_from_mapping(json.loads(raw, object_pairs_hook=_reject_duplicate_keys))

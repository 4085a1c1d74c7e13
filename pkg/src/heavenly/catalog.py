"""Shipped solution catalog and its JSON loader."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .jetcore import ScalarField
from .tetrads import (
    FirstPotential,
    MetricField,
    SecondPotential,
    Tetrad,
    metric_from_tetrad,
    plane_wave_tetrad,
    tetrad_from_omega,
    tetrad_from_theta,
)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    chart: str
    kind: str  # potential-second | potential-first | metric
    expression: str
    params: dict[str, Fraction] = field(default_factory=dict)
    exclusions: tuple[str, ...] = ()
    solution: bool = True

    def second_potential(self) -> SecondPotential:
        if self.kind != "potential-second":
            raise ValueError(f"{self.name} is not a second-form potential")
        return SecondPotential(ScalarField.parse(self.expression, "second"))

    def first_potential(self) -> FirstPotential:
        if self.kind != "potential-first":
            raise ValueError(f"{self.name} is not a first-form potential")
        return FirstPotential(ScalarField.parse(self.expression, "first"))

    def tetrad(self, profile: str | None = None) -> Tetrad:
        if self.kind == "potential-second":
            return tetrad_from_theta(self.second_potential())
        if self.kind == "potential-first":
            return tetrad_from_omega(self.first_potential())
        return plane_wave_tetrad(ScalarField.parse(profile or self.expression, "plane-wave"))

    def metric(self, profile: str | None = None) -> MetricField:
        return metric_from_tetrad(self.tetrad(profile))


def _parse_entry(raw: dict) -> CatalogEntry:
    expression = raw.get("potential") or raw.get("profile") or raw.get("metric")
    params = {k: Fraction(v) for k, v in raw.get("params", {}).items()}
    return CatalogEntry(
        name=raw["name"],
        chart=raw["chart"],
        kind=raw["kind"],
        expression=expression,
        params=params,
        exclusions=tuple(raw.get("exclusions", ())),
        solution=raw.get("solution", True),
    )


def load_catalog(path: str | Path | None = None) -> dict[str, CatalogEntry]:
    """Load the shipped catalog, or a user file with the same schema."""
    if path is None:
        text = resources.files("heavenly.data").joinpath("catalog.json").read_text()
    else:
        text = Path(path).read_text()
    raw = json.loads(text)
    if raw.get("schema") != 1:
        raise ValueError("unsupported catalog schema")
    entries = [_parse_entry(r) for r in raw["entries"]]
    return {e.name: e for e in entries}

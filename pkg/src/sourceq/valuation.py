"""Valuation: signed title weights, portfolios, costs, and degree metrics.

Weights are read off a per-scale table indexed by rank (not stored level), so
the same record values differently for the two principal parties. The default
table is the signed, zero-sum ramp w(r) = n+1-2r.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .catalog import get_source_type
from .errors import (MissingBenchmark, NoServices, NoSourcesOfType,
                     PerspectiveNotParty, UntitledSource)
from .model import (CostCategory, Polarity, SourcingEquilibrium,
                    polarity, rank_from)
from .scales import TitleScale, registered_scales

#: Cost categories whose money follows the current title level.
TITLE_LINKED = (CostCategory.CAPITAL_OWNED, CostCategory.LEASE_RENT_LICENSE,
                CostCategory.PERSONNEL)


@dataclass(frozen=True)
class WeightTable:
    """Per scale id, a map from rank to signed weight."""

    scales: dict

    def __post_init__(self):
        for scale_id, ranks in self.scales.items():
            ordered = [ranks[r] for r in sorted(ranks)]
            if any(a <= b for a, b in zip(ordered, ordered[1:])):
                raise ValueError(
                    f"weights for scale {scale_id!r} must strictly decrease")

    def weight(self, scale: TitleScale, rank: int) -> float:
        try:
            ranks = self.scales[scale.id]
        except KeyError:
            raise KeyError(f"weight table has no entry for scale {scale.id!r}")
        if rank not in ranks:
            raise KeyError(f"weight table for {scale.id!r} lacks rank {rank}")
        return ranks[rank]

    def scaled(self, factor: float) -> "WeightTable":
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return WeightTable({sid: {r: w * factor for r, w in ranks.items()}
                            for sid, ranks in self.scales.items()})

    def to_dict(self) -> dict:
        return {sid: {str(r): w for r, w in sorted(ranks.items())}
                for sid, ranks in sorted(self.scales.items())}

    @classmethod
    def from_dict(cls, data: dict) -> "WeightTable":
        return cls({sid: {int(r): float(w) for r, w in ranks.items()}
                    for sid, ranks in data.items()})


def default_weights(scale: TitleScale) -> dict:
    n = scale.size
    return {r: float(n + 1 - 2 * r) for r in range(1, n + 1)}


def default_weight_table() -> WeightTable:
    """The zero-sum ramp over every registered scale."""
    return WeightTable({sid: default_weights(scale)
                        for sid, scale in registered_scales().items()})


def signed_weight(perspective: str, source_id: str, eq: SourcingEquilibrium,
                  table: WeightTable) -> float:
    title = eq.title(source_id)
    if title is None:
        raise UntitledSource(f"source {source_id!r} carries no title")
    scale = eq.scale_of(source_id)
    return table.weight(scale, rank_from(perspective, title, scale))


def portfolio_weight(perspective: str, scope, eq: SourcingEquilibrium,
                     table: WeightTable, include: str = "all") -> float:
    """Sum of signed weights over a scope of source ids.

    Sources with no title, or where the perspective fills neither principal
    slot, contribute zero. `include` selects "all", "nonfinancial", or
    "financial" sources.
    """
    if include not in ("all", "nonfinancial", "financial"):
        raise ValueError(f"unknown include mode {include!r}")
    total = 0.0
    for source_id in scope:
        if source_id not in eq.sources:
            continue
        financial = eq.sources[source_id].type.financial
        if include == "nonfinancial" and financial:
            continue
        if include == "financial" and not financial:
            continue
        try:
            total += signed_weight(perspective, source_id, eq, table)
        except (UntitledSource, PerspectiveNotParty):
            continue
    return total


@dataclass(frozen=True)
class CostBreakdown:
    by_category: dict = field(default_factory=dict)

    @property
    def total(self) -> float:
        return sum(self.by_category.values())

    def get(self, category: CostCategory) -> float:
        return self.by_category.get(category, 0.0)


def _title_route(eq: SourcingEquilibrium, source_id) -> CostCategory:
    """Which category the title-linked money lands in, per the current level."""
    title = eq.titles[source_id]
    scale = eq.scale_of(source_id)
    if scale.personnel:
        return CostCategory.PERSONNEL
    user_unit = eq.subunits[title.using_subunit].unit
    try:
        user_rank = rank_from(user_unit, title, scale)
    except PerspectiveNotParty:
        # The using subunit belongs to neither principal; treat as granted.
        return CostCategory.LEASE_RENT_LICENSE
    if user_rank == 1:
        return CostCategory.CAPITAL_OWNED
    return CostCategory.LEASE_RENT_LICENSE


def cost_estimate(subunit_id: str, eq: SourcingEquilibrium) -> CostBreakdown:
    """Per-category cost of the sources a subunit currently works with.

    The title-linked categories (capital, lease, personnel) pool and land in
    the one the current title level indicates: ownership money on an owned
    title, the same figure as lease money after a sale-and-lease-back. The
    remaining categories pass through verbatim.
    """
    eq.subunit(subunit_id)
    buckets = {cat: 0.0 for cat in CostCategory}
    for source_id, title in eq.titles.items():
        if title.using_subunit != subunit_id:
            continue
        profile = eq.sources[source_id].cost_profile
        linked = sum(profile.get(cat, 0.0) for cat in TITLE_LINKED)
        if linked:
            buckets[_title_route(eq, source_id)] += linked
        for cat, amount in profile.items():
            if cat not in TITLE_LINKED:
                buckets[cat] += amount
    return CostBreakdown({cat: amt for cat, amt in buckets.items() if amt})


@dataclass(frozen=True)
class Benchmark:
    """Expected external proportion per (source type, market segment)."""

    entries: dict

    def external_proportion(self, type_id: str, segment: str = "default") -> float:
        get_source_type(type_id)
        try:
            return self.entries[(type_id, segment)]
        except KeyError:
            raise MissingBenchmark(
                f"no benchmark for type {type_id!r}, segment {segment!r}") from None

    @classmethod
    def from_dict(cls, data: dict) -> "Benchmark":
        entries = {}
        for row in data.get("entries", []):
            proportion = float(row["external"])
            if not 0.0 <= proportion <= 1.0:
                raise ValueError("benchmark proportions live in [0, 1]")
            entries[(row["type"], row.get("segment", "default"))] = proportion
        return cls(entries)


def _consuming_units(eq: SourcingEquilibrium, providing_subunit: str) -> set:
    units = set()
    for edge in eq.service_edges.values():
        if edge.provider != providing_subunit:
            continue
        unit = eq.unit_of_consumer(edge.consumer)
        if unit is not None:
            units.add(unit)
    return units


def is_internal(source_id: str, perspective: str, eq: SourcingEquilibrium,
                table: WeightTable | None = None) -> bool:
    """Whether the perspective unit holds the source internally.

    Requires positive polarity and a signed weight at least as high as every
    other title party that consumes a service produced from the source (ties
    resolve internal). The comparison set is derived from service edges
    provided by the source's using subunit.
    """
    table = table or default_weight_table()
    title = eq.title(source_id)
    if title is None:
        raise UntitledSource(f"source {source_id!r} carries no title")
    scale = eq.scale_of(source_id)
    if polarity(perspective, title, scale) is not Polarity.POSITIVE:
        return False
    own = table.weight(scale, rank_from(perspective, title, scale))
    for unit in _consuming_units(eq, title.using_subunit):
        if unit == perspective or not title.party(unit):
            continue
        if own < table.weight(scale, rank_from(unit, title, scale)):
            return False
    return True


def _party_sources_of_type(unit_id: str, type_id: str, eq: SourcingEquilibrium):
    stype = get_source_type(type_id)
    for source_id, title in eq.titles.items():
        if eq.sources[source_id].type.id == stype.id and title.party(unit_id):
            yield source_id


def degree_internal_abs(unit_id: str, type_id: str, eq: SourcingEquilibrium,
                        table: WeightTable | None = None) -> float:
    """Internal share of a unit's titled weight in one source type.

    Raises NoSourcesOfType when the unit holds no title position on sources
    of the type; an absent population is an error, never a 0 or a 1.
    """
    table = table or default_weight_table()
    numerator = 0.0
    denominator = 0.0
    for source_id in _party_sources_of_type(unit_id, type_id, eq):
        w = abs(signed_weight(unit_id, source_id, eq, table))
        denominator += w
        if is_internal(source_id, unit_id, eq, table):
            numerator += w
    if denominator == 0.0:
        raise NoSourcesOfType(
            f"unit {unit_id!r} holds no titled sources of type {type_id!r}")
    return numerator / denominator


def degree_internal_rel(unit_id: str, type_id: str, eq: SourcingEquilibrium,
                        table: WeightTable | None = None,
                        benchmark: Benchmark | None = None,
                        segment: str = "default") -> float:
    """Absolute internal degree relative to the benchmark's internal share."""
    if benchmark is None:
        raise MissingBenchmark("relative degree needs a benchmark")
    absolute = degree_internal_abs(unit_id, type_id, eq, table)
    external = benchmark.external_proportion(type_id, segment)
    internal_share = 1.0 - external
    if internal_share == 0.0:
        return 0.0 if absolute == 0.0 else float("inf")
    return absolute / internal_share


@dataclass(frozen=True)
class ServiceDegrees:
    internal_volume: float
    external_volume: float

    @property
    def degree_internal(self) -> float:
        return self.internal_volume / (self.internal_volume + self.external_volume)


def service_provision_degrees(unit_id: str, eq: SourcingEquilibrium) -> ServiceDegrees:
    """Internal vs external service volume around one unit.

    Internal volume is provided by the unit's subunits and consumed inside the
    unit. External volume is provided by its subunits to outsiders, plus
    volume its members consume from outside providers. Raises NoServices when
    both are zero.
    """
    eq.unit(unit_id)
    own_subunits = {s.id for s in eq.subunits_of(unit_id)}
    internal = 0.0
    external = 0.0
    for edge in eq.service_edges.values():
        provided_here = edge.provider in own_subunits
        consumer_unit = eq.unit_of_consumer(edge.consumer)
        consumed_here = consumer_unit == unit_id
        if provided_here and consumed_here:
            internal += edge.volume
        elif provided_here or consumed_here:
            external += edge.volume
    if internal == 0.0 and external == 0.0:
        raise NoServices(f"unit {unit_id!r} provides and consumes no services")
    return ServiceDegrees(internal, external)


def sustainable_advantage(source_id: str, eq: SourcingEquilibrium) -> bool:
    """All four advantage flags at once; any missing one disqualifies."""
    return eq.source(source_id).advantage.all_set()

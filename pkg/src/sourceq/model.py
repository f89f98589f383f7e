"""Core entities and the sourcing equilibrium snapshot.

An equilibrium is an immutable picture of who holds what at one logical
instant: units and their subunits, sources with ranked title records, service
edges, money edges, and contracts. All operations in this package are pure;
they return new snapshots and never mutate their inputs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from .catalog import SourceType, get_source_type
from .errors import PerspectiveNotParty, UnknownEntity
from .scales import INSOURCER, THIRD_PARTY, TitleScale

#: Consumer marker for service edges that leave the modeled world entirely.
EXTERNAL = "external"


class CostCategory(enum.Enum):
    CAPITAL_OWNED = "capital"
    OPERATIONAL = "operational"
    LEASE_RENT_LICENSE = "lease"
    PERSONNEL = "personnel"
    INSURANCE = "insurance"
    MANAGEMENT_OVERHEAD = "overhead"
    PRIOR_OBLIGATIONS = "prior"


class ContractKind(enum.Enum):
    TARGET_SERVICE_PROVISION = "target-service-provision"
    REVERSIBILITY_CLAUSE = "reversibility-clause"
    OTHER = "other"


class Polarity(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class AdvantageFlags:
    """Competitive-advantage test flags; all four must hold to qualify."""

    valuable: bool = False
    rare: bool = False
    inimitable: bool = False
    non_substitutable: bool = False

    def all_set(self) -> bool:
        return (self.valuable and self.rare and self.inimitable
                and self.non_substitutable)


@dataclass(frozen=True)
class Source:
    id: str
    type: SourceType
    cost_profile: dict = field(default_factory=dict)
    advantage: AdvantageFlags = AdvantageFlags()
    identity_critical_for: str | None = None


@dataclass(frozen=True)
class TitleRecord:
    """Where one source sits on its type's scale, and who fills which slot."""

    source_id: str
    level: int
    outsourcer_side: str
    using_subunit: str
    insourcer_side: str | None = None
    third_party: str | None = None

    def party(self, unit_id: str) -> bool:
        return unit_id == self.outsourcer_side or unit_id == self.insourcer_side


@dataclass(frozen=True)
class Unit:
    id: str
    name: str = ""
    mission: str = ""
    subunit_ids: frozenset = field(default_factory=frozenset)


@dataclass(frozen=True)
class Subunit:
    id: str
    unit: str


@dataclass(frozen=True)
class ServiceEdge:
    service_id: str
    provider: str
    consumer: str
    volume: float = 0.0


@dataclass(frozen=True)
class MoneyEdge:
    payer: str
    payee: str
    amount: float


@dataclass(frozen=True)
class Contract:
    id: str
    kind: ContractKind
    parties: tuple
    covered_services: frozenset = field(default_factory=frozenset)
    expiry: int | None = None


@dataclass(frozen=True)
class SourcingEquilibrium:
    units: dict = field(default_factory=dict)
    subunits: dict = field(default_factory=dict)
    sources: dict = field(default_factory=dict)
    titles: dict = field(default_factory=dict)
    service_edges: dict = field(default_factory=dict)
    money_edges: dict = field(default_factory=dict)
    contracts: dict = field(default_factory=dict)
    logical_time: int = 0

    # -- lookups ---------------------------------------------------------

    def unit(self, unit_id: str) -> Unit:
        try:
            return self.units[unit_id]
        except KeyError:
            raise UnknownEntity(f"unknown unit {unit_id!r}") from None

    def subunit(self, subunit_id: str) -> Subunit:
        try:
            return self.subunits[subunit_id]
        except KeyError:
            raise UnknownEntity(f"unknown subunit {subunit_id!r}") from None

    def source(self, source_id: str) -> Source:
        try:
            return self.sources[source_id]
        except KeyError:
            raise UnknownEntity(f"unknown source {source_id!r}") from None

    def title(self, source_id: str) -> TitleRecord | None:
        return self.titles.get(source_id)

    def scale_of(self, source_id: str) -> TitleScale:
        return self.source(source_id).type.scale

    def subunits_of(self, unit_id: str) -> list[Subunit]:
        return [s for s in self.subunits.values() if s.unit == unit_id]

    def unit_of_consumer(self, consumer: str) -> str | None:
        """Owning unit of a service consumer; None for the external marker."""
        if consumer == EXTERNAL:
            return None
        if consumer in self.units:
            return consumer
        if consumer in self.subunits:
            return self.subunits[consumer].unit
        raise UnknownEntity(f"unknown service consumer {consumer!r}")

    # -- derivation ------------------------------------------------------

    def replace(self, **changes) -> "SourcingEquilibrium":
        return replace(self, **changes)

    def tick(self, **changes) -> "SourcingEquilibrium":
        """A new snapshot one logical instant later, with `changes` applied."""
        changes.setdefault("logical_time", self.logical_time + 1)
        return replace(self, **changes)


def rank_from(perspective: str, title: TitleRecord, scale: TitleScale) -> int:
    """The title's rank as read by one of the two principal parties.

    The outsourcer side reads the stored level directly; the insourcer side
    reads the mirrored ranking n+1-level.
    """
    scale.level(title.level)
    if perspective == title.outsourcer_side:
        return title.level
    if perspective == title.insourcer_side:
        return scale.size + 1 - title.level
    raise PerspectiveNotParty(
        f"unit {perspective!r} fills neither principal slot of the title "
        f"on {title.source_id!r}"
    )


def polarity(perspective: str, title: TitleRecord, scale: TitleScale) -> Polarity:
    """Positive when the perspective's rank falls in the first half."""
    r = rank_from(perspective, title, scale)
    return Polarity.POSITIVE if r <= scale.positive_count else Polarity.NEGATIVE


class EquilibriumBuilder:
    """Incremental constructor that refuses dangling references early.

    Anything assembled through the builder passes validate_equilibrium with
    zero findings; tests that need broken states poke the dataclasses
    directly.
    """

    def __init__(self):
        self._units: dict[str, Unit] = {}
        self._subunits: dict[str, Subunit] = {}
        self._sources: dict[str, Source] = {}
        self._titles: dict[str, TitleRecord] = {}
        self._services: dict[str, ServiceEdge] = {}
        self._money: dict[tuple, MoneyEdge] = {}
        self._contracts: dict[str, Contract] = {}
        self._time = 0

    def add_unit(self, unit_id: str, name: str = "", mission: str = "") -> "EquilibriumBuilder":
        if unit_id in self._units:
            raise ValueError(f"duplicate unit id {unit_id!r}")
        self._units[unit_id] = Unit(unit_id, name or unit_id, mission)
        return self

    def add_subunit(self, unit_id: str, subunit_id: str) -> "EquilibriumBuilder":
        if unit_id not in self._units:
            raise ValueError(f"unknown unit {unit_id!r}")
        if subunit_id in self._subunits:
            raise ValueError(f"duplicate subunit id {subunit_id!r}")
        self._subunits[subunit_id] = Subunit(subunit_id, unit_id)
        u = self._units[unit_id]
        self._units[unit_id] = replace(
            u, subunit_ids=u.subunit_ids | {subunit_id})
        return self

    def add_source(self, source_id: str, type_id: str, *, level: int,
                   using: str, outsourcer: str | None = None,
                   insourcer: str | None = None, third_party: str | None = None,
                   cost: dict | None = None, advantage: AdvantageFlags | None = None,
                   critical_for: str | None = None) -> "EquilibriumBuilder":
        """Add a titled source. `using` names the subunit working with it.

        The outsourcer slot defaults to the using subunit's unit for levels in
        the first half of the scale; second-half levels must name it.
        """
        stype = get_source_type(type_id)
        scale = stype.scale
        lv = scale.level(level)
        if source_id in self._sources:
            raise ValueError(f"duplicate source id {source_id!r}")
        if using not in self._subunits:
            raise ValueError(f"unknown subunit {using!r}")
        using_unit = self._subunits[using].unit
        if scale.outsourcer_half(level):
            outsourcer = outsourcer or using_unit
        else:
            insourcer = insourcer or using_unit
            if outsourcer is None:
                raise ValueError(
                    f"source {source_id!r}: level {level} sits on the insourcer "
                    "side; the outsourcer slot must be named")
        for slot, value in (("outsourcer", outsourcer), ("insourcer", insourcer),
                            ("third party", third_party)):
            if value is not None and value not in self._units:
                raise ValueError(f"source {source_id!r}: unknown {slot} unit {value!r}")
        if lv.mentions(INSOURCER) and insourcer is None:
            raise ValueError(
                f"source {source_id!r}: level {level} names the insourcer slot")
        if lv.mentions(THIRD_PARTY) and third_party is None:
            raise ValueError(
                f"source {source_id!r}: level {level} names the third-party slot")
        if critical_for is not None and critical_for not in self._units:
            raise ValueError(f"source {source_id!r}: unknown unit {critical_for!r}")
        self._sources[source_id] = Source(
            source_id, stype, dict(cost or {}), advantage or AdvantageFlags(),
            critical_for)
        self._titles[source_id] = TitleRecord(
            source_id=source_id, level=level, outsourcer_side=outsourcer,
            using_subunit=using, insourcer_side=insourcer, third_party=third_party)
        return self

    def add_untitled_source(self, source_id: str, type_id: str, *,
                            cost: dict | None = None,
                            advantage: AdvantageFlags | None = None,
                            critical_for: str | None = None) -> "EquilibriumBuilder":
        if source_id in self._sources:
            raise ValueError(f"duplicate source id {source_id!r}")
        if critical_for is not None and critical_for not in self._units:
            raise ValueError(f"source {source_id!r}: unknown unit {critical_for!r}")
        stype = get_source_type(type_id)
        self._sources[source_id] = Source(
            source_id, stype, dict(cost or {}), advantage or AdvantageFlags(),
            critical_for)
        return self

    def add_service(self, service_id: str, provider: str, consumer: str,
                    volume: float) -> "EquilibriumBuilder":
        if service_id in self._services:
            raise ValueError(f"duplicate service id {service_id!r}")
        if provider not in self._subunits:
            raise ValueError(f"unknown provider subunit {provider!r}")
        if consumer != EXTERNAL and consumer not in self._units \
                and consumer not in self._subunits:
            raise ValueError(f"unknown consumer {consumer!r}")
        if volume < 0:
            raise ValueError("service volume must be non-negative")
        self._services[service_id] = ServiceEdge(service_id, provider, consumer,
                                                 float(volume))
        return self

    def add_money(self, payer: str, payee: str, amount: float) -> "EquilibriumBuilder":
        if payer not in self._units or payee not in self._units:
            raise ValueError("money edges run between known units")
        if payer == payee:
            raise ValueError("money edges need distinct endpoints")
        if amount < 0:
            raise ValueError("money amount must be non-negative")
        self._money[(payer, payee)] = MoneyEdge(payer, payee, float(amount))
        return self

    def add_contract(self, contract_id: str, kind: ContractKind,
                     parties: tuple, covers: set | frozenset = frozenset(),
                     expiry: int | None = None) -> "EquilibriumBuilder":
        if contract_id in self._contracts:
            raise ValueError(f"duplicate contract id {contract_id!r}")
        if len(parties) != 2 or parties[0] == parties[1]:
            raise ValueError("contracts bind exactly two distinct parties")
        for p in parties:
            if p not in self._units:
                raise ValueError(f"unknown contract party {p!r}")
        for s in covers:
            if s not in self._services:
                raise ValueError(f"contract covers unknown service {s!r}")
        if kind is ContractKind.TARGET_SERVICE_PROVISION and not covers:
            raise ValueError("target service provision contracts cover >= 1 service")
        self._contracts[contract_id] = Contract(
            contract_id, kind, tuple(parties), frozenset(covers), expiry)
        return self

    def set_time(self, t: int) -> "EquilibriumBuilder":
        self._time = t
        return self

    def build(self) -> SourcingEquilibrium:
        return SourcingEquilibrium(
            units=dict(self._units), subunits=dict(self._subunits),
            sources=dict(self._sources), titles=dict(self._titles),
            service_edges=dict(self._services), money_edges=dict(self._money),
            contracts=dict(self._contracts), logical_time=self._time)

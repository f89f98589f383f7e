"""Analysis of whole transformations: conditions, partition, taxonomy.

A progression turns one equilibrium into another; this module judges the
pair: did the outsourcer actually shed weight (postcondition), was anything
identity-critical touched (precondition), where did each scope source end up
(partition), what kind of transformation was it (classification), and can it
be undone (reversibility).
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass

from .delta import diff
from .errors import PerspectiveNotParty, ScopeMismatch
from .model import ContractKind, SourcingEquilibrium, rank_from
from .steps import (ChangeTitleLevel, CreateSubunit, CreateUnit,
                    DissolveSubunit, FinancialTransfer, MoveService,
                    Progression, SignContract, TerminateContract,
                    TransferTitle, TransformationScope, apply_progression)
from .valuation import (WeightTable, default_weight_table, is_internal,
                        portfolio_weight, sustainable_advantage)
from .errors import NotInvertible


class TransformationLabel(enum.Enum):
    UNIT_TO_UNIT_OUTSOURCING = "UnitToUnitOutsourcing"
    GREENFIELD_OUTSOURCING = "GreenfieldOutsourcing"
    FULL_INCORPORATION = "FullIncorporation"
    #: Also known as reverse outsourcing.
    BACKSOURCING = "Backsourcing"
    REVERSE_INSOURCING = "ReverseInsourcing"
    TRIVIAL_PROLONGATION = "TrivialProlongation"
    FOLLOW_UP_THIRD_PARTY = "FollowUpThirdParty"
    MULTIPLE_FOLLOW_UP = "MultipleFollowUp"
    HETEROGENEOUS_MULTIPLE_FOLLOW_UP = "HeterogeneousMultipleFollowUp"
    SOURCE_SERVICE_RECONSTRUCTION = "SourceServiceReconstruction"
    UNKNOWN = "UnknownTransformation"


#: How the insourcer side reads the same report.
_INSOURCING_READING = {
    TransformationLabel.UNIT_TO_UNIT_OUTSOURCING: "UnitToUnitInsourcing",
    TransformationLabel.GREENFIELD_OUTSOURCING: "GreenfieldInsourcing",
}


class Reversibility(enum.Enum):
    TECHNICALLY = "Technically"
    CONTRACTUALLY = "Contractually"
    NONE = "None"


@dataclass(frozen=True)
class PreconditionResult:
    ok: bool
    blockers: tuple = ()

    def __str__(self):
        if self.ok:
            return "precondition: pass"
        names = ", ".join(self.blockers)
        return f"precondition: fail (identity-critical sources in scope: {names})"


def check_precondition(eq: SourcingEquilibrium,
                       scope: TransformationScope) -> PreconditionResult:
    """No scope source may be identity-critical for the outsourcer."""
    scope.check(eq)
    blockers = tuple(sorted(
        s for s in scope.sources
        if eq.sources[s].identity_critical_for == scope.outsourcer))
    return PreconditionResult(ok=not blockers, blockers=blockers)


@dataclass(frozen=True)
class PostcondConfig:
    theta: float = 0.25
    growth_reading: bool = True

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must sit strictly between 0 and 1")


@dataclass(frozen=True)
class PostconditionResult:
    weight_before: float
    weight_after: float
    clause1_pass: bool
    #: Advisory: financial-title weight deltas for the two principals.
    financial_delta_outsourcer: float
    financial_delta_insourcer: float
    insourcer_weight_before: float
    insourcer_weight_after: float
    clause3_pass: bool
    growth_reading: bool
    theta: float

    @property
    def passed(self) -> bool:
        return self.clause1_pass and self.clause3_pass


@dataclass(frozen=True)
class Partition:
    properly_outsourced: frozenset
    unsourced: frozenset
    acquired: frozenset
    retained: frozenset


def partition_sources(before: SourcingEquilibrium, after: SourcingEquilibrium,
                      scope: TransformationScope) -> Partition:
    """Sort scope sources by where the transformation left them.

    Properly outsourced: still titled, the insourcer side bound, and the
    outsourcer's rank strictly weakened (a full transfer or a
    sale-and-lease-back both qualify). Unsourced: the title is gone.
    Retained: everything else in scope. Acquired: sources absent before that
    are titled into the transformation's subunits after.
    """
    scope.check(before)
    outsourced, unsourced, retained = set(), set(), set()
    for source_id in scope.sources:
        t_before = before.titles[source_id]
        t_after = after.titles.get(source_id)
        if t_after is None:
            unsourced.add(source_id)
            continue
        scale = before.scale_of(source_id)
        rank_before = rank_from(scope.outsourcer, t_before, scale)
        try:
            rank_after = rank_from(scope.outsourcer, t_after, scale)
        except PerspectiveNotParty:
            rank_after = None
        weakened = rank_after is None or rank_after > rank_before
        if t_after.insourcer_side is not None and weakened:
            outsourced.add(source_id)
        else:
            retained.add(source_id)
    receiving = {scope.outsourcing_subunit, scope.insourcing_subunit}
    acquired = {
        source_id for source_id, title in after.titles.items()
        if source_id not in before.sources and title.using_subunit in receiving
    }
    return Partition(frozenset(outsourced), frozenset(unsourced),
                     frozenset(acquired), frozenset(retained))


def check_postcondition(before: SourcingEquilibrium, after: SourcingEquilibrium,
                        scope: TransformationScope,
                        table: WeightTable | None = None,
                        config: PostcondConfig | None = None) -> PostconditionResult:
    """Weight-shedding test over the scope's non-financial sources.

    Clause 1: the outsourcer's scope weight drops to at most (1-theta) of its
    old value, and strictly. Clause 2 (advisory) reports how the financial
    title weights moved. Clause 3 requires the insourcer's family of titles
    over scope plus acquired sources to grow; the literal reading compares
    against the outsourcer's original scope weight instead.
    """
    table = table or default_weight_table()
    config = config or PostcondConfig()
    scope.check(before)
    w_before = portfolio_weight(scope.outsourcer, scope.sources, before, table,
                                include="nonfinancial")
    w_after = portfolio_weight(scope.outsourcer, scope.sources, after, table,
                               include="nonfinancial")
    clause1 = (w_after <= (1.0 - config.theta) * w_before) and (w_after < w_before)

    def financial_delta(unit: str | None) -> float:
        if unit is None:
            return 0.0
        return (portfolio_weight(unit, after.sources, after, table, "financial")
                - portfolio_weight(unit, before.sources, before, table,
                                   "financial"))

    acquired = partition_sources(before, after, scope).acquired
    family = set(scope.sources) | set(acquired)
    insourcer = scope.insourcer
    x_before = (portfolio_weight(insourcer, family, before, table, "nonfinancial")
                if insourcer else 0.0)
    x_after = (portfolio_weight(insourcer, family, after, table, "nonfinancial")
               if insourcer else 0.0)
    if insourcer is None:
        clause3 = False
    elif config.growth_reading:
        clause3 = x_after > x_before
    else:
        clause3 = x_after > w_before
    return PostconditionResult(
        weight_before=w_before, weight_after=w_after, clause1_pass=clause1,
        financial_delta_outsourcer=financial_delta(scope.outsourcer),
        financial_delta_insourcer=financial_delta(insourcer),
        insourcer_weight_before=x_before, insourcer_weight_after=x_after,
        clause3_pass=clause3, growth_reading=config.growth_reading,
        theta=config.theta)


@dataclass(frozen=True)
class PortfolioInvariance:
    preserved: bool
    transferred_services: frozenset
    missing: tuple = ()
    extra: tuple = ()


def invariant_portfolio_check(before: SourcingEquilibrium,
                              after: SourcingEquilibrium,
                              scope: TransformationScope) -> PortfolioInvariance:
    """The combined service portfolio of the two subunits must survive.

    Compares the multiset of (service id, consumer) pairs provided by the
    outsourcing and insourcing subunits before and after; the services may
    change provider (those are reported as transferred) but none may drop or
    appear.
    """
    pair = {scope.outsourcing_subunit, scope.insourcing_subunit} - {None}

    def provided(eq):
        return Counter((e.service_id, e.consumer)
                       for e in eq.service_edges.values() if e.provider in pair)

    count_before, count_after = provided(before), provided(after)
    missing = tuple(sorted(f"{svc} -> {consumer}" for (svc, consumer), n in
                           (count_before - count_after).items() for _ in range(n)))
    extra = tuple(sorted(f"{svc} -> {consumer}" for (svc, consumer), n in
                         (count_after - count_before).items() for _ in range(n)))
    transferred = frozenset(
        svc for svc, edge in after.service_edges.items()
        if svc in before.service_edges
        and before.service_edges[svc].provider != edge.provider
        and (edge.provider in pair or before.service_edges[svc].provider in pair))
    return PortfolioInvariance(preserved=not missing and not extra,
                               transferred_services=transferred,
                               missing=missing, extra=extra)


# -- reversal ----------------------------------------------------------------

_INVERTIBLE = (TransferTitle, ChangeTitleLevel, MoveService, SignContract,
               FinancialTransfer)


def _mirror_subunit(subunit: str, scope: TransformationScope) -> str:
    if subunit == scope.insourcing_subunit:
        return scope.outsourcing_subunit
    if subunit == scope.outsourcing_subunit:
        if scope.insourcing_subunit is None:
            raise NotInvertible("scope has no insourcing subunit to mirror to")
        return scope.insourcing_subunit
    return subunit


def _mirror_unit(unit, scope: TransformationScope):
    if unit == scope.outsourcer:
        return scope.insourcer
    if unit == scope.insourcer:
        return scope.outsourcer
    return unit


def reverse(progression: Progression, *,
            scale_for: dict | None = None) -> Progression:
    """The step-wise inverse, in reverse order, with the scope roles swapped.

    Only transfers, retitles, service moves, contract signings, and financial
    transfers have inverses. Transfers and retitles invert to the mirrored
    level (n+1-r) with the two principal slots swapped; a signing inverts to
    a termination; a payment inverts to the opposite payment. `scale_for`
    maps source ids to their scales when the progression touches titles (the
    mirror level depends on the scale size).
    """
    scope = progression.scope
    if scope is None:
        raise NotInvertible("reverse needs the progression's declared scope")
    scale_for = scale_for or {}
    inverted = []
    for step in reversed(progression.steps):
        if not isinstance(step, _INVERTIBLE):
            raise NotInvertible(
                f"step kind {type(step).__name__} has no inverse")
        if isinstance(step, TransferTitle):
            scale = scale_for.get(step.source)
            if scale is None:
                raise NotInvertible(
                    f"no scale known for source {step.source!r}")
            inverted.append(TransferTitle(
                source=step.source,
                to_subunit=_mirror_subunit(step.to_subunit, scope),
                new_level=scale.size + 1 - step.new_level))
        elif isinstance(step, ChangeTitleLevel):
            scale = scale_for.get(step.source)
            if scale is None:
                raise NotInvertible(
                    f"no scale known for source {step.source!r}")
            inverted.append(ChangeTitleLevel(
                source=step.source,
                new_level=scale.size + 1 - step.new_level,
                outsourcer=(step.outsourcer if step.outsourcer == "__keep__"
                            else _mirror_unit(step.outsourcer, scope)),
                insourcer=(step.insourcer if step.insourcer == "__keep__"
                           else _mirror_unit(step.insourcer, scope)),
                third_party=step.third_party))
        elif isinstance(step, MoveService):
            inverted.append(MoveService(
                service=step.service,
                to_provider=_mirror_subunit(step.to_provider, scope)))
        elif isinstance(step, SignContract):
            inverted.append(TerminateContract(step.contract))
        elif isinstance(step, FinancialTransfer):
            inverted.append(FinancialTransfer(
                payer=step.payee, payee=step.payer, amount=step.amount))
    return Progression(steps=tuple(inverted), scope=scope.swapped())


def reversibility(before: SourcingEquilibrium, after: SourcingEquilibrium,
                  scope: TransformationScope, progression: Progression,
                  partition: Partition,
                  transferred_services: frozenset) -> Reversibility:
    """How hard the transformation is to undo.

    Technically reversible: the outsourcing subunit survives and every scope
    source is either still titled somewhere reachable (outsourced or
    retained) or was abandoned but still exists to be re-acquired.
    Contractually reversible additionally needs a reversibility-clause
    contract between the two principals covering the transferred services.
    """
    dissolved_home = any(isinstance(s, DissolveSubunit)
                         and s.subunit == scope.outsourcing_subunit
                         for s in progression.steps)
    if dissolved_home:
        return Reversibility.NONE
    recoverable = (partition.properly_outsourced | partition.retained
                   | {s for s in partition.unsourced if s in after.sources})
    if set(scope.sources) - recoverable:
        return Reversibility.NONE
    for contract in after.contracts.values():
        if contract.kind is not ContractKind.REVERSIBILITY_CLAUSE:
            continue
        if set(contract.parties) != {scope.outsourcer, scope.insourcer}:
            continue
        if transferred_services <= contract.covered_services:
            return Reversibility.CONTRACTUALLY
    return Reversibility.TECHNICALLY


# -- qualification ------------------------------------------------------------

@dataclass(frozen=True)
class QualificationReport:
    """The four qualifying dimensions of a transformation."""

    title_shift: dict
    contracts_signed: tuple
    contracts_terminated: tuple
    services_rerouted: tuple
    volume_rerouted: float
    advantage_fraction_before: float
    advantage_fraction_after: float

    @property
    def advantage_shift(self) -> float:
        return self.advantage_fraction_after - self.advantage_fraction_before


def _advantage_fraction(unit: str, eq: SourcingEquilibrium,
                        table: WeightTable) -> float:
    internal = [s for s, t in eq.titles.items()
                if t.party(unit) and is_internal(s, unit, eq, table)]
    if not internal:
        return 0.0
    advantaged = sum(1 for s in internal if sustainable_advantage(s, eq))
    return advantaged / len(internal)


def qualify_dimensions(before: SourcingEquilibrium, after: SourcingEquilibrium,
                       scope: TransformationScope, partition: Partition,
                       table: WeightTable | None = None) -> QualificationReport:
    table = table or default_weight_table()
    family = set(scope.sources) | set(partition.acquired)
    shift = {}
    for unit in (scope.outsourcer, scope.insourcer):
        if unit is None:
            continue
        shift[unit] = (portfolio_weight(unit, family, after, table)
                       - portfolio_weight(unit, family, before, table))
    d = diff(before, after)
    rerouted = tuple(sorted(
        svc for svc, edge in d["service_edges"].changed.items()
        if svc in before.service_edges
        and before.service_edges[svc].provider != edge.provider))
    volume = sum(after.service_edges[svc].volume for svc in rerouted)
    return QualificationReport(
        title_shift=shift,
        contracts_signed=tuple(sorted(d["contracts"].added)),
        contracts_terminated=tuple(d["contracts"].removed),
        services_rerouted=rerouted,
        volume_rerouted=volume,
        advantage_fraction_before=_advantage_fraction(scope.outsourcer, before,
                                                      table),
        advantage_fraction_after=_advantage_fraction(scope.outsourcer, after,
                                                     table))


# -- classification -----------------------------------------------------------

@dataclass(frozen=True)
class HistoryRecord:
    """What an earlier transformation did, as far as classification cares."""

    outsourcer: str
    outsourcing_subunit: str
    insourcer: str | None
    insourcing_subunit: str | None
    properly_outsourced: frozenset
    unsourced: frozenset = frozenset()
    classification: str = ""

    @classmethod
    def from_dict(cls, data: dict) -> "HistoryRecord":
        scope = data.get("scope", data)
        partition = data.get("partition", {})
        return cls(
            outsourcer=scope["outsourcer"],
            outsourcing_subunit=scope["outsourcing_subunit"],
            insourcer=scope.get("insourcer"),
            insourcing_subunit=scope.get("insourcing_subunit"),
            properly_outsourced=frozenset(partition.get("properly_outsourced", ())),
            unsourced=frozenset(partition.get("unsourced", ())),
            classification=data.get("classification", ""))


def _created_entities(progression: Progression):
    units = {s.unit for s in progression.steps if isinstance(s, CreateUnit)}
    subunits = {s.subunit for s in progression.steps
                if isinstance(s, CreateSubunit)}
    return units, subunits


def _trivial_prolongation(before: SourcingEquilibrium,
                          after: SourcingEquilibrium) -> bool:
    d = diff(before, after)
    for kind, kd in d.kinds.items():
        if kind == "contracts":
            continue
        if not kd.empty:
            return False
    contracts = d["contracts"]
    if contracts.added or contracts.removed or not contracts.changed:
        return False
    for cid, new in contracts.changed.items():
        old = before.contracts[cid]
        if (old.kind, old.parties, old.covered_services) != \
                (new.kind, new.parties, new.covered_services):
            return False
        if new.expiry is None:
            return False
        if old.expiry is not None and new.expiry <= old.expiry:
            return False
    return True


def classify(before: SourcingEquilibrium, progression: Progression,
             after: SourcingEquilibrium, history=None,
             table: WeightTable | None = None,
             config: PostcondConfig | None = None) -> TransformationLabel:
    """Name the transformation. Falls back to UnknownTransformation.

    History records (when given) unlock the path-dependent labels:
    backsourcing, the follow-up family, reverse insourcing, and
    source/service reconstruction.
    """
    scope = progression.scope
    if scope is None:
        raise ScopeMismatch("classification needs the progression's scope")
    scope.check(before)
    table = table or default_weight_table()
    config = config or PostcondConfig()
    partition = partition_sources(before, after, scope)
    records = [h if isinstance(h, HistoryRecord) else HistoryRecord.from_dict(h)
               for h in (history or [])]
    created_units, created_subunits = _created_entities(progression)

    if records:
        label = _classify_from_history(before, after, scope, partition, records,
                                       created_units)
        if label is not None:
            return label

    if _trivial_prolongation(before, after):
        return TransformationLabel.TRIVIAL_PROLONGATION

    if scope.outsourcer in before.units and scope.outsourcer not in after.units:
        return TransformationLabel.FULL_INCORPORATION

    pre = check_precondition(before, scope)
    post = check_postcondition(before, after, scope, table, config)
    if pre.ok and post.passed:
        if (scope.insourcer in created_units
                or scope.insourcing_subunit in created_subunits):
            return TransformationLabel.GREENFIELD_OUTSOURCING
        if scope.insourcer is not None and scope.insourcer in before.units:
            return TransformationLabel.UNIT_TO_UNIT_OUTSOURCING
    return TransformationLabel.UNKNOWN


def _classify_from_history(before, after, scope, partition, records,
                           created_units):
    previously_outsourced = {}
    for record in records:
        for source_id in record.properly_outsourced:
            previously_outsourced.setdefault(source_id, []).append(record)

    moved = {}
    for source_id in scope.sources:
        t_before = before.titles[source_id]
        t_after = after.titles.get(source_id)
        if t_after is None or t_after.using_subunit == t_before.using_subunit:
            continue
        if t_after.using_subunit not in after.subunits:
            continue
        moved[source_id] = after.subunits[t_after.using_subunit].unit

    tracked = {s: r for s, r in previously_outsourced.items() if s in moved}
    if tracked:
        receivers_new = {s: u for s, u in moved.items() if s in tracked
                         and u in created_units}
        if receivers_new:
            prior_outsourcers = {rec.outsourcer for s in receivers_new
                                 for rec in tracked[s]}
            if prior_outsourcers and all(o not in before.units
                                         for o in prior_outsourcers):
                return TransformationLabel.REVERSE_INSOURCING
        back, follow = set(), set()
        for source_id, receiver in moved.items():
            if source_id not in tracked:
                continue
            origins = tracked[source_id]
            if any(rec.outsourcer == receiver for rec in origins):
                back.add(source_id)
            elif receiver != scope.outsourcer:
                follow.add(source_id)
        if back and follow:
            return TransformationLabel.HETEROGENEOUS_MULTIPLE_FOLLOW_UP
        if follow:
            receivers = {moved[s] for s in follow}
            if len(receivers) >= 2:
                return TransformationLabel.MULTIPLE_FOLLOW_UP
            return TransformationLabel.FOLLOW_UP_THIRD_PARTY
        if back:
            return TransformationLabel.BACKSOURCING

    if partition.acquired:
        label = _reconstruction(before, after, scope, partition, records)
        if label is not None:
            return label
    return None


def _reconstruction(before, after, scope, partition, records):
    own_records = [r for r in records if r.outsourcer == scope.outsourcer]
    if not own_records:
        return None
    lost_types = set()
    for record in own_records:
        for source_id in record.properly_outsourced | record.unsourced:
            source = after.sources.get(source_id) or before.sources.get(source_id)
            if source is not None:
                lost_types.add(source.type.id)
    prior_subunits = {r.outsourcing_subunit for r in own_records}
    for source_id in partition.acquired:
        title = after.titles[source_id]
        if after.subunits[title.using_subunit].unit != scope.outsourcer:
            return None
        if title.using_subunit in prior_subunits:
            return None
        if after.sources[source_id].type.id not in lost_types:
            return None
    return TransformationLabel.SOURCE_SERVICE_RECONSTRUCTION


# -- the full report ----------------------------------------------------------

@dataclass(frozen=True)
class TransformationReport:
    scope: TransformationScope
    precondition: PreconditionResult
    postcondition: PostconditionResult
    partition: Partition
    classification: TransformationLabel
    reversibility: Reversibility
    portfolio: PortfolioInvariance
    qualification: QualificationReport
    logical_time_before: int
    logical_time_after: int
    step_count: int = 0

    @property
    def insourcing_reading(self) -> str:
        """The same verdict as read from the insourcer's side."""
        return _INSOURCING_READING.get(self.classification,
                                       self.classification.value)

    def to_dict(self) -> dict:
        q = self.qualification
        return {
            "scope": {
                "outsourcer": self.scope.outsourcer,
                "outsourcing_subunit": self.scope.outsourcing_subunit,
                "insourcer": self.scope.insourcer,
                "insourcing_subunit": self.scope.insourcing_subunit,
                "sources": sorted(self.scope.sources),
            },
            "precondition": {
                "ok": self.precondition.ok,
                "blockers": list(self.precondition.blockers),
            },
            "postcondition": {
                "weight_before": self.postcondition.weight_before,
                "weight_after": self.postcondition.weight_after,
                "clause1_pass": self.postcondition.clause1_pass,
                "financial_delta_outsourcer":
                    self.postcondition.financial_delta_outsourcer,
                "financial_delta_insourcer":
                    self.postcondition.financial_delta_insourcer,
                "insourcer_weight_before":
                    self.postcondition.insourcer_weight_before,
                "insourcer_weight_after":
                    self.postcondition.insourcer_weight_after,
                "clause3_pass": self.postcondition.clause3_pass,
                "growth_reading": self.postcondition.growth_reading,
                "theta": self.postcondition.theta,
                "passed": self.postcondition.passed,
            },
            "partition": {
                "properly_outsourced": sorted(self.partition.properly_outsourced),
                "unsourced": sorted(self.partition.unsourced),
                "acquired": sorted(self.partition.acquired),
                "retained": sorted(self.partition.retained),
            },
            "classification": self.classification.value,
            "insourcing_reading": self.insourcing_reading,
            "reversibility": self.reversibility.value,
            "portfolio": {
                "preserved": self.portfolio.preserved,
                "transferred_services": sorted(self.portfolio.transferred_services),
                "missing": list(self.portfolio.missing),
                "extra": list(self.portfolio.extra),
            },
            "qualification": {
                "title_shift": dict(sorted(q.title_shift.items())),
                "contracts_signed": list(q.contracts_signed),
                "contracts_terminated": list(q.contracts_terminated),
                "services_rerouted": list(q.services_rerouted),
                "volume_rerouted": q.volume_rerouted,
                "advantage_fraction_before": q.advantage_fraction_before,
                "advantage_fraction_after": q.advantage_fraction_after,
                "advantage_shift": q.advantage_shift,
            },
            "logical_time_before": self.logical_time_before,
            "logical_time_after": self.logical_time_after,
            "step_count": self.step_count,
        }


def analyze_progression(before: SourcingEquilibrium, progression: Progression,
                        *, history=None, table: WeightTable | None = None,
                        config: PostcondConfig | None = None):
    """Apply a progression and judge it; returns (after, report).

    Propagates ProgressionHalted untouched when a step cannot be applied.
    """
    if progression.scope is None:
        raise ScopeMismatch("analysis needs the progression's scope")
    table = table or default_weight_table()
    config = config or PostcondConfig()
    after, trace = apply_progression(before, progression)
    scope = progression.scope
    partition = partition_sources(before, after, scope)
    portfolio = invariant_portfolio_check(before, after, scope)
    report = TransformationReport(
        scope=scope,
        precondition=check_precondition(before, scope),
        postcondition=check_postcondition(before, after, scope, table, config),
        partition=partition,
        classification=classify(before, progression, after, history=history,
                                table=table, config=config),
        reversibility=reversibility(before, after, scope, progression,
                                    partition, portfolio.transferred_services),
        portfolio=portfolio,
        qualification=qualify_dimensions(before, after, scope, partition, table),
        logical_time_before=before.logical_time,
        logical_time_after=after.logical_time,
        step_count=len(trace))
    return after, report

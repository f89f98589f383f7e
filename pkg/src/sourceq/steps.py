"""Progression steps: the twelve primitive moves between equilibria.

apply_step is a pure function from a snapshot and a step to the next
snapshot; it raises StepPreconditionFailed (and leaves no torn state) when
the step does not fit the current world. apply_progression is the left fold
with a trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .catalog import get_source_type
from .errors import ProgressionHalted, ScopeMismatch, StepPreconditionFailed
from .model import (AdvantageFlags, Contract, ContractKind, MoneyEdge,
                    Source, SourcingEquilibrium, Subunit, TitleRecord, Unit)
from .scales import INSOURCER, THIRD_PARTY

#: Sentinel for ChangeTitleLevel fields that keep their current binding.
KEEP = "__keep__"


@dataclass(frozen=True)
class TransferTitle:
    source: str
    to_subunit: str
    new_level: int


@dataclass(frozen=True)
class ChangeTitleLevel:
    source: str
    new_level: int
    outsourcer: str = KEEP
    insourcer: str | None = KEEP
    third_party: str | None = KEEP


@dataclass(frozen=True)
class AbandonTitle:
    source: str


@dataclass(frozen=True)
class AcquireSource:
    subunit: str
    source: str
    type_id: str
    level: int = 1
    cost_profile: dict = field(default_factory=dict)
    advantage: AdvantageFlags = AdvantageFlags()
    critical_for: str | None = None


@dataclass(frozen=True)
class MoveService:
    service: str
    to_provider: str


@dataclass(frozen=True)
class CreateUnit:
    unit: str
    name: str = ""
    mission: str = ""


@dataclass(frozen=True)
class CreateSubunit:
    unit: str
    subunit: str


@dataclass(frozen=True)
class DissolveSubunit:
    subunit: str


@dataclass(frozen=True)
class DissolveUnit:
    unit: str


@dataclass(frozen=True)
class SignContract:
    contract: str
    kind: ContractKind
    parties: tuple
    covers: frozenset = frozenset()
    expiry: int | None = None


@dataclass(frozen=True)
class TerminateContract:
    contract: str


@dataclass(frozen=True)
class FinancialTransfer:
    payer: str
    payee: str
    amount: float


STEP_KINDS = {
    TransferTitle: "transfer",
    ChangeTitleLevel: "retitle",
    AbandonTitle: "abandon",
    AcquireSource: "acquire",
    MoveService: "move-service",
    CreateUnit: "create-unit",
    CreateSubunit: "create-subunit",
    DissolveSubunit: "dissolve-subunit",
    DissolveUnit: "dissolve-unit",
    SignContract: "sign",
    TerminateContract: "terminate",
    FinancialTransfer: "pay",
}


def step_kind(step) -> str:
    return STEP_KINDS[type(step)]


@dataclass(frozen=True)
class TransformationScope:
    """Who outsources what to whom: the role bindings of one transformation."""

    outsourcer: str
    outsourcing_subunit: str
    insourcer: str | None = None
    insourcing_subunit: str | None = None
    sources: frozenset = field(default_factory=frozenset)

    def check(self, eq: SourcingEquilibrium) -> None:
        """Verify the scope against a snapshot.

        The outsourcer side must exist and use every scope source. The
        insourcer side is only cross-checked when present in the snapshot: a
        greenfield transformation names an insourcer that the progression
        itself creates.
        """
        if self.outsourcer not in eq.units:
            raise ScopeMismatch(f"outsourcer {self.outsourcer!r} missing")
        sub = eq.subunits.get(self.outsourcing_subunit)
        if sub is None or sub.unit != self.outsourcer:
            raise ScopeMismatch(
                f"subunit {self.outsourcing_subunit!r} does not belong to "
                f"{self.outsourcer!r}")
        if self.insourcing_subunit is not None and self.insourcer is not None:
            ysub = eq.subunits.get(self.insourcing_subunit)
            if ysub is not None and ysub.unit != self.insourcer:
                raise ScopeMismatch(
                    f"subunit {self.insourcing_subunit!r} does not belong to "
                    f"{self.insourcer!r}")
        for source_id in self.sources:
            title = eq.titles.get(source_id)
            if title is None or title.using_subunit != self.outsourcing_subunit:
                raise ScopeMismatch(
                    f"scope source {source_id!r} is not used by "
                    f"{self.outsourcing_subunit!r}")

    def swapped(self) -> "TransformationScope":
        """The same transformation read from the insourcer's chair."""
        if self.insourcer is None or self.insourcing_subunit is None:
            raise ScopeMismatch("cannot swap a scope without an insourcer side")
        return TransformationScope(
            outsourcer=self.insourcer,
            outsourcing_subunit=self.insourcing_subunit,
            insourcer=self.outsourcer,
            insourcing_subunit=self.outsourcing_subunit,
            sources=self.sources)


@dataclass(frozen=True)
class Progression:
    steps: tuple
    scope: TransformationScope | None = None


def _fail(reason: str):
    raise StepPreconditionFailed(reason)


def _require_slots(scale, level: int, insourcer, third_party, source: str):
    lv = scale.level(level)
    if lv.mentions(INSOURCER) and insourcer is None:
        _fail(f"{source}: level {level} names the insourcer slot")
    if lv.mentions(THIRD_PARTY) and third_party is None:
        _fail(f"{source}: level {level} names the third-party slot")


def _check_using_side(eq, scale, level: int, using_subunit: str,
                      outsourcer: str, insourcer, source: str):
    user_unit = eq.subunits[using_subunit].unit
    expected = outsourcer if scale.outsourcer_half(level) else insourcer
    if expected is not None and user_unit != expected:
        _fail(f"{source}: level {level} places use with {expected!r}, not with "
              f"{using_subunit!r} of {user_unit!r}")


def _apply_transfer(eq: SourcingEquilibrium, step: TransferTitle):
    title = eq.titles.get(step.source)
    if title is None:
        _fail(f"source {step.source!r} carries no title to transfer")
    if step.to_subunit not in eq.subunits:
        _fail(f"target subunit {step.to_subunit!r} missing")
    scale = eq.scale_of(step.source)
    if not 1 <= step.new_level <= scale.size:
        _fail(f"level {step.new_level} out of range 1..{scale.size}")
    target_unit = eq.subunits[step.to_subunit].unit
    lv = scale.level(step.new_level)
    if target_unit == title.outsourcer_side:
        insourcer = title.insourcer_side if lv.mentions(INSOURCER) else None
    else:
        insourcer = target_unit
    third_party = title.third_party if lv.mentions(THIRD_PARTY) else None
    _require_slots(scale, step.new_level, insourcer, third_party, step.source)
    _check_using_side(eq, scale, step.new_level, step.to_subunit,
                      title.outsourcer_side, insourcer, step.source)
    new_title = replace(title, level=step.new_level, using_subunit=step.to_subunit,
                        insourcer_side=insourcer, third_party=third_party)
    return eq.tick(titles={**eq.titles, step.source: new_title})


def _apply_retitle(eq: SourcingEquilibrium, step: ChangeTitleLevel):
    title = eq.titles.get(step.source)
    if title is None:
        _fail(f"source {step.source!r} carries no title to change")
    scale = eq.scale_of(step.source)
    if not 1 <= step.new_level <= scale.size:
        _fail(f"level {step.new_level} out of range 1..{scale.size}")
    outsourcer = title.outsourcer_side if step.outsourcer == KEEP else step.outsourcer
    insourcer = title.insourcer_side if step.insourcer == KEEP else step.insourcer
    third = title.third_party if step.third_party == KEEP else step.third_party
    if outsourcer is None:
        _fail(f"{step.source}: the outsourcer slot cannot be cleared")
    for unit in (outsourcer, insourcer, third):
        if unit is not None and unit not in eq.units:
            _fail(f"{step.source}: unknown unit {unit!r} in title binding")
    if not scale.level(step.new_level).mentions(THIRD_PARTY):
        third = None
    _require_slots(scale, step.new_level, insourcer, third, step.source)
    _check_using_side(eq, scale, step.new_level, title.using_subunit,
                      outsourcer, insourcer, step.source)
    new_title = replace(title, level=step.new_level, outsourcer_side=outsourcer,
                        insourcer_side=insourcer, third_party=third)
    return eq.tick(titles={**eq.titles, step.source: new_title})


def _apply_abandon(eq: SourcingEquilibrium, step: AbandonTitle):
    if step.source not in eq.titles:
        _fail(f"source {step.source!r} carries no title to abandon")
    titles = dict(eq.titles)
    del titles[step.source]
    return eq.tick(titles=titles)


def _apply_acquire(eq: SourcingEquilibrium, step: AcquireSource):
    if step.source in eq.sources:
        _fail(f"source id {step.source!r} already exists")
    if step.subunit not in eq.subunits:
        _fail(f"acquiring subunit {step.subunit!r} missing")
    stype = get_source_type(step.type_id)
    scale = stype.scale
    if not 1 <= step.level <= scale.size:
        _fail(f"level {step.level} out of range 1..{scale.size}")
    if not scale.outsourcer_half(step.level):
        _fail(f"acquisition lands on the acquirer's side; level {step.level} "
              "does not")
    lv = scale.level(step.level)
    if lv.mentions(INSOURCER) or lv.mentions(THIRD_PARTY):
        _fail(f"acquisition at level {step.level} would need counterparty slots")
    if step.critical_for is not None and step.critical_for not in eq.units:
        _fail(f"unknown unit {step.critical_for!r} in identity-critical flag")
    owner = eq.subunits[step.subunit].unit
    source = Source(step.source, stype, dict(step.cost_profile), step.advantage,
                    step.critical_for)
    title = TitleRecord(source_id=step.source, level=step.level,
                        outsourcer_side=owner, using_subunit=step.subunit)
    return eq.tick(sources={**eq.sources, step.source: source},
                   titles={**eq.titles, step.source: title})


def _apply_move_service(eq: SourcingEquilibrium, step: MoveService):
    edge = eq.service_edges.get(step.service)
    if edge is None:
        _fail(f"service {step.service!r} missing")
    if step.to_provider not in eq.subunits:
        _fail(f"target provider subunit {step.to_provider!r} missing")
    moved = replace(edge, provider=step.to_provider)
    return eq.tick(service_edges={**eq.service_edges, step.service: moved})


def _apply_create_unit(eq: SourcingEquilibrium, step: CreateUnit):
    if step.unit in eq.units:
        _fail(f"unit id {step.unit!r} already exists")
    unit = Unit(step.unit, step.name or step.unit, step.mission)
    return eq.tick(units={**eq.units, step.unit: unit})


def _apply_create_subunit(eq: SourcingEquilibrium, step: CreateSubunit):
    if step.unit not in eq.units:
        _fail(f"unit {step.unit!r} missing")
    if step.subunit in eq.subunits:
        _fail(f"subunit id {step.subunit!r} already exists")
    parent = eq.units[step.unit]
    return eq.tick(
        units={**eq.units,
               step.unit: replace(parent,
                                  subunit_ids=parent.subunit_ids | {step.subunit})},
        subunits={**eq.subunits, step.subunit: Subunit(step.subunit, step.unit)})


def _apply_dissolve_subunit(eq: SourcingEquilibrium, step: DissolveSubunit):
    sub = eq.subunits.get(step.subunit)
    if sub is None:
        _fail(f"subunit {step.subunit!r} missing")
    for title in eq.titles.values():
        if title.using_subunit == step.subunit:
            _fail(f"subunit {step.subunit!r} still uses source "
                  f"{title.source_id!r}")
    for edge in eq.service_edges.values():
        if edge.provider == step.subunit or edge.consumer == step.subunit:
            _fail(f"subunit {step.subunit!r} still tied to service "
                  f"{edge.service_id!r}")
    subunits = dict(eq.subunits)
    del subunits[step.subunit]
    parent = eq.units[sub.unit]
    return eq.tick(
        units={**eq.units,
               sub.unit: replace(parent,
                                 subunit_ids=parent.subunit_ids - {step.subunit})},
        subunits=subunits)


def _apply_dissolve_unit(eq: SourcingEquilibrium, step: DissolveUnit):
    unit = eq.units.get(step.unit)
    if unit is None:
        _fail(f"unit {step.unit!r} missing")
    if unit.subunit_ids:
        _fail(f"unit {step.unit!r} still has subunits")
    for title in eq.titles.values():
        if step.unit in (title.outsourcer_side, title.insourcer_side,
                         title.third_party):
            _fail(f"unit {step.unit!r} still party to the title on "
                  f"{title.source_id!r}")
    for source in eq.sources.values():
        if source.identity_critical_for == step.unit:
            _fail(f"unit {step.unit!r} still named identity-critical by "
                  f"{source.id!r}")
    for edge in eq.service_edges.values():
        if edge.consumer == step.unit:
            _fail(f"unit {step.unit!r} still consumes service {edge.service_id!r}")
    for key in eq.money_edges:
        if step.unit in key:
            _fail(f"unit {step.unit!r} still on a money edge")
    for contract in eq.contracts.values():
        if step.unit in contract.parties:
            _fail(f"unit {step.unit!r} still party to contract {contract.id!r}")
    units = dict(eq.units)
    del units[step.unit]
    return eq.tick(units=units)


def _apply_sign(eq: SourcingEquilibrium, step: SignContract):
    if step.contract in eq.contracts:
        _fail(f"contract id {step.contract!r} already exists")
    if len(step.parties) != 2 or step.parties[0] == step.parties[1]:
        _fail("contracts bind exactly two distinct parties")
    for p in step.parties:
        if p not in eq.units:
            _fail(f"contract party {p!r} missing")
    for s in step.covers:
        if s not in eq.service_edges:
            _fail(f"contract covers missing service {s!r}")
    if step.kind is ContractKind.TARGET_SERVICE_PROVISION and not step.covers:
        _fail("target service provision contracts cover >= 1 service")
    contract = Contract(step.contract, step.kind, tuple(step.parties),
                        frozenset(step.covers), step.expiry)
    return eq.tick(contracts={**eq.contracts, step.contract: contract})


def _apply_terminate(eq: SourcingEquilibrium, step: TerminateContract):
    if step.contract not in eq.contracts:
        _fail(f"contract {step.contract!r} missing")
    contracts = dict(eq.contracts)
    del contracts[step.contract]
    return eq.tick(contracts=contracts)


def _apply_pay(eq: SourcingEquilibrium, step: FinancialTransfer):
    if step.payer not in eq.units:
        _fail(f"payer unit {step.payer!r} missing")
    if step.payee not in eq.units:
        _fail(f"payee unit {step.payee!r} missing")
    if step.payer == step.payee:
        _fail("payer and payee must differ")
    if step.amount <= 0:
        _fail("transfer amount must be positive")
    edges = dict(eq.money_edges)
    forward = (step.payer, step.payee)
    backward = (step.payee, step.payer)
    remaining = step.amount
    if backward in edges:
        # Flows net against the opposite direction.
        opposing = edges[backward].amount
        if opposing > remaining:
            edges[backward] = MoneyEdge(step.payee, step.payer,
                                        opposing - remaining)
            remaining = 0.0
        else:
            del edges[backward]
            remaining -= opposing
    if remaining > 0:
        base = edges[forward].amount if forward in edges else 0.0
        edges[forward] = MoneyEdge(step.payer, step.payee, base + remaining)
    return eq.tick(money_edges=edges)


_APPLIERS = {
    TransferTitle: _apply_transfer,
    ChangeTitleLevel: _apply_retitle,
    AbandonTitle: _apply_abandon,
    AcquireSource: _apply_acquire,
    MoveService: _apply_move_service,
    CreateUnit: _apply_create_unit,
    CreateSubunit: _apply_create_subunit,
    DissolveSubunit: _apply_dissolve_subunit,
    DissolveUnit: _apply_dissolve_unit,
    SignContract: _apply_sign,
    TerminateContract: _apply_terminate,
    FinancialTransfer: _apply_pay,
}


def apply_step(eq: SourcingEquilibrium, step) -> SourcingEquilibrium:
    try:
        applier = _APPLIERS[type(step)]
    except KeyError:
        raise TypeError(f"not a progression step: {step!r}") from None
    return applier(eq, step)


@dataclass(frozen=True)
class StepTrace:
    index: int
    kind: str
    step: object
    logical_time: int


def apply_progression(eq: SourcingEquilibrium, progression: Progression):
    """Fold a progression over a snapshot, keeping a step-by-step trace.

    Stops at the first failing step and raises ProgressionHalted carrying the
    1-based failing index, the partial trace, and the last consistent
    snapshot.
    """
    trace: list[StepTrace] = []
    current = eq
    for index, step in enumerate(progression.steps, start=1):
        try:
            current = apply_step(current, step)
        except StepPreconditionFailed as exc:
            raise ProgressionHalted(index, exc.reason, current, tuple(trace))
        trace.append(StepTrace(index, step_kind(step), step,
                               current.logical_time))
    return current, tuple(trace)

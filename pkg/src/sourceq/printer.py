"""Canonical text rendering of equilibria and plans.

Output is deterministic: entities are sorted by id, indentation is fixed, and
reals use Python's shortest round-trip form. parse(print(v)) == v for every
valid value, and printing an already-printed document reproduces it byte for
byte.
"""

from __future__ import annotations

from .dsl import _quote
from .model import (EXTERNAL, CostCategory, SourcingEquilibrium, TitleRecord,
                    Unit)
from .planning import ContractPresent, EntityExists, Plan, TitleAtLevel
from .steps import (KEEP, AbandonTitle, AcquireSource, ChangeTitleLevel,
                    CreateSubunit, CreateUnit, DissolveSubunit, DissolveUnit,
                    FinancialTransfer, MoveService, SignContract,
                    TerminateContract, TransferTitle)

_FLAG_ORDER = (("valuable", "v"), ("rare", "r"), ("inimitable", "i"),
               ("non_substitutable", "n"))


def _real(x: float) -> str:
    return repr(float(x))


def _flags_clause(advantage) -> str:
    letters = [letter for attr, letter in _FLAG_ORDER
               if getattr(advantage, attr)]
    return f" flags {','.join(letters)}" if letters else ""


def _cost_clause(profile: dict) -> str:
    if not profile:
        return ""
    parts = [f"{cat.value}={_real(amount)}"
             for cat in CostCategory if (amount := profile.get(cat)) is not None]
    return " cost " + " ".join(parts)


def _unit_header(unit: Unit) -> str:
    line = f"unit {unit.id}"
    if unit.name and unit.name != unit.id:
        line += f" {_quote(unit.name)}"
    if unit.mission:
        line += f" identity: {_quote(unit.mission)}"
    return line


def _source_line(eq: SourcingEquilibrium, title: TitleRecord) -> str:
    source = eq.sources[title.source_id]
    scale = source.type.scale
    line = f"source {source.id}: {source.type.id} level {title.level}"
    if scale.outsourcer_half(title.level):
        holder = title.insourcer_side
    else:
        holder = title.outsourcer_side
    if holder is not None:
        line += f" holder {holder}"
    if title.third_party is not None:
        line += f" counterparty {title.third_party}"
    if source.identity_critical_for is not None:
        if source.identity_critical_for == title.outsourcer_side:
            line += " critical"
        else:
            line += f" critical-for {source.identity_critical_for}"
    line += _flags_clause(source.advantage)
    line += _cost_clause(source.cost_profile)
    return line


def print_equilibrium(eq: SourcingEquilibrium) -> str:
    lines: list[str] = []
    if eq.logical_time != 0:
        lines.append(f"time {eq.logical_time}")
        lines.append("")
    by_subunit: dict[str, list[TitleRecord]] = {}
    for title in eq.titles.values():
        by_subunit.setdefault(title.using_subunit, []).append(title)
    for unit_id in sorted(eq.units):
        unit = eq.units[unit_id]
        lines.append(_unit_header(unit) + " {")
        for sub_id in sorted(unit.subunit_ids):
            lines.append(f"  subunit {sub_id} {{")
            for title in sorted(by_subunit.get(sub_id, ()),
                                key=lambda t: t.source_id):
                lines.append("    " + _source_line(eq, title))
            lines.append("  }")
        lines.append("}")
    untitled = sorted(s for s in eq.sources if s not in eq.titles)
    for source_id in untitled:
        source = eq.sources[source_id]
        line = f"unsourced {source.id}: {source.type.id}"
        if source.identity_critical_for is not None:
            line += f" critical-for {source.identity_critical_for}"
        line += _flags_clause(source.advantage)
        line += _cost_clause(source.cost_profile)
        lines.append(line)
    for service_id in sorted(eq.service_edges):
        edge = eq.service_edges[service_id]
        provider_unit = eq.subunits[edge.provider].unit
        if edge.consumer == EXTERNAL:
            target = "external"
        elif edge.consumer in eq.subunits:
            target = f"{eq.subunits[edge.consumer].unit}.{edge.consumer}"
        else:
            target = edge.consumer
        lines.append(f"service {service_id} from {provider_unit}.{edge.provider}"
                     f" to {target} volume {_real(edge.volume)}")
    for key in sorted(eq.money_edges):
        money = eq.money_edges[key]
        lines.append(f"money from {money.payer} to {money.payee}"
                     f" amount {_real(money.amount)}")
    for contract_id in sorted(eq.contracts):
        contract = eq.contracts[contract_id]
        line = (f"contract {contract_id} kind {contract.kind.value}"
                f" between {contract.parties[0]},{contract.parties[1]}")
        if contract.covered_services:
            line += " covers " + ",".join(sorted(contract.covered_services))
        if contract.expiry is not None:
            line += f" expires {contract.expiry}"
        lines.append(line)
    return "\n".join(lines) + "\n"


# -- plans -------------------------------------------------------------------

def _guard_text(guard) -> str:
    if isinstance(guard, EntityExists):
        return f"exists {guard.entity}"
    if isinstance(guard, TitleAtLevel):
        return f"title {guard.source} level {guard.level}"
    if isinstance(guard, ContractPresent):
        return f"contract {guard.contract}"
    raise TypeError(f"not a guard: {guard!r}")


def _acquire_text(step: AcquireSource) -> str:
    line = f"acquire {step.source}: {step.type_id} level {step.level}"
    if step.critical_for is not None:
        line += f" critical-for {step.critical_for}"
    line += _flags_clause(step.advantage)
    line += _cost_clause(step.cost_profile)
    return line + f" in {step.subunit}"


def _sign_text(step: SignContract) -> str:
    line = (f"sign {step.contract} kind {step.kind.value}"
            f" between {step.parties[0]},{step.parties[1]}")
    if step.covers:
        line += " covers " + ",".join(sorted(step.covers))
    if step.expiry is not None:
        line += f" expires {step.expiry}"
    return line


def step_text(step) -> str:
    """One step in the plan grammar, without the trailing semicolon."""
    if isinstance(step, TransferTitle):
        return (f"transfer {step.source} to {step.to_subunit}"
                f" level {step.new_level}")
    if isinstance(step, ChangeTitleLevel):
        line = f"retitle {step.source} level {step.new_level}"
        for word, value in (("outsourcer", step.outsourcer),
                            ("holder", step.insourcer),
                            ("counterparty", step.third_party)):
            if value is not KEEP:
                line += f" {word} {value if value is not None else 'none'}"
        return line
    if isinstance(step, AbandonTitle):
        return f"abandon {step.source}"
    if isinstance(step, AcquireSource):
        return _acquire_text(step)
    if isinstance(step, MoveService):
        return f"move-service {step.service} to {step.to_provider}"
    if isinstance(step, CreateUnit):
        line = f"create-unit {step.unit}"
        if step.name:
            line += f" {_quote(step.name)}"
        if step.mission:
            line += f" identity: {_quote(step.mission)}"
        return line
    if isinstance(step, CreateSubunit):
        return f"create-subunit {step.subunit} in {step.unit}"
    if isinstance(step, DissolveSubunit):
        return f"dissolve-subunit {step.subunit}"
    if isinstance(step, DissolveUnit):
        return f"dissolve-unit {step.unit}"
    if isinstance(step, SignContract):
        return _sign_text(step)
    if isinstance(step, TerminateContract):
        return f"terminate {step.contract}"
    if isinstance(step, FinancialTransfer):
        return (f"pay {step.payer} to {step.payee}"
                f" amount {_real(step.amount)}")
    raise TypeError(f"not a step: {step!r}")


def _scope_text(scope) -> str:
    parts = [f"A={scope.outsourcer}", f"B={scope.outsourcing_subunit}"]
    if scope.insourcer is not None:
        parts.append(f"X={scope.insourcer}")
    if scope.insourcing_subunit is not None:
        parts.append(f"Y={scope.insourcing_subunit}")
    if scope.sources:
        parts.append("sources=" + ",".join(sorted(scope.sources)))
    return "scope(" + ", ".join(parts) + ")"


def print_plan(plan: Plan) -> str:
    lines: list[str] = []
    if plan.equilibrium_ref is not None:
        lines.append(f"use {_quote(plan.equilibrium_ref)}")
        lines.append("")
    header = f"plan {plan.id}"
    if plan.scope is not None:
        header += " " + _scope_text(plan.scope)
    lines.append(header + " {")
    for name, steps in plan.threads.items():
        lines.append(f"  thread {name} {{")
        for guarded in steps:
            prefix = ""
            if guarded.guard is not None:
                prefix = "when " + _guard_text(guarded.guard) + " "
            lines.append("    " + prefix + step_text(guarded.step) + ";")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"

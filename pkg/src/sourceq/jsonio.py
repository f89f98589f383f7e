"""Canonical JSON export for the document and report types.

All exporters funnel through canonical_json, so output is byte-stable: keys
sorted, reals at 12 significant digits, one trailing newline.
"""

from __future__ import annotations

from .canon import canonical_json, equilibrium_to_dict
from .model import SourcingEquilibrium
from .netdyn import EvolutionStats
from .planning import (ContractPresent, EntityExists, Plan, TitleAtLevel)
from .steps import (KEEP, AcquireSource, ChangeTitleLevel, CreateUnit,
                    SignContract, step_kind)
from .transform import TransformationReport
from .validation import ValidationReport


def guard_to_dict(guard) -> dict | None:
    if guard is None:
        return None
    if isinstance(guard, EntityExists):
        return {"kind": "exists", "entity": guard.entity}
    if isinstance(guard, TitleAtLevel):
        return {"kind": "title", "source": guard.source, "level": guard.level}
    if isinstance(guard, ContractPresent):
        return {"kind": "contract", "contract": guard.contract}
    raise TypeError(f"not a guard: {guard!r}")


def step_to_dict(step) -> dict:
    data = {"kind": step_kind(step)}
    if isinstance(step, ChangeTitleLevel):
        data["source"] = step.source
        data["new_level"] = step.new_level
        for name, value in (("outsourcer", step.outsourcer),
                            ("insourcer", step.insourcer),
                            ("third_party", step.third_party)):
            if value is not KEEP:
                data[name] = value
        return data
    if isinstance(step, AcquireSource):
        return {
            "kind": "acquire", "subunit": step.subunit, "source": step.source,
            "type": step.type_id, "level": step.level,
            "cost_profile": {c.value: float(a)
                             for c, a in sorted(step.cost_profile.items(),
                                                key=lambda kv: kv[0].value)},
            "advantage": {
                "valuable": step.advantage.valuable,
                "rare": step.advantage.rare,
                "inimitable": step.advantage.inimitable,
                "non_substitutable": step.advantage.non_substitutable,
            },
            "critical_for": step.critical_for,
        }
    if isinstance(step, SignContract):
        return {
            "kind": "sign", "contract": step.contract,
            "contract_kind": step.kind.value, "parties": list(step.parties),
            "covers": sorted(step.covers), "expiry": step.expiry,
        }
    if isinstance(step, CreateUnit):
        return {"kind": "create-unit", "unit": step.unit, "name": step.name,
                "mission": step.mission}
    for field_name, value in vars(step).items():
        data[field_name] = value
    return data


def plan_to_dict(plan: Plan) -> dict:
    scope = None
    if plan.scope is not None:
        scope = {
            "outsourcer": plan.scope.outsourcer,
            "outsourcing_subunit": plan.scope.outsourcing_subunit,
            "insourcer": plan.scope.insourcer,
            "insourcing_subunit": plan.scope.insourcing_subunit,
            "sources": sorted(plan.scope.sources),
        }
    return {
        "plan": plan.id,
        "equilibrium_ref": plan.equilibrium_ref,
        "scope": scope,
        "threads": [
            {
                "name": name,
                "steps": [
                    {"guard": guard_to_dict(g.guard),
                     "step": step_to_dict(g.step)}
                    for g in steps
                ],
            }
            for name, steps in plan.threads.items()
        ],
    }


def validation_to_dict(report: ValidationReport) -> dict:
    return {
        "ok": report.ok,
        "findings": [
            {"entity": f.entity, "rule": f.rule, "message": f.message}
            for f in report.findings
        ],
    }


def export_json(value) -> str:
    """Canonical JSON text for an equilibrium, plan, or report value."""
    if isinstance(value, SourcingEquilibrium):
        return canonical_json({"equilibrium": equilibrium_to_dict(value)})
    if isinstance(value, Plan):
        return canonical_json(plan_to_dict(value))
    if isinstance(value, TransformationReport):
        return canonical_json(value.to_dict())
    if isinstance(value, ValidationReport):
        return canonical_json(validation_to_dict(value))
    if isinstance(value, EvolutionStats):
        return canonical_json(value.to_dict())
    if isinstance(value, dict):
        return canonical_json(value)
    raise TypeError(f"no JSON export for {type(value).__name__}")

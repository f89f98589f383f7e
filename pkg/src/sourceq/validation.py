"""Structural validation of equilibrium snapshots.

validate_equilibrium never raises for content problems; it accumulates
findings so a caller can show all of them at once. A snapshot built through
EquilibriumBuilder always comes back clean.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (EXTERNAL, ContractKind, CostCategory, SourcingEquilibrium)
from .scales import INSOURCER, THIRD_PARTY


@dataclass(frozen=True)
class Finding:
    entity: str
    rule: str
    message: str

    def __str__(self):
        return f"[{self.rule}] {self.entity}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple

    @property
    def ok(self) -> bool:
        return not self.findings


def validate_equilibrium(eq: SourcingEquilibrium) -> ValidationReport:
    findings: list[Finding] = []

    def bad(entity: str, rule: str, message: str):
        findings.append(Finding(entity, rule, message))

    for uid, unit in eq.units.items():
        if unit.id != uid:
            bad(uid, "key-mismatch", f"unit keyed {uid!r} carries id {unit.id!r}")
        for sid in unit.subunit_ids:
            if sid not in eq.subunits:
                bad(uid, "dangling-reference", f"lists missing subunit {sid!r}")
            elif eq.subunits[sid].unit != uid:
                bad(uid, "cross-link", f"subunit {sid!r} claims parent "
                    f"{eq.subunits[sid].unit!r}")

    for sid, sub in eq.subunits.items():
        if sub.id != sid:
            bad(sid, "key-mismatch", f"subunit keyed {sid!r} carries id {sub.id!r}")
        if sub.unit not in eq.units:
            bad(sid, "dangling-reference", f"parent unit {sub.unit!r} missing")
        elif sid not in eq.units[sub.unit].subunit_ids:
            bad(sid, "cross-link", f"parent unit {sub.unit!r} does not list it")

    for src_id, src in eq.sources.items():
        if src.id != src_id:
            bad(src_id, "key-mismatch", "source keyed under a different id")
        if src.identity_critical_for is not None \
                and src.identity_critical_for not in eq.units:
            bad(src_id, "dangling-reference",
                f"identity-critical unit {src.identity_critical_for!r} missing")
        for cat, amount in src.cost_profile.items():
            if not isinstance(cat, CostCategory):
                bad(src_id, "cost-category", f"unknown cost category {cat!r}")
            elif amount < 0:
                bad(src_id, "cost-amount", f"negative cost for {cat.value}")

    for src_id, title in eq.titles.items():
        if title.source_id != src_id:
            bad(src_id, "key-mismatch", "title keyed under a different source id")
        if src_id not in eq.sources:
            bad(src_id, "dangling-reference", "title on a missing source")
            continue
        scale = eq.sources[src_id].type.scale
        if not 1 <= title.level <= scale.size:
            bad(src_id, "level-range",
                f"level {title.level} out of range 1..{scale.size}")
            continue
        lv = scale.level(title.level)
        if title.outsourcer_side not in eq.units:
            bad(src_id, "dangling-reference",
                f"outsourcer unit {title.outsourcer_side!r} missing")
        if title.insourcer_side is not None and title.insourcer_side not in eq.units:
            bad(src_id, "dangling-reference",
                f"insourcer unit {title.insourcer_side!r} missing")
        if title.third_party is not None and title.third_party not in eq.units:
            bad(src_id, "dangling-reference",
                f"third-party unit {title.third_party!r} missing")
        if lv.mentions(INSOURCER) and title.insourcer_side is None:
            bad(src_id, "slot-missing",
                f"level {title.level} names the insourcer slot")
        if lv.mentions(THIRD_PARTY) and title.third_party is None:
            bad(src_id, "slot-missing",
                f"level {title.level} names the third-party slot")
        if not lv.mentions(THIRD_PARTY) and title.third_party is not None:
            bad(src_id, "slot-extra",
                f"level {title.level} does not name a third party")
        if title.using_subunit not in eq.subunits:
            bad(src_id, "dangling-reference",
                f"using subunit {title.using_subunit!r} missing")
        else:
            user_unit = eq.subunits[title.using_subunit].unit
            expected = (title.outsourcer_side if scale.outsourcer_half(title.level)
                        else title.insourcer_side)
            if expected is not None and user_unit != expected:
                bad(src_id, "using-side",
                    f"level {title.level} places use with {expected!r}, but "
                    f"{title.using_subunit!r} belongs to {user_unit!r}")

    for svc_id, edge in eq.service_edges.items():
        if edge.service_id != svc_id:
            bad(svc_id, "key-mismatch", "service edge keyed under a different id")
        if edge.provider not in eq.subunits:
            bad(svc_id, "dangling-reference",
                f"provider subunit {edge.provider!r} missing")
        if edge.consumer != EXTERNAL and edge.consumer not in eq.units \
                and edge.consumer not in eq.subunits:
            bad(svc_id, "dangling-reference", f"consumer {edge.consumer!r} missing")
        if edge.volume < 0:
            bad(svc_id, "volume", "negative service volume")

    for key, edge in eq.money_edges.items():
        name = f"{edge.payer}->{edge.payee}"
        if key != (edge.payer, edge.payee):
            bad(name, "key-mismatch", "money edge keyed under a different pair")
        if edge.payer not in eq.units:
            bad(name, "dangling-reference", f"payer unit {edge.payer!r} missing")
        if edge.payee not in eq.units:
            bad(name, "dangling-reference", f"payee unit {edge.payee!r} missing")
        if edge.payer == edge.payee:
            bad(name, "self-payment", "money edges need distinct endpoints")
        if edge.amount < 0:
            bad(name, "amount", "negative money amount")

    for cid, contract in eq.contracts.items():
        if contract.id != cid:
            bad(cid, "key-mismatch", "contract keyed under a different id")
        if len(contract.parties) != 2 or contract.parties[0] == contract.parties[1]:
            bad(cid, "parties", "contracts bind exactly two distinct parties")
        for p in contract.parties:
            if p not in eq.units:
                bad(cid, "dangling-reference", f"party unit {p!r} missing")
        for s in contract.covered_services:
            if s not in eq.service_edges:
                bad(cid, "dangling-reference", f"covers missing service {s!r}")
        if contract.kind is ContractKind.TARGET_SERVICE_PROVISION \
                and not contract.covered_services:
            bad(cid, "coverage", "target service provision covers no service")

    return ValidationReport(tuple(findings))

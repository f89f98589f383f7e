"""Canonical serialization of snapshots.

One byte-stable JSON form per equilibrium value: entity lists sorted by id,
keys sorted, reals rounded to 12 significant digits. Equal snapshots produce
identical bytes, which is what the interleaving oracle and the exporters key
on.
"""

from __future__ import annotations

import json

from .model import SourcingEquilibrium


def _round_floats(value):
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_floats(v) for v in value]
    return value


def canonical_json(data) -> str:
    """Deterministic JSON text for a plain dict/list tree."""
    return json.dumps(_round_floats(data), sort_keys=True, indent=2) + "\n"


def equilibrium_to_dict(eq: SourcingEquilibrium) -> dict:
    units = [
        {
            "id": u.id,
            "name": u.name,
            "mission": u.mission,
            "subunits": sorted(u.subunit_ids),
        }
        for u in sorted(eq.units.values(), key=lambda u: u.id)
    ]
    subunits = [
        {"id": s.id, "unit": s.unit}
        for s in sorted(eq.subunits.values(), key=lambda s: s.id)
    ]
    sources = [
        {
            "id": s.id,
            "type": s.type.id,
            "cost_profile": {c.value: float(a) for c, a in sorted(
                s.cost_profile.items(), key=lambda kv: kv[0].value)},
            "advantage": {
                "valuable": s.advantage.valuable,
                "rare": s.advantage.rare,
                "inimitable": s.advantage.inimitable,
                "non_substitutable": s.advantage.non_substitutable,
            },
            "identity_critical_for": s.identity_critical_for,
        }
        for s in sorted(eq.sources.values(), key=lambda s: s.id)
    ]
    titles = [
        {
            "source": t.source_id,
            "level": t.level,
            "outsourcer_side": t.outsourcer_side,
            "insourcer_side": t.insourcer_side,
            "third_party": t.third_party,
            "using_subunit": t.using_subunit,
        }
        for t in sorted(eq.titles.values(), key=lambda t: t.source_id)
    ]
    services = [
        {
            "service": e.service_id,
            "provider": e.provider,
            "consumer": e.consumer,
            "volume": float(e.volume),
        }
        for e in sorted(eq.service_edges.values(), key=lambda e: e.service_id)
    ]
    money = [
        {"payer": e.payer, "payee": e.payee, "amount": float(e.amount)}
        for e in sorted(eq.money_edges.values(), key=lambda e: (e.payer, e.payee))
    ]
    contracts = [
        {
            "id": c.id,
            "kind": c.kind.value,
            "parties": list(c.parties),
            "covers": sorted(c.covered_services),
            "expiry": c.expiry,
        }
        for c in sorted(eq.contracts.values(), key=lambda c: c.id)
    ]
    return {
        "logical_time": eq.logical_time,
        "units": units,
        "subunits": subunits,
        "sources": sources,
        "titles": titles,
        "service_edges": services,
        "money_edges": money,
        "contracts": contracts,
    }


def canonical_equilibrium(eq: SourcingEquilibrium) -> str:
    """The byte-stable form used for snapshot identity."""
    return canonical_json(equilibrium_to_dict(eq))

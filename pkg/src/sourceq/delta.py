"""Structural deltas between two equilibrium snapshots.

diff produces, per entity kind, the additions, removals, and replacements
needed to turn the first snapshot into the second; apply_delta replays them.
The two functions are exact inverses: apply_delta(before, diff(before,
after)) == after.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import SourcingEquilibrium

#: Entity-kind attribute names, in presentation order.
KINDS = ("units", "subunits", "sources", "titles", "service_edges",
         "money_edges", "contracts")


@dataclass(frozen=True)
class KindDelta:
    added: dict = field(default_factory=dict)
    removed: tuple = ()
    changed: dict = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return not (self.added or self.removed or self.changed)


@dataclass(frozen=True)
class EquilibriumDelta:
    kinds: dict
    logical_time: int

    def __getitem__(self, kind: str) -> KindDelta:
        return self.kinds[kind]

    @property
    def empty(self) -> bool:
        """True when no entity changed (logical time may still have moved)."""
        return all(kd.empty for kd in self.kinds.values())

    def counts(self) -> dict:
        return {
            kind: {"added": len(kd.added), "removed": len(kd.removed),
                   "changed": len(kd.changed)}
            for kind, kd in self.kinds.items() if not kd.empty
        }


def diff(before: SourcingEquilibrium, after: SourcingEquilibrium) -> EquilibriumDelta:
    kinds = {}
    for kind in KINDS:
        old: dict = getattr(before, kind)
        new: dict = getattr(after, kind)
        added = {k: v for k, v in new.items() if k not in old}
        removed = tuple(sorted(k for k in old if k not in new))
        changed = {k: v for k, v in new.items() if k in old and old[k] != v}
        kinds[kind] = KindDelta(added=added, removed=removed, changed=changed)
    return EquilibriumDelta(kinds=kinds, logical_time=after.logical_time)


def apply_delta(before: SourcingEquilibrium,
                delta: EquilibriumDelta) -> SourcingEquilibrium:
    changes = {}
    for kind in KINDS:
        kd = delta[kind]
        if kd.empty:
            continue
        table = dict(getattr(before, kind))
        for k in kd.removed:
            table.pop(k, None)
        table.update(kd.added)
        table.update(kd.changed)
        changes[kind] = table
    changes["logical_time"] = delta.logical_time
    return before.replace(**changes)

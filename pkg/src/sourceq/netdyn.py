"""Unit-level network view and seeded evolution dynamics.

The network collapses an equilibrium to units: node weight is the unit's
total absolute title weight, edges are inter-unit service provisions and
money streams. evolve grows such a world by sampling small, always
classifiable transformations (single-source transfers with their service and
fee) under a counterparty-selection policy, so hub formation can be compared
across policies.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientData, PolicyExhausted
from .model import CostCategory, SourcingEquilibrium, EquilibriumBuilder
from .steps import (CreateSubunit, CreateUnit, FinancialTransfer, MoveService,
                    Progression, TransferTitle, TransformationScope,
                    apply_progression)
from .transform import HistoryRecord, classify, partition_sources
from .valuation import WeightTable, default_weight_table, signed_weight

#: Sentinel for a degree sequence the estimator refuses to call power-law.
NOT_POWER_LAW = float("inf")


@dataclass(frozen=True)
class NetEdge:
    src: str
    dst: str
    kind: str
    label: str
    volume: float


@dataclass(frozen=True)
class UnitNetwork:
    nodes: dict
    edges: tuple

    def in_degrees(self) -> Counter:
        counts = Counter({u: 0 for u in self.nodes})
        counts.update(e.dst for e in self.edges)
        return counts

    def out_degrees(self) -> Counter:
        counts = Counter({u: 0 for u in self.nodes})
        counts.update(e.src for e in self.edges)
        return counts


def to_network(eq: SourcingEquilibrium,
               table: WeightTable | None = None) -> UnitNetwork:
    """Units as weighted nodes; inter-unit service and money edges."""
    table = table or default_weight_table()
    weights = {unit_id: 0.0 for unit_id in eq.units}
    for source_id, title in eq.titles.items():
        for unit_id in (title.outsourcer_side, title.insourcer_side):
            if unit_id is None or unit_id not in weights:
                continue
            weights[unit_id] += abs(signed_weight(unit_id, source_id, eq,
                                                  table))
    edges = []
    for edge in sorted(eq.service_edges.values(), key=lambda e: e.service_id):
        provider_unit = eq.subunits[edge.provider].unit
        consumer_unit = eq.unit_of_consumer(edge.consumer)
        if consumer_unit is None or consumer_unit == provider_unit:
            continue
        edges.append(NetEdge(provider_unit, consumer_unit, "service",
                             edge.service_id, edge.volume))
    for key in sorted(eq.money_edges):
        money = eq.money_edges[key]
        edges.append(NetEdge(money.payer, money.payee, "money",
                             f"{money.payer}->{money.payee}", money.amount))
    return UnitNetwork(nodes=weights, edges=tuple(edges))


def _mle_alpha(values, kmin) -> float:
    denominator = sum(math.log(v / (kmin - 0.5)) for v in values)
    if denominator <= 0.0:
        return NOT_POWER_LAW
    return 1.0 + len(values) / denominator


def powerlaw_alpha(degrees, kmin: int = 1) -> float:
    """Discrete power-law exponent by maximum likelihood.

    Uses the continuous approximation with the half-step offset:
    alpha = 1 + m / sum(ln(d_i / (kmin - 0.5))) over the m degrees >= kmin.
    Raises InsufficientData below 10 observations; returns the NOT_POWER_LAW
    sentinel when the log sum degenerates to zero.
    """
    if kmin < 1:
        raise ValueError("kmin must be at least 1")
    tail = [d for d in degrees if d >= kmin]
    if len(tail) < 10:
        raise InsufficientData(
            f"need at least 10 degrees >= {kmin}, got {len(tail)}")
    return _mle_alpha(tail, kmin)


def loglog_fit_residual(degree_counts: Counter) -> float | None:
    """Mean squared residual of a line through the log-log degree histogram."""
    points = [(math.log(d), math.log(c))
              for d, c in degree_counts.items() if d >= 1 and c >= 1]
    if len(points) < 3:
        return None
    xs = np.array([p[0] for p in points])
    ys = np.array([p[1] for p in points])
    slope, intercept = np.polyfit(xs, ys, 1)
    return float(np.mean((ys - (slope * xs + intercept)) ** 2))


# -- policies ------------------------------------------------------------------

#: Default transformation mix: mostly plain outsourcing, some greenfield
#: spin-ups, a steady trickle of follow-up moves.
DEFAULT_MIX = {"outsource": 0.6, "greenfield": 0.1, "followup": 0.3}


def _checked_mix(mix: dict) -> dict:
    unknown = set(mix) - {"outsource", "greenfield", "followup"}
    if unknown:
        raise ValueError(f"unknown transformation kinds in mix: {sorted(unknown)}")
    total = sum(mix.values())
    if total <= 0:
        raise ValueError("transformation mix must have positive total weight")
    return {k: v / total for k, v in mix.items()}


@dataclass(frozen=True)
class UniformRandom:
    mix: dict = field(default_factory=lambda: dict(DEFAULT_MIX))
    name: str = "uniform"

    def pick_target(self, rng, acting: str, candidates, eq, table):
        return rng.choice(candidates)


@dataclass(frozen=True)
class PreferentialAttachment:
    """Counterparties are drawn proportional to (in-degree + 1)^exponent."""

    exponent: float = 1.0
    mix: dict = field(default_factory=lambda: dict(DEFAULT_MIX))

    @property
    def name(self) -> str:
        return f"preferential({self.exponent:g})"

    def pick_target(self, rng, acting: str, candidates, eq, table):
        indegree = to_network(eq, table).in_degrees()
        weights = [(indegree.get(u, 0) + 1.0) ** self.exponent
                   for u in candidates]
        return rng.choices(candidates, weights=weights, k=1)[0]


@dataclass(frozen=True)
class WeightAssortative:
    """Prefer heavier counterparties of comparable size: pick the unit of
    weight at least the acting unit's with the smallest gap."""

    mix: dict = field(default_factory=lambda: dict(DEFAULT_MIX))
    name: str = "assortative"

    def pick_target(self, rng, acting: str, candidates, eq, table):
        weights = to_network(eq, table).nodes
        own = weights.get(acting, 0.0)
        at_least = [u for u in candidates if weights.get(u, 0.0) >= own]
        if at_least:
            gap = min(weights[u] - own for u in at_least)
            closest = [u for u in at_least if weights[u] - own == gap]
            return rng.choice(closest)
        heaviest = max(weights.get(u, 0.0) for u in candidates)
        return rng.choice([u for u in candidates
                           if weights.get(u, 0.0) == heaviest])


# -- synthetic worlds ----------------------------------------------------------

_SYNTH_TYPES = ("persons", "tools", "ipr", "knowledge")

#: Flat per-period fee attached to every outsourced service stream.
SERVICE_FEE = 1.0


def synthesize_equilibrium(n_units: int, sources_per_unit: int = 3,
                           seed: int = 0) -> SourcingEquilibrium:
    """A fully internal starting world: every unit works for itself."""
    if n_units < 2:
        raise ValueError("a network needs at least 2 units")
    rng = random.Random(f"synth:{seed}")
    builder = EquilibriumBuilder()
    for i in range(1, n_units + 1):
        unit_id = f"u{i:04d}"
        sub_id = f"{unit_id}_ops"
        builder.add_unit(unit_id)
        builder.add_subunit(unit_id, sub_id)
        for k in range(sources_per_unit):
            source_id = f"{unit_id}_s{k + 1}"
            type_id = _SYNTH_TYPES[(i + k) % len(_SYNTH_TYPES)]
            level = rng.choice((1, 2)) if type_id == "persons" else 1
            builder.add_source(
                source_id, type_id, level=level, using=sub_id,
                cost={CostCategory.OPERATIONAL: float(rng.randint(1, 9))})
            builder.add_service(f"svc_{source_id}", sub_id, unit_id,
                                float(rng.randint(1, 10)))
    return builder.build()


# -- evolution -----------------------------------------------------------------

@dataclass(frozen=True)
class Checkpoint:
    step: int
    n_units: int
    n_edges: int
    in_degree_hist: dict
    out_degree_hist: dict
    weight_min: float
    weight_mean: float
    weight_max: float
    alpha: float | None
    fit_residual: float | None
    classifications: dict


@dataclass(frozen=True)
class EvolutionStats:
    policy: str
    seed: int
    steps: int
    checkpoints: tuple
    classifications: dict

    def final_alpha(self) -> float | None:
        return self.checkpoints[-1].alpha if self.checkpoints else None

    def max_in_degree(self) -> int:
        if not self.checkpoints:
            return 0
        hist = self.checkpoints[-1].in_degree_hist
        return max(hist) if hist else 0

    def to_dict(self) -> dict:
        return {
            "policy": self.policy,
            "seed": self.seed,
            "steps": self.steps,
            "classifications": dict(sorted(self.classifications.items())),
            "checkpoints": [
                {
                    "step": c.step,
                    "n_units": c.n_units,
                    "n_edges": c.n_edges,
                    "in_degree_hist": {str(k): v for k, v in
                                       sorted(c.in_degree_hist.items())},
                    "out_degree_hist": {str(k): v for k, v in
                                        sorted(c.out_degree_hist.items())},
                    "weight_min": c.weight_min,
                    "weight_mean": c.weight_mean,
                    "weight_max": c.weight_max,
                    "alpha": c.alpha,
                    "fit_residual": c.fit_residual,
                    "classifications": dict(sorted(c.classifications.items())),
                }
                for c in self.checkpoints
            ],
        }

    def to_csv(self) -> str:
        header = ("step,n_units,n_edges,max_in_degree,weight_min,weight_mean,"
                  "weight_max,alpha,fit_residual")
        rows = [header]
        for c in self.checkpoints:
            max_in = max(c.in_degree_hist) if c.in_degree_hist else 0
            alpha = "" if c.alpha is None else f"{c.alpha:.6g}"
            residual = "" if c.fit_residual is None else f"{c.fit_residual:.6g}"
            rows.append(f"{c.step},{c.n_units},{c.n_edges},{max_in},"
                        f"{c.weight_min:.6g},{c.weight_mean:.6g},"
                        f"{c.weight_max:.6g},{alpha},{residual}")
        return "\n".join(rows) + "\n"


def _first_subunit(eq: SourcingEquilibrium, unit_id: str) -> str:
    subs = sorted(s.id for s in eq.subunits_of(unit_id))
    return subs[0]


def _outsourceable(eq: SourcingEquilibrium):
    """Sources a holder could hand over: still on the holder's own side, with
    the matching service stream present to move along."""
    found = []
    for source_id in sorted(eq.titles):
        title = eq.titles[source_id]
        scale = eq.scale_of(source_id)
        if (scale.outsourcer_half(title.level)
                and f"svc_{source_id}" in eq.service_edges):
            found.append(source_id)
    return found


def _checkpoint(step: int, eq: SourcingEquilibrium, table: WeightTable,
                tally: Counter) -> Checkpoint:
    network = to_network(eq, table)
    indeg = network.in_degrees()
    outdeg = network.out_degrees()
    in_hist = Counter(indeg.values())
    out_hist = Counter(outdeg.values())
    node_weights = list(network.nodes.values()) or [0.0]
    try:
        alpha = powerlaw_alpha(list(indeg.values()), kmin=1)
        if alpha == NOT_POWER_LAW:
            alpha = None
    except InsufficientData:
        alpha = None
    return Checkpoint(
        step=step, n_units=len(network.nodes), n_edges=len(network.edges),
        in_degree_hist=dict(in_hist), out_degree_hist=dict(out_hist),
        weight_min=min(node_weights), weight_mean=float(np.mean(node_weights)),
        weight_max=max(node_weights),
        alpha=alpha, fit_residual=loglog_fit_residual(in_hist),
        classifications=dict(tally))


def evolve(eq: SourcingEquilibrium, policy, n_steps: int, seed: int = 0,
           checkpoint_every: int = 100,
           table: WeightTable | None = None) -> tuple:
    """Grow the world for n_steps sampled transformations.

    Deterministic for a given (policy, seed): one RNG drives every choice,
    and all candidate enumeration is in sorted order. Each sampled
    transformation is a minimal single-source progression (transfer, service
    move, fee), so its classification is always decidable; the per-step
    labels feed the checkpoint stats. Returns (final equilibrium,
    EvolutionStats).
    """
    if n_steps < 1:
        raise ValueError("n_steps must be positive")
    if checkpoint_every < 1:
        raise ValueError("checkpoint_every must be positive")
    table = table or default_weight_table()
    mix = _checked_mix(policy.mix)
    rng = random.Random(f"evolve:{seed}")
    history: list[HistoryRecord] = []
    followable: set[str] = set()
    tally: Counter = Counter()
    checkpoints = []
    current = eq
    created = 0

    for step_no in range(1, n_steps + 1):
        outsourceable = _outsourceable(current)
        hosts = {sub.unit for sub in current.subunits.values()}
        kinds, weights = [], []
        for kind in ("outsource", "greenfield", "followup"):
            if mix.get(kind, 0.0) <= 0:
                continue
            pool = followable if kind == "followup" else outsourceable
            if pool:
                kinds.append(kind)
                weights.append(mix[kind])
        if not kinds:
            raise PolicyExhausted(
                f"no legal transformation at step {step_no}")
        kind = rng.choices(kinds, weights=weights, k=1)[0]

        if kind == "followup":
            source_id = rng.choice(sorted(followable))
            title = current.titles[source_id]
            holder = current.subunits[title.using_subunit].unit
            home = title.outsourcer_side
            candidates = sorted(u for u in hosts if u != holder)
            if not candidates:
                raise PolicyExhausted(
                    f"no counterparty for follow-up at step {step_no}")
            target = policy.pick_target(rng, holder, candidates, current, table)
            scale = current.scale_of(source_id)
            if target == home:
                new_level = scale.size + 1 - title.level
            else:
                new_level = title.level
            target_sub = _first_subunit(current, target)
            steps = [TransferTitle(source_id, target_sub, new_level),
                     MoveService(f"svc_{source_id}", target_sub),
                     FinancialTransfer(holder, home, SERVICE_FEE)]
            if target != home:
                steps.append(FinancialTransfer(home, target, SERVICE_FEE))
            scope = TransformationScope(
                outsourcer=holder, outsourcing_subunit=title.using_subunit,
                insourcer=target, insourcing_subunit=target_sub,
                sources=frozenset({source_id}))
        else:
            source_id = rng.choice(outsourceable)
            title = current.titles[source_id]
            acting = current.subunits[title.using_subunit].unit
            if kind == "greenfield":
                created += 1
                target = f"g{created:04d}_{seed}"
                target_sub = f"{target}_ops"
                prefix = [CreateUnit(target), CreateSubunit(target, target_sub)]
            else:
                candidates = sorted(u for u in hosts if u != acting)
                if not candidates:
                    raise PolicyExhausted(
                        f"no counterparty for outsourcing at step {step_no}")
                target = policy.pick_target(rng, acting, candidates, current,
                                            table)
                target_sub = _first_subunit(current, target)
                prefix = []
            scale = current.scale_of(source_id)
            mirror = scale.size + 1 - title.level
            steps = prefix + [
                TransferTitle(source_id, target_sub, mirror),
                MoveService(f"svc_{source_id}", target_sub),
                FinancialTransfer(acting, target, SERVICE_FEE)]
            scope = TransformationScope(
                outsourcer=acting, outsourcing_subunit=title.using_subunit,
                insourcer=target, insourcing_subunit=target_sub,
                sources=frozenset({source_id}))

        progression = Progression(steps=tuple(steps), scope=scope)
        after, _ = apply_progression(current, progression)
        label = classify(current, progression, after, history=history,
                         table=table)
        partition = partition_sources(current, after, scope)
        history.append(HistoryRecord(
            outsourcer=scope.outsourcer,
            outsourcing_subunit=scope.outsourcing_subunit,
            insourcer=scope.insourcer,
            insourcing_subunit=scope.insourcing_subunit,
            properly_outsourced=partition.properly_outsourced,
            unsourced=partition.unsourced,
            classification=label.value))
        tally[label.value] += 1
        new_title = after.titles[source_id]
        if after.scale_of(source_id).outsourcer_half(new_title.level):
            followable.discard(source_id)
        else:
            followable.add(source_id)
        current = after

        if step_no % checkpoint_every == 0 or step_no == n_steps:
            checkpoints.append(_checkpoint(step_no, current, table, tally))

    stats = EvolutionStats(policy=policy.name, seed=seed, steps=n_steps,
                           checkpoints=tuple(checkpoints),
                           classifications=dict(tally))
    return current, stats

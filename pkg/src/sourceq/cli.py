"""Command-line front end.

Exit codes follow one contract everywhere: 0 for domain success, 1 for a
domain-level failure (validation findings, halted plans, unknown unit,
exhausted policy), 2 for input failures (unreadable files, syntax errors,
bad flag values).
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass

import click

from .catalog import builtin_source_types
from .dsl import ParseResult, parse_equilibrium, parse_plan
from .errors import (MissingBenchmark, NoServices, NoSourcesOfType,
                     PolicyExhausted)
from .jsonio import export_json
from .model import CostCategory, SourcingEquilibrium
from .netdyn import (PreferentialAttachment, UniformRandom, WeightAssortative,
                     evolve, synthesize_equilibrium)
from .planning import Plan, RoundRobin, SeededRandom, Status, execute
from .steps import Progression
from .transform import PostcondConfig, analyze_progression
from .validation import Finding, ValidationReport
from .valuation import (Benchmark, WeightTable, cost_estimate,
                        default_weight_table, degree_internal_abs,
                        degree_internal_rel, service_provision_degrees)


@dataclass(frozen=True)
class CliConfig:
    table: WeightTable
    benchmark: Benchmark | None
    theta: float
    growth_reading: bool
    fmt: str
    seed: int

    @property
    def postcond(self) -> PostcondConfig:
        return PostcondConfig(theta=self.theta,
                              growth_reading=self.growth_reading)


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise click.ClickException(f"cannot read {path}: {exc.strerror}") from exc


def _print_diagnostics(path: str, result: ParseResult) -> None:
    for diag in result.diagnostics:
        click.echo(f"{path}:{diag}", err=True)


def _load_equilibrium(path: str) -> SourcingEquilibrium:
    result = parse_equilibrium(_read_file(path))
    if not result.ok:
        _print_diagnostics(path, result)
        sys.exit(2)
    return result.value


def _load_plan(path: str) -> Plan:
    result = parse_plan(_read_file(path))
    if not result.ok:
        _print_diagnostics(path, result)
        sys.exit(2)
    return result.value


@click.group()
@click.option("--weights", type=click.Path(), default=None,
              help="JSON file with a weight table overriding the default.")
@click.option("--benchmark", type=click.Path(), default=None,
              help="JSON file with market-segment external proportions.")
@click.option("--theta", type=float, default=0.25, show_default=True,
              help="Postcondition weight-shedding factor, in (0, 1).")
@click.option("--literal-postcond3", is_flag=True, default=False,
              help="Compare the insourcer's growth against the outsourcer's "
                   "original weight instead of requiring growth.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]),
              default="text", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def main(ctx, weights, benchmark, theta, literal_postcond3, fmt, seed):
    """Sourcing-equilibrium tooling: validate, classify, measure, run, grow."""
    if not 0.0 < theta < 1.0:
        raise click.UsageError("--theta must lie strictly between 0 and 1")
    table = default_weight_table()
    if weights is not None:
        try:
            table = WeightTable.from_dict(json.loads(_read_file(weights)))
        except (ValueError, KeyError) as exc:
            raise click.UsageError(f"bad weight table {weights}: {exc}")
    bench = None
    if benchmark is not None:
        try:
            bench = Benchmark.from_dict(json.loads(_read_file(benchmark)))
        except (ValueError, KeyError) as exc:
            raise click.UsageError(f"bad benchmark file {benchmark}: {exc}")
    ctx.obj = CliConfig(table=table, benchmark=bench, theta=theta,
                        growth_reading=not literal_postcond3, fmt=fmt,
                        seed=seed)


@main.command()
@click.argument("eq_file", type=click.Path())
@click.pass_obj
def validate(config: CliConfig, eq_file):
    """Check an equilibrium document; exit 0 only on zero findings."""
    result = parse_equilibrium(_read_file(eq_file))
    if not result.syntax_ok:
        _print_diagnostics(eq_file, result)
        sys.exit(2)
    errors = [d for d in result.diagnostics if d.severity == "error"]
    findings = [Finding(entity=d.token or eq_file, rule="document",
                        message=d.message) for d in errors]
    report = ValidationReport(findings=tuple(findings))
    if config.fmt == "json":
        click.echo(export_json(report), nl=False)
    else:
        for diag in errors:
            click.echo(f"{eq_file}:{diag}")
        click.echo(f"{'ok' if report.ok else 'invalid'}: {eq_file} "
                   f"({len(findings)} finding(s))")
    sys.exit(0 if report.ok else 1)


def _progression_from_plan(before, plan: Plan, config: CliConfig):
    """Run the plan to completion and linearize it in executed order."""
    state_eq, state = execute(before, plan, RoundRobin())
    if state.status is not Status.COMPLETED:
        reason = state.halt.reason if state.halt else state.status.value
        return None, state_eq, state, reason
    ordered = []
    for record in state.trace:
        if record.outcome != "applied":
            continue
        ordered.append(plan.threads[record.thread][record.step_index - 1].step)
    return Progression(steps=tuple(ordered), scope=plan.scope), state_eq, state, None


@main.command()
@click.argument("before_file", type=click.Path())
@click.argument("plan_file", type=click.Path())
@click.option("--history", "history_file", type=click.Path(), default=None,
              help="JSON list of earlier transformation reports.")
@click.pass_obj
def classify(config: CliConfig, before_file, plan_file, history_file):
    """Apply a plan and report pre/post checks, partition, classification."""
    before = _load_equilibrium(before_file)
    plan = _load_plan(plan_file)
    if plan.scope is None:
        raise click.UsageError(f"{plan_file}: plan declares no scope(...)")
    history = []
    if history_file is not None:
        try:
            history = json.loads(_read_file(history_file))
        except ValueError as exc:
            raise click.UsageError(f"bad history file {history_file}: {exc}")
        if isinstance(history, dict):
            history = [history]
    progression, after, state, halt_reason = _progression_from_plan(
        before, plan, config)
    if progression is None:
        click.echo(f"halted: {halt_reason}", err=True)
        sys.exit(1)
    _, report = analyze_progression(before, progression, history=history,
                                    table=config.table, config=config.postcond)
    if config.fmt == "json":
        click.echo(export_json(report), nl=False)
    else:
        data = report.to_dict()
        click.echo(f"classification: {data['classification']}")
        click.echo(f"insourcing reading: {data['insourcing_reading']}")
        post = data["postcondition"]
        click.echo(f"precondition: {'pass' if data['precondition']['ok'] else 'fail'}"
                   + (f" (blockers: {', '.join(data['precondition']['blockers'])})"
                      if data["precondition"]["blockers"] else ""))
        click.echo(f"postcondition: {'pass' if post['passed'] else 'fail'} "
                   f"(weight {post['weight_before']:g} -> {post['weight_after']:g},"
                   f" theta {post['theta']:g})")
        part = data["partition"]
        for bucket in ("properly_outsourced", "unsourced", "acquired", "retained"):
            click.echo(f"  {bucket}: {', '.join(part[bucket]) or '-'}")
        click.echo(f"reversibility: {data['reversibility']}")
        click.echo(f"portfolio preserved: {data['portfolio']['preserved']}")
    sys.exit(0)


def _degree_cell(value) -> str:
    return "n/a" if value is None else f"{value:.4f}"


@main.command()
@click.argument("eq_file", type=click.Path())
@click.argument("unit", type=str)
@click.pass_obj
def metrics(config: CliConfig, eq_file, unit):
    """Cost breakdown and internal-degree table for one unit."""
    eq = _load_equilibrium(eq_file)
    if unit not in eq.units:
        click.echo(f"unknown unit {unit!r}", err=True)
        sys.exit(1)
    costs = {}
    for sub in sorted(s.id for s in eq.subunits_of(unit)):
        breakdown = cost_estimate(sub, eq)
        costs[sub] = {cat.value: breakdown.get(cat) for cat in CostCategory}
        costs[sub]["total"] = breakdown.total
    degrees = {}
    for type_id in sorted(builtin_source_types()):
        row: dict = {}
        try:
            row["abs"] = degree_internal_abs(unit, type_id, eq, config.table)
        except NoSourcesOfType:
            row["abs"] = None
        row["rel"] = None
        if config.benchmark is not None and row["abs"] is not None:
            try:
                rel = degree_internal_rel(unit, type_id, eq, config.table,
                                          config.benchmark)
                row["rel"] = "inf" if rel == float("inf") else rel
            except (NoSourcesOfType, MissingBenchmark):
                row["rel"] = None
        degrees[type_id] = row
    try:
        sd = service_provision_degrees(unit, eq)
        services = {"internal_volume": sd.internal_volume,
                    "external_volume": sd.external_volume,
                    "degree_internal": sd.degree_internal}
    except NoServices:
        services = None
    if config.fmt == "json":
        click.echo(export_json({"unit": unit, "costs": costs,
                                "internal_degrees": degrees,
                                "services": services}), nl=False)
        sys.exit(0)
    click.echo(f"unit {unit}")
    for sub, row in costs.items():
        parts = [f"{cat.value}={row[cat.value]:g}" for cat in CostCategory
                 if row[cat.value]]
        click.echo(f"  cost {sub}: total={row['total']:g}"
                   + (" (" + " ".join(parts) + ")" if parts else ""))
    click.echo("  internal degrees (abs/rel):")
    for type_id, row in degrees.items():
        rel = row["rel"]
        rel_text = "n/a" if rel is None else (
            rel if isinstance(rel, str) else f"{rel:.4f}")
        click.echo(f"    {type_id}: {_degree_cell(row['abs'])} / {rel_text}")
    if services is None:
        click.echo("  service degree: n/a")
    else:
        click.echo(f"  service degree: {services['degree_internal']:.4f} "
                   f"(internal {services['internal_volume']:g}, "
                   f"external {services['external_volume']:g})")
    sys.exit(0)


@main.command("run-plan")
@click.argument("plan_file", type=click.Path())
@click.option("--equilibrium", "eq_file", type=click.Path(), default=None,
              help="Equilibrium document; defaults to the plan's use path.")
@click.option("--strategy", type=click.Choice(["round-robin", "random"]),
              default="round-robin", show_default=True)
@click.pass_obj
def run_plan(config: CliConfig, plan_file, eq_file, strategy):
    """Execute a plan, one JSON line per scheduling turn."""
    plan = _load_plan(plan_file)
    if eq_file is None:
        if plan.equilibrium_ref is None:
            raise click.UsageError(
                f"{plan_file}: no use \"...\" declaration; pass --equilibrium")
        eq_file = os.path.join(os.path.dirname(plan_file) or ".",
                               plan.equilibrium_ref)
    before = _load_equilibrium(eq_file)
    scheduler = (RoundRobin() if strategy == "round-robin"
                 else SeededRandom(seed=config.seed))
    final_eq, state = execute(before, plan, scheduler)
    for record in state.trace:
        click.echo(json.dumps({
            "turn": record.turn, "thread": record.thread,
            "step_index": record.step_index, "kind": record.kind,
            "outcome": record.outcome, "logical_time": record.logical_time,
        }, sort_keys=True))
    summary = {"status": state.status.value, "turns": state.turn,
               "logical_time": final_eq.logical_time}
    if state.halt is not None:
        summary["halt_reason"] = state.halt.reason
    click.echo(json.dumps(summary, sort_keys=True))
    sys.exit(0 if state.status is Status.COMPLETED else 1)


_POLICIES = {"uniform": UniformRandom, "preferential": PreferentialAttachment,
             "assortative": WeightAssortative}


@main.command("evolve")
@click.option("--units", type=int, required=True,
              help="Number of units in the synthetic starting world.")
@click.option("--steps", type=int, required=True,
              help="Number of sampled transformations.")
@click.option("--policy", type=click.Choice(sorted(_POLICIES)),
              default="uniform", show_default=True)
@click.option("--exponent", type=float, default=1.0, show_default=True,
              help="Attachment exponent (preferential policy only).")
@click.option("--checkpoint", type=int, default=100, show_default=True,
              help="Statistics interval in steps.")
@click.option("--csv", "csv_path", type=click.Path(), default=None,
              help="Also write the checkpoint table as CSV.")
@click.pass_obj
def evolve_cmd(config: CliConfig, units, steps, policy, exponent, checkpoint,
               csv_path):
    """Grow a synthetic world and report degree/weight statistics."""
    if units < 2:
        raise click.UsageError("--units must be at least 2")
    if steps < 1:
        raise click.UsageError("--steps must be at least 1")
    if checkpoint < 1:
        raise click.UsageError("--checkpoint must be at least 1")
    if policy == "preferential":
        chosen = PreferentialAttachment(exponent=exponent)
    else:
        chosen = _POLICIES[policy]()
    world = synthesize_equilibrium(units, seed=config.seed)
    try:
        final_eq, stats = evolve(world, chosen, n_steps=steps,
                                 seed=config.seed, checkpoint_every=checkpoint,
                                 table=config.table)
    except PolicyExhausted as exc:
        click.echo(f"policy exhausted: {exc}", err=True)
        sys.exit(1)
    if csv_path is not None:
        with open(csv_path, "w", encoding="utf-8") as handle:
            handle.write(stats.to_csv())
    if config.fmt == "json":
        click.echo(export_json(stats), nl=False)
    else:
        last = stats.checkpoints[-1]
        click.echo(f"policy {stats.policy} seed {stats.seed}: "
                   f"{stats.steps} steps, {last.n_units} units, "
                   f"{last.n_edges} edges")
        alpha = "n/a" if last.alpha is None else f"{last.alpha:.4f}"
        click.echo(f"  max in-degree {max(last.in_degree_hist)}, alpha {alpha}")
        for label, count in sorted(stats.classifications.items()):
            click.echo(f"  {label}: {count}")
    sys.exit(0)


@main.command()
@click.argument("file", type=click.Path())
@click.pass_obj
def export(config: CliConfig, file):
    """Canonical JSON for an equilibrium (.meq) or plan (.mpl) document."""
    text = _read_file(file)
    if file.endswith(".mpl"):
        result = parse_plan(text)
    else:
        result = parse_equilibrium(text)
    if not result.ok:
        _print_diagnostics(file, result)
        sys.exit(2)
    click.echo(export_json(result.value), nl=False)
    sys.exit(0)


if __name__ == "__main__":
    main()

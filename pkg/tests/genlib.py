"""Seeded random generators for equilibria, progressions, and plans.

Everything here is deterministic given the random.Random instance passed in,
so failures reproduce from the seed alone. Generated equilibria always pass
validate_equilibrium; generated progressions apply cleanly to their paired
equilibrium by construction.
"""

import random

from sourceq import (AbandonTitle, AcquireSource, AdvantageFlags,
                     ChangeTitleLevel, ContractKind, ContractPresent,
                     CostCategory, CreateSubunit, CreateUnit, DissolveSubunit,
                     DissolveUnit, EntityExists, EquilibriumBuilder,
                     FinancialTransfer, GuardedStep, MoveService, Plan,
                     Progression, SignContract, TerminateContract,
                     TitleAtLevel, TransferTitle, TransformationScope,
                     builtin_source_types, get_source_type,
                     validate_equilibrium)

TYPE_IDS = tuple(sorted(builtin_source_types()))
NONFINANCIAL_TYPE_IDS = tuple(
    t for t in TYPE_IDS if not builtin_source_types()[t].financial)

_WORDS = ("alder", "birch", "cedar", "derby", "ember", "fjord", "gorse",
          "heron", "ingot", "joule", "kiosk", "lumen", "moss", "nadir",
          "orlop", "plinth", "quoin", "rafter", "sedge", "tarn")


def _ident(rng: random.Random, prefix: str, idx: int) -> str:
    word = rng.choice(_WORDS)
    sep = rng.choice(("_", "-", ""))
    return f"{prefix}{idx}{sep}{word}" if sep else f"{prefix}{idx}"


def _amount(rng: random.Random) -> float:
    return float(rng.randint(1, 200))


def safe_first_levels(type_id: str) -> tuple:
    """First-half levels that name neither principal's counterpart slot.

    Titles at these levels sit with the outsourcer and survive a transfer to
    the mirror level and back without slot residue.
    """
    scale = get_source_type(type_id).scale
    return tuple(level for level in range(1, scale.positive_count + 1)
                 if not scale.level(level).mentions("insourcer"))


def _bind_level(rng: random.Random, builder, units, source_id, type_id,
                using, owner_unit):
    """Pick a valid level and slot bindings for a new source in owner_unit."""
    scale = get_source_type(type_id).scale
    level = rng.randint(1, scale.positive_count)
    spec = scale.level(level)
    others = [u for u in units if u != owner_unit]
    insourcer = rng.choice(others) if spec.mentions("insourcer") else None
    third = rng.choice(others) if spec.mentions("third_party") else None
    kwargs = {}
    if insourcer:
        kwargs["insourcer"] = insourcer
    if third:
        kwargs["third_party"] = third
    if rng.random() < 0.4:
        kwargs["cost"] = {c: _amount(rng)
                          for c in rng.sample(list(CostCategory),
                                              rng.randint(1, 3))}
    if rng.random() < 0.25:
        kwargs["advantage"] = AdvantageFlags(*(rng.random() < 0.5
                                               for _ in range(4)))
    if rng.random() < 0.15:
        kwargs["critical_for"] = rng.choice(units)
    builder.add_source(source_id, type_id, level=level, using=using, **kwargs)


def random_equilibrium(rng: random.Random, max_units: int = 5,
                       max_sources: int = 12):
    """A valid world with names, slots, flags, costs, edges, and contracts."""
    builder = EquilibriumBuilder()
    n_units = rng.randint(2, max_units)
    units = []
    subunits = {}
    for i in range(n_units):
        uid = _ident(rng, "u", i)
        name = rng.choice(("", f"{rng.choice(_WORDS).title()} Group"))
        mission = rng.choice(("", "keeps the lights on",
                              'says "hello" to \\ everyone'))
        builder.add_unit(uid, name=name, mission=mission)
        units.append(uid)
        subunits[uid] = []
        for j in range(rng.randint(1 if i < 2 else 0, 2)):
            sid = _ident(rng, f"s{i}_", j)
            builder.add_subunit(uid, sid)
            subunits[uid].append(sid)
    all_subs = [(u, s) for u in units for s in subunits[u]]
    sources = []
    for k in range(rng.randint(1, max_sources)):
        owner, using = rng.choice(all_subs)
        src = _ident(rng, "src", k)
        _bind_level(rng, builder, units, src, rng.choice(TYPE_IDS),
                    using, owner)
        sources.append(src)
    for k in range(rng.randint(0, 2)):
        builder.add_untitled_source(
            _ident(rng, "loose", k), rng.choice(TYPE_IDS),
            cost={CostCategory.PRIOR_OBLIGATIONS: _amount(rng)}
            if rng.random() < 0.5 else None)
    services = []
    for k in range(rng.randint(0, 3)):
        _, provider = rng.choice(all_subs)
        consumer = rng.choice(["external", rng.choice(units),
                               rng.choice(all_subs)[1]])
        svc = _ident(rng, "svc", k)
        builder.add_service(svc, provider, consumer, _amount(rng))
        services.append(svc)
    if len(units) >= 2:
        for k in range(rng.randint(0, 2)):
            payer, payee = rng.sample(units, 2)
            builder.add_money(payer, payee, _amount(rng))
    for k in range(rng.randint(0, 2)):
        if len(units) < 2:
            break
        kind = rng.choice(list(ContractKind))
        covers = ()
        if kind is ContractKind.TARGET_SERVICE_PROVISION:
            if not services:
                kind = ContractKind.OTHER
            else:
                covers = rng.sample(services, rng.randint(1, len(services)))
        builder.add_contract(_ident(rng, "c", k), kind,
                             tuple(rng.sample(units, 2)), covers=covers,
                             expiry=rng.choice([None, rng.randint(1, 90)]))
    if rng.random() < 0.3:
        builder.set_time(rng.randint(1, 40))
    eq = builder.build()
    assert not validate_equilibrium(eq).findings
    return eq


# -- transfer scenarios (outsourcer A/B, insourcer X/Y) -----------------------

def _scoped_world(rng: random.Random, n_scope_sources: int,
                  type_pool=TYPE_IDS, extra_units: bool = True):
    """A/B and X/Y plus scope sources seeded in B at transfer-safe levels.

    Returns (builder-made equilibrium, scope source ids, service ids from B).
    """
    builder = EquilibriumBuilder()
    builder.add_unit("A", mission="runs the work itself")
    builder.add_unit("X")
    builder.add_subunit("A", "B")
    builder.add_subunit("A", "Ops")
    builder.add_subunit("X", "Y")
    units = ["A", "X"]
    if extra_units and rng.random() < 0.5:
        builder.add_unit("Lic")
        units.append("Lic")
    scope_sources = {}
    for k in range(n_scope_sources):
        type_id = rng.choice(type_pool)
        levels = safe_first_levels(type_id)
        level = rng.choice(levels)
        src = f"s{k}"
        kwargs = {}
        if get_source_type(type_id).scale.level(level).mentions("third_party"):
            if "Lic" not in units:
                builder.add_unit("Lic")
                units.append("Lic")
            kwargs["third_party"] = "Lic"
        if rng.random() < 0.5:
            kwargs["cost"] = {rng.choice(list(CostCategory)): _amount(rng)}
        builder.add_source(src, type_id, level=level, using="B", **kwargs)
        scope_sources[src] = (type_id, level)
    services = []
    for k in range(rng.randint(1, 3)):
        svc = f"svc{k}"
        builder.add_service(svc, "B", rng.choice(["Ops", "external"]),
                            _amount(rng))
        services.append(svc)
    return builder, scope_sources, services


SCOPE = TransformationScope(outsourcer="A", outsourcing_subunit="B",
                            insourcer="X", insourcing_subunit="Y",
                            sources=frozenset())


def transfer_case(rng: random.Random):
    """An equilibrium plus an invertible progression of up to six steps."""
    builder, scope_sources, services = _scoped_world(
        rng, rng.randint(1, 6))
    eq = builder.build()
    steps = []
    movable = dict(scope_sources)
    unmoved_services = list(services)
    n_steps = rng.randint(1, 6)
    sign_seq = 0
    while len(steps) < n_steps:
        kind = rng.choice(("transfer", "move", "pay", "sign"))
        if kind == "transfer" and movable:
            src = rng.choice(sorted(movable))
            type_id, level = movable.pop(src)
            size = get_source_type(type_id).scale.size
            steps.append(TransferTitle(src, "Y", size + 1 - level))
        elif kind == "move" and unmoved_services:
            svc = unmoved_services.pop(rng.randrange(len(unmoved_services)))
            steps.append(MoveService(svc, "Y"))
        elif kind == "pay":
            payer, payee = rng.choice((("A", "X"), ("X", "A")))
            steps.append(FinancialTransfer(payer, payee, _amount(rng)))
        elif kind == "sign":
            steps.append(SignContract(
                f"cg{sign_seq}",
                rng.choice((ContractKind.OTHER,
                            ContractKind.REVERSIBILITY_CLAUSE)),
                ("A", "X")))
            sign_seq += 1
    scope = TransformationScope("A", "B", "X", "Y",
                                frozenset(scope_sources))
    return eq, Progression(steps=tuple(steps), scope=scope)


def outsourcing_case(rng: random.Random):
    """A full unit-to-unit outsourcing of all of B's sources of one type.

    Returns (eq, progression, type_id). Every source of the chosen type that
    A holds a position on sits in B, inside scope, and is transferred. The
    financial type is excluded: the weight comparison in the posture check
    reads non-financial sources, so a finance-only scope cannot qualify.
    """
    type_id = rng.choice(NONFINANCIAL_TYPE_IDS)
    builder, scope_sources, services = _scoped_world(
        rng, rng.randint(1, 4), type_pool=(type_id,))
    # A second type in Ops keeps A's wider portfolio alive but out of scope.
    other = rng.choice([t for t in TYPE_IDS if t != type_id])
    builder.add_source("keeper", other, level=1, using="Ops")
    if rng.random() < 0.5:
        builder.add_unit("Peer")
        builder.add_subunit("Peer", "PeerOps")
        builder.add_source("peer_src", type_id, level=1, using="PeerOps")
    eq = builder.build()
    steps = []
    for src in sorted(scope_sources):
        t, level = scope_sources[src]
        size = get_source_type(t).scale.size
        steps.append(TransferTitle(src, "Y", size + 1 - level))
    steps.append(MoveService(services[0], "Y"))
    steps.append(FinancialTransfer("X", "A", _amount(rng)))
    scope = TransformationScope("A", "B", "X", "Y",
                                frozenset(scope_sources))
    return eq, Progression(steps=tuple(steps), scope=scope), type_id


def scale_invariance_case(rng: random.Random):
    """(eq, progression) pairs mixing passing and failing postconditions."""
    if rng.random() < 0.5:
        eq, progression, _ = outsourcing_case(rng)
        return eq, progression
    builder, scope_sources, services = _scoped_world(rng, rng.randint(2, 5))
    eq = builder.build()
    # Touch only some of the scope, or nothing of weight: clause 1 varies.
    chosen = sorted(scope_sources)[:rng.randint(0, 1)]
    steps = [TransferTitle(src, "Y",
                           get_source_type(scope_sources[src][0]).scale.size
                           + 1 - scope_sources[src][1])
             for src in chosen]
    steps.append(FinancialTransfer("A", "X", _amount(rng)))
    scope = TransformationScope("A", "B", "X", "Y",
                                frozenset(scope_sources))
    return eq, Progression(steps=tuple(steps), scope=scope)


# -- plans --------------------------------------------------------------------

def disjoint_plan_case(rng: random.Random):
    """A plan whose threads touch pairwise disjoint entities."""
    n_threads = rng.randint(2, 3)
    builder, scope_sources, services = _scoped_world(
        rng, n_threads * 3, extra_units=False)
    builder.add_unit("P1")
    builder.add_unit("P2")
    builder.add_contract("c_base", ContractKind.OTHER, ("A", "X"))
    eq = builder.build()
    source_pool = sorted(scope_sources)
    pay_pool = [("A", "X"), ("P1", "P2"), ("A", "P2"), ("X", "P1")]
    service_pool = list(services)
    rng.shuffle(source_pool)
    rng.shuffle(pay_pool)
    rng.shuffle(service_pool)
    threads = {}
    sign_seq = 0
    for t in range(n_threads):
        steps = []
        for _ in range(rng.randint(1, 3)):
            kind = rng.choice(("transfer", "abandon", "pay", "sign", "move"))
            if kind in ("transfer", "abandon") and source_pool:
                src = source_pool.pop()
                type_id, level = scope_sources[src]
                if kind == "transfer":
                    size = get_source_type(type_id).scale.size
                    step = TransferTitle(src, "Y", size + 1 - level)
                else:
                    step = AbandonTitle(src)
            elif kind == "pay" and pay_pool:
                payer, payee = pay_pool.pop()
                step = FinancialTransfer(payer, payee, _amount(rng))
            elif kind == "move" and service_pool:
                step = MoveService(service_pool.pop(), "Y")
            else:
                step = SignContract(f"cd{sign_seq}", ContractKind.OTHER,
                                    ("A", "X"))
                sign_seq += 1
            guard = None
            roll = rng.random()
            if roll < 0.2:
                guard = EntityExists("A")
            elif roll < 0.3:
                guard = ContractPresent("c_base")
            steps.append(GuardedStep(step, guard))
        threads[f"t{t}"] = tuple(steps)
    plan = Plan(id="disjoint", threads=threads,
                scope=TransformationScope("A", "B", "X", "Y",
                                          frozenset(scope_sources)))
    return eq, plan


def conflicting_plan_case(rng: random.Random, idx: int):
    """Threads racing on one source; at least two distinct outcomes."""
    builder, scope_sources, _ = _scoped_world(rng, 1, type_pool=("tools",),
                                              extra_units=False)
    builder.add_subunit("X", "Z")
    eq = builder.build()
    pattern = idx % 3
    if pattern == 0:
        threads = {
            "left": (GuardedStep(ChangeTitleLevel("s0", 1)),),
            "right": (GuardedStep(ChangeTitleLevel("s0", 3, insourcer="X")),),
        }
    elif pattern == 1:
        threads = {
            "drop": (GuardedStep(AbandonTitle("s0")),),
            "keep": (GuardedStep(ChangeTitleLevel("s0", 1)),
                     GuardedStep(FinancialTransfer("A", "X", 10.0))),
        }
    else:
        threads = {
            "to_y": (GuardedStep(TransferTitle("s0", "Y", 6)),),
            "to_z": (GuardedStep(TransferTitle("s0", "Z", 6)),),
        }
    plan = Plan(id=f"conflict{idx}", threads=threads,
                scope=TransformationScope("A", "B", "X", "Y",
                                          frozenset(scope_sources)))
    return eq, plan


_GUARDS = ("none", "exists", "title", "contract")


def _random_guard(rng: random.Random):
    kind = rng.choice(_GUARDS)
    if kind == "exists":
        return EntityExists(_ident(rng, "e", rng.randint(0, 9)))
    if kind == "title":
        return TitleAtLevel(_ident(rng, "s", rng.randint(0, 9)),
                            rng.randint(1, 8))
    if kind == "contract":
        return ContractPresent(_ident(rng, "c", rng.randint(0, 9)))
    return None


def _random_step(rng: random.Random, seq: int):
    kind = rng.randrange(12)
    src = _ident(rng, "s", seq)
    sub = _ident(rng, "sub", seq)
    unit = _ident(rng, "u", seq)
    if kind == 0:
        return TransferTitle(src, sub, rng.randint(1, 8))
    if kind == 1:
        slots = {}
        if rng.random() < 0.5:
            slots["insourcer"] = rng.choice((None, unit))
        if rng.random() < 0.3:
            slots["third_party"] = rng.choice((None, unit))
        if rng.random() < 0.2:
            slots["outsourcer"] = unit
        return ChangeTitleLevel(src, rng.randint(1, 8), **slots)
    if kind == 2:
        return AbandonTitle(src)
    if kind == 3:
        kwargs = {}
        if rng.random() < 0.5:
            kwargs["cost_profile"] = {rng.choice(list(CostCategory)):
                                      _amount(rng)}
        if rng.random() < 0.5:
            kwargs["advantage"] = AdvantageFlags(*(rng.random() < 0.5
                                                   for _ in range(4)))
        if rng.random() < 0.3:
            kwargs["critical_for"] = unit
        return AcquireSource(sub, src, rng.choice(TYPE_IDS),
                             level=rng.randint(1, 3), **kwargs)
    if kind == 4:
        return MoveService(_ident(rng, "svc", seq), sub)
    if kind == 5:
        return CreateUnit(unit, name=rng.choice(("", "New \"Co\"")),
                          mission=rng.choice(("", "fresh start")))
    if kind == 6:
        return CreateSubunit(unit, sub)
    if kind == 7:
        return DissolveSubunit(sub)
    if kind == 8:
        return DissolveUnit(unit)
    if kind == 9:
        covers = frozenset(_ident(rng, "svc", i)
                           for i in range(rng.randint(0, 2)))
        kind_choice = rng.choice(list(ContractKind))
        if kind_choice is ContractKind.TARGET_SERVICE_PROVISION \
                and not covers:
            kind_choice = ContractKind.OTHER
        return SignContract(_ident(rng, "c", seq), kind_choice,
                            (unit, f"{unit}2"), covers=covers,
                            expiry=rng.choice((None, rng.randint(1, 60))))
    if kind == 10:
        return TerminateContract(_ident(rng, "c", seq))
    return FinancialTransfer(unit, f"{unit}2", _amount(rng))


def random_plan(rng: random.Random, idx: int) -> Plan:
    """A structurally varied plan for serialization round-trips."""
    threads = {}
    seq = 0
    for t in range(rng.randint(1, 3)):
        steps = []
        for _ in range(rng.randint(1, 3)):
            steps.append(GuardedStep(_random_step(rng, seq),
                                     _random_guard(rng)))
            seq += 1
        threads[_ident(rng, "t", t)] = tuple(steps)
    scope = None
    if rng.random() < 0.7:
        scope = TransformationScope(
            outsourcer="A", outsourcing_subunit="B", insourcer="X",
            insourcing_subunit=rng.choice((None, "Y")),
            sources=frozenset(_ident(rng, "s", i)
                              for i in range(rng.randint(0, 3))))
    return Plan(id=f"plan{idx}", threads=threads, scope=scope,
                equilibrium_ref=rng.choice((None, "world.meq")))

import pytest

from sourceq import (AdvantageFlags, Benchmark, CostCategory,
                     EquilibriumBuilder, MissingBenchmark, NoServices,
                     NoSourcesOfType, PerspectiveNotParty, UntitledSource,
                     WeightTable, apply_progression, cost_estimate,
                     default_weight_table, degree_internal_abs,
                     degree_internal_rel, is_internal, portfolio_weight,
                     service_provision_degrees, signed_weight,
                     sustainable_advantage)

TABLE = default_weight_table()


def two_party_world(level: int, type_id: str = "tools"):
    b = EquilibriumBuilder()
    b.add_unit("A").add_unit("X").add_unit("C")
    b.add_subunit("A", "B").add_subunit("X", "Y")
    using = "B" if level <= 3 or type_id == "persons" and level <= 4 else "Y"
    kwargs = {}
    scale_levels = {"persons": {3: "C", 4: "X", 5: "X", 6: "XC", 7: "X", 8: "X"},
                    "tools": {2: "C", 3: "X", 4: "X", 5: "XC", 6: "X"}}
    needs = scale_levels.get(type_id, scale_levels["tools"]).get(level, "")
    if "X" in needs:
        kwargs["insourcer"] = "X"
    if "C" in needs:
        kwargs["third_party"] = "C"
    if using == "Y":
        kwargs["outsourcer"] = "A"
    b.add_source("s", type_id, level=level, using=using, **kwargs)
    return b.build()


def test_signed_weight_reads_mirrored_ranks():
    eq = two_party_world(4)  # tools level 4: rank 4 for A, rank 3 for X
    assert signed_weight("A", "s", eq, TABLE) == -1.0
    assert signed_weight("X", "s", eq, TABLE) == 1.0


def test_signed_weight_rejects_non_parties_and_untitled():
    eq = two_party_world(4)
    with pytest.raises(PerspectiveNotParty):
        signed_weight("C", "s", eq, TABLE)
    b = EquilibriumBuilder()
    b.add_unit("A").add_untitled_source("loose", "tools")
    with pytest.raises(UntitledSource):
        signed_weight("A", "loose", b.build(), TABLE)


def test_portfolio_weight_scn1(scn1_before, scn1_scope):
    assert portfolio_weight("A", scn1_scope.sources, scn1_before, TABLE) == 15.0
    # X holds no position yet; Lic fills only the third-party slot.
    assert portfolio_weight("X", scn1_scope.sources, scn1_before, TABLE) == 0.0
    assert portfolio_weight("Lic", scn1_scope.sources, scn1_before, TABLE) == 0.0


def test_portfolio_weight_skips_missing_and_untitled(scn1_before):
    scope = {"p1", "no-such-source"}
    assert portfolio_weight("A", scope, scn1_before, TABLE) == 7.0


def test_portfolio_include_modes():
    b = EquilibriumBuilder()
    b.add_unit("A").add_unit("X")
    b.add_subunit("A", "B")
    b.add_source("cash", "finance", level=1, using="B")
    b.add_source("gear", "tools", level=1, using="B")
    eq = b.build()
    scope = {"cash", "gear"}
    assert portfolio_weight("A", scope, eq, TABLE, include="all") == 10.0
    assert portfolio_weight("A", scope, eq, TABLE, include="financial") == 5.0
    assert portfolio_weight("A", scope, eq, TABLE,
                            include="nonfinancial") == 5.0
    with pytest.raises(ValueError, match="include"):
        portfolio_weight("A", scope, eq, TABLE, include="everything")


def test_weight_table_must_strictly_decrease():
    with pytest.raises(ValueError, match="strictly decrease"):
        WeightTable({"tools": {1: 1.0, 2: 1.0}})


def test_weight_table_scaling_and_serialization():
    doubled = TABLE.scaled(2.0)
    from sourceq import TOOLS_SCALE
    assert doubled.weight(TOOLS_SCALE, 1) == 10.0
    with pytest.raises(ValueError):
        TABLE.scaled(0.0)
    assert WeightTable.from_dict(TABLE.to_dict()) == TABLE


def test_cost_estimate_routes_by_title_level(scn1_before):
    costs = cost_estimate("B", scn1_before)
    # h1 owned: its capital figure stays capital; l1 licensed: lease money
    # stays lease; p1 employs people: personnel. Operational passes through.
    assert costs.get(CostCategory.CAPITAL_OWNED) == 20.0
    assert costs.get(CostCategory.LEASE_RENT_LICENSE) == 10.0
    assert costs.get(CostCategory.PERSONNEL) == 50.0
    assert costs.get(CostCategory.OPERATIONAL) == 5.0
    assert costs.total == 85.0


def test_cost_estimate_after_sale_and_lease_back(scn1_before,
                                                 scn1_progression):
    after, _ = apply_progression(scn1_before, scn1_progression)
    costs = cost_estimate("B", after)
    # h1 stays in use by B but is now granted from X: its capital figure
    # shows up as lease money. The abandoned l1 and transferred p1 are gone.
    assert costs.get(CostCategory.CAPITAL_OWNED) == 0.0
    assert costs.get(CostCategory.LEASE_RENT_LICENSE) == 20.0
    assert costs.get(CostCategory.PERSONNEL) == 0.0
    assert costs.get(CostCategory.OPERATIONAL) == 5.0
    y_costs = cost_estimate("Y", after)
    assert y_costs.get(CostCategory.PERSONNEL) == 50.0


def test_cost_estimate_unknown_subunit(scn1_before):
    from sourceq import UnknownEntity
    with pytest.raises(UnknownEntity):
        cost_estimate("nowhere", scn1_before)


def test_is_internal_requires_positive_polarity(scn1_before,
                                                scn1_progression):
    assert is_internal("p1", "A", scn1_before)
    after, _ = apply_progression(scn1_before, scn1_progression)
    assert not is_internal("p1", "A", after)
    assert is_internal("p1", "X", after)


def test_is_internal_compares_consuming_parties():
    b = EquilibriumBuilder()
    b.add_unit("A").add_unit("X")
    b.add_subunit("A", "B").add_subunit("X", "Y")
    # tools level 3: A holds rank 3 (weight 1), X rank 4 (weight -1); the
    # service from B feeds X, so X is in the comparison set but scores lower.
    b.add_source("s", "tools", level=3, using="B", insourcer="X")
    b.add_service("svc", "B", "X", 4.0)
    eq = b.build()
    assert is_internal("s", "A", eq)
    assert not is_internal("s", "X", eq)


def test_degree_internal_abs_scn1(scn1_before, scn1_progression):
    assert degree_internal_abs("A", "persons", scn1_before, TABLE) == 1.0
    after, _ = apply_progression(scn1_before, scn1_progression)
    assert degree_internal_abs("A", "persons", after, TABLE) == 0.0
    with pytest.raises(NoSourcesOfType):
        degree_internal_abs("A", "vehicles", scn1_before, TABLE)


def test_degree_internal_rel():
    eq = two_party_world(1)
    bench = Benchmark.from_dict({"entries": [
        {"type": "tools", "external": 0.5},
        {"type": "ipr", "segment": "eu", "external": 1.0},
    ]})
    assert degree_internal_rel("A", "tools", eq, TABLE, bench) == 2.0
    with pytest.raises(MissingBenchmark):
        degree_internal_rel("A", "tools", eq, TABLE, None)
    with pytest.raises(MissingBenchmark):
        degree_internal_rel("A", "tools", eq, TABLE, bench, segment="eu")
    with pytest.raises(ValueError):
        Benchmark.from_dict({"entries": [{"type": "tools", "external": 1.5}]})


def test_degree_internal_rel_degenerate_benchmark():
    eq = two_party_world(1)
    bench = Benchmark.from_dict({"entries": [{"type": "tools",
                                              "external": 1.0}]})
    assert degree_internal_rel("A", "tools", eq, TABLE, bench) == float("inf")


def test_service_provision_degrees(scn1_before, scn1_progression):
    degrees = service_provision_degrees("A", scn1_before)
    assert degrees.internal_volume == 10.0
    assert degrees.external_volume == 0.0
    assert degrees.degree_internal == 1.0
    after, _ = apply_progression(scn1_before, scn1_progression)
    moved = service_provision_degrees("A", after)
    assert moved.internal_volume == 0.0
    assert moved.external_volume == 10.0
    with pytest.raises(NoServices):
        service_provision_degrees("Lic", scn1_before)


def test_sustainable_advantage_requires_all_four_flags():
    b = EquilibriumBuilder()
    b.add_unit("A")
    b.add_subunit("A", "B")
    b.add_source("star", "knowledge", level=1, using="B",
                 advantage=AdvantageFlags(True, True, True, True))
    b.add_source("dud", "knowledge", level=1, using="B",
                 advantage=AdvantageFlags(True, True, True, False))
    eq = b.build()
    assert sustainable_advantage("star", eq)
    assert not sustainable_advantage("dud", eq)

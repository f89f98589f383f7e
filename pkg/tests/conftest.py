"""Shared fixtures: the canonical desktop-outsourcing scenario and the museum
precondition scenario, built programmatically so file fixtures can be checked
against them."""

import pytest

from sourceq import (AbandonTitle, ChangeTitleLevel, CostCategory,
                     EquilibriumBuilder, FinancialTransfer, MoveService,
                     Progression, TransferTitle, TransformationScope)

SCN1_SCOPE_SOURCES = frozenset({"p1", "h1", "l1"})


def build_scn1_before():
    builder = EquilibriumBuilder()
    builder.add_unit("A", mission="Runs its own desktop support")
    builder.add_unit("X")
    builder.add_unit("Lic")
    builder.add_subunit("A", "B")
    builder.add_subunit("A", "Ops")
    builder.add_subunit("X", "Y")
    builder.add_source("p1", "persons", level=1, using="B",
                       cost={CostCategory.PERSONNEL: 50.0})
    builder.add_source("h1", "tools", level=1, using="B",
                       cost={CostCategory.CAPITAL_OWNED: 20.0,
                             CostCategory.OPERATIONAL: 5.0})
    builder.add_source("l1", "ipr", level=2, using="B", third_party="Lic",
                       cost={CostCategory.LEASE_RENT_LICENSE: 10.0})
    builder.add_service("svc_desktop", "B", "Ops", 10.0)
    return builder.build()


def build_scn1_scope() -> TransformationScope:
    return TransformationScope(outsourcer="A", outsourcing_subunit="B",
                               insourcer="X", insourcing_subunit="Y",
                               sources=SCN1_SCOPE_SOURCES)


def build_scn1_progression() -> Progression:
    return Progression(
        steps=(
            TransferTitle("p1", "Y", 8),
            ChangeTitleLevel("h1", 3, insourcer="X"),
            AbandonTitle("l1"),
            MoveService("svc_desktop", "Y"),
            FinancialTransfer("X", "A", 100.0),
        ),
        scope=build_scn1_scope(),
    )


def build_museum():
    builder = EquilibriumBuilder()
    builder.add_unit("muse", mission="Keeps the city collection on show")
    builder.add_unit("store")
    builder.add_subunit("muse", "gallery")
    builder.add_subunit("store", "depot")
    builder.add_source("painting", "works-of-art", level=1, using="gallery",
                       critical_for="muse",
                       cost={CostCategory.INSURANCE: 2.0})
    builder.add_source("archive", "information-bases", level=1,
                       using="gallery")
    builder.add_service("svc_show", "gallery", "external", 5.0)
    return builder.build()


def build_museum_scope() -> TransformationScope:
    return TransformationScope(outsourcer="muse", outsourcing_subunit="gallery",
                               insourcer="store", insourcing_subunit="depot",
                               sources=frozenset({"painting", "archive"}))


@pytest.fixture
def scn1_before():
    return build_scn1_before()


@pytest.fixture
def scn1_progression():
    return build_scn1_progression()


@pytest.fixture
def scn1_scope():
    return build_scn1_scope()


@pytest.fixture
def museum():
    return build_museum()


@pytest.fixture
def museum_scope():
    return build_museum_scope()

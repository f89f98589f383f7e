"""The built-in source type catalog.

Eleven kinds of sources a subunit can work with. Each type carries the scale
its titles are ranked on; exactly one type (finance) is flagged financial so
valuation can include or exclude it on request.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownScale
from .scales import GENERIC_SCALE, IPR_SCALE, PERSONNEL_SCALE, TOOLS_SCALE, TitleScale


@dataclass(frozen=True)
class SourceType:
    id: str
    name: str
    scale: TitleScale
    financial: bool = False


_TYPES: dict[str, SourceType] = {}


def register_source_type(stype: SourceType) -> SourceType:
    if stype.id in _TYPES:
        raise ValueError(f"source type {stype.id!r} already registered")
    _TYPES[stype.id] = stype
    return stype


def get_source_type(type_id: str) -> SourceType:
    try:
        return _TYPES[type_id]
    except KeyError:
        raise UnknownScale(f"no source type registered under {type_id!r}") from None


def builtin_source_types() -> dict[str, SourceType]:
    return dict(_TYPES)


def _builtin(type_id: str, name: str, scale: TitleScale, financial: bool = False):
    return register_source_type(SourceType(type_id, name, scale, financial))


REAL_ESTATE = _builtin("real-estate", "RealEstate", GENERIC_SCALE)
VEHICLES = _builtin("vehicles", "Vehicles", GENERIC_SCALE)
WORKS_OF_ART = _builtin("works-of-art", "WorksOfArt", GENERIC_SCALE)
TOOLS_AND_EQUIPMENT = _builtin("tools", "ToolsAndEquipment", TOOLS_SCALE)
CONTROL_CODES = _builtin("control-codes", "ControlCodes", GENERIC_SCALE)
INFORMATION_BASES = _builtin("information-bases", "InformationBases", GENERIC_SCALE)
PERSONS = _builtin("persons", "Persons", PERSONNEL_SCALE)
IPR = _builtin("ipr", "IPR", IPR_SCALE)
KNOWLEDGE = _builtin("knowledge", "Knowledge", GENERIC_SCALE)
CONTRACTS_AND_GOODWILL = _builtin("contracts-goodwill", "ContractsAndGoodwill",
                                  GENERIC_SCALE)
FINANCE = _builtin("finance", "Finance", GENERIC_SCALE, financial=True)

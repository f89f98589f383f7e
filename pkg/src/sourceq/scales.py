"""Title scales: ordered level rankings for how strongly a source is held.

A scale lists n levels. Level 1 is the strongest grip of the outsourcer-side
unit on the source (own/employ outright); level n is the strongest grip of the
insourcer-side unit. The two parties read the same record through mirrored
rankings: the outsourcer side reads level r as rank r, the insourcer side
reads it as rank n+1-r. The first `positive_count` ranks count as positive
for whichever party is doing the reading.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownScale

# Role slot names used by level templates.
OUTSOURCER = "outsourcer"
INSOURCER = "insourcer"
THIRD_PARTY = "third_party"


@dataclass(frozen=True)
class LevelSpec:
    """One level of a title scale.

    `roles` holds the slots the level template mentions. The outsourcer slot
    is mandatory on every record regardless, so validation only enforces the
    insourcer and third-party memberships listed here.
    """

    index: int
    text: str
    roles: frozenset = field(default_factory=frozenset)

    def mentions(self, role: str) -> bool:
        return role in self.roles


@dataclass(frozen=True)
class TitleScale:
    id: str
    levels: tuple
    positive_count: int
    personnel: bool = False

    def __post_init__(self):
        n = len(self.levels)
        if n < 2:
            raise ValueError(f"scale {self.id!r} needs at least 2 levels")
        if not (1 <= self.positive_count < n):
            raise ValueError(
                f"scale {self.id!r}: positive_count {self.positive_count} "
                f"must satisfy 1 <= positive_count < {n}"
            )
        for i, lv in enumerate(self.levels, start=1):
            if lv.index != i:
                raise ValueError(f"scale {self.id!r}: level {lv.index} out of order")

    @property
    def size(self) -> int:
        return len(self.levels)

    def level(self, index: int) -> LevelSpec:
        if not 1 <= index <= self.size:
            raise ValueError(
                f"scale {self.id!r}: level {index} out of range 1..{self.size}"
            )
        return self.levels[index - 1]

    def mirror(self, index: int) -> int:
        """The same level read from the opposite party's ranking."""
        self.level(index)
        return self.size + 1 - index

    def outsourcer_half(self, index: int) -> bool:
        """True when the level places the source on the outsourcer's side."""
        return self.level(index).index <= self.positive_count


def _lv(index: int, text: str, *roles: str) -> LevelSpec:
    return LevelSpec(index=index, text=text, roles=frozenset(roles))


#: Eight-step ranking for people: permanent employment down to the mirror image.
PERSONNEL_SCALE = TitleScale(
    id="persons",
    positive_count=4,
    personnel=True,
    levels=(
        _lv(1, "permanent employee of {outsourcer} working in its subunit {using}"),
        _lv(2, "temporary employee of {outsourcer} working in its subunit {using}"),
        _lv(3, "contracted by {outsourcer} from {third_party} for work by or for "
               "subunit {using}", THIRD_PARTY),
        _lv(4, "contracted by {outsourcer} from {insourcer} for work by or for "
               "subunit {using}", INSOURCER),
        _lv(5, "contracted by {insourcer} from {outsourcer} for work by or for "
               "subunit {using}", INSOURCER),
        _lv(6, "contracted by {insourcer} from {third_party} for work by or for "
               "subunit {using}", INSOURCER, THIRD_PARTY),
        _lv(7, "temporary employee of {insourcer} working in its subunit {using}",
            INSOURCER),
        _lv(8, "permanent employee of {insourcer} working in its subunit {using}",
            INSOURCER),
    ),
)


def _six_level(scale_id: str, noun: str, held: str, granted: str) -> TitleScale:
    """Six-step owned / granted-by-C / granted-by-X mirror ranking."""
    return TitleScale(
        id=scale_id,
        positive_count=3,
        levels=(
            _lv(1, f"{noun} {held} by {{outsourcer}}, used in its subunit {{using}}"),
            _lv(2, f"{noun} {granted} by {{outsourcer}} from {{third_party}}, used "
                   "in its subunit {using}", THIRD_PARTY),
            _lv(3, f"{noun} {granted} by {{outsourcer}} from {{insourcer}}, used "
                   "in its subunit {using}", INSOURCER),
            _lv(4, f"{noun} {granted} by {{insourcer}} from {{outsourcer}}, used "
                   "in its subunit {using}", INSOURCER),
            _lv(5, f"{noun} {granted} by {{insourcer}} from {{third_party}}, used "
                   "in its subunit {using}", INSOURCER, THIRD_PARTY),
            _lv(6, f"{noun} {held} by {{insourcer}}, used in its subunit {{using}}",
                INSOURCER),
        ),
    )


TOOLS_SCALE = _six_level("tools", "tool", "owned", "leased or rented")
IPR_SCALE = _six_level("ipr", "right", "owned", "licensed")

#: Fallback ranking for source types without a dedicated scale.
GENERIC_SCALE = _six_level("generic", "source", "held", "granted")


_SCALES: dict[str, TitleScale] = {}


def register_scale(scale: TitleScale) -> TitleScale:
    if scale.id in _SCALES:
        raise ValueError(f"scale {scale.id!r} already registered")
    _SCALES[scale.id] = scale
    return scale


def get_scale(scale_id: str) -> TitleScale:
    try:
        return _SCALES[scale_id]
    except KeyError:
        raise UnknownScale(f"no scale registered under {scale_id!r}") from None


def registered_scales() -> dict[str, TitleScale]:
    return dict(_SCALES)


for _s in (PERSONNEL_SCALE, TOOLS_SCALE, IPR_SCALE, GENERIC_SCALE):
    register_scale(_s)

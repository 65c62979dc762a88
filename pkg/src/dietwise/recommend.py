"""Recommendation rules: glycemic banding, profile compatibility, and
lower-impact alternatives for scanned foods.

The restriction -> forbidden-tag table is loaded from a versioned config
file (see fixtures/restriction-map.conf); a built-in copy is the default.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .detection import DetectionResult
from .errors import ValidationError
from .nutrition import FoodItem, MemoryCatalog, NutrientProfile
from .profiles import UserProfile

GI_LOW_MAX = 55    # gi <= 55 -> low
GI_HIGH_MIN = 70   # gi >= 70 -> high

DEFAULT_RESTRICTION_MAP = {
    "nut-allergy": frozenset({"contains-nuts"}),
    "gluten-free": frozenset({"contains-gluten"}),
    "vegetarian": frozenset({"contains-meat", "contains-fish"}),
    "vegan": frozenset({"contains-meat", "contains-fish", "contains-dairy",
                        "contains-egg", "contains-honey"}),
    "lactose-free": frozenset({"contains-dairy"}),
}

MAX_ALTERNATIVES = 5


class GlycemicClass(IntEnum):
    LOW = 0
    MEDIUM = 1
    HIGH = 2

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class Reason:
    code: str
    text: str


@dataclass(frozen=True)
class Compatibility:
    verdict: str  # compatible | caution | incompatible
    reasons: tuple[Reason, ...]


@dataclass(frozen=True)
class Recommendation:
    food_id: str
    verdict: Compatibility
    glycemic: GlycemicClass
    nutrient_summary: NutrientProfile
    alternatives: tuple[str, ...]


def parse_restriction_map(text: str) -> dict[str, frozenset[str]]:
    """Parse `restriction = tag, tag, ...` lines; # starts a comment."""
    table: dict[str, frozenset[str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"restriction map line {lineno}: expected key = tags")
        key, _, tags = line.partition("=")
        table[key.strip()] = frozenset(t.strip() for t in tags.split(",") if t.strip())
    return table


def classify_glycemic(gi: float) -> GlycemicClass:
    if not 0 <= gi <= 110:
        raise ValidationError(f"glycemic index {gi} outside [0, 110]")
    if gi <= GI_LOW_MAX:
        return GlycemicClass.LOW
    if gi >= GI_HIGH_MIN:
        return GlycemicClass.HIGH
    return GlycemicClass.MEDIUM


def assess(profile: UserProfile, food: FoodItem,
           restriction_map: dict[str, frozenset[str]] | None = None) -> Compatibility:
    """Rule cascade: restriction violations, then glycemic caution for
    diabetic profiles, else compatible."""
    table = restriction_map if restriction_map is not None else DEFAULT_RESTRICTION_MAP
    reasons = []
    for restriction in sorted(profile.restrictions):
        violating = sorted(table.get(restriction, frozenset()) & food.tags)
        if violating:
            reasons.append(Reason(
                "restriction-violation",
                f"{food.canonical_name} conflicts with {restriction} "
                f"(tags: {', '.join(violating)})"))
    if reasons:
        return Compatibility(verdict="incompatible", reasons=tuple(reasons))

    diabetic = bool(profile.conditions & {"diabetes-type-1", "diabetes-type-2"})
    if diabetic:
        glycemic = classify_glycemic(food.glycemic_index)
        if glycemic is GlycemicClass.HIGH:
            reasons.append(Reason(
                "high-glycemic",
                f"{food.canonical_name} has a high glycemic index "
                f"({food.glycemic_index:g})"))
        elif glycemic is GlycemicClass.MEDIUM:
            reasons.append(Reason(
                "moderate-glycemic",
                f"{food.canonical_name} has a moderate glycemic index "
                f"({food.glycemic_index:g})"))
    if reasons:
        return Compatibility(verdict="caution", reasons=tuple(reasons))
    return Compatibility(verdict="compatible", reasons=())


def alternatives_for(profile: UserProfile, food: FoodItem, catalog: MemoryCatalog,
                     restriction_map=None) -> tuple[str, ...]:
    """Same-category, strictly lower GI, compatible; ascending GI then name."""
    candidates = [
        item for item in catalog.all_items()
        if item.id != food.id
        and item.category == food.category
        and item.glycemic_index < food.glycemic_index
        and assess(profile, item, restriction_map).verdict == "compatible"
    ]
    candidates.sort(key=lambda it: (it.glycemic_index, it.canonical_name))
    return tuple(item.id for item in candidates[:MAX_ALTERNATIVES])


def recommend_for_scan(profile: UserProfile, detections: DetectionResult,
                       catalog: MemoryCatalog,
                       restriction_map=None) -> tuple[list[Recommendation], list[str]]:
    """One Recommendation per distinct resolvable detected label.

    Returns (recommendations, unrecognized_labels); unresolvable labels
    degrade per-label, never fail the whole scan.
    """
    recommendations = []
    unrecognized = []
    seen_labels: set[str] = set()
    seen_foods: set[str] = set()
    for box in detections.boxes:
        key = box.label.casefold()
        if key in seen_labels:
            continue
        seen_labels.add(key)
        food = catalog.find_by_label(box.label)
        if food is None:
            unrecognized.append(box.label)
            continue
        if food.id in seen_foods:
            continue
        seen_foods.add(food.id)
        recommendations.append(Recommendation(
            food_id=food.id,
            verdict=assess(profile, food, restriction_map),
            glycemic=classify_glycemic(food.glycemic_index),
            nutrient_summary=food.nutrients,
            alternatives=alternatives_for(profile, food, catalog, restriction_map),
        ))
    return recommendations, unrecognized

"""Food catalog: nutrient profiles, glycemic indices, label lookup.

The catalog is a pluggable store. ``MemoryCatalog`` backs tests;
``FileCatalog`` adds single-file durability via an append-only write-ahead
log that is replayed on open. Catalog seed documents are line-delimited
JSON records (see docs/catalog-format.md).
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field

from .errors import ParseError, ValidationError

MICRO_UNITS = {"mg", "ug", "µg"}


@dataclass(frozen=True)
class NutrientProfile:
    calories_kcal_per_100g: float
    protein_g: float
    carbs_g: float
    fat_g: float
    fiber_g: float
    sugars_g: float
    # nutrient name -> (amount, unit); unit is mg or µg
    micronutrients: dict[str, tuple[float, str]] = field(default_factory=dict)

    def validate(self) -> None:
        for name in ("calories_kcal_per_100g", "protein_g", "carbs_g",
                     "fat_g", "fiber_g", "sugars_g"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or value < 0:
                raise ValidationError(f"{name} must be >= 0, got {value!r}")
        for name in ("protein_g", "carbs_g", "fat_g"):
            if getattr(self, name) > 100:
                raise ValidationError(f"{name} exceeds 100 g per 100 g")
        if self.protein_g + self.carbs_g + self.fat_g > 100:
            raise ValidationError("protein_g + carbs_g + fat_g exceeds 100 g")
        if self.fiber_g > self.carbs_g:
            raise ValidationError("fiber_g exceeds carbs_g")
        if self.sugars_g > self.carbs_g:
            raise ValidationError("sugars_g exceeds carbs_g")
        if self.calories_kcal_per_100g > 900:
            raise ValidationError("calories_kcal_per_100g exceeds 900")
        for nutrient, (amount, unit) in self.micronutrients.items():
            if amount < 0:
                raise ValidationError(f"micronutrient {nutrient} amount < 0")
            if unit not in MICRO_UNITS:
                raise ValidationError(
                    f"micronutrient {nutrient} unit must be mg or µg, got {unit!r}")


@dataclass(frozen=True)
class FoodItem:
    id: str
    canonical_name: str
    category: str
    glycemic_index: float
    nutrients: NutrientProfile
    tags: frozenset[str] = frozenset()
    aliases: frozenset[str] = frozenset()

    def validate(self) -> None:
        if not self.id:
            raise ValidationError("id must be nonempty")
        if not self.canonical_name.strip():
            raise ValidationError("canonical_name must be nonempty")
        if not 0 <= self.glycemic_index <= 110:
            raise ValidationError(
                f"glycemic_index must be in [0, 110], got {self.glycemic_index}")
        self.nutrients.validate()


def fold_label(label: str) -> str:
    """Case folding plus naive plural folding.

    Trailing "es" is stripped only after sibilant stems (dishes -> dish);
    otherwise a single trailing "s" is stripped (donuts -> donut,
    oranges -> orange). Double-s words (glass) are left alone.
    """
    folded = label.strip().casefold()
    if len(folded) > 3 and folded.endswith("es") and \
            folded[:-2].endswith(("s", "x", "z", "ch", "sh")):
        return folded[:-2]
    if len(folded) > 2 and folded.endswith("s") and not folded.endswith("ss"):
        return folded[:-1]
    return folded


class MemoryCatalog:
    """In-memory catalog; concurrent readers, serialized writes."""

    def __init__(self):
        self._items: dict[str, FoodItem] = {}
        self._lock = threading.Lock()

    def upsert(self, item: FoodItem) -> str:
        item.validate()
        with self._lock:
            name_key = item.canonical_name.casefold()
            for other in self._items.values():
                if other.id != item.id and other.canonical_name.casefold() == name_key:
                    raise ValidationError(
                        f"canonical_name {item.canonical_name!r} already used by {other.id}")
            self._items[item.id] = item
            self._persist(item)
        return item.id

    def _persist(self, item: FoodItem) -> None:
        pass

    def get(self, food_id: str) -> FoodItem | None:
        return self._items.get(food_id)

    def find_by_label(self, label: str) -> FoodItem | None:
        if not label.strip():
            raise ValidationError("label must be nonempty")
        wanted = fold_label(label)
        # deterministic: scan in insertion order, canonical names first
        for item in self._items.values():
            if fold_label(item.canonical_name) == wanted:
                return item
        for item in self._items.values():
            if any(fold_label(alias) == wanted for alias in sorted(item.aliases)):
                return item
        return None

    def all_items(self) -> list[FoodItem]:
        return list(self._items.values())

    def load_seed(self, text: str) -> int:
        """Validate every record, then upsert all; atomic."""
        items = parse_catalog_document(text)
        staged = MemoryCatalog()
        for item in items:
            staged.upsert(item)
        with self._lock:
            for item in items:
                self._items[item.id] = item
                self._persist(item)
        return len(items)


class FileCatalog(MemoryCatalog):
    """Catalog persisted to an append-only JSONL write-ahead log.

    Each upsert appends one full-record line and fsyncs; on open the log
    is replayed in order, so the last record per id wins.
    """

    def __init__(self, path: str):
        super().__init__()
        self.path = path
        if os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        item = food_item_from_dict(json.loads(line))
                        self._items[item.id] = item
        self._fh = open(path, "a", encoding="utf-8")

    def _persist(self, item: FoodItem) -> None:
        self._fh.write(json.dumps(food_item_to_dict(item), sort_keys=True) + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def close(self) -> None:
        self._fh.close()


def food_item_to_dict(item: FoodItem) -> dict:
    return {
        "id": item.id,
        "canonical_name": item.canonical_name,
        "category": item.category,
        "glycemic_index": item.glycemic_index,
        "nutrients": {
            "calories_kcal_per_100g": item.nutrients.calories_kcal_per_100g,
            "protein_g": item.nutrients.protein_g,
            "carbs_g": item.nutrients.carbs_g,
            "fat_g": item.nutrients.fat_g,
            "fiber_g": item.nutrients.fiber_g,
            "sugars_g": item.nutrients.sugars_g,
            "micronutrients": {
                k: {"amount": a, "unit": u}
                for k, (a, u) in sorted(item.nutrients.micronutrients.items())
            },
        },
        "tags": sorted(item.tags),
        "aliases": sorted(item.aliases),
    }


def food_item_from_dict(record: dict) -> FoodItem:
    try:
        raw_nutrients = record["nutrients"]
        micronutrients = {
            name: (entry["amount"], entry["unit"])
            for name, entry in raw_nutrients.get("micronutrients", {}).items()
        }
        nutrients = NutrientProfile(
            calories_kcal_per_100g=float(raw_nutrients["calories_kcal_per_100g"]),
            protein_g=float(raw_nutrients["protein_g"]),
            carbs_g=float(raw_nutrients["carbs_g"]),
            fat_g=float(raw_nutrients["fat_g"]),
            fiber_g=float(raw_nutrients["fiber_g"]),
            sugars_g=float(raw_nutrients["sugars_g"]),
            micronutrients=micronutrients,
        )
        return FoodItem(
            id=str(record["id"]),
            canonical_name=str(record["canonical_name"]),
            category=str(record.get("category", "")),
            glycemic_index=float(record["glycemic_index"]),
            nutrients=nutrients,
            tags=frozenset(record.get("tags", [])),
            aliases=frozenset(record.get("aliases", [])),
        )
    except KeyError as exc:
        raise ValidationError(
            f"record {record.get('id', '<no id>')!r} missing field {exc.args[0]}") from exc


def parse_catalog_document(text: str) -> list[FoodItem]:
    """Parse a line-delimited catalog document; errors carry the line number."""
    items = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: invalid record: {exc}") from exc
        try:
            item = food_item_from_dict(record)
            item.validate()
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc.message}") from exc
        items.append(item)
    return items


def serialize_catalog(catalog: MemoryCatalog) -> str:
    """Canonical serialization: id-sorted JSONL with sorted keys."""
    lines = [
        json.dumps(food_item_to_dict(item), sort_keys=True)
        for item in sorted(catalog.all_items(), key=lambda it: it.id)
    ]
    return "\n".join(lines) + ("\n" if lines else "")

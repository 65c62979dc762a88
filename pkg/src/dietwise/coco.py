"""COCO annotation corpus tooling: parse, validate, filter, split, stats.

Parsing enforces referential integrity up front; ``validate`` reports
geometry problems without raising. Splits are reproducible across runs
and platforms via a splitmix64-driven Fisher-Yates shuffle.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import NotFoundError, ParseError, ValidationError
from .rng import shuffled


@dataclass(frozen=True)
class ImageRecord:
    id: int
    file_name: str
    width: int
    height: int


@dataclass(frozen=True)
class Annotation:
    id: int
    image_id: int
    category_id: int
    bbox: tuple[float, float, float, float]  # x, y, w, h in pixels
    area: float
    iscrowd: int = 0


@dataclass(frozen=True)
class Category:
    id: int
    name: str
    supercategory: str


@dataclass(frozen=True)
class CocoDataset:
    images: tuple[ImageRecord, ...]
    annotations: tuple[Annotation, ...]
    categories: tuple[Category, ...]

    def image_by_id(self, image_id: int) -> ImageRecord:
        try:
            return self._image_index[image_id]
        except KeyError:
            raise NotFoundError(f"image id {image_id} not in dataset")

    def category_by_id(self, category_id: int) -> Category:
        return self._category_index[category_id]

    def annotations_for_image(self, image_id: int) -> list[Annotation]:
        return [a for a in self.annotations if a.image_id == image_id]

    @property
    def _image_index(self) -> dict[int, ImageRecord]:
        return {img.id: img for img in self.images}

    @property
    def _category_index(self) -> dict[int, Category]:
        return {cat.id: cat for cat in self.categories}


@dataclass(frozen=True)
class SplitSpec:
    fractions: tuple[float, float, float]  # train, val, test
    seed: int

    def validate(self) -> None:
        for f in self.fractions:
            if not 0.0 <= f <= 1.0:
                raise ValidationError(f"fraction {f} outside [0, 1]")
        if abs(sum(self.fractions) - 1.0) > 1e-9:
            raise ValidationError(f"fractions sum to {sum(self.fractions)}, expected 1")


@dataclass(frozen=True)
class SplitResult:
    train: tuple[int, ...]
    val: tuple[int, ...]
    test: tuple[int, ...]


@dataclass(frozen=True)
class Finding:
    kind: str
    annotation_id: int | None
    detail: str


def parse_coco(text: str) -> CocoDataset:
    """Parse a COCO object-detection annotation document.

    Syntax errors report the byte offset; dangling references name the
    offending annotation id.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"syntax error at byte offset {exc.pos}: {exc.msg}") from exc
    try:
        images = tuple(
            ImageRecord(id=int(r["id"]), file_name=str(r.get("file_name", "")),
                        width=int(r["width"]), height=int(r["height"]))
            for r in doc.get("images", []))
        categories = tuple(
            Category(id=int(r["id"]), name=str(r["name"]),
                     supercategory=str(r.get("supercategory", "")))
            for r in doc.get("categories", []))
        annotations = tuple(
            Annotation(id=int(r["id"]), image_id=int(r["image_id"]),
                       category_id=int(r["category_id"]),
                       bbox=tuple(float(v) for v in r["bbox"]),
                       area=float(r.get("area", r["bbox"][2] * r["bbox"][3])),
                       iscrowd=int(r.get("iscrowd", 0)))
            for r in doc.get("annotations", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed record: {exc}") from exc

    for name, records in (("image", images), ("annotation", annotations),
                          ("category", categories)):
        ids = [r.id for r in records]
        if len(ids) != len(set(ids)):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ParseError(f"duplicate {name} ids: {dupes}")

    image_ids = {img.id for img in images}
    category_ids = {cat.id for cat in categories}
    for ann in annotations:
        if ann.image_id not in image_ids:
            raise ParseError(
                f"annotation {ann.id} references absent image id {ann.image_id}")
        if ann.category_id not in category_ids:
            raise ParseError(
                f"annotation {ann.id} references absent category id {ann.category_id}")
        if len(ann.bbox) != 4:
            raise ParseError(f"annotation {ann.id} bbox must have 4 elements")

    for img in images:
        if img.width <= 0 or img.height <= 0:
            raise ParseError(f"image {img.id} has non-positive dimensions")

    return CocoDataset(images=images, annotations=annotations, categories=categories)


def serialize_coco(dataset: CocoDataset) -> str:
    return json.dumps({
        "images": [{"id": i.id, "file_name": i.file_name,
                    "width": i.width, "height": i.height} for i in dataset.images],
        "annotations": [{"id": a.id, "image_id": a.image_id,
                         "category_id": a.category_id, "bbox": list(a.bbox),
                         "area": a.area, "iscrowd": a.iscrowd}
                        for a in dataset.annotations],
        "categories": [{"id": c.id, "name": c.name, "supercategory": c.supercategory}
                       for c in dataset.categories],
    }, sort_keys=True)


def validate(dataset: CocoDataset) -> list[Finding]:
    """Geometry and uniqueness findings; an empty list means clean."""
    findings: list[Finding] = []
    image_index = {img.id: img for img in dataset.images}
    seen_ids: set[int] = set()
    for ann in dataset.annotations:
        if ann.id in seen_ids:
            findings.append(Finding("duplicate-annotation-id", ann.id,
                                    f"annotation id {ann.id} appears more than once"))
        seen_ids.add(ann.id)
        x, y, w, h = ann.bbox
        if w <= 0 or h <= 0:
            findings.append(Finding("zero-dimension-box", ann.id,
                                    f"bbox {ann.bbox} has non-positive width/height"))
        img = image_index[ann.image_id]
        if x < 0 or y < 0 or x + w > img.width or y + h > img.height:
            findings.append(Finding("out-of-bounds", ann.id,
                                    f"bbox {ann.bbox} exceeds image {img.width}x{img.height}"))
        if ann.area <= 0:
            findings.append(Finding("non-positive-area", ann.id,
                                    f"area {ann.area} is not positive"))
    return findings


def filter_food(dataset: CocoDataset) -> CocoDataset:
    """Keep images that carry at least one food-supercategory annotation."""
    food_category_ids = {c.id for c in dataset.categories if c.supercategory == "food"}
    keep_images = {a.image_id for a in dataset.annotations
                   if a.category_id in food_category_ids}
    images = tuple(i for i in dataset.images if i.id in keep_images)
    annotations = tuple(a for a in dataset.annotations
                        if a.image_id in keep_images and a.category_id in food_category_ids)
    used_categories = {a.category_id for a in annotations}
    categories = tuple(c for c in dataset.categories if c.id in used_categories)
    return CocoDataset(images=images, annotations=annotations, categories=categories)


def split(ids: list[int], spec: SplitSpec) -> SplitResult:
    """Deterministic 3-way split.

    Non-train buckets get floor(fraction * N) each; train takes the
    remainder. With the paper-style 0.70/0.15/0.15 over 10,596 ids this
    yields buckets of 7,418 / 1,589 / 1,589.
    """
    spec.validate()
    if len(set(ids)) != len(ids):
        raise ValidationError("ids must be distinct")
    n = len(ids)
    n_val = math.floor(spec.fractions[1] * n)
    n_test = math.floor(spec.fractions[2] * n)
    order = shuffled(list(ids), spec.seed)
    train = tuple(order[: n - n_val - n_test])
    val = tuple(order[n - n_val - n_test: n - n_test])
    test = tuple(order[n - n_test:])
    return SplitResult(train=train, val=val, test=test)


def dataset_stats(dataset: CocoDataset) -> dict:
    """Per-category annotation / distinct-image / crowd counts plus totals."""
    per_category: dict[str, dict] = {}
    for cat in dataset.categories:
        anns = [a for a in dataset.annotations if a.category_id == cat.id]
        per_category[cat.name] = {
            "annotations": len(anns),
            "images": len({a.image_id for a in anns}),
            "crowd": sum(1 for a in anns if a.iscrowd),
        }
    return {
        "categories": per_category,
        "totals": {
            "annotations": len(dataset.annotations),
            "images": len(dataset.images),
            "categories": len(dataset.categories),
        },
    }

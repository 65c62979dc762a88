#!/usr/bin/env python3
"""Regenerate the bundled fixtures (seed catalog, mini COCO corpus,
survey responses, golden split files). Deterministic; safe to re-run.
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from dietwise.coco import SplitSpec, split  # noqa: E402

FIXTURES = ROOT / "src" / "dietwise" / "fixtures"

GOLDEN_SEED = 42
GOLDEN_N = 10596


def nutrients(cal, protein, carbs, fat, fiber, sugars, micro=None):
    return {
        "calories_kcal_per_100g": cal, "protein_g": protein, "carbs_g": carbs,
        "fat_g": fat, "fiber_g": fiber, "sugars_g": sugars,
        "micronutrients": micro or {},
    }


# The ten COCO "food" supercategory classes. GI and nutrient values are
# illustrative fixture data, not a licensed nutrition database.
SEED_CATALOG = [
    {"id": "banana", "canonical_name": "banana", "category": "fruit",
     "glycemic_index": 51,
     "nutrients": nutrients(89, 1.1, 22.8, 0.3, 2.6, 12.2,
                            {"potassium": {"amount": 358, "unit": "mg"}}),
     "tags": [], "aliases": []},
    {"id": "apple", "canonical_name": "apple", "category": "fruit",
     "glycemic_index": 36,
     "nutrients": nutrients(52, 0.3, 13.8, 0.2, 2.4, 10.4,
                            {"vitamin-c": {"amount": 4.6, "unit": "mg"}}),
     "tags": [], "aliases": []},
    {"id": "orange", "canonical_name": "orange", "category": "fruit",
     "glycemic_index": 43,
     "nutrients": nutrients(47, 0.9, 11.8, 0.1, 2.4, 9.4,
                            {"vitamin-c": {"amount": 53.2, "unit": "mg"}}),
     "tags": [], "aliases": []},
    {"id": "broccoli", "canonical_name": "broccoli", "category": "vegetable",
     "glycemic_index": 15,
     "nutrients": nutrients(34, 2.8, 6.6, 0.4, 2.6, 1.7,
                            {"folate": {"amount": 63, "unit": "µg"}}),
     "tags": ["vegetarian"], "aliases": []},
    {"id": "carrot", "canonical_name": "carrot", "category": "vegetable",
     "glycemic_index": 39,
     "nutrients": nutrients(41, 0.9, 9.6, 0.2, 2.8, 4.7,
                            {"vitamin-a": {"amount": 835, "unit": "µg"}}),
     "tags": ["vegetarian"], "aliases": []},
    {"id": "sandwich", "canonical_name": "sandwich", "category": "baked",
     "glycemic_index": 52,
     "nutrients": nutrients(250, 10.0, 30.0, 9.0, 2.0, 4.0),
     "tags": ["contains-gluten"], "aliases": ["sub", "hoagie"]},
    {"id": "pizza", "canonical_name": "pizza", "category": "baked",
     "glycemic_index": 80,
     "nutrients": nutrients(266, 11.0, 33.0, 10.0, 2.3, 3.6,
                            {"sodium": {"amount": 598, "unit": "mg"}}),
     "tags": ["contains-gluten", "contains-dairy"], "aliases": ["pizza slice"]},
    {"id": "donut", "canonical_name": "donut", "category": "baked",
     "glycemic_index": 76,
     "nutrients": nutrients(452, 5.0, 51.0, 25.0, 1.5, 23.0),
     "tags": ["contains-gluten", "contains-egg"], "aliases": ["doughnut"]},
    {"id": "cake", "canonical_name": "cake", "category": "baked",
     "glycemic_index": 72,
     "nutrients": nutrients(371, 5.4, 53.0, 15.0, 0.8, 35.0),
     "tags": ["contains-gluten", "contains-egg", "contains-dairy"], "aliases": []},
    {"id": "hot-dog", "canonical_name": "hot dog", "category": "prepared",
     "glycemic_index": 48,
     "nutrients": nutrients(290, 10.0, 18.0, 17.0, 1.0, 4.0,
                            {"sodium": {"amount": 810, "unit": "mg"}}),
     "tags": ["contains-meat", "contains-gluten"], "aliases": ["hotdog", "frankfurter"]},
]

COCO_MINI = {
    "images": [
        {"id": 1, "file_name": "fixture_pizza.jpg", "width": 512, "height": 512},
        {"id": 2, "file_name": "fixture_fruit.jpg", "width": 640, "height": 480},
        {"id": 3, "file_name": "fixture_street.jpg", "width": 512, "height": 384},
    ],
    "annotations": [
        {"id": 1, "image_id": 1, "category_id": 53, "bbox": [100, 120, 200, 160],
         "area": 32000, "iscrowd": 0},
        {"id": 2, "image_id": 1, "category_id": 57, "bbox": [330, 300, 80, 40],
         "area": 3200, "iscrowd": 0},
        {"id": 3, "image_id": 2, "category_id": 52, "bbox": [50, 60, 120, 90],
         "area": 10800, "iscrowd": 0},
        {"id": 4, "image_id": 2, "category_id": 53, "bbox": [300, 200, 180, 150],
         "area": 27000, "iscrowd": 0},
        {"id": 5, "image_id": 3, "category_id": 3, "bbox": [10, 100, 300, 150],
         "area": 45000, "iscrowd": 0},
    ],
    "categories": [
        {"id": 52, "name": "banana", "supercategory": "food"},
        {"id": 53, "name": "pizza", "supercategory": "food"},
        {"id": 57, "name": "carrot", "supercategory": "food"},
        {"id": 3, "name": "car", "supercategory": "vehicle"},
    ],
}

# (item_id, number of 5s; remainder are 4s) -> chosen so sums reproduce the
# reported per-item means over 385 respondents
LIKERT_ITEMS = [
    ("user-friendliness", 77),        # sum 1617 -> 4.20
    ("recommendation-accuracy", 50),  # sum 1590 -> 4.13
    ("personalized-guidance", 15),    # sum 1555 -> 4.04
    ("privacy-trust", 180),           # sum 1720 -> 4.47
    ("contentment", 200),             # sum 1740 -> 4.52
    ("recommend-likelihood", 146),    # sum 1686 -> 4.38
]

RESTRICTION_MAP = """\
# restriction -> comma-separated forbidden food tags (version 1)
nut-allergy = contains-nuts
gluten-free = contains-gluten
vegetarian = contains-meat, contains-fish
vegan = contains-meat, contains-fish, contains-dairy, contains-egg, contains-honey
lactose-free = contains-dairy
"""


def write_survey(path):
    n = 385
    lines = []
    for item_id, fives in LIKERT_ITEMS:
        for i in range(1, n + 1):
            rating = 5 if i <= fives else 4
            lines.append({"respondent_id": f"r{i:03d}", "item_id": item_id,
                          "rating": rating})
    # image-recognition-speed: 250 of 385 rate >=4 (65% satisfied share)
    for i in range(1, n + 1):
        rating = 4 if i <= 250 else 3
        lines.append({"respondent_id": f"r{i:03d}",
                      "item_id": "image-recognition-speed", "rating": rating})
    # nps item: 220 promoters / 104 passives / 61 detractors -> 41.3
    for i in range(1, n + 1):
        if i <= 110:
            rating = 5
        elif i <= 220:
            rating = 4
        elif i <= 324:
            rating = 3
        elif i <= 345:
            rating = 2
        elif i <= 365:
            rating = 1
        else:
            rating = 0
        lines.append({"respondent_id": f"r{i:03d}", "item_id": "nps-recommend",
                      "rating": rating})
    with open(path, "w", encoding="utf-8") as fh:
        for record in lines:
            fh.write(json.dumps(record) + "\n")


def write_golden_split(directory):
    result = split(list(range(1, GOLDEN_N + 1)),
                   SplitSpec(fractions=(0.70, 0.15, 0.15), seed=GOLDEN_SEED))
    directory.mkdir(parents=True, exist_ok=True)
    for bucket in ("train", "val", "test"):
        ids = getattr(result, bucket)
        (directory / f"{bucket}.txt").write_text(
            "\n".join(str(i) for i in ids) + "\n", encoding="utf-8")


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    with open(FIXTURES / "seed_catalog.jsonl", "w", encoding="utf-8") as fh:
        for record in SEED_CATALOG:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    (FIXTURES / "coco_mini.json").write_text(
        json.dumps(COCO_MINI, indent=2) + "\n", encoding="utf-8")
    (FIXTURES / "restriction-map.conf").write_text(RESTRICTION_MAP, encoding="utf-8")
    write_survey(FIXTURES / "survey_responses.jsonl")
    write_golden_split(FIXTURES / "golden_split")
    print("fixtures written to", FIXTURES)


if __name__ == "__main__":
    main()

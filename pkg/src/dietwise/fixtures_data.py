"""Accessors for the bundled fixtures (seed catalog, mini COCO corpus,
survey responses, golden split, restriction map)."""

from __future__ import annotations

import json
from importlib import resources

from .analytics import SurveyResponse


def _read_text(name: str) -> str:
    return resources.files("dietwise.fixtures").joinpath(name).read_text(encoding="utf-8")


def seed_catalog_text() -> str:
    return _read_text("seed_catalog.jsonl")


def coco_mini_text() -> str:
    return _read_text("coco_mini.json")


def restriction_map_text() -> str:
    return _read_text("restriction-map.conf")


def survey_responses() -> list[SurveyResponse]:
    rows = []
    for line in _read_text("survey_responses.jsonl").splitlines():
        if line.strip():
            record = json.loads(line)
            rows.append(SurveyResponse(respondent_id=record["respondent_id"],
                                       item_id=record["item_id"],
                                       rating=int(record["rating"])))
    return rows


def golden_split_ids(bucket: str) -> list[int]:
    text = _read_text(f"golden_split/{bucket}.txt")
    return [int(line) for line in text.split()]

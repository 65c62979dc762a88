"""Grounded-detection boundary.

Two detectors share one contract: a deterministic reference detector that
grounds prompt phrases against COCO ground-truth annotations (exact by
construction, used for fixtures and end-to-end tests), and an HTTP client
for an external detector speaking the documented wire protocol.
"""

from __future__ import annotations

import base64
import time
from dataclasses import dataclass

import httpx

from . import coco
from .analytics import ConfusionCounts
from .errors import (DetectorUnavailableError, ProtocolError, UpstreamError,
                     ValidationError)
from .nutrition import fold_label

DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True)
class Prompt:
    phrases: tuple[str, ...]

    def validate(self) -> None:
        for phrase in self.phrases:
            if not phrase.strip():
                raise ValidationError("prompt phrases must be nonempty")


@dataclass(frozen=True)
class DetectionBox:
    bbox: tuple[float, float, float, float]
    label: str
    confidence: float

    def validate(self) -> None:
        x, y, w, h = self.bbox
        if w <= 0 or h <= 0:
            raise ValidationError(f"bbox {self.bbox} has non-positive dimensions")
        if not 0 < self.confidence <= 1:
            raise ValidationError(f"confidence {self.confidence} outside (0, 1]")


@dataclass(frozen=True)
class DetectionResult:
    image_ref: str
    boxes: tuple[DetectionBox, ...]
    detector_id: str
    latency_ms: float


@dataclass(frozen=True)
class ExternalDetectorConfig:
    endpoint: str
    timeout_ms: int
    auth_token: str | None = None

    def validate(self) -> None:
        if self.timeout_ms <= 0:
            raise ValidationError("timeout_ms must be positive")
        if not self.endpoint:
            raise ValidationError("endpoint must be nonempty")


def sort_boxes(boxes) -> tuple[DetectionBox, ...]:
    """Descending confidence, ties by (x, y) ascending."""
    return tuple(sorted(boxes, key=lambda b: (-b.confidence, b.bbox[0], b.bbox[1])))


def match_score(category_name: str, phrase: str) -> float:
    """Jaccard similarity of case/plural-folded token sets."""
    if not category_name.strip() or not phrase.strip():
        raise ValidationError("category name and phrase must be nonempty")
    a = {fold_label(t) for t in category_name.split()}
    b = {fold_label(t) for t in phrase.split()}
    union = a | b
    return len(a & b) / len(union) if union else 0.0


def detect_reference(dataset: coco.CocoDataset, image_id: int, prompt: Prompt,
                     threshold: float = DEFAULT_THRESHOLD) -> DetectionResult:
    """Ground prompt phrases against the image's ground-truth annotations.

    Each annotation becomes a box labeled with the best-matching phrase,
    confidence = that match score, kept only above the threshold.
    """
    prompt.validate()
    dataset.image_by_id(image_id)  # raises NotFoundError for unknown ids
    boxes = []
    for ann in dataset.annotations_for_image(image_id):
        category = dataset.category_by_id(ann.category_id)
        best_phrase, best_score = None, 0.0
        for phrase in prompt.phrases:
            score = match_score(category.name, phrase)
            if score > best_score:
                best_phrase, best_score = phrase, score
        if best_phrase is not None and best_score > threshold:
            boxes.append(DetectionBox(bbox=ann.bbox, label=best_phrase,
                                      confidence=best_score))
    return DetectionResult(image_ref=str(image_id), boxes=sort_boxes(boxes),
                           detector_id="reference", latency_ms=0.0)


def normalize_remote_result(payload: dict, image_ref: str,
                            latency_ms: float) -> DetectionResult:
    """Validate a wire response and re-sort boxes into contract order."""
    if not isinstance(payload, dict):
        raise ProtocolError("response body must be an object")
    detector_id = payload.get("detector_id")
    if not isinstance(detector_id, str) or not detector_id:
        raise ProtocolError("field detector_id missing or not a nonempty string")
    raw_boxes = payload.get("boxes")
    if not isinstance(raw_boxes, list):
        raise ProtocolError("field boxes missing or not a list")
    boxes = []
    for i, raw in enumerate(raw_boxes):
        try:
            box = DetectionBox(
                bbox=(float(raw["x"]), float(raw["y"]),
                      float(raw["w"]), float(raw["h"])),
                label=str(raw["label"]),
                confidence=float(raw["confidence"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"boxes[{i}]: malformed field ({exc})") from exc
        try:
            box.validate()
        except ValidationError as exc:
            raise ProtocolError(f"boxes[{i}]: {exc.message}") from exc
        boxes.append(box)
    return DetectionResult(image_ref=image_ref, boxes=sort_boxes(boxes),
                           detector_id=detector_id, latency_ms=latency_ms)


def detect_remote(config: ExternalDetectorConfig, image_bytes: bytes,
                  prompt: Prompt, threshold: float = DEFAULT_THRESHOLD,
                  image_ref: str = "upload") -> DetectionResult:
    config.validate()
    prompt.validate()
    body = {
        "image": base64.b64encode(image_bytes).decode("ascii"),
        "prompts": list(prompt.phrases),
        "threshold": threshold,
    }
    headers = {}
    if config.auth_token:
        headers["Authorization"] = f"Bearer {config.auth_token}"
    started = time.monotonic()
    try:
        response = httpx.post(f"{config.endpoint}/detect", json=body,
                              headers=headers, timeout=config.timeout_ms / 1000.0)
    except httpx.TimeoutException as exc:
        raise DetectorUnavailableError(
            f"detector did not answer within {config.timeout_ms} ms") from exc
    except httpx.TransportError as exc:
        raise DetectorUnavailableError(f"detector unreachable: {exc}") from exc
    latency_ms = (time.monotonic() - started) * 1000.0
    if response.status_code != 200:
        raise UpstreamError(
            f"detector returned status {response.status_code}", response.status_code)
    try:
        payload = response.json()
    except ValueError as exc:
        raise ProtocolError("response body is not valid JSON") from exc
    return normalize_remote_result(payload, image_ref, latency_ms)


def evaluate_detector(dataset: coco.CocoDataset, split_ids, detect_fn,
                      threshold: float = DEFAULT_THRESHOLD) -> ConfusionCounts:
    """Image-level confusion counts with precedence TP > FN > FP > TN.

    detect_fn(image_id) -> DetectionResult. An image is TP if some box's
    label matches one of its food ground-truth categories, FN if it has
    food ground truth none of which is matched, FP if a box matches no
    ground truth on a food-free image, else TN.
    """
    image_ids = {img.id for img in dataset.images}
    missing = [i for i in split_ids if i not in image_ids]
    if missing:
        raise ValidationError(f"split ids not in dataset: {missing[:5]}")
    food_ids = {c.id for c in dataset.categories if c.supercategory == "food"}
    tp = tn = fp = fn = 0
    for image_id in split_ids:
        truth_labels = {
            dataset.category_by_id(a.category_id).name
            for a in dataset.annotations_for_image(image_id)
            if a.category_id in food_ids
        }
        result = detect_fn(image_id)
        box_labels = {box.label for box in result.boxes if box.confidence > threshold}

        def label_matches_truth(label: str) -> bool:
            # label-level match: identical token sets after folding
            return any(match_score(truth, label) == 1.0 for truth in truth_labels)

        matched = any(label_matches_truth(lbl) for lbl in box_labels)
        unmatched_box = any(not label_matches_truth(lbl) for lbl in box_labels)
        if truth_labels and matched:
            tp += 1
        elif truth_labels:
            fn += 1
        elif unmatched_box:
            fp += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)

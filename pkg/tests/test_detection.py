import pytest

from dietwise.coco import filter_food
from dietwise.detection import (DetectionBox, ExternalDetectorConfig, Prompt,
                                detect_reference, detect_remote,
                                evaluate_detector, match_score,
                                normalize_remote_result, sort_boxes)
from dietwise.errors import (DetectorUnavailableError, NotFoundError,
                             ProtocolError, UpstreamError, ValidationError)

from stub_detector import StubDetectorServer

FOOD_PROMPT = Prompt(phrases=("banana", "pizza", "carrot"))


class TestMatchScore:
    def test_identical(self):
        assert match_score("hot dog", "hot dog") == 1.0

    def test_partial_overlap(self):
        assert match_score("hot dog", "dog") == 0.5

    def test_disjoint(self):
        assert match_score("pizza", "sushi") == 0.0

    def test_plural_and_case_folding(self):
        assert match_score("Donuts", "donut") == 1.0

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            match_score("", "pizza")


class TestDetectReference:
    def test_exact_match_grounding(self, mini_dataset):
        result = detect_reference(mini_dataset, 1, Prompt(("pizza",)), 0.5)
        assert len(result.boxes) == 1
        box = result.boxes[0]
        assert box.label == "pizza"
        assert box.confidence == 1.0
        assert box.bbox == (100, 120, 200, 160)

    def test_empty_prompt(self, mini_dataset):
        result = detect_reference(mini_dataset, 1, Prompt(()), 0.5)
        assert result.boxes == ()

    def test_selective_prompt(self, mini_dataset):
        result = detect_reference(mini_dataset, 1, Prompt(("carrot",)), 0.5)
        assert [b.label for b in result.boxes] == ["carrot"]
        assert result.boxes[0].bbox == (330, 300, 80, 40)

    def test_unknown_image(self, mini_dataset):
        with pytest.raises(NotFoundError):
            detect_reference(mini_dataset, 99, FOOD_PROMPT, 0.5)

    def test_boxes_only_from_ground_truth(self, mini_dataset):
        truth = {a.bbox for a in mini_dataset.annotations_for_image(2)}
        result = detect_reference(mini_dataset, 2, FOOD_PROMPT, 0.1)
        assert all(box.bbox in truth for box in result.boxes)

    def test_threshold_monotonicity(self, mini_dataset):
        counts = [len(detect_reference(mini_dataset, 1, FOOD_PROMPT, t).boxes)
                  for t in (0.0, 0.3, 0.6, 0.9)]
        assert counts == sorted(counts, reverse=True)

    def test_ordering_invariant(self, mini_dataset):
        result = detect_reference(mini_dataset, 1, FOOD_PROMPT, 0.0)
        keys = [(-b.confidence, b.bbox[0], b.bbox[1]) for b in result.boxes]
        assert keys == sorted(keys)


class TestRemoteNormalization:
    def test_resort_out_of_order_boxes(self):
        payload = {"detector_id": "x", "boxes": [
            {"x": 1, "y": 1, "w": 5, "h": 5, "label": "a", "confidence": 0.4},
            {"x": 2, "y": 2, "w": 5, "h": 5, "label": "b", "confidence": 0.9},
        ]}
        result = normalize_remote_result(payload, "img", 1.0)
        assert [b.label for b in result.boxes] == ["b", "a"]

    def test_confidence_out_of_range(self):
        payload = {"detector_id": "x", "boxes": [
            {"x": 1, "y": 1, "w": 5, "h": 5, "label": "a", "confidence": 1.7}]}
        with pytest.raises(ProtocolError, match="boxes\\[0\\]"):
            normalize_remote_result(payload, "img", 1.0)

    def test_missing_field(self):
        with pytest.raises(ProtocolError, match="detector_id"):
            normalize_remote_result({"boxes": []}, "img", 1.0)

    def test_idempotent_on_valid_result(self):
        payload = {"detector_id": "x", "boxes": [
            {"x": 2, "y": 2, "w": 5, "h": 5, "label": "b", "confidence": 0.9},
            {"x": 1, "y": 1, "w": 5, "h": 5, "label": "a", "confidence": 0.4},
        ]}
        once = normalize_remote_result(payload, "img", 1.0)
        again = normalize_remote_result({
            "detector_id": once.detector_id,
            "boxes": [{"x": b.bbox[0], "y": b.bbox[1], "w": b.bbox[2],
                       "h": b.bbox[3], "label": b.label,
                       "confidence": b.confidence} for b in once.boxes],
        }, "img", once.latency_ms)
        assert again.boxes == once.boxes


class TestDetectRemote:
    def test_round_trip_with_resort(self):
        payload = {"detector_id": "stub", "boxes": [
            {"x": 9, "y": 9, "w": 4, "h": 4, "label": "low", "confidence": 0.2},
            {"x": 0, "y": 0, "w": 4, "h": 4, "label": "high", "confidence": 0.8},
        ]}
        with StubDetectorServer(payload=payload) as stub:
            config = ExternalDetectorConfig(endpoint=stub.endpoint, timeout_ms=2000)
            result = detect_remote(config, b"bytes", Prompt(("pizza",)))
        assert [b.label for b in result.boxes] == ["high", "low"]
        assert result.latency_ms >= 0

    def test_timeout(self):
        with StubDetectorServer(delay_s=1.0) as stub:
            config = ExternalDetectorConfig(endpoint=stub.endpoint, timeout_ms=100)
            with pytest.raises(DetectorUnavailableError):
                detect_remote(config, b"bytes", Prompt(("pizza",)))

    def test_upstream_failure(self):
        with StubDetectorServer(status=500) as stub:
            config = ExternalDetectorConfig(endpoint=stub.endpoint, timeout_ms=2000)
            with pytest.raises(UpstreamError) as info:
                detect_remote(config, b"bytes", Prompt(("pizza",)))
        assert info.value.status == 500

    def test_malformed_response(self):
        payload = {"detector_id": "stub", "boxes": [
            {"x": 0, "y": 0, "w": 4, "h": 4, "label": "a", "confidence": 1.7}]}
        with StubDetectorServer(payload=payload) as stub:
            config = ExternalDetectorConfig(endpoint=stub.endpoint, timeout_ms=2000)
            with pytest.raises(ProtocolError):
                detect_remote(config, b"bytes", Prompt(("pizza",)))

    def test_wire_request_shape(self):
        with StubDetectorServer() as stub:
            config = ExternalDetectorConfig(endpoint=stub.endpoint, timeout_ms=2000,
                                            auth_token="sekrit")
            detect_remote(config, b"img", Prompt(("pizza", "carrot")), 0.4)
            path, body = stub.requests[0]
        assert path == "/detect"
        assert body["prompts"] == ["pizza", "carrot"]
        assert body["threshold"] == 0.4
        assert "image" in body


class TestEvaluateDetector:
    def _reference_fn(self, dataset, prompt, threshold):
        return lambda image_id: detect_reference(dataset, image_id, prompt, threshold)

    def test_surrogate_exactness_over_food_fixture(self, mini_dataset):
        food = filter_food(mini_dataset)
        prompt = Prompt(tuple(sorted(c.name for c in food.categories)))
        counts = evaluate_detector(food, [img.id for img in food.images],
                                   self._reference_fn(food, prompt, 0.5), 0.5)
        assert counts.fp == 0 and counts.fn == 0
        assert counts.tp == len(food.images)

    def test_full_fixture_includes_tn(self, mini_dataset):
        food_names = tuple(sorted(c.name for c in mini_dataset.categories
                                  if c.supercategory == "food"))
        prompt = Prompt(food_names)
        counts = evaluate_detector(
            mini_dataset, [img.id for img in mini_dataset.images],
            self._reference_fn(mini_dataset, prompt, 0.5), 0.5)
        assert (counts.tp, counts.tn, counts.fp, counts.fn) == (2, 1, 0, 0)

    def test_empty_split(self, mini_dataset):
        counts = evaluate_detector(mini_dataset, [],
                                   self._reference_fn(mini_dataset, FOOD_PROMPT, 0.5),
                                   0.5)
        assert (counts.tp, counts.tn, counts.fp, counts.fn) == (0, 0, 0, 0)

    def test_counts_sum_to_split_size(self, mini_dataset):
        ids = [img.id for img in mini_dataset.images]
        counts = evaluate_detector(mini_dataset, ids,
                                   self._reference_fn(mini_dataset, FOOD_PROMPT, 0.5),
                                   0.5)
        assert counts.total == len(ids)

    def test_unknown_ids_rejected(self, mini_dataset):
        with pytest.raises(ValidationError):
            evaluate_detector(mini_dataset, [1, 77],
                              self._reference_fn(mini_dataset, FOOD_PROMPT, 0.5), 0.5)


def test_sort_boxes_ties_by_position():
    boxes = [DetectionBox((5, 0, 1, 1), "b", 0.5),
             DetectionBox((1, 9, 1, 1), "a", 0.5),
             DetectionBox((1, 2, 1, 1), "c", 0.5)]
    ordered = sort_boxes(boxes)
    assert [b.label for b in ordered] == ["c", "a", "b"]

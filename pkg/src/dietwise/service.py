"""HTTP application server: auth, profiles, scanning, food lookup,
surveys, evaluation, and telemetry exposition.

All routes live under /api/v1 and return {code, message, retriable}
bodies on failure. The app refuses to start without a master key, and
without TLS material unless insecure_dev is set.
"""

from __future__ import annotations

import base64
import io
import threading
import time
from dataclasses import dataclass

from fastapi import FastAPI, Header, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import analytics, coco, detection, fixtures_data, recommend, security
from .errors import (AuthenticationError, AuthorizationError, ConfigurationError,
                     DietwiseError, NotFoundError, UpstreamError, ValidationError)
from .nutrition import FileCatalog, MemoryCatalog, food_item_to_dict
from .profiles import DEFAULT_SCRYPT_N, DEFAULT_SESSION_TTL_S, ProfileStore
from .telemetry import TelemetryRegistry

NPS_ITEM_ID = "nps-recommend"

STATUS_BY_CODE = {
    "validation": 400,
    "parse": 400,
    "authentication": 401,
    "authorization": 403,
    "not_found": 404,
    "conflict": 409,
    "undefined_metric": 422,
    "protocol": 502,
    "upstream": 502,
    "detector_unavailable": 503,
    "configuration": 503,
    "internal": 500,
}


@dataclass
class AppConfig:
    master_key: security.MasterKeyConfig
    insecure_dev: bool = False
    tls: security.TlsConfig | None = None
    catalog_path: str | None = None          # None -> in-memory
    profiles_path: str | None = None
    dataset_text: str | None = None          # None -> bundled mini fixture
    detector_mode: str = "reference"         # reference | remote
    remote_detector: detection.ExternalDetectorConfig | None = None
    detection_threshold: float = detection.DEFAULT_THRESHOLD
    split_seed: int = 42
    split_fractions: tuple[float, float, float] = (0.70, 0.15, 0.15)
    session_ttl_s: float = DEFAULT_SESSION_TTL_S
    scrypt_n: int = DEFAULT_SCRYPT_N
    admin_users: tuple[str, ...] = ()
    static_dir: str | None = None            # built web UI, served at /


class RegisterBody(BaseModel):
    name: str
    secret: str
    conditions: list[str] = []
    restrictions: list[str] = []
    goals: list[str] = []


class LoginBody(BaseModel):
    name: str
    secret: str


class ProfileBody(BaseModel):
    conditions: list[str] | None = None
    restrictions: list[str] | None = None
    goals: list[str] | None = None
    display_name: str | None = None


class ScanBody(BaseModel):
    image_b64: str | None = None
    fixture_image_id: int | None = None
    prompts: list[str]
    threshold: float | None = None


class SurveyItemBody(BaseModel):
    item_id: str
    rating: int


class SurveySubmitBody(BaseModel):
    responses: list[SurveyItemBody]


def _error_response(exc: DietwiseError) -> JSONResponse:
    status = STATUS_BY_CODE.get(exc.code, 500)
    if isinstance(exc, UpstreamError):
        status = 502
    return JSONResponse(status_code=status, content={
        "code": exc.code, "message": exc.message, "retriable": exc.retriable})


def _bearer_token(authorization: str | None) -> str:
    if not authorization or not authorization.startswith("Bearer "):
        raise AuthenticationError("missing bearer token")
    return authorization.removeprefix("Bearer ")


def _profile_to_api(profile) -> dict:
    return {
        "user_id": profile.user_id,
        "display_name": profile.display_name,
        "conditions": sorted(profile.conditions),
        "restrictions": sorted(profile.restrictions),
        "goals": sorted(profile.goals),
        "is_admin": profile.is_admin,
    }


def _recommendation_to_api(rec: recommend.Recommendation, catalog) -> dict:
    item = catalog.get(rec.food_id)
    return {
        "food_id": rec.food_id,
        "food_name": item.canonical_name,
        "verdict": rec.verdict.verdict,
        "reasons": [{"code": r.code, "text": r.text} for r in rec.verdict.reasons],
        "glycemic_class": rec.glycemic.label,
        "glycemic_index": item.glycemic_index,
        "nutrients": food_item_to_dict(item)["nutrients"],
        "alternatives": [
            {"food_id": alt_id,
             "food_name": catalog.get(alt_id).canonical_name,
             "glycemic_index": catalog.get(alt_id).glycemic_index}
            for alt_id in rec.alternatives
        ],
    }


def _detection_to_api(result: detection.DetectionResult) -> dict:
    return {
        "image_ref": result.image_ref,
        "detector_id": result.detector_id,
        "latency_ms": result.latency_ms,
        "boxes": [{"x": b.bbox[0], "y": b.bbox[1], "w": b.bbox[2], "h": b.bbox[3],
                   "label": b.label, "confidence": b.confidence}
                  for b in result.boxes],
    }


class SurveyStore:
    """Appends survey responses; reads are snapshots."""

    def __init__(self):
        self._lock = threading.Lock()
        self._responses: list[analytics.SurveyResponse] = []

    def add(self, responses: list[analytics.SurveyResponse]) -> None:
        for resp in responses:
            if resp.item_id == NPS_ITEM_ID:
                lo, hi = analytics.NPS_MIN, analytics.NPS_MAX
            else:
                lo, hi = analytics.LIKERT_MIN, analytics.LIKERT_MAX
            if not lo <= resp.rating <= hi:
                raise ValidationError(
                    f"rating {resp.rating} for item {resp.item_id!r} outside [{lo}, {hi}]")
        with self._lock:
            self._responses.extend(responses)

    def snapshot(self) -> list[analytics.SurveyResponse]:
        with self._lock:
            return list(self._responses)


def create_app(config: AppConfig) -> FastAPI:
    if config.master_key is None:
        raise ConfigurationError("refusing to start: no master key configured")
    if not config.insecure_dev:
        if config.tls is None:
            raise ConfigurationError(
                "refusing to start: TLS material not configured "
                "(set tls.cert_path/tls.key_path or pass --insecure-dev)")
        config.tls.validate()
    if config.detector_mode not in ("reference", "remote"):
        raise ConfigurationError(f"unknown detector mode {config.detector_mode!r}")
    if config.detector_mode == "remote" and config.remote_detector is None:
        raise ConfigurationError("remote detector mode needs an endpoint config")

    catalog = FileCatalog(config.catalog_path) if config.catalog_path else MemoryCatalog()
    if not catalog.all_items():
        catalog.load_seed(fixtures_data.seed_catalog_text())
    profiles = ProfileStore(config.master_key, path=config.profiles_path,
                            session_ttl_s=config.session_ttl_s,
                            scrypt_n=config.scrypt_n)
    dataset = coco.parse_coco(config.dataset_text or fixtures_data.coco_mini_text())
    restriction_map = recommend.parse_restriction_map(fixtures_data.restriction_map_text())
    surveys = SurveyStore()
    telemetry = TelemetryRegistry()

    # committed evaluation splits: food images only, per the corpus pipeline
    food_dataset = coco.filter_food(dataset)
    eval_source = dataset  # eval runs over full images so TN images count
    split_result = coco.split([img.id for img in dataset.images],
                              coco.SplitSpec(fractions=config.split_fractions,
                                             seed=config.split_seed))
    food_prompt = detection.Prompt(phrases=tuple(sorted(
        c.name for c in dataset.categories if c.supercategory == "food")))

    app = FastAPI(title="dietwise", version="0.1.0")
    app.state.catalog = catalog
    app.state.profiles = profiles
    app.state.dataset = dataset
    app.state.food_dataset = food_dataset
    app.state.surveys = surveys
    app.state.telemetry = telemetry
    app.state.config = config
    app.state.split_result = split_result

    for route in ("/api/v1/auth/register", "/api/v1/auth/login", "/api/v1/profile",
                  "/api/v1/scan", "/api/v1/survey/responses", "/api/v1/survey/summary",
                  "/api/v1/eval/report", "/api/v1/metrics"):
        telemetry.register_endpoint(route)

    @app.exception_handler(DietwiseError)
    async def dietwise_error_handler(request: Request, exc: DietwiseError):
        return _error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def body_validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={
            "code": "validation", "message": str(exc.errors()), "retriable": False})

    @app.middleware("http")
    async def telemetry_middleware(request: Request, call_next):
        endpoint = request.url.path
        # the exposition request itself must not perturb the gauge it reports
        track_in_flight = endpoint not in ("/metrics", "/api/v1/metrics")
        if track_in_flight:
            telemetry.request_started()
        started = time.monotonic()
        try:
            response = await call_next(request)
        finally:
            if track_in_flight:
                telemetry.request_finished()
        telemetry.observe_request(endpoint, response.status_code,
                                  (time.monotonic() - started) * 1000.0)
        return response

    # -- auth + profile ---------------------------------------------------

    @app.post("/api/v1/auth/register", status_code=201)
    def register(body: RegisterBody):
        user_id = profiles.register(
            body.name, body.secret,
            conditions=body.conditions, restrictions=body.restrictions,
            goals=body.goals,
            is_admin=body.name.casefold() in
            {n.casefold() for n in config.admin_users})
        return {"user_id": user_id}

    @app.post("/api/v1/auth/login")
    def login(body: LoginBody):
        session = profiles.login(body.name, body.secret)
        return {"token": session.token, "expires_at": session.expires_at}

    @app.get("/api/v1/profile")
    def get_profile(authorization: str | None = Header(default=None)):
        profile = profiles.authenticate(_bearer_token(authorization))
        return _profile_to_api(profile)

    @app.put("/api/v1/profile")
    def put_profile(body: ProfileBody,
                    authorization: str | None = Header(default=None)):
        profile = profiles.update_profile(
            _bearer_token(authorization),
            conditions=body.conditions, restrictions=body.restrictions,
            goals=body.goals, display_name=body.display_name)
        return _profile_to_api(profile)

    # -- foods ------------------------------------------------------------

    @app.get("/api/v1/foods/{food_id}")
    def get_food(food_id: str):
        item = catalog.get(food_id)
        if item is None:
            raise NotFoundError(f"no food with id {food_id!r}")
        return food_item_to_dict(item)

    # -- scan -------------------------------------------------------------

    def _detect_for_scan(body: ScanBody, threshold: float) -> detection.DetectionResult:
        prompt = detection.Prompt(phrases=tuple(body.prompts))
        if body.fixture_image_id is not None:
            return detection.detect_reference(dataset, body.fixture_image_id,
                                              prompt, threshold)
        if config.detector_mode != "remote" or config.remote_detector is None:
            raise ConfigurationError(
                "image uploads need a remote detector; this server only "
                "serves fixture scans")
        raw = base64.b64decode(body.image_b64)
        image_bytes = _resize_upload(raw)
        return detection.detect_remote(config.remote_detector, image_bytes,
                                       prompt, threshold)

    @app.post("/api/v1/scan")
    def scan(body: ScanBody, authorization: str | None = Header(default=None)):
        profile = profiles.authenticate(_bearer_token(authorization))
        sources = [s for s in (body.image_b64, body.fixture_image_id) if s is not None]
        if len(sources) != 1:
            raise ValidationError(
                "exactly one of image_b64 or fixture_image_id is required")
        threshold = body.threshold if body.threshold is not None \
            else config.detection_threshold
        result = _detect_for_scan(body, threshold)
        recommendations, unrecognized = recommend.recommend_for_scan(
            profile, result, catalog, restriction_map)
        return {
            "detections": _detection_to_api(result),
            "recommendations": [_recommendation_to_api(r, catalog)
                                for r in recommendations],
            "unrecognized_labels": unrecognized,
        }

    # -- surveys ----------------------------------------------------------

    @app.post("/api/v1/survey/responses", status_code=201)
    def survey_submit(body: SurveySubmitBody,
                      authorization: str | None = Header(default=None)):
        profile = profiles.authenticate(_bearer_token(authorization))
        surveys.add([
            analytics.SurveyResponse(respondent_id=profile.user_id,
                                     item_id=item.item_id, rating=item.rating)
            for item in body.responses])
        return {"stored": len(body.responses)}

    @app.get("/api/v1/survey/summary")
    def survey_summary(authorization: str | None = Header(default=None)):
        profile = profiles.authenticate(_bearer_token(authorization))
        if not profile.is_admin:
            raise AuthorizationError("survey summary requires an admin session")
        return survey_summary_payload(surveys.snapshot())

    # -- evaluation -------------------------------------------------------

    @app.get("/api/v1/eval/report")
    def eval_report(split: str = "val", threshold: float | None = None):
        if dataset is None:
            raise ConfigurationError("no dataset configured")
        if split not in ("val", "test"):
            raise ValidationError("split must be val or test")
        eff_threshold = threshold if threshold is not None else config.detection_threshold
        split_ids = getattr(split_result, split)
        counts = detection.evaluate_detector(
            eval_source, split_ids,
            lambda image_id: detection.detect_reference(
                eval_source, image_id, food_prompt, eff_threshold),
            eff_threshold)
        report = analytics.compute_metrics(counts)
        return {
            "split": split,
            "counts": {"tp": counts.tp, "tn": counts.tn,
                       "fp": counts.fp, "fn": counts.fn},
            "metrics": {"precision": report.precision, "recall": report.recall,
                        "accuracy": report.accuracy, "f1": report.f1},
            "rendered": report.as_percentages(),
        }

    # -- telemetry --------------------------------------------------------

    @app.get("/api/v1/metrics")
    @app.get("/metrics")
    def metrics():
        return PlainTextResponse(telemetry.render(),
                                 media_type="text/plain; version=0.0.4")

    if config.static_dir:
        app.mount("/", StaticFiles(directory=config.static_dir, html=True),
                  name="webapp")

    return app


def survey_summary_payload(responses: list[analytics.SurveyResponse]) -> dict:
    likert = [r for r in responses if r.item_id != NPS_ITEM_ID]
    nps_ratings = [r.rating for r in responses if r.item_id == NPS_ITEM_ID]
    payload: dict = {"likert": analytics.likert_summary(likert)}
    if nps_ratings:
        breakdown = analytics.nps(nps_ratings)
        payload["nps"] = {
            "promoters": breakdown.promoters,
            "passives": breakdown.passives,
            "detractors": breakdown.detractors,
            "score": breakdown.score,
        }
    else:
        payload["nps"] = None
    return payload


def _resize_upload(raw: bytes) -> bytes:
    """Decode an uploaded image, stretch to 512x512, re-encode as PNG.

    Decoding is an implementation detail behind the image boundary;
    Pillow handles the common formats.
    """
    from PIL import Image  # deferred: only the upload path needs it
    import numpy as np

    from .preprocess import DEFAULT_TARGET, resize

    with Image.open(io.BytesIO(raw)) as img:
        array = np.asarray(img.convert("RGB"), dtype=np.float64)
    resized = resize(array, DEFAULT_TARGET)
    out = Image.fromarray(resized.round().clip(0, 255).astype("uint8"))
    buffer = io.BytesIO()
    out.save(buffer, format="PNG")
    return buffer.getvalue()

"""dietwise command line: serve the API, run dataset tooling, and compute
survey/evaluation figures without a server.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import analytics, coco, detection, fixtures_data, preprocess, security
from .errors import DietwiseError


@click.group()
def main():
    """Self-hosted dietary assistant."""


def _fail(exc: DietwiseError):
    click.echo(f"error [{exc.code}]: {exc.message}", err=True)
    sys.exit(1)


# -- serve ----------------------------------------------------------------

@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="JSON config file (store paths, detector mode, TLS, ...)")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8410, show_default=True)
@click.option("--key-file", type=click.Path(exists=True),
              help="file holding the 64-hex-char master key")
@click.option("--insecure-dev", is_flag=True,
              help="allow serving without TLS material (development only)")
def serve(config_path, host, port, key_file, insecure_dev):
    """Start the HTTP API server."""
    import uvicorn

    from .service import AppConfig, create_app

    raw = {}
    if config_path:
        raw = json.loads(Path(config_path).read_text(encoding="utf-8"))
    try:
        master_key = security.load_master_key(key_file or raw.get("key_file"))
        tls = None
        tls_raw = raw.get("tls")
        if tls_raw:
            tls = security.TlsConfig(cert_path=tls_raw["cert_path"],
                                     key_path=tls_raw["key_path"],
                                     min_version=str(tls_raw.get("min_version", "1.2")))
        remote = None
        remote_raw = raw.get("remote_detector")
        if remote_raw:
            remote = detection.ExternalDetectorConfig(
                endpoint=remote_raw["endpoint"],
                timeout_ms=int(remote_raw.get("timeout_ms", 5000)),
                auth_token=remote_raw.get("auth_token"))
        dataset_text = None
        if raw.get("dataset_path"):
            dataset_text = Path(raw["dataset_path"]).read_text(encoding="utf-8")
        config = AppConfig(
            master_key=master_key,
            insecure_dev=insecure_dev or bool(raw.get("insecure_dev")),
            tls=tls,
            catalog_path=raw.get("catalog_path"),
            profiles_path=raw.get("profiles_path"),
            dataset_text=dataset_text,
            detector_mode=raw.get("detector_mode", "reference"),
            remote_detector=remote,
            split_seed=int(raw.get("split_seed", 42)),
            admin_users=tuple(raw.get("admin_users", [])),
            scrypt_n=int(raw.get("scrypt_n", 2 ** 15)),
            static_dir=raw.get("static_dir"),
        )
        app = create_app(config)
    except DietwiseError as exc:
        _fail(exc)
    ssl_args = {}
    if config.tls is not None:
        ssl_args = {"ssl_certfile": config.tls.cert_path,
                    "ssl_keyfile": config.tls.key_path}
    uvicorn.run(app, host=host, port=port, **ssl_args)


# -- ingest ---------------------------------------------------------------

@main.group()
def ingest():
    """COCO annotation tooling."""


@ingest.command("parse")
@click.argument("file", type=click.Path(exists=True))
def ingest_parse(file):
    try:
        dataset = coco.parse_coco(Path(file).read_text(encoding="utf-8"))
    except DietwiseError as exc:
        _fail(exc)
    stats = coco.dataset_stats(dataset)
    click.echo(json.dumps(stats, indent=2))


@ingest.command("validate")
@click.argument("file", type=click.Path(exists=True))
def ingest_validate(file):
    try:
        dataset = coco.parse_coco(Path(file).read_text(encoding="utf-8"))
    except DietwiseError as exc:
        _fail(exc)
    findings = coco.validate(dataset)
    for finding in findings:
        click.echo(f"{finding.kind}: annotation {finding.annotation_id}: {finding.detail}")
    if findings:
        sys.exit(2)
    click.echo("clean")


@ingest.command("split")
@click.argument("file", type=click.Path(exists=True))
@click.option("--seed", default=42, show_default=True)
@click.option("--fractions", default="0.7,0.15,0.15", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
def ingest_split(file, seed, fractions, out_dir):
    """Write one id-list file per bucket into OUT."""
    try:
        dataset = coco.parse_coco(Path(file).read_text(encoding="utf-8"))
        parts = tuple(float(f) for f in fractions.split(","))
        result = coco.split([img.id for img in dataset.images],
                            coco.SplitSpec(fractions=parts, seed=seed))
    except DietwiseError as exc:
        _fail(exc)
    os.makedirs(out_dir, exist_ok=True)
    for bucket in ("train", "val", "test"):
        ids = getattr(result, bucket)
        path = Path(out_dir) / f"{bucket}.txt"
        path.write_text("\n".join(str(i) for i in ids) + ("\n" if ids else ""),
                        encoding="utf-8")
        click.echo(f"{bucket}: {len(ids)} ids -> {path}")


# -- eval -----------------------------------------------------------------

@main.command("eval")
@click.option("--dataset", "dataset_path", type=click.Path(exists=True),
              help="COCO file; defaults to the bundled mini fixture")
@click.option("--split-file", type=click.Path(exists=True),
              help="id-list file; defaults to all images")
@click.option("--threshold", default=0.5, show_default=True)
def eval_cmd(dataset_path, split_file, threshold):
    """Run the reference detector and report confusion metrics."""
    try:
        text = (Path(dataset_path).read_text(encoding="utf-8")
                if dataset_path else fixtures_data.coco_mini_text())
        dataset = coco.parse_coco(text)
        if split_file:
            ids = [int(line) for line in
                   Path(split_file).read_text(encoding="utf-8").split()]
        else:
            ids = [img.id for img in dataset.images]
        prompt = detection.Prompt(phrases=tuple(sorted(
            c.name for c in dataset.categories if c.supercategory == "food")))
        counts = detection.evaluate_detector(
            dataset, ids,
            lambda image_id: detection.detect_reference(dataset, image_id,
                                                        prompt, threshold),
            threshold)
        report = analytics.compute_metrics(counts)
    except DietwiseError as exc:
        _fail(exc)
    click.echo(json.dumps({
        "counts": {"tp": counts.tp, "tn": counts.tn, "fp": counts.fp, "fn": counts.fn},
        "rendered": report.as_percentages(),
    }, indent=2))


# -- analytics ------------------------------------------------------------

@main.group("analytics")
def analytics_group():
    """Survey and metric arithmetic."""


@analytics_group.command("metrics")
@click.option("--tp", required=True, type=int)
@click.option("--tn", required=True, type=int)
@click.option("--fp", required=True, type=int)
@click.option("--fn", required=True, type=int)
def analytics_metrics(tp, tn, fp, fn):
    try:
        report = analytics.compute_metrics(analytics.ConfusionCounts(tp, tn, fp, fn))
    except DietwiseError as exc:
        _fail(exc)
    click.echo(json.dumps(report.as_percentages(), indent=2))


@analytics_group.command("nps")
@click.argument("responses_file", type=click.Path(exists=True))
@click.option("--item", default="nps-recommend", show_default=True)
def analytics_nps(responses_file, item):
    """NPS over the given item in a line-delimited responses file."""
    ratings = []
    for line in Path(responses_file).read_text(encoding="utf-8").splitlines():
        if line.strip():
            record = json.loads(line)
            if record["item_id"] == item:
                ratings.append(int(record["rating"]))
    try:
        breakdown = analytics.nps(ratings)
    except DietwiseError as exc:
        _fail(exc)
    click.echo(json.dumps({
        "promoters": breakdown.promoters, "passives": breakdown.passives,
        "detractors": breakdown.detractors, "score": breakdown.score}, indent=2))


@analytics_group.command("sample-size")
@click.option("--z", required=True, type=float)
@click.option("--p", required=True, type=float)
@click.option("--e", required=True, type=float)
def analytics_sample_size(z, p, e):
    try:
        n = analytics.sample_size(analytics.SampleSizeSpec(z=z, p=p, e=e))
    except DietwiseError as exc:
        _fail(exc)
    click.echo(str(n))


# -- preprocess -----------------------------------------------------------

@main.group("preprocess")
def preprocess_group():
    """Image pipeline utilities (PNG/PPM via Pillow)."""


def _load_image(path: str):
    import numpy as np
    from PIL import Image

    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"), dtype=float)


@preprocess_group.command("stats")
@click.argument("image_dir", type=click.Path(exists=True, file_okay=False))
def preprocess_stats(image_dir):
    """Per-channel mean/std over every image in IMAGE_DIR."""
    paths = sorted(p for p in Path(image_dir).iterdir()
                   if p.suffix.lower() in (".png", ".ppm", ".jpg", ".jpeg"))
    try:
        mean, std = preprocess.compute_dataset_stats(_load_image(str(p)) for p in paths)
    except DietwiseError as exc:
        _fail(exc)
    click.echo(json.dumps({"mean": list(mean), "std": list(std),
                           "images": len(paths)}, indent=2))


@preprocess_group.command("apply")
@click.argument("image", type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--sample-index", default=0, show_default=True)
@click.option("--out", default=None, help="output PNG path")
def preprocess_apply(image, config_path, sample_index, out):
    """Resize + augment one image per the config file."""
    import numpy as np
    from PIL import Image

    cfg_raw = {}
    if config_path:
        cfg_raw = json.loads(Path(config_path).read_text(encoding="utf-8"))
    config = preprocess.PreprocessConfig(
        target=tuple(cfg_raw.get("target", preprocess.DEFAULT_TARGET)),
        flip_probability=cfg_raw.get("flip_probability", 0.5),
        crop_scale_range=tuple(cfg_raw.get("crop_scale_range", (0.8, 1.0))),
        brightness_delta_max=cfg_raw.get("brightness_delta_max", 25.0),
        hue_delta_max=cfg_raw.get("hue_delta_max", 0.05),
        seed=cfg_raw.get("seed", 0),
    )
    try:
        result = preprocess.augment(_load_image(image), config, sample_index)
    except DietwiseError as exc:
        _fail(exc)
    out = out or str(Path(image).with_suffix("")) + f".aug{sample_index}.png"
    Image.fromarray(np.asarray(result).round().clip(0, 255).astype("uint8")).save(out)
    click.echo(out)


if __name__ == "__main__":
    main()

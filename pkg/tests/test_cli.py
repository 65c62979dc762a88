import json
from importlib import resources
from pathlib import Path

from click.testing import CliRunner

from dietwise.cli import main

FIXTURES = resources.files("dietwise.fixtures")


def fixture_path(name):
    return str(FIXTURES.joinpath(name))


def test_ingest_parse():
    result = CliRunner().invoke(main, ["ingest", "parse",
                                       fixture_path("coco_mini.json")])
    assert result.exit_code == 0
    stats = json.loads(result.output)
    assert stats["totals"]["annotations"] == 5


def test_ingest_validate_clean():
    result = CliRunner().invoke(main, ["ingest", "validate",
                                       fixture_path("coco_mini.json")])
    assert result.exit_code == 0
    assert "clean" in result.output


def test_ingest_split_writes_bucket_files(tmp_path):
    result = CliRunner().invoke(main, [
        "ingest", "split", fixture_path("coco_mini.json"),
        "--seed", "5", "--fractions", "0.34,0.33,0.33",
        "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    ids = []
    for bucket in ("train", "val", "test"):
        ids.extend(int(line) for line in
                   (tmp_path / f"{bucket}.txt").read_text().split())
    assert sorted(ids) == [1, 2, 3]


def test_eval_command_on_fixture():
    result = CliRunner().invoke(main, ["eval"])
    assert result.exit_code == 0, result.output
    body = json.loads(result.output)
    assert body["counts"]["fp"] == 0 and body["counts"]["fn"] == 0


def test_analytics_metrics_renders_paper_figures():
    result = CliRunner().invoke(main, ["analytics", "metrics", "--tp", "1144",
                                       "--tn", "254", "--fp", "116", "--fn", "75"])
    assert result.exit_code == 0
    rendered = json.loads(result.output)
    assert rendered["precision"] == "90.79%"


def test_analytics_metrics_undefined_errors():
    result = CliRunner().invoke(main, ["analytics", "metrics", "--tp", "0",
                                       "--tn", "10", "--fp", "0", "--fn", "0"])
    assert result.exit_code == 1
    assert "undefined" in result.output.lower()


def test_analytics_nps_on_fixture():
    result = CliRunner().invoke(main, ["analytics", "nps",
                                       fixture_path("survey_responses.jsonl")])
    assert result.exit_code == 0
    assert json.loads(result.output)["score"] == 41.3


def test_analytics_sample_size():
    result = CliRunner().invoke(main, ["analytics", "sample-size",
                                       "--z", "1.96", "--p", "0.5", "--e", "0.05"])
    assert result.exit_code == 0
    assert result.output.strip() == "385"


def test_preprocess_stats_and_apply(tmp_path):
    import numpy as np
    from PIL import Image

    img_dir = tmp_path / "imgs"
    img_dir.mkdir()
    Image.fromarray(np.full((8, 8, 3), 128, dtype="uint8")).save(
        img_dir / "a.png")
    result = CliRunner().invoke(main, ["preprocess", "stats", str(img_dir)])
    assert result.exit_code == 0, result.output
    stats = json.loads(result.output)
    assert stats["mean"] == [128.0, 128.0, 128.0]

    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"target": [8, 8], "seed": 4}))
    out = tmp_path / "out.png"
    result = CliRunner().invoke(main, [
        "preprocess", "apply", str(img_dir / "a.png"),
        "--config", str(config), "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert Path(out).exists()

import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from planesym.cli import main
from planesym.dataset import (
    experiment1_tasks,
    experiment2_tasks,
    synthetic_experiment1_responses,
    synthetic_experiment2_responses,
)
from planesym.raster import RasterPattern


@pytest.fixture()
def runner():
    return CliRunner()


def write_tasks(path, tasks):
    path.write_text(json.dumps({"tasks": [t.to_json_dict() for t in tasks]}))


def write_responses(path, responses):
    path.write_text("\n".join(json.dumps(r.to_json_dict()) for r in responses))


def test_catalog_command(runner):
    res = runner.invoke(main, ["catalog"])
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert len(doc["groups"]) == 17


def test_generate_single_job(runner, tmp_path):
    job = {"group": "p4", "lattice": {"size": 48},
           "canvas": [160, 160], "fd": {"random": {"seed": 1}},
           "output": "out.png"}
    f = tmp_path / "job.json"
    f.write_text(json.dumps(job))
    res = runner.invoke(main, ["generate", str(f), "-o", str(tmp_path)])
    assert res.exit_code == 0, res.output
    pat = RasterPattern.load_png(tmp_path / "out.png")
    assert (pat.width, pat.height) == (160, 160)


def test_generate_17_group_batch(runner, tmp_path):
    from planesym.groups import GROUP_NAMES
    jobs = [{"group": g, "lattice": {"size": 40}, "canvas": [100, 100],
             "fd": {"random": {"seed": 2}}, "output": f"{g}.png"}
            for g in GROUP_NAMES]
    f = tmp_path / "jobs.json"
    f.write_text(json.dumps({"jobs": jobs}))
    res = runner.invoke(main, ["generate", str(f), "-o", str(tmp_path / "imgs")])
    assert res.exit_code == 0, res.output
    assert len(list((tmp_path / "imgs").glob("*.png"))) == 17


def test_generate_unknown_group_exits_1(runner, tmp_path):
    f = tmp_path / "job.json"
    f.write_text(json.dumps({"group": "p5"}))
    res = runner.invoke(main, ["generate", str(f)])
    assert res.exit_code == 1
    assert "unknown group" in res.output


def test_generate_from_png_fd_with_lattice_vectors(runner, tmp_path):
    # author an FD PNG, then feed it back through the job schema together
    # with explicit lattice vectors and a color scheme
    from planesym.generate import random_fd
    from planesym.lattice import make_lattice
    from PIL import Image

    lattice = make_lattice("hexagonal", 48)
    fd = random_fd("p6", lattice, [(255, 255, 255), (188, 32, 38),
                                   (24, 56, 140)], seed=6)
    arr = np.clip(fd.rgba * 255, 0, 255).astype(np.uint8)
    fd_png = tmp_path / "fd.png"
    Image.fromarray(arr, mode="RGBA").save(fd_png)

    job = {
        "group": "p6",
        "lattice": {"a": list(lattice.a), "b": list(lattice.b)},
        "canvas": [192, 192],
        "fd": {"png": str(fd_png),
               "palette": [[255, 255, 255], [188, 32, 38], [24, 56, 140]]},
        "colorScheme": {"r1": [0, 2, 1]},
        "output": "colored.png",
    }
    f = tmp_path / "job.json"
    f.write_text(json.dumps(job))
    res = runner.invoke(main, ["generate", str(f), "-o", str(tmp_path)])
    assert res.exit_code == 0, res.output
    pat = RasterPattern.load_png(tmp_path / "colored.png")
    assert (pat.width, pat.height) == (192, 192)
    # both swapped colors must appear in the rendering
    cols = pat.rgb().reshape(-1, 3)
    assert (np.abs(cols.astype(int) - [188, 32, 38]).sum(axis=1) < 30).any()
    assert (np.abs(cols.astype(int) - [24, 56, 140]).sum(axis=1) < 30).any()


def test_generate_blank_fd_uniform(runner, tmp_path):
    job = {"group": "p1", "lattice": {"size": 40}, "canvas": [80, 80],
           "fd": {"random": {"seed": 0, "blobs": 0}}, "output": "u.png"}
    f = tmp_path / "job.json"
    f.write_text(json.dumps(job))
    res = runner.invoke(main, ["generate", str(f), "-o", str(tmp_path)])
    assert res.exit_code == 0, res.output
    pat = RasterPattern.load_png(tmp_path / "u.png")
    assert len(np.unique(pat.rgb().reshape(-1, 3), axis=0)) == 1


def test_classify_command_roundtrip(runner, tmp_path):
    from tests.conftest import build_fixture
    pat, _, _ = build_fixture("cmm", canvas=384)
    img = tmp_path / "cmm.png"
    pat.save_png(img)
    out = tmp_path / "sig.json"
    overlay = tmp_path / "overlay.png"
    res = runner.invoke(main, ["classify", str(img), "--out", str(out),
                               "--annotate", str(overlay)])
    assert res.exit_code == 0, res.output
    sig = json.loads(out.read_text())
    assert sig["group"] == "cmm"
    assert overlay.exists()


def test_classify_uniform_exits_2(runner, tmp_path):
    img = tmp_path / "uniform.png"
    RasterPattern(np.full((96, 96, 3), 128, dtype=np.uint8)).save_png(img)
    res = runner.invoke(main, ["classify", str(img)])
    assert res.exit_code == 2


def test_extract_command(runner, tmp_path):
    from tests.conftest import build_fixture
    pat, _, _ = build_fixture("p4m", canvas=384)
    img = tmp_path / "p4m.png"
    pat.save_png(img)
    res = runner.invoke(main, ["extract", str(img), "-o", str(tmp_path)])
    assert res.exit_code == 0, res.output
    assert (tmp_path / "p4m_uc.png").exists()
    assert (tmp_path / "p4m_fd.png").exists()


def test_analyze_experiment1_counts(runner, tmp_path):
    tasks = experiment1_tasks()
    responses = synthetic_experiment1_responses(tasks)
    write_tasks(tmp_path / "tasks.json", tasks)
    write_responses(tmp_path / "responses.jsonl", responses)
    res = runner.invoke(main, ["analyze", str(tmp_path / "responses.jsonl"),
                               str(tmp_path / "tasks.json"),
                               "--experiment", "1",
                               "-o", str(tmp_path / "out")])
    assert res.exit_code == 0, res.output
    assert "17 retained, 13 excluded of 30 participants" in res.output
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["retainedCount"] == 17
    assert len(summary["participantMatrices"]) == 10
    assert len(summary["perTaskMatrices"]) == 20
    csvs = list((tmp_path / "out").glob("participant_matrix_*.csv"))
    assert len(csvs) == 10


def test_analyze_experiment2_similarity(runner, tmp_path):
    tasks = experiment2_tasks()
    responses = synthetic_experiment2_responses(tasks)
    write_tasks(tmp_path / "tasks.json", tasks)
    write_responses(tmp_path / "responses.jsonl", responses)
    res = runner.invoke(main, ["analyze", str(tmp_path / "responses.jsonl"),
                               str(tmp_path / "tasks.json"),
                               "--experiment", "2",
                               "-o", str(tmp_path / "out")])
    assert res.exit_code == 0, res.output
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    sim = summary["similarity"]
    i = sim["labels"].index("cmm_ol")
    q = sim["labels"].index("moroccan")
    assert sim["values"][i][q] == pytest.approx(0.75, abs=1e-12)
    assert (tmp_path / "out" / "similarity.csv").exists()


def test_analyze_accepts_csv_responses(runner, tmp_path):
    tasks = experiment2_tasks()
    responses = synthetic_experiment2_responses(tasks)
    write_tasks(tmp_path / "tasks.json", tasks)
    lines = ["participantId,taskId,mostSimilar,leastSimilar,elapsedMs"]
    for r in responses:
        lines.append(f"{r.participant_id},{r.task_id},{r.most_similar},,1000")
    (tmp_path / "responses.csv").write_text("\n".join(lines))
    res = runner.invoke(main, ["analyze", str(tmp_path / "responses.csv"),
                               str(tmp_path / "tasks.json"),
                               "--experiment", "2",
                               "-o", str(tmp_path / "out")])
    assert res.exit_code == 0, res.output
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    sim = summary["similarity"]
    i = sim["labels"].index("cmm_ol")
    q = sim["labels"].index("moroccan")
    assert sim["values"][i][q] == pytest.approx(0.75, abs=1e-12)


def test_analyze_empty_file_exits_1(runner, tmp_path):
    (tmp_path / "responses.jsonl").write_text("")
    write_tasks(tmp_path / "tasks.json", experiment2_tasks())
    res = runner.invoke(main, ["analyze", str(tmp_path / "responses.jsonl"),
                               str(tmp_path / "tasks.json"),
                               "--experiment", "2"])
    assert res.exit_code == 1


def test_embed_command_dims2_and_3(runner, tmp_path):
    rng = np.random.default_rng(0)
    pts = np.vstack([rng.normal(0, 0.4, (8, 3)), rng.normal(8, 0.4, (8, 3))])
    D = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
    from planesym.analytics import matrix_to_csv
    labels = [f"o{i:02d}" for i in range(16)]
    (tmp_path / "m.csv").write_text(matrix_to_csv(labels, D))
    res = runner.invoke(main, ["embed", str(tmp_path / "m.csv"),
                               "--dims", "2", "--iterations", "300",
                               "-o", str(tmp_path / "e2")])
    assert res.exit_code == 0, res.output
    lines = (tmp_path / "e2" / "embedding.csv").read_text().splitlines()
    assert len(lines) == 17 and lines[0] == "label,x,y"

    res = runner.invoke(main, ["embed", str(tmp_path / "m.csv"),
                               "--dims", "3", "--iterations", "300",
                               "-o", str(tmp_path / "e3")])
    assert res.exit_code == 0, res.output
    rgb_lines = (tmp_path / "e3" / "rgb.csv").read_text().splitlines()[1:]
    assert len(rgb_lines) == 16
    for line in rgb_lines:
        vals = [int(v) for v in line.split(",")[1:]]
        assert all(0 <= v <= 255 for v in vals)


def test_embed_deterministic_across_runs(runner, tmp_path):
    rng = np.random.default_rng(1)
    pts = rng.normal(0, 1, (10, 3))
    D = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
    from planesym.analytics import matrix_to_csv
    labels = [str(i) for i in range(10)]
    (tmp_path / "m.csv").write_text(matrix_to_csv(labels, D))
    outs = []
    for d in ("a", "b"):
        res = runner.invoke(main, ["embed", str(tmp_path / "m.csv"),
                                   "--iterations", "200", "--perplexity", "2",
                                   "--seed", "7", "-o", str(tmp_path / d)])
        assert res.exit_code == 0, res.output
        outs.append((tmp_path / d / "embedding.csv").read_bytes())
    assert outs[0] == outs[1]

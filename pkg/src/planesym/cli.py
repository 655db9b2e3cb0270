"""Command-line entry points.

Exit codes: 1 for schema/usage violations, 2 for NoPeriodicity.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import groups as grp
from .analytics import SurveyResponse, TaskSpec, matrix_from_csv
from .errors import NoPeriodicityError, PlanesymError, SchemaError
from .lattice import Lattice, make_lattice
from .raster import RasterPattern
from .service import DEFAULT_PORT_ENV


@click.group()
def main():
    """Plane-symmetry engine: generate, classify, extract, analyze, embed,
    serve."""


@main.command()
@click.option("-o", "--out", type=click.Path(dir_okay=False), default=None,
              help="write the catalog JSON here instead of stdout")
def catalog(out):
    """Dump the 17-group catalog as a JSON reference document."""
    doc = grp.catalog_json()
    if out:
        Path(out).write_text(doc)
    else:
        click.echo(doc)


def _lattice_from_job(doc: dict) -> Lattice:
    lat = doc.get("lattice", {})
    if "a" in lat and "b" in lat:
        from .lattice import classify_basis
        a, b = lat["a"], lat["b"]
        cls = lat.get("class", classify_basis(a, b))
        return Lattice(a, b, cls)
    cls = lat.get("class")
    if cls is None:
        cls = grp.get_group(doc["group"]).lattice_class
    return make_lattice(cls, size=float(lat.get("size", 64)),
                        aspect=float(lat.get("aspect", 0.75)),
                        angle_deg=float(lat.get("angleDeg", 105.0)))


def _fd_from_job(doc: dict, group, lattice):
    from .generate import fd_from_rgba, random_fd
    from .raster import load_rgba_float
    fd_doc = doc.get("fd", {"random": {}})
    palette = fd_doc.get("palette") or doc.get("palette")
    if palette is not None:
        palette = [tuple(int(v) for v in c) for c in palette]
    if "png" in fd_doc:
        rgba = load_rgba_float(fd_doc["png"])
        return fd_from_rgba(group, lattice, rgba, palette=palette)
    rnd = fd_doc.get("random", {})
    palette = palette or [(255, 255, 255), (188, 32, 38), (24, 56, 140)]
    return random_fd(group, lattice, palette, seed=int(rnd.get("seed", 0)),
                     blobs=int(rnd.get("blobs", 5)))


def _run_one_job(doc: dict, out_dir: Path, index: int) -> Path:
    from .generate import generate
    for key in ("group",):
        if key not in doc:
            raise SchemaError(f"job missing required field {key!r}")
    try:
        group = grp.get_group(doc["group"])
    except KeyError as e:
        raise SchemaError(f"unknown group {doc['group']!r}") from e
    lattice = _lattice_from_job(doc)
    fd = _fd_from_job(doc, group, lattice)
    canvas = doc.get("canvas", [512, 512])
    pat = generate(fd, group, lattice, int(canvas[0]), int(canvas[1]),
                   resampling=doc.get("resampling", "bilinear"),
                   supersample=int(doc.get("supersample", 2)),
                   color_scheme=doc.get("colorScheme"))
    name = doc.get("output", f"{group.name}_{index:02d}.png")
    out = out_dir / name
    out.parent.mkdir(parents=True, exist_ok=True)
    pat.save_png(out)
    return out


@main.command()
@click.argument("job_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out-dir", type=click.Path(file_okay=False), default=".")
def generate(job_file, out_dir):
    """Render ornament(s) from a JSON job description."""
    try:
        doc = json.loads(Path(job_file).read_text())
    except json.JSONDecodeError as e:
        raise click.ClickException(f"invalid JSON: {e}")
    jobs = doc["jobs"] if isinstance(doc, dict) and "jobs" in doc else [doc]
    try:
        for i, job in enumerate(jobs):
            path = _run_one_job(job, Path(out_dir), i)
            click.echo(str(path))
    except (SchemaError, PlanesymError, KeyError, TypeError, ValueError) as e:
        raise click.ClickException(str(e))


@main.command()
@click.argument("image", type=click.Path(exists=True, dir_okay=False))
@click.option("--threshold", type=float, default=0.05, show_default=True,
              help="mismatch acceptance threshold theta")
@click.option("--annotate", type=click.Path(dir_okay=False), default=None,
              help="write an annotated overlay PNG here")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="write the signature JSON here instead of stdout")
def classify(image, threshold, annotate, out):
    """Detect and classify the wallpaper group of a pattern PNG."""
    from .detect import classify as run_classify
    pat = RasterPattern.load_png(image)
    try:
        sig = run_classify(pat, theta=threshold)
    except NoPeriodicityError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    doc = json.dumps(sig.to_json_dict(), indent=2, sort_keys=True)
    if out:
        Path(out).write_text(doc)
    else:
        click.echo(doc)
    if annotate:
        from .reports import save_annotated_overlay
        save_annotated_overlay(pat, sig, annotate)


@main.command()
@click.argument("image", type=click.Path(exists=True, dir_okay=False))
@click.option("--threshold", type=float, default=0.05, show_default=True)
@click.option("-o", "--out-dir", type=click.Path(file_okay=False), default=".")
def extract(image, threshold, out_dir):
    """Extract the proper unit cell and fundamental domain as PNGs."""
    from .detect import classify as run_classify
    from .detect import extract_fundamental_domain, extract_unit_cell
    pat = RasterPattern.load_png(image)
    try:
        sig = run_classify(pat, theta=threshold)
    except NoPeriodicityError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(image).stem
    uc, anchor, cell = extract_unit_cell(pat, sig)
    uc.save_png(out / f"{stem}_uc.png")
    fd, _, _ = extract_fundamental_domain(pat, sig)
    fd.save_png(out / f"{stem}_fd.png")
    click.echo(json.dumps({
        "group": sig.group,
        "anchor": [round(float(v), 3) for v in anchor],
        "cell_a": [round(float(v), 3) for v in cell.a],
        "cell_b": [round(float(v), 3) for v in cell.b],
        "unit_cell": str(out / f"{stem}_uc.png"),
        "fundamental_domain": str(out / f"{stem}_fd.png"),
    }, indent=2, sort_keys=True))


def load_tasks_file(path) -> list[TaskSpec]:
    try:
        doc = json.loads(Path(path).read_text())
        items = doc["tasks"] if isinstance(doc, dict) else doc
        return [TaskSpec.from_json_dict(t) for t in items]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"invalid tasks file: {e}") from e


def load_responses_file(path) -> list[SurveyResponse]:
    """Responses from JSONL (one object per line; service event logs work
    too) or, for .csv files, from columns
    participantId,taskId,mostSimilar[,leastSimilar[,elapsedMs]]."""
    if str(path).lower().endswith(".csv"):
        return _load_responses_csv(path)
    out = []
    try:
        for line in Path(path).read_text().splitlines():
            if not line.strip():
                continue
            doc = json.loads(line)
            if doc.get("type") not in (None, "response"):
                continue  # event logs carry enrollment/close lines too
            out.append(SurveyResponse.from_json_dict(doc))
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise SchemaError(f"invalid responses JSONL: {e}") from e
    if not out:
        raise SchemaError("no responses found in file")
    return out


def _load_responses_csv(path) -> list[SurveyResponse]:
    import csv as csvmod
    out = []
    try:
        with open(path, newline="") as fh:
            for row in csvmod.DictReader(fh):
                least = row.get("leastSimilar") or None
                elapsed = row.get("elapsedMs")
                out.append(SurveyResponse(
                    participant_id=row["participantId"],
                    task_id=row["taskId"],
                    most_similar=row["mostSimilar"],
                    least_similar=least,
                    elapsed_ms=int(elapsed) if elapsed else None,
                ))
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"invalid responses CSV: {e}") from e
    if not out:
        raise SchemaError("no responses found in file")
    return out


@main.command()
@click.argument("responses_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("tasks_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--experiment", type=click.Choice(["1", "2"]), required=True)
@click.option("-o", "--out-dir", type=click.Path(file_okay=False),
              default="analysis")
def analyze(responses_file, tasks_file, experiment, out_dir):
    """Compute matrices, tallies and plots from survey responses."""
    from .reports import write_analysis_outputs
    try:
        tasks = load_tasks_file(tasks_file)
        responses = load_responses_file(responses_file)
        summary = write_analysis_outputs(tasks, responses, int(experiment),
                                         out_dir)
    except (SchemaError, PlanesymError) as e:
        raise click.ClickException(str(e))
    if int(experiment) == 1:
        click.echo(f"{summary['retainedCount']} retained, "
                   f"{len(summary['excluded'])} excluded "
                   f"of {summary['participantCount']} participants")
    else:
        click.echo(f"similarity matrix over {len(summary['similarity']['labels'])} "
                   f"ornaments ({summary['participantCount']} participants)")
    click.echo(f"outputs in {out_dir}/")


@main.command()
@click.argument("matrix_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--dims", type=click.Choice(["2", "3"]), default="2",
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--perplexity", type=float, default=5.0, show_default=True)
@click.option("--iterations", type=int, default=1000, show_default=True)
@click.option("--kind", type=click.Choice(["distance", "similarity"]),
              default="distance", show_default=True,
              help="similarity converts via d = 1 - s (zeros = never paired)")
@click.option("-o", "--out-dir", type=click.Path(file_okay=False),
              default="embedding")
def embed(matrix_file, dims, seed, perplexity, iterations, kind, out_dir):
    """tSNE embedding of a matrix CSV; writes CSV + scatter (+ RGB table)."""
    from .analytics import SimilarityMatrix
    from .reports import save_embedding_plot
    from .tsne import embedding_to_rgb, tsne
    try:
        labels, vals = matrix_from_csv(Path(matrix_file).read_text())
    except (ValueError, IndexError) as e:
        raise click.ClickException(f"invalid matrix CSV: {e}")
    d = int(dims)
    try:
        if kind == "similarity":
            observed = (vals > 0) | np.eye(len(vals), dtype=bool)
            sim = SimilarityMatrix(labels, vals, observed)
            emb = tsne(sim, d=d, perplexity=perplexity, iterations=iterations,
                       seed=seed)
        else:
            emb = tsne(vals, labels=labels, d=d, perplexity=perplexity,
                       iterations=iterations, seed=seed)
    except PlanesymError as e:
        raise click.ClickException(str(e))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cols = ["label", "x", "y", "z"][:d + 1]
    lines = [",".join(cols)]
    for label, p in zip(emb.labels, emb.points):
        lines.append(",".join([label] + [f"{v:.12g}" for v in p]))
    (out / "embedding.csv").write_text("\n".join(lines) + "\n")
    rgb = None
    if d == 3:
        rgb = embedding_to_rgb(emb)
        rlines = ["label,r,g,b"]
        for label in emb.labels:
            r, g, b = rgb[label]
            rlines.append(f"{label},{r},{g},{b}")
        (out / "rgb.csv").write_text("\n".join(rlines) + "\n")
    save_embedding_plot(emb, out / "embedding.png", rgb)
    click.echo(f"final KL divergence: {emb.final_kl:.6f}")
    click.echo(f"outputs in {out}/")


@main.command()
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--port", type=int, default=None,
              help=f"default from ${DEFAULT_PORT_ENV} or 8000")
@click.option("--state-dir", type=click.Path(file_okay=False),
              default="sessions", show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(config_file, port, state_dir, host):
    """Run the live survey service for a session config."""
    import uvicorn
    from .service import SessionConfig, create_app
    try:
        config = SessionConfig.load(config_file)
    except SchemaError as e:
        raise click.ClickException(str(e))
    if port is None:
        port = int(os.environ.get(DEFAULT_PORT_ENV, "8000"))
    app = create_app(config, state_dir)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except SystemExit:
        raise
    except OSError as e:
        raise click.ClickException(f"cannot bind port {port}: {e}")


@main.command()
@click.option("-o", "--out-dir", type=click.Path(file_okay=False),
              default="dataset", show_default=True)
@click.option("--size", type=int, default=256, show_default=True)
def dataset(out_dir, size):
    """Render the 18-ornament demo dataset, task sets and session configs."""
    from .dataset import (
        build_dataset,
        experiment1_tasks,
        experiment2_tasks,
    )
    out = Path(out_dir)
    paths = build_dataset(out / "ornaments", size=size)
    rel = {k: str(Path(v).relative_to(out)) for k, v in paths.items()}
    for exp, tasks in ((1, experiment1_tasks()), (2, experiment2_tasks())):
        (out / f"experiment{exp}_tasks.json").write_text(json.dumps(
            {"tasks": [t.to_json_dict() for t in tasks]}, indent=2))
        config = {
            "sessionId": f"experiment{exp}",
            "experiment": exp,
            "timeLimitSeconds": 30,
            "warmupRevealCount": 3 if exp == 2 else 1,
            "tasks": [t.to_json_dict() for t in tasks],
            "assets": rel,
        }
        (out / f"experiment{exp}_session.json").write_text(
            json.dumps(config, indent=2))
    click.echo(f"dataset written to {out}/ "
               f"({len(paths)} ornaments, 2 session configs)")


if __name__ == "__main__":
    main()

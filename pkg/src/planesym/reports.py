"""Report emission: matrix heatmaps, embedding scatter plots, annotated
detection overlays, and the canonical analysis summary shared by the CLI
and the HTTP service (their byte-identical contract)."""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .analytics import (
    DistanceMatrix,
    SimilarityMatrix,
    SurveyResponse,
    TaskSpec,
    build_rankings,
    matrix_to_csv,
    ornament_similarity_matrix,
    participant_distance_matrix,
    per_task_distance_matrix,
)
from .detect import SymmetrySignature
from .raster import RasterPattern
from .tsne import Embedding


def save_heatmap(labels, values, path, title: str = "", vmin=0.0, vmax=1.0):
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(np.asarray(values), cmap="viridis", vmin=vmin, vmax=vmax)
    ax.set_xticks(range(len(labels)))
    ax.set_yticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=90, fontsize=6)
    ax.set_yticklabels(labels, fontsize=6)
    if title:
        ax.set_title(title)
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_embedding_plot(emb: Embedding, path, rgb: dict | None = None):
    pts = emb.points
    fig = plt.figure(figsize=(6, 5))
    if pts.shape[1] == 3:
        ax = fig.add_subplot(projection="3d")
        colors = None
        if rgb:
            colors = [np.array(rgb[label]) / 255.0 for label in emb.labels]
        ax.scatter(pts[:, 0], pts[:, 1], pts[:, 2], c=colors, s=60)
        for label, p in zip(emb.labels, pts):
            ax.text(p[0], p[1], p[2], label, fontsize=7)
    else:
        ax = fig.add_subplot()
        ax.scatter(pts[:, 0], pts[:, 1], s=60)
        for label, p in zip(emb.labels, pts):
            ax.annotate(label, p, fontsize=7,
                        textcoords="offset points", xytext=(4, 4))
        ax.set_aspect("equal")
    ax.set_title(f"tSNE embedding (KL={emb.final_kl:.4f}, seed={emb.seed})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


_CLASS_COLORS = ["lime", "yellow", "red", "cyan", "magenta", "orange"]


def save_annotated_overlay(pattern: RasterPattern, sig: SymmetrySignature, path):
    """Pattern with detected rotation centers (colored by class), mirror
    lines (solid) and glide axes (dashed) drawn on top."""
    H, W = pattern.height, pattern.width
    fig, ax = plt.subplots(figsize=(6, 6 * H / W))
    ax.imshow(pattern.rgb())
    for order, centers in sorted(sig.rotation_centers.items(), reverse=True):
        marker = {6: "*", 4: "s", 3: "^", 2: "D"}[order]
        for c in centers:
            color = _CLASS_COLORS[c.class_id % len(_CLASS_COLORS)]
            ax.plot(c.position[0], c.position[1], marker, color=color,
                    markersize=11 if order > 2 else 8,
                    markeredgecolor="black", markeredgewidth=0.8)
    for axis_list, style in ((sig.mirror_axes, "-"), (sig.glide_axes, "--")):
        for a in axis_list:
            p, u = a.line.point, a.line.direction
            ts = np.array([-2.0 * max(W, H), 2.0 * max(W, H)])
            xs = p[0] + ts * u[0]
            ys = p[1] + ts * u[1]
            ax.plot(xs, ys, style, color="white", linewidth=1.2, alpha=0.85)
    ax.set_xlim(0, W)
    ax.set_ylim(H, 0)
    ax.set_title(f"{sig.group} (confidence {sig.confidence:.2f})")
    ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


# ---------------------------------------------------------------------------
# Shared analysis summary (CLI cmd_analyze == service /api/results)
# ---------------------------------------------------------------------------

def analyze_responses(tasks: list[TaskSpec], responses: list[SurveyResponse],
                      experiment: int) -> dict:
    """Canonical summary dict; serialize with canonical_json for the
    byte-identical CLI/service contract."""
    real_tasks = [t for t in tasks if not t.warmup]
    participants = sorted({r.participant_id for r in responses})
    out: dict = {
        "experiment": experiment,
        "participantCount": len(participants),
        "participants": participants,
        "taskCount": len(real_tasks),
        "warmupCount": len(tasks) - len(real_tasks),
    }
    tallies = {}
    for t in real_tasks:
        tally = {o: {"most": 0, "least": 0} for o in t.options}
        for r in responses:
            if r.task_id != t.task_id:
                continue
            tally[r.most_similar]["most"] += 1
            if r.least_similar is not None:
                tally[r.least_similar]["least"] += 1
        tallies[t.task_id] = tally
    out["perTaskTallies"] = tallies
    late = sorted([[r.participant_id, r.task_id] for r in responses if r.late])
    out["lateResponses"] = late

    if experiment == 1:
        rankings, excluded = build_rankings(
            [r for r in responses if r.task_id in {t.task_id for t in real_tasks}],
            real_tasks)
        retained = sorted({r.participant_id for r in rankings} - excluded)
        out["excluded"] = sorted(excluded)
        out["retained"] = retained
        out["retainedCount"] = len(retained)
        out["participantMatrices"] = {}
        for t in real_tasks:
            rs = [r for r in rankings
                  if r.task_id == t.task_id and r.participant_id in retained]
            m = participant_distance_matrix(rs, retained)
            out["participantMatrices"][t.task_id] = {
                "labels": m.labels,
                "values": _round_matrix(m.values),
            }
        out["perTaskMatrices"] = {}
        for t in real_tasks:
            for which in ("most", "least"):
                m = per_task_distance_matrix(responses, t, which)
                out["perTaskMatrices"][f"{t.task_id}:{which}"] = {
                    "labels": m.labels,
                    "values": _round_matrix(m.values),
                }
    elif not participants:
        out["similarity"] = {"labels": [], "values": [], "observed": [],
                             "meta": {"participant_count": 0}}
    else:
        sim = ornament_similarity_matrix(responses, real_tasks,
                                         participant_count=len(participants))
        out["similarity"] = {
            "labels": sim.labels,
            "values": _round_matrix(sim.values),
            "observed": [[bool(v) for v in row] for row in sim.observed],
            "meta": sim.meta,
        }
    return out


def _round_matrix(values: np.ndarray) -> list[list[float]]:
    return [[round(float(v), 12) for v in row] for row in np.asarray(values)]


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False)


def write_analysis_outputs(tasks: list[TaskSpec],
                           responses: list[SurveyResponse],
                           experiment: int, out_dir) -> dict:
    """CSV matrices, plots and summary.json for cmd_analyze."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = analyze_responses(tasks, responses, experiment)
    (out / "summary.json").write_text(canonical_json(summary))
    real_tasks = [t for t in tasks if not t.warmup]
    if experiment == 1:
        for tid, m in summary["participantMatrices"].items():
            (out / f"participant_matrix_{tid}.csv").write_text(
                matrix_to_csv(m["labels"], np.array(m["values"])))
            save_heatmap(m["labels"], m["values"],
                         out / f"participant_matrix_{tid}.png",
                         title=f"set {tid}")
        for key, m in summary["perTaskMatrices"].items():
            fname = key.replace(":", "_")
            (out / f"per_task_matrix_{fname}.csv").write_text(
                matrix_to_csv(m["labels"], np.array(m["values"])))
    else:
        sim = summary["similarity"]
        (out / "similarity.csv").write_text(
            matrix_to_csv(sim["labels"], np.array(sim["values"])))
        save_heatmap(sim["labels"], sim["values"], out / "similarity.png",
                     title="ornament similarity")
    return summary

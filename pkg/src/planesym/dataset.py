"""Demo dataset: the symmetry-trap composite and an 18-ornament set.

The trap composite follows the construction of the overlapped ornament:
an exactly six-fold base (p6m, blue twelve-point stars on the lattice
points, black three-leaved shapes on the three-fold centers) overlaid
with a bold four-fold star motif centered on every lattice point.  The
motif keeps only the two-fold rotations and the horizontal/vertical
mirrors of the base, so the composite's true group is cmm while reading
as p6m at first glance.

The 18-ornament set regenerates the survey dataset approximately: the
stated group multiset (p3, p3m1, p4, p4g, 2x p4m, 4x p6, 2x p6m, 5x cmm,
and one p4g/cmm two-coloring) in red/white/blue; motif geometry is
seeded-random.  Task sets for both experiments are synthetic stand-ins
with the structure of the originals (10 three-option most-and-least sets;
16 two-option single-pick sets with five warm-ups, the overlap ornament
appearing in exactly four tasks).
"""

from __future__ import annotations

import math

import numpy as np

from .analytics import MOST_AND_LEAST, PICK_SIMILAR, SurveyResponse, TaskSpec
from .generate import (
    FundamentalDomain,
    fd_from_painter,
    generate,
    generate_indexed,
    overlap_compose,
    random_fd,
)
from .lattice import Lattice, make_lattice
from .raster import RGB, RasterPattern

WHITE: RGB = (245, 243, 236)
RED: RGB = (188, 32, 38)
BLUE: RGB = (24, 56, 140)
BLACK: RGB = (24, 22, 20)
YELLOW: RGB = (206, 148, 14)

RWB_PALETTE: list[RGB] = [WHITE, RED, BLUE]


# ---------------------------------------------------------------------------
# Trap composite
# ---------------------------------------------------------------------------

def _star_mask(px, py, cx, cy, points, r_outer, r_inner, phase=0.0):
    dx = px - cx
    dy = py - cy
    r = np.hypot(dx, dy)
    phi = np.arctan2(dy, dx)
    edge = r_inner + (r_outer - r_inner) * 0.5 * (1 + np.cos(points * (phi - phase)))
    return r <= edge


def trap_base_fd(lattice: Lattice) -> FundamentalDomain:
    """p6m FD: twelve-point blue star at the six-fold corner, black
    three-leaf at the three-fold corner, red ring accents."""
    s = float(np.linalg.norm(lattice.a))
    three_fold = lattice.to_pattern(np.array([[2 / 3, 1 / 3]]))[0]
    palette = [WHITE, BLUE, BLACK, RED]

    def painter(px, py):
        idx = np.zeros(px.shape, dtype=np.int16)
        ring = np.hypot(px - 0.0, py - 0.0)
        idx[(ring > 0.40 * s) & (ring < 0.46 * s)] = 3
        star = _star_mask(px, py, 0.0, 0.0, 12, 0.34 * s, 0.16 * s)
        idx[star] = 1
        leaf = _star_mask(px, py, three_fold[0], three_fold[1], 3,
                          0.30 * s, 0.05 * s, phase=math.pi / 3)
        idx[leaf] = 2
        return idx

    return fd_from_painter("p6m", lattice, painter, palette=palette)


def trap_overlay(lattice: Lattice, width: int, height: int,
                 supersample: int = 2) -> RasterPattern:
    """Bold four-fold star motif on every lattice point, rendered with 2x2
    subsampling; near-white pixels read as transparent in overlap_compose."""
    s = float(np.linalg.norm(lattice.a))
    Binv = lattice.inverse_matrix()
    B = lattice.matrix()
    colors = np.array([WHITE, YELLOW, RED], float)
    acc = np.zeros((height * width, 3))
    ys, xs = np.mgrid[0:height, 0:width]
    for sy in range(supersample):
        for sx in range(supersample):
            px = xs.ravel() + (sx + 0.5) / supersample - 0.5
            py = ys.ravel() + (sy + 0.5) / supersample - 0.5
            f = np.stack([px, py], axis=1) @ Binv.T
            f -= np.floor(f + 0.5)  # fold to the nearest lattice point
            local = f @ B.T
            r = np.hypot(local[:, 0], local[:, 1])
            phi = np.arctan2(local[:, 1], local[:, 0])
            # long sharp four-fold leaves: these are what break the six-fold
            tooth = (0.5 * (1 + np.cos(4 * phi))) ** 3
            edge = (0.11 + 0.33 * tooth) * s
            idx = np.zeros(len(r), dtype=np.int64)
            idx[r <= edge] = 1
            idx[r <= 0.10 * s] = 2
            acc += colors[idx]
    rgb = np.rint(acc / supersample ** 2).astype(np.uint8)
    return RasterPattern(rgb.reshape(height, width, 3),
                         lattice_annotation=lattice)


def trap_composite(size: float = 64.0, width: int = 512, height: int = 512
                   ) -> tuple[RasterPattern, Lattice]:
    """The p6m-looking composite whose true group is cmm."""
    lattice = make_lattice("hexagonal", size)
    base = generate(trap_base_fd(lattice), "p6m", lattice, width, height)
    overlay = trap_overlay(lattice, width, height)
    composite = overlap_compose(base, overlay, "over", background=WHITE)
    composite.lattice_annotation = lattice
    composite.meta["construction"] = "p6m base overlaid with 4-fold motif"
    return composite, lattice


def trap_feature_points(lattice: Lattice, width: int, height: int
                        ) -> dict[str, np.ndarray]:
    """Centers of the visually salient motifs nearest the canvas center:
    twelve-point stars (lattice points), three-leaves (three-fold centers),
    four-fold stars (overlay motif centers = lattice points)."""
    center = np.array([width / 2.0, height / 2.0])

    def nearest(frac):
        f = lattice.to_fractional((center - lattice.to_pattern(
            np.asarray(frac, float).reshape(1, 2))[0]).reshape(1, 2))[0]
        return lattice.to_pattern((np.round(f) + np.asarray(frac)).reshape(1, 2))[0]

    return {
        "dodecagram": nearest([0.0, 0.0]),
        "three_leaf": nearest([2 / 3, 1 / 3]),
        "octagram": nearest([0.0, 0.0]),
    }


# ---------------------------------------------------------------------------
# p6 color-symmetry fixture
# ---------------------------------------------------------------------------

def _bold_blob_fd(group: str, lattice: Lattice, palette: list[RGB],
                  seed: int, blobs: int = 2) -> FundamentalDomain:
    """Few large motifs: keeps color-boundary pixels rare, which the
    color-permutation consistency check (98%) needs."""
    from .generate import fd_frame
    rng = np.random.default_rng(seed)
    _anchor, _h, _w, poly_pat = fd_frame(group, lattice)
    lo, hi = poly_pat.min(axis=0), poly_pat.max(axis=0)
    size = float(np.linalg.norm(lattice.a))
    spots = [(rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1]),
              rng.uniform(0.24, 0.36) * size) for _ in range(blobs)]

    def painter(px, py):
        idx = np.zeros(px.shape, dtype=np.int16)
        for cx, cy, r in spots:
            idx[(px - cx) ** 2 + (py - cy) ** 2 <= r * r] = 1
        return idx

    return fd_from_painter(group, lattice, painter, palette=palette)


def p6_two_coloring(size: float = 180.0, width: int = 560, height: int = 560,
                    seed: int = 15) -> tuple[RasterPattern, Lattice]:
    """p6 pattern whose 60-degree rotation swaps the two motif colors
    (a p6/p3-style coloring); returned indexed.

    Defaults keep color-boundary pixels under ~1.5% of the canvas so the
    98% permutation-consistency bar holds with margin, while the motif
    layout has no accidental mirror symmetry (the collapsed pattern is p6,
    not p6m).
    """
    lattice = make_lattice("hexagonal", size)
    fd = _bold_blob_fd("p6", lattice, RWB_PALETTE, seed)
    pat = generate_indexed(fd, "p6", lattice, width, height,
                           color_scheme={"r1": [0, 2, 1]})
    return pat, lattice


def p6_three_coloring(size: float = 180.0, width: int = 560, height: int = 560,
                      seed: int = 15) -> tuple[RasterPattern, Lattice]:
    """p6 with a 3-cycle on three motif colors under the 60-degree rotation
    (a p6/p2-style coloring)."""
    palette = [WHITE, RED, BLUE, BLACK]
    lattice = make_lattice("hexagonal", size)
    fd = _bold_blob_fd("p6", lattice, [WHITE, RED], seed)
    fd.palette = palette
    pat = generate_indexed(fd, "p6", lattice, width, height,
                           color_scheme={"r1": [0, 2, 3, 1]})
    return pat, lattice


# ---------------------------------------------------------------------------
# 18-ornament dataset
# ---------------------------------------------------------------------------

_DATASET_SPEC = [
    # (ornament id, group, part, seed)
    ("cmm_ol", None, "a", 0),          # the overlapped trap composite
    ("p6m_1", "p6m", "a", 11),
    ("p6m_2", "p6m", "a", 12),
    ("p4m_1", "p4m", "a", 13),
    ("p4m_2", "p4m", "a", 14),
    ("p3_1", "p3", "a", 15),
    ("p3m1_1", "p3m1", "a", 16),
    ("p4_1", "p4", "a", 17),
    ("p4g_1", "p4g", "a", 18),
    ("cmm_1", "cmm", "b", 19),
    ("cmm_2", "cmm", "b", 20),
    ("cmm_3", "cmm", "b", 21),
    ("p6_1", "p6", "b", 22),
    ("p6_2", "p6", "b", 23),
    ("cmm_4", "cmm", "c", 24),
    ("p4g_cmm", None, "c", 25),        # p4g two-colored so colors halve it to cmm
    ("p6_3", "p6", "c", 22),           # modified p6_2 (recolored)
    ("p6_5", "p6", "c", 23),           # modified p6_1 (bolder)
]


def build_ornament(ornament_id: str, size: int = 256) -> RasterPattern:
    for oid, group, _part, seed in _DATASET_SPEC:
        if oid != ornament_id:
            continue
        if oid == "cmm_ol":
            pat, _ = trap_composite(size / 6.0, size, size)
            return pat
        if oid == "p4g_cmm":
            lattice = make_lattice("square", size / 4.0)
            fd = random_fd("p4g", lattice, RWB_PALETTE, seed=seed, blobs=4)
            # 90-degree rotation swaps the colors, the diagonal mirror
            # keeps them: the color-preserving subgroup is cmm
            return generate(fd, "p4g", lattice, size, size,
                            color_scheme={"r1": [0, 2, 1], "m2": [0, 1, 2]})
        lattice = make_lattice(_group_lattice(group), size / 4.0, aspect=0.75)
        blobs = 7 if oid in ("p6_3", "p6_5") else 5
        fd = random_fd(group, lattice, RWB_PALETTE, seed=seed, blobs=blobs)
        return generate(fd, group, lattice, size, size)
    raise KeyError(f"unknown ornament id {ornament_id!r}")


def _group_lattice(group: str) -> str:
    from .groups import get_group
    return get_group(group).lattice_class


def dataset_ids(parts: str = "abc") -> list[str]:
    return [oid for oid, _g, part, _s in _DATASET_SPEC if part in parts]


def build_dataset(out_dir, size: int = 256, query_size: int = 384) -> dict[str, str]:
    """Render all 18 ornaments plus the query composite to PNG files."""
    from pathlib import Path
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    query, _ = trap_composite(query_size / 6.0, query_size, query_size)
    qpath = out / "moroccan.png"
    query.save_png(qpath)
    paths["moroccan"] = str(qpath)
    for oid in dataset_ids():
        pat = build_ornament(oid, size=size)
        p = out / f"{oid}.png"
        pat.save_png(p)
        paths[oid] = str(p)
    return paths


# ---------------------------------------------------------------------------
# Experiment task sets and synthetic responses
# ---------------------------------------------------------------------------

def experiment1_tasks() -> list[TaskSpec]:
    """Ten three-option most-and-least sets over parts a+b (14 ornaments),
    one warm-up first; query is always the composite."""
    pool = dataset_ids("ab")
    rng = np.random.default_rng(101)
    tasks = [TaskSpec("warmup1", "moroccan", ("p6m_1", "cmm_1", "p4_1"),
                      MOST_AND_LEAST, warmup=True, reveal_answer="p6m_1")]
    for i in range(10):
        opts = tuple(rng.choice(pool, size=3, replace=False))
        tasks.append(TaskSpec(f"s{i + 1:02d}", "moroccan", opts, MOST_AND_LEAST))
    return tasks


def experiment2_tasks() -> list[TaskSpec]:
    """Sixteen two-option single-pick sets over parts a+c, five warm-ups
    (reveal policy: first three), cmm_ol in exactly four tasks with task 2
    pairing it with p6m_1."""
    pool = [o for o in dataset_ids("ac") if o != "cmm_ol"]
    rng = np.random.default_rng(202)
    tasks = []
    for i in range(5):
        opts = tuple(rng.choice(pool, size=2, replace=False))
        tasks.append(TaskSpec(f"w{i + 1:02d}", "moroccan", opts, PICK_SIMILAR,
                              warmup=True,
                              reveal_answer=opts[0] if i < 3 else None))
    ol_tasks = {2: "p6m_1", 6: "p6_1", 11: "p4m_1", 14: "p6m_2"}
    for i in range(1, 17):
        if i in ol_tasks:
            opts = ("cmm_ol", ol_tasks[i])
        else:
            opts = tuple(rng.choice(pool, size=2, replace=False))
        tasks.append(TaskSpec(f"t{i:02d}", "moroccan", opts, PICK_SIMILAR))
    return tasks


def synthetic_experiment1_responses(tasks: list[TaskSpec] | None = None,
                                    participants: int = 30,
                                    inconsistent: int = 13,
                                    seed: int = 7) -> list[SurveyResponse]:
    """30 participants; `inconsistent` of them repeat their most-similar
    pick as least-similar on one task, reproducing the exclusion counts."""
    tasks = tasks or experiment1_tasks()
    real = [t for t in tasks if not t.warmup]
    rng = np.random.default_rng(seed)
    out = []
    for i in range(participants):
        pid = f"p{i + 1:02d}"
        bad_task = real[i % len(real)].task_id if i < inconsistent else None
        for t in real:
            most = t.options[int(rng.integers(0, len(t.options)))]
            if t.task_id == bad_task:
                least = most
            else:
                rest = [o for o in t.options if o != most]
                least = rest[int(rng.integers(0, len(rest)))]
            out.append(SurveyResponse(pid, t.task_id, most, least))
    return out


def synthetic_experiment2_responses(tasks: list[TaskSpec] | None = None,
                                    participants: int = 20,
                                    seed: int = 8) -> list[SurveyResponse]:
    """20 participants; the overlap ornament receives 10, 14, 18 and 18
    votes in its four tasks (10/20 + 14/20 + 18/20 + 18/20) / 4 = 0.75,
    with the 10-vote task split evenly against p6m_1."""
    tasks = tasks or experiment2_tasks()
    real = [t for t in tasks if not t.warmup]
    rng = np.random.default_rng(seed)
    ol_votes = {}
    quota = [10, 14, 18, 18]
    for t in real:
        if "cmm_ol" in t.options:
            ol_votes[t.task_id] = quota[len(ol_votes)]
    out = []
    for i in range(participants):
        pid = f"p{i + 1:02d}"
        for t in real:
            if t.task_id in ol_votes:
                k = ol_votes[t.task_id]
                ol_index = t.options.index("cmm_ol")
                pick = t.options[ol_index] if i < k else t.options[1 - ol_index]
            else:
                pick = t.options[int(rng.integers(0, 2))]
            out.append(SurveyResponse(pid, t.task_id, pick))
        for t in tasks:
            if t.warmup:
                out.append(SurveyResponse(pid, t.task_id,
                                          t.options[int(rng.integers(0, 2))]))
    return out

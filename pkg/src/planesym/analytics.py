"""Survey analytics: rankings, rank distances, distance and similarity
matrices.

Scoring convention for a most-and-least task: 1 for the option picked as
most similar, 3 for least similar, 2 for the unselected one.  A participant
who picks the same option for both is inconsistent; inconsistency on any
task of a set family excludes the participant from every participant
distance matrix (per-task matrices keep everyone).

The rank distance is the Kendall tau distance: the number of option pairs
ranked in opposite order, normalized by n(n-1)/2.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    MismatchedOptionsError,
    UnknownOptionError,
    UnknownTaskError,
    ZeroParticipantsError,
)

MOST_AND_LEAST = "most-and-least"
PICK_SIMILAR = "pick-similar"
DEFAULT_TIME_LIMIT_SECONDS = 30


@dataclass(frozen=True)
class TaskSpec:
    task_id: str
    query: str
    options: tuple[str, ...]
    mode: str = MOST_AND_LEAST
    time_limit_seconds: int = DEFAULT_TIME_LIMIT_SECONDS
    warmup: bool = False
    reveal_answer: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "options", tuple(self.options))
        if self.mode not in (MOST_AND_LEAST, PICK_SIMILAR):
            raise ValueError(f"unknown task mode {self.mode!r}")
        if len(self.options) not in (2, 3):
            raise ValueError("tasks carry 2 or 3 options")
        if len(set(self.options)) != len(self.options):
            raise ValueError(f"task {self.task_id}: duplicate options")
        if self.query in self.options:
            raise ValueError(f"task {self.task_id}: query among options")
        if self.reveal_answer is not None and self.reveal_answer not in self.options:
            raise ValueError(f"task {self.task_id}: reveal answer not an option")

    def to_json_dict(self) -> dict:
        d = {
            "taskId": self.task_id,
            "queryOrnamentId": self.query,
            "optionOrnamentIds": list(self.options),
            "mode": self.mode,
            "timeLimitSeconds": self.time_limit_seconds,
            "warmup": self.warmup,
        }
        if self.reveal_answer is not None:
            d["revealAnswer"] = self.reveal_answer
        return d

    @staticmethod
    def from_json_dict(d: dict) -> "TaskSpec":
        return TaskSpec(
            task_id=d["taskId"],
            query=d["queryOrnamentId"],
            options=tuple(d["optionOrnamentIds"]),
            mode=d.get("mode", MOST_AND_LEAST),
            time_limit_seconds=d.get("timeLimitSeconds", DEFAULT_TIME_LIMIT_SECONDS),
            warmup=d.get("warmup", False),
            reveal_answer=d.get("revealAnswer"),
        )


@dataclass(frozen=True)
class SurveyResponse:
    participant_id: str
    task_id: str
    most_similar: str
    least_similar: str | None = None
    elapsed_ms: int | None = None
    late: bool = False

    def to_json_dict(self) -> dict:
        d = {
            "participantId": self.participant_id,
            "taskId": self.task_id,
            "mostSimilar": self.most_similar,
        }
        if self.least_similar is not None:
            d["leastSimilar"] = self.least_similar
        if self.elapsed_ms is not None:
            d["elapsedMs"] = self.elapsed_ms
        if self.late:
            d["late"] = True
        return d

    @staticmethod
    def from_json_dict(d: dict) -> "SurveyResponse":
        return SurveyResponse(
            participant_id=d["participantId"],
            task_id=d["taskId"],
            most_similar=d["mostSimilar"],
            least_similar=d.get("leastSimilar"),
            elapsed_ms=d.get("elapsedMs"),
            late=d.get("late", False),
        )


@dataclass
class Ranking:
    participant_id: str
    task_id: str
    scores: dict[str, int]
    consistent: bool


@dataclass
class DistanceMatrix:
    labels: list[str]
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, float)
        assert v.shape == (len(self.labels), len(self.labels))
        self.values = v


@dataclass
class SimilarityMatrix:
    labels: list[str]
    values: np.ndarray
    observed: np.ndarray
    meta: dict = field(default_factory=dict)


def _validate_response(resp: SurveyResponse, tasks: dict[str, TaskSpec]) -> TaskSpec:
    task = tasks.get(resp.task_id)
    if task is None:
        raise UnknownTaskError(f"response references unknown task {resp.task_id!r}")
    if resp.most_similar not in task.options:
        raise UnknownOptionError(
            f"{resp.most_similar!r} is not an option of task {resp.task_id}")
    if task.mode == MOST_AND_LEAST:
        if resp.least_similar is not None and resp.least_similar not in task.options:
            raise UnknownOptionError(
                f"{resp.least_similar!r} is not an option of task {resp.task_id}")
    return task


def build_rankings(responses: list[SurveyResponse], tasks: list[TaskSpec]
                   ) -> tuple[list[Ranking], set[str]]:
    """1/3/2 rankings plus the excluded participant ids.

    A participant is excluded when inconsistent (most == least) or missing a
    response on any non-warmup most-and-least task of the set family.
    """
    task_map = {t.task_id: t for t in tasks if not t.warmup}
    rankings: list[Ranking] = []
    responded: dict[str, set[str]] = {}
    excluded: set[str] = set()
    participants: set[str] = set()
    for resp in responses:
        if resp.task_id not in task_map:
            if any(t.task_id == resp.task_id and t.warmup for t in tasks):
                continue  # warm-ups never enter analytics
            _validate_response(resp, {t.task_id: t for t in tasks})
        task = _validate_response(resp, task_map)
        if task.mode != MOST_AND_LEAST:
            continue
        participants.add(resp.participant_id)
        responded.setdefault(resp.participant_id, set()).add(task.task_id)
        consistent = (resp.least_similar is not None
                      and resp.least_similar != resp.most_similar)
        scores = {}
        for opt in task.options:
            if opt == resp.most_similar:
                scores[opt] = 1
            elif resp.least_similar is not None and opt == resp.least_similar:
                scores[opt] = 3
            else:
                scores[opt] = 2
        if not consistent:
            excluded.add(resp.participant_id)
        rankings.append(Ranking(resp.participant_id, task.task_id, scores,
                                consistent))
    all_task_ids = {t.task_id for t in tasks
                    if not t.warmup and t.mode == MOST_AND_LEAST}
    for p in participants:
        if responded.get(p, set()) != all_task_ids:
            excluded.add(p)
    return rankings, excluded


def kendall_tau(r1: Ranking, r2: Ranking) -> int:
    """Discordant-pair count via merge-sort inversion counting."""
    if set(r1.scores) != set(r2.scores):
        raise MismatchedOptionsError(
            f"rankings cover different options: {sorted(r1.scores)} vs "
            f"{sorted(r2.scores)}")
    if not (r1.consistent and r2.consistent):
        raise ValueError("kendall_tau requires consistent rankings")
    options = sorted(r1.scores)
    order1 = sorted(options, key=lambda o: r1.scores[o])
    pos2 = {o: r2.scores[o] for o in options}
    seq = [pos2[o] for o in order1]
    return _count_inversions(seq)


def _count_inversions(seq: list[int]) -> int:
    if len(seq) < 2:
        return 0
    mid = len(seq) // 2
    left, right = seq[:mid], seq[mid:]
    inv = _count_inversions(left) + _count_inversions(right)
    merged = []
    i = j = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            inv += len(left) - i
            merged.append(right[j])
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    seq[:] = merged
    return inv


def normalized_kendall(r1: Ranking, r2: Ranking) -> float:
    """Kendall tau divided by the pair count n(n-1)/2."""
    n = len(r1.scores)
    return kendall_tau(r1, r2) / (n * (n - 1) / 2.0)


def participant_distance_matrix(rankings: list[Ranking],
                                participants: list[str]) -> DistanceMatrix:
    """Normalized-Kendall matrix between the given participants for one task.

    `rankings` holds one consistent ranking per retained participant.
    """
    by_p = {r.participant_id: r for r in rankings}
    n = len(participants)
    vals = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = normalized_kendall(by_p[participants[i]], by_p[participants[j]])
            vals[i, j] = vals[j, i] = d
    return DistanceMatrix(list(participants), vals)


def per_task_distance_matrix(responses: list[SurveyResponse], task: TaskSpec,
                             which: str = "most") -> DistanceMatrix:
    """Binary 0/1 agreement matrix over all responders of one task.

    which selects the answer compared: "most" or "least" (the paper's 20
    matrices are the most- and least-answers of the ten sets).
    """
    if which not in ("most", "least"):
        raise ValueError("which must be 'most' or 'least'")
    rows = [r for r in responses if r.task_id == task.task_id]
    participants = sorted({r.participant_id for r in rows})
    answer = {}
    for r in rows:
        a = r.most_similar if which == "most" else r.least_similar
        answer[r.participant_id] = a
    n = len(participants)
    vals = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = 0.0 if answer[participants[i]] == answer[participants[j]] else 1.0
            vals[i, j] = vals[j, i] = d
    return DistanceMatrix(participants, vals)


def ornament_similarity_matrix(responses: list[SurveyResponse],
                               tasks: list[TaskSpec],
                               participant_count: int | None = None
                               ) -> SimilarityMatrix:
    """Sparse ornament similarity from single-pick tasks.

    option <-> query: per task, selections / participant_count, averaged
    over the option's tasks.  option <-> option: per shared task, the ratio
    of the two selection counts (smaller over larger, so that an even split
    scores 1), averaged over shared tasks.  Pairs never co-presented stay 0
    with observed=False; the diagonal is 1.
    """
    picks = [t for t in tasks if not t.warmup]
    by_task: dict[str, list[SurveyResponse]] = {t.task_id: [] for t in picks}
    task_map = {t.task_id: t for t in picks}
    all_participants = set()
    for r in responses:
        if r.task_id in by_task:
            _validate_response(r, task_map)
            by_task[r.task_id].append(r)
            all_participants.add(r.participant_id)
    if participant_count is None:
        participant_count = len(all_participants)
    if participant_count <= 0:
        raise ZeroParticipantsError("similarity needs at least one participant")

    queries = {t.query for t in picks}
    labels = sorted(queries | {o for t in picks for o in t.options})
    idx = {label: i for i, label in enumerate(labels)}
    n = len(labels)
    sums = np.zeros((n, n))
    counts = np.zeros((n, n), dtype=int)

    for t in picks:
        rows = by_task[t.task_id]
        votes = {o: 0 for o in t.options}
        for r in rows:
            votes[r.most_similar] += 1
        qi = idx[t.query]
        for o in t.options:
            oi = idx[o]
            s = votes[o] / participant_count
            sums[qi, oi] += s
            sums[oi, qi] += s
            counts[qi, oi] += 1
            counts[oi, qi] += 1
        for a in t.options:
            for b in t.options:
                if a >= b:
                    continue
                ca, cb = votes[a], votes[b]
                hi = max(ca, cb)
                s = (min(ca, cb) / hi) if hi > 0 else 0.0
                ai, bi = idx[a], idx[b]
                sums[ai, bi] += s
                sums[bi, ai] += s
                counts[ai, bi] += 1
                counts[bi, ai] += 1

    observed = counts > 0
    vals = np.divide(sums, counts, out=np.zeros_like(sums), where=observed)
    np.fill_diagonal(vals, 1.0)
    np.fill_diagonal(observed, True)
    return SimilarityMatrix(
        labels, vals, observed,
        meta={"participant_count": participant_count,
              "pair_ratio_convention":
                  "smaller count over larger (reproduces the 10/10=1 example; "
                  "the prose ratio is ambiguous)"})


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def matrix_to_csv(labels: list[str], values: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([""] + list(labels))
    for label, row in zip(labels, np.asarray(values)):
        w.writerow([label] + [_fmt(v) for v in row])
    return buf.getvalue()


def _fmt(v: float) -> str:
    return f"{v:.10g}"


def matrix_from_csv(text: str) -> tuple[list[str], np.ndarray]:
    rows = list(csv.reader(io.StringIO(text)))
    labels = rows[0][1:]
    vals = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
    return labels, vals

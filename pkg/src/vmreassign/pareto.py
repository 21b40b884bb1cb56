"""Pareto archive, dominance, hypervolume and the sorting helpers NSGA-II needs."""

from __future__ import annotations

import io
from typing import Iterable, Iterator, Sequence

import numpy as np

from vmreassign.instance import Assignment
from vmreassign.objectives import ObjectiveVector

REF_MARGIN = 1.1
REF_ZERO_MARGIN = 1.0


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and strictly better somewhere (minimization)."""
    strict = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            strict = True
    return strict


class ParetoArchive:
    """Mutually non-dominated ``(assignment, objectives)`` pairs.

    Duplicate objective vectors are rejected on :meth:`insert`, so the first
    assignment seen for a point is the one kept.
    """

    def __init__(self, entries: Iterable[tuple[Sequence[int], Sequence[float]]] = ()):
        self._entries: list[tuple[Assignment, ObjectiveVector]] = []
        for a, o in entries:
            self.insert(a, o)

    def insert(self, assignment: Sequence[int], objectives: Sequence[float]) -> bool:
        o = ObjectiveVector(*(float(x) for x in objectives))
        keep = []
        for entry in self._entries:
            p = entry[1]
            if p == o or dominates(p, o):
                return False
            if not dominates(o, p):
                keep.append(entry)
        keep.append((tuple(int(m) for m in assignment), o))
        self._entries = keep
        return True

    def update(self, other: Iterable[tuple[Sequence[int], Sequence[float]]]) -> int:
        """Insert every entry of ``other``; returns how many were accepted."""
        return sum(self.insert(a, o) for a, o in other)

    def merge(self, other: ParetoArchive) -> ParetoArchive:
        """Union of two archives, independent of argument order.

        Where both hold the same objective vector the lexicographically
        smaller assignment wins, which makes merge commutative, associative
        and idempotent (unlike repeated :meth:`insert`, which keeps the first).
        """
        best: dict[ObjectiveVector, Assignment] = {}
        for a, o in list(self) + list(other):
            if o not in best or a < best[o]:
                best[o] = a
        out = ParetoArchive()
        for o in sorted(best):
            out.insert(best[o], o)
        return out

    def copy(self) -> ParetoArchive:
        out = ParetoArchive()
        out._entries = list(self._entries)
        return out

    @property
    def entries(self) -> list[tuple[Assignment, ObjectiveVector]]:
        return list(self._entries)

    def points(self) -> np.ndarray:
        return np.array([o for _, o in self._entries], dtype=float).reshape(-1, 3)

    def point_set(self) -> set[ObjectiveVector]:
        return {o for _, o in self._entries}

    def assignments(self) -> list[Assignment]:
        return [a for a, _ in self._entries]

    def __iter__(self) -> Iterator[tuple[Assignment, ObjectiveVector]]:
        return iter(list(self._entries))

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, o) -> bool:
        return ObjectiveVector(*o) in self.point_set()

    def __repr__(self) -> str:
        return f"ParetoArchive({sorted(self.point_set())})"


def nondominated(points: Iterable[Sequence[float]]) -> list[tuple[float, ...]]:
    """Non-dominated subset (duplicates collapsed) of a point cloud."""
    arch = ParetoArchive()
    for p in points:
        arch.insert((), p)
    return [tuple(o) for o in arch.point_set()]


def count_solutions(arch: ParetoArchive) -> int:
    return len(arch)


def _as_points(s) -> np.ndarray:
    if isinstance(s, ParetoArchive):
        return s.points()
    return np.asarray(list(s), dtype=float).reshape(-1, 3) if len(s) else np.zeros((0, 3))


def reference_point(sets: Iterable) -> tuple[float, ...]:
    """Component-wise worst value over all compared fronts, times 1.1.

    A component whose worst value is 0 gets an absolute margin of 1.0
    instead, so boundary points still enclose volume.
    """
    pts = [p for s in sets for p in _as_points(s)]
    if not pts:
        raise ValueError("cannot build a reference point from empty fronts")
    worst = np.max(np.array(pts, dtype=float), axis=0)
    ref = np.where(worst > 0, worst * REF_MARGIN, worst + REF_ZERO_MARGIN)
    return tuple(float(x) for x in ref)


def hypervolume(front, ref: Sequence[float]) -> float:
    """Exact Lebesgue measure dominated by ``front`` inside the box bounded by ``ref``.

    Works in any dimension by slicing along the last axis; at two dimensions
    it is a plain sweep. Points equal to ``ref`` in some axis add nothing.

    Raises:
        ValueError: a point exceeds the reference point in some component.
    """
    ref = tuple(float(x) for x in ref)
    if isinstance(front, ParetoArchive):
        pts = front.points()
    else:
        pts = np.asarray(list(front), dtype=float).reshape(-1, len(ref))
    for p in pts:
        if np.any(p > np.asarray(ref)):
            raise ValueError(f"point {tuple(p.tolist())} lies outside reference point {ref}")
    pts = pts[np.all(pts < np.asarray(ref), axis=1)]
    if len(pts) == 0:
        return 0.0
    return float(_hv(pts, np.asarray(ref)))


def _hv(pts: np.ndarray, ref: np.ndarray) -> float:
    d = pts.shape[1]
    if d == 1:
        return float(ref[0] - pts[:, 0].min())
    if d == 2:
        order = np.lexsort((pts[:, 1], pts[:, 0]))
        area, best_y = 0.0, ref[1]
        for x, y in pts[order]:
            if y < best_y:
                area += (ref[0] - x) * (best_y - y)
                best_y = y
        return area
    order = np.argsort(pts[:, -1], kind="stable")
    pts = pts[order]
    vol = 0.0
    for i in range(len(pts)):
        top = pts[i + 1, -1] if i + 1 < len(pts) else ref[-1]
        depth = top - pts[i, -1]
        if depth > 0:
            vol += _hv(pts[: i + 1, :-1], ref[:-1]) * depth
    return vol


# NSGA-II helpers -------------------------------------------------------------


def nondominated_sort(points: Sequence[Sequence[float]]) -> list[list[int]]:
    """Fronts of indices, best first (fast non-dominated sort)."""
    n = len(points)
    dominated_by = [[] for _ in range(n)]
    counts = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if dominates(points[i], points[j]):
                dominated_by[i].append(j)
                counts[j] += 1
            elif dominates(points[j], points[i]):
                dominated_by[j].append(i)
                counts[i] += 1
    fronts = []
    current = [i for i in range(n) if counts[i] == 0]
    while current:
        fronts.append(current)
        nxt = []
        for i in current:
            for j in dominated_by[i]:
                counts[j] -= 1
                if counts[j] == 0:
                    nxt.append(j)
        current = sorted(nxt)
    return fronts


def crowding_distance(points: Sequence[Sequence[float]]) -> np.ndarray:
    """Crowding distance per point; boundary points of every axis get ``inf``."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for k in range(pts.shape[1]):
        order = np.argsort(pts[:, k], kind="stable")
        lo, hi = pts[order[0], k], pts[order[-1], k]
        dist[order[0]] = dist[order[-1]] = np.inf
        if hi == lo:
            continue
        gaps = (pts[order[2:], k] - pts[order[:-2], k]) / (hi - lo)
        dist[order[1:-1]] += gaps
    return dist


# serialization ---------------------------------------------------------------


def write_archive(arch: ParetoArchive, instance_name: str = "", ref: Sequence[float] | None = None) -> str:
    """One tab-separated line per entry: three objectives then the machine of each VM."""
    out = io.StringIO()
    out.write(f"# instance\t{instance_name}\n")
    if ref is not None:
        out.write("# reference\t" + "\t".join(repr(float(x)) for x in ref) + "\n")
    out.write("# reliability\telectricity\tmigration\tassignment...\n")
    for a, o in sorted(arch, key=lambda e: e[1]):
        out.write("\t".join([*(repr(float(x)) for x in o), *map(str, a)]) + "\n")
    return out.getvalue()


def read_archive(text: str) -> tuple[ParetoArchive, dict]:
    """Inverse of :func:`write_archive`; returns the archive and the header fields."""
    header: dict = {}
    arch = ParetoArchive()
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, *vals = line[1:].strip().split("\t")
            if key == "instance":
                header["instance"] = vals[0] if vals else ""
            elif key == "reference":
                header["reference"] = tuple(float(x) for x in vals)
            continue
        toks = line.split("\t")
        arch.insert([int(t) for t in toks[3:]], [float(t) for t in toks[:3]])
    return arch, header

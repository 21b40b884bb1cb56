"""Reliability, electricity and migration costs, and weighted-sum scalarization."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import NamedTuple, Sequence

import numpy as np

from vmreassign.feasibility import compute_usage
from vmreassign.instance import Instance, check_assignment


class ObjectiveVector(NamedTuple):
    reliability: float
    electricity: float
    migration: float


@dataclass(frozen=True)
class WeightVector:
    """Non-negative weights in (reliability, electricity, migration) order."""

    reliability: float
    electricity: float
    migration: float

    def __post_init__(self):
        w = self.as_tuple()
        if any(x < 0 or x != x for x in w):
            raise ValueError(f"weights must be non-negative: {w}")
        if not any(w):
            raise ValueError("weight vector must not be all zero")

    @classmethod
    def of(cls, w: Sequence[float] | WeightVector) -> WeightVector:
        if isinstance(w, WeightVector):
            return w
        return cls(*(float(x) for x in w))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.reliability, self.electricity, self.migration)

    def __iter__(self):
        return iter(self.as_tuple())

    def __str__(self) -> str:
        return "(" + ", ".join(f"{x:g}" for x in self) + ")"


IDENTITY = WeightVector(1.0, 1.0, 1.0)

# Maximally spread directions, tried in this order.
SPREAD_VECTORS = (
    WeightVector(1.0, 1.0, 1.0),
    WeightVector(0.6, 0.3, 0.1),
    WeightVector(0.3, 0.1, 0.6),
    WeightVector(0.1, 0.6, 0.3),
    WeightVector(0.45, 0.45, 0.1),
    WeightVector(0.45, 0.1, 0.45),
    WeightVector(0.1, 0.45, 0.45),
)


def reliability_cost(inst: Instance, usage: np.ndarray) -> float:
    return float(np.maximum(usage - inst.safety, 0).sum())


def machines_on(inst: Instance, a: Sequence[int]) -> np.ndarray:
    on = np.zeros(inst.n_machines, dtype=bool)
    on[np.asarray(a, dtype=np.int64)] = True
    return on


def electricity_cost(inst: Instance, a: Sequence[int], usage: np.ndarray) -> float:
    """Price-weighted idle draw of hosting machines plus per-CPU draw.

    A machine is on iff it hosts a VM. Transient CPU held on an empty initial
    host still draws per-CPU power there.
    """
    on = machines_on(inst, a)
    cpu = usage[:, inst.cpu_resource]
    return float(np.sum(inst.gamma * (inst.alpha * on + inst.beta * cpu)))


def migration_cost(inst: Instance, a: Sequence[int]) -> float:
    a = np.asarray(a, dtype=np.int64)
    return float(inst.move_cost[np.arange(inst.n_vms), a].sum())


def evaluate(inst: Instance, a: Sequence[int]) -> ObjectiveVector:
    """Objective triple of ``a``; does not check feasibility."""
    a = check_assignment(inst, a)
    usage = compute_usage(inst, a)
    return ObjectiveVector(
        reliability_cost(inst, usage),
        electricity_cost(inst, a, usage),
        migration_cost(inst, a),
    )


def scalarize(o: Sequence[float], w: Sequence[float] | WeightVector) -> float:
    w = WeightVector.of(w)
    return float(w.reliability * o[0] + w.electricity * o[1] + w.migration * o[2])


def spread_vectors(k: int) -> list[WeightVector]:
    """The first ``k`` (1..7) maximally spread weight vectors."""
    if not 1 <= k <= len(SPREAD_VECTORS):
        raise ValueError(f"k must be in 1..{len(SPREAD_VECTORS)}, got {k}")
    return list(SPREAD_VECTORS[:k])


def simplex_lattice(divisions: int) -> list[WeightVector]:
    """Das-Dennis lattice on the 3-simplex: all weights ``i/divisions`` summing to 1.

    Used for sweeps beyond the seven spread vectors.
    """
    if divisions < 1:
        raise ValueError("divisions must be >= 1")
    out = []
    for combo in combinations_with_replacement(range(3), divisions):
        counts = [combo.count(i) for i in range(3)]
        out.append(WeightVector(*(c / divisions for c in counts)))
    return out


def weight_vectors(k: int) -> list[WeightVector]:
    """``spread_vectors(k)`` for k <= 7; otherwise the spread set extended from a lattice."""
    if k <= len(SPREAD_VECTORS):
        return spread_vectors(k)
    out = list(SPREAD_VECTORS)
    seen = {w.as_tuple() for w in out}
    h = 2
    while len(out) < k:
        for w in simplex_lattice(h):
            if w.as_tuple() not in seen and len(out) < k:
                seen.add(w.as_tuple())
                out.append(w)
        h += 1
    return out


class Normalizer:
    """Optional min-max rescaling of objective vectors to [0, 1] per axis.

    Off in every default code path; objectives are compared in their native
    units unless a caller opts in.
    """

    def __init__(self, ideal: Sequence[float], nadir: Sequence[float]):
        self.ideal = np.asarray(ideal, dtype=float)
        span = np.asarray(nadir, dtype=float) - self.ideal
        self.span = np.where(span > 0, span, 1.0)

    @classmethod
    def from_points(cls, points) -> Normalizer:
        pts = np.asarray(list(points), dtype=float).reshape(-1, 3)
        return cls(pts.min(axis=0), pts.max(axis=0))

    def __call__(self, o: Sequence[float]) -> ObjectiveVector:
        return ObjectiveVector(*((np.asarray(o, dtype=float) - self.ideal) / self.span).tolist())

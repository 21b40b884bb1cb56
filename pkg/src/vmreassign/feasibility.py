"""Constraint checking for assignments: capacity, conflict, dependency, spread.

Dependency and spread are tested as the predicates they encode ("service
occupies neighbourhood n", "service spans k locations"), not through the
big-M indicator rows of the MILP.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from vmreassign.instance import Assignment, Instance, check_assignment

KINDS = ("capacity", "conflict", "dependency", "spread")
_KIND_ORDER = {k: i for i, k in enumerate(KINDS)}


@dataclass(frozen=True, order=True)
class Violation:
    """One broken constraint.

    ``subjects`` depends on ``kind``: ``(machine, resource)`` for capacity,
    ``(service, machine)`` for conflict, ``(service, required_service,
    neighbourhood)`` for dependency and ``(service,)`` for spread. ``amount``
    is the excess (capacity units, surplus VMs, missing locations; 1 per
    dependency gap).
    """

    kind: str
    subjects: tuple[int, ...]
    amount: float

    def __str__(self) -> str:
        return f"{self.kind} {self.subjects} by {self.amount:g}"


@dataclass(frozen=True)
class FeasibilityReport:
    violations: tuple[Violation, ...] = ()

    @property
    def feasible(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.feasible

    def total(self) -> float:
        """Sum of violation amounts; a crude distance to feasibility."""
        return float(sum(v.amount for v in self.violations))


def _report(violations) -> FeasibilityReport:
    return FeasibilityReport(tuple(sorted(violations, key=lambda v: (_KIND_ORDER[v.kind], v.subjects))))


def compute_usage(inst: Instance, a: Sequence[int]) -> np.ndarray:
    """``|M| x |R|`` resource usage.

    Non-transient demand counts on the final host only. Transient demand
    counts on the initial host unconditionally and also on the final host
    when the VM moved.
    """
    a = np.asarray(a, dtype=np.int64)
    usage = inst.base_usage.copy()
    np.add.at(usage, a, inst.added_demand[np.arange(inst.n_vms), a])
    return usage


def _occupancy(inst: Instance, a: Sequence[int], members: Sequence[int], per: np.ndarray) -> set[int]:
    return {int(per[a[v]]) for v in members}


def check(inst: Instance, a: Sequence[int]) -> FeasibilityReport:
    """All violated constraints of assignment ``a``."""
    a = check_assignment(inst, a)
    out: list[Violation] = []

    usage = compute_usage(inst, a)
    over = usage - inst.capacity
    for m, r in zip(*np.nonzero(over > 0)):
        out.append(Violation("capacity", (int(m), int(r)), float(over[m, r])))

    neigh_occ = []
    for s in inst.services:
        counts: dict[int, int] = {}
        for v in s.members:
            counts[a[v]] = counts.get(a[v], 0) + 1
        for m, c in counts.items():
            if c > 1:
                out.append(Violation("conflict", (s.id, m), float(c - 1)))
        neigh_occ.append(_occupancy(inst, a, s.members, inst.neighborhood_of))
        n_locs = len(_occupancy(inst, a, s.members, inst.location_of))
        if n_locs < s.spread_min:
            out.append(Violation("spread", (s.id,), float(s.spread_min - n_locs)))

    for si, sj in inst.dependencies:
        for n in sorted(neigh_occ[si] - neigh_occ[sj]):
            out.append(Violation("dependency", (si, sj, n), 1.0))
    return _report(out)


def is_feasible(inst: Instance, a: Sequence[int]) -> bool:
    return check(inst, a).feasible


def apply_move(inst: Instance, a: Sequence[int], usage: np.ndarray, v: int, m: int) -> tuple[Assignment, np.ndarray]:
    """Assignment and usage after moving ``v`` to ``m`` (inputs untouched)."""
    src = a[v]
    new_usage = usage.copy()
    if src != m:
        new_usage[src] -= inst.added_demand[v, src]
        new_usage[m] += inst.added_demand[v, m]
    b = list(a)
    b[v] = m
    return tuple(b), new_usage


def check_move(inst: Instance, a: Sequence[int], usage: np.ndarray, v: int, m: int) -> FeasibilityReport:
    """Violations of ``a`` with ``M(v) := m``, touching only what the move can change.

    The scope is capacity on the source and target machines, conflict and
    spread of v's service, and dependency edges into or out of that service
    on the source and target neighbourhoods. When ``a`` is feasible this is
    exactly ``check`` of the moved assignment; otherwise violations outside
    the scope are not reported.
    """
    src = a[v]
    s = inst.services[inst.vms[v].service]
    out: list[Violation] = []

    machines = (src,) if src == m else (src, m)
    for mm in machines:
        row = usage[mm]
        if mm == src and src != m:
            row = row - inst.added_demand[v, src]
        if mm == m and src != m:
            row = row + inst.added_demand[v, m]
        excess = row - inst.capacity[mm]
        for r in np.flatnonzero(excess > 0):
            out.append(Violation("capacity", (int(mm), int(r)), float(excess[r])))

    def host(u: int) -> int:
        return m if u == v else a[u]

    counts: dict[int, int] = {}
    locs: set[int] = set()
    occ_s: set[int] = set()
    for u in s.members:
        h = host(u)
        counts[h] = counts.get(h, 0) + 1
        locs.add(int(inst.location_of[h]))
        occ_s.add(int(inst.neighborhood_of[h]))
    for mm in machines:
        if counts.get(mm, 0) > 1:
            out.append(Violation("conflict", (s.id, int(mm)), float(counts[mm] - 1)))
    if len(locs) < s.spread_min:
        out.append(Violation("spread", (s.id,), float(s.spread_min - len(locs))))

    touched = {int(inst.neighborhood_of[src]), int(inst.neighborhood_of[m])}
    for si, sj in _edges_of(inst, s.id):
        other = sj if si == s.id else si
        occ_other = {int(inst.neighborhood_of[host(u)]) for u in inst.services[other].members}
        occ_i, occ_j = (occ_s, occ_other) if si == s.id else (occ_other, occ_s)
        for n in sorted(touched & (occ_i - occ_j)):
            out.append(Violation("dependency", (si, sj, n), 1.0))
    return _report(out)


def _edges_of(inst: Instance, s: int) -> list[tuple[int, int]]:
    return inst.edges_by_service.get(s, [])


@dataclass
class PartialState:
    """Bookkeeping for building an assignment one VM at a time.

    Tracks usage (starting from the transient base at initial hosts) and
    per-service occupancy of machines, neighbourhoods and locations so
    capacity, conflict and the necessary conditions for dependency and spread
    can be tested in time independent of |V|.
    """

    inst: Instance
    assign: list[int] = field(default_factory=list)
    usage: np.ndarray = None
    svc_machine: np.ndarray = None
    svc_neigh: np.ndarray = None
    svc_loc: np.ndarray = None
    remaining: np.ndarray = None

    def __post_init__(self):
        inst = self.inst
        if self.usage is None:
            S = inst.n_services
            self.assign = [-1] * inst.n_vms
            self.usage = inst.base_usage.copy()
            self.svc_machine = np.zeros((S, inst.n_machines), dtype=np.int64)
            self.svc_neigh = np.zeros((S, inst.n_neighborhoods), dtype=np.int64)
            self.svc_loc = np.zeros((S, inst.n_locations), dtype=np.int64)
            self.remaining = np.array([len(s.members) for s in inst.services], dtype=np.int64)

    def copy(self) -> PartialState:
        return PartialState(
            self.inst, list(self.assign), self.usage.copy(), self.svc_machine.copy(),
            self.svc_neigh.copy(), self.svc_loc.copy(), self.remaining.copy(),
        )

    def allowed(self, v: int) -> np.ndarray:
        """Machines that can take ``v`` now without breaking capacity or conflict."""
        inst = self.inst
        fits = np.all(self.usage + inst.added_demand[v] <= inst.capacity, axis=1)
        return fits & (self.svc_machine[inst.vms[v].service] == 0)

    def place(self, v: int, m: int) -> bool:
        """Assign ``v`` to ``m``; False if a dependency/spread condition can no longer be met."""
        inst = self.inst
        s = inst.vms[v].service
        n = inst.neighborhood_of[m]
        self.assign[v] = m
        self.usage[m] += inst.added_demand[v, m]
        self.svc_machine[s, m] += 1
        self.svc_neigh[s, n] += 1
        self.svc_loc[s, inst.location_of[m]] += 1
        self.remaining[s] -= 1

        svc = inst.services[s]
        if np.count_nonzero(self.svc_loc[s]) + self.remaining[s] < svc.spread_min:
            return False
        for sj in svc.depends_on:
            if self.svc_neigh[sj, n] == 0 and self.remaining[sj] == 0:
                return False
        if self.remaining[s] == 0:
            for si, sj in _edges_of(inst, s):
                if sj == s and np.any((self.svc_neigh[si] > 0) & (self.svc_neigh[s] == 0)):
                    return False
        return True

    def assignment(self) -> Assignment:
        if any(m < 0 for m in self.assign):
            raise ValueError("partial assignment is incomplete")
        return tuple(self.assign)

"""Weighted-sum branch-and-bound with a relative optimality-gap stop and a solution pool.

Search is depth-first over VMs in decreasing order of their largest demand;
children are tried by increasing bound, ties broken by marginal cost. The
global lower bound is the smallest bound among open nodes (or the incumbent
when smaller), so a larger gap tolerance only ever cuts the same search short.
"""

from __future__ import annotations

import io
import logging
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from vmreassign.feasibility import PartialState, check
from vmreassign.instance import Assignment, Instance
from vmreassign.objectives import ObjectiveVector, WeightVector, evaluate, scalarize, weight_vectors
from vmreassign.pareto import ParetoArchive

log = logging.getLogger(__name__)

EPS = 1e-9
STATUSES = ("optimal_within_gap", "time_limit", "node_limit", "infeasible", "skipped")


@dataclass(frozen=True)
class SolverConfig:
    gap: float = 0.0
    time_limit_s: float = 60.0
    pool_all_feasible: bool = True
    node_limit: int | None = None
    warm_start: bool = True

    def __post_init__(self):
        if not 0.0 <= self.gap <= 1.0:
            raise ValueError(f"gap must be in [0, 1], got {self.gap}")
        if not self.time_limit_s > 0:
            raise ValueError("time_limit_s must be positive")
        if self.node_limit is not None and self.node_limit < 1:
            raise ValueError("node_limit must be >= 1")


@dataclass(frozen=True)
class Incumbent:
    assignment: Assignment
    objectives: ObjectiveVector
    value: float


@dataclass
class SolveReport:
    weights: WeightVector
    status: str
    incumbent: Incumbent | None = None
    lower_bound: float = float("-inf")
    achieved_gap: float = float("inf")
    pool: list[tuple[Assignment, ObjectiveVector]] = field(default_factory=list)
    elapsed_s: float = 0.0
    nodes_explored: int = 0
    # (nodes, incumbent value, lower bound) each time either changed
    trace: list[tuple[int, float, float]] = field(default_factory=list)


def relative_gap(value: float, bound: float) -> float:
    """``(value - bound) / max(|bound|, EPS)``; absolute when the bound is ~0."""
    if value == float("inf"):
        return float("inf")
    return max(0.0, (value - bound) / max(abs(bound), EPS))


class _Model:
    """Per (instance, weights) constants used at every node."""

    def __init__(self, inst: Instance, w: WeightVector):
        self.inst = inst
        self.w = w
        wr, we, wm = w.as_tuple()
        self.add = inst.added_demand
        cpu = inst.cpu_resource
        self.cpu_cost = we * (inst.gamma * inst.beta)[None, :] * self.add[:, :, cpu]
        self.mig_cost = wm * inst.move_cost
        self.static = self.cpu_cost + self.mig_cost
        self.idle = we * inst.gamma * inst.alpha
        self.we = we
        self.cpu_price = we * inst.gamma * inst.beta
        self.wr = wr
        # least usage each VM can add per resource, wherever it goes
        self.min_add = self.add.min(axis=1)
        self.dep_matrix = np.zeros((inst.n_services, inst.n_services), dtype=np.int64)
        for si, sj in inst.dependencies:
            self.dep_matrix[si, sj] = 1
        self.has_deps = bool(self.dep_matrix.any())
        self.order = sorted(range(inst.n_vms), key=lambda v: (-max(inst.vms[v].demand, default=0), v))
        base = inst.base_usage
        self.root_cost = (
            wr * float(np.maximum(base - inst.safety, 0).sum())
            + we * float(np.sum(inst.gamma * inst.beta * base[:, cpu]))
        )

    def blocked(self, state: PartialState) -> np.ndarray | None:
        """``[s, n]`` true where a completed service that s depends on is absent from neighbourhood n."""
        if not self.has_deps:
            return None
        missing = (state.svc_neigh == 0) & (state.remaining == 0)[:, None]
        return (self.dep_matrix @ missing.astype(np.int64)) > 0

    def marginals(self, state: PartialState, rows: np.ndarray) -> np.ndarray:
        """Bound contribution of each row VM on each machine (``inf`` where not allowed).

        Excludes the idle cost of switching a machine on, which several VMs may share.
        """
        inst = self.inst
        over = state.usage - inst.safety
        add = self.add[rows]
        h = self.static[rows].copy()
        if self.wr:
            h += self.wr * (np.maximum(over[None] + add, 0).sum(axis=2) - np.maximum(over, 0).sum(axis=1)[None])
        fits = np.all(state.usage[None] + add <= inst.capacity[None], axis=2)
        free = state.svc_machine[inst.service_of[rows]] == 0
        blocked = self.blocked(state)
        if blocked is not None:
            free &= ~blocked[inst.service_of[rows]][:, inst.neighborhood_of]
        h[~(fits & free)] = np.inf
        return h

    def column(self, state: PartialState, rows: np.ndarray, m: int) -> np.ndarray:
        """Same as :meth:`marginals` restricted to machine ``m``."""
        inst = self.inst
        over = state.usage[m] - inst.safety[m]
        add = self.add[rows, m]
        col = self.static[rows, m].copy()
        if self.wr:
            col += self.wr * (np.maximum(over[None] + add, 0).sum(axis=1) - np.maximum(over, 0).sum())
        ok = np.all(state.usage[m][None] + add <= inst.capacity[m][None], axis=1)
        ok &= state.svc_machine[inst.service_of[rows], m] == 0
        blocked = self.blocked(state)
        if blocked is not None:
            ok &= ~blocked[inst.service_of[rows], inst.neighborhood_of[m]]
        col[~ok] = np.inf
        return col

    def idle_bound(self, state: PartialState, on: np.ndarray, need: np.ndarray) -> float:
        """Least idle cost of the machines that must still be switched on.

        ``need`` is the least usage the unassigned VMs will add per resource.
        What cannot fit in the spare capacity of machines already on has to be
        covered by machines now off; the fractional covering relaxation of
        that choice, worst resource taken, bounds the idle cost from below.
        """
        if on.all() or not need.any():
            return 0.0
        spare = np.maximum(self.inst.capacity - state.usage, 0)
        short = need - spare[on].sum(axis=0)
        off = np.flatnonzero(~on)
        best = 0.0
        for r in np.flatnonzero(short > 0):
            cap = spare[off, r].astype(float)
            if cap.sum() < short[r]:
                return float("inf")
            usable = cap > 0
            ratio = np.zeros(len(off))
            ratio[usable] = self.idle[off[usable]] / cap[usable]
            best = max(best, _pour(float(short[r]), np.where(usable, cap, 0.0), ratio))
        return best

    def opening_bound(self, state: PartialState, on: np.ndarray) -> float:
        """Idle cost of machines conflicts force on.

        The unplaced VMs of a service need distinct machines the service does
        not use yet; whatever the machines already on cannot provide must be
        switched on, cheapest idle draw first.
        """
        used = np.count_nonzero(state.svc_machine, axis=1)
        extra = int((state.remaining + used).max(initial=0)) - int(on.sum())
        if extra <= 0:
            return 0.0
        off_idle = np.sort(self.idle[~on])
        if extra > len(off_idle):
            return float("inf")
        return float(off_idle[:extra].sum())

    def electricity_fill(self, state: PartialState, on: np.ndarray, demand: float) -> tuple[float, float]:
        """Least CPU electricity of ``demand`` more CPU units, without and with idle draw.

        Demand is poured fractionally into spare CPU capacity, cheapest unit
        first. In the second figure a machine that is off also charges its
        idle power spread over its spare capacity.
        """
        if demand <= 0:
            return 0.0, 0.0
        cpu = self.inst.cpu_resource
        spare = np.maximum(self.inst.capacity[:, cpu] - state.usage[:, cpu], 0).astype(float)
        if spare.sum() < demand:
            return float("inf"), float("inf")
        unit = self.cpu_price.copy()
        off = ~on & (spare > 0)
        unit[off] += self.idle[off] / spare[off]
        return _pour(demand, spare, self.cpu_price), _pour(demand, spare, unit)

    def remaining_need(self, rows: np.ndarray) -> np.ndarray:
        return self.min_add[rows].sum(axis=0)

    def bound(self, state: PartialState, need: np.ndarray, hmin: float, gmin: float) -> float:
        """Best of several valid splits of the cost still to come.

        ``hmin`` sums each unassigned VM's cheapest full marginal and ``gmin``
        the same without the CPU term; the latter pairs with capacity-aware
        CPU bounds. ``need`` comes from :meth:`remaining_need`.
        """
        if not self.we:
            return hmin
        on = state.svc_machine.any(axis=0)
        idle = max(self.idle_bound(state, on, need), self.opening_bound(state, on))
        a = hmin + idle
        if not np.isfinite(a):
            return a
        cpu_only, with_idle = self.electricity_fill(state, on, float(need[self.inst.cpu_resource]))
        return max(a, gmin + with_idle, gmin + cpu_only + idle)

    def step_cost(self, state: PartialState, v: int, m: int) -> float:
        """Exact increase of the scalarized cost when ``v`` goes to ``m``."""
        inst = self.inst
        cost = self.static[v, m]
        if not state.svc_machine[:, m].any():
            cost += self.idle[m]
        if self.wr:
            over = state.usage[m] - inst.safety[m]
            cost += self.wr * float(np.maximum(over + self.add[v, m], 0).sum() - np.maximum(over, 0).sum())
        return float(cost)


def _pour(demand: float, spare: np.ndarray, unit: np.ndarray) -> float:
    """Cost of filling ``demand`` units into bins of size ``spare``, cheapest ``unit`` price first."""
    cost = 0.0
    for m in np.argsort(unit, kind="stable"):
        take = min(demand, float(spare[m]))
        cost += take * float(unit[m])
        demand -= take
        if demand <= 0:
            break
    return cost


def _two_best(mat: np.ndarray):
    """Per-row argmin, min and second min, so a min with one column replaced is O(1)."""
    part = np.argsort(mat, axis=1, kind="stable")
    idx = np.arange(len(mat))
    best1 = mat[idx, part[:, 0]]
    best2 = mat[idx, part[:, 1]] if mat.shape[1] > 1 else np.full(len(mat), np.inf)
    return part[:, 0], best1, best2


def _min_with_column(mins, m: int, col: np.ndarray) -> np.ndarray:
    idx1, best1, best2 = mins
    return np.minimum(np.where(idx1 == m, best2, best1), col)


@dataclass
class _Node:
    bound: float
    depth: int
    cost: float
    state: PartialState


def lower_bound(inst: Instance, w: Sequence[float] | WeightVector, partial: Sequence[int | None]) -> float:
    """Admissible bound on the scalarized cost of any feasible completion of ``partial``.

    ``partial`` maps VMs to machines with ``None`` (or -1) for unassigned VMs.
    Committed cost of the assigned VMs, plus for every unassigned VM its
    cheapest marginal cost over machines it can still enter (idle power
    excluded, since VMs may share a machine), plus a covering bound on the
    idle power of machines that must still be switched on. Returns ``inf`` when the partial
    assignment already breaks a constraint or leaves some VM nowhere to go.
    """
    model = _Model(inst, WeightVector.of(w))
    state = PartialState(inst)
    cost = model.root_cost
    assigned = [(v, m) for v, m in enumerate(partial) if m is not None and m >= 0]
    for v, m in assigned:
        if not state.allowed(v)[m]:
            return float("inf")
        cost += model.step_cost(state, v, m)
        if not state.place(v, m):
            return float("inf")
    if len(assigned) == inst.n_vms:
        return cost if check(inst, state.assignment()).feasible else float("inf")
    rows = np.array([v for v, m in enumerate(partial) if m is None or m < 0], dtype=np.int64)
    h = model.marginals(state, rows)
    best = h.min(axis=1)
    if np.any(np.isinf(best)):
        return float("inf")
    g = h - model.cpu_cost[rows]
    return float(cost + model.bound(state, model.remaining_need(rows), float(best.sum()), float(g.min(axis=1).sum())))


def solve_weighted(inst: Instance, w: Sequence[float] | WeightVector, cfg: SolverConfig | None = None) -> SolveReport:
    """Minimize ``scalarize(evaluate(inst, a), w)`` over feasible assignments.

    Stops when the relative gap between incumbent and global lower bound is
    within ``cfg.gap``, or at the time/node limit. Every feasible leaf reached
    goes into the pool when ``cfg.pool_all_feasible``; otherwise only
    successive incumbents do.
    """
    cfg = cfg or SolverConfig()
    w = WeightVector.of(w)
    model = _Model(inst, w)
    order = model.order
    n = inst.n_vms
    start = time.perf_counter()
    report = SolveReport(weights=w, status="infeasible")

    inc_value = float("inf")
    incumbent: Incumbent | None = None
    pool: list[tuple[Assignment, ObjectiveVector]] = []
    lb_seen = float("-inf")

    def offer(a: Assignment, known: float | None = None) -> None:
        nonlocal inc_value, incumbent
        # a leaf clearly worse than the incumbent cannot matter without a full pool
        if known is not None and not cfg.pool_all_feasible and known > inc_value + EPS * max(1.0, abs(inc_value)):
            return
        if not check(inst, a).feasible:
            return
        o = evaluate(inst, a)
        value = scalarize(o, w)
        improved = value < inc_value
        if improved:
            inc_value, incumbent = value, Incumbent(a, o, value)
        if improved or cfg.pool_all_feasible:
            pool.append((a, o))

    if cfg.warm_start:
        offer(inst.initial_assignment)

    root_state = PartialState(inst)
    all_rows = np.array(order, dtype=np.int64)
    h = model.marginals(root_state, all_rows)
    g = h - model.cpu_cost[all_rows]
    root_bound = model.root_cost + model.bound(
        root_state, model.remaining_need(all_rows), float(h.min(axis=1).sum()), float(g.min(axis=1).sum())
    )
    stack = [_Node(root_bound, 0, model.root_cost, root_state)]
    nodes = 0
    status = None

    def record(lb: float) -> None:
        if not report.trace or report.trace[-1][1:] != (inc_value, lb):
            report.trace.append((nodes, inc_value, lb))

    while stack:
        lb = min(inc_value, min(nd.bound for nd in stack))
        lb = max(lb, lb_seen)
        lb_seen = lb
        record(lb)
        if incumbent is not None and relative_gap(inc_value, lb) <= cfg.gap:
            status = "optimal_within_gap"
            break
        if time.perf_counter() - start >= cfg.time_limit_s:
            status = "time_limit"
            break
        if cfg.node_limit is not None and nodes >= cfg.node_limit:
            status = "node_limit"
            break

        node = stack.pop()
        nodes += 1
        if node.bound >= inc_value - EPS * max(1.0, abs(inc_value)):
            continue
        if node.depth == n:
            offer(node.state.assignment())
            continue

        v = order[node.depth]
        rows = np.array(order[node.depth:], dtype=np.int64)
        h = model.marginals(node.state, rows)
        allowed = np.flatnonzero(np.isfinite(h[0]))
        rest = h[1:]
        if len(rest):
            hmins = _two_best(rest)
            gmins = _two_best(rest - model.cpu_cost[rows[1:]])
            need = model.remaining_need(rows[1:])

        children = []
        for m in allowed:
            m = int(m)
            step = model.step_cost(node.state, v, m)
            child = node.state.copy()
            if not child.place(v, m):
                continue
            cost = node.cost + step
            if len(rest):
                col = model.column(child, rows[1:], m)
                hbest = _min_with_column(hmins, m, col)
                if np.any(np.isinf(hbest)):
                    continue
                gbest = _min_with_column(gmins, m, col - model.cpu_cost[rows[1:], m])
                bound = cost + model.bound(child, need, float(hbest.sum()), float(gbest.sum()))
                # a parent's bound holds for its whole subtree
                bound = max(bound, node.bound)
            else:
                # complete: evaluate now so the pool sees it even when it cannot improve
                offer(child.assignment(), cost)
                continue
            if bound >= inc_value - EPS * max(1.0, abs(inc_value)):
                continue
            children.append((step, m, _Node(bound, node.depth + 1, cost, child)))
        children.sort(key=lambda c: (c[2].bound, c[0], c[1]))
        stack.extend(c[2] for c in reversed(children))

    if status is None:
        # tree exhausted: the incumbent is optimal
        lb_seen = max(lb_seen, inc_value) if incumbent is not None else float("inf")
        status = "optimal_within_gap" if incumbent is not None else "infeasible"
        record(lb_seen)

    report.status = status
    report.incumbent = incumbent
    report.lower_bound = lb_seen
    report.achieved_gap = relative_gap(inc_value, lb_seen) if incumbent is not None else float("inf")
    report.pool = pool
    report.nodes_explored = nodes
    report.elapsed_s = time.perf_counter() - start
    log.debug("solve %s: %s value=%s lb=%s gap=%.4g nodes=%d", w, status, inc_value, lb_seen, report.achieved_gap, nodes)
    return report


def multi_vector_run(
    inst: Instance,
    k_vectors: int | Sequence[WeightVector],
    cfg: SolverConfig | None = None,
    budget_s: float | None = None,
) -> tuple[ParetoArchive, list[SolveReport]]:
    """Solve successive weight vectors under one wall-clock budget and pool everything.

    Vectors the budget does not reach come back with status ``skipped``.
    """
    cfg = cfg or SolverConfig()
    vectors = weight_vectors(k_vectors) if isinstance(k_vectors, int) else [WeightVector.of(w) for w in k_vectors]
    budget = inst.time_budget_s if budget_s is None else budget_s
    start = time.perf_counter()
    archive = ParetoArchive()
    reports = []
    for w in vectors:
        remaining = budget - (time.perf_counter() - start)
        if remaining <= 0:
            reports.append(SolveReport(weights=w, status="skipped"))
            continue
        sub = SolverConfig(cfg.gap, min(cfg.time_limit_s, remaining), cfg.pool_all_feasible, cfg.node_limit, cfg.warm_start)
        rep = solve_weighted(inst, w, sub)
        for a, o in rep.pool:
            archive.insert(a, o)
        reports.append(rep)
    return archive, reports


# LP export -------------------------------------------------------------------


def _fmt(c: float) -> str:
    c = float(c)
    return str(int(c)) if c.is_integer() and abs(c) < 1e15 else repr(c)


class _LpWriter:
    def __init__(self):
        self.out = io.StringIO()
        self.n_constraints = 0

    def expr(self, terms: list[tuple[float, str]]) -> str:
        # LP readers disagree on repeated variables in one row, so merge them
        merged: dict[str, float] = {}
        for c, v in terms:
            merged[v] = merged.get(v, 0.0) + c
        terms = [(c, v) for v, c in merged.items() if c != 0] or [(0.0, "ONE")]
        parts = []
        for i, (c, v) in enumerate(terms):
            sign = "-" if c < 0 else "+"
            coef = _fmt(abs(c))
            piece = f"{v}" if coef == "1" else f"{coef} {v}"
            parts.append(piece if i == 0 and sign == "+" else f"{sign} {piece}")
        lines, cur = [], []
        for p in parts:
            cur.append(p)
            if len(cur) == 8:
                lines.append(" ".join(cur))
                cur = []
        if cur:
            lines.append(" ".join(cur))
        return "\n   ".join(lines)

    def row(self, comment: str, name: str, terms, sense: str, rhs: float) -> None:
        self.out.write(f"\\ {comment}\n {name}: {self.expr(terms)} {sense} {_fmt(rhs)}\n")
        self.n_constraints += 1


def export_lp(inst: Instance, w: Sequence[float] | WeightVector) -> str:
    """The weighted-sum model in CPLEX LP format, readable by common MILP solvers.

    Variables: binaries ``x_v_m``, ``y_s_n``, ``z_s_l``, ``o_m``, ``mig_v``;
    continuous ``R_m_r >= 0``; and ``ONE`` fixed to 1 to carry constants.
    Each constraint is preceded by a comment naming its family and indices.
    """
    w = WeightVector.of(w)
    wr, we, wm = w.as_tuple()
    V, M, R = range(inst.n_vms), range(inst.n_machines), range(inst.n_resources)
    N, L = range(inst.n_neighborhoods), range(inst.n_locations)
    S = inst.services
    add = inst.added_demand
    base = inst.base_usage
    cpu = inst.cpu_resource
    n_s = inst.n_services
    lp = _LpWriter()

    x = lambda v, m: f"x_{v}_{m}"  # noqa: E731

    obj: list[tuple[float, str]] = []
    obj += [(wr, f"R_{m}_{r}") for m in M for r in R]
    obj += [(we * inst.gamma[m] * inst.alpha[m], f"o_{m}") for m in M]
    obj += [(we * inst.gamma[m] * inst.beta[m] * add[v, m, cpu], x(v, m)) for v in V for m in M]
    obj += [(wm * (vm.prep_cost + vm.deploy_cost), f"mig_{vm.id}") for vm in inst.vms]
    obj += [(wm * vm.transfer_size * inst.transfer[vm.initial_machine, m], x(vm.id, m)) for vm in inst.vms for m in M]
    const = we * float(np.sum(inst.gamma * inst.beta * base[:, cpu]))
    obj.append((const, "ONE"))

    head = io.StringIO()
    head.write(f"\\ vmreassign model {inst.name}, weights (reliability, electricity, migration) = {w}\n")
    head.write(f"Minimize\n obj: {lp.expr(obj)}\nSubject To\n")

    for v in V:
        lp.row(f"assign v={v}", f"assign_{v}", [(1, x(v, m)) for m in M], "=", 1)
    for m in M:
        for r in R:
            terms = [(float(add[v, m, r]), x(v, m)) for v in V]
            lp.row(f"capacity m={m} r={r}", f"cap_{m}_{r}", terms, "<=", inst.capacity[m, r] - base[m, r])
    for s in S:
        for m in M:
            lp.row(f"conflict s={s.id} m={m}", f"conflict_{s.id}_{m}", [(1, x(v, m)) for v in s.members], "<=", 1)
    for s in S:
        big = max(len(N) * n_s, len(s.members), 1)
        for n in N:
            occ = [(1, x(v, m)) for v in s.members for m in M if inst.neighborhood_of[m] == n]
            lp.row(f"neighbourhood-indicator-upper s={s.id} n={n}", f"dep_up_{s.id}_{n}", occ + [(-big, f"y_{s.id}_{n}")], "<=", 0)
            lp.row(f"neighbourhood-indicator-lower s={s.id} n={n}", f"dep_lo_{s.id}_{n}", occ + [(-1, f"y_{s.id}_{n}")], ">=", 0)
    for si, sj in inst.dependencies:
        for n in N:
            lp.row(f"dependency si={si} sj={sj} n={n}", f"dep_{si}_{sj}_{n}", [(1, f"y_{si}_{n}"), (-1, f"y_{sj}_{n}")], "<=", 0)
    for s in S:
        big = max(len(N) * n_s, len(s.members), 1)
        for loc in L:
            occ = [(1, x(v, m)) for v in s.members for m in M if inst.location_of[m] == loc]
            lp.row(f"location-indicator-upper s={s.id} l={loc}", f"spr_up_{s.id}_{loc}", occ + [(-big, f"z_{s.id}_{loc}")], "<=", 0)
            lp.row(f"location-indicator-lower s={s.id} l={loc}", f"spr_lo_{s.id}_{loc}", occ + [(-1, f"z_{s.id}_{loc}")], ">=", 0)
    for s in S:
        lp.row(f"spread s={s.id}", f"spread_{s.id}", [(1, f"z_{s.id}_{loc}") for loc in L], ">=", s.spread_min)
    for m in M:
        for r in R:
            terms = [(1, f"R_{m}_{r}")] + [(-float(add[v, m, r]), x(v, m)) for v in V]
            lp.row(f"reliability m={m} r={r}", f"rel_{m}_{r}", terms, ">=", base[m, r] - inst.safety[m, r])
    for m in M:
        hosted = [(1, x(v, m)) for v in V]
        lp.row(f"machine-on-lower m={m}", f"on_lo_{m}", [(1, f"o_{m}")] + [(-1, t) for _, t in hosted], "<=", 0)
        lp.row(f"machine-on-upper m={m}", f"on_up_{m}", hosted + [(-inst.n_vms, f"o_{m}")], "<=", 0)
    for vm in inst.vms:
        terms = [(1, x(vm.id, m)) for m in M if m != vm.initial_machine] + [(-1, f"mig_{vm.id}")]
        lp.row(f"migrated v={vm.id}", f"mig_def_{vm.id}", terms, "=", 0)

    tail = io.StringIO()
    tail.write("Bounds\n ONE = 1\n")
    for m in M:
        for r in R:
            tail.write(f" R_{m}_{r} >= 0\n")
    binaries = (
        [x(v, m) for v in V for m in M]
        + [f"y_{s.id}_{n}" for s in S for n in N]
        + [f"z_{s.id}_{loc}" for s in S for loc in L]
        + [f"o_{m}" for m in M]
        + [f"mig_{v}" for v in V]
    )
    tail.write("Binaries\n")
    for i in range(0, len(binaries), 10):
        tail.write(" " + " ".join(binaries[i : i + 10]) + "\n")
    tail.write("End\n")
    return head.getvalue() + lp.out.getvalue() + tail.getvalue()


def lp_constraint_count(inst: Instance) -> int:
    """Number of rows :func:`export_lp` emits, by family."""
    V, M, R = inst.n_vms, inst.n_machines, inst.n_resources
    S, N, L = inst.n_services, inst.n_neighborhoods, inst.n_locations
    D = len(inst.dependencies)
    return V + M * R + S * M + 2 * S * N + D * N + 2 * S * L + S + M * R + 2 * M + V

"""GRASP seeding and NSGA-II evolution, finished by a single pass of Pareto local search.

``hybrid_pipeline`` starts the evolution from an existing archive (for
instance the exact solver's pool) and tops the population up with GRASP.
Every point ever evaluated and found feasible goes into an archive that is
only ever inserted into, so no non-dominated point is lost along the way.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from vmreassign.feasibility import PartialState, check, check_move, compute_usage
from vmreassign.instance import Assignment, Instance
from vmreassign.objectives import ObjectiveVector, evaluate
from vmreassign.pareto import ParetoArchive, crowding_distance, nondominated_sort

log = logging.getLogger(__name__)

POPULATION_SIZE = 20
GENERATIONS = 10
PLS_TARGETS = 10
CROSSOVER_RATE = 0.9
RCL_WIDTH = 3
REPAIR_PASSES = 2
GRASP_RESTARTS = 10

Member = tuple[Assignment, ObjectiveVector]


@dataclass(frozen=True)
class MetaConfig:
    population_size: int = POPULATION_SIZE
    generations: int = GENERATIONS
    pls_targets: int = PLS_TARGETS
    seed: int = 0
    # None means 2/|V|
    mutation_rate: float | None = None
    crossover_rate: float = CROSSOVER_RATE

    def __post_init__(self):
        if self.population_size < 1 or self.generations < 0 or self.pls_targets < 0:
            raise ValueError("population_size must be positive and counts non-negative")
        if self.mutation_rate is not None and not 0 < self.mutation_rate < 1:
            raise ValueError("mutation_rate must be in (0, 1)")
        if not 0 < self.crossover_rate < 1:
            raise ValueError("crossover_rate must be in (0, 1)")

    def mutation_for(self, n_vms: int) -> float:
        if self.mutation_rate is not None:
            return self.mutation_rate
        return min(0.5, 2.0 / max(n_vms, 1))


@dataclass
class Population:
    members: list[Member]
    capacity: int = POPULATION_SIZE
    # every feasible point seen, dominance-filtered
    archive: ParetoArchive = field(default_factory=ParetoArchive)

    def __post_init__(self):
        for a, o in self.members:
            self.archive.insert(a, o)

    def front(self) -> ParetoArchive:
        return self.archive

    def __len__(self) -> int:
        return len(self.members)


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([stream, seed & 0xFFFFFFFF])


def _expired(deadline: float | None) -> bool:
    return deadline is not None and time.perf_counter() >= deadline


# GRASP -----------------------------------------------------------------------


def _greedy_construct(inst: Instance, rng: np.random.Generator) -> Assignment | None:
    weights = rng.dirichlet(np.ones(3))
    maxd = inst.demand.max(axis=1) if inst.n_resources else np.zeros(inst.n_vms)
    order = sorted(range(inst.n_vms), key=lambda v: (-maxd[v], rng.random()))
    state = PartialState(inst)
    cpu = inst.cpu_resource
    for v in order:
        allowed = np.flatnonzero(state.allowed(v))
        if len(allowed) == 0:
            return None
        add = inst.added_demand[v, allowed]
        over = state.usage[allowed] - inst.safety[allowed]
        rel = (np.maximum(over + add, 0) - np.maximum(over, 0)).sum(axis=1)
        off = state.svc_machine[:, allowed].sum(axis=0) == 0
        elec = inst.gamma[allowed] * (inst.alpha[allowed] * off + inst.beta[allowed] * add[:, cpu])
        mig = inst.move_cost[v, allowed]
        parts = np.stack([rel, elec, mig]).astype(float)
        scale = parts.max(axis=1, keepdims=True)
        scale[scale <= 0] = 1.0
        cost = weights @ (parts / scale)
        ranked = allowed[np.lexsort((allowed, cost))]
        rcl = list(ranked[:RCL_WIDTH])
        rng.shuffle(rcl)
        # fall back to the rest of the ranking if the whole RCL breaks dependency/spread
        for m in rcl + [m for m in ranked if m not in rcl]:
            trial = state.copy()
            if trial.place(v, int(m)):
                state = trial
                break
        else:
            return None
    a = state.assignment()
    return a if check(inst, a).feasible else None


def grasp_seed(inst: Instance, count: int, rng_seed: int, deadline: float | None = None) -> Population:
    """``count`` feasible assignments: the initial one plus randomized greedy constructions.

    Each construction draws a random weight vector, places VMs hardest-first
    and picks uniformly among the ``RCL_WIDTH`` cheapest allowed machines.
    Slots where construction keeps failing are filled with the initial
    assignment. Past ``deadline`` no further constructions start, so the
    population may come back smaller than ``count``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = _rng(rng_seed, 0)
    init = inst.initial_assignment
    members: list[Member] = [(init, evaluate(inst, init))]
    while len(members) < count:
        if _expired(deadline):
            break
        a = None
        for _ in range(GRASP_RESTARTS):
            a = _greedy_construct(inst, rng)
            if a is not None:
                break
        if a is None:
            a = init
        members.append((a, evaluate(inst, a)))
    return Population(members, capacity=max(count, 1))


# NSGA-II -------------------------------------------------------------------


def _rank_and_crowding(points: Sequence[Sequence[float]]) -> tuple[np.ndarray, np.ndarray]:
    rank = np.zeros(len(points), dtype=int)
    crowd = np.zeros(len(points))
    for r, front in enumerate(nondominated_sort(points)):
        rank[front] = r
        crowd[front] = crowding_distance([points[i] for i in front])
    return rank, crowd


def select_survivors(members: list[Member], size: int) -> list[Member]:
    """Non-dominated sorting, then crowding distance within the last front that fits."""
    seen: set[Assignment] = set()
    unique = []
    for a, o in members:
        if a not in seen:
            seen.add(a)
            unique.append((a, o))
    points = [o for _, o in unique]
    out: list[Member] = []
    for front in nondominated_sort(points):
        if len(out) + len(front) <= size:
            out.extend(unique[i] for i in front)
            continue
        cd = crowding_distance([points[i] for i in front])
        keep = sorted(range(len(front)), key=lambda k: (-cd[k], front[k]))[: size - len(out)]
        out.extend(unique[front[k]] for k in sorted(keep))
        break
    return out


def _violating_vms(inst: Instance, a: Assignment, report) -> list[int]:
    out: list[int] = []
    for viol in report.violations:
        if viol.kind == "capacity":
            m = viol.subjects[0]
            r = viol.subjects[1]
            on_m = [v for v in range(inst.n_vms) if a[v] == m and inst.added_demand[v, m, r] > 0]
            on_m.sort(key=lambda v: (-inst.demand[v, r], v))
            freed = 0
            for v in on_m:
                if freed >= viol.amount:
                    break
                out.append(v)
                freed += inst.demand[v, r]
        elif viol.kind == "conflict":
            s, m = viol.subjects
            here = [v for v in inst.services[s].members if a[v] == m]
            here.sort(key=lambda v: (inst.vms[v].initial_machine == m, v))
            out.extend(here[:-1])
        elif viol.kind == "dependency":
            si, _, n = viol.subjects
            out.extend(v for v in inst.services[si].members if inst.neighborhood_of[a[v]] == n)
        else:
            out.extend(v for v in inst.services[viol.subjects[0]].members if a[v] != inst.vms[v].initial_machine)
    seen: set[int] = set()
    return [v for v in out if not (v in seen or seen.add(v))]


def _clean_move(inst: Instance, a: Sequence[int], usage: np.ndarray, v: int, m: int) -> bool:
    # overload left behind on the source machine is not the move's fault
    src = a[v]
    return all(
        viol.kind == "capacity" and viol.subjects[0] == src
        for viol in check_move(inst, a, usage, v, m).violations
    )


def repair(inst: Instance, a: Sequence[int], passes: int = REPAIR_PASSES) -> Assignment | None:
    """Move offending VMs to their cheapest clean machine (home first); None if still infeasible."""
    a = list(a)
    for _ in range(passes):
        report = check(inst, a)
        if report.feasible:
            return tuple(a)
        usage = compute_usage(inst, a)
        for v in _violating_vms(inst, tuple(a), report):
            home = inst.vms[v].initial_machine
            targets = sorted((m for m in range(inst.n_machines) if m != a[v]), key=lambda m: (m != home, inst.move_cost[v, m], m))
            for m in targets:
                if _clean_move(inst, a, usage, v, m):
                    usage[a[v]] -= inst.added_demand[v, a[v]]
                    usage[m] += inst.added_demand[v, m]
                    a[v] = m
                    break
    return tuple(a) if check(inst, a).feasible else None


def evolve(inst: Instance, pop: Population, cfg: MetaConfig, deadline: float | None = None) -> Population:
    """Run ``cfg.generations`` NSGA-II generations on a feasible population.

    Offspring come from binary tournaments on (rank, crowding), uniform
    crossover and per-VM reassignment mutation; infeasible offspring are
    repaired or dropped. The returned population's archive holds every
    feasible point evaluated, including the input's.
    """
    if not pop.members:
        raise ValueError("population is empty")
    rng = _rng(cfg.seed, 1)
    archive = pop.archive.copy()
    for a, o in pop.members:
        archive.insert(a, o)
    size = cfg.population_size
    members = select_survivors(list(pop.members), size)
    n_vms, n_mach = inst.n_vms, inst.n_machines
    p_mut = cfg.mutation_for(n_vms)

    for gen in range(cfg.generations):
        if _expired(deadline):
            break
        points = [o for _, o in members]
        rank, crowd = _rank_and_crowding(points)

        def tournament() -> int:
            i, j = rng.integers(len(members), size=2)
            if (rank[i], -crowd[i]) <= (rank[j], -crowd[j]):
                return int(i)
            return int(j)

        offspring: list[Member] = []
        for _ in range(2 * size):
            if len(offspring) >= size or _expired(deadline):
                break
            p1, p2 = members[tournament()][0], members[tournament()][0]
            if rng.random() < cfg.crossover_rate:
                take = rng.random(n_vms) < 0.5
                child = np.where(take, p1, p2)
            else:
                child = np.array(p1)
            flip = rng.random(n_vms) < p_mut
            child[flip] = rng.integers(n_mach, size=int(flip.sum()))
            fixed = repair(inst, child.tolist())
            if fixed is None:
                continue
            o = evaluate(inst, fixed)
            archive.insert(fixed, o)
            offspring.append((fixed, o))
        members = select_survivors(members + offspring, size)
        log.debug("generation %d: %d offspring, archive %d", gen, len(offspring), len(archive))
    return Population(members, capacity=size, archive=archive)


# Pareto local search ---------------------------------------------------------


def most_isolated(arch: ParetoArchive, k: int, rng: np.random.Generator | None = None) -> list[Member]:
    """The ``k`` members with the largest crowding distance (boundary points first)."""
    entries = arch.entries
    if not entries:
        return []
    cd = crowding_distance([o for _, o in entries])
    tie = rng.random(len(entries)) if rng is not None else np.zeros(len(entries))
    order = sorted(range(len(entries)), key=lambda i: (-cd[i], tie[i], entries[i][1]))
    return [entries[i] for i in order[:k]]


def pls_refine(inst: Instance, archive: ParetoArchive, targets: int, rng_seed: int, deadline: float | None = None) -> ParetoArchive:
    """One Pareto local search pass over the ``targets`` most isolated archive members.

    Every feasible single-VM move of each selected member is evaluated and
    offered to the archive. Points added here are not explored in turn.
    """
    rng = _rng(rng_seed, 2)
    out = archive.copy()
    for a, _ in most_isolated(archive, targets, rng):
        usage = compute_usage(inst, a)
        for v in range(inst.n_vms):
            if _expired(deadline):
                return out
            for m in range(inst.n_machines):
                if m == a[v] or not check_move(inst, a, usage, v, m).feasible:
                    continue
                b = a[:v] + (m,) + a[v + 1:]
                out.insert(b, evaluate(inst, b))
    return out


def hybrid_pipeline(
    inst: Instance,
    bootstrap: ParetoArchive | None,
    cfg: MetaConfig | None = None,
    deadline: float | None = None,
) -> ParetoArchive:
    """Seed from ``bootstrap`` (topped up by GRASP), evolve, then refine with PLS.

    With an empty bootstrap this is the metaheuristic on its own.
    """
    cfg = cfg or MetaConfig()
    boot = bootstrap.entries if bootstrap is not None else []
    archive = ParetoArchive(boot)
    members = select_survivors(list(boot), cfg.population_size)
    if len(members) < cfg.population_size:
        filler = grasp_seed(inst, cfg.population_size - len(members), cfg.seed, deadline)
        members += filler.members
    pop = Population(members, capacity=cfg.population_size, archive=archive)
    pop = evolve(inst, pop, cfg, deadline)
    return pls_refine(inst, pop.archive, cfg.pls_targets, cfg.seed, deadline)

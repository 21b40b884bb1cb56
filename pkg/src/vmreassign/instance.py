"""Data-centre model, the ``vmr`` text format, and a synthetic instance generator.

An :class:`Instance` is immutable. Numeric views used by the solvers (demand
matrix, capacities, electricity constants, ...) are built lazily as numpy
arrays and cached on the instance.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

Assignment = tuple[int, ...]


class InstanceError(ValueError):
    """Base class for everything that can go wrong building an instance."""


class InstanceSyntaxError(InstanceError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class InstanceValidationError(InstanceError):
    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


class InfeasibleInitialAssignmentError(InstanceError):
    pass


class GenerationError(InstanceError):
    pass


@dataclass(frozen=True)
class Resource:
    id: int
    transient: bool = False


@dataclass(frozen=True)
class Machine:
    id: int
    neighborhood: int
    location: int
    capacity: tuple[int, ...]
    safety_capacity: tuple[int, ...]
    elec_idle: float
    elec_per_cpu: float
    elec_price: float


@dataclass(frozen=True)
class Vm:
    id: int
    service: int
    demand: tuple[int, ...]
    initial_machine: int
    prep_cost: float = 1.0
    deploy_cost: float = 1.0
    transfer_size: float = 1.0


@dataclass(frozen=True)
class Service:
    id: int
    members: tuple[int, ...]
    spread_min: int = 1
    depends_on: tuple[int, ...] = ()


@dataclass(frozen=True, eq=True)
class Instance:
    resources: tuple[Resource, ...]
    machines: tuple[Machine, ...]
    vms: tuple[Vm, ...]
    services: tuple[Service, ...]
    n_neighborhoods: int
    n_locations: int
    transfer_cost: tuple[tuple[float, ...], ...]
    cpu_resource: int = 0
    time_budget_s: float = 30.0
    name: str = field(default="instance", compare=False)

    @property
    def n_machines(self) -> int:
        return len(self.machines)

    @property
    def n_vms(self) -> int:
        return len(self.vms)

    @property
    def n_resources(self) -> int:
        return len(self.resources)

    @property
    def n_services(self) -> int:
        return len(self.services)

    @property
    def initial_assignment(self) -> Assignment:
        return tuple(v.initial_machine for v in self.vms)

    @property
    def dependencies(self) -> list[tuple[int, int]]:
        """All ``(s_i, s_j)`` pairs where service ``s_i`` depends on ``s_j``."""
        return [(s.id, t) for s in self.services for t in s.depends_on]

    @cached_property
    def edges_by_service(self) -> dict[int, list[tuple[int, int]]]:
        """Dependency edges indexed by each service they touch (either end)."""
        table: dict[int, list[tuple[int, int]]] = {}
        for si, sj in self.dependencies:
            table.setdefault(si, []).append((si, sj))
            table.setdefault(sj, []).append((si, sj))
        return table

    # numpy views -----------------------------------------------------------

    @cached_property
    def demand(self) -> np.ndarray:
        return _frozen(np.array([v.demand for v in self.vms], dtype=np.int64).reshape(self.n_vms, self.n_resources))

    @cached_property
    def capacity(self) -> np.ndarray:
        return _frozen(np.array([m.capacity for m in self.machines], dtype=np.int64).reshape(self.n_machines, self.n_resources))

    @cached_property
    def safety(self) -> np.ndarray:
        return _frozen(np.array([m.safety_capacity for m in self.machines], dtype=np.int64).reshape(self.n_machines, self.n_resources))

    @cached_property
    def transient(self) -> np.ndarray:
        return _frozen(np.array([r.transient for r in self.resources], dtype=bool))

    @cached_property
    def initial(self) -> np.ndarray:
        return _frozen(np.array(self.initial_assignment, dtype=np.int64))

    @cached_property
    def service_of(self) -> np.ndarray:
        return _frozen(np.array([v.service for v in self.vms], dtype=np.int64))

    @cached_property
    def neighborhood_of(self) -> np.ndarray:
        return _frozen(np.array([m.neighborhood for m in self.machines], dtype=np.int64))

    @cached_property
    def location_of(self) -> np.ndarray:
        return _frozen(np.array([m.location for m in self.machines], dtype=np.int64))

    @cached_property
    def alpha(self) -> np.ndarray:
        return _frozen(np.array([m.elec_idle for m in self.machines], dtype=float))

    @cached_property
    def beta(self) -> np.ndarray:
        return _frozen(np.array([m.elec_per_cpu for m in self.machines], dtype=float))

    @cached_property
    def gamma(self) -> np.ndarray:
        return _frozen(np.array([m.elec_price for m in self.machines], dtype=float))

    @cached_property
    def transfer(self) -> np.ndarray:
        return _frozen(np.array(self.transfer_cost, dtype=float).reshape(self.n_machines, self.n_machines))

    @cached_property
    def move_cost(self) -> np.ndarray:
        """``|V| x |M|`` migration cost of placing each VM on each machine (0 at home)."""
        v = np.arange(self.n_vms)
        fixed = np.array([vm.prep_cost + vm.deploy_cost for vm in self.vms], dtype=float)
        size = np.array([vm.transfer_size for vm in self.vms], dtype=float)
        cost = fixed[:, None] + size[:, None] * self.transfer[self.initial]
        cost[v, self.initial] = 0.0
        return _frozen(cost)

    @cached_property
    def added_demand(self) -> np.ndarray:
        """``|V| x |M| x |R|`` usage a VM adds to a machine on top of the fixed base.

        Transient demand is always held on the initial host, so placing a VM
        back home adds nothing for transient resources.
        """
        add = np.broadcast_to(self.demand[:, None, :], (self.n_vms, self.n_machines, self.n_resources)).copy()
        v = np.arange(self.n_vms)
        add[v, self.initial, :] = np.where(self.transient, 0, self.demand)
        return _frozen(add)

    @cached_property
    def base_usage(self) -> np.ndarray:
        """Usage that does not depend on the final assignment (transient demand at initial hosts)."""
        base = np.zeros((self.n_machines, self.n_resources), dtype=np.int64)
        np.add.at(base, self.initial, self.demand * self.transient)
        return _frozen(base)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def check_assignment(inst: Instance, a: Sequence[int]) -> Assignment:
    """Return ``a`` as a tuple after checking it is a total VM -> machine map."""
    a = tuple(int(m) for m in a)
    if len(a) != inst.n_vms:
        raise ValueError(f"assignment has {len(a)} entries, instance has {inst.n_vms} VMs")
    for v, m in enumerate(a):
        if not 0 <= m < inst.n_machines:
            raise ValueError(f"VM {v} assigned to unknown machine {m}")
    return a


# validation ----------------------------------------------------------------


def validate(inst: Instance) -> list[str]:
    """Every structural invariant violation of ``inst`` (empty list means valid).

    Feasibility of the initial assignment is a separate check, see
    :func:`vmreassign.feasibility.check`.
    """
    out: list[str] = []
    R, M = inst.n_resources, inst.n_machines
    if R == 0:
        out.append("no resources")
    for i, r in enumerate(inst.resources):
        if r.id != i:
            out.append(f"resource ids not dense at {i}")
    if not 0 <= inst.cpu_resource < max(R, 1):
        out.append(f"cpu resource {inst.cpu_resource} out of range")
    if inst.n_neighborhoods < 1 or inst.n_locations < 1:
        out.append("topology needs at least one neighbourhood and one location")
    if not inst.time_budget_s > 0:
        out.append("time budget must be positive")

    for i, m in enumerate(inst.machines):
        if m.id != i:
            out.append(f"machine ids not dense at {i}")
        if len(m.capacity) != R or len(m.safety_capacity) != R:
            out.append(f"machine {i}: capacity vectors must have {R} entries")
            continue
        if any(q < 0 for q in m.capacity) or any(sc < 0 for sc in m.safety_capacity):
            out.append(f"machine {i}: negative capacity")
        if any(sc > q for sc, q in zip(m.safety_capacity, m.capacity)):
            out.append(f"machine {i}: safety capacity exceeds capacity")
        if not 0 <= m.neighborhood < inst.n_neighborhoods:
            out.append(f"machine {i}: neighbourhood {m.neighborhood} out of range")
        if not 0 <= m.location < inst.n_locations:
            out.append(f"machine {i}: location {m.location} out of range")
        if min(m.elec_idle, m.elec_per_cpu, m.elec_price) < 0:
            out.append(f"machine {i}: negative electricity constant")

    n_services = inst.n_services
    for i, v in enumerate(inst.vms):
        if v.id != i:
            out.append(f"vm ids not dense at {i}")
        if len(v.demand) != R:
            out.append(f"vm {i}: demand vector must have {R} entries")
        elif any(d < 0 for d in v.demand):
            out.append(f"vm {i}: negative demand")
        if not 0 <= v.initial_machine < M:
            out.append(f"vm {i}: initial machine {v.initial_machine} out of range")
        if not 0 <= v.service < n_services:
            out.append(f"vm {i}: service {v.service} out of range")
        if min(v.prep_cost, v.deploy_cost, v.transfer_size) < 0:
            out.append(f"vm {i}: negative migration parameter")

    owner: dict[int, int] = {}
    for i, s in enumerate(inst.services):
        if s.id != i:
            out.append(f"service ids not dense at {i}")
        for v in s.members:
            if v in owner:
                out.append(f"vm {v} belongs to services {owner[v]} and {i}")
            owner[v] = i
            if 0 <= v < inst.n_vms and inst.vms[v].service != i:
                out.append(f"vm {v} listed in service {i} but declares service {inst.vms[v].service}")
        if s.spread_min < 0 or s.spread_min > inst.n_locations:
            out.append(f"service {i}: spread_min {s.spread_min} exceeds location count")
        for t in s.depends_on:
            if t == i:
                out.append("self-dependency")
            elif not 0 <= t < n_services:
                out.append(f"service {i}: dependency on unknown service {t}")
    missing = [v for v in range(inst.n_vms) if v not in owner]
    if missing:
        out.append(f"vms without a service: {missing[:5]}")

    if len(inst.transfer_cost) != M or any(len(row) != M for row in inst.transfer_cost):
        out.append("transfer-cost matrix must be |M| x |M|")
    else:
        if any(inst.transfer_cost[m][m] != 0 for m in range(M)):
            out.append("nonzero transfer-cost diagonal")
        if any(c < 0 for row in inst.transfer_cost for c in row):
            out.append("negative transfer cost")
    return out


def build_instance(
    resources: Sequence[Resource],
    machines: Sequence[Machine],
    vms: Sequence[Vm],
    services: Sequence[Service],
    n_neighborhoods: int,
    n_locations: int,
    transfer_cost: Iterable[Iterable[float]],
    cpu_resource: int = 0,
    time_budget_s: float = 30.0,
    name: str = "instance",
    check_initial: bool = True,
) -> Instance:
    """Assemble and validate an instance.

    ``Service.members`` given here is ignored and rebuilt from ``Vm.service``
    so the two views cannot disagree.
    """
    members: dict[int, list[int]] = {s.id: [] for s in services}
    for v in vms:
        members.setdefault(v.service, []).append(v.id)
    services = tuple(replace(s, members=tuple(members.get(s.id, ()))) for s in services)
    inst = Instance(
        resources=tuple(resources),
        machines=tuple(machines),
        vms=tuple(vms),
        services=services,
        n_neighborhoods=int(n_neighborhoods),
        n_locations=int(n_locations),
        transfer_cost=tuple(tuple(float(c) for c in row) for row in transfer_cost),
        cpu_resource=int(cpu_resource),
        time_budget_s=float(time_budget_s),
        name=name,
    )
    problems = validate(inst)
    if problems:
        raise InstanceValidationError(problems)
    if check_initial:
        from vmreassign.feasibility import check

        report = check(inst, inst.initial_assignment)
        if not report.feasible:
            raise InfeasibleInitialAssignmentError(f"initial assignment infeasible: {report.violations[0]}")
    return inst


# text format ---------------------------------------------------------------


class _Tokens:
    """Line-aware token stream; ``#`` starts a comment."""

    def __init__(self, text: str):
        self.lines: list[tuple[int, list[str]]] = []
        for no, raw in enumerate(text.splitlines(), start=1):
            toks = raw.split("#", 1)[0].split()
            if toks:
                self.lines.append((no, toks))
        self.pos = 0

    def line(self, what: str) -> tuple[int, list[str]]:
        if self.pos >= len(self.lines):
            last = self.lines[-1][0] if self.lines else 0
            raise InstanceSyntaxError(f"unexpected end of input, expected {what}", last + 1)
        item = self.lines[self.pos]
        self.pos += 1
        return item

    def peek_keyword(self) -> str | None:
        if self.pos >= len(self.lines):
            return None
        return self.lines[self.pos][1][0]

    def section(self, keyword: str, n_args: int) -> tuple[int, list[str]]:
        no, toks = self.line(keyword)
        if toks[0] != keyword:
            raise InstanceSyntaxError(f"expected section {keyword}, found {toks[0]!r}", no)
        if len(toks) != 1 + n_args:
            raise InstanceSyntaxError(f"{keyword} takes {n_args} argument(s), got {len(toks) - 1}", no)
        return no, toks[1:]


def _int(tok: str, no: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InstanceSyntaxError(f"expected integer, got {tok!r}", no) from None


def _float(tok: str, no: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise InstanceSyntaxError(f"expected number, got {tok!r}", no) from None


_KEYWORDS = {"RESOURCES", "TOPOLOGY", "MACHINES", "SERVICES", "VMS", "TRANSFER", "CPU_RESOURCE", "TIME_BUDGET"}


def _records(tokens: _Tokens, keyword: str, count: int, what: str) -> Iterator[tuple[int, list[str]]]:
    for _ in range(count):
        no, toks = tokens.line(what)
        if toks[0] in _KEYWORDS:
            raise InstanceSyntaxError(f"{keyword} declares {count} records but section ended early", no)
        yield no, toks


def _expect_len(toks: list[str], n: int, what: str, no: int) -> None:
    if len(toks) != n:
        raise InstanceSyntaxError(f"{what} record needs {n} fields, got {len(toks)}", no)


def parse_instance(text: str, name: str = "instance") -> Instance:
    """Parse ``vmr`` text into a validated :class:`Instance`.

    Raises :class:`InstanceSyntaxError` (with line number) for malformed text,
    :class:`InstanceValidationError` for invariant violations and
    :class:`InfeasibleInitialAssignmentError` when the initial placement
    breaks a constraint.
    """
    tk = _Tokens(text)

    _, args = tk.section("RESOURCES", 1)
    n_res = _int(args[0], tk.lines[tk.pos - 1][0])
    resources = []
    for no, toks in _records(tk, "RESOURCES", n_res, "resource record"):
        _expect_len(toks, 2, "resource", no)
        flag = _int(toks[1], no)
        if flag not in (0, 1):
            raise InstanceSyntaxError("transient flag must be 0 or 1", no)
        resources.append(Resource(_int(toks[0], no), bool(flag)))

    no, args = tk.section("TOPOLOGY", 2)
    n_neigh, n_loc = _int(args[0], no), _int(args[1], no)

    no, args = tk.section("MACHINES", 1)
    n_mach = _int(args[0], no)
    machines = []
    for no, toks in _records(tk, "MACHINES", n_mach, "machine record"):
        _expect_len(toks, 3 + 2 * n_res + 3, "machine", no)
        q = tuple(_int(t, no) for t in toks[3 : 3 + n_res])
        sc = tuple(_int(t, no) for t in toks[3 + n_res : 3 + 2 * n_res])
        a, b, g = (_float(t, no) for t in toks[3 + 2 * n_res :])
        machines.append(Machine(_int(toks[0], no), _int(toks[1], no), _int(toks[2], no), q, sc, a, b, g))

    no, args = tk.section("SERVICES", 1)
    n_serv = _int(args[0], no)
    services = []
    for no, toks in _records(tk, "SERVICES", n_serv, "service record"):
        if len(toks) < 3:
            raise InstanceSyntaxError("service record needs id, spread_min and dependency count", no)
        k = _int(toks[2], no)
        _expect_len(toks, 3 + k, "service", no)
        deps = tuple(_int(t, no) for t in toks[3:])
        services.append(Service(_int(toks[0], no), (), _int(toks[1], no), deps))

    no, args = tk.section("VMS", 1)
    n_vms = _int(args[0], no)
    vms = []
    for no, toks in _records(tk, "VMS", n_vms, "vm record"):
        _expect_len(toks, 2 + n_res + 4, "vm", no)
        d = tuple(_int(t, no) for t in toks[2 : 2 + n_res])
        m0 = _int(toks[2 + n_res], no)
        mu1, mu3, ts = (_float(t, no) for t in toks[3 + n_res :])
        vms.append(Vm(_int(toks[0], no), _int(toks[1], no), d, m0, mu1, mu3, ts))

    tk.section("TRANSFER", 0)
    rows = []
    for no, toks in _records(tk, "TRANSFER", n_mach, "transfer row"):
        _expect_len(toks, n_mach, "transfer", no)
        rows.append(tuple(_float(t, no) for t in toks))

    no, args = tk.section("CPU_RESOURCE", 1)
    cpu = _int(args[0], no)
    no, args = tk.section("TIME_BUDGET", 1)
    budget = _float(args[0], no)
    if tk.pos < len(tk.lines):
        no, toks = tk.lines[tk.pos]
        raise InstanceSyntaxError(f"unexpected trailing content {toks[0]!r}", no)

    return build_instance(resources, machines, vms, services, n_neigh, n_loc, rows, cpu, budget, name=name)


def _num(x: float) -> str:
    return repr(float(x))


def write_instance(inst: Instance) -> str:
    """Serialize to ``vmr`` text; :func:`parse_instance` inverts it exactly."""
    out = io.StringIO()
    w = out.write
    w(f"# {inst.name}\n")
    w(f"RESOURCES {inst.n_resources}\n")
    for r in inst.resources:
        w(f"{r.id} {int(r.transient)}\n")
    w(f"TOPOLOGY {inst.n_neighborhoods} {inst.n_locations}\n")
    w(f"MACHINES {inst.n_machines}\n")
    w("# id neigh loc Q[..] SC[..] alpha beta gamma\n")
    for m in inst.machines:
        fields = [m.id, m.neighborhood, m.location, *m.capacity, *m.safety_capacity]
        w(" ".join(map(str, fields)) + f" {_num(m.elec_idle)} {_num(m.elec_per_cpu)} {_num(m.elec_price)}\n")
    w(f"SERVICES {inst.n_services}\n")
    w("# id spread_min k deps..\n")
    for s in inst.services:
        w(" ".join(map(str, [s.id, s.spread_min, len(s.depends_on), *s.depends_on])) + "\n")
    w(f"VMS {inst.n_vms}\n")
    w("# id service d[..] m0 mu1 mu3 transfer_size\n")
    for v in inst.vms:
        fields = [v.id, v.service, *v.demand, v.initial_machine]
        w(" ".join(map(str, fields)) + f" {_num(v.prep_cost)} {_num(v.deploy_cost)} {_num(v.transfer_size)}\n")
    w("TRANSFER\n")
    for row in inst.transfer_cost:
        w(" ".join(_num(c) for c in row) + "\n")
    w(f"CPU_RESOURCE {inst.cpu_resource}\n")
    w(f"TIME_BUDGET {_num(inst.time_budget_s)}\n")
    return out.getvalue()


def load_instance(path) -> Instance:
    from pathlib import Path

    p = Path(path)
    return parse_instance(p.read_text(encoding="utf-8"), name=p.stem)


def save_instance(inst: Instance, path) -> None:
    from pathlib import Path

    Path(path).write_text(write_instance(inst), encoding="utf-8")


# generator -----------------------------------------------------------------

# Electricity ranges: idle and per-CPU draw per machine, price per location.
ALPHA_RANGE = (50.0, 200.0)
BETA_RANGE = (1.0, 10.0)
GAMMA_RANGE = (0.5, 2.0)


def generate_synthetic(
    n_machines: int,
    n_vms: int,
    n_services: int,
    n_resources: int = 2,
    n_locations: int = 2,
    n_neighborhoods: int = 2,
    seed: int = 0,
    *,
    slack: float = 1.6,
    dependency_prob: float = 0.3,
    max_dependencies: int = 2,
    time_budget_s: float = 30.0,
    name: str | None = None,
) -> Instance:
    """Random instance whose initial placement is feasible by construction.

    VMs are packed first-fit (machines visited in a per-service random order)
    respecting conflicts and hard capacity. ``slack`` scales total demand into
    machine capacity; raise it if :class:`GenerationError` is reported.
    Resource 0 is the non-transient CPU; the others are transient with
    probability one half. A service gets dependencies with probability
    ``dependency_prob``, at most ``max_dependencies`` of them.
    """
    if not n_vms >= n_services >= 1:
        raise ValueError("need n_vms >= n_services >= 1")
    if not n_machines >= n_locations >= 1:
        raise ValueError("need n_machines >= n_locations >= 1")
    if not n_machines >= n_neighborhoods >= 1:
        raise ValueError("need n_machines >= n_neighborhoods >= 1")
    if n_resources < 1:
        raise ValueError("need at least one resource")
    rng = np.random.default_rng(seed)

    resources = [Resource(0, False)] + [Resource(r, bool(rng.random() < 0.5)) for r in range(1, n_resources)]

    # service sizes: one VM each, the rest spread over services with room (conflict caps size at |M|)
    if n_vms > n_services * n_machines:
        raise GenerationError("more VMs than services x machines; conflicts make packing impossible")
    sizes = np.ones(n_services, dtype=int)
    for _ in range(n_vms - n_services):
        open_ = np.flatnonzero(sizes < n_machines)
        sizes[rng.choice(open_)] += 1
    service_of = np.repeat(np.arange(n_services), sizes)

    demand = rng.integers(1, 11, size=(n_vms, n_resources))
    total = demand.sum(axis=0)
    cap_row = np.maximum(np.ceil(slack * total / n_machines), demand.max(axis=0)).astype(int)
    capacity = np.tile(cap_row, (n_machines, 1))

    usage = np.zeros_like(capacity)
    initial = np.full(n_vms, -1)
    order = np.argsort(-sizes, kind="stable")
    for s in order:
        perm = rng.permutation(n_machines)
        used: set[int] = set()
        for v in np.flatnonzero(service_of == s):
            for m in perm:
                if m not in used and np.all(usage[m] + demand[v] <= capacity[m]):
                    initial[v] = m
                    usage[m] += demand[v]
                    used.add(int(m))
                    break
            else:
                raise GenerationError(f"first-fit could not place vm {v}; raise slack")

    frac = rng.uniform(0.7, 0.9, size=capacity.shape)
    safety = np.floor(capacity * frac).astype(int)

    neigh = np.arange(n_machines) % n_neighborhoods
    loc = np.arange(n_machines) % n_locations
    alpha = np.round(rng.uniform(*ALPHA_RANGE, size=n_machines), 3)
    beta = np.round(rng.uniform(*BETA_RANGE, size=n_machines), 3)
    gamma_loc = np.round(rng.uniform(*GAMMA_RANGE, size=n_locations), 3)

    # spread: any value the initial placement already satisfies
    spread = []
    for s in range(n_services):
        n_locs = len(set(loc[initial[service_of == s]].tolist()))
        spread.append(int(rng.integers(1, n_locs + 1)))

    # dependency s_i -> s_j only where every neighbourhood of s_i already hosts s_j
    occ = [set(neigh[initial[service_of == s]].tolist()) for s in range(n_services)]
    deps: list[list[int]] = [[] for _ in range(n_services)]
    for si in range(n_services):
        if rng.random() >= dependency_prob:
            continue
        # only dependencies the initial placement already satisfies
        eligible = [sj for sj in range(n_services) if sj != si and occ[si] <= occ[sj]]
        k = min(len(eligible), int(rng.integers(1, max_dependencies + 1)))
        if k:
            deps[si] = sorted(int(x) for x in rng.choice(eligible, size=k, replace=False))

    mu1 = np.round(rng.uniform(1.0, 5.0, size=n_vms), 3)
    mu3 = np.round(rng.uniform(1.0, 5.0, size=n_vms), 3)
    tsize = np.round(rng.uniform(1.0, 3.0, size=n_vms), 3)
    transfer = np.zeros((n_machines, n_machines))
    for a in range(n_machines):
        for b in range(a + 1, n_machines):
            if neigh[a] == neigh[b]:
                base = 1.0
            elif loc[a] == loc[b]:
                base = 2.0
            else:
                base = 4.0
            transfer[a, b] = transfer[b, a] = round(base * rng.uniform(0.8, 1.2), 3)

    machines = [
        Machine(m, int(neigh[m]), int(loc[m]), tuple(int(x) for x in capacity[m]), tuple(int(x) for x in safety[m]),
                float(alpha[m]), float(beta[m]), float(gamma_loc[loc[m]]))
        for m in range(n_machines)
    ]
    vms = [
        Vm(v, int(service_of[v]), tuple(int(x) for x in demand[v]), int(initial[v]), float(mu1[v]), float(mu3[v]), float(tsize[v]))
        for v in range(n_vms)
    ]
    services = [Service(s, (), spread[s], tuple(deps[s])) for s in range(n_services)]
    return build_instance(
        resources, machines, vms, services, n_neighborhoods, n_locations, transfer.tolist(),
        cpu_resource=0, time_budget_s=time_budget_s,
        name=name or f"synthetic_m{n_machines}_v{n_vms}_s{seed}",
    )


def tiny1() -> Instance:
    """Two machines, three VMs, two services: the smallest instance that exercises every objective."""
    machines = [
        Machine(0, 0, 0, (10,), (8,), 10.0, 1.0, 1.0),
        Machine(1, 1, 1, (10,), (8,), 10.0, 1.0, 1.0),
    ]
    vms = [Vm(0, 0, (4,), 0), Vm(1, 0, (4,), 1), Vm(2, 1, (3,), 1)]
    services = [Service(0, (), 1), Service(1, (), 1)]
    return build_instance([Resource(0, False)], machines, vms, services, 2, 2, [[0, 2], [2, 0]], name="tiny1")


"""Experiment runner for the solver modes and the gap and vector sweeps.

Every invocation ends with one shared reference point for all fronts it
produced, so hypervolumes in a report are directly comparable.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

from vmreassign.exact_solver import SolverConfig, multi_vector_run, solve_weighted
from vmreassign.instance import Instance, load_instance
from vmreassign.metaheuristic import MetaConfig, hybrid_pipeline
from vmreassign.objectives import IDENTITY, SPREAD_VECTORS
from vmreassign.pareto import ParetoArchive, hypervolume, reference_point, write_archive

log = logging.getLogger(__name__)

MODES = ("exact", "meta", "hybrid", "gap_sweep", "vector_sweep")
GAP_LADDER = (0.5, 0.2, 0.1, 0.05, 0.01, 0.005, 0.001)
CSV_FIELDS = ("mode", "run", "hypervolume", "solutions", "elapsed_s")
# share of a hybrid run's budget given to the exact stage; the metaheuristic gets the rest
EXACT_SHARE = 0.9


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment. Either ``instance_path`` or an in-memory ``instance`` is required.

    ``budget_s`` defaults to the instance's own time budget. ``node_limit``
    caps each exact solve by node count, which makes exact and hybrid runs
    reproducible regardless of machine speed.
    """

    instance_path: str | None = None
    mode: str = "hybrid"
    gap: float = 0.05
    k_vectors: int = 3
    meta: MetaConfig = field(default_factory=MetaConfig)
    budget_s: float | None = None
    runs: int = 10
    out_dir: str | None = None
    single_thread: bool = True
    node_limit: int | None = None
    pool_all_feasible: bool = True
    instance: Instance | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.budget_s is not None and not self.budget_s > 0:
            raise ValueError(f"budget must be positive, got {self.budget_s}")
        if not 0.0 <= self.gap <= 1.0:
            raise ValueError(f"gap must be in [0, 1], got {self.gap}")
        if self.k_vectors < 1:
            raise ValueError("k_vectors must be >= 1")
        if self.instance is None and self.instance_path is None:
            raise ValueError("an instance or instance_path is required")

    def load(self) -> Instance:
        if self.instance is not None:
            return self.instance
        return load_instance(self.instance_path)

    def budget_for(self, inst: Instance) -> float:
        return float(self.budget_s if self.budget_s is not None else inst.time_budget_s)

    def solver_config(self, gap: float | None = None, time_limit_s: float = 60.0) -> SolverConfig:
        return SolverConfig(
            gap=self.gap if gap is None else gap,
            time_limit_s=time_limit_s,
            pool_all_feasible=self.pool_all_feasible,
            node_limit=self.node_limit,
        )

    def echo(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k not in ("instance", "meta")}
        d["meta"] = asdict(self.meta)
        if self.instance is not None and self.instance_path is None:
            d["instance_path"] = f"<in-memory {self.instance.name}>"
        return d


@dataclass
class RunResult:
    mode: str
    run: int
    elapsed_s: float
    archive: ParetoArchive
    hypervolume: float = float("nan")
    # sweep parameter (gap or vector count) and solver details, when relevant
    extra: dict = field(default_factory=dict)

    @property
    def solutions(self) -> int:
        return len(self.archive)


@dataclass
class ExperimentReport:
    results: list[RunResult]
    reference: tuple[float, ...]
    config_echo: list[dict] = field(default_factory=list)
    instance_name: str = ""

    def modes(self) -> list[str]:
        seen = []
        for r in self.results:
            if r.mode not in seen:
                seen.append(r.mode)
        return seen

    def of_mode(self, mode: str) -> list[RunResult]:
        return [r for r in self.results if r.mode == mode]

    def summary(self) -> dict[str, dict[str, float]]:
        """Mean and median of hypervolume, solution count and time per mode."""
        out = {}
        for mode in self.modes():
            rs = self.of_mode(mode)
            row = {"runs": len(rs)}
            for key in ("hypervolume", "solutions", "elapsed_s"):
                vals = [float(getattr(r, key)) for r in rs]
                row[f"{key}_mean"] = statistics.fmean(vals)
                row[f"{key}_median"] = statistics.median(vals)
            out[mode] = row
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in self.results:
            w.writerow([r.mode, r.run, repr(float(r.hypervolume)), r.solutions, repr(float(r.elapsed_s))])
        return buf.getvalue()

    @staticmethod
    def parse_csv(text: str) -> list[dict]:
        rows = []
        for row in csv.DictReader(io.StringIO(text)):
            rows.append({
                "mode": row["mode"],
                "run": int(row["run"]),
                "hypervolume": float(row["hypervolume"]),
                "solutions": int(row["solutions"]),
                "elapsed_s": float(row["elapsed_s"]),
            })
        return rows

    def sweep_csv(self) -> str:
        """Plot data for sweep modes: one row per sweep point."""
        rows = [r for r in self.results if r.extra]
        if not rows:
            return ""
        keys = sorted({k for r in rows for k in r.extra})
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["mode", "run", *keys, "hypervolume", "solutions", "elapsed_s"])
        for r in rows:
            w.writerow([r.mode, r.run, *(r.extra.get(k, "") for k in keys), repr(r.hypervolume), r.solutions, repr(r.elapsed_s)])
        return buf.getvalue()

    def format_table(self) -> str:
        lines = [f"instance {self.instance_name}", "reference " + " ".join(f"{x:.6g}" for x in self.reference)]
        lines.append(f"{'mode':<14}{'runs':>5}{'hyp mean':>16}{'hyp median':>16}{'#sol mean':>11}{'time mean':>11}")
        for mode, s in self.summary().items():
            lines.append(
                f"{mode:<14}{s['runs']:>5}{s['hypervolume_mean']:>16.6g}{s['hypervolume_median']:>16.6g}"
                f"{s['solutions_mean']:>11.2f}{s['elapsed_s_mean']:>11.3f}"
            )
        return "\n".join(lines) + "\n"

    def write(self, out_dir: str | os.PathLike) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.csv").write_text(self.to_csv())
        for r in self.results:
            (out / f"front_{r.mode}_{r.run}.txt").write_text(write_archive(r.archive, self.instance_name, self.reference))
        echo = {"instance": self.instance_name, "reference": list(self.reference), "configs": self.config_echo}
        (out / "config.echo").write_text(json.dumps(echo, indent=2, sort_keys=True, default=str) + "\n")
        (out / "summary.txt").write_text(self.format_table())
        sweep = self.sweep_csv()
        if sweep:
            (out / "sweep.csv").write_text(sweep)
        return out


# modes -----------------------------------------------------------------------


def _exact(cfg: ExperimentConfig, inst: Instance, budget: float) -> RunResult:
    start = time.perf_counter()
    arch, _ = multi_vector_run(inst, cfg.k_vectors, cfg.solver_config(time_limit_s=budget), budget)
    return RunResult("exact", 0, time.perf_counter() - start, arch)


def _meta_once(inst: Instance, meta: MetaConfig, bootstrap: ParetoArchive | None, budget: float) -> tuple[ParetoArchive, float]:
    start = time.perf_counter()
    arch = hybrid_pipeline(inst, bootstrap, meta, deadline=start + budget)
    return arch, time.perf_counter() - start


def _seeded(meta: MetaConfig, i: int) -> MetaConfig:
    return replace(meta, seed=meta.seed + i)


def _repeat(cfg: ExperimentConfig, inst: Instance, bootstrap: ParetoArchive | None, budget: float) -> list[tuple[ParetoArchive, float]]:
    metas = [_seeded(cfg.meta, i) for i in range(cfg.runs)]
    if cfg.single_thread or cfg.runs == 1:
        return [_meta_once(inst, m, bootstrap, budget) for m in metas]
    with ProcessPoolExecutor(max_workers=min(cfg.runs, os.cpu_count() or 1)) as pool:
        futures = [pool.submit(_meta_once, inst, m, bootstrap, budget) for m in metas]
        return [f.result() for f in futures]


def _meta(cfg: ExperimentConfig, inst: Instance, budget: float) -> list[RunResult]:
    return [RunResult("meta", i, t, a) for i, (a, t) in enumerate(_repeat(cfg, inst, None, budget))]


def _hybrid(cfg: ExperimentConfig, inst: Instance, budget: float) -> list[RunResult]:
    """Exact stage once (it is deterministic), then ``runs`` seeded metaheuristic passes on its archive."""
    exact = _exact(cfg, inst, EXACT_SHARE * budget)
    left = max(budget - exact.elapsed_s, 1e-3)
    out = []
    for i, (arch, t) in enumerate(_repeat(cfg, inst, exact.archive, left)):
        out.append(RunResult("hybrid", i, exact.elapsed_s + t, arch))
    return out


def _gap_sweep(cfg: ExperimentConfig, inst: Instance, budget: float) -> list[RunResult]:
    """Identity vector solved once per gap of the ladder, loosest first; each solve gets the full budget."""
    out = []
    for i, gap in enumerate(GAP_LADDER):
        rep = solve_weighted(inst, IDENTITY, cfg.solver_config(gap=gap, time_limit_s=budget))
        arch = ParetoArchive(rep.pool)
        out.append(RunResult(
            "gap_sweep", i, rep.elapsed_s, arch,
            extra={
                "gap": gap, "status": rep.status, "nodes": rep.nodes_explored,
                "incumbent": rep.incumbent.value if rep.incumbent else "",
                "lower_bound": rep.lower_bound, "achieved_gap": rep.achieved_gap,
            },
        ))
    return out


def _vector_sweep(cfg: ExperimentConfig, inst: Instance, budget: float) -> list[RunResult]:
    """All spread vectors solved in order; row k holds the archive of the first k."""
    k_max = max(cfg.k_vectors, len(SPREAD_VECTORS))
    _, reports = multi_vector_run(inst, k_max, cfg.solver_config(time_limit_s=budget), budget)
    out, arch, elapsed = [], ParetoArchive(), 0.0
    for k, rep in enumerate(reports, start=1):
        arch = arch.copy()
        arch.update(rep.pool)
        elapsed += rep.elapsed_s
        out.append(RunResult("vector_sweep", k, elapsed, arch, extra={"vectors": k, "status": rep.status}))
    return out


def _execute(cfg: ExperimentConfig, inst: Instance) -> list[RunResult]:
    budget = cfg.budget_for(inst)
    if cfg.mode == "exact":
        return [_exact(cfg, inst, budget)]
    if cfg.mode == "meta":
        return _meta(cfg, inst, budget)
    if cfg.mode == "hybrid":
        return _hybrid(cfg, inst, budget)
    if cfg.mode == "gap_sweep":
        return _gap_sweep(cfg, inst, budget)
    return _vector_sweep(cfg, inst, budget)


def _finalize(results: list[RunResult], cfgs: Sequence[ExperimentConfig], inst: Instance) -> ExperimentReport:
    ref = reference_point([r.archive for r in results])
    for r in results:
        r.hypervolume = hypervolume(r.archive, ref)
    return ExperimentReport(results, ref, [c.echo() for c in cfgs], inst.name)


def run(cfg: ExperimentConfig) -> ExperimentReport:
    """Execute one experiment; writes its outputs when ``cfg.out_dir`` is set."""
    inst = cfg.load()
    report = _finalize(_execute(cfg, inst), [cfg], inst)
    if cfg.out_dir:
        report.write(cfg.out_dir)
    return report


def compare(cfgs: Sequence[ExperimentConfig], out_dir: str | None = None) -> ExperimentReport:
    """Run several configurations on one instance and score every front against one reference point."""
    if not cfgs:
        raise ValueError("compare needs at least one configuration")
    paths = {c.instance_path for c in cfgs if c.instance is None}
    objs = [c.instance for c in cfgs if c.instance is not None]
    if len(paths) + (1 if objs else 0) > 1 or any(o != objs[0] for o in objs):
        raise ValueError("all compared configurations must reference the same instance")
    inst = cfgs[0].load()
    results: list[RunResult] = []
    for cfg in cfgs:
        results.extend(_execute(cfg, inst))
    report = _finalize(results, cfgs, inst)
    out_dir = out_dir or cfgs[0].out_dir
    if out_dir:
        report.write(out_dir)
    return report

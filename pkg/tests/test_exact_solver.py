import math
import random
import re

import pytest

import oracles
from vmreassign.exact_solver import (
    STATUSES,
    SolverConfig,
    export_lp,
    lower_bound,
    lp_constraint_count,
    multi_vector_run,
    relative_gap,
    solve_weighted,
)
from vmreassign.feasibility import check
from vmreassign.instance import generate_synthetic
from vmreassign.objectives import IDENTITY, SPREAD_VECTORS, scalarize

highspy = pytest.importorskip("highspy")


def close(a, b, tol=1e-6):
    return math.isclose(a, b, rel_tol=tol, abs_tol=tol)


def test_tiny1_identity(tiny1):
    rep = solve_weighted(tiny1, IDENTITY)
    assert rep.status == "optimal_within_gap"
    assert rep.incumbent.value == 31
    assert rep.incumbent.objectives == (0, 31, 0)
    assert rep.achieved_gap == 0


def test_tiny1_loose_gap(tiny1):
    rep = solve_weighted(tiny1, IDENTITY, SolverConfig(gap=0.5))
    assert rep.status == "optimal_within_gap"
    assert rep.achieved_gap <= 0.5
    assert rep.incumbent.value <= 1.5 * rep.lower_bound + 1e-9


def test_tiny1_migration_only(tiny1):
    rep = solve_weighted(tiny1, (0, 0, 1))
    assert rep.incumbent.value == 0
    assert rep.lower_bound == 0
    assert rep.achieved_gap == 0


def test_lower_bound_examples(tiny1):
    assert lower_bound(tiny1, IDENTITY, [None, None, None]) <= 31
    assert lower_bound(tiny1, IDENTITY, [0, 1, 1]) == 31
    assert lower_bound(tiny1, IDENTITY, [0, 0, None]) == math.inf
    assert lower_bound(tiny1, IDENTITY, [1, 1, 1]) == math.inf
    assert lower_bound(tiny1, (0, 0, 1), [None, None, None]) == 0


def test_lower_bound_of_full_assignment_is_its_cost():
    rng = random.Random(9)
    for _ in range(50):
        inst = oracles.random_tiny_instance(rng)
        w = rng.choice(SPREAD_VECTORS)
        for a, o in oracles.feasible_table(inst)[:5]:
            assert close(lower_bound(inst, w, list(a)), scalarize(o, w), 1e-9)


def test_relative_gap():
    assert relative_gap(31, 31) == 0
    assert relative_gap(12, 10) == pytest.approx(0.2)
    assert relative_gap(1e-3, 0) == pytest.approx(1e-3 / 1e-9)
    assert relative_gap(math.inf, 5) == math.inf


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(gap=-0.1)
    with pytest.raises(ValueError):
        SolverConfig(gap=1.5)
    with pytest.raises(ValueError):
        SolverConfig(time_limit_s=0)
    with pytest.raises(ValueError):
        SolverConfig(node_limit=0)


def random_partial(rng, inst):
    a = [rng.randrange(inst.n_machines) for _ in range(inst.n_vms)]
    return [m if rng.random() < 0.5 else None for m in a]


def test_lower_bound_admissible():
    rng = random.Random(10)
    for _ in range(200):
        inst = oracles.random_tiny_instance(rng, max_space=700)
        table = oracles.feasible_table(inst)
        w = rng.choice(SPREAD_VECTORS)
        partial = random_partial(rng, inst)
        completions = [
            scalarize(o, w) for a, o in table if all(p is None or p == m for p, m in zip(partial, a))
        ]
        lb = lower_bound(inst, w, partial)
        if completions:
            assert lb <= min(completions) + 1e-6 * max(1, abs(min(completions)))
        # the empty partial bounds the global optimum
        if table:
            assert lower_bound(inst, w, [None] * inst.n_vms) <= oracles.weighted_optimum(table, w) + 1e-6


def test_matches_enumeration_all_vectors():
    rng = random.Random(11)
    for _ in range(40):
        inst = oracles.random_tiny_instance(rng, max_space=1000)
        table = oracles.feasible_table(inst)
        for w in SPREAD_VECTORS:
            rep = solve_weighted(inst, w)
            want = oracles.weighted_optimum(table, w.as_tuple())
            assert rep.status == "optimal_within_gap"
            assert close(rep.incumbent.value, want)
            assert oracles.feasible(inst, rep.incumbent.assignment)


def test_gap_contract_and_trace():
    rng = random.Random(12)
    for _ in range(30):
        inst = oracles.random_tiny_instance(rng, max_space=1500)
        table = oracles.feasible_table(inst)
        gap = rng.choice([0.0, 0.01, 0.05, 0.2, 0.5])
        w = rng.choice(SPREAD_VECTORS)
        rep = solve_weighted(inst, w, SolverConfig(gap=gap))
        opt = oracles.weighted_optimum(table, w.as_tuple())
        assert rep.achieved_gap <= gap + 1e-12
        assert rep.lower_bound <= opt + 1e-6 * max(1, opt)
        assert rep.incumbent.value <= opt + gap * max(abs(rep.lower_bound), 1e-9) + 1e-6
        values = [t[1] for t in rep.trace]
        bounds = [t[2] for t in rep.trace]
        assert all(x >= y for x, y in zip(values, values[1:]))
        assert all(x <= y for x, y in zip(bounds, bounds[1:]))
        assert [t[0] for t in rep.trace] == sorted(t[0] for t in rep.trace)


def test_pool_is_sound_and_holds_incumbent():
    rng = random.Random(13)
    for _ in range(20):
        inst = oracles.random_tiny_instance(rng)
        rep = solve_weighted(inst, IDENTITY)
        for a, o in rep.pool:
            assert oracles.feasible(inst, a)
            assert all(close(x, y, 1e-9) for x, y in zip(o, oracles.objectives(inst, a)))
        assert (rep.incumbent.assignment, rep.incumbent.objectives) in rep.pool


def test_best_only_pool_is_incumbent_chain():
    inst = generate_synthetic(4, 20, 10, 2, 2, 2, seed=1)
    rep = solve_weighted(inst, IDENTITY, SolverConfig(pool_all_feasible=False))
    vals = [scalarize(o, IDENTITY) for _, o in rep.pool]
    assert vals == sorted(vals, reverse=True)
    assert len(set(vals)) == len(vals)
    assert rep.pool[-1][0] == rep.incumbent.assignment


def test_pool_mode_does_not_change_the_search():
    rng = random.Random(17)
    insts = [oracles.random_tiny_instance(rng) for _ in range(20)] + [generate_synthetic(5, 25, 10, 2, 2, 2, seed=2)]
    for inst in insts:
        full = solve_weighted(inst, IDENTITY, SolverConfig(gap=0.05, node_limit=1500))
        best = solve_weighted(inst, IDENTITY, SolverConfig(gap=0.05, node_limit=1500, pool_all_feasible=False))
        assert (full.nodes_explored, full.trace, full.incumbent) == (best.nodes_explored, best.trace, best.incumbent)
        assert set(best.pool) <= set(full.pool)


def test_deterministic():
    inst = generate_synthetic(4, 20, 10, 2, 2, 2, seed=1)
    cfg = SolverConfig(gap=0.05, node_limit=3000)
    a, b = solve_weighted(inst, IDENTITY, cfg), solve_weighted(inst, IDENTITY, cfg)
    assert a.incumbent == b.incumbent
    assert a.nodes_explored == b.nodes_explored
    assert a.pool == b.pool
    assert a.trace == b.trace


def test_node_limit_status():
    inst = generate_synthetic(4, 20, 10, 2, 2, 2, seed=1)
    rep = solve_weighted(inst, IDENTITY, SolverConfig(node_limit=50))
    assert rep.status == "node_limit"
    assert rep.nodes_explored == 50
    # the warm start keeps an incumbent even when the search stops early
    assert rep.incumbent is not None
    assert rep.lower_bound <= rep.incumbent.value


def test_time_limit_status():
    inst = generate_synthetic(4, 100, 79, 2, seed=11)
    rep = solve_weighted(inst, IDENTITY, SolverConfig(time_limit_s=0.3))
    assert rep.status == "time_limit"
    assert rep.elapsed_s < 2.0
    assert rep.incumbent is not None
    assert rep.status in STATUSES


def test_cold_start_reaches_same_optimum():
    rng = random.Random(14)
    for _ in range(20):
        inst = oracles.random_tiny_instance(rng, max_space=1000)
        cold = solve_weighted(inst, IDENTITY, SolverConfig(warm_start=False))
        warm = solve_weighted(inst, IDENTITY)
        assert cold.status == "optimal_within_gap"
        assert check(inst, cold.incumbent.assignment).feasible
        assert close(cold.incumbent.value, warm.incumbent.value)


def test_nodes_monotone_in_gap():
    inst = generate_synthetic(4, 20, 10, 2, 2, 2, seed=1)
    nodes = [solve_weighted(inst, IDENTITY, SolverConfig(gap=g)).nodes_explored for g in (0.5, 0.2, 0.1, 0.05, 0.01, 0.0)]
    assert nodes == sorted(nodes)
    assert nodes[0] < nodes[-1]


def test_multi_vector_run_tiny1(tiny1):
    archive, reports = multi_vector_run(tiny1, 3)
    assert [r.weights for r in reports] == list(SPREAD_VECTORS[:3])
    assert archive.point_set() == {(0, 31, 0)}
    assert all(r.status == "optimal_within_gap" for r in reports)


@pytest.mark.parametrize("k", [1, 7])
def test_multi_vector_run_tiny1_front(tiny1, k):
    archive, reports = multi_vector_run(tiny1, k, SolverConfig(gap=0.0, pool_all_feasible=True))
    assert len(reports) == k
    assert archive.point_set() == {(0, 31, 0)}
    assert archive.point_set() == oracles.pareto_points(o for _, o in oracles.feasible_table(tiny1))


def test_multi_vector_run_skips_when_budget_spent():
    inst = generate_synthetic(4, 100, 79, 2, seed=11)
    archive, reports = multi_vector_run(inst, 7, SolverConfig(), budget_s=0.3)
    assert len(reports) == 7
    assert reports[0].status == "time_limit"
    assert reports[-1].status == "skipped"
    assert reports[-1].incumbent is None
    assert len(archive) >= 1


def test_pool_all_dominates_best_only():
    for seed in range(3):
        inst = generate_synthetic(4, 16, 8, 2, 2, 2, seed=seed)
        full, _ = multi_vector_run(inst, 7, SolverConfig(node_limit=2000), budget_s=60)
        best, _ = multi_vector_run(inst, 7, SolverConfig(node_limit=2000, pool_all_feasible=False), budget_s=60)
        assert len(full) >= len(best)
        # everything best-only found is matched or beaten
        for p in best.points():
            assert any(oracles.weakly_dominates(q, p) for q in full.points())


def lp_rows(text):
    return len(re.findall(r"^ [A-Za-z_0-9]+: ", text.split("Subject To")[1].split("Bounds")[0], flags=re.M))


def test_lp_constraint_count_tiny1(tiny1):
    text = export_lp(tiny1, IDENTITY)
    assert lp_constraint_count(tiny1) == 36
    assert lp_rows(text) == 36
    # each row carries a family comment
    assert text.count("\\ capacity") == tiny1.n_machines * tiny1.n_resources


def test_lp_constraint_count_formula():
    rng = random.Random(15)
    for _ in range(20):
        inst = oracles.random_tiny_instance(rng)
        V, M, R = inst.n_vms, inst.n_machines, inst.n_resources
        S, N, L = inst.n_services, inst.n_neighborhoods, inst.n_locations
        D = len(inst.dependencies)
        want = 2 * V + 2 * M * R + S * M + 2 * S * (N + L) + D * N + S + 2 * M
        assert lp_constraint_count(inst) == want == lp_rows(export_lp(inst, IDENTITY))


def solve_lp(tmp_path, text):
    path = tmp_path / "m.lp"
    path.write_text(text)
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.readModel(str(path))
    h.run()
    return h.getInfo().objective_function_value


def test_lp_solves_tiny1(tmp_path, tiny1):
    assert close(solve_lp(tmp_path, export_lp(tiny1, IDENTITY)), 31)


def test_lp_optimum_matches_solver(tmp_path):
    rng = random.Random(16)
    for _ in range(15):
        inst = oracles.random_tiny_instance(rng, max_space=1500)
        w = rng.choice(SPREAD_VECTORS)
        rep = solve_weighted(inst, w)
        assert close(solve_lp(tmp_path, export_lp(inst, w)), rep.incumbent.value)

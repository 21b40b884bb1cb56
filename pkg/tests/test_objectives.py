import math
import random
from dataclasses import replace

import pytest

import oracles
from vmreassign.feasibility import compute_usage
from vmreassign.objectives import (
    IDENTITY,
    SPREAD_VECTORS,
    Normalizer,
    ObjectiveVector,
    WeightVector,
    electricity_cost,
    evaluate,
    migration_cost,
    reliability_cost,
    scalarize,
    simplex_lattice,
    spread_vectors,
    weight_vectors,
)


def with_safety(inst, m, sc):
    machines = list(inst.machines)
    machines[m] = replace(machines[m], safety_capacity=sc)
    return replace(inst, machines=tuple(machines))


def test_reliability_examples(tiny1):
    assert reliability_cost(tiny1, compute_usage(tiny1, (0, 1, 1))) == 0
    low = with_safety(tiny1, 0, (5,))
    assert reliability_cost(low, compute_usage(low, (0, 1, 0))) == 2


def test_reliability_zero_at_safety_boundary(tiny1):
    at = with_safety(with_safety(tiny1, 0, (4,)), 1, (7,))
    assert reliability_cost(at, compute_usage(at, (0, 1, 1))) == 0


def test_electricity_examples(tiny1):
    assert electricity_cost(tiny1, (0, 1, 1), compute_usage(tiny1, (0, 1, 1))) == 31
    assert electricity_cost(tiny1, (0, 1, 0), compute_usage(tiny1, (0, 1, 0))) == 31


def test_electricity_empty_machine_free(tiny1):
    # drop v0 from the picture by giving it zero demand and parking everything on m1
    vms = (replace(tiny1.vms[0], demand=(0,)),) + tiny1.vms[1:]
    inst = replace(tiny1, vms=vms, services=(replace(tiny1.services[0], members=(0,)), replace(tiny1.services[1], members=(1, 2))))
    a = (1, 1, 1)
    assert electricity_cost(inst, a, compute_usage(inst, a)) == 10 + 7


def test_migration_examples(tiny1):
    assert migration_cost(tiny1, (0, 1, 1)) == 0
    assert migration_cost(tiny1, (0, 1, 0)) == 4
    assert migration_cost(tiny1, (1, 0, 1)) == 8


def test_evaluate_examples(tiny1):
    assert evaluate(tiny1, (0, 1, 1)) == (0, 31, 0)
    assert evaluate(tiny1, (0, 1, 0)) == (0, 31, 4)
    assert evaluate(with_safety(tiny1, 0, (5,)), (0, 1, 0)) == (2, 31, 4)


def test_scalarize_examples():
    assert scalarize((0, 31, 0), (1, 1, 1)) == 31
    assert scalarize((2, 31, 4), (1, 0, 0)) == 2
    assert math.isclose(scalarize((2, 31, 4), (0.6, 0.3, 0.1)), 10.9)


def test_spread_vectors_verbatim():
    assert [w.as_tuple() for w in spread_vectors(7)] == [
        (1, 1, 1), (0.6, 0.3, 0.1), (0.3, 0.1, 0.6), (0.1, 0.6, 0.3),
        (0.45, 0.45, 0.1), (0.45, 0.1, 0.45), (0.1, 0.45, 0.45),
    ]
    assert spread_vectors(1) == [IDENTITY]
    assert spread_vectors(3) == list(SPREAD_VECTORS[:3])


@pytest.mark.parametrize("k", [0, 8, -1])
def test_spread_vectors_range(k):
    with pytest.raises(ValueError):
        spread_vectors(k)


def test_weight_vector_rejects_zero_and_negative():
    with pytest.raises(ValueError):
        WeightVector(0, 0, 0)
    with pytest.raises(ValueError):
        WeightVector(1, -0.1, 0)
    assert str(WeightVector.of((0.6, 0.3, 0.1))) == "(0.6, 0.3, 0.1)"


def test_lattice_and_extension():
    lat = simplex_lattice(4)
    assert len(lat) == 15
    assert all(math.isclose(sum(w.as_tuple()), 1.0) for w in lat)
    ext = weight_vectors(12)
    assert ext[:7] == list(SPREAD_VECTORS)
    assert len({w.as_tuple() for w in ext}) == 12


def test_scalarize_linear():
    rng = random.Random(0)
    for _ in range(200):
        o = [rng.uniform(0, 100) for _ in range(3)]
        w1 = [rng.uniform(0, 1) for _ in range(3)]
        w2 = [rng.uniform(0, 1) for _ in range(3)]
        both = [x + y for x, y in zip(w1, w2)]
        assert math.isclose(scalarize(o, both), scalarize(o, w1) + scalarize(o, w2), rel_tol=1e-12)


def test_evaluate_matches_oracle_and_initial_has_no_migration():
    rng = random.Random(1)
    for _ in range(100):
        inst = oracles.random_tiny_instance(rng)
        assert evaluate(inst, inst.initial_assignment).migration == 0
        for _ in range(10):
            a = tuple(rng.randrange(inst.n_machines) for _ in range(inst.n_vms))
            got = evaluate(inst, a)
            want = oracles.objectives(inst, a)
            assert all(math.isclose(x, y, rel_tol=1e-12, abs_tol=1e-9) for x, y in zip(got, want))
            assert all(x >= 0 for x in got)
            assert (got.migration == 0) == (a == inst.initial_assignment)


def test_argmin_invariant_under_positive_scaling():
    rng = random.Random(2)
    for _ in range(30):
        inst = oracles.random_tiny_instance(rng, max_space=700)
        table = oracles.feasible_table(inst)
        w = WeightVector(*(rng.uniform(0.05, 1) for _ in range(3)))
        c = rng.uniform(0.1, 10)
        wc = WeightVector(*(c * x for x in w.as_tuple()))

        def argmins(weights):
            vals = {a: scalarize(o, weights) for a, o in table}
            best = min(vals.values())
            return {a for a, v in vals.items() if v <= best + 1e-9 * max(1, abs(best))}

        assert argmins(w) == argmins(wc)


def test_reliability_monotone_in_safety():
    rng = random.Random(3)
    for _ in range(100):
        inst = oracles.random_tiny_instance(rng)
        a = tuple(rng.randrange(inst.n_machines) for _ in range(inst.n_vms))
        m = rng.randrange(inst.n_machines)
        mach = inst.machines[m]
        r = rng.randrange(inst.n_resources)
        sc = list(mach.safety_capacity)
        sc[r] = min(mach.capacity[r], sc[r] + rng.randint(1, 5))
        higher = with_safety(inst, m, tuple(sc))
        assert reliability_cost(higher, compute_usage(higher, a)) <= reliability_cost(inst, compute_usage(inst, a))


def test_normalizer_is_opt_in():
    n = Normalizer.from_points([(0, 10, 0), (2, 30, 4)])
    assert n((1, 20, 2)) == ObjectiveVector(0.5, 0.5, 0.5)
    assert n((0, 10, 0)) == ObjectiveVector(0, 0, 0)

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mpssnet.datasets import AlphaGrid, ParallelDataset, SharedInputDataset, alpha_grid
from mpssnet.errors import (
    AlphaOutOfRangeError,
    DatasetError,
    DegenerateDmuError,
    EpsilonNotUnitFractionError,
)
from mpssnet.lp import Relation, Status, check_certificate, solve
from mpssnet.models import (
    build_blackbox_mpss,
    build_ccr,
    build_joint_parallel_mpss,
    build_shared_mpss,
    build_subsystem_mpss,
    split_shared_inputs,
)

from conftest import TABLE1, random_parallel, random_shared
from oracles import single_factor_ccr, single_factor_mpss


def optimum(lp):
    sol = solve(lp)
    assert sol.status is Status.OPTIMAL
    assert check_certificate(lp, sol).passed
    return sol.objective


# subsystem programs


def test_subsystem_layout(table1):
    lp = build_subsystem_mpss(table1, 0, 0)
    assert lp.names[-2:] == ("theta1", "phi1")
    assert lp.n_vars == 7
    assert [r for r in lp.relations] == [Relation.LE, Relation.GE, Relation.EQ]
    np.testing.assert_array_equal(lp.objective, [0, 0, 0, 0, 0, -1, 1])


def test_subsystem_table1_dmu_a(table1):
    assert optimum(build_subsystem_mpss(table1, 0, 0)) == pytest.approx(1.0)


def test_subsystem_table1_dmu_e(table1):
    oracle = single_factor_mpss(TABLE1["X1"], TABLE1["Y1"], 4)
    assert oracle == pytest.approx(3.5)
    assert optimum(build_subsystem_mpss(table1, 0, 4)) == pytest.approx(oracle, abs=1e-9)


@pytest.mark.parametrize("t", [0, 1])
@pytest.mark.parametrize("o", range(5))
def test_subsystem_matches_single_factor_oracle(table1, t, o):
    key = str(t + 1)
    oracle = single_factor_mpss(TABLE1["X" + key], TABLE1["Y" + key], o)
    assert optimum(build_subsystem_mpss(table1, t, o)) == pytest.approx(oracle, abs=1e-8)


def test_single_dmu_scores_zero():
    ds = ParallelDataset(([[3.0]],), ([[2.0]],))
    lp = build_subsystem_mpss(ds, 0, 0)
    sol = solve(lp)
    assert sol.objective == pytest.approx(0.0, abs=1e-12)
    assert sol.x[0] == pytest.approx(1.0)


def test_zero_output_row_is_degenerate():
    with pytest.raises(DegenerateDmuError):
        build_blackbox_mpss([[1.0], [2.0]], [[0.0], [1.0]], 0)


def test_dataset_rejects_zero_output_row():
    with pytest.raises(DatasetError) as err:
        ParallelDataset(([[1.0], [2.0]],), ([[0.0], [1.0]],))
    assert "ZeroOutputRow" in err.value.codes


# black box and CCR


def test_blackbox_single_dmu():
    assert optimum(build_blackbox_mpss([[2.0]], [[5.0]], 0)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("o, expected", [(0, 2.0), (1, 0.0)])
def test_blackbox_two_points(o, expected):
    x, y = [1.0, 2.0], [1.0, 4.0]
    assert single_factor_mpss(x, y, o) == pytest.approx(expected)
    assert optimum(build_blackbox_mpss(x, y, o)) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("o, expected", [(0, 0.5), (1, 1.0)])
def test_ccr_two_points(o, expected):
    x, y = [1.0, 2.0], [1.0, 4.0]
    assert single_factor_ccr(x, y, o) == pytest.approx(expected)
    assert -optimum(build_ccr(x, y, o)) == pytest.approx(expected, abs=1e-9)


def test_ccr_single_dmu():
    assert -optimum(build_ccr([[4.0]], [[2.0]], 0)) == pytest.approx(1.0)


# joint program


def test_joint_variable_order(table1):
    lp = build_joint_parallel_mpss(table1, 0)
    n, h = 5, 2
    assert lp.names[:n] == tuple(f"lambda1[{j}]" for j in range(n))
    assert lp.names[h * n:(h + 1) * n] == tuple(f"mu[{j}]" for j in range(n))
    assert lp.names[-6:] == ("theta1", "theta2", "phi1", "phi2", "theta", "phi")
    assert lp.row_names[-2:] == ("link.theta", "link.phi")


def test_joint_dmu_b_is_zero_at_identity_point(table1):
    # the self-referencing point is feasible only if the system block can absorb it
    lp = build_joint_parallel_mpss(table1, 1)
    sol = solve(lp)
    assert sol.status is Status.OPTIMAL
    assert check_certificate(lp, sol).passed


def test_joint_dmu_a_witness_point_is_feasible(table1):
    """phi_t = 0.5, theta_t = 1 with every weight on A satisfies every row of the joint program."""
    lp = build_joint_parallel_mpss(table1, 0)
    x = np.zeros(lp.n_vars)
    for name in ("lambda1[0]", "lambda2[0]", "mu[0]"):
        x[lp.index(name)] = 1.0
    for name, v in (("theta1", 1.0), ("theta2", 1.0), ("phi1", 0.5), ("phi2", 0.5),
                    ("theta", 2.0), ("phi", 1.0)):
        x[lp.index(name)] = v
    lhs = lp.A @ x
    for val, rel, b in zip(lhs, lp.relations, lp.rhs):
        if rel is Relation.LE:
            assert val <= b + 1e-12
        elif rel is Relation.GE:
            assert val >= b - 1e-12
        else:
            assert val == pytest.approx(b)
    assert solve(lp).status is Status.OPTIMAL


def test_joint_single_subsystem_collapses_to_blackbox():
    rng = np.random.default_rng(7)
    for _ in range(25):
        ds = random_parallel(rng, h=1)
        o = int(rng.integers(ds.n))
        joint = optimum(build_joint_parallel_mpss(ds, o, [1.0]))
        box = optimum(build_blackbox_mpss(ds.X_total, ds.Y_total, o))
        assert joint == pytest.approx(box, abs=1e-9)


# shared inputs


def test_split_symmetric():
    a, b = split_shared_inputs([[10.0, 20.0]], 0.5)
    np.testing.assert_array_equal(a, [[5.0, 10.0]])
    np.testing.assert_array_equal(b, [[5.0, 10.0]])


def test_split_first_partition():
    a, b = split_shared_inputs([[10.0]], 0.1)
    np.testing.assert_allclose(a, [[1.0]])
    np.testing.assert_allclose(b, [[9.0]])


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.5])
def test_split_rejects_alpha(alpha):
    with pytest.raises(AlphaOutOfRangeError):
        split_shared_inputs([[1.0]], alpha)


@settings(max_examples=1000)
@given(
    st.lists(st.floats(1e-6, 1e12), min_size=1, max_size=6),
    st.floats(1e-6, 1 - 1e-6),
)
def test_split_recombines_exactly(xs, alpha):
    X = np.array(xs).reshape(1, -1)
    a, b = split_shared_inputs(X, alpha)
    np.testing.assert_array_equal(a + b - X, 0.0)
    # each piece is within one rounding of X of its exact share
    assert np.all(np.abs(a - alpha * X) <= 2.0 ** -52 * X)
    assert np.all(np.abs(b - (1 - alpha) * X) <= 2.0 ** -52 * X)


@pytest.mark.parametrize(
    "eps, expected",
    [
        (0.1, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]),
        (0.5, [0.5]),
        (0.25, [0.25, 0.5, 0.75]),
    ],
)
def test_alpha_grid(eps, expected):
    grid = alpha_grid(eps)
    assert isinstance(grid, AlphaGrid)
    assert grid.k_max == len(expected)
    np.testing.assert_allclose(grid.alphas, expected, rtol=0, atol=1e-15)
    assert all(0 < a < 1 for a in grid)
    assert all(a < b for a, b in zip(grid.alphas, grid.alphas[1:]))


@pytest.mark.parametrize("eps", [0.3, 0.0, 0.6, -0.1, float("nan")])
def test_alpha_grid_rejects(eps):
    with pytest.raises(EpsilonNotUnitFractionError):
        alpha_grid(eps)


def _shared_opt(ds, o, alpha, mode, alpha_mode="uniform"):
    return [optimum(lp) for lp in build_shared_mpss(ds, o, alpha, None, mode, alpha_mode)]


@pytest.mark.parametrize("mode", ["decoupled", "joint"])
def test_uniform_alpha_cancels(mode):
    rng = np.random.default_rng(3)
    ds = random_shared(rng, n=6, m=2)
    for o in range(ds.n):
        np.testing.assert_allclose(_shared_opt(ds, o, 0.3, mode), _shared_opt(ds, o, 0.7, mode),
                                   atol=1e-9)


def test_decoupled_shared_matches_single_factor_oracle():
    X = np.add(TABLE1["X1"], TABLE1["X2"]).reshape(-1, 1)
    ds = SharedInputDataset(X, (np.reshape(TABLE1["Y1"], (-1, 1)), np.reshape(TABLE1["Y2"], (-1, 1))))
    for o in range(5):
        got = _shared_opt(ds, o, 0.5, "decoupled")
        want = [single_factor_mpss(X, TABLE1[k], o) for k in ("Y1", "Y2")]
        np.testing.assert_allclose(got, want, atol=1e-9)


def test_target_only_subsystem1_nondecreasing_in_alpha():
    rng = np.random.default_rng(11)
    ds = random_shared(rng, n=5, m=2)
    grid = alpha_grid(0.1).alphas
    for o in range(ds.n):
        vals = [_shared_opt(ds, o, a, "decoupled", "target-only")[0] for a in grid]
        assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:])), vals


def test_shared_requires_two_subsystems():
    ds = SharedInputDataset([[1.0], [2.0]], ([[1.0], [1.0]],) * 3)
    with pytest.raises(ValueError):
        build_shared_mpss(ds, 0, 0.5)


def test_shared_sum_aggregation_requires_equal_widths():
    with pytest.raises(DatasetError):
        SharedInputDataset([[1.0]], ([[1.0]], [[1.0, 2.0]]), aggregation="sum")


def test_shared_joint_system_outputs():
    rng = np.random.default_rng(5)
    concat = random_shared(rng, n=4, s=(1, 1))
    summed = SharedInputDataset(concat.X, concat.Y, aggregation="sum")
    assert concat.Y_system.shape == (4, 2)
    np.testing.assert_allclose(summed.Y_system[:, 0], concat.Y[0][:, 0] + concat.Y[1][:, 0])
    lp = build_shared_mpss(summed, 0, 0.5, structure_mode="joint")[0]
    assert sum(name.startswith("sys.output") for name in lp.row_names) == 1


# properties over random data


def _all_builder_optima(ds, o):
    vals = [optimum(build_subsystem_mpss(ds, t, o)) for t in range(ds.h)]
    vals.append(optimum(build_blackbox_mpss(ds.X_total, ds.Y_total, o)))
    vals.append(-optimum(build_ccr(ds.X_total, ds.Y_total, o)))
    joint = solve(build_joint_parallel_mpss(ds, o))
    if joint.optimal:
        vals.append(joint.objective)
    return vals


def test_units_invariance():
    rng = np.random.default_rng(21)
    for _ in range(20):
        ds = random_parallel(rng, n=6, h=2, m=2, s=2)
        o = int(rng.integers(ds.n))
        base = _all_builder_optima(ds, o)
        c_in, c_out = rng.uniform(1e-3, 1e6, 2)
        X = tuple(x * np.array([c_in, 1.0]) for x in ds.X)
        Y = tuple(y * np.array([1.0, c_out]) for y in ds.Y)
        scaled = _all_builder_optima(ParallelDataset(X, Y), o)
        np.testing.assert_allclose(scaled, base, atol=1e-7)


def test_feasibility_floor():
    rng = np.random.default_rng(22)
    for _ in range(30):
        ds = random_parallel(rng)
        o = int(rng.integers(ds.n))
        for t in range(ds.h):
            assert optimum(build_subsystem_mpss(ds, t, o)) >= -1e-9
        assert optimum(build_blackbox_mpss(ds.X_total, ds.Y_total, o)) >= -1e-9


def test_mpss_iff_ccr_efficient_small():
    rng = np.random.default_rng(23)
    for _ in range(50):
        n = int(rng.integers(1, 9))
        x, y = rng.uniform(0.5, 10, n), rng.uniform(0.5, 10, n)
        o = int(rng.integers(n))
        mpss = optimum(build_blackbox_mpss(x, y, o))
        ccr = -optimum(build_ccr(x, y, o))
        assert (mpss <= 1e-6) == (ccr >= 1 - 1e-6)

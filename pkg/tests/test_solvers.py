import time

import numpy as np
import pytest

from edg.dualbasis import SampleSet, all_pairs, num_pairs, r_omega
from edg.geometry import (
    NonEuclideanWarning,
    gram_from_dist,
    procrustes_align,
    relative_gram_error,
)
from edg.manifold import LowRankFactor, hard_threshold, project_tangent
from edg.sampling import sample_uniform_replacement
from edg.solvers import (
    Measurement,
    SolverConfig,
    SolverReport,
    SolverStatus,
    frame_descent,
    pseudo_gradient,
    run_to_points,
    solve,
)
from helpers import (
    all_pairs_list,
    oracle_hard_threshold_dense,
    oracle_tangent_projection,
    oracle_v,
    oracle_w,
    random_centered_points,
    random_gram,
    random_s_member,
)


def full_measurement(x):
    return Measurement.from_gram(x, all_pairs(x.shape[0]))


def perturbed_start(rng, x, r, size):
    """Rank-r start at relative distance ~size from x, inside the
    zero-row-sum subspace where the solvers operate."""
    a = random_s_member(rng, x.shape[0])
    a *= size * np.linalg.norm(x) / np.linalg.norm(a)
    return hard_threshold(x + a, r)


# --- configuration and report plumbing ---


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(rank=0)
    with pytest.raises(ValueError):
        SolverConfig(rank=2, max_iters=0)
    with pytest.raises(ValueError):
        SolverConfig(rank=2, rel_tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(rank=2, variant="newton")


def test_report_trace_length_invariant():
    with pytest.raises(ValueError):
        SolverReport(iterations=2, status=SolverStatus.CONVERGED, rel_change_trace=[0.1], step_trace=[1.0, 1.0])


def test_measurement_requires_all_observed_pairs():
    omega = SampleSet([(0, 1), (1, 2)], 3)
    with pytest.raises(ValueError):
        Measurement(omega, {(0, 1): 1.0})
    m = Measurement(omega, {(0, 1): 1.0, (1, 2): 2.0})
    np.testing.assert_array_equal(m.value_array(), [1.0, 2.0])


def test_measurement_alignment_repeats_values():
    omega = SampleSet([(0, 1), (0, 1), (1, 2)], 3)
    m = Measurement(omega, {(0, 1): 4.0, (1, 2): 2.0})
    np.testing.assert_array_equal(m.value_array(), [4.0, 4.0, 2.0])


# --- fixed points and full-information convergence ---


@pytest.mark.parametrize("fn", [frame_descent, pseudo_gradient])
def test_truth_start_converges_immediately(fn):
    rng = np.random.default_rng(0)
    x = random_gram(rng, 30, 3)
    f, rep = fn(full_measurement(x), SolverConfig(rank=3), hard_threshold(x, 3))
    assert rep.status == SolverStatus.CONVERGED
    assert rep.iterations <= 1
    assert relative_gram_error(f.densify(), x) <= 1e-10


def test_frame_full_information_from_thresholded_data():
    rng = np.random.default_rng(1)
    n, r = 50, 3
    x = random_gram(rng, n, r)
    meas = full_measurement(x)
    d = np.zeros((n, n))
    for (i, j), v in meas.values.items():
        d[i, j] = d[j, i] = v
    x0 = hard_threshold(gram_from_dist(d), r)
    f, rep = frame_descent(meas, SolverConfig(rank=r), x0)
    assert rep.status == SolverStatus.CONVERGED
    assert rep.iterations <= 5
    assert relative_gram_error(f.densify(), x) <= 1e-8


def test_frame_full_information_from_perturbed_start():
    rng = np.random.default_rng(2)
    n, r = 50, 3
    x = random_gram(rng, n, r)
    x0 = perturbed_start(rng, x, r, 0.3)
    f, rep = frame_descent(
        full_measurement(x), SolverConfig(rank=r, rel_tol=1e-9, max_iters=200), x0
    )
    assert rep.status == SolverStatus.CONVERGED
    assert rep.iterations >= 2
    assert relative_gram_error(f.densify(), x) <= 1e-5


def test_pseudo_full_information_takes_unit_steps():
    rng = np.random.default_rng(3)
    n, r = 50, 3
    x = random_gram(rng, n, r)
    x0 = perturbed_start(rng, x, r, 0.3)
    f, rep = pseudo_gradient(
        full_measurement(x), SolverConfig(rank=r, rel_tol=1e-9, max_iters=10), x0
    )
    assert abs(rep.step_trace[0] - 1.0) <= 1e-10
    assert rep.status == SolverStatus.CONVERGED
    assert rep.iterations <= 10
    assert relative_gram_error(f.densify(), x) <= 1e-8


def test_solve_dispatches_on_variant():
    rng = np.random.default_rng(4)
    x = random_gram(rng, 20, 2)
    omega = sample_uniform_replacement(20, 120, 0)
    meas = Measurement.from_gram(x, omega)
    x0 = perturbed_start(rng, x, 2, 0.2)
    for variant, fn in (("frame", frame_descent), ("pseudo", pseudo_gradient)):
        cfg = SolverConfig(rank=2, max_iters=5, variant=variant)
        fa, ra = solve(meas, cfg, x0)
        fb, rb = fn(meas, cfg, x0)
        np.testing.assert_array_equal(fa.basis, fb.basis)
        assert ra.step_trace == rb.step_trace


# --- single iterations against dense oracles ---


def oracle_one_iteration(x0, meas, r, pseudo):
    n = x0.n
    xd = x0.densify()
    basis = oracle_v if pseudo else oracle_w
    g = np.zeros((n, n))
    for i, j in meas.omega.pair_list():
        c = meas.values[(i, j)] - np.sum(xd * oracle_w((i, j), n))
        g += c * basis((i, j), n)
    y = oracle_tangent_projection(x0.basis, g)
    num = np.sum(y * y)
    den = 0.0
    for i, j in meas.omega.pair_list():
        t = np.sum(y * oracle_w((i, j), n))
        if pseudo:
            den += t * np.sum(y * oracle_v((i, j), n))
        else:
            den += t * t
    alpha = num / den
    return oracle_hard_threshold_dense(xd + alpha * y, r), alpha


@pytest.mark.parametrize("pseudo", [False, True])
def test_single_iteration_matches_dense_oracle(pseudo):
    rng = np.random.default_rng(5)
    n, r = 12, 2
    x = random_gram(rng, n, r)
    omega = sample_uniform_replacement(n, 40, 1)
    meas = Measurement.from_gram(x, omega)
    x0 = hard_threshold((num_pairs(n) / 40) * r_omega(x, omega), r)
    fn = pseudo_gradient if pseudo else frame_descent
    f, rep = fn(meas, SolverConfig(rank=r, max_iters=1, rel_tol=1e-30), x0)
    expected, alpha = oracle_one_iteration(x0, meas, r, pseudo)
    assert rep.iterations == 1
    assert rep.step_trace[0] == pytest.approx(alpha, rel=1e-10)
    np.testing.assert_allclose(f.densify(), expected, atol=1e-9)


# --- masked-data purity ---


def test_solvers_never_read_unobserved_entries():
    rng = np.random.default_rng(6)
    n, r = 20, 2
    x = random_gram(rng, n, r)
    omega = sample_uniform_replacement(n, 60, 2)
    observed = set(omega.pair_list())
    x_garbage = x.copy()
    for i, j in all_pairs_list(n):
        if (i, j) not in observed:
            noise = rng.standard_normal()
            x_garbage[i, j] += noise
            x_garbage[j, i] += noise
    x0 = perturbed_start(rng, x, r, 0.5)
    for fn in (frame_descent, pseudo_gradient):
        cfg = SolverConfig(rank=r, max_iters=20)
        fa, ra = fn(Measurement.from_gram(x, omega), cfg, x0)
        fb, rb = fn(Measurement.from_gram(x_garbage, omega), cfg, x0)
        np.testing.assert_array_equal(fa.basis, fb.basis)
        np.testing.assert_array_equal(fa.spectrum, fb.spectrum)
        assert ra.step_trace == rb.step_trace


# --- termination statuses ---


def test_max_iters_status():
    rng = np.random.default_rng(7)
    n, r = 40, 3
    x = random_gram(rng, n, r)
    omega = sample_uniform_replacement(n, 300, 3)
    meas = Measurement.from_gram(x, omega)
    x0 = perturbed_start(rng, x, r, 0.5)
    f, rep = frame_descent(meas, SolverConfig(rank=r, max_iters=2, rel_tol=1e-14), x0)
    assert rep.status == SolverStatus.MAX_ITERS
    assert rep.iterations == 2
    assert len(rep.rel_change_trace) == 2 == len(rep.step_trace)


def test_pseudo_step_clamp_terminates():
    rng = np.random.default_rng(39)
    x = random_gram(rng, 6, 2)
    omega = sample_uniform_replacement(6, 3, 39)
    meas = Measurement.from_gram(x, omega)
    x0 = hard_threshold(random_s_member(rng, 6), 2)
    f, rep = pseudo_gradient(meas, SolverConfig(rank=2, rel_tol=1e-8, max_iters=50, variant="pseudo"), x0)
    assert rep.status == SolverStatus.STEP_CLAMPED
    assert len(rep.step_trace) == rep.iterations


# --- contraction near the truth ---


def test_pseudo_contracts_near_truth():
    rng = np.random.default_rng(42)
    n, r = 200, 3
    x = random_gram(rng, n, r)
    m = int(0.3 * num_pairs(n))
    f_star = hard_threshold(x, r)
    monotone = 0
    for trial in range(25):
        omega = sample_uniform_replacement(n, m, 1000 + trial)
        meas = Measurement.from_gram(x, omega)
        pert_rng = np.random.default_rng(2000 + trial)
        td = project_tangent(f_star, random_s_member(pert_rng, n)).densify()
        x0 = hard_threshold(x + 1e-3 * np.linalg.norm(x) / np.linalg.norm(td) * td, r)
        cfg = SolverConfig(rank=r, track_truth=x, variant="pseudo")
        ff, rep = pseudo_gradient(meas, cfg, x0)
        tr = rep.truth_error_trace
        assert len(tr) == rep.iterations
        assert all(a > 0 for a in rep.step_trace)
        if all(tr[i + 1] <= tr[i] + 1e-12 for i in range(1, len(tr) - 1)):
            monotone += 1
    assert monotone >= 23


# --- per-iteration cost scaling ---


def fixed_iteration_time(n, iters):
    rng = np.random.default_rng(8)
    x = random_gram(rng, n, 3)
    m = int(0.2 * num_pairs(n))
    omega = sample_uniform_replacement(n, m, 4)
    meas = Measurement.from_gram(x, omega)
    x0 = perturbed_start(rng, x, 3, 0.5)
    cfg = SolverConfig(rank=3, max_iters=iters, rel_tol=1e-30)
    best = np.inf
    for _ in range(3):
        t0 = time.perf_counter()
        frame_descent(meas, cfg, x0)
        best = min(best, (time.perf_counter() - t0) / iters)
    return best


def test_iteration_cost_scales_moderately():
    small = fixed_iteration_time(100, 30)
    big = fixed_iteration_time(200, 30)
    assert big <= 6.0 * small + 1e-4


# --- factor to points ---


def test_run_to_points_recovers_configuration():
    rng = np.random.default_rng(9)
    p = random_centered_points(rng, 3, 25)
    x = p.T @ p
    f = hard_threshold(x, 3)
    q = run_to_points(f, 3)
    aligned, rmse = procrustes_align(q, p)
    assert rmse <= 1e-8
    assert np.allclose(q.mean(axis=1), 0.0, atol=1e-12)


def test_run_to_points_zero_factor():
    f = LowRankFactor(np.eye(5)[:, :2], np.array([0.0, 0.0]))
    assert np.all(run_to_points(f, 2) == 0.0)


def test_run_to_points_flags_negative_spectrum():
    u = np.linalg.qr(np.random.default_rng(10).standard_normal((6, 3)))[0]
    f = LowRankFactor(u, np.array([5.0, 1.0, -1e-9]))
    with pytest.warns(NonEuclideanWarning):
        q = run_to_points(f, 3)
    np.testing.assert_allclose(q[2, :], 0.0, atol=1e-12)

import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from torsion_lab import catalog
from torsion_lab import optimize as op
from torsion_lab.hermitian import analyze, chern_torsion, tensor_A, tensor_B

from oracles import random_metric

thetas = lambda n: arrays(float, n * n, elements=st.floats(-2, 2))


# -- parameterization ---------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3, 4, 8])
def test_theta_zero_is_identity(n):
    assert np.array_equal(op.metric_from_theta(np.zeros(n * n), n), np.eye(n))


@settings(max_examples=60, deadline=None)
@given(thetas(3))
def test_unit_determinant(theta):
    H = op.metric_from_theta(theta, 3)
    assert abs(np.linalg.det(H) - 1) <= 1e-12 * max(1.0, np.linalg.cond(H))
    assert np.allclose(H, H.conj().T, atol=0)
    assert np.all(np.linalg.eigvalsh(H) > 0)


@settings(max_examples=40, deadline=None)
@given(thetas(3))
def test_frame_is_unitary(theta):
    H = op.metric_from_theta(theta, 3)
    P = op._frames(theta, 3)
    assert np.allclose(P.conj().T @ H @ P, np.eye(3), atol=1e-9)


def _theta_of(H):
    """Inverse of the parameterization for a unit-determinant H."""
    n = H.shape[0]
    L = np.linalg.cholesky(H)
    theta = np.empty(n * n)
    theta[:n] = np.log(np.diag(L).real)
    rows, cols = np.tril_indices(n, k=-1)
    theta[n::2] = L[rows, cols].real
    theta[n + 1::2] = L[rows, cols].imag
    return theta


def test_surjective_on_unit_det_metrics():
    rng = np.random.default_rng(3)
    for _ in range(20):
        H = random_metric(rng, 4, unit_det=True)
        assert np.allclose(op.metric_from_theta(_theta_of(H), 4), H, atol=1e-10)


def test_wrong_theta_length():
    with pytest.raises(ValueError):
        op.metric_from_theta(np.zeros(5), 2)


# -- objective ------------------------------------------------------------------

def test_objective_sl2_identity():
    assert op.objective(catalog.sl2(), np.zeros(9)) <= 1e-28


def test_objective_heisenberg_identity():
    assert op.objective(catalog.heisenberg3(), np.zeros(9)) == pytest.approx(96 / 9, rel=1e-14)


@settings(max_examples=20, deadline=None)
@given(thetas(3))
def test_objective_abelian_zero(theta):
    assert op.objective(catalog.abelian(3), theta) == 0.0


@pytest.mark.parametrize("name", ["sl2", "heisenberg3", "sl2+c", "sl3"])
def test_objective_matches_analyze(name):
    alg = catalog.get(name)
    rng = np.random.default_rng(11)
    for theta in [np.zeros(alg.dim ** 2), rng.uniform(-1, 1, alg.dim ** 2)]:
        r = analyze(alg, op.metric_from_theta(theta, alg.dim))
        f = op.objective(alg, theta)
        assert abs(f - r.residual_norm ** 2) <= 1e-12 * max(1.0, f)


def test_torsion_objective_is_b():
    alg = catalog.sl2()
    theta = np.random.default_rng(2).uniform(-1, 1, 9)
    r = analyze(alg, op.metric_from_theta(theta, 3))
    assert op.torsion_objective(alg, theta) == pytest.approx(r.b, rel=1e-12)


def test_overflow_maps_to_inf():
    theta = np.zeros(9)
    theta[3] = 1e200
    assert op.objective(catalog.sl2(), theta) == np.inf


def test_batched_values_match_single():
    c = catalog.get("sl2+c").c
    batch = np.random.default_rng(5).uniform(-1, 1, (7, 16))
    vals = op._values(c, batch, "residual")
    assert np.allclose(vals, [op.objective(c, t) for t in batch], rtol=1e-13, atol=0)


# -- gradient -------------------------------------------------------------------

def test_fd_gradient_quadratic():
    w = np.array([1.0, -2.0, 3.0])
    g = op.fd_gradient(lambda t: np.sum(w * t ** 2, axis=-1), np.array([0.5, 1.0, -2.0]))
    assert np.allclose(g, 2 * w * np.array([0.5, 1.0, -2.0]), rtol=1e-8)


@pytest.mark.parametrize("name", ["sl2", "heisenberg3", "sl2+c"])
def test_gradient_self_check(name):
    alg = catalog.get(name)
    theta = np.random.default_rng(8).uniform(-1, 1, alg.dim ** 2)
    assert op.gradient_self_check(alg, theta) <= 1e-6


# -- descent --------------------------------------------------------------------

def test_start_points():
    pts = op.start_points(3, 4, seed=1)
    assert len(pts) == 4 and np.array_equal(pts[0], np.zeros(9))
    assert all(np.all(np.abs(p) <= 1) for p in pts)
    again = op.start_points(3, 4, seed=1)
    assert all(np.array_equal(a, b) for a, b in zip(pts, again))
    with pytest.raises(ValueError):
        op.start_points(3, 0, seed=1)


def test_abelian_converges_immediately():
    (r,) = op.minimize(catalog.abelian(2), 1, 0)
    assert r.converged and r.iterations == 0
    assert analyze(catalog.abelian(2), r.best_H).b == 0


def test_sl2_identity_start_converges_immediately():
    (r,) = op.minimize(catalog.sl2(), 1, 0)
    assert r.converged and r.iterations == 0 and r.best_residual <= 1e-12


@pytest.fixture(scope="module")
def sl2_runs():
    return op.minimize(catalog.sl2(), 6, 42)


def test_sl2_converged_results_are_scalar(sl2_runs):
    assert all(r.converged for r in sl2_runs)
    for r in sl2_runs:
        rep = analyze(catalog.sl2(), r.best_H)
        assert r.best_residual <= 1e-8
        for M in (rep.A, rep.B):
            ev = np.linalg.eigvalsh(M)
            assert ev[0] > 0 and ev[-1] / ev[0] <= 1 + 1e-6


def test_trace_non_increasing(sl2_runs):
    for r in sl2_runs:
        assert all(b <= a for a, b in zip(r.objective_trace, r.objective_trace[1:]))
        assert len(r.objective_trace) == r.iterations + 1


def test_best_residual_matches_analyze(sl2_runs):
    for r in sl2_runs:
        assert abs(r.best_residual - analyze(catalog.sl2(), r.best_H).residual_norm) <= 1e-12


def test_results_ordered(sl2_runs):
    assert [r.start_index for r in sl2_runs] == list(range(6))


def test_deterministic_traces():
    cfg = op.OptimizeConfig(max_iter=40)
    a = op.minimize(catalog.get("sl2+c"), 3, 9, cfg)
    b = op.minimize(catalog.get("sl2+c"), 3, 9, cfg)
    for x, y in zip(a, b):
        assert x.objective_trace == y.objective_trace
        assert np.array_equal(x.theta, y.theta)


def test_parallel_matches_sequential():
    seq = op.minimize(catalog.get("sl2+c"), 3, 4, op.OptimizeConfig(max_iter=30))
    par = op.minimize(catalog.get("sl2+c"), 3, 4, op.OptimizeConfig(max_iter=30, workers=2))
    assert [r.start_index for r in par] == [0, 1, 2]
    for x, y in zip(seq, par):
        assert x.objective_trace == y.objective_trace
        assert np.array_equal(x.best_H.H, y.best_H.H)


def test_sl2_plus_c_never_critical():
    # the centre is an abelian ideal of dimension 1, so residual >= b / 4 everywhere
    alg = catalog.get("sl2+c")
    ratios = []

    def record(start, it, theta, value):
        ratios.append(np.sqrt(value) / op.torsion_objective(alg, theta))

    results = op.minimize(alg, 20, 7, op.OptimizeConfig(max_iter=150), callback=record)
    assert len(ratios) > 0
    assert min(ratios) >= 0.25 - 1e-6
    assert not any(r.converged for r in results)
    for r in results:
        assert r.best_residual / analyze(alg, r.best_H).b >= 0.25 - 1e-6


def test_callback_sees_every_step():
    seen = []
    (r,) = op.minimize(catalog.heisenberg3(), 1, 0, op.OptimizeConfig(max_iter=12),
                       callback=lambda s, it, th, f: seen.append((s, it, f)))
    assert [s[1] for s in seen] == list(range(1, r.iterations + 1))
    assert [s[2] for s in seen] == r.objective_trace[1:]


def test_result_to_dict():
    (r,) = op.minimize(catalog.heisenberg3(), 1, 0, op.OptimizeConfig(max_iter=5))
    d = r.to_dict()
    assert d["iterations"] == r.iterations and len(d["theta"]) == 9
    assert d["objective_trace"] == r.objective_trace


# -- diagonal family ------------------------------------------------------------

def test_family_symmetric_point():
    p = op.diagonal_family((1, 1, 1))
    assert np.array_equal(p.A_diag, [2, 2, 2]) and np.array_equal(p.B_diag, [2, 2, 2])
    assert p.residual_norm == 0 and p.b == 6


def test_family_one_one_two():
    p = op.diagonal_family((1, 1, 2))
    assert np.allclose(p.A_diag, [17 / 4, 17 / 4, 8], rtol=1e-15)
    assert np.allclose(p.B_diag, [8, 8, 1 / 2], rtol=1e-15)
    assert p.residual_norm > 1


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 100))
def test_family_scale_invariance(t):
    assert op.diagonal_family((t, t, t)).residual_norm <= 1e-12 * t ** 2


@settings(max_examples=50, deadline=None)
@given(arrays(float, 3, elements=st.floats(0.25, 4)))
def test_family_matches_pipeline(a):
    p = op.diagonal_family(a)
    T = chern_torsion(catalog.sl2(), np.diag(a))
    A, B = tensor_A(T), tensor_B(T)
    assert np.allclose(np.diag(A).real, p.A_diag, rtol=1e-12, atol=0)
    assert np.allclose(np.diag(B).real, p.B_diag, rtol=1e-12, atol=0)
    assert np.allclose(A - np.diag(np.diag(A)), 0, atol=1e-12 * p.b)
    r = analyze(catalog.sl2(), np.diag(1 / a ** 2))
    assert r.b == pytest.approx(p.b, rel=1e-12)
    assert r.residual_norm == pytest.approx(p.residual_norm, rel=1e-9, abs=1e-12 * p.b)


@pytest.mark.parametrize("a", [(0, 1, 1), (-1, 1, 1), (1, 1), (1, np.nan, 1)])
def test_family_rejects_bad_input(a):
    with pytest.raises(ValueError):
        op.diagonal_family(a)


def test_critical_system_symmetric_point():
    assert np.array_equal(op.diagonal_critical_system((1, 1, 1), 2.0), [0, 0, 0])


def test_critical_system_one_one_two():
    p = op.diagonal_family((1, 1, 2))
    assert np.max(np.abs(op.diagonal_critical_system((1, 1, 2), p.b / 3))) > 1


@settings(max_examples=50, deadline=None)
@given(arrays(float, 3, elements=st.floats(0.3, 3)), st.floats(0.5, 2), st.floats(0, 10))
def test_critical_system_homogeneity(a, t, b):
    base = op.diagonal_critical_system(a, b)
    scaled = op.diagonal_critical_system(t * a, t ** 2 * b)
    assert np.allclose(scaled, t ** 8 * base, rtol=1e-10, atol=1e-10 * t ** 8 * np.max(a) ** 8)


@settings(max_examples=50, deadline=None)
@given(arrays(float, 3, elements=st.floats(0.3, 3)))
def test_critical_system_agrees_with_family(a):
    # system_i = (a1 a2 a3)^2 / 2 * (2A_i - B_i - beta) when the system's b is beta
    p = op.diagonal_family(a)
    beta = p.b / 3
    sys_ = op.diagonal_critical_system(a, beta)
    expected = np.prod(a) ** 2 / 2 * (2 * p.A_diag - p.B_diag - beta)
    assert np.allclose(sys_, expected, rtol=1e-9, atol=1e-9 * np.max(a) ** 8)


def test_residual_off_diagonal_point():
    assert op.diagonal_family((0.5, 0.5, 1)).residual_norm > 0


@pytest.mark.parametrize("lo,hi,steps", [(0.5, 2.0, 30), (0.9, 1.1, 10)])
def test_uniqueness_scan(lo, hi, steps):
    zeros = op.diagonal_uniqueness_scan(lo, hi, steps)
    assert len(zeros) == 1
    assert np.max(np.abs(zeros[0] - 1)) <= 1e-6


def test_scan_rejects_bad_grid():
    with pytest.raises(ValueError):
        op.diagonal_uniqueness_scan(2.0, 0.5, 10)
    with pytest.raises(ValueError):
        op.diagonal_sweep(0, 1, 10)


def test_sweep_csv(tmp_path):
    pts = op.diagonal_sweep(0.5, 2.0, 4)
    path = tmp_path / "sweep.csv"
    op.write_sweep_csv(path, pts)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == op.CSV_COLUMNS
    assert len(rows) == 17
    first = [float(v) for v in rows[1]]
    assert first == pts[0].row()

"""Search for torsion-critical metrics, and the diagonal family on sl(2, C).

Metrics are parameterized by ``theta`` of length ``n**2``: ``n`` log-diagonal
entries of a lower triangular factor ``L`` followed by ``(re, im)`` pairs of its
strict lower entries in row-major order.  ``H(theta) = L L^*`` rescaled to
``det H = 1``, so ``H(0) = I``.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.optimize

from .errors import DegenerateError
from .hermitian import HermitianMetric, analyze, critical_residual, torsion_norm_sq
from .lie_core import _tensor, change_basis

log = logging.getLogger(__name__)


def n_params(n: int) -> int:
    return n * n


def _factor(theta: np.ndarray, n: int) -> np.ndarray:
    """Unit-determinant lower factor(s) for a (batch of) parameter vector(s)."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1] != n * n:
        raise ValueError(f"theta must have length {n * n}, got {theta.shape[-1]}")
    logd = theta[..., :n]
    logd = logd - logd.mean(axis=-1, keepdims=True)
    L = np.zeros(theta.shape[:-1] + (n, n), dtype=complex)
    idx = np.arange(n)
    L[..., idx, idx] = np.exp(logd)
    rows, cols = np.tril_indices(n, k=-1)
    off = theta[..., n:]
    L[..., rows, cols] = off[..., 0::2] + 1j * off[..., 1::2]
    return L


def metric_from_theta(theta, n: int) -> np.ndarray:
    L = _factor(theta, n)
    H = L @ np.conj(np.swapaxes(L, -1, -2))
    return (H + np.conj(np.swapaxes(H, -1, -2))) / 2


def _frames(theta, n: int) -> np.ndarray:
    # H = L L^* = R^* R with R = L^*, so the triangular frame is P = (L^*)^{-1}
    L = _factor(theta, n)
    return np.conj(np.swapaxes(np.linalg.inv(L), -1, -2))


def _values(c: np.ndarray, thetas: np.ndarray, mode: str) -> np.ndarray:
    """Objective over a batch; overflowing or singular parameters map to ``inf``."""
    n = c.shape[0]
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        try:
            T = -change_basis(c, _frames(thetas, n))
        except (np.linalg.LinAlgError, DegenerateError, ValueError):
            return np.full(thetas.shape[:-1], np.inf)
        if mode == "torsion":
            vals = torsion_norm_sq(T)
        else:
            vals = np.sum(np.abs(critical_residual(T)) ** 2, axis=(-2, -1))
    return np.where(np.isfinite(vals), vals, np.inf)


def objective(alg, theta) -> float:
    """Squared Frobenius norm of the critical residual of ``H(theta)``."""
    c = _tensor(alg)
    return float(_values(c, np.asarray(theta, dtype=float), "residual"))


def torsion_objective(alg, theta) -> float:
    """``|T|^2`` of ``H(theta)``; exploratory only."""
    c = _tensor(alg)
    return float(_values(c, np.asarray(theta, dtype=float), "torsion"))


def fd_steps(theta, rel_step: float) -> np.ndarray:
    return rel_step * np.maximum(1.0, np.abs(theta))


def fd_gradient(func_batch: Callable, theta: np.ndarray, rel_step: float = 1e-6) -> np.ndarray:
    """Central differences, all ``2d`` probes in one batched call."""
    d = theta.size
    h = fd_steps(theta, rel_step)
    probes = np.concatenate([theta + np.diag(h), theta - np.diag(h)])
    vals = func_batch(probes)
    return (vals[:d] - vals[d:]) / (2 * h)


def gradient_self_check(alg, theta, rel_step: float = 1e-4) -> float:
    """Richardson consistency of the central-difference gradient.

    Compares the step-``h`` gradient with the Richardson extrapolation of the
    ``h`` and ``h/2`` gradients; returns the relative discrepancy.
    """
    c = _tensor(alg)
    theta = np.asarray(theta, dtype=float)

    def batch(t):
        return _values(c, t, "residual")

    g1 = fd_gradient(batch, theta, rel_step)
    g2 = fd_gradient(batch, theta, rel_step / 2)
    extrapolated = (4 * g2 - g1) / 3
    return float(np.linalg.norm(g1 - extrapolated) / max(1e-300, np.linalg.norm(extrapolated)))


@dataclass
class OptimizeConfig:
    max_iter: int = 5000
    rel_step: float = 1e-6
    backtrack: float = 0.5
    armijo: float = 1e-4
    objective_tol: float = 1e-18
    gradient_tol: float = 1e-10
    max_backtracks: int = 80
    workers: int = 1
    mode: str = "residual"  # or "torsion" (exploratory)


@dataclass
class OptimizationResult:
    best_H: HermitianMetric
    best_residual: float
    objective_trace: list
    start_index: int
    converged: bool
    iterations: int
    theta: np.ndarray = field(repr=False, default=None)

    def to_dict(self) -> dict:
        from .serialization import encode_array

        return {
            "start_index": self.start_index,
            "converged": self.converged,
            "iterations": self.iterations,
            "best_residual": self.best_residual,
            "best_H": encode_array(self.best_H.H),
            "theta": [float(t) for t in self.theta],
            "objective_trace": [float(v) for v in self.objective_trace],
        }


def start_points(n: int, starts: int, seed: int) -> list[np.ndarray]:
    """``theta = 0`` first, then uniform[-1, 1] draws from ``default_rng(seed)``."""
    if starts < 1:
        raise ValueError("starts must be >= 1")
    rng = np.random.default_rng(seed)
    points = [np.zeros(n * n)]
    points += [rng.uniform(-1.0, 1.0, n * n) for _ in range(starts - 1)]
    return points


def descend(c: np.ndarray, theta0: np.ndarray, config: OptimizeConfig,
            callback: Callable | None = None):
    """Steepest descent with central-difference gradients and Armijo backtracking.

    Returns ``(theta, trace, converged, iterations)``; the trace holds the
    objective at the start and after every accepted step.
    """

    def batch(t):
        return _values(c, t, config.mode)

    theta = np.array(theta0, dtype=float)
    f = float(batch(theta))
    trace = [f]
    step = 1.0
    converged = False
    it = 0
    while it < config.max_iter:
        if config.mode == "residual" and f < config.objective_tol:
            converged = True
            break
        g = fd_gradient(batch, theta, config.rel_step)
        gsq = float(g @ g)
        if np.sqrt(gsq) < config.gradient_tol:
            break
        # step length in theta-space capped at 1 (the map is exponential in theta)
        t = min(2 * step, 1.0 / max(1.0, np.sqrt(gsq)))
        accepted = False
        for _ in range(config.max_backtracks):
            trial = theta - t * g
            ft = float(batch(trial))
            if ft <= f - config.armijo * t * gsq:
                accepted = True
                break
            t *= config.backtrack
        if not accepted:
            break
        it += 1
        theta, f, step = trial, ft, t
        trace.append(f)
        if callback is not None:
            callback(it, theta, f)
    if config.mode == "residual" and f < config.objective_tol:
        converged = True
    return theta, trace, converged, it


def _run_start(args, callback=None):
    c, index, theta0, config = args
    n = c.shape[0]
    cb = None if callback is None else (lambda it, th, f: callback(index, it, th, f))
    theta, trace, converged, iterations = descend(c, theta0, config, cb)
    metric = HermitianMetric(metric_from_theta(theta, n))
    return OptimizationResult(
        best_H=metric,
        best_residual=analyze(c, metric).residual_norm,
        objective_trace=trace,
        start_index=index,
        converged=converged,
        iterations=iterations,
        theta=theta,
    )


def minimize(alg, starts: int = 1, seed: int = 0,
             config: OptimizeConfig | None = None,
             callback: Callable | None = None) -> list[OptimizationResult]:
    """Multi-start descent on the critical residual; results ordered by start index.

    ``callback(start_index, iteration, theta, value)`` is invoked after every
    accepted step; it forces sequential execution.
    """
    config = config or OptimizeConfig()
    c = np.array(_tensor(alg))
    jobs = [(c, i, th, config) for i, th in enumerate(start_points(c.shape[0], starts, seed))]
    if config.workers > 1 and len(jobs) > 1 and callback is None:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_run_start, jobs))
    else:
        results = [_run_start(job, callback) for job in jobs]
    for r in results:
        log.debug("start %d: converged=%s iterations=%d residual=%.3e",
                  r.start_index, r.converged, r.iterations, r.best_residual)
    return sorted(results, key=lambda r: r.start_index)


# ---------------------------------------------------------------------------
# sl(2, C) diagonal family: unitary frame a_i e_i, i.e. H = diag(1 / a_i^2)

_CYCLES = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


@dataclass
class DiagonalFamilyPoint:
    a: np.ndarray
    A_diag: np.ndarray
    B_diag: np.ndarray
    residual_norm: float
    b: float

    def row(self) -> list[float]:
        return [*self.a, *self.A_diag, *self.B_diag, self.b, self.residual_norm]


CSV_COLUMNS = ["a1", "a2", "a3", "A1", "A2", "A3", "B1", "B2", "B3", "b", "residual_norm"]


def _positive_triple(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape != (3,):
        raise ValueError("a must be a positive 3-vector")
    if np.any(a <= 0) or not np.all(np.isfinite(a)):
        raise ValueError(f"a must be positive, got {a}")
    return a


def diagonal_family(a) -> DiagonalFamilyPoint:
    """Closed-form A, B diagonals for sl(2, C) in the frame ``(a_1 e_1, a_2 e_2, a_3 e_3)``."""
    a = _positive_triple(a)
    A = np.empty(3)
    B = np.empty(3)
    for i, j, k in _CYCLES:
        A[i] = a[i] ** 2 * (a[j] ** 2 / a[k] ** 2 + a[k] ** 2 / a[j] ** 2)
        B[i] = 2 * a[j] ** 2 * a[k] ** 2 / a[i] ** 2
    d = 2 * A - B
    b = float(d.sum())
    return DiagonalFamilyPoint(a=a, A_diag=A, B_diag=B,
                               residual_norm=float(np.linalg.norm(d - b / 3)), b=b)


def diagonal_critical_system(a, b: float) -> np.ndarray:
    """``a_i^4 a_j^4 + a_i^4 a_k^4 - a_j^4 a_k^4 - (b/2) a_i^2 a_j^2 a_k^2`` over cyclic ``(ijk)``.

    Here ``b`` is the common value of ``2A_ii - B_ii``.
    """
    a = _positive_triple(a)
    out = np.empty(3)
    for i, j, k in _CYCLES:
        p = a ** 4
        out[i] = p[i] * p[j] + p[i] * p[k] - p[j] * p[k] - b / 2 * a[i] ** 2 * a[j] ** 2 * a[k] ** 2
    return out


def diagonal_sweep(grid_min: float, grid_max: float, steps: int) -> list[DiagonalFamilyPoint]:
    """Family points on the ``(a_1, a_2)`` grid with ``a_3 = 1``."""
    if not 0 < grid_min < grid_max:
        raise ValueError("need 0 < grid_min < grid_max")
    axis = np.linspace(grid_min, grid_max, steps)
    return [diagonal_family((x, y, 1.0)) for x in axis for y in axis]


def write_sweep_csv(path, points: Sequence[DiagonalFamilyPoint]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for p in points:
            writer.writerow([repr(float(v)) for v in p.row()])


def _family_residual_vector(log_a12: np.ndarray) -> np.ndarray:
    p = diagonal_family((*np.exp(log_a12), 1.0))
    d = 2 * p.A_diag - p.B_diag
    return d - d.sum() / 3


def diagonal_uniqueness_scan(grid_min: float, grid_max: float, steps: int,
                             zero_tol: float = 1e-10,
                             merge_tol: float = 1e-6) -> list[np.ndarray]:
    """All distinct zeros of the diagonal-family residual found from a grid scan.

    The grid is over ``(a_1, a_2)`` with ``a_3 = 1``.  Grid-local minima of the
    squared residual are refined by trust-region least squares in log
    coordinates; refined points with residual ``<= zero_tol`` are merged within ``merge_tol``.
    """
    if not 0 < grid_min < grid_max:
        raise ValueError("need 0 < grid_min < grid_max")
    axis = np.linspace(grid_min, grid_max, steps)
    vals = np.array([[diagonal_family((x, y, 1.0)).residual_norm ** 2 for y in axis]
                     for x in axis])
    padded = np.pad(vals, 1, constant_values=np.inf)
    candidates = []
    for i in range(steps):
        for j in range(steps):
            window = padded[i:i + 3, j:j + 3]
            if vals[i, j] <= window.min():
                candidates.append((axis[i], axis[j]))
    zeros: list[np.ndarray] = []
    for x, y in candidates:
        sol = scipy.optimize.least_squares(
            _family_residual_vector, np.log([x, y]), method="trf", jac="3-point",
            xtol=1e-15, ftol=1e-15, gtol=1e-15)
        point = np.array([*np.exp(sol.x), 1.0])
        if diagonal_family(point).residual_norm > zero_tol:
            continue
        if not any(np.max(np.abs(point - z)) <= merge_tol for z in zeros):
            zeros.append(point)
    return zeros

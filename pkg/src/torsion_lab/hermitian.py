"""Left-invariant Hermitian metrics and their Chern torsion.

Conventions
-----------
A metric is stored as its Gram matrix ``H`` in the algebra basis:
``<x, y> = x^* H y`` for coordinate vectors ``x, y``.  A unitary frame is a
matrix ``P`` whose columns are orthonormal vectors, i.e. ``P^* H P = I``.

For a frame ``f`` the Chern torsion of a left-invariant metric on a complex
Lie group is read off the bracket: ``[f_i, f_k] = -sum_j T[j, i, k] f_j``.
Tensor functions accept leading batch axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np
import scipy.linalg

from .errors import DegenerateError, DimensionError, NotPositiveDefiniteError
from .lie_core import (
    DEFAULT_TOL,
    Subspace,
    _tensor,
    change_basis,
    require_abelian_ideal,
)


class InvalidMetricError(NotPositiveDefiniteError):
    """Metric matrix is not Hermitian positive definite."""


@dataclass(frozen=True, eq=False)
class HermitianMetric:
    H: np.ndarray

    def __post_init__(self):
        H = np.array(self.H, dtype=complex)
        if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape[0] < 1:
            raise DimensionError(f"metric must be a square matrix, got shape {H.shape}")
        scale = max(1.0, float(np.max(np.abs(H))))
        if np.max(np.abs(H - H.conj().T)) > 1e-13 * scale:
            raise InvalidMetricError("metric matrix is not Hermitian")
        H = (H + H.conj().T) / 2
        try:
            np.linalg.cholesky(H)
        except np.linalg.LinAlgError:
            raise InvalidMetricError("metric matrix is not positive definite") from None
        H.setflags(write=False)
        object.__setattr__(self, "H", H)

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    @classmethod
    def identity(cls, n: int) -> "HermitianMetric":
        return cls(np.eye(n))


def _as_metric(H) -> HermitianMetric:
    return H if isinstance(H, HermitianMetric) else HermitianMetric(H)


def unitary_frame(H) -> np.ndarray:
    """``P = R^{-1}`` where ``H = R^* R`` with ``R`` upper triangular, positive diagonal."""
    H = _as_metric(H).H
    try:
        L = np.linalg.cholesky(H)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError("metric is not positive definite") from None
    R = L.conj().T
    return scipy.linalg.solve_triangular(R, np.eye(len(H)), lower=False)


def chern_torsion(alg, P) -> np.ndarray:
    """Torsion components ``T[j, i, k]`` in the frame given by the columns of ``P``."""
    c = _tensor(alg)
    P = np.asarray(P)
    if P.shape[-2:] != c.shape[:2]:
        raise DimensionError(f"frame shape {P.shape} does not match algebra dim {c.shape[0]}")
    try:
        return -change_basis(c, P)
    except DegenerateError:
        raise DegenerateError("frame is singular") from None


def tensor_A(T) -> np.ndarray:
    """``A[i, j] = sum_{r,s} T[r, i, s] conj(T[r, j, s])``."""
    A = np.einsum("...ris,...rjs->...ij", T, np.conj(T))
    return (A + np.conj(np.swapaxes(A, -1, -2))) / 2


def tensor_B(T) -> np.ndarray:
    """``B[i, j] = sum_{r,s} T[j, r, s] conj(T[i, r, s])``."""
    B = np.einsum("...jrs,...irs->...ij", T, np.conj(T))
    return (B + np.conj(np.swapaxes(B, -1, -2))) / 2


def gauduchon_eta(T) -> np.ndarray:
    """Torsion 1-form ``eta_i = sum_k T[k, k, i]``."""
    return np.einsum("...kki->...i", T)


def phi_tensor(T, eta) -> np.ndarray:
    """``phi[i, j] = sum_r T[j, i, r] conj(eta_r)``."""
    return np.einsum("...jir,...r->...ij", T, np.conj(eta))


def torsion_norm_sq(T) -> np.ndarray:
    """Full-index sum of ``|T[j, i, k]|^2``; each unordered pair ``(i, k)`` counts twice."""
    return np.sum(np.abs(T) ** 2, axis=(-3, -2, -1))


def critical_residual(T) -> np.ndarray:
    """``2A - B + 2(phi + phi^*) - (|T|^2 / n) I`` for torsion ``T`` (batched)."""
    n = T.shape[-1]
    A, B = tensor_A(T), tensor_B(T)
    phi = phi_tensor(T, gauduchon_eta(T))
    b = torsion_norm_sq(T)
    eye = np.eye(n)
    return (2 * A - B + 2 * (phi + np.conj(np.swapaxes(phi, -1, -2)))
            - (b / n)[..., None, None] * eye)


@dataclass
class CriticalityReport:
    """All torsion quantities of one metric, taken in one unitary frame.

    ``chi`` is recorded, not computed: it vanishes identically for
    left-invariant metrics on complex Lie groups.
    """

    A: np.ndarray
    B: np.ndarray
    eta: np.ndarray
    phi: np.ndarray
    torsion_norm_sq: float
    eta_norm_sq: float
    residual: np.ndarray
    residual_norm: float
    is_critical: bool
    is_balanced: bool
    is_kahler: bool
    chi: float = 0.0
    torsion: np.ndarray | None = field(default=None, repr=False)

    @property
    def b(self) -> float:
        return self.torsion_norm_sq

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def to_dict(self) -> dict:
        from .serialization import encode_array

        out = {}
        for f in fields(self):
            val = getattr(self, f.name)
            if val is None:
                continue
            out[f.name] = encode_array(val) if isinstance(val, np.ndarray) else val
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "CriticalityReport":
        from .serialization import decode_array

        kw = {}
        for f in fields(cls):
            if f.name not in data:
                continue
            val = data[f.name]
            kw[f.name] = decode_array(val) if isinstance(val, list) else val
        return cls(**kw)


def analyze_frame(alg, P, tol: float = DEFAULT_TOL) -> CriticalityReport:
    """Criticality report computed in an explicitly supplied unitary frame."""
    T = chern_torsion(alg, P)
    A, B = tensor_A(T), tensor_B(T)
    eta = gauduchon_eta(T)
    phi = phi_tensor(T, eta)
    b = float(torsion_norm_sq(T))
    residual = critical_residual(T)
    residual = (residual + residual.conj().T) / 2
    rnorm = float(np.linalg.norm(residual))
    eta_sq = float(np.sum(np.abs(eta) ** 2))
    return CriticalityReport(
        A=A, B=B, eta=eta, phi=phi,
        torsion_norm_sq=b,
        eta_norm_sq=eta_sq,
        residual=residual,
        residual_norm=rnorm,
        is_critical=bool(rnorm <= tol * max(1.0, b)),
        is_balanced=bool(np.sqrt(eta_sq) <= tol * max(1.0, np.sqrt(b))),
        is_kahler=bool(np.sqrt(b) <= tol),
        chi=0.0,
        torsion=T,
    )


def analyze(alg, H, tol: float = DEFAULT_TOL) -> CriticalityReport:
    """Torsion-criticality test of the metric ``H`` on the algebra ``alg``.

    The metric is critical when ``2A - B + 2(phi + phi^*) = (b / n) I`` with
    ``b = |T|^2``; the test is ``||residual||_F <= tol * max(1, b)``.
    """
    metric = _as_metric(H)
    n = _tensor(alg).shape[0]
    if metric.dim != n:
        raise DimensionError(f"metric is {metric.dim}x{metric.dim}, algebra has dim {n}")
    return analyze_frame(alg, unitary_frame(metric), tol)


def _extend(basis: list, v, H, atol: float = 1e-8) -> list:
    """Append ``v`` orthonormalized against ``basis`` in the metric ``H``, unless dependent."""
    w = np.array(v, dtype=complex)
    base = np.sqrt(abs(np.vdot(w, H @ w).real))
    if base == 0:
        return basis
    for _ in range(2):
        for q in basis:
            w = w - q * np.vdot(q, H @ w)
    nrm = np.sqrt(abs(np.vdot(w, H @ w).real))
    if nrm > atol * base:
        return [*basis, w / nrm]
    return basis


def adapted_frame(H, a: Subspace) -> np.ndarray:
    """Unitary frame whose first ``a.dim`` columns span ``a``.

    Gram-Schmidt in the metric: subspace vectors first, then the standard basis
    in order to complete.
    """
    H = _as_metric(H).H
    n = H.shape[0]
    frame: list = []
    for v in a.basis:
        frame = _extend(frame, v, H)
    if len(frame) != a.dim:
        raise DegenerateError("subspace basis is rank deficient")
    for v in np.eye(n):
        if len(frame) == n:
            break
        frame = _extend(frame, v, H)
    return np.column_stack(frame)


def abelian_ideal_obstruction(alg, H, a: Subspace, tol: float = DEFAULT_TOL):
    """Both sides of the abelian-ideal identity in an adapted unitary frame.

    Returns ``(lhs, rhs)`` with ``lhs = sum_{alpha<r} (2A - B)[alpha, alpha]``
    and ``rhs = -sum |T[alpha, i, j]|^2`` over ``alpha < r <= i, j``.
    """
    require_abelian_ideal(alg, a, tol)
    P = adapted_frame(H, a)
    T = chern_torsion(alg, P)
    r = a.dim
    two_a_minus_b = 2 * tensor_A(T) - tensor_B(T)
    lhs = float(np.trace(two_a_minus_b[:r, :r]).real)
    rhs = -float(np.sum(np.abs(T[:r, r:, r:]) ** 2))
    return lhs, rhs

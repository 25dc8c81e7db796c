"""Finite-dimensional Lie algebras given by structure constants.

Index layout: ``c[k, i, j]`` is the coefficient of ``x_k`` in ``[x_i, x_j]``.
Real compact forms use the same layout, ``S[j, i, k]`` for ``[u_i, u_k]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateError,
    DimensionError,
    InvalidAlgebraError,
    NotAbelianIdealError,
    NotClosedError,
)

DEFAULT_TOL = 1e-9
_ANTISYM_TOL = 1e-12


def _check_cube(arr: np.ndarray, what: str) -> int:
    if arr.ndim != 3 or not (arr.shape[0] == arr.shape[1] == arr.shape[2]):
        raise DimensionError(f"{what} must have shape (n, n, n), got {arr.shape}")
    if arr.shape[0] < 1:
        raise DimensionError(f"{what} must have positive dimension")
    return arr.shape[0]


def _antisymmetrized(arr: np.ndarray, what: str) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(arr)))) if arr.size else 1.0
    defect = float(np.max(np.abs(arr + arr.transpose(0, 2, 1)))) if arr.size else 0.0
    if defect > _ANTISYM_TOL * scale:
        raise InvalidAlgebraError(
            f"{what} not antisymmetric in the lower indices (defect {defect:.3e})")
    # (a - b) / 2 is exactly the negative of (b - a) / 2
    out = (arr - arr.transpose(0, 2, 1)) / 2
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class StructureConstants:
    """Complex structure constants, ``[x_i, x_j] = sum_k c[k, i, j] x_k``."""

    c: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        arr = np.array(self.c, dtype=complex)
        _check_cube(arr, "structure constants")
        object.__setattr__(self, "c", _antisymmetrized(arr, "structure constants"))

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<StructureConstants{label} dim={self.dim}>"


@dataclass(frozen=True, eq=False)
class RealStructureConstants:
    """Real structure constants of a real form, ``[u_i, u_k] = sum_j S[j, i, k] u_j``."""

    S: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        arr = np.asarray(self.S)
        if np.iscomplexobj(arr):
            if np.max(np.abs(arr.imag), initial=0.0) > _ANTISYM_TOL:
                raise InvalidAlgebraError("real structure constants have imaginary parts")
            arr = arr.real
        arr = np.array(arr, dtype=float)
        _check_cube(arr, "real structure constants")
        object.__setattr__(self, "S", _antisymmetrized(arr, "real structure constants"))

    @property
    def dim(self) -> int:
        return self.S.shape[0]

    def complexify(self) -> StructureConstants:
        """Same constants read as a complex Lie algebra."""
        return StructureConstants(self.S.astype(complex), name=self.name)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<RealStructureConstants{label} dim={self.dim}>"


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace of C^n given by the rows of ``basis`` (shape ``(r, n)``)."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=complex)
        if b.ndim == 1:
            b = b.reshape(0, self.ambient_dim) if b.size == 0 else b[None, :]
        if b.ndim != 2 or b.shape[1] != self.ambient_dim:
            raise DimensionError(
                f"basis vectors must have length {self.ambient_dim}, got shape {b.shape}")
        if b.shape[0] > 0 and _rank(b.T) < b.shape[0]:
            raise DegenerateError("subspace basis vectors are linearly dependent")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def orthonormal(self) -> np.ndarray:
        """Euclidean orthonormal basis as columns, shape ``(n, r)``."""
        q, _ = np.linalg.qr(self.basis.T)
        return q


def _tensor(alg) -> np.ndarray:
    if isinstance(alg, StructureConstants):
        return alg.c
    if isinstance(alg, RealStructureConstants):
        return alg.S
    return np.asarray(alg)


def _singular_values(mat: np.ndarray) -> np.ndarray:
    if mat.size == 0:
        return np.zeros(0)
    return np.linalg.svd(mat, compute_uv=False)


def _rank(mat: np.ndarray, rtol: float = DEFAULT_TOL) -> int:
    s = _singular_values(mat)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def _null_space(mat: np.ndarray, rtol: float = DEFAULT_TOL) -> np.ndarray:
    """Rows spanning the kernel of ``mat``."""
    ncols = mat.shape[1]
    _, s, vh = np.linalg.svd(mat)
    if s.size == 0 or s[0] == 0:
        return np.eye(ncols, dtype=vh.dtype)
    rank = int(np.sum(s > rtol * s[0]))
    return vh[rank:].conj()


def _vector(x, n: int, what: str = "vector") -> np.ndarray:
    v = np.asarray(x, dtype=complex)
    if v.shape != (n,):
        raise DimensionError(f"{what} must have length {n}, got shape {v.shape}")
    return v


def bracket(alg, x, y) -> np.ndarray:
    """Coordinates of ``[x, y]``."""
    c = _tensor(alg)
    n = c.shape[0]
    return np.einsum("kij,i,j->k", c, _vector(x, n, "x"), _vector(y, n, "y"))


def jacobi_residual(alg) -> float:
    """Largest absolute cyclic Jacobi sum over all index quadruples."""
    c = _tensor(alg)
    # J[i,j,k,l] = sum_m c^m_ij c^l_mk + c^m_jk c^l_mi + c^m_ki c^l_mj
    t1 = np.einsum("mij,lmk->ijkl", c, c)
    t2 = np.einsum("mjk,lmi->ijkl", c, c)
    t3 = np.einsum("mki,lmj->ijkl", c, c)
    return float(np.max(np.abs(t1 + t2 + t3), initial=0.0))


def adjoint_matrix(alg, x) -> np.ndarray:
    """Matrix of ``ad_x``, so that ``adjoint_matrix(c, x) @ y == bracket(c, x, y)``."""
    c = _tensor(alg)
    return np.einsum("kij,i->kj", c, _vector(x, c.shape[0], "x"))


def killing_form(alg) -> np.ndarray:
    """``K[i, j] = tr(ad_{x_i} ad_{x_j})``."""
    c = _tensor(alg)
    K = np.einsum("sir,rjs->ij", c, c)
    return (K + K.T) / 2


def realification(alg: StructureConstants) -> RealStructureConstants:
    """Real structure constants of the underlying real algebra.

    The real basis is ``(x_1, ..., x_n, i x_1, ..., i x_n)``.
    """
    c = _tensor(alg).astype(complex)
    n = c.shape[0]
    R = np.zeros((2 * n, 2 * n, 2 * n))
    units = (1.0, 1.0j)
    for a, la in enumerate(units):
        for b, lb in enumerate(units):
            w = la * lb * c  # [la x_p, lb x_q] = la lb c^m_pq x_m
            blk_p = slice(a * n, (a + 1) * n)
            blk_q = slice(b * n, (b + 1) * n)
            R[:n, blk_p, blk_q] = w.real
            R[n:, blk_p, blk_q] = w.imag
    return RealStructureConstants(R, name=getattr(alg, "name", ""))


def realified_killing_form(alg: StructureConstants) -> np.ndarray:
    """Killing form of the underlying real algebra, shape ``(2n, 2n)``."""
    return killing_form(realification(alg))


def is_semisimple(alg, tol: float = DEFAULT_TOL) -> bool:
    """Cartan's criterion: the Killing form is nondegenerate."""
    c = _tensor(alg)
    scale = max(1.0, float(np.max(np.abs(c), initial=0.0)) ** 2)
    res = jacobi_residual(c)
    if res > tol * scale:
        raise InvalidAlgebraError(f"Jacobi identity violated (residual {res:.3e})")
    s = _singular_values(killing_form(c))
    if s.size == 0 or s[0] == 0:
        return False
    return bool(s[-1] > tol * s[0])


def center(alg, tol: float = DEFAULT_TOL) -> Subspace:
    """The center ``{x : ad_x = 0}``."""
    c = _tensor(alg)
    n = c.shape[0]
    # rows indexed (k, j), columns i: x -> (sum_i c^k_ij x_i)
    stacked = c.transpose(0, 2, 1).reshape(n * n, n)
    return Subspace(n, _null_space(stacked, tol))


def is_abelian_ideal(alg, a: Subspace, tol: float = DEFAULT_TOL) -> bool:
    """Whether ``a`` satisfies ``[g, a] ⊆ a`` and ``[a, a] = 0``."""
    c = _tensor(alg)
    n = c.shape[0]
    if a.ambient_dim != n:
        raise DimensionError(f"subspace lives in C^{a.ambient_dim}, algebra has dim {n}")
    if not 1 <= a.dim <= n:
        raise DimensionError("subspace must have dimension between 1 and n")
    if _rank(a.basis.T) < a.dim:
        raise DegenerateError("subspace basis is rank deficient")
    q = a.orthonormal()
    scale = max(1.0, float(np.max(np.abs(c), initial=0.0)))
    # brackets [x_i, q_a] for every basis vector x_i, columns of q
    g_a = np.einsum("kij,ja->kia", c, q).reshape(n, -1)
    leak = g_a - q @ (q.conj().T @ g_a)
    a_a = np.einsum("kij,ia,jb->kab", c, q, q)
    worst = max(float(np.max(np.abs(leak), initial=0.0)),
                float(np.max(np.abs(a_a), initial=0.0)))
    return worst <= tol * scale


def direct_sum(first, second) -> StructureConstants:
    c1, c2 = _tensor(first), _tensor(second)
    n1, n2 = c1.shape[0], c2.shape[0]
    c = np.zeros((n1 + n2,) * 3, dtype=complex)
    c[:n1, :n1, :n1] = c1
    c[n1:, n1:, n1:] = c2
    name = "+".join(filter(None, (getattr(first, "name", ""), getattr(second, "name", ""))))
    return StructureConstants(c, name=name)


def change_basis(alg, Q) -> np.ndarray:
    """Structure constants in the basis ``y_a = sum_i Q[i, a] x_i``.

    Returns the raw array (same layout as the input) so it serves both complex
    frames and real normalizations.
    """
    c = _tensor(alg)
    Q = np.asarray(Q)
    n = c.shape[0]
    if Q.shape[-2:] != (n, n):
        raise DimensionError(f"basis change must be {n}x{n}, got {Q.shape}")
    s = np.linalg.svd(Q, compute_uv=False)
    if np.any(s[..., -1] <= DEFAULT_TOL * s[..., 0]):
        raise DegenerateError("basis change is singular")
    Qinv = np.linalg.inv(Q)
    # X[m, a, q] = sum_p Q[p, a] c[m, p, q];  Y[m, a, b] = sum_q X[m, a, q] Q[q, b]
    X = np.swapaxes(Q, -1, -2)[..., None, :, :] @ c
    Y = X @ Q[..., None, :, :]
    out = (Qinv @ Y.reshape(Y.shape[:-3] + (n, n * n))).reshape(Y.shape)
    return (out - np.swapaxes(out, -1, -2)) / 2


def _clean(arr: np.ndarray, atol: float) -> np.ndarray:
    re, im = arr.real.copy(), arr.imag.copy()
    re[np.abs(re) < atol] = 0.0
    im[np.abs(im) < atol] = 0.0
    return re + 1j * im


def from_matrix_generators(mats: Sequence, tol: float = DEFAULT_TOL,
                           name: str = "") -> StructureConstants:
    """Structure constants of the matrix Lie algebra spanned by ``mats``.

    Each commutator is expanded in the generators by least squares; residuals
    above ``tol`` (relative to the commutator size) mean the span is not closed.
    """
    G = np.array([np.asarray(m, dtype=complex) for m in mats])
    if G.ndim != 3 or G.shape[1] != G.shape[2]:
        raise DimensionError("generators must be square matrices of equal size")
    m = G.shape[0]
    flat = G.reshape(m, -1).T
    if _rank(flat, tol) < m:
        raise DegenerateError("generators are linearly dependent")
    scale = float(np.max(np.abs(G)))
    c = np.zeros((m, m, m), dtype=complex)
    for i in range(m):
        for j in range(i + 1, m):
            comm = G[i] @ G[j] - G[j] @ G[i]
            coef, *_ = np.linalg.lstsq(flat, comm.ravel(), rcond=None)
            miss = np.linalg.norm(flat @ coef - comm.ravel())
            if miss > tol * max(scale ** 2, np.linalg.norm(comm)):
                raise NotClosedError(
                    f"[X_{i + 1}, X_{j + 1}] leaves the span (residual {miss:.3e})")
            c[:, i, j] = coef
            c[:, j, i] = -coef
    return StructureConstants(_clean(c, 1e-14 * max(1.0, np.max(np.abs(c)))), name=name)


def check_algebra(alg, tol: float = DEFAULT_TOL) -> None:
    """Raise if the Jacobi identity fails beyond ``tol`` (scaled by ``max|c|^2``)."""
    c = _tensor(alg)
    res = jacobi_residual(c)
    if res > tol * max(1.0, float(np.max(np.abs(c), initial=0.0)) ** 2):
        raise InvalidAlgebraError(f"Jacobi identity violated (residual {res:.3e})")


def require_abelian_ideal(alg, a: Subspace, tol: float = DEFAULT_TOL) -> None:
    if not is_abelian_ideal(alg, a, tol):
        raise NotAbelianIdealError("subspace is not an abelian ideal")

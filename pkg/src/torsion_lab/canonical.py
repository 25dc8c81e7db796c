"""Canonical metric of a semi-simple complex Lie algebra.

Starting from a compact real form ``u`` with constants ``S``, the basis of ``u``
is normalized so that ``-2 sum_{j,r} S[j,i,r] S[r,k,j] = delta_ik``.  The complex
vectors ``e_i = (u_i - i J u_i) / sqrt(2)`` are then unitary for the canonical
metric, the complex constants are ``sqrt(2) S`` and the torsion is ``-sqrt(2) S``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefiniteError
from .hermitian import HermitianMetric, analyze, tensor_A, tensor_B
from .lie_core import (
    DEFAULT_TOL,
    RealStructureConstants,
    StructureConstants,
    change_basis,
    check_algebra,
)


@dataclass(frozen=True, eq=False)
class NormalizedCompactForm:
    S: RealStructureConstants
    basis_change: np.ndarray  # columns: new basis in input coordinates

    @property
    def dim(self) -> int:
        return self.S.dim


@dataclass(frozen=True, eq=False)
class CanonicalMetricPackage:
    complex_constants: StructureConstants
    metric: HermitianMetric
    torsion: np.ndarray
    C: np.ndarray

    @property
    def dim(self) -> int:
        return self.complex_constants.dim


@dataclass
class Proposition1Check:
    """Residuals of the identities satisfied by a canonical metric."""

    antisymmetry: float
    bismut_parallel: float
    a_b_identity: float
    criticality: float
    b: float
    dim: int
    tol: float

    @property
    def checks(self) -> dict:
        return {
            "antisymmetry": self.antisymmetry,
            "bismut_parallel": self.bismut_parallel,
            "a_b_identity": self.a_b_identity,
            "criticality": self.criticality,
        }

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.checks.values())

    def to_dict(self) -> dict:
        return {**self.checks, "b": self.b, "dim": self.dim, "tol": self.tol,
                "passed": self.passed}


def compact_form_gram(S) -> np.ndarray:
    """``M[i, k] = -2 sum_{j,r} S[j, i, r] S[r, k, j]`` (minus the realified Killing form)."""
    S = S.S if isinstance(S, RealStructureConstants) else np.asarray(S)
    M = -2 * np.einsum("jir,rkj->ik", S, S)
    return (M + M.T) / 2


def normalization_residual(S) -> float:
    M = compact_form_gram(S)
    return float(np.max(np.abs(M - np.eye(len(M)))))


def normalize_compact_basis(S_in: RealStructureConstants,
                            tol: float = DEFAULT_TOL) -> NormalizedCompactForm:
    """Rescale the basis of a compact real form so that ``compact_form_gram == I``.

    Factors ``M = L L^T`` and takes ``Q = L^{-T}`` as the new basis, so
    ``Q^T M Q = I``.  Raises :class:`NotPositiveDefiniteError` if ``M`` is not
    positive definite, i.e. the input is not a compact semi-simple form.
    """
    check_algebra(S_in, tol)
    M = compact_form_gram(S_in)
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(
            "-Killing form is not positive definite; input is not a compact semi-simple form"
        ) from None
    Q = np.linalg.inv(L).T
    S_new = RealStructureConstants(change_basis(S_in, Q).real, name=S_in.name)
    return NormalizedCompactForm(S=S_new, basis_change=Q)


def canonical_package(u: NormalizedCompactForm) -> CanonicalMetricPackage:
    S = u.S.S
    T = -np.sqrt(2) * S
    C = np.einsum("ris,sjr->ij", T, T)
    return CanonicalMetricPackage(
        complex_constants=StructureConstants(np.sqrt(2) * S.astype(complex), name=u.S.name),
        metric=HermitianMetric.identity(u.dim),
        torsion=T.astype(complex),
        C=C.astype(complex),
    )


def metric_in_input_basis(u: NormalizedCompactForm) -> HermitianMetric:
    """The canonical metric written in the basis the compact form was given in.

    The unitary frame is ``e = sqrt(2) Q`` in input coordinates, so
    ``H = (P P^*)^{-1}`` with ``P = sqrt(2) Q``.
    """
    P = np.sqrt(2) * u.basis_change
    H = np.linalg.inv(P @ P.conj().T)
    return HermitianMetric((H + H.conj().T) / 2)


def verify_proposition1(pkg: CanonicalMetricPackage,
                        tol: float = DEFAULT_TOL) -> Proposition1Check:
    """Check that the canonical metric is torsion-critical with ``A = B = I``.

    Four residuals: antisymmetry of ``T`` in its first two indices, parallelism
    of ``T`` for the Bismut connection (through ``C = -I``), ``A = B = I``, and
    the relative criticality residual together with ``b = n``.
    """
    T, C = pkg.torsion, pkg.C
    n = pkg.dim
    antisym = np.max(np.abs(T + T.transpose(1, 0, 2)))
    # sum_r T[r,i,k] C[r,j] + T[r,j,k] C[i,r]
    parallel = (np.einsum("rik,rj->ijk", T, C) + np.einsum("rjk,ir->ijk", T, C))
    eye = np.eye(n)
    ab = max(np.max(np.abs(tensor_A(T) - eye)), np.max(np.abs(tensor_B(T) - eye)))
    report = analyze(pkg.complex_constants, pkg.metric, tol)
    # relative residual <= tol is exactly report.is_critical
    crit = report.residual_norm / max(1.0, report.b)
    return Proposition1Check(
        antisymmetry=float(antisym),
        bismut_parallel=float(np.max(np.abs(parallel))),
        a_b_identity=float(ab),
        criticality=float(max(crit, abs(report.b - n) / n)),
        b=report.b,
        dim=n,
        tol=tol,
    )


def canonical_for(name: str) -> tuple[NormalizedCompactForm, CanonicalMetricPackage]:
    """Normalize the shipped compact form of a catalog algebra and build its package."""
    from . import catalog

    u = normalize_compact_basis(catalog.compact_form(name))
    return u, canonical_package(u)

"""Shipped Lie algebras, addressable by name.

Bases:

* ``abelian1..3``  -- C^n with zero bracket.
* ``heisenberg3``  -- ``[e1, e2] = e3``, all other brackets zero.
* ``sl2``          -- ``[e1, e2] = e3``, ``[e2, e3] = e1``, ``[e3, e1] = e2``; realized by
  the anti-Hermitian matrices of :func:`sl2_matrices`, so the real span is su(2).
* ``sl2+c``        -- sl2 with a central e4.
* ``sl2+sl2``      -- two copies of sl2 on (e1, e2, e3) and (e4, e5, e6).
* ``sl3``          -- basis ``i * lambda_a / 2`` built from the Gell-Mann matrices; the
  real span is su(3).

The semi-simple entries are written in compact-form bases, so their compact real
form is obtained by reading the (real) constants as real numbers.
"""

from __future__ import annotations

import numpy as np

from .lie_core import (
    RealStructureConstants,
    StructureConstants,
    direct_sum,
    from_matrix_generators,
)


def sl2_matrices() -> list[np.ndarray]:
    """The 2x2 traceless basis with ``[e1, e2] = e3`` and cyclic."""
    return [
        0.5 * np.array([[0, 1], [-1, 0]], dtype=complex),
        0.5 * np.array([[0, 1j], [1j, 0]], dtype=complex),
        0.5 * np.array([[1j, 0], [0, -1j]], dtype=complex),
    ]


def gell_mann() -> list[np.ndarray]:
    s3 = 1 / np.sqrt(3)
    lam = np.zeros((8, 3, 3), dtype=complex)
    lam[0][0, 1] = lam[0][1, 0] = 1
    lam[1][0, 1], lam[1][1, 0] = -1j, 1j
    lam[2][0, 0], lam[2][1, 1] = 1, -1
    lam[3][0, 2] = lam[3][2, 0] = 1
    lam[4][0, 2], lam[4][2, 0] = -1j, 1j
    lam[5][1, 2] = lam[5][2, 1] = 1
    lam[6][1, 2], lam[6][2, 1] = -1j, 1j
    lam[7][0, 0] = lam[7][1, 1] = s3
    lam[7][2, 2] = -2 * s3
    return list(lam)


def su3_matrices() -> list[np.ndarray]:
    """Anti-Hermitian basis ``i * lambda_a / 2`` of su(3)."""
    return [0.5j * m for m in gell_mann()]


def abelian(n: int) -> StructureConstants:
    return StructureConstants(np.zeros((n, n, n)), name=f"abelian{n}")


def heisenberg3() -> StructureConstants:
    c = np.zeros((3, 3, 3))
    c[2, 0, 1], c[2, 1, 0] = 1, -1
    return StructureConstants(c, name="heisenberg3")


def levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[i, j, k] = 1
        eps[i, k, j] = -1
    return eps


def su2() -> RealStructureConstants:
    # [u_i, u_k] = eps_{ikj} u_j  ->  S[j, i, k] = eps[i, k, j] = eps[j, i, k]
    return RealStructureConstants(levi_civita(), name="su2")


def sl2() -> StructureConstants:
    return StructureConstants(levi_civita(), name="sl2")


def sl3() -> StructureConstants:
    return from_matrix_generators(su3_matrices(), name="sl3")


_BUILDERS = {
    "abelian1": (lambda: abelian(1), "C with zero bracket"),
    "abelian2": (lambda: abelian(2), "C^2 with zero bracket"),
    "abelian3": (lambda: abelian(3), "C^3 with zero bracket"),
    "heisenberg3": (heisenberg3, "[e1,e2]=e3"),
    "sl2": (sl2, "[e1,e2]=e3 and cyclic"),
    "sl2+c": (lambda: _named(direct_sum(sl2(), abelian(1)), "sl2+c"), "sl2 with central e4"),
    "sl2+sl2": (lambda: _named(direct_sum(sl2(), sl2()), "sl2+sl2"), "two commuting copies of sl2"),
    "sl3": (sl3, "Gell-Mann basis i*lambda_a/2"),
}

_COMPACT = {
    "sl2": su2,
    "sl2+sl2": lambda: RealStructureConstants(direct_sum(su2(), su2()).c.real, name="su2+su2"),
    "sl3": lambda: RealStructureConstants(sl3().c.real, name="su3"),
}


def _named(alg: StructureConstants, name: str) -> StructureConstants:
    return StructureConstants(alg.c, name=name)


def names() -> list[str]:
    return list(_BUILDERS)


def describe(name: str) -> str:
    return _BUILDERS[name][1]


def get(name: str) -> StructureConstants:
    try:
        builder = _BUILDERS[name][0]
    except KeyError:
        raise KeyError(f"unknown catalog algebra {name!r}; known: {', '.join(_BUILDERS)}") from None
    return builder()


def has_compact_form(name: str) -> bool:
    return name in _COMPACT


def compact_form(name: str) -> RealStructureConstants:
    """Compact real form of a semi-simple catalog entry, in the catalog basis."""
    try:
        return _COMPACT[name]()
    except KeyError:
        raise KeyError(f"no compact real form shipped for {name!r}") from None

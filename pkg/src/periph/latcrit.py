"""Discreteness criterion for the peripheral image via log-modulus minors.

For holonomy data (L, M) the real vectors

    u = (log|L_1|, log|L_1 L_2|, ..., log|L_1 ... L_{n-1}|),   w likewise from M,

are the log-moduli of the diagonal of the triangularized images.  If u and
w are linearly independent over R, the peripheral image is discrete and
faithful.  Independence is witnessed by a nonzero 2x2 minor

    Delta_{k,h} = log|L_k| log|M_h| - log|L_h| log|M_k|

(minors of the per-index logs and of the cumulative logs vanish together,
since the two are related by an invertible triangular change of basis).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from math import gcd

import numpy as np

from . import kernels
from .errors import DomainError
from .flagdec import PeripheralHolonomy


class Verdict(str, enum.Enum):
    SUFFICIENT_DISCRETE_FAITHFUL = "sufficient_discrete_faithful"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class PeripheralClass:
    L: np.ndarray
    M: np.ndarray

    def __post_init__(self):
        L = np.asarray(self.L, dtype=np.complex128)
        M = np.asarray(self.M, dtype=np.complex128)
        if np.any(np.abs(L) == 0) or np.any(np.abs(M) == 0):
            raise DomainError("holonomy entries must be nonzero")
        if not (np.all(np.isfinite(L)) and np.all(np.isfinite(M))):
            raise DomainError("holonomy entries must be finite")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "M", M)

    @classmethod
    def of(cls, hol) -> "PeripheralClass":
        if isinstance(hol, PeripheralClass):
            return hol
        return cls(hol.L, hol.M)

    @property
    def u(self) -> np.ndarray:
        return np.cumsum(np.log(np.abs(self.L)))

    @property
    def w(self) -> np.ndarray:
        return np.cumsum(np.log(np.abs(self.M)))


@dataclass(frozen=True)
class DiscretenessVerdict:
    verdict: Verdict
    witness: tuple | None
    minors: np.ndarray
    tol: float


def minors(hol) -> np.ndarray:
    """Antisymmetric matrix ``D[k-1, h-1] = Delta_{k,h}``."""
    pc = PeripheralClass.of(hol)
    a = np.log(np.abs(pc.L))
    b = np.log(np.abs(pc.M))
    return np.outer(a, b) - np.outer(b, a)


def default_tol(hol) -> float:
    pc = PeripheralClass.of(hol)
    scale = max(np.abs(pc.u).max(initial=0.0), np.abs(pc.w).max(initial=0.0), 1e-8)
    return 1e-10 * scale**2


def classify(hol, tol: float | None = None) -> DiscretenessVerdict:
    """One-sided test: a minor above ``tol`` certifies discreteness."""
    D = minors(hol)
    tol = default_tol(hol) if tol is None else tol
    iu = np.triu_indices(D.shape[0], 1)
    vals = np.abs(D[iu])
    if len(vals) and vals.max() > tol:
        i = int(np.argmax(vals))
        return DiscretenessVerdict(
            Verdict.SUFFICIENT_DISCRETE_FAITHFUL, (int(iu[0][i]) + 1, int(iu[1][i]) + 1), D, tol
        )
    return DiscretenessVerdict(Verdict.INCONCLUSIVE, None, D, tol)


def lattice_oracle(hol, N: int) -> float:
    """min over integer (p, q) != 0 with |p|, |q| <= N of ``||p u + q w||_inf``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    pc = PeripheralClass.of(hol)
    return kernels.lattice_min(pc.u, pc.w, int(N))[0]


def resonance_search(hol, maxpq: int, tol: float | None = None):
    """Coprime (p, q), |p|, |q| <= maxpq, sorted by residual ``||p u + q w||_inf``.

    Each pair appears once with p > 0, or p = 0 and q > 0.  With ``tol``
    only pairs whose residual is at most ``tol`` are kept.
    """
    if maxpq < 1:
        raise ValueError("maxpq must be >= 1")
    pc = PeripheralClass.of(hol)
    u, w = pc.u, pc.w
    out = []
    for p in range(0, maxpq + 1):
        for q in range(-maxpq, maxpq + 1):
            if (p == 0 and q <= 0) or gcd(p, q) != 1:
                continue
            r = float(np.abs(p * u + q * w).max())
            if tol is None or r <= tol:
                out.append((p, q, r))
    out.sort(key=lambda t: (t[2], abs(t[0]) + abs(t[1]), t[0], t[1]))
    return out


def weyl_permuted(hol, perm) -> PeripheralClass:
    """Holonomy after reordering the eigenvalue diagonal by ``perm``."""
    pc = PeripheralClass.of(hol)
    dl = np.concatenate([[1.0], np.cumprod(pc.L)])[list(perm)]
    dm = np.concatenate([[1.0], np.cumprod(pc.M)])[list(perm)]
    h = PeripheralHolonomy.from_diagonals(dl, dm)
    return PeripheralClass(h.L, h.M)

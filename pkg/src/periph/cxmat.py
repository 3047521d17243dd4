"""Dense complex matrix core.

Everything here works on small (n <= 12) complex matrices at double
precision.  Approximate comparisons go through a ``tol`` carried by
:class:`CMatrix` (default ``1e-9``).
"""
from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguityError, AmbiguousRankError, BranchError, EigenvalueError

DEFAULT_TOL = 1e-9
MAX_DIM = 12
#: required ratio between the smallest kept and largest discarded singular value
RANK_GAP = 1e3


@dataclass(frozen=True, eq=False)
class CMatrix:
    """Square complex matrix with a comparison tolerance.

    ``entries`` is stored as a read-only complex128 array.
    """

    entries: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 2:
            raise ValueError(f"expected a square matrix of size >= 2, got shape {a.shape}")
        if a.shape[0] > MAX_DIM:
            raise ValueError(f"dimension {a.shape[0]} exceeds {MAX_DIM}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, n, tol=DEFAULT_TOL):
        return cls(np.eye(n), tol)

    def __matmul__(self, other):
        return CMatrix(self.entries @ _arr(other), self.tol)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def inv(self):
        return CMatrix(np.linalg.inv(self.entries), self.tol)

    def det(self) -> complex:
        return complex(np.linalg.det(self.entries))

    def __repr__(self):
        return f"CMatrix(n={self.n}, tol={self.tol:g})"


def _arr(a) -> np.ndarray:
    if isinstance(a, CMatrix):
        return a.entries
    return np.asarray(a, dtype=np.complex128)


def _tol(a, tol):
    if tol is not None:
        return tol
    return a.tol if isinstance(a, CMatrix) else DEFAULT_TOL


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues (with multiplicity) and monic characteristic polynomial.

    ``charpoly`` lists coefficients from the leading 1 down to the constant
    term, so ``sigma(k) = (-1)**k * charpoly[k]``.
    """

    eigenvalues: np.ndarray
    charpoly: np.ndarray
    discriminant_ok: bool = field(default=True)

    def sigma(self, k: int) -> complex:
        return complex((-1) ** k * self.charpoly[k])


def char_poly(A, tol=None) -> SpectralData:
    a = _arr(A)
    tol = _tol(A, tol)
    try:
        eig = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise EigenvalueError(f"eigenvalue iteration failed: {exc}") from exc
    if not np.all(np.isfinite(eig)):
        raise EigenvalueError("non-finite eigenvalues", residual=np.inf)
    coeffs = np.poly(eig)
    # residual of det(A) against the eigenvalue product
    det = np.linalg.det(a)
    residual = abs(np.prod(eig) - det) / max(1.0, abs(det))
    if residual > 1e-6:
        raise EigenvalueError("eigenvalue product disagrees with determinant", residual=residual)
    scale = max(1.0, np.abs(eig).max())
    disc_ok = all(
        abs(eig[i] - eig[j]) > 1e2 * tol * scale
        for i in range(len(eig))
        for j in range(i + 1, len(eig))
    )
    return SpectralData(eig, coeffs, disc_ok)


def cluster_radius(a: np.ndarray, tol: float, n: int | None = None) -> float:
    """Distance below which eigenvalues of ``a`` are treated as one."""
    n = n or a.shape[0]
    scale = max(1.0, float(np.abs(a).max()))
    # a defective eigenvalue of multiplicity r perturbed by d splits by O(d^(1/r))
    return max(1e2 * tol * scale, 10.0 * (np.finfo(float).eps * scale) ** (1.0 / n) * scale)


def cluster_eigenvalues(eig, radius):
    """Group eigenvalues closer than ``radius`` (single linkage).

    Returns a list of (mean eigenvalue, multiplicity) in order of first
    appearance.
    """
    eig = list(eig)
    labels = list(range(len(eig)))
    for i in range(len(eig)):
        for j in range(i + 1, len(eig)):
            if abs(eig[i] - eig[j]) < radius:
                old, new = labels[j], labels[i]
                labels = [new if x == old else x for x in labels]
    out = []
    seen = []
    for lab in labels:
        if lab in seen:
            continue
        seen.append(lab)
        members = [eig[k] for k in range(len(eig)) if labels[k] == lab]
        out.append((complex(np.mean(members)), len(members)))
    return out


def numerical_nullity(M, threshold, gap=RANK_GAP):
    """Nullity of ``M`` by singular-value thresholding.

    Singular values below ``threshold`` count as zero.  The ratio between
    the smallest kept and largest discarded value must reach ``gap``,
    otherwise :class:`AmbiguousRankError` is raised.  Columns in excess of
    rows count towards the nullity.
    """
    M = np.asarray(M)
    s = np.linalg.svd(M, compute_uv=False)
    extra = max(0, M.shape[1] - M.shape[0])
    small = s[s < threshold]
    big = s[s >= threshold]
    if len(small) and len(big):
        ratio = big.min() / max(small.max(), 1e-300)
        if ratio < gap:
            raise AmbiguousRankError(
                f"no singular value gap (ratio {ratio:.3g} < {gap:g})", singular_values=s
            )
    return len(small) + extra


def is_regular(A, tol=None) -> bool:
    """True iff every eigenvalue of ``A`` has a one-dimensional eigenspace.

    Clustered eigenvalues are replaced by their mean and the nullity of
    ``A - lambda I`` is decided by singular values.  An ambiguous rank
    decision warns and returns False.
    """
    a = _arr(A)
    tol = _tol(A, tol)
    n = a.shape[0]
    cp = char_poly(a, tol)
    scale = max(1.0, float(np.abs(a).max()))
    for lam, mult in cluster_eigenvalues(cp.eigenvalues, cluster_radius(a, tol)):
        if mult == 1:
            continue
        try:
            k = numerical_nullity(a - lam * np.eye(n), threshold=1e2 * np.sqrt(tol) * scale)
        except AmbiguousRankError as exc:
            warnings.warn(f"is_regular: ambiguous rank near eigenvalue {lam:.6g}: {exc}")
            return False
        if k != 1:
            return False
    return True


def _branch_log(z: complex) -> complex:
    z = complex(z)
    if abs(z - 1) < 1 or (z.imag == 0 and z.real > 0):
        return cmath.log(z)
    raise BranchError(f"{z} is outside the branch-safe region |z-1| < 1 / positive reals")


def e_map(a):
    """Eigenvalues of the determinant-normalised upper-triangular matrix
    with diagonal ``(1, a1, a1 a2, ..., a1...a_{n-1})``.
    """
    a = np.asarray(a, dtype=np.complex128)
    m = len(a)
    n = m + 1
    logs = np.array([_branch_log(x) for x in a])
    partial = np.concatenate([[0.0], np.cumsum(logs)])
    # n-th root of a1^{n-1} a2^{n-2} ... a_{n-1}, branch sending 1 to 1
    root_log = sum((n - 1 - k) * logs[k] for k in range(m)) / n
    return np.exp(partial - root_log)


def _unit_scalings(det: complex, n: int):
    """All lam with lam**n == det."""
    r = abs(det) ** (1.0 / n)
    phi = cmath.phase(det)
    return [r * cmath.exp(1j * (phi + 2 * np.pi * k) / n) for k in range(n)]


def sl_lift(P, R, bound=0.5) -> CMatrix:
    """Determinant-one multiple of ``P`` closest to ``R`` (max-entry norm)."""
    p = _arr(P)
    r = _arr(R)
    n = p.shape[0]
    det = np.linalg.det(p)
    if abs(det) == 0:
        raise ValueError("P is singular")
    best = None
    for lam in _unit_scalings(1.0 / det, n):
        d = np.abs(lam * p - r).max()
        if best is None or d < best[0]:
            best = (d, lam)
    if best[0] >= bound:
        raise AmbiguityError(f"no determinant-one scaling within {bound} of the reference (best {best[0]:.3g})")
    return CMatrix(best[1] * p, _tol(P, None))


def projective_distance(A, B) -> float:
    """min over lam**n == det(B)/det(A) of ``max|lam A - B|``."""
    a = _arr(A)
    b = _arr(B)
    n = a.shape[0]
    ratio = np.linalg.det(b) / np.linalg.det(a)
    return float(min(np.abs(lam * a - b).max() for lam in _unit_scalings(ratio, n)))


def jordan_block(n, lam=1.0):
    return np.eye(n, dtype=np.complex128) * lam + np.eye(n, k=1)

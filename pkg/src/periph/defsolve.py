"""Deformations of a representation near a decorated base point.

The unknowns are the entries of the generator images.  The equations are

* relator entries ``lhs - rhs``,
* ``det g - 1`` for every generator,
* the lower-triangular entries of ``rho(m)`` (this freezes the decorating
  flag to the standard flag of the working frame),
* ``n(n+1)/2 - 1`` pinned entries that kill the remaining Borel
  conjugation freedom,
* optionally the eigenvalue targets ``rho(l)[k+1,k+1] = L_k rho(l)[k,k]``.

Every equation is holomorphic in the unknowns, so the Jacobian is the
complex derivative, estimated by central differences along the real axis
of each unknown.  The system is solved by damped Gauss-Newton.

The working frame is the base point conjugated by the decoration's flag
basis ``P``; results are mapped back by ``g -> P g P^-1``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from . import kernels
from .cxmat import _branch_log, char_poly, e_map, is_regular
from .errors import (
    AmbiguousRankError,
    ContinuationError,
    DecorationMismatchError,
    DomainError,
    GaugeError,
    NonConvergenceError,
    RamificationError,
    SolverError,
)
from .flagdec import Decoration, Flag, PeripheralHolonomy, common_flags, decorate, select_decoration
from .fpgroup import Representation, Word, _slots, evaluate, relator_residual

TARGET_RADIUS = 0.5
STEP_RADIUS = 0.1
RANK_GAP = 1e3


@dataclass(frozen=True)
class SolverConfig:
    max_iter: int = 100
    residual_tol: float = 1e-12
    step_damping: float = 1.0
    fd_step: float = 1e-7
    continuation_steps: int = 10
    max_halvings: int = 6
    #: called with one dict per iteration (iteration, residual, step_norm)
    trace: object = field(default=None, compare=False)

    def __post_init__(self):
        if not self.residual_tol > 0:
            raise ValueError("residual_tol must be positive")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")
        if not 0 < self.step_damping <= 1:
            raise ValueError("step_damping must lie in (0, 1]")
        if self.max_iter < 1 or self.continuation_steps < 1 or self.max_halvings < 0:
            raise ValueError("iteration counts must be positive")


def jsonl_trace(fh):
    """Trace callback writing one JSON object per line to ``fh``."""

    def emit(record):
        fh.write(json.dumps(record) + "\n")

    return emit


@dataclass(frozen=True, eq=False)
class Gauge:
    """Slice through the base point transverse to the conjugation orbit.

    ``frame`` is the flag basis P of the decoration; the lower-triangular
    entries of ``P^-1 rho(meridian) P`` are held at zero and ``pins`` lists
    ``(index, value)`` for further entries of the flattened working-frame
    generator images.
    """

    frame: np.ndarray
    meridian: Word
    pins: tuple
    n: int

    @property
    def count(self) -> int:
        return self.n * (self.n - 1) // 2 + len(self.pins)

    @property
    def pin_index(self) -> np.ndarray:
        return np.array([i for i, _ in self.pins], dtype=np.int_)

    @property
    def pin_values(self) -> np.ndarray:
        return np.array([v for _, v in self.pins], dtype=np.complex128)


def _flatten(images) -> np.ndarray:
    return np.concatenate([np.asarray(g).ravel() for g in images])


def _borel_basis(n):
    basis = []
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n))
            E[i, j] = 1
            basis.append(E)
    for i in range(n - 1):
        E = np.zeros((n, n))
        E[i, i], E[i + 1, i + 1] = 1, -1
        basis.append(E)
    return basis


def base_decoration(rep: Representation, l: Word, m: Word) -> Decoration:
    """The unique decoration of a peripheral pair with a regular member."""
    A, B = evaluate(rep, l), evaluate(rep, m)
    first, second = (B, A) if is_regular(B, rep.tol) else (A, B)
    flags = common_flags(first, second, rep.tol)
    if len(flags) != 1:
        raise GaugeError(
            f"base point has {len(flags)} invariant flags; pass the decoration explicitly"
        )
    return decorate(flags[0], A, B, rep.tol)


def make_gauge(rep: Representation, l: Word, m: Word, decoration: Decoration | None = None) -> Gauge:
    """Freeze the decoration flag and pin Borel directions chosen by pivoted QR."""
    dec = decoration or base_decoration(rep, l, m)
    P = dec.flag.basis
    n = rep.n
    work = rep.conjugate(P)
    x0 = _flatten(work.images)
    # tangent of the Borel orbit at the base point, one column per direction
    T = np.array([_flatten([X @ g - g @ X for g in work.images]) for X in _borel_basis(n)]).T
    k = T.shape[1]
    _, R, piv = scipy.linalg.qr(T.T, pivoting=True)
    diag = np.abs(np.diag(R))
    if diag[-1] < 1e-8 * diag[0]:
        raise GaugeError("conjugation orbit is degenerate at the base point (nontrivial stabilizer)")
    pins = tuple((int(i), complex(x0[i])) for i in sorted(piv[:k]))
    return Gauge(np.array(P), m, pins, n)


class _System:
    """Residual map of the deformation equations, evaluated in batches."""

    def __init__(self, rep: Representation, gauge: Gauge, l: Word | None, target=None):
        pres = rep.presentation
        self.n = rep.n
        self.ngens = pres.ngens
        self.relators = []
        for a, b in pres.relators:
            # SL lifts of a projective representation satisfy lhs = zeta rhs
            A, B = evaluate(rep, a), evaluate(rep, b)
            roots = np.exp(2j * np.pi * np.arange(self.n) / self.n)
            zeta = roots[np.argmin([np.abs(A - z * B).max() for z in roots])]
            self.relators.append((_slots(a), _slots(b), zeta))
        self.m_slots = _slots(gauge.meridian)
        self.l_slots = None if l is None else _slots(l)
        self.gauge = gauge
        self.target = None if target is None else np.asarray(target, dtype=np.complex128)
        self.lower = np.tril_indices(self.n, -1)

    def images(self, X):
        return X.reshape(X.shape[0], self.ngens, self.n, self.n)

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(X)
        B = X.shape[0]
        g = self.images(X)
        ginv = np.linalg.inv(g)
        mats = np.empty((B, 2 * self.ngens, self.n, self.n), dtype=np.complex128)
        mats[:, 0::2] = g
        mats[:, 1::2] = ginv
        parts = []
        for a, b, zeta in self.relators:
            diff = kernels.word_product(mats, a) - zeta * kernels.word_product(mats, b)
            parts.append(diff.reshape(B, -1))
        parts.append(np.linalg.det(g) - 1)
        parts.append(kernels.word_product(mats, self.m_slots)[:, self.lower[0], self.lower[1]])
        parts.append(X[:, self.gauge.pin_index] - self.gauge.pin_values)
        if self.target is not None:
            L = kernels.word_product(mats, self.l_slots)
            d = np.diagonal(L, axis1=1, axis2=2)
            parts.append(d[:, 1:] - self.target * d[:, :-1])
        return np.concatenate(parts, axis=1)

    def jacobian(self, x, h):
        N = len(x)
        E = np.eye(N) * h
        F = self(np.concatenate([x + E, x - E]))
        return (F[:N] - F[N:]).T / (2 * h)


@dataclass(frozen=True, eq=False)
class DeformationProblem:
    base: Representation
    decoration: Decoration
    longitude: Word
    meridian: Word
    target_L: np.ndarray
    gauge: Gauge
    config: SolverConfig = SolverConfig()

    def __post_init__(self):
        t = np.asarray(self.target_L, dtype=np.complex128)
        if t.shape != (self.base.n - 1,):
            raise ValueError(f"target_L must have {self.base.n - 1} entries")
        if np.any(np.abs(t - 1) >= TARGET_RADIUS):
            raise DomainError(f"target {t} leaves the chart |L_k - 1| < {TARGET_RADIUS}")
        object.__setattr__(self, "target_L", t)
        if self.gauge.count != self.base.n**2 - 1:
            raise GaugeError(f"gauge fixes {self.gauge.count} entries, expected {self.base.n ** 2 - 1}")

    @classmethod
    def at(cls, base: Representation, l: Word, m: Word, target=None, config=None, decoration=None, gauge=None):
        dec = decoration or base_decoration(base, l, m)
        gauge = gauge or make_gauge(base, l, m, dec)
        if target is None:
            target = np.ones(base.n - 1)
        return cls(base, dec, l, m, target, gauge, config or SolverConfig())

    def with_target(self, target) -> "DeformationProblem":
        return replace(self, target_L=target)


@dataclass(frozen=True, eq=False)
class SolveResult:
    rep: Representation
    decoration: Decoration
    holonomy: PeripheralHolonomy
    residual: float
    iterations: int
    #: max over k of |sigma_k(rho(l)) - sigma_k(e_map(L))|, up to an n-th root of unity
    sigma_mismatch: float
    trace: list
    #: (longitude, meridian)
    decoration_words: tuple = ()


def _gauss_newton(system: _System, x, cfg: SolverConfig):
    trace = []

    def norm2(v):
        return float(np.linalg.norm(v))

    f = system(x)[0]
    res = float(np.abs(f).max())
    trace.append({"iteration": 0, "residual": norm2(f), "step_norm": 0.0})
    if cfg.trace:
        cfg.trace(trace[-1])
    for it in range(1, cfg.max_iter + 1):
        if res < cfg.residual_tol:
            return x, res, it - 1, trace
        J = system.jacobian(x, cfg.fd_step)
        s = np.linalg.svd(J, compute_uv=False)
        if s[-1] < 1e-10 * s[0]:
            raise RamificationError(
                f"Jacobian rank collapse (sigma_min/sigma_max = {s[-1] / s[0]:.2e})", res, it
            )
        dx = np.linalg.lstsq(J, -f, rcond=None)[0]
        alpha = cfg.step_damping
        for _ in range(30):
            xn = x + alpha * dx
            fn = system(xn)[0]
            if np.all(np.isfinite(fn)) and norm2(fn) < norm2(f):
                break
            alpha /= 2
        else:
            if res < 1e2 * cfg.residual_tol:
                # rounding floor just above the tolerance
                return x, res, it - 1, trace
            raise NonConvergenceError(f"no descent step at residual {res:.3e}", res, it)
        x, f = xn, fn
        res = float(np.abs(f).max())
        trace.append({"iteration": it, "residual": norm2(f), "step_norm": float(alpha * np.linalg.norm(dx))})
        if cfg.trace:
            cfg.trace(trace[-1])
    if res < cfg.residual_tol:
        return x, res, cfg.max_iter, trace
    raise NonConvergenceError(f"no convergence after {cfg.max_iter} iterations (residual {res:.3e})", res, cfg.max_iter)


def _sigma_mismatch(Lmat, target):
    n = Lmat.shape[0]
    want = np.poly(e_map(target))
    have = char_poly(Lmat).charpoly
    best = np.inf
    for j in range(n):
        zeta = np.exp(2j * np.pi * j / n)
        scaled = have * zeta ** np.arange(n + 1)
        best = min(best, float(np.abs(scaled - want).max()))
    return best


def solve_to_target(prob: DeformationProblem, warm_start: Representation | None = None) -> SolveResult:
    """Representation with longitude eigenvalue data ``prob.target_L``.

    The result is expressed in the frame of ``prob.base``; its decoration
    is the continuation of the base decoration (same flag basis).
    """
    cfg = prob.config
    if relator_residual(prob.base) > 1e-10:
        raise ValueError("base representation residual exceeds 1e-10")
    P = prob.gauge.frame
    Pinv = np.linalg.inv(P)
    system = _System(prob.base, prob.gauge, prob.longitude, prob.target_L)
    start = warm_start or prob.base
    x0 = _flatten([Pinv @ g @ P for g in start.images])
    x, res, its, trace = _gauss_newton(system, x0, cfg)
    work = system.images(x[None])[0]
    images = [P @ g @ Pinv for g in work]
    rep = prob.base.with_images(images, residual_bound=max(prob.base.residual_bound, 1e-8))
    Lw = evaluate(rep, prob.longitude)
    Mw = evaluate(rep, prob.meridian)
    dec = decorate(Flag(P, prob.decoration.flag.chains), Lw, Mw, max(prob.base.tol, 1e2 * cfg.residual_tol))
    return SolveResult(
        rep=rep,
        decoration=dec,
        holonomy=dec.holonomy(),
        residual=res,
        iterations=its,
        sigma_mismatch=_sigma_mismatch(Lw, prob.target_L),
        trace=trace,
        decoration_words=(prob.longitude, prob.meridian),
    )


def _log_interp(v0, v1, s):
    return np.exp((1 - s) * np.log(v0) + s * np.log(v1))


def continued_flag(result: SolveResult, previous: Flag, tol: float = 1e-9) -> Flag:
    """Invariant flag at a solved point nearest to ``previous``.

    Only meaningful where rho(l) or rho(m) is regular; returns the selected
    flag so callers can compare it with the solver's frozen one.
    """
    A = evaluate(result.rep, result.decoration_words[0])
    B = evaluate(result.rep, result.decoration_words[1])
    first, second = (A, B) if is_regular(A, tol) else (B, A)
    return select_decoration(common_flags(first, second, tol), previous, tol=tol).flag


def continuation_path(
    prob: DeformationProblem,
    targets,
    config: SolverConfig | None = None,
    start=None,
    check_decoration: bool = False,
):
    """Solve along ``targets``, warm-starting each point from the previous one.

    A failed step is bisected (in log coordinates) up to ``max_halvings``
    times before giving up with :class:`ContinuationError`.  With
    ``check_decoration`` every step re-selects the invariant flag nearest
    the previous step's flag and requires it to be the solver's flag.
    """
    cfg = config or prob.config
    prob = replace(prob, config=cfg)
    targets = [np.asarray(t, dtype=np.complex128) for t in targets]
    prev_rep = start.rep if start is not None else prob.base
    prev_v = start.holonomy.L if start is not None else _base_L(prob)
    prev_flag = start.decoration.flag if start is not None else prob.decoration.flag
    out = []
    for idx, v in enumerate(targets):
        if np.abs(v - prev_v).max() > STEP_RADIUS + 1e-12:
            raise ValueError(f"target {idx} is more than {STEP_RADIUS} away from the previous one")

        def advance(rep0, v0, v1, depth):
            try:
                return solve_to_target(prob.with_target(v1), warm_start=rep0)
            except SolverError as exc:
                if depth >= cfg.max_halvings:
                    raise ContinuationError(f"step {idx} failed after {depth} halvings: {exc}", idx, exc) from exc
            mid = _log_interp(v0, v1, 0.5)
            half = advance(rep0, v0, mid, depth + 1)
            return advance(half.rep, mid, v1, depth + 1)

        result = advance(prev_rep, prev_v, v, 0)
        if check_decoration:
            chosen = continued_flag(result, prev_flag)
            drift = chosen.distance(result.decoration.flag)
            if drift > 1e-6:
                raise DecorationMismatchError(f"step {idx}: nearest flag differs from the continued one by {drift:.3g}")
            prev_flag = chosen
        out.append(result)
        prev_rep, prev_v = result.rep, v
    return out


def _base_L(prob):
    return decorate(
        prob.decoration.flag, evaluate(prob.base, prob.longitude), evaluate(prob.base, prob.meridian), prob.base.tol
    ).holonomy().L


def ray_targets(end, steps: int):
    """``steps`` points from 1 to ``end`` equally spaced in log coordinates."""
    end = np.asarray(end, dtype=np.complex128)
    logs = np.log(end)
    return [np.exp(logs * (j / steps)) for j in range(1, steps + 1)]


def meridian_response(v, prob: DeformationProblem) -> np.ndarray:
    return solve_to_target(prob.with_target(v)).holonomy.M


@dataclass(frozen=True)
class TauEstimate:
    steps: np.ndarray
    #: tau[i, k] at steps[i]
    tau: np.ndarray
    limit: np.ndarray
    uncertainty: np.ndarray

    @property
    def mu(self) -> complex:
        return complex(np.mean(self.limit))


def _neville_at_zero(s, y):
    """Value at 0 of the interpolating polynomial through (s_i, y_i)."""
    p = list(np.asarray(y, dtype=np.complex128))
    s = list(s)
    m = len(s)
    for j in range(1, m):
        for i in range(m - j):
            p[i] = (s[i + j] * p[i] - s[i] * p[i + 1]) / (s[i + j] - s[i])
    return p[0]


def tau_estimate(prob: DeformationProblem, direction, steps=(0.04, 0.02, 0.01, 0.005)) -> TauEstimate:
    """Slopes ``log M_k / log L_k`` along ``v_s = exp(s d)`` and their s -> 0 limit.

    ``d`` is ``direction`` normalised to unit length.  The limit is a
    polynomial (Richardson) extrapolation through all steps; the
    uncertainty is its change when the largest step is dropped.
    """
    d = np.asarray(direction, dtype=np.complex128)
    if d.shape != (prob.base.n - 1,):
        raise ValueError(f"direction must have {prob.base.n - 1} entries")
    if np.any(d == 0):
        raise DomainError("every direction entry must be nonzero for the slopes to be defined")
    d = d / np.linalg.norm(d)
    steps = np.asarray(sorted(steps, reverse=True), dtype=float)
    if np.any(steps <= 0) or len(steps) < 2:
        raise ValueError("need at least two positive steps")
    taus = []
    warm = None
    for s in steps:
        v = np.exp(s * d)
        res = solve_to_target(prob.with_target(v), warm_start=warm)
        warm = res.rep
        logL = np.log(res.holonomy.L)
        if np.any(np.abs(logL) < 1e-14):
            raise DomainError("some L_k equals 1 along the path; the slope is undefined")
        taus.append(np.array([_branch_log(x) for x in res.holonomy.M]) / logL)
    taus = np.array(taus)
    limit = np.array([_neville_at_zero(steps, taus[:, k]) for k in range(taus.shape[1])])
    coarse = np.array([_neville_at_zero(steps[1:], taus[1:, k]) for k in range(taus.shape[1])])
    return TauEstimate(steps, taus, limit, np.abs(limit - coarse))


def cusp_modulus(rep2: Representation, l: Word, m: Word) -> complex:
    """Translation ratio ``t(m) / t(l)`` of a parabolic peripheral pair in SL(2,C).

    Both images are conjugated to upper-triangular form, normalised to
    unit diagonal, and the ratio of their off-diagonal entries is returned.
    """
    if rep2.n != 2:
        raise ValueError("cusp_modulus expects a representation into SL(2,C)")
    A, B = evaluate(rep2, l), evaluate(rep2, m)
    w, V = np.linalg.eig(B)
    v = V[:, 0]
    P = np.column_stack([v, [0, 1] if abs(v[0]) > abs(v[1]) else [1, 0]])
    TA = np.linalg.solve(P, A @ P)
    TB = np.linalg.solve(P, B @ P)
    ta = TA[0, 1] / TA[0, 0]
    tb = TB[0, 1] / TB[0, 0]
    if abs(ta) < 1e-12:
        raise DomainError("longitude image has no translation part")
    return complex(tb / ta)


def pgl2_tau_oracle(rep2: Representation, l: Word, m: Word, direction=1.0 + 0.5j, steps=(0.04, 0.02, 0.01, 0.005)):
    """Slope extrapolation computed directly on the SL(2) representation."""
    prob = DeformationProblem.at(rep2, l, m)
    return tau_estimate(prob, [direction], steps)


@dataclass(frozen=True)
class RankReport:
    nullity: int
    singular_value_gap: float
    singular_values: np.ndarray


def rank_check(rep: Representation, gauge: Gauge, fd_step: float = 1e-7) -> RankReport:
    """Nullity of the relator + determinant + gauge Jacobian at ``rep``.

    Singular values below ``1e-6 * sigma_max`` count as zero; the ratio
    between the smallest kept and the largest discarded value must reach
    1e3.
    """
    if relator_residual(rep) > 1e-10:
        raise ValueError("rank_check needs a representation with residual below 1e-10")
    P = gauge.frame
    system = _System(rep, gauge, None)
    x = _flatten([np.linalg.solve(P, g @ P) for g in rep.images])
    J = system.jacobian(x, fd_step)
    s = np.linalg.svd(J, compute_uv=False)
    extra = max(0, J.shape[1] - J.shape[0])
    threshold = 1e-6 * s[0]
    small = s[s < threshold]
    big = s[s >= threshold]
    gap = float(big.min() / max(small.max(), 1e-300)) if len(small) else float(np.inf)
    if len(small) and gap < RANK_GAP:
        raise AmbiguousRankError(f"no singular value gap (ratio {gap:.3g})", singular_values=s)
    return RankReport(len(small) + extra, gap, s)


def delta_leading_order(v, mu: complex) -> np.ndarray:
    """Leading-order prediction of the minors near the unipotent point.

    With ``M_k ~ L_k^mu`` the minors reduce to
    ``Im(mu) (arg L_k log|L_h| - arg L_h log|L_k|)``; returned as an
    antisymmetric (n-1) x (n-1) matrix.
    """
    v = np.asarray(v, dtype=np.complex128)
    logs = np.log(v)
    if np.abs(logs).max(initial=0.0) >= 0.3:
        raise DomainError("leading-order formula needs ||log v|| < 0.3")
    a = logs.imag
    r = logs.real
    return mu.imag * (np.outer(a, r) - np.outer(r, a))

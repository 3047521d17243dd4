"""Command-line front end: representation JSON in, CSV / JSON reports out.

Exit codes: 0 ok, 1 computation failure, 2 data integrity, 3 usage.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import corpus8
from .cxmat import projective_distance
from .defsolve import (
    DeformationProblem,
    SolverConfig,
    continuation_path,
    delta_leading_order,
    jsonl_trace,
    rank_check,
    ray_targets,
    solve_to_target,
    tau_estimate,
)
from .errors import (
    ContinuationError,
    CorpusIntegrityError,
    DomainError,
    NonConvergenceError,
    PeriphError,
    RamificationError,
)
from .flagdec import (
    Flag,
    common_flags,
    decorate,
    is_projectively_unipotent,
    is_regular,
    is_unipotent_regular,
    select_decoration,
)
from .fpgroup import abelianized_exponents, evaluate, is_scalar_power, relator_residual
from .jsonio import (
    complex_to_json,
    decoration_from_json,
    decoration_to_json,
    dump_representation,
    load_representation,
)
from .latcrit import Verdict, classify
from .symlift import lift_rep

EXIT_OK, EXIT_COMPUTE, EXIT_INTEGRITY, EXIT_USAGE = 0, 1, 2, 3
MAX_RADIUS = 0.3
MODES = ("grid", "ray_32", "single_entry_33", "rho2_persistence", "random_directions")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _complex_list(text: str):
    try:
        return [complex(t.strip().replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse complex list {text!r}") from exc


def _float_list(text: str):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse number list {text!r}") from exc


def _pairs(text: str):
    if text == "all":
        return "all"
    out = []
    for chunk in text.split(";"):
        k, h = (int(x) for x in chunk.split(","))
        if not 1 <= k < h:
            raise argparse.ArgumentTypeError(f"pair ({k},{h}) must satisfy 1 <= k < h")
        out.append((k, h))
    return out


def _threads() -> int:
    env = os.environ.get("PERIPH_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"PERIPH_THREADS must be an integer, got {env!r}")
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def _load_center(source: str, corpus_dir=None):
    """Named corpus representation or a representation JSON file."""
    if source in corpus8.NAMES:
        return corpus8.load_named(source, corpus_dir).rep
    path = Path(source)
    if not path.exists():
        raise UsageError(f"{source!r} is neither a corpus name {corpus8.NAMES} nor a file")
    return load_representation(path)


def _peripheral_words(rep, args):
    pres = rep.presentation
    l, m = corpus8.canonical_peripheral_words(getattr(args, "corpus_dir", None))
    if getattr(args, "longitude", None):
        l = pres.word(args.longitude)
    if getattr(args, "meridian", None):
        m = pres.word(args.meridian)
    return l, m


def _fmt(x) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------- check-corpus


def _check(checks, name, ok, **values):
    checks.append({"name": name, "ok": bool(ok), **values})


def corpus_report(corpus_dir=None) -> dict:
    """Run the corpus invariants; raises CorpusIntegrityError on checksum failure."""
    manifest = corpus8.verify_checksums(corpus_dir)
    checks = []
    reps = {name: corpus8.load_named(name, corpus_dir).rep for name in corpus8.NAMES}
    l, m = corpus8.canonical_peripheral_words(corpus_dir)
    pres = corpus8.presentation_fig8()
    for name, rep in reps.items():
        _check(checks, f"{name}: relator residual", relator_residual(rep) < 1e-12, residual=relator_residual(rep))
    for name, rep in reps.items():
        L, M = evaluate(rep, l), evaluate(rep, m)
        regular = {"l": is_regular(L), "m": is_regular(M)}
        proj_unip = is_projectively_unipotent(L) and is_projectively_unipotent(M)
        unique_flag = False
        if regular["m"] or regular["l"]:
            first, second = (M, L) if regular["m"] else (L, M)
            unique_flag = len(common_flags(first, second)) == 1
        _check(
            checks,
            f"{name}: peripheral representation regular unipotent",
            proj_unip and unique_flag,
            unipotent_regular_l=is_unipotent_regular(L),
            unipotent_regular_m=is_unipotent_regular(M),
            regular_l=regular["l"],
            regular_m=regular["m"],
            unique_invariant_flag=unique_flag,
        )
    lifted = lift_rep(reps["geom2"], 3)
    diff = max(float(np.abs(a - b).max()) for a, b in zip(lifted.images, reps["geom3"].images))
    _check(checks, "geom3 equals r_3(geom2)", diff == 0.0, max_entry_difference=diff)
    _check(
        checks,
        "geom2: generator images parabolic (trace 2)",
        all(abs(np.trace(g) - 2) < 1e-12 for g in reps["geom2"].images),
        traces=[complex_to_json(np.trace(g)) for g in reps["geom2"].images],
    )
    A, B = evaluate(reps["geom2"], l), evaluate(reps["geom2"], m)
    comm = projective_distance(A @ B, B @ A)
    _check(checks, "canonical longitude commutes with meridian (geom2)", comm < 1e-10, residual=comm)
    exps = abelianized_exponents(l, pres.ngens)
    _check(checks, "canonical longitude is null-homologous", int(exps.sum()) == 0, exponents=exps.tolist())
    wl, wm, power = corpus8.witness_pair("rho2", corpus_dir)
    rho2 = reps["rho2"]
    rel = projective_distance(evaluate(rho2, wl), np.linalg.matrix_power(evaluate(rho2, wm), power))
    canonical_power = is_scalar_power(evaluate(rho2, l), evaluate(rho2, m), 12, 1e-8)
    _check(
        checks,
        "rho2: l' = m^5 for the witnessing pair",
        rel < 1e-8,
        residual=rel,
        longitude=pres.format(wl),
        canonical_longitude_power=canonical_power,
    )
    for name in ("geom2", "geom3"):
        rep = reps[name]
        prob = DeformationProblem.at(rep, l, m)
        rc = rank_check(rep, prob.gauge)
        _check(
            checks,
            f"{name}: deformation space dimension n-1",
            rc.nullity == rep.n - 1,
            nullity=rc.nullity,
            gap=rc.singular_value_gap,
        )
    return {
        "ok": all(c["ok"] for c in checks),
        "corpus_version": manifest.get("version"),
        "rho2_relation_residual": rel,
        "checks": checks,
    }


def cmd_check_corpus(args) -> int:
    try:
        report = corpus_report(args.corpus_dir)
    except CorpusIntegrityError as exc:
        print(f"corpus integrity failure: {exc}", file=sys.stderr)
        if args.json:
            _write_json(args.json, {"ok": False, "integrity_error": str(exc)})
        return EXIT_INTEGRITY
    for c in report["checks"]:
        extras = ", ".join(f"{k}={v}" for k, v in c.items() if k not in ("name", "ok"))
        print(f"[{'PASS' if c['ok'] else 'FAIL'}] {c['name']}" + (f"  ({extras})" if extras else ""))
    print(f"rho2 relation residual: {report['rho2_relation_residual']:.3e}")
    print("all checks passed" if report["ok"] else "some checks FAILED")
    if args.json:
        _write_json(args.json, report)
    return EXIT_OK if report["ok"] else EXIT_COMPUTE


def _write_json(dest, doc):
    text = json.dumps(doc, indent=1, default=_json_default) + "\n"
    if dest == "-":
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text)


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (complex, np.complexfloating)):
        return complex_to_json(o)
    if isinstance(o, np.ndarray):
        return o.tolist() if o.dtype.kind != "c" else [complex_to_json(z) for z in o.ravel()]
    raise TypeError(f"not serializable: {type(o)}")


# ---------------------------------------------------------------- scan


@dataclass
class ScanConfig:
    center: str
    mode: str
    radius: float = 0.1
    samples: int = 41
    pairs: object = "all"
    seed: int = 0
    output: str = "-"
    t_values: list = field(default_factory=lambda: [0.02, 0.01, 0.005])
    base: list | None = None
    dir1: list | None = None
    dir2: list | None = None
    residual_tol: float = 1e-12
    corpus_dir: str | None = None
    longitude: str | None = None
    meridian: str | None = None

    def validate(self, r: int):
        if self.mode not in MODES:
            raise UsageError(f"unknown mode {self.mode!r}")
        if not 0 < self.radius <= MAX_RADIUS:
            raise UsageError(f"radius must lie in (0, {MAX_RADIUS}]")
        if self.samples < 1:
            raise UsageError("samples must be >= 1")
        for name in ("base", "dir1", "dir2"):
            v = getattr(self, name)
            if v is not None and len(v) != r:
                raise UsageError(f"--{name} needs {r} entries")
        if self.pairs != "all" and any(h > r for _, h in self.pairs):
            raise UsageError(f"pair index exceeds n-1 = {r}")


def default_slice(r: int):
    d1 = np.array([1.0] + [0.5j] * (r - 1), dtype=np.complex128)
    d2 = np.array([0.7j] * (r - 1) + [1.0], dtype=np.complex128) if r > 1 else np.array([0.7j])
    return np.zeros(r, dtype=np.complex128), d1, d2


def ray_32_target(t: float, r: int):
    z = (1 + t) * np.exp(1j * t)
    return np.array([z if k % 2 == 0 else np.conj(z) for k in range(r)])


def scan_samples(cfg: ScanConfig, r: int):
    """List of (target L-vector, meta dict) in sample order."""
    rng = np.random.default_rng(cfg.seed)
    out = []
    if cfg.mode == "grid":
        base, d1, d2 = default_slice(r)
        base = np.asarray(cfg.base if cfg.base is not None else base, dtype=np.complex128)
        d1 = np.asarray(cfg.dir1 if cfg.dir1 is not None else d1, dtype=np.complex128)
        d2 = np.asarray(cfg.dir2 if cfg.dir2 is not None else d2, dtype=np.complex128)
        axis = np.linspace(-cfg.radius, cfg.radius, cfg.samples) if cfg.samples > 1 else np.zeros(1)
        for a in axis:
            for b in axis:
                out.append((np.exp(base + a * d1 + b * d2), {"a": float(a), "b": float(b)}))
    elif cfg.mode == "ray_32":
        for t in cfg.t_values:
            out.append((ray_32_target(t, r), {"t": t}))
    elif cfg.mode == "single_entry_33":
        for t in cfg.t_values:
            for k in range(r):
                v = np.ones(r, dtype=np.complex128)
                v[k] = (1 + t) * np.exp(1j * t)
                out.append((v, {"t": t, "k": k + 1}))
    else:
        for _ in range(cfg.samples):
            z = rng.normal(size=r) + 1j * rng.normal(size=r)
            scale = cfg.radius * rng.uniform(0.2, 1.0)
            out.append((np.exp(scale * z / np.abs(z).max()), {}))
    return out


_WORKER = {}


def _worker_init(center, corpus_dir, longitude, meridian, residual_tol):
    rep = _load_center(center, corpus_dir)
    ns = argparse.Namespace(corpus_dir=corpus_dir, longitude=longitude, meridian=meridian)
    l, m = _peripheral_words(rep, ns)
    _WORKER["prob"] = DeformationProblem.at(rep, l, m, config=SolverConfig(residual_tol=residual_tol))
    _WORKER["extra"] = None
    if center == "rho2":
        wl, wm, power = corpus8.witness_pair("rho2", corpus_dir)
        _WORKER["extra"] = (wl, wm, power)


def _solve_point(target):
    prob = _WORKER["prob"]
    result = {"status": "ok", "L": None, "M": None, "residual": np.nan, "relation_residual": None}
    try:
        try:
            res = solve_to_target(prob.with_target(target))
        except (NonConvergenceError, RamificationError):
            steps = max(1, int(np.ceil(np.abs(np.log(target)).max() / 0.02)))
            res = continuation_path(prob, ray_targets(target, steps))[-1]
    except DomainError:
        result["status"] = "domain_error"
        return result
    except ContinuationError:
        result["status"] = "continuation_failed"
        return result
    except RamificationError:
        result["status"] = "ramification"
        return result
    except NonConvergenceError:
        result["status"] = "nonconvergence"
        return result
    except PeriphError as exc:
        result["status"] = type(exc).__name__
        return result
    result.update(L=res.holonomy.L, M=res.holonomy.M, residual=res.residual)
    if np.abs(res.holonomy.L - target).max() > 1e2 * prob.config.residual_tol:
        result["status"] = "target_mismatch"
    if _WORKER["extra"] is not None:
        wl, wm, power = _WORKER["extra"]
        W = evaluate(res.rep, wl)
        result["relation_residual"] = projective_distance(W, np.linalg.matrix_power(evaluate(res.rep, wm), power))
    return result


def _pair_list(pairs, r):
    if pairs == "all":
        return [(k, h) for k in range(1, r + 1) for h in range(k + 1, r + 1)]
    return list(pairs)


def run_scan(cfg: ScanConfig, workers: int | None = None):
    """Solve every sample; returns (header, rows, per-sample results, samples)."""
    rep = _load_center(cfg.center, cfg.corpus_dir)
    r = rep.n - 1
    cfg.validate(r)
    samples = scan_samples(cfg, r)
    init = (cfg.center, cfg.corpus_dir, cfg.longitude, cfg.meridian, cfg.residual_tol)
    targets = [s[0] for s in samples]
    workers = workers or _threads()
    if workers <= 1 or len(targets) < 2:
        _worker_init(*init)
        results = [_solve_point(t) for t in targets]
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_worker_init, initargs=init) as ex:
            results = list(ex.map(_solve_point, targets, chunksize=max(1, len(targets) // (4 * workers))))
    pairs = _pair_list(cfg.pairs, r)
    header = ["sample_index", "status"]
    for k in range(1, r + 1):
        header += [f"target_L{k}_re", f"target_L{k}_im", f"L{k}_re", f"L{k}_im", f"M{k}_re", f"M{k}_im"]
    header += [f"delta_{k}_{h}" for k, h in pairs] + ["verdict", "residual"]
    rows = []
    for idx, (target, res) in enumerate(zip(targets, results)):
        row = [str(idx), res["status"]]
        ok = res["L"] is not None
        verdict = None
        if ok:
            verdict = classify(_Hol(res["L"], res["M"]))
            res["verdict"] = verdict
        for k in range(r):
            row += [_fmt(target[k].real), _fmt(target[k].imag)]
            if ok:
                row += [_fmt(res["L"][k].real), _fmt(res["L"][k].imag), _fmt(res["M"][k].real), _fmt(res["M"][k].imag)]
            else:
                row += ["nan"] * 4
        for k, h in pairs:
            row.append(_fmt(verdict.minors[k - 1, h - 1]) if ok else "nan")
        row.append(verdict.verdict.value if ok else "")
        row.append(_fmt(res["residual"]))
        rows.append(row)
    return header, rows, results, samples


@dataclass
class _Hol:
    L: np.ndarray
    M: np.ndarray


def quadratic_fit(samples, results, pair=(1, 2)):
    """Least-squares fit Delta ~ c_aa a^2 + c_ab a b + c_bb b^2 over the grid.

    A positive discriminant ``c_ab^2 - 4 c_aa c_bb`` means the zero set of
    the quadratic part is a pair of real lines through the origin (the
    isotropic cone of the form).
    """
    A, y = [], []
    for (_, meta), res in zip(samples, results):
        if res["L"] is None or "a" not in meta:
            continue
        a, b = meta["a"], meta["b"]
        A.append([a * a, a * b, b * b])
        y.append(res["verdict"].minors[pair[0] - 1, pair[1] - 1])
    if len(y) < 3:
        return None
    A, y = np.array(A), np.array(y)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    fit = A @ coef
    rel = float(np.linalg.norm(fit - y) / max(np.linalg.norm(y), 1e-300))
    disc = float(coef[1] ** 2 - 4 * coef[0] * coef[2])
    return {"c_aa": float(coef[0]), "c_ab": float(coef[1]), "c_bb": float(coef[2]), "discriminant": disc,
            "relative_fit_error": rel}


def scan_diagnostics(cfg: ScanConfig, results, samples, rep_n: int):
    diag = {"mode": cfg.mode, "samples": len(results)}
    statuses = [r["status"] for r in results]
    diag["ok"] = statuses.count("ok")
    diag["failed"] = len(statuses) - diag["ok"]
    verdicts = [r["verdict"].verdict for r in results if r["L"] is not None]
    if verdicts:
        diag["fraction_sufficient"] = sum(v is Verdict.SUFFICIENT_DISCRETE_FAITHFUL for v in verdicts) / len(results)
    if cfg.mode == "grid" and rep_n >= 3:
        diag["quadratic_fit"] = quadratic_fit(samples, results)
        bad = [(m["a"], m["b"]) for (_, m), r in zip(samples, results)
               if r["L"] is None or r["verdict"].verdict is Verdict.INCONCLUSIVE]
        diag["inconclusive_points"] = bad
    if cfg.mode == "ray_32" and rep_n >= 3:
        mu = _center_mu(cfg)
        diag["mu"] = complex_to_json(mu)
        ratios = []
        for (target, meta), r in zip(samples, results):
            if r["L"] is None:
                ratios.append(None)
                continue
            pred = delta_leading_order(target, mu)[0, 1]
            ratios.append({"t": meta["t"], "delta": float(r["verdict"].minors[0, 1]), "predicted": float(pred),
                           "ratio": float(r["verdict"].minors[0, 1] / pred)})
        diag["leading_order"] = ratios
    if cfg.mode == "rho2_persistence":
        rel = [r["relation_residual"] for r in results if r["L"] is not None]
        diag["max_relation_residual"] = max(rel) if rel else None
        deltas = [float(np.abs(r["verdict"].minors).max()) for r in results if r["L"] is not None]
        diag["max_abs_delta"] = max(deltas) if deltas else None
    return diag


def _center_mu(cfg: ScanConfig) -> complex:
    rep = _load_center(cfg.center, cfg.corpus_dir)
    ns = argparse.Namespace(corpus_dir=cfg.corpus_dir, longitude=cfg.longitude, meridian=cfg.meridian)
    l, m = _peripheral_words(rep, ns)
    prob = DeformationProblem.at(rep, l, m)
    return tau_estimate(prob, np.ones(rep.n - 1)).mu


def cmd_scan(args) -> int:
    cfg = ScanConfig(
        center=args.center or ("rho2" if args.mode == "rho2_persistence" else "geom3"),
        mode=args.mode,
        radius=args.radius if args.radius is not None else (0.03 if args.mode == "rho2_persistence" else 0.1),
        samples=args.samples if args.samples is not None else (41 if args.mode == "grid" else 20),
        pairs=args.pairs,
        seed=args.seed,
        output=args.output,
        t_values=args.t if args.t is not None else ([0.01] if args.mode == "single_entry_33" else [0.02, 0.01, 0.005]),
        base=args.base,
        dir1=args.dir1,
        dir2=args.dir2,
        residual_tol=args.residual_tol,
        corpus_dir=args.corpus_dir,
        longitude=args.longitude,
        meridian=args.meridian,
    )
    header, rows, results, samples = run_scan(cfg)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if cfg.output == "-":
        sys.stdout.write(buf.getvalue())
    else:
        Path(cfg.output).write_text(buf.getvalue())
    rep_n = len([h for h in header if h.startswith("target_L") and h.endswith("_re")]) + 1
    diag = scan_diagnostics(cfg, results, samples, rep_n)
    if args.diagnostics:
        _write_json(args.diagnostics, diag)
    print(f"scan {cfg.mode}: {diag['ok']} of {diag['samples']} samples converged", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------- tau / solve / lift / periph


def cmd_tau(args) -> int:
    rep = _load_center(args.center, args.corpus_dir)
    l, m = _peripheral_words(rep, args)
    direction = args.direction if args.direction is not None else [1.0] * (rep.n - 1)
    prob = DeformationProblem.at(rep, l, m, config=SolverConfig(residual_tol=args.residual_tol))
    est = tau_estimate(prob, direction, args.steps)
    r = rep.n - 1
    print("step        " + "  ".join(f"{'tau_' + str(k + 1):>30}" for k in range(r)))
    for s, row in zip(est.steps, est.tau):
        print(f"{s:<10.4g}  " + "  ".join(f"{z.real:+.12f}{z.imag:+.12f}j" for z in row))
    print("limit       " + "  ".join(f"{z.real:+.12f}{z.imag:+.12f}j" for z in est.limit))
    print("uncertainty " + "  ".join(f"{u:30.3e}" for u in est.uncertainty))
    print(f"mu = {est.mu.real:+.12f}{est.mu.imag:+.12f}j  (Im mu {'!=' if abs(est.mu.imag) > 0.05 else '~'} 0)")
    report = {
        "steps": est.steps.tolist(),
        "tau": [[complex_to_json(z) for z in row] for row in est.tau],
        "limit": [complex_to_json(z) for z in est.limit],
        "uncertainty": est.uncertainty.tolist(),
        "mu": complex_to_json(est.mu),
    }
    if args.oracle:
        from .defsolve import cusp_modulus, pgl2_tau_oracle

        geom2 = corpus8.load_named("geom2", args.corpus_dir).rep
        oracle = pgl2_tau_oracle(geom2, l, m, steps=args.steps)
        closed = cusp_modulus(geom2, l, m)
        print(f"PGL(2) oracle mu = {oracle.mu.real:+.12f}{oracle.mu.imag:+.12f}j; "
              f"cusp translation ratio = {closed.real:+.12f}{closed.imag:+.12f}j; "
              f"|mu - oracle| = {abs(est.mu - oracle.mu):.3e}")
        report["oracle_mu"] = complex_to_json(oracle.mu)
        report["cusp_modulus"] = complex_to_json(closed)
    if args.json:
        _write_json(args.json, report)
    return EXIT_OK


def cmd_solve(args) -> int:
    rep = _load_center(args.center, args.corpus_dir)
    l, m = _peripheral_words(rep, args)
    trace_fh = open(args.trace, "w") if args.trace else None
    try:
        cfg = SolverConfig(residual_tol=args.residual_tol, trace=jsonl_trace(trace_fh) if trace_fh else None)
        prob = DeformationProblem.at(rep, l, m, target=args.target, config=cfg)
        steps = max(1, int(np.ceil(np.abs(np.log(prob.target_L)).max() / 0.05)))
        res = continuation_path(prob, ray_targets(prob.target_L, steps))[-1]
    finally:
        if trace_fh:
            trace_fh.close()
    extra = {
        "decoration": decoration_to_json(res.decoration),
        "peripheral": {"longitude": rep.presentation.format(l), "meridian": rep.presentation.format(m)},
        "holonomy": {"L": [complex_to_json(z) for z in res.holonomy.L],
                     "M": [complex_to_json(z) for z in res.holonomy.M]},
        "residual": res.residual,
    }
    dump_representation(res.rep, args.output, **extra)
    print(f"solved to residual {res.residual:.3e}; wrote {args.output}")
    return EXIT_OK


def cmd_lift(args) -> int:
    rep = _load_center(args.input, args.corpus_dir)
    if rep.n != 2:
        raise UsageError("lift expects a representation into SL(2,C)")
    lifted = lift_rep(rep, args.n)
    dump_representation(lifted, args.output)
    print(f"wrote r_{args.n} lift to {args.output}")
    return EXIT_OK


def peripheral_report(rep, l, m, decoration=None) -> dict:
    A, B = evaluate(rep, l), evaluate(rep, m)
    if decoration is None:
        first, second = (B, A) if is_regular(B, rep.tol) else (A, B)
        flags = common_flags(first, second, rep.tol)
        decoration = select_decoration(flags, Flag.standard(rep.n), (A, B), rep.tol)
    dec = decorate(decoration.flag, A, B, rep.tol)
    hol = dec.holonomy()
    v = classify(hol)
    return {
        "L": [complex_to_json(z) for z in hol.L],
        "M": [complex_to_json(z) for z in hol.M],
        "minors": v.minors.tolist(),
        "verdict": v.verdict.value,
        "witness": v.witness,
        "tol": v.tol,
    }


def cmd_periph(args) -> int:
    if args.input in corpus8.NAMES:
        rep = corpus8.load_named(args.input, args.corpus_dir).rep
        doc = {}
    else:
        path = Path(args.input)
        if not path.exists():
            raise UsageError(f"{args.input!r} is neither a corpus name nor a file")
        rep = load_representation(path)
        doc = json.loads(path.read_text())
    l, m = _peripheral_words(rep, args)
    if "peripheral" in doc and not (args.longitude or args.meridian):
        l = rep.presentation.word(doc["peripheral"]["longitude"])
        m = rep.presentation.word(doc["peripheral"]["meridian"])
    dec = decoration_from_json(doc["decoration"]) if "decoration" in doc else None
    report = peripheral_report(rep, l, m, dec)
    fmt = lambda zs: ", ".join(f"{a:+.12g}{b:+.12g}j" for a, b in zs)  # noqa: E731
    print(f"L = ({fmt(report['L'])})")
    print(f"M = ({fmt(report['M'])})")
    print(f"verdict: {report['verdict']}" + (f" (witness {tuple(report['witness'])})" if report["witness"] else ""))
    if args.json:
        _write_json(args.json, report)
    return EXIT_OK


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="periph", description="Peripheral holonomy deformations near unipotent representations.")
    p.add_argument("--corpus-dir", default=None, help="alternative corpus data directory")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def words(sp):
        sp.add_argument("--longitude", help="longitude word (default: corpus canonical)")
        sp.add_argument("--meridian", help="meridian word (default: corpus canonical)")

    c = sub.add_parser("check-corpus", help="verify corpus checksums and invariants")
    c.add_argument("--json", help="write the machine-readable report here ('-' for stdout)")
    c.set_defaults(func=cmd_check_corpus)

    s = sub.add_parser("scan", help="solve a family of deformations and write CSV")
    s.add_argument("--mode", choices=MODES, required=True)
    s.add_argument("--center", help="corpus name or representation JSON (default geom3, rho2 for rho2_persistence)")
    s.add_argument("--radius", type=float)
    s.add_argument("--samples", type=int, help="points per axis (grid) or number of random samples")
    s.add_argument("--pairs", type=_pairs, default="all", help="'all' or 'k,h;k,h'")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--t", type=_float_list, help="t values for ray_32 / single_entry_33")
    s.add_argument("--base", type=_complex_list, help="grid slice base point in log coordinates")
    s.add_argument("--dir1", type=_complex_list, help="first grid direction in log coordinates")
    s.add_argument("--dir2", type=_complex_list, help="second grid direction in log coordinates")
    s.add_argument("--residual-tol", type=float, default=1e-12)
    s.add_argument("--diagnostics", help="write a JSON diagnostics report here")
    s.add_argument("-o", "--output", default="-")
    words(s)
    s.set_defaults(func=cmd_scan)

    t = sub.add_parser("tau", help="estimate the slopes tau_k and their limit")
    t.add_argument("--center", default="geom3")
    t.add_argument("--direction", type=_complex_list)
    t.add_argument("--steps", type=_float_list, default=[0.04, 0.02, 0.01, 0.005])
    t.add_argument("--residual-tol", type=float, default=1e-12)
    t.add_argument("--oracle", action="store_true", help="compare with the SL(2) oracle on geom2")
    t.add_argument("--json")
    words(t)
    t.set_defaults(func=cmd_tau)

    v = sub.add_parser("solve", help="solve to a target L-vector and write the representation")
    v.add_argument("--center", default="geom3")
    v.add_argument("--target", type=_complex_list, required=True)
    v.add_argument("--residual-tol", type=float, default=1e-12)
    v.add_argument("--trace", help="write solver iterations as JSON lines")
    v.add_argument("-o", "--output", required=True)
    words(v)
    v.set_defaults(func=cmd_solve)

    li = sub.add_parser("lift", help="apply r_n to an SL(2) representation")
    li.add_argument("input", help="corpus name or representation JSON")
    li.add_argument("-n", type=int, default=3)
    li.add_argument("-o", "--output", required=True)
    li.set_defaults(func=cmd_lift)

    pe = sub.add_parser("periph", help="peripheral holonomy and discreteness verdict")
    pe.add_argument("input", help="corpus name or representation JSON")
    pe.add_argument("--json")
    words(pe)
    pe.set_defaults(func=cmd_periph)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help exits 0, argument errors exit EXIT_USAGE
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"periph: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CorpusIntegrityError as exc:
        print(f"periph: corpus integrity failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (PeriphError, np.linalg.LinAlgError) as exc:
        print(f"periph: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except (ValueError, KeyError, OSError) as exc:
        # JSON / word parse errors, validation failures, unreadable files
        print(f"periph: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

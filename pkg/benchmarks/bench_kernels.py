"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from periph import _kernels_py, corpus8
from periph.fpgroup import _slots

try:
    from periph import _ckernels
except ImportError:
    _ckernels = None


def cases():
    rep = corpus8.load_named("geom3").rep
    l, m = corpus8.canonical_peripheral_words()
    rng = np.random.default_rng(0)
    # batch of perturbed generator stacks, as in a finite-difference Jacobian
    batch = rep.slot_matrices[None] + 1e-3 * rng.normal(size=(64,) + rep.slot_matrices.shape)
    batch = batch.astype(np.complex128)
    slots = _slots(l * m * l.inverse())
    u, w = rng.normal(size=2), rng.normal(size=2)
    M = rep[m]
    Minv = np.linalg.inv(M)
    S = rep.slot_matrices.shape[0]
    inverse_slot = np.array([s ^ 1 for s in range(S)], dtype=np.int_)
    forbid = np.zeros(S, dtype=np.uint8)
    forbid[0] = forbid[1] = 1
    return {
        "word_product (64 x len 18)": lambda k: k.word_product(batch, slots),
        "lattice_min (N=50)": lambda k: k.lattice_min(u, w, 50),
        "commuting_words (len 6)": lambda k: k.commuting_words(
            rep.slot_matrices, inverse_slot, M, Minv, 6, 1e-8, forbid, forbid
        ),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    impls = [("python", _kernels_py)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'kernel':<30}" + "".join(f"{name:>14}" for name, _ in impls) + ("   speedup" if _ckernels else ""))
    for label, fn in cases().items():
        times = []
        for _, mod in impls:
            number = max(1, int(0.2 / max(timeit.timeit(lambda: fn(mod), number=1), 1e-6)))
            best = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
            times.append(best)
        line = f"{label:<30}" + "".join(f"{t * 1e3:>12.3f}ms" for t in times)
        if len(times) == 2:
            line += f"   {times[0] / times[1]:7.1f}x"
        print(line)
    if _ckernels is None:
        print("compiled extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()

"""Pure-Python/numpy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_ckernels`` module; used
when the extension is not built or ``PERIPH_PURE=1`` is set.
"""
import numpy as np


def word_product(mats, slots):
    """Ordered products ``mats[b, slots[0]] @ mats[b, slots[1]] @ ...``.

    ``mats`` has shape (B, S, n, n); returns an array of shape (B, n, n).
    An empty slot sequence gives identities.
    """
    mats = np.asarray(mats, dtype=np.complex128)
    B, _, n, _ = mats.shape
    out = np.broadcast_to(np.eye(n, dtype=np.complex128), (B, n, n)).copy()
    for s in slots:
        out = out @ mats[:, s]
    return out


def lattice_min(u, w, N):
    """Brute-force min of ``max_k |p u_k + q w_k|`` over 0 < max(|p|,|q|) <= N.

    Returns ``(value, p, q)``; ties resolve to the first pair in the scan
    order p = -N..N, q = -N..N.
    """
    u = np.asarray(u, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    r = np.arange(-N, N + 1)
    P, Q = np.meshgrid(r, r, indexing="ij")
    vals = np.abs(P[..., None] * u + Q[..., None] * w).max(axis=-1)
    vals[N, N] = np.inf
    idx = np.unravel_index(np.argmin(vals), vals.shape)
    return float(vals[idx]), int(P[idx]), int(Q[idx])


def _proj_commutator_dist(W, Winv, M, Minv, roots):
    C = W @ M @ Winv @ Minv
    n = C.shape[0]
    eye = np.eye(n)
    return min(np.abs(z * C - eye).max() for z in roots)


def commuting_words(mats, inverse_slot, M, Minv, max_len, tol, forbid_first, forbid_last):
    """Depth-first enumeration of freely reduced slot words commuting with M.

    ``mats`` (S, n, n) holds generator images and their inverses;
    ``inverse_slot[s]`` is the slot of the inverse letter.  A word is
    reported when its image W satisfies ``min_z |z W M W^-1 M^-1 - I| < tol``
    over n-th roots of unity z.  Words starting with a slot in
    ``forbid_first`` are not explored; words ending with a slot in
    ``forbid_last`` are explored but not reported.
    """
    mats = np.asarray(mats, dtype=np.complex128)
    S, n, _ = mats.shape
    roots = np.exp(2j * np.pi * np.arange(n) / n)
    found = []
    word = []

    def visit(W, Winv):
        if word and not forbid_last[word[-1]]:
            scale = 1.0 + np.abs(W).max() * np.abs(Winv).max()
            if _proj_commutator_dist(W, Winv, M, Minv, roots) < tol * scale:
                found.append(tuple(word))
        if len(word) == max_len:
            return
        for s in range(S):
            if not word and forbid_first[s]:
                continue
            if word and inverse_slot[s] == word[-1]:
                continue
            word.append(s)
            visit(W @ mats[s], mats[inverse_slot[s]] @ Winv)
            word.pop()

    eye = np.eye(n, dtype=np.complex128)
    visit(eye, eye)
    return found

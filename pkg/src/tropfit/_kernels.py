"""Hot inner loop of the nearest-point projection.

The projection of a batch of points reduces to, per point u,

    c(tau)  = min_j  u_j - P1[tau, j]        (+inf when P1 is -inf)
    w_i     = max_tau  P1[tau, i] + c(tau)   (tau skipped when either side
                                              is infinite)

over the (m-1)-subset table P1.  The numba kernel below evaluates this with
scalar IEEE arithmetic; the numpy fallback reproduces the same values (min and
max are order-independent, so the two paths agree bitwise).  Both are
single-threaded per call, keeping results independent of any outer threading.
"""

from __future__ import annotations

import numpy as np

try:
    import numba

    @numba.njit(cache=True, fastmath=False)
    def _blue_numba(U: np.ndarray, P1: np.ndarray, out: np.ndarray) -> None:
        B, d = U.shape
        K1 = P1.shape[0]
        for b in range(B):
            for i in range(d):
                out[b, i] = -np.inf
            for t in range(K1):
                c = np.inf
                for j in range(d):
                    v = U[b, j] - P1[t, j]
                    if v < c:
                        c = v
                if c == np.inf:
                    continue
                for i in range(d):
                    p = P1[t, i]
                    if p > -np.inf:
                        v = p + c
                        if v > out[b, i]:
                            out[b, i] = v

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    HAVE_NUMBA = False


def blue_numpy(U: np.ndarray, P1: np.ndarray, out: np.ndarray, chunk_elems: float = 1.6e7) -> None:
    """Vectorized reference path; writes raw projections into ``out``."""
    K1, d = P1.shape
    p_finite = np.isfinite(P1)
    all_finite = bool(p_finite.all())
    chunk = max(1, int(chunk_elems // max(1, K1 * d)))
    buf = np.empty((chunk, K1, d))
    for start in range(0, U.shape[0], chunk):
        u = U[start : start + chunk]
        b = u.shape[0]
        view = buf[:b]
        np.subtract(u[:, None, :], P1[None, :, :], out=view)
        cmin = view.min(axis=2)
        if all_finite:
            np.add(P1[None, :, :], cmin[:, :, None], out=view)
        else:
            with np.errstate(invalid="ignore"):
                np.add(P1[None, :, :], cmin[:, :, None], out=view)
            invalid = ~(p_finite[None, :, :] & np.isfinite(cmin)[:, :, None])
            view[invalid] = -np.inf
        np.max(view, axis=1, out=out[start : start + b])


def blue_batch_raw(U: np.ndarray, P1: np.ndarray) -> np.ndarray:
    """Raw (non-canonical) projections of the rows of U; -inf flags degeneracy."""
    out = np.empty_like(U)
    if HAVE_NUMBA:
        _blue_numba(np.ascontiguousarray(U), np.ascontiguousarray(P1), out)
    else:
        blue_numpy(U, P1, out)
    return out

"""Hot numeric inner loops: edit distance, word-diff matching, best-response iteration.

Two interchangeable backends produce identical results:

* ``numba`` -- nopython-compiled nested loops (default when numba imports),
* ``numpy`` -- vectorized sweeps over DP rows / iteration vectors.

Set the environment variable ``EDITGAME_NO_NUMBA=1`` before import to force
the numpy backend.  ``benchmarks/bench_kernels.py`` times both side by side.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "EDITGAME_NO_NUMBA"


def _numba_disabled() -> bool:
    return os.environ.get(_ENV_FLAG, "").strip().lower() not in ("", "0", "false", "no")


HAS_NUMBA = False
if not _numba_disabled():
    try:
        from numba import njit

        HAS_NUMBA = True
    except ImportError:  # pragma: no cover - exercised via the env flag instead
        HAS_NUMBA = False

BACKEND = "numba" if HAS_NUMBA else "numpy"


def codepoints(s: str) -> np.ndarray:
    """Unicode scalar values of ``s`` as an int64 array."""
    if not s:
        return np.empty(0, dtype=np.int64)
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32).astype(np.int64)


def _strip_common_affixes(a: np.ndarray, b: np.ndarray) -> tuple[int, int, np.ndarray, np.ndarray]:
    """Longest common prefix/suffix lengths plus the remaining middles.

    Matching a shared prefix or suffix outright never changes the edit
    distance and always extends to some longest common subsequence, so both
    kernels run only on the middle slices.
    """
    na, nb = a.size, b.size
    lim = min(na, nb)
    if lim == 0:
        return 0, 0, a, b
    neq = np.nonzero(a[:lim] != b[:lim])[0]
    pre = int(neq[0]) if neq.size else lim
    ta, tb = a[pre:], b[pre:]
    lim = min(ta.size, tb.size)
    if lim:
        neq = np.nonzero(ta[::-1][:lim] != tb[::-1][:lim])[0]
        suf = int(neq[0]) if neq.size else lim
    else:
        suf = 0
    if suf:
        ta, tb = ta[:-suf], tb[:-suf]
    return pre, suf, ta, tb


# ---------------------------------------------------------------------------
# Levenshtein distance (unit-cost insert/delete/substitute)
# ---------------------------------------------------------------------------


def _levenshtein_numpy(a: np.ndarray, b: np.ndarray) -> int:
    n, m = a.size, b.size
    if n == 0:
        return m
    if m == 0:
        return n
    prev = np.arange(m + 1, dtype=np.int64)
    offs = np.arange(1, m + 1, dtype=np.int64)
    run = np.empty(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        cand = np.minimum(prev[:-1] + (b != a[i - 1]), prev[1:] + 1)
        # Unroll cur[j] = min(cand[j], cur[j-1] + 1) as a running minimum of
        # cand[k] - k, then add j back.
        run[0] = i
        np.subtract(cand, offs, out=run[1:])
        np.minimum.accumulate(run, out=run)
        prev[0] = i
        np.add(run[1:], offs, out=prev[1:])
    return int(prev[m])


if HAS_NUMBA:

    @njit(cache=True)
    def _levenshtein_numba(a, b):  # pragma: no cover - numba-compiled
        n = a.size
        m = b.size
        if n == 0:
            return m
        if m == 0:
            return n
        prev = np.arange(m + 1)
        cur = np.empty(m + 1, dtype=np.int64)
        for i in range(1, n + 1):
            cur[0] = i
            ai = a[i - 1]
            for j in range(1, m + 1):
                v = prev[j - 1]
                if b[j - 1] != ai:
                    v += 1
                if prev[j] + 1 < v:
                    v = prev[j] + 1
                if cur[j - 1] + 1 < v:
                    v = cur[j - 1] + 1
                cur[j] = v
            for j in range(m + 1):
                prev[j] = cur[j]
        return prev[m]


def levenshtein_codes(a: np.ndarray, b: np.ndarray) -> int:
    """Edit distance between two code/id sequences."""
    _, _, ta, tb = _strip_common_affixes(a, b)
    if ta.size == 0:
        return int(tb.size)
    if tb.size == 0:
        return int(ta.size)
    if HAS_NUMBA:
        return int(_levenshtein_numba(ta, tb))
    return _levenshtein_numpy(ta, tb)


# ---------------------------------------------------------------------------
# Longest-common-subsequence matching over token id sequences
# ---------------------------------------------------------------------------
#
# The table is a *suffix* LCS table (dp[i, j] = LCS of a[i:], b[j:]) so the
# matching can be recovered by a forward walk that always takes the earliest
# available match; ties between skip moves advance the old sequence first.
# On an append-only edit (a is a prefix of b) this yields the identity
# matching.


def _lcs_table_numpy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, m = a.size, b.size
    dp = np.zeros((n + 1, m + 1), dtype=np.int32)
    for i in range(n - 1, -1, -1):
        base = np.maximum(dp[i + 1, :-1], dp[i + 1, 1:] + (b == a[i]))
        dp[i, :-1] = np.maximum.accumulate(base[::-1])[::-1]
    return dp


if HAS_NUMBA:

    @njit(cache=True)
    def _lcs_table_numba(a, b):  # pragma: no cover - numba-compiled
        n = a.size
        m = b.size
        dp = np.zeros((n + 1, m + 1), dtype=np.int32)
        for i in range(n - 1, -1, -1):
            ai = a[i]
            for j in range(m - 1, -1, -1):
                if ai == b[j]:
                    dp[i, j] = dp[i + 1, j + 1] + 1
                elif dp[i + 1, j] >= dp[i, j + 1]:
                    dp[i, j] = dp[i + 1, j]
                else:
                    dp[i, j] = dp[i, j + 1]
        return dp


def lcs_match(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs of one longest common subsequence of ``a`` and ``b``.

    Returns ``(ia, ib)`` with ``a[ia[k]] == b[ib[k]]``, both strictly
    increasing.  Deterministic for fixed inputs regardless of backend.
    """
    pre, suf, ta, tb = _strip_common_affixes(a, b)
    ia = [np.arange(pre, dtype=np.int64)]
    ib = [np.arange(pre, dtype=np.int64)]
    if ta.size and tb.size:
        if HAS_NUMBA:
            dp = _lcs_table_numba(ta, tb)
        else:
            dp = _lcs_table_numpy(ta, tb)
        mi: list[int] = []
        mj: list[int] = []
        i = j = 0
        n, m = ta.size, tb.size
        while i < n and j < m:
            if ta[i] == tb[j]:
                mi.append(i)
                mj.append(j)
                i += 1
                j += 1
            elif dp[i + 1, j] >= dp[i, j + 1]:
                i += 1
            else:
                j += 1
        ia.append(np.asarray(mi, dtype=np.int64) + pre)
        ib.append(np.asarray(mj, dtype=np.int64) + pre)
    if suf:
        ia.append(np.arange(a.size - suf, a.size, dtype=np.int64))
        ib.append(np.arange(b.size - suf, b.size, dtype=np.int64))
    return np.concatenate(ia), np.concatenate(ib)


# ---------------------------------------------------------------------------
# Damped synchronous best-response iteration
# ---------------------------------------------------------------------------


def _br_iterate_numpy(
    a: np.ndarray, x0: np.ndarray, damping: float, tol: float, max_iter: int
) -> tuple[np.ndarray, int, float, bool]:
    x = x0.copy()
    resid = np.inf
    for it in range(max_iter):
        total = x.sum()
        sigma = total - x
        br = np.sqrt(sigma / a) - sigma
        np.maximum(br, 0.0, out=br)
        xn = (1.0 - damping) * x + damping * br
        resid = float(np.abs(xn - x).max())
        x = xn
        if resid < tol:
            return x, it + 1, resid, True
    return x, max_iter, resid, False


if HAS_NUMBA:

    @njit(cache=True)
    def _br_iterate_numba(a, x0, damping, tol, max_iter):  # pragma: no cover
        n = a.size
        x = x0.copy()
        xn = np.empty(n)
        resid = 0.0
        for it in range(max_iter):
            total = 0.0
            for i in range(n):
                total += x[i]
            resid = 0.0
            for i in range(n):
                sigma = total - x[i]
                br = np.sqrt(sigma / a[i]) - sigma
                if br < 0.0:
                    br = 0.0
                v = (1.0 - damping) * x[i] + damping * br
                d = abs(v - x[i])
                if d > resid:
                    resid = d
                xn[i] = v
            for i in range(n):
                x[i] = xn[i]
            if resid < tol:
                return x, it + 1, resid, True
        return x, max_iter, resid, False


def br_iterate(
    a: np.ndarray, x0: np.ndarray, damping: float, tol: float, max_iter: int
) -> tuple[np.ndarray, int, float, bool]:
    """Iterate the damped synchronous best-response map to a fixed point.

    Returns ``(x, iterations, residual, converged)`` where the residual is
    the final max coordinate change.
    """
    if HAS_NUMBA:
        x, it, resid, ok = _br_iterate_numba(a, x0, damping, tol, max_iter)
        return x, int(it), float(resid), bool(ok)
    return _br_iterate_numpy(a, x0, damping, tol, max_iter)


def backends() -> dict[str, dict[str, object]]:
    """Callable kernels per available backend (for tests and benchmarks)."""
    out: dict[str, dict[str, object]] = {
        "numpy": {
            "levenshtein": _levenshtein_numpy,
            "lcs_table": _lcs_table_numpy,
            "br_iterate": _br_iterate_numpy,
        }
    }
    if HAS_NUMBA:
        out["numba"] = {
            "levenshtein": _levenshtein_numba,
            "lcs_table": _lcs_table_numba,
            "br_iterate": _br_iterate_numba,
        }
    return out


def warmup() -> None:
    """Trigger JIT compilation on tiny inputs so timed runs measure steady state."""
    a = np.array([1, 2, 3], dtype=np.int64)
    b = np.array([1, 3], dtype=np.int64)
    levenshtein_codes(a, b)
    lcs_match(a, b)
    br_iterate(np.array([1.0, 2.0]), np.array([0.1, 0.1]), 0.5, 1e-9, 100)

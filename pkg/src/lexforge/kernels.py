"""Hot numeric kernels behind the clustering stage.

Pairwise similarity over context vectors is the one loop that dominates
runtime at scale, so it is numba-jitted by default.  Set
``LEXFORGE_NO_NUMBA=1`` to force the pure-numpy path; ``benchmarks/``
compares both.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("LEXFORGE_NO_NUMBA", "") != "1"
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy implementations


def _rank_rows_np(mat: np.ndarray) -> np.ndarray:
    """Row-wise 1-based ranks with ties mid-ranked."""
    n, d = mat.shape
    out = np.empty((n, d), dtype=np.float64)
    for i in range(n):
        row = mat[i]
        order = np.argsort(row, kind="stable")
        sorted_vals = row[order]
        j = 0
        while j < d:
            k = j
            while k + 1 < d and sorted_vals[k + 1] == sorted_vals[j]:
                k += 1
            avg = (j + k) / 2.0 + 1.0
            out[i, order[j : k + 1]] = avg
            j = k + 1
    return out


def _pairwise_corr_np(rows: np.ndarray) -> np.ndarray:
    centered = rows - rows.mean(axis=1, keepdims=True)
    norms = np.sqrt((centered * centered).sum(axis=1))
    safe = np.where(norms == 0.0, 1.0, norms)
    unit = centered / safe[:, None]
    sim = unit @ unit.T
    degenerate = norms == 0.0
    sim[degenerate, :] = 0.0
    sim[:, degenerate] = 0.0
    np.clip(sim, -1.0, 1.0, out=sim)
    return sim


def _pairwise_cosine_np(rows: np.ndarray) -> np.ndarray:
    norms = np.sqrt((rows * rows).sum(axis=1))
    safe = np.where(norms == 0.0, 1.0, norms)
    unit = rows / safe[:, None]
    sim = unit @ unit.T
    zero = norms == 0.0
    sim[zero, :] = 0.0
    sim[:, zero] = 0.0
    np.clip(sim, -1.0, 1.0, out=sim)
    return sim


# ---------------------------------------------------------------------------
# numba implementations

if USE_NUMBA:

    @njit(cache=False)
    def _rank_rows_nb(mat):
        n, d = mat.shape
        out = np.empty((n, d), dtype=np.float64)
        for i in range(n):
            order = np.argsort(mat[i], kind="mergesort")
            j = 0
            while j < d:
                k = j
                while k + 1 < d and mat[i, order[k + 1]] == mat[i, order[j]]:
                    k += 1
                avg = (j + k) / 2.0 + 1.0
                for m in range(j, k + 1):
                    out[i, order[m]] = avg
                j = k + 1
        return out

    @njit(cache=False)
    def _unitize_centered_nb(rows):
        n, d = rows.shape
        unit = np.empty((n, d))
        degenerate = np.zeros(n, dtype=np.bool_)
        for i in range(n):
            mean = 0.0
            for j in range(d):
                mean += rows[i, j]
            mean /= d
            sq = 0.0
            for j in range(d):
                dv = rows[i, j] - mean
                unit[i, j] = dv
                sq += dv * dv
            norm = np.sqrt(sq)
            if norm == 0.0:
                degenerate[i] = True
            else:
                for j in range(d):
                    unit[i, j] /= norm
        return unit, degenerate

    @njit(cache=False)
    def _unitize_nb(rows):
        n, d = rows.shape
        unit = np.empty((n, d))
        degenerate = np.zeros(n, dtype=np.bool_)
        for i in range(n):
            sq = 0.0
            for j in range(d):
                sq += rows[i, j] * rows[i, j]
            norm = np.sqrt(sq)
            if norm == 0.0:
                degenerate[i] = True
                for j in range(d):
                    unit[i, j] = 0.0
            else:
                for j in range(d):
                    unit[i, j] = rows[i, j] / norm
        return unit, degenerate

    @njit(cache=False)
    def _finish_sim_nb(unit, degenerate):
        # matmul lowers to BLAS inside numba; copy keeps operands contiguous
        sim = unit @ np.ascontiguousarray(unit.T)
        n = sim.shape[0]
        for i in range(n):
            for j in range(n):
                if degenerate[i] or degenerate[j]:
                    sim[i, j] = 0.0
                elif sim[i, j] > 1.0:
                    sim[i, j] = 1.0
                elif sim[i, j] < -1.0:
                    sim[i, j] = -1.0
        return sim

    @njit(cache=False)
    def _pairwise_corr_nb(rows):
        unit, degenerate = _unitize_centered_nb(rows)
        return _finish_sim_nb(unit, degenerate)

    @njit(cache=False)
    def _pairwise_cosine_nb(rows):
        unit, degenerate = _unitize_nb(rows)
        return _finish_sim_nb(unit, degenerate)


def rank_rows(mat: np.ndarray) -> np.ndarray:
    mat = np.asarray(mat, dtype=np.float64)
    if USE_NUMBA:
        return _rank_rows_nb(mat)
    return _rank_rows_np(mat)


def pairwise_corr(rows: np.ndarray) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.float64)
    if USE_NUMBA:
        return _pairwise_corr_nb(rows)
    return _pairwise_corr_np(rows)


def pairwise_cosine(rows: np.ndarray) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.float64)
    if USE_NUMBA:
        return _pairwise_cosine_nb(rows)
    return _pairwise_cosine_np(rows)

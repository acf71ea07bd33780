"""Weighted regularized matrix factorization for implicit feedback (ALS).

Minimizes ``sum_ui c_ui (p_ui - x_u . y_i)^2 + reg (|X|^2 + |Y|^2)`` with
``p_ui`` the binary preference and ``c_ui = 1 + alpha * p_ui``.
"""

import logging

import numpy as np
import scipy.sparse as sp

from .._accel import dispatch, jit_opts, njit, prange
from .base import Recommender

log = logging.getLogger(__name__)


def wrmf_loss(X, Y, r: sp.csr_matrix, alpha, reg):
    """Full weighted loss; the all-zero cells are folded into a Gram trace."""
    coo = r.tocoo()
    s = np.einsum("nf,nf->n", X[coo.row], Y[coo.col])
    dense_part = float(np.sum((X.T @ X) * (Y.T @ Y)))
    pos_part = float(np.sum((1.0 + alpha) * (1.0 - s) ** 2 - s ** 2))
    return dense_part + pos_part + reg * (float((X ** 2).sum()) + float((Y ** 2).sum()))


@njit(parallel=True, **jit_opts())
def _solve_side_numba(indptr, indices, other, gram, alpha, reg):
    n = indptr.shape[0] - 1
    f = other.shape[1]
    out = np.zeros((n, f))
    for u in prange(n):
        lo = indptr[u]
        hi = indptr[u + 1]
        if hi == lo:
            continue
        a = gram.copy()
        b = np.zeros(f)
        for p in range(lo, hi):
            y = other[indices[p]]
            for r in range(f):
                b[r] += (1.0 + alpha) * y[r]
                for c in range(f):
                    a[r, c] += alpha * y[r] * y[c]
        for r in range(f):
            a[r, r] += reg
        out[u] = np.linalg.solve(a, b)
    return out


def _solve_side_numpy(indptr, indices, other, gram, alpha, reg, chunk=4096):
    """Exact least-squares update of every row given the other side's factors.

    Rows with no positives get zero factors (their optimum under the
    regularizer).
    """
    n = len(indptr) - 1
    f = other.shape[1]
    out = np.zeros((n, f))
    nnz = np.diff(indptr)
    rows = np.flatnonzero(nnz > 0)
    eye = reg * np.eye(f)
    for start in range(0, len(rows), chunk):
        block = rows[start:start + chunk]
        lo, hi = indptr[block[0]], indptr[block[-1] + 1]
        y = other[indices[lo:hi]]
        outer = alpha * (y[:, :, None] * y[:, None, :])
        starts = indptr[block] - lo
        a = np.add.reduceat(outer, starts, axis=0) + gram + eye
        b = (1.0 + alpha) * np.add.reduceat(y, starts, axis=0)
        out[block] = np.linalg.solve(a, b[:, :, None])[:, :, 0]
    return out


solve_side = dispatch(_solve_side_numba, _solve_side_numpy)


class WRMF(Recommender):
    name = "WRMF"
    defaults = {"factors": 10, "alpha": 1.0, "reg": 0.015, "iterations": 15, "init_std": 0.01}

    track_loss = False

    def _fit(self, train):
        p = self.params
        rng = np.random.default_rng(self.seed)
        n_users, n_items = self._x.shape
        f = int(p["factors"])
        alpha, reg = float(p["alpha"]), float(p["reg"])
        self.X = rng.normal(0.0, p["init_std"], (n_users, f))
        self.Y = rng.normal(0.0, p["init_std"], (n_items, f))
        r = self._x
        rt = r.T.tocsr()
        r_ptr, r_idx = r.indptr.astype(np.int64), r.indices.astype(np.int64)
        t_ptr, t_idx = rt.indptr.astype(np.int64), rt.indices.astype(np.int64)
        self.loss_history = []
        for _ in range(int(p["iterations"])):
            self.X = solve_side(r_ptr, r_idx, self.Y, self.Y.T @ self.Y, alpha, reg)
            if self.track_loss:
                self.loss_history.append(wrmf_loss(self.X, self.Y, r, alpha, reg))
            self.Y = solve_side(t_ptr, t_idx, self.X, self.X.T @ self.X, alpha, reg)
            if self.track_loss:
                self.loss_history.append(wrmf_loss(self.X, self.Y, r, alpha, reg))

    def score_users(self, users):
        return self.X[users] @ self.Y.T

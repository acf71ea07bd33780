"""Matrix factorization trained with the BPR pairwise ranking objective.

Per sampled triple (u, i, j) with i a positive and j a negative of u, the
objective is ``ln sigmoid(w_u . (h_i - h_j)) - reg/2 (|w_u|^2 + |h_i|^2 + |h_j|^2)``
and each SGD step ascends its gradient.
"""

import math

import numpy as np

from .._accel import dispatch, jit_opts, njit
from .base import Recommender


def bpr_objective(W, H, triples, reg):
    u, i, j = triples.T
    x = np.einsum("nf,nf->n", W[u], H[i] - H[j])
    fit = -np.logaddexp(0.0, -x).sum()
    penalty = 0.5 * reg * ((W[u] ** 2).sum() + (H[i] ** 2).sum() + (H[j] ** 2).sum())
    return fit - penalty


def bpr_gradient(W, H, triples, reg):
    """Analytic gradient of :func:`bpr_objective` w.r.t. ``W`` and ``H``."""
    gW = np.zeros_like(W)
    gH = np.zeros_like(H)
    for u, i, j in triples:
        d = H[i] - H[j]
        g = 1.0 / (1.0 + math.exp(W[u] @ d))
        gW[u] += g * d - reg * W[u]
        gH[i] += g * W[u] - reg * H[i]
        gH[j] += -g * W[u] - reg * H[j]
    return gW, gH


@njit(**jit_opts())
def _sgd_numba(W, H, users, pos, neg, lr, reg):
    f = W.shape[1]
    for t in range(users.shape[0]):
        u = users[t]
        i = pos[t]
        j = neg[t]
        x = 0.0
        for q in range(f):
            x += W[u, q] * (H[i, q] - H[j, q])
        g = 1.0 / (1.0 + math.exp(min(x, 700.0)))
        for q in range(f):
            wu = W[u, q]
            hi = H[i, q]
            hj = H[j, q]
            W[u, q] = wu + lr * (g * (hi - hj) - reg * wu)
            H[i, q] = hi + lr * (g * wu - reg * hi)
            H[j, q] = hj + lr * (-g * wu - reg * hj)


def _sgd_numpy(W, H, users, pos, neg, lr, reg):
    """One sequential SGD pass over the given triples, updating W and H in place."""
    for u, i, j in zip(users.tolist(), pos.tolist(), neg.tolist()):
        wu = W[u].copy()
        hi = H[i].copy()
        hj = H[j].copy()
        d = hi - hj
        g = 1.0 / (1.0 + math.exp(min(float(np.sum(wu * d)), 700.0)))
        W[u] = wu + lr * (g * d - reg * wu)
        H[i] = hi + lr * (g * wu - reg * hi)
        H[j] = hj + lr * (-g * wu - reg * hj)


sgd_pass = dispatch(_sgd_numba, _sgd_numpy)


def sample_triples(users, items, n_items, candidates, size, rng):
    """Uniform positive interactions with uniform negatives among ``candidates``.

    Negatives that turn out to be positives of the user are redrawn.
    """
    m = max(n_items, 1)
    keys = np.sort(users * m + items)
    pick = rng.integers(len(users), size=size)
    u = users[pick]
    i = items[pick]
    j = candidates[rng.integers(len(candidates), size=size)]
    while True:
        k = u * m + j
        loc = np.minimum(np.searchsorted(keys, k), len(keys) - 1)
        bad = np.flatnonzero(keys[loc] == k)
        if len(bad) == 0:
            return u, i, j
        j[bad] = candidates[rng.integers(len(candidates), size=len(bad))]


class BPRMF(Recommender):
    name = "BPRMF"
    defaults = {"factors": 10, "learning_rate": 0.05, "reg": 0.0025, "epochs": 100, "init_std": 0.1}

    def _fit(self, train):
        p = self.params
        rng = np.random.default_rng(self.seed)
        n_users, n_items = self._x.shape
        f = int(p["factors"])
        self.W = rng.normal(0.0, p["init_std"], (n_users, f))
        self.H = rng.normal(0.0, p["init_std"], (n_items, f))
        candidates = np.flatnonzero(self._seen_items)
        users = np.asarray(train.users, dtype=np.int64)
        items = np.asarray(train.items, dtype=np.int64)
        per_user = np.bincount(users, minlength=n_users)
        # users who rated every candidate have no negatives
        full = per_user[users] >= len(candidates)
        users, items = users[~full], items[~full]
        if len(users) == 0:
            return
        for _ in range(int(p["epochs"])):
            u, i, j = sample_triples(users, items, n_items, candidates, len(train), rng)
            sgd_pass(self.W, self.H, u, i, j, float(p["learning_rate"]), float(p["reg"]))
        if not (np.isfinite(self.W).all() and np.isfinite(self.H).all()):
            raise FloatingPointError("BPRMF diverged; lower the learning rate")

    def score_users(self, users):
        return self.W[users] @ self.H.T

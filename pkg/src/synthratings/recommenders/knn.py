"""User-based nearest neighbours with cosine similarity on binary vectors."""

import numpy as np
import scipy.sparse as sp

from .base import Recommender


def cosine_neighbors(x: sp.csr_matrix, k: int, batch: int = 1024):
    """Top-``k`` most similar other users per user.

    Returns ``(neighbors, sims)``, both ``n_users x k``; rows are padded with
    index -1 / similarity 0 when fewer than ``k`` users share an item. Ties
    are broken by ascending user index.
    """
    n = x.shape[0]
    norms = np.sqrt(np.asarray(x.multiply(x).sum(axis=1)).ravel())
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    xt = x.T.tocsr()
    k_eff = min(k, max(n - 1, 0))
    neighbors = np.full((n, k), -1, dtype=np.int64)
    sims = np.zeros((n, k))
    for start in range(0, n, batch):
        stop = min(start + batch, n)
        s = np.asarray((x[start:stop] @ xt).todense())
        s *= inv[start:stop, None]
        s *= inv[None, :]
        s[np.arange(stop - start), np.arange(start, stop)] = -np.inf
        order = np.argsort(-s, axis=1, kind="stable")[:, :k_eff]
        top = np.take_along_axis(s, order, axis=1)
        keep = top > 0
        neighbors[start:stop, :k_eff] = np.where(keep, order, -1)
        sims[start:stop, :k_eff] = np.where(keep, top, 0.0)
    return neighbors, sims


class UserKNN(Recommender):
    name = "User KNN"
    defaults = {"k": 80}

    def _fit(self, train):
        self.neighbors, self.sims = cosine_neighbors(self._x, int(self.params["k"]))

    def score_users(self, users):
        nb = self.neighbors[users]
        w = self.sims[users]
        valid = nb >= 0
        rows = np.repeat(np.arange(len(users)), valid.sum(axis=1))
        weights = sp.csr_matrix((w[valid], (rows, nb[valid])), shape=(len(users), self._x.shape[0]))
        return np.asarray((weights @ self._x).todense())

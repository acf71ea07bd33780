"""Lloyd's K-means over binary user vectors with k-means++ seeding."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ._accel import dispatch, jit_opts, njit, prange
from .data import InteractionSet

log = logging.getLogger(__name__)


@dataclass
class ClusterModel:
    k: int
    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    n_iter: int = 0
    history: list = field(default_factory=list)

    def sizes(self):
        return np.bincount(self.assignments, minlength=self.k)


@njit(parallel=True, **jit_opts())
def _assign_numba(indptr, indices, centroids, cnorm):
    n = indptr.shape[0] - 1
    k = centroids.shape[0]
    # item-major copy so each nonzero reads one contiguous row of k values
    ct = np.ascontiguousarray(centroids.T)
    labels = np.empty(n, dtype=np.int64)
    mind = np.empty(n, dtype=np.float64)
    for u in prange(n):
        lo = indptr[u]
        hi = indptr[u + 1]
        nnz = float(hi - lo)
        s = np.zeros(k)
        for p in range(lo, hi):
            row = ct[indices[p]]
            for j in range(k):
                s[j] += row[j]
        best = 0
        bestd = np.inf
        for j in range(k):
            d = (nnz - 2.0 * s[j]) + cnorm[j]
            if d < bestd:
                bestd = d
                best = j
        labels[u] = best
        mind[u] = bestd
    return labels, mind


def _assign_numpy(indptr, indices, centroids, cnorm):
    """Nearest centroid per CSR row via ``|x|^2 - 2 x.c + |c|^2``.

    Returns (labels, squared distance to the chosen centroid). Ties go to
    the lowest cluster index.
    """
    n = indptr.shape[0] - 1
    m = centroids.shape[1]
    x = sp.csr_matrix((np.ones(len(indices)), indices, indptr), shape=(n, m))
    nnz = np.diff(indptr).astype(np.float64)
    dots = np.asarray(x @ centroids.T)
    dist = (nnz[:, None] - 2.0 * dots) + cnorm[None, :]
    labels = np.argmin(dist, axis=1).astype(np.int64)
    return labels, dist[np.arange(n), labels]


assign = dispatch(_assign_numba, _assign_numpy)


def _kmeanspp(x, k, rng):
    """k-means++ seeding; returns the chosen user indices."""
    n = x.shape[0]
    nnz = np.diff(x.indptr).astype(np.float64)
    chosen = [int(rng.integers(n))]
    closest = _dist_to_point(x, nnz, chosen[0])
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            cum = np.cumsum(closest)
            r = rng.random() * cum[-1]
            nxt = int(np.searchsorted(cum, r, side="right"))
            nxt = min(nxt, n - 1)
            while closest[nxt] == 0:  # guard against r landing on a zero-width bin
                nxt -= 1
        else:
            # every point coincides with a chosen centroid
            free = np.setdiff1d(np.arange(n), chosen)
            nxt = int(free[rng.integers(len(free))])
        chosen.append(nxt)
        np.minimum(closest, _dist_to_point(x, nnz, nxt), out=closest)
    return np.asarray(chosen, dtype=np.int64)


def _dist_to_point(x, nnz, p):
    overlap = np.asarray((x @ x[p].T).todense()).ravel()
    return np.maximum(nnz + nnz[p] - 2.0 * overlap, 0.0)


def _means(x, labels, k):
    n = x.shape[0]
    ind = sp.csr_matrix((np.ones(n), (labels, np.arange(n))), shape=(k, n))
    sums = np.asarray((ind @ x).todense())
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    nonzero = counts > 0
    sums[nonzero] /= counts[nonzero, None]
    return sums


def _repair_empty(x, labels, d, centroids, cnorm, k):
    """Move the farthest point of a multi-member cluster into each empty cluster."""
    counts = np.bincount(labels, minlength=k)
    empties = np.flatnonzero(counts == 0)
    for j in empties:
        eligible = counts[labels] > 1
        cand = np.where(eligible, d, -1.0)
        p = int(np.argmax(cand))
        counts[labels[p]] -= 1
        labels[p] = j
        counts[j] = 1
        centroids[j] = x[p].toarray().ravel()
        cnorm[j] = centroids[j] @ centroids[j]
        d[p] = 0.0
    if len(empties):
        log.debug("reseeded %d empty clusters", len(empties))
    return len(empties)


def kmeans(ds: InteractionSet, k: int, seed: int = 0, max_iter: int = 300,
           tol: float = 1e-4, init=None) -> ClusterModel:
    """Cluster the users of ``ds`` into ``k`` communities.

    Iterates until the assignment stops changing, the largest centroid
    displacement drops to ``tol`` or below, or ``max_iter`` assignment
    passes have run. ``init`` optionally gives explicit starting centroids
    (``k x item_count``); otherwise k-means++ seeding uses ``seed``.
    ``history`` records the inertia after every assignment pass.
    """
    n = ds.user_count
    if n == 0 or len(ds) == 0:
        raise ValueError("cannot cluster an empty dataset")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if max_iter < 1:
        raise ValueError("max_iter must be positive")
    x = ds.matrix
    indptr = x.indptr.astype(np.int64)
    indices = x.indices.astype(np.int64)

    if init is None:
        rng = np.random.default_rng(seed)
        seeds = _kmeanspp(x, k, rng)
        centroids = x[seeds].toarray().astype(np.float64)
    else:
        centroids = np.array(init, dtype=np.float64, copy=True)
        if centroids.shape != (k, ds.item_count):
            raise ValueError(f"init must have shape {(k, ds.item_count)}")

    history = []
    prev = None
    it = 0

    def step():
        cnorm = np.einsum("ij,ij->i", centroids, centroids)
        labels, d = assign(indptr, indices, centroids, cnorm)
        np.maximum(d, 0.0, out=d)
        _repair_empty(x, labels, d, centroids, cnorm, k)
        history.append(float(d.sum()))
        return labels

    while True:
        it += 1
        labels = step()
        if prev is not None and np.array_equal(labels, prev):
            break
        if it >= max_iter:
            break
        updated = _means(x, labels, k)
        shift = float(np.sqrt(((updated - centroids) ** 2).sum(axis=1)).max())
        centroids = updated
        prev = labels
        if shift <= tol:
            it += 1
            labels = step()
            break

    return ClusterModel(k=k, assignments=labels, centroids=centroids,
                        inertia=history[-1], n_iter=it, history=history)


def recompute_inertia(ds: InteractionSet, model: ClusterModel) -> float:
    """Direct sum of squared distances, without the dot-product expansion."""
    dense = ds.matrix.toarray()
    diff = dense - model.centroids[model.assignments]
    return float((diff * diff).sum())

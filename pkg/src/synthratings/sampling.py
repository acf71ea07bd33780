"""Weighted sampling from integer-count distributions.

Draws consume uniforms from a numpy ``Generator`` outside the kernels, so
the numba and numpy paths return identical outcomes for the same stream.
A uniform ``u`` picks the smallest index whose cumulative count exceeds
``floor(u * total)``.
"""

from __future__ import annotations

import numpy as np

from ._accel import dispatch, jit_opts, njit
from .distributions import EmpiricalDistribution


class InfeasibleDraw(ValueError):
    """More distinct outcomes requested than the support holds."""


def _target(u, total):
    r = int(np.floor(u * total))
    return total - 1 if r >= total else r


def sample_categorical(dist: EmpiricalDistribution, rng) -> int:
    cum = np.cumsum(dist.counts)
    r = _target(rng.random(), int(cum[-1]))
    return int(dist.support[np.searchsorted(cum, r, side="right")])


def sample_categorical_many(dist: EmpiricalDistribution, size: int, rng) -> np.ndarray:
    cum = np.cumsum(dist.counts)
    total = int(cum[-1])
    r = np.floor(rng.random(size) * total).astype(np.int64)
    np.minimum(r, total - 1, out=r)
    return dist.support[np.searchsorted(cum, r, side="right")]


# -- without replacement -------------------------------------------------

@njit(**jit_opts())
def _fenwick_build(weights):
    m = weights.shape[0]
    tree = np.zeros(m + 1, dtype=np.int64)
    for i in range(1, m + 1):
        tree[i] += weights[i - 1]
        j = i + (i & -i)
        if j <= m:
            tree[j] += tree[i]
    return tree


@njit(**jit_opts())
def _fenwick_find(tree, r):
    # smallest 0-based index whose inclusive prefix sum exceeds r
    m = tree.shape[0] - 1
    pos = 0
    mask = 1
    while mask * 2 <= m:
        mask *= 2
    while mask > 0:
        nxt = pos + mask
        if nxt <= m and tree[nxt] <= r:
            pos = nxt
            r -= tree[nxt]
        mask //= 2
    return pos


@njit(**jit_opts())
def _fenwick_add(tree, idx, delta):
    m = tree.shape[0] - 1
    i = idx + 1
    while i <= m:
        tree[i] += delta
        i += i & -i


@njit(**jit_opts())
def _draw_into(weights, uniforms, out, offset):
    tree = _fenwick_build(weights)
    total = 0
    for w in weights:
        total += w
    for t in range(uniforms.shape[0]):
        r = np.int64(np.floor(uniforms[t] * total))
        if r >= total:
            r = total - 1
        idx = _fenwick_find(tree, r)
        out[offset + t] = idx
        w = weights[idx]
        _fenwick_add(tree, idx, -w)
        total -= w
        weights[idx] = 0


@njit(**jit_opts())
def _draw_without_replacement_numba(counts, uniforms):
    out = np.empty(uniforms.shape[0], dtype=np.int64)
    _draw_into(counts.copy(), uniforms, out, 0)
    return out


def _draw_without_replacement_numpy(counts, uniforms):
    """Successive weighted draws with removal; returns positions into ``counts``."""
    w = counts.astype(np.int64, copy=True)
    out = np.empty(len(uniforms), dtype=np.int64)
    for t, u in enumerate(uniforms):
        cum = np.cumsum(w)
        total = int(cum[-1])
        r = _target(u, total)
        idx = int(np.searchsorted(cum, r, side="right"))
        out[t] = idx
        w[idx] = 0
    return out


draw_without_replacement = dispatch(_draw_without_replacement_numba, _draw_without_replacement_numpy)


@njit(**jit_opts())
def _draw_batch_numba(offsets, counts_flat, groups, sizes, uniforms):
    out = np.empty(uniforms.shape[0], dtype=np.int64)
    pos = 0
    for u in range(groups.shape[0]):
        g = groups[u]
        n = sizes[u]
        w = counts_flat[offsets[g]:offsets[g + 1]].copy()
        _draw_into(w, uniforms[pos:pos + n], out, pos)
        pos += n
    return out


def _draw_batch_numpy(offsets, counts_flat, groups, sizes, uniforms):
    """Per-row draws without replacement from grouped count vectors.

    Row ``u`` draws ``sizes[u]`` positions from group ``groups[u]``, whose
    counts are ``counts_flat[offsets[g]:offsets[g+1]]``. Uniforms are
    consumed in row order.
    """
    out = np.empty(len(uniforms), dtype=np.int64)
    pos = 0
    for g, n in zip(groups.tolist(), sizes.tolist()):
        counts = counts_flat[offsets[g]:offsets[g + 1]]
        out[pos:pos + n] = _draw_without_replacement_numpy(counts, uniforms[pos:pos + n])
        pos += n
    return out


draw_batch = dispatch(_draw_batch_numba, _draw_batch_numpy)


def sample_without_replacement(dist: EmpiricalDistribution, n: int, rng) -> np.ndarray:
    """``n`` distinct outcomes by successive renormalized weighted draws."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > len(dist):
        raise InfeasibleDraw(f"cannot draw {n} distinct outcomes from a support of {len(dist)}")
    uniforms = rng.random(n)
    return dist.support[draw_without_replacement(dist.counts, uniforms)]

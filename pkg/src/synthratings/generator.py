"""Synthetic dataset generation from a learned :class:`BehaviorModel`.

Each synthetic user is assigned a community, a rating count from that
community's count distribution, and that many distinct items drawn from the
community's item distribution. The baseline mode does the same with a
single community learned on the whole reference dataset.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .clustering import ClusterModel
from .data import InteractionSet, _from_codes
from .distributions import BehaviorModel, learn
from .sampling import draw_batch

log = logging.getLogger(__name__)


class Mode(enum.Enum):
    CLUSTERED = "clustered"
    BASELINE = "baseline"


@dataclass(frozen=True)
class GenerationConfig:
    users: int
    seed: int = 0
    mode: Mode = Mode.CLUSTERED
    target_ratings: Optional[int] = None

    def __post_init__(self):
        if self.users <= 0:
            raise ValueError("users must be positive")
        if self.mode is Mode.BASELINE:
            if self.target_ratings is None:
                raise ValueError("baseline mode requires target_ratings")
            if self.target_ratings < 1:
                raise ValueError("target_ratings must be at least 1")


@dataclass
class GenerationInfo:
    """Diagnostics from the last generation call."""
    clamped_users: int = 0
    truncated_last_user: bool = False
    clusters: Optional[np.ndarray] = None


last_info = GenerationInfo()


def _draw_counts(model, clusters, rng):
    """Per-user rating counts, one uniform per user, in user order."""
    u = rng.random(len(clusters))
    sizes = np.empty(len(clusters), dtype=np.int64)
    for c in np.unique(clusters):
        rows = np.flatnonzero(clusters == c)
        dist = model.ratings_per_user[c]
        cum = np.cumsum(dist.counts)
        total = int(cum[-1])
        r = np.minimum(np.floor(u[rows] * total).astype(np.int64), total - 1)
        sizes[rows] = dist.support[np.searchsorted(cum, r, side="right")]
    return sizes


def _clamp(model, clusters, sizes):
    support_sizes = np.array([len(d) for d in model.item_dist], dtype=np.int64)
    cap = support_sizes[clusters]
    over = sizes > cap
    n = int(over.sum())
    if n:
        log.warning("clamped the rating count of %d users to their community's item support", n)
    return np.minimum(sizes, cap), n


def _draw_items(model, clusters, sizes, rng):
    offsets = np.zeros(model.k + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(d) for d in model.item_dist])
    counts_flat = np.concatenate([d.counts for d in model.item_dist])
    support_flat = np.concatenate([d.support for d in model.item_dist])
    uniforms = rng.random(int(sizes.sum()))
    pos = draw_batch(offsets, counts_flat, clusters.astype(np.int64), sizes, uniforms)
    base = np.repeat(offsets[:-1][clusters], sizes)
    return support_flat[base + pos]


def _assemble(model, sizes, items):
    n_users = len(sizes)
    users = np.repeat(np.arange(n_users, dtype=np.int64), sizes)
    # items get internal indices in first-seen order, like any parsed file
    uniq, first = np.unique(items, return_index=True)
    order = np.argsort(first, kind="stable")
    ref_items = uniq[order]
    remap = np.empty(len(model.item_ids), dtype=np.int64)
    remap[ref_items] = np.arange(len(ref_items))
    user_ids = [f"synth-{j}" for j in range(n_users)]
    item_ids = [model.item_ids[i] for i in ref_items.tolist()]
    return _from_codes(users, remap[items], user_ids, item_ids)


def generate(model: BehaviorModel, cfg: GenerationConfig, rng=None) -> InteractionSet:
    """Sample ``cfg.users`` synthetic users from ``model``.

    Randomness is consumed in a fixed order (communities, then counts, then
    items) from one stream, so equal seeds give identical datasets.
    """
    global last_info
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    cdist = model.cluster_dist
    cum = np.cumsum(cdist.counts)
    total = int(cum[-1])
    r = np.minimum(np.floor(rng.random(cfg.users) * total).astype(np.int64), total - 1)
    clusters = cdist.support[np.searchsorted(cum, r, side="right")]
    sizes = _draw_counts(model, clusters, rng)
    sizes, clamped = _clamp(model, clusters, sizes)
    items = _draw_items(model, clusters, sizes, rng)
    last_info = GenerationInfo(clamped_users=clamped, clusters=clusters)
    return _assemble(model, sizes, items)


def single_cluster(ds: InteractionSet) -> ClusterModel:
    """The trivial one-community partition of ``ds``."""
    x = ds.matrix
    centroid = np.asarray(x.mean(axis=0))
    labels = np.zeros(ds.user_count, dtype=np.int64)
    c = centroid.ravel()
    sq = np.asarray(x.sum(axis=1)).ravel() - 2 * (x @ c) + c @ c
    inertia = float(np.maximum(sq, 0).sum())
    return ClusterModel(k=1, assignments=labels, centroids=centroid, inertia=inertia, history=[inertia])


def generate_baseline(ds, cfg: GenerationConfig, rng=None) -> InteractionSet:
    """Community-free baseline with exactly ``cfg.target_ratings`` interactions.

    ``ds`` is the reference :class:`InteractionSet` or any
    :class:`BehaviorModel` learned on it (its communities are pooled).
    Users are drawn from the global behavior until the running total reaches
    the target; the last user's item count is cut to land on it exactly.
    """
    global last_info
    if cfg.target_ratings is None or cfg.target_ratings < 1:
        raise ValueError("baseline generation needs target_ratings >= 1")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    if isinstance(ds, BehaviorModel):
        model = ds.merged() if ds.k > 1 else ds
    else:
        model = learn(ds, single_cluster(ds))
    target = int(cfg.target_ratings)
    chunks = []
    running = 0
    clamped = 0
    while running < target:
        clusters = np.zeros(cfg.users, dtype=np.int64)
        sizes, n = _clamp(model, clusters, _draw_counts(model, clusters, rng))
        chunks.append(sizes)
        clamped += n
        running += int(sizes.sum())
    sizes = np.concatenate(chunks)
    cum = np.cumsum(sizes)
    n_users = int(np.searchsorted(cum, target, side="left")) + 1
    sizes = sizes[:n_users].copy()
    truncated = int(cum[n_users - 1]) != target
    sizes[-1] -= int(cum[n_users - 1]) - target
    items = _draw_items(model, np.zeros(n_users, dtype=np.int64), sizes, rng)
    last_info = GenerationInfo(clamped_users=clamped, truncated_last_user=truncated,
                               clusters=np.zeros(n_users, dtype=np.int64))
    return _assemble(model, sizes, items)

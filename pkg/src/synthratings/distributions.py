"""Per-community empirical distributions learned from a clustered dataset.

Distributions are kept as exact integer counts; ``weights`` is a derived
normalized view.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .clustering import ClusterModel
from .data import InteractionSet

FORMAT_TAG = "behavior-model/1"


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    support: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        support = np.ascontiguousarray(self.support, dtype=np.int64)
        counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        if support.shape != counts.shape or support.ndim != 1:
            raise ValueError("support and counts must be 1-d and the same length")
        if len(counts) == 0:
            raise ValueError("empty distribution")
        if (counts <= 0).any():
            raise ValueError("counts must be strictly positive")
        if len(np.unique(support)) != len(support):
            raise ValueError("support values must be distinct")
        support.setflags(write=False)
        counts.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_observations(cls, values):
        support, counts = np.unique(np.asarray(values, dtype=np.int64), return_counts=True)
        return cls(support, counts)

    @property
    def total(self):
        return int(self.counts.sum())

    @property
    def weights(self):
        return self.counts / self.counts.sum()

    def __len__(self):
        return len(self.support)

    def mean(self):
        return float((self.support * self.counts).sum() / self.counts.sum())

    def as_dict(self):
        return {int(s): int(c) for s, c in zip(self.support, self.counts)}

    def to_json(self):
        return {"support": self.support.tolist(), "counts": self.counts.tolist()}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["support"], obj["counts"])


@dataclass(frozen=True, eq=False)
class BehaviorModel:
    k: int
    cluster_dist: EmpiricalDistribution
    ratings_per_user: tuple
    item_dist: tuple
    item_ids: tuple
    # per-cluster list of observed per-user counts, in user order; the
    # "sample a user, take their count" view of ratings_per_user
    user_counts: tuple = ()

    def __post_init__(self):
        if len(self.ratings_per_user) != self.k or len(self.item_dist) != self.k:
            raise ValueError("need one ratings-per-user and one item distribution per cluster")
        sup = self.cluster_dist.support
        if sup.min() < 0 or sup.max() >= self.k:
            raise ValueError("cluster distribution support outside [0, k)")
        for dist in self.ratings_per_user:
            if dist.support.min() < 1:
                raise ValueError("ratings-per-user support must be >= 1")
        for dist in self.item_dist:
            if dist.support.min() < 0 or dist.support.max() >= len(self.item_ids):
                raise ValueError("item distribution refers to unknown item index")

    def merged(self) -> BehaviorModel:
        """Collapse all communities into one; equals learning with k=1."""
        def pool(dists):
            support = np.concatenate([d.support for d in dists])
            counts = np.concatenate([d.counts for d in dists])
            uniq, inv = np.unique(support, return_inverse=True)
            return EmpiricalDistribution(uniq, np.bincount(inv, weights=counts).astype(np.int64))

        return BehaviorModel(
            k=1,
            cluster_dist=EmpiricalDistribution([0], [self.cluster_dist.total]),
            ratings_per_user=(pool(self.ratings_per_user),),
            item_dist=(pool(self.item_dist),),
            item_ids=self.item_ids,
        )

    def to_json(self):
        return {
            "format": FORMAT_TAG,
            "k": self.k,
            "items": list(self.item_ids),
            "cluster_dist": self.cluster_dist.to_json(),
            "ratings_per_user": [d.to_json() for d in self.ratings_per_user],
            "item_dist": [d.to_json() for d in self.item_dist],
        }

    @classmethod
    def from_json(cls, obj):
        if obj.get("format") != FORMAT_TAG:
            raise ValueError(f"not a {FORMAT_TAG} file (format={obj.get('format')!r})")
        return cls(
            k=int(obj["k"]),
            cluster_dist=EmpiricalDistribution.from_json(obj["cluster_dist"]),
            ratings_per_user=tuple(EmpiricalDistribution.from_json(d) for d in obj["ratings_per_user"]),
            item_dist=tuple(EmpiricalDistribution.from_json(d) for d in obj["item_dist"]),
            item_ids=tuple(obj["items"]),
        )

    def save(self, path):
        text = json.dumps(self.to_json(), indent=1, sort_keys=True)
        Path(path).write_text(text + "\n", encoding="utf-8", newline="\n")

    @classmethod
    def load(cls, path):
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def learn_cluster_dist(model: ClusterModel) -> EmpiricalDistribution:
    """Share of users per cluster."""
    return EmpiricalDistribution.from_observations(model.assignments)


def learn_ratings_per_user(ds: InteractionSet, model: ClusterModel, cluster: int) -> EmpiricalDistribution:
    """Histogram of per-user rating counts among the users of one cluster."""
    if not 0 <= cluster < model.k:
        raise ValueError(f"cluster {cluster} out of range [0, {model.k})")
    counts = ds.user_counts()[model.assignments == cluster]
    return EmpiricalDistribution.from_observations(counts)


def learn_item_dist(ds: InteractionSet, model: ClusterModel, cluster: int) -> EmpiricalDistribution:
    """Rating mass per item, restricted to interactions of the cluster's users."""
    if not 0 <= cluster < model.k:
        raise ValueError(f"cluster {cluster} out of range [0, {model.k})")
    in_cluster = model.assignments[ds.users] == cluster
    return EmpiricalDistribution.from_observations(ds.items[in_cluster])


def learn(ds: InteractionSet, model: ClusterModel) -> BehaviorModel:
    """Assemble the cluster, ratings-per-user and item distributions."""
    if len(model.assignments) != ds.user_count:
        raise ValueError(
            f"cluster model covers {len(model.assignments)} users, dataset has {ds.user_count}")
    if model.centroids.shape[1] != ds.item_count:
        raise ValueError("cluster model centroids do not match the dataset's item count")
    per_user = ds.user_counts()
    # one pass grouping instead of k boolean masks
    item_label = model.assignments[ds.users]
    order = np.argsort(item_label, kind="stable")
    bounds = np.searchsorted(item_label[order], np.arange(model.k + 1))
    user_order = np.argsort(model.assignments, kind="stable")
    user_bounds = np.searchsorted(model.assignments[user_order], np.arange(model.k + 1))
    rpu, items, raw = [], [], []
    for c in range(model.k):
        members = user_order[user_bounds[c]:user_bounds[c + 1]]
        rpu.append(EmpiricalDistribution.from_observations(per_user[members]))
        raw.append(tuple(per_user[members].tolist()))
        items.append(EmpiricalDistribution.from_observations(ds.items[order[bounds[c]:bounds[c + 1]]]))
    return BehaviorModel(
        k=model.k,
        cluster_dist=learn_cluster_dist(model),
        ratings_per_user=tuple(rpu),
        item_dist=tuple(items),
        item_ids=ds.item_ids,
        user_counts=tuple(raw),
    )

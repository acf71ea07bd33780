"""In-memory implicit-feedback datasets.

An :class:`InteractionSet` holds positive (user, item) pairs with dense
internal indices and the mapping back to external identifiers. Reference,
generated and baseline datasets all use this one type.
"""

from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np
import scipy.sparse as sp


class DatasetStats(NamedTuple):
    users: int
    items: int
    ratings: int


def _frozen(arr, dtype=np.int64):
    arr = np.ascontiguousarray(arr, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class InteractionSet:
    """Immutable set of positive interactions.

    ``users[j], items[j]`` is the j-th interaction. Pairs are unique. Sets
    produced by :func:`build_interaction_set` contain no user without
    interactions; subsets (e.g. a train split) keep the parent's index
    space, so some indices may have no interactions there.
    """

    users: np.ndarray
    items: np.ndarray
    user_ids: tuple
    item_ids: tuple

    def __post_init__(self):
        object.__setattr__(self, "users", _frozen(self.users))
        object.__setattr__(self, "items", _frozen(self.items))
        object.__setattr__(self, "user_ids", tuple(self.user_ids))
        object.__setattr__(self, "item_ids", tuple(self.item_ids))
        if self.users.shape != self.items.shape or self.users.ndim != 1:
            raise ValueError("users and items must be 1-d arrays of equal length")
        if len(self.users):
            if self.users.min() < 0 or self.users.max() >= self.user_count:
                raise ValueError("user index out of range")
            if self.items.min() < 0 or self.items.max() >= self.item_count:
                raise ValueError("item index out of range")

    @property
    def user_count(self):
        return len(self.user_ids)

    @property
    def item_count(self):
        return len(self.item_ids)

    def __len__(self):
        return len(self.users)

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        """Binary user x item matrix (float64 CSR, sorted indices)."""
        data = np.ones(len(self.users), dtype=np.float64)
        m = sp.csr_matrix(
            (data, (self.users, self.items)), shape=(self.user_count, self.item_count)
        )
        m.sum_duplicates()
        m.sort_indices()
        return m

    @cached_property
    def user_index(self):
        return {uid: j for j, uid in enumerate(self.user_ids)}

    @cached_property
    def item_index(self):
        return {iid: j for j, iid in enumerate(self.item_ids)}

    def user_counts(self):
        return np.bincount(self.users, minlength=self.user_count)

    def item_counts(self):
        return np.bincount(self.items, minlength=self.item_count)

    def pairs(self):
        """Internal-index view as a Python set of tuples."""
        return set(zip(self.users.tolist(), self.items.tolist()))

    def external_pairs(self):
        """Interactions as (external user, external item), in storage order."""
        uids, iids = self.user_ids, self.item_ids
        return [(uids[u], iids[i]) for u, i in zip(self.users.tolist(), self.items.tolist())]

    def subset(self, mask) -> InteractionSet:
        """Interactions selected by a boolean mask; index space is kept."""
        mask = np.asarray(mask, dtype=bool)
        return InteractionSet(self.users[mask], self.items[mask], self.user_ids, self.item_ids)

    def fingerprint(self):
        """SHA-256 over the sorted external pairs; independent of index order."""
        h = hashlib.sha256()
        for u, i in sorted(self.external_pairs()):
            h.update(f"{u}\t{i}\n".encode("utf-8"))
        return h.hexdigest()


def build_interaction_set(pairs: Iterable) -> InteractionSet:
    """Build an :class:`InteractionSet` from (external user, external item) pairs.

    Duplicates collapse to one interaction. Internal indices are assigned in
    first-seen order.
    """
    user_index: dict = {}
    item_index: dict = {}
    us = []
    its = []
    for u, i in pairs:
        u = str(u)
        i = str(i)
        ui = user_index.get(u)
        if ui is None:
            ui = user_index[u] = len(user_index)
        ii = item_index.get(i)
        if ii is None:
            ii = item_index[i] = len(item_index)
        us.append(ui)
        its.append(ii)
    return _from_codes(np.asarray(us, dtype=np.int64), np.asarray(its, dtype=np.int64),
                       list(user_index), list(item_index))


def _from_codes(users, items, user_ids, item_ids):
    if len(users):
        keys = users * max(len(item_ids), 1) + items
        _, first = np.unique(keys, return_index=True)
        keep = np.sort(first)
        users, items = users[keep], items[keep]
    return InteractionSet(users, items, user_ids, item_ids)


def stats(ds: InteractionSet) -> DatasetStats:
    """Users, occurring items and ratings, as reported in dataset summaries."""
    return DatasetStats(
        users=int(len(np.unique(ds.users))),
        items=int(len(np.unique(ds.items))),
        ratings=int(len(ds)),
    )


def user_vector(ds: InteractionSet, user_index: int) -> sp.csr_matrix:
    """Binary row vector (1 x item_count) of the items the user rated."""
    if not 0 <= user_index < ds.user_count:
        raise ValueError(f"user_index {user_index} out of range [0, {ds.user_count})")
    return ds.matrix[user_index]


def write_canonical(ds: InteractionSet, dest) -> None:
    """Write one ``user<TAB>item`` line per interaction, in storage order."""
    text = "".join(f"{u}\t{i}\n" for u, i in ds.external_pairs())
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(text, encoding="utf-8", newline="\n")
    elif isinstance(dest, io.TextIOBase):
        dest.write(text)
    else:
        dest.write(text.encode("utf-8"))

from __future__ import annotations

import numpy as np

from ..data import InteractionSet


class Recommender:
    """Uniform fit / score / recommend interface.

    Subclasses implement ``_fit`` and ``score_users``. Candidates for a user
    are the items seen in training minus that user's training items; ties
    are broken by ascending item index.
    """

    name = "base"
    personalized = True
    defaults: dict = {}

    def __init__(self, seed=0, **params):
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise ValueError(f"{self.name}: unknown hyperparameters {sorted(unknown)}")
        self.params = {**self.defaults, **params}
        self.seed = seed
        self.train = None

    requires_data = True

    def fit(self, train: InteractionSet):
        if self.requires_data and len(train) == 0:
            raise ValueError(f"{self.name}: cannot fit on an empty training set")
        self.train = train
        self._x = train.matrix
        self._seen_items = np.asarray(self._x.sum(axis=0)).ravel() > 0
        self._user_nnz = np.diff(self._x.indptr)
        self._fit(train)
        return self

    def _fit(self, train):
        raise NotImplementedError

    def knows(self, user):
        return 0 <= user < self._x.shape[0] and self._user_nnz[user] > 0

    def score_users(self, users: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def recommend(self, user: int, n: int, exclude=None) -> list:
        """Top-``n`` item indices for one user."""
        return self.recommend_many(np.array([user]), n, [exclude])[0]

    def recommend_many(self, users, n, excludes=None, batch=512):
        if n < 1:
            raise ValueError("n must be positive")
        users = np.asarray(users, dtype=np.int64)
        out = [None] * len(users)
        for start in range(0, len(users), batch):
            chunk = users[start:start + batch]
            served = np.array([not self.personalized or self.knows(u) for u in chunk], dtype=bool)
            scores = np.full((len(chunk), self._x.shape[1]), -np.inf)
            if served.any():
                scores[served] = self.score_users(chunk[served])
            scores[:, ~self._seen_items] = -np.inf
            for row, u in enumerate(chunk):
                if 0 <= u < self._x.shape[0]:
                    lo, hi = self._x.indptr[u], self._x.indptr[u + 1]
                    scores[row, self._x.indices[lo:hi]] = -np.inf
                if excludes is not None and excludes[start + row] is not None:
                    ex = np.fromiter(excludes[start + row], dtype=np.int64)
                    scores[row, ex] = -np.inf
            order = np.argsort(-scores, axis=1, kind="stable")[:, :n]
            for row in range(len(chunk)):
                top = order[row]
                out[start + row] = top[np.isfinite(scores[row, top])].tolist()
        return out

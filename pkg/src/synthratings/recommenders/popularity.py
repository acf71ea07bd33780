"""Non-personalized baselines."""

import numpy as np

from .base import Recommender


class RandomRecommender(Recommender):
    """Uniformly random ranking; each user gets an independent, seed-fixed stream."""

    name = "Random"
    personalized = False
    requires_data = False

    def _fit(self, train):
        pass

    def score_users(self, users):
        m = self._x.shape[1]
        out = np.empty((len(users), m))
        for row, u in enumerate(np.asarray(users).tolist()):
            out[row] = np.random.default_rng([self.seed, u]).random(m)
        return out


class MostPopular(Recommender):
    name = "Most Popular"
    personalized = False

    def _fit(self, train):
        self.popularity = np.asarray(self._x.sum(axis=0)).ravel()

    def score_users(self, users):
        return np.broadcast_to(self.popularity, (len(users), len(self.popularity))).astype(np.float64)

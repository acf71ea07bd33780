"""The five recommenders used to compare datasets, behind one interface."""

from .base import Recommender
from .bpr import BPRMF
from .knn import UserKNN
from .popularity import MostPopular, RandomRecommender
from .wrmf import WRMF

ALGORITHMS = {
    "random": RandomRecommender,
    "mostpop": MostPopular,
    "userknn": UserKNN,
    "bprmf": BPRMF,
    "wrmf": WRMF,
}
DEFAULT_ALGORITHMS = tuple(ALGORITHMS)
PERSONALIZED = ("userknn", "bprmf", "wrmf")


def make(algorithm, seed=0, **params) -> Recommender:
    try:
        cls = ALGORITHMS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r} (expected one of {', '.join(ALGORITHMS)})") from None
    return cls(seed=seed, **params)


def fit(algorithm, train, hyperparams=None, seed=0) -> Recommender:
    return make(algorithm, seed=seed, **(hyperparams or {})).fit(train)


__all__ = [
    "ALGORITHMS", "DEFAULT_ALGORITHMS", "PERSONALIZED", "Recommender", "RandomRecommender",
    "MostPopular", "UserKNN", "BPRMF", "WRMF", "make", "fit",
]

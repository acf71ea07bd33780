"""Hold-out evaluation with top-N ranking metrics, and leaderboard comparison."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import recommenders
from .data import InteractionSet, stats

METRICS = ("precision", "recall", "ndcg")
REPORT_DIGITS = 6


@dataclass(frozen=True, eq=False)
class SplitPair:
    train: InteractionSet
    test: InteractionSet
    seed: int
    test_fraction: float


class Metrics(NamedTuple):
    precision: float
    recall: float
    ndcg: float


def random_split(ds: InteractionSet, fraction: float = 0.2, seed: int = 0) -> SplitPair:
    """Uniformly sample ``round(fraction * |ds|)`` interactions as the test set."""
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"test fraction must be in (0, 1), got {fraction}")
    total = len(ds)
    n_test = int(math.floor(fraction * total + 0.5))
    rng = np.random.default_rng(seed)
    mask = np.zeros(total, dtype=bool)
    mask[rng.choice(total, size=n_test, replace=False)] = True
    return SplitPair(train=ds.subset(~mask), test=ds.subset(mask), seed=seed, test_fraction=fraction)


def user_metrics(ranked, relevant, n) -> Metrics:
    """Precision, recall and NDCG at ``n`` for one user with binary relevance."""
    relevant = set(relevant)
    if not relevant:
        raise ValueError("user has no relevant items")
    dcg = 0.0
    hits = 0
    for rank, item in enumerate(ranked[:n], start=1):
        if item in relevant:
            hits += 1
            dcg += 1.0 / math.log2(rank + 1)
    ideal = sum(1.0 / math.log2(r + 1) for r in range(1, min(n, len(relevant)) + 1))
    return Metrics(hits / n, hits / len(relevant), dcg / ideal)


def evaluate(split: SplitPair, model: recommenders.Recommender, n: int = 10) -> Metrics:
    """Average per-user metrics over users that have test interactions."""
    test = split.test
    order = np.argsort(test.users, kind="stable")
    users, starts = np.unique(test.users[order], return_index=True)
    if len(users) == 0:
        return Metrics(0.0, 0.0, 0.0)
    bounds = np.append(starts, len(order))
    lists = model.recommend_many(users, n)
    acc = np.zeros((len(users), 3))
    for row, ranked in enumerate(lists):
        relevant = test.items[order[bounds[row]:bounds[row + 1]]].tolist()
        acc[row] = user_metrics(ranked, relevant, n)
    mean = acc.sum(axis=0) / len(users)
    return Metrics(*(float(v) for v in mean))


@dataclass
class EvalReport:
    records: list
    fingerprint: str
    seed: int
    n: int
    test_fraction: float = 0.2
    dataset: dict = field(default_factory=dict)

    @property
    def algorithms(self):
        return [r["algorithm"] for r in self.records]

    def value(self, algorithm, metric):
        for r in self.records:
            if r["algorithm"] == algorithm:
                return r[metric]
        raise KeyError(algorithm)

    def to_json(self):
        return {
            "records": self.records,
            "fingerprint": self.fingerprint,
            "seed": self.seed,
            "n": self.n,
            "test_fraction": self.test_fraction,
            "dataset": self.dataset,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(records=list(obj["records"]), fingerprint=obj["fingerprint"], seed=obj["seed"],
                   n=obj["n"], test_fraction=obj.get("test_fraction", 0.2), dataset=obj.get("dataset", {}))

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n",
                              encoding="utf-8", newline="\n")

    @classmethod
    def load(cls, path):
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))

    def table(self):
        head = f"{'Algorithm':<14}" + "".join(f"{m.capitalize() if m != 'ndcg' else 'NDCG':>12}" for m in METRICS)
        lines = [head, "-" * len(head)]
        for r in self.records:
            label = recommenders.ALGORITHMS[r["algorithm"]].name if r["algorithm"] in recommenders.ALGORITHMS else r["algorithm"]
            lines.append(f"{label:<14}" + "".join(f"{r[m]:>12.6f}" for m in METRICS))
        return "\n".join(lines)


def run_suite(ds: InteractionSet, algorithms=recommenders.DEFAULT_ALGORITHMS, seed: int = 0,
              n: int = 10, fraction: float = 0.2, hyperparams=None, fit_seed=None) -> EvalReport:
    """Split once, fit every algorithm on the same train view, report metrics."""
    if len(ds) == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    algorithms = list(algorithms)
    if not algorithms:
        raise ValueError("no algorithms requested")
    hyperparams = hyperparams or {}
    split = random_split(ds, fraction, seed)
    records = []
    for algo in algorithms:
        model = recommenders.fit(algo, split.train, hyperparams.get(algo), seed if fit_seed is None else fit_seed)
        m = evaluate(split, model, n)
        # stored at table precision so the JSON and text views agree
        records.append({"algorithm": algo, **{k: round(v, REPORT_DIGITS) for k, v in m._asdict().items()}})
    s = stats(ds)
    return EvalReport(records=records, fingerprint=ds.fingerprint(), seed=seed, n=n,
                      test_fraction=fraction, dataset=s._asdict())


class Comparison(NamedTuple):
    metric: str
    kendall_tau: float
    concordant: int
    discordant: int
    discordant_pairs: list


def compare_orderings(a: EvalReport, b: EvalReport, metric: str = "precision") -> Comparison:
    """Kendall tau-b between the algorithm rankings two reports induce.

    Tied pairs count as neither concordant nor discordant. If either ranking
    is entirely tied, tau is reported as 0.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    if sorted(a.algorithms) != sorted(b.algorithms):
        raise ValueError(f"algorithm sets differ: {sorted(a.algorithms)} vs {sorted(b.algorithms)}")
    algos = a.algorithms
    conc = disc = ties_a = ties_b = 0
    pairs = []
    for x, y in itertools.combinations(algos, 2):
        da = np.sign(a.value(x, metric) - a.value(y, metric))
        db = np.sign(b.value(x, metric) - b.value(y, metric))
        if da == 0:
            ties_a += 1
        if db == 0:
            ties_b += 1
        if da == 0 or db == 0:
            continue
        if da == db:
            conc += 1
        else:
            disc += 1
            pairs.append((x, y))
    n0 = len(algos) * (len(algos) - 1) // 2
    denom = math.sqrt((n0 - ties_a) * (n0 - ties_b))
    tau = (conc - disc) / denom if denom > 0 else 0.0
    return Comparison(metric, tau, conc, disc, pairs)

"""End-to-end runs: learn -> generate -> evaluate, the K sweep and the
reference / generated / baseline comparison."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from . import recommenders
from .clustering import kmeans
from .data import InteractionSet, stats
from .distributions import BehaviorModel, learn
from .evaluation import METRICS, EvalReport, compare_orderings, run_suite
from .generator import GenerationConfig, Mode, generate, generate_baseline

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Seeds:
    cluster: int = 0
    generate: int = 0
    split: int = 0


def learn_model(ds: InteractionSet, k: int, seed: int = 0, max_iter: int = 300, tol: float = 1e-4):
    cm = kmeans(ds, k, seed=seed, max_iter=max_iter, tol=tol)
    return learn(ds, cm), cm


def synthesize(ds: InteractionSet, k: int, seeds: Seeds, users=None) -> InteractionSet:
    model, _ = learn_model(ds, k, seeds.cluster)
    return generate(model, GenerationConfig(users=users or ds.user_count, seed=seeds.generate))


def baseline(ds: InteractionSet, seeds: Seeds, users=None) -> InteractionSet:
    cfg = GenerationConfig(users=users or ds.user_count, seed=seeds.generate,
                           mode=Mode.BASELINE, target_ratings=len(ds))
    return generate_baseline(ds, cfg)


def sweep(ds: InteractionSet, ks, seeds: Seeds = Seeds(), algorithms=recommenders.DEFAULT_ALGORITHMS,
          metrics=METRICS, n=10, users=None, hyperparams=None):
    """One evaluation block per K; yields CSV-ready rows ``(k, algorithm, metric, value)``."""
    ks = list(ks)
    if not ks:
        raise ValueError("empty K list")
    rows = []
    reports = {}
    for k in ks:
        gen = synthesize(ds, k, seeds, users)
        log.info("K=%d generated %s", k, stats(gen))
        report = run_suite(gen, algorithms, seed=seeds.split, n=n, hyperparams=hyperparams)
        reports[k] = report
        for rec in report.records:
            for m in metrics:
                rows.append((k, rec["algorithm"], m, rec[m]))
    return rows, reports


@dataclass
class ThreeWay:
    reference: EvalReport
    generated: EvalReport
    baseline: EvalReport
    datasets: dict

    def ordering(self, metric):
        return compare_orderings(self.generated, self.reference, metric)


def three_way(ds: InteractionSet, k: int = 200, seeds: Seeds = Seeds(),
              algorithms=recommenders.DEFAULT_ALGORITHMS, n=10, hyperparams=None) -> ThreeWay:
    gen = synthesize(ds, k, seeds)
    base = baseline(ds, seeds)
    run = lambda d: run_suite(d, algorithms, seed=seeds.split, n=n, hyperparams=hyperparams)
    return ThreeWay(reference=run(ds), generated=run(gen), baseline=run(base),
                    datasets={"reference": stats(ds), "generated": stats(gen), "baseline": stats(base)})


def load_model(path) -> BehaviorModel:
    return BehaviorModel.load(path)

"""Cluster-based synthetic implicit-feedback datasets and their offline evaluation."""

from .clustering import ClusterModel, kmeans
from .data import DatasetStats, InteractionSet, build_interaction_set, stats, user_vector, write_canonical
from .distributions import BehaviorModel, EmpiricalDistribution, learn
from .evaluation import EvalReport, compare_orderings, evaluate, random_split, run_suite
from .generator import GenerationConfig, Mode, generate, generate_baseline
from .ingest import SourceFormat, parse, read_canonical

__version__ = "0.1.0"

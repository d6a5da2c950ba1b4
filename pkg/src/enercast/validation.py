"""Fold plans and cross-validation driving.

Each fold gets its own scaling parameters, fitted only on that fold's
training partition, and a freshly initialized network.  Fold metrics are
computed in physical units after denormalizing the predictions.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dataset import fit_sample_normalizer, scale_samples
from .errors import AggregationError, FoldError, NumericError, PlanError
from .metrics import REPORT_FIELDS, MetricsReport, compute_report
from .network import NetworkConfig, TrainConfig, init_network, predict_many, train

MODES = ("chronological", "shuffled")
DEFAULT_K = 10


@dataclass(frozen=True)
class FoldPlan:
    k: int
    folds: tuple
    shuffle_seed: int
    mode: str

    @property
    def n(self):
        return sum(len(f) for f in self.folds)

    def training_indices(self, j):
        """All indices outside fold ``j``, in ascending order."""
        return np.sort(np.concatenate([f for i, f in enumerate(self.folds) if i != j]))


def make_folds(n, k, seed=0, mode="chronological"):
    """Partition ``range(n)`` into ``k`` folds whose sizes differ by at most 1.

    The first ``n % k`` folds get the extra index.  Chronological folds are
    contiguous blocks; shuffled folds deal a seeded permutation round-robin.
    """
    if mode not in MODES:
        raise PlanError(f"mode must be one of {MODES}, got {mode!r}")
    if k < 2 or k > n:
        raise PlanError(f"need 2 <= k <= n, got k={k}, n={n}")
    if mode == "chronological":
        sizes = [n // k + (1 if j < n % k else 0) for j in range(k)]
        bounds = np.cumsum([0] + sizes)
        folds = tuple(np.arange(bounds[j], bounds[j + 1]) for j in range(k))
    else:
        perm = np.random.default_rng(seed).permutation(n)
        folds = tuple(np.sort(perm[j::k]) for j in range(k))
    return FoldPlan(k, folds, seed, mode)


@dataclass
class FoldResult:
    fold_index: int
    report: MetricsReport
    train_report: object
    train_indices: np.ndarray
    validation_indices: np.ndarray
    params: object
    predictions: np.ndarray


@dataclass
class CrossValReport:
    per_fold: list
    mean_report: MetricsReport
    final_model: object
    final_params: object
    plan: FoldPlan

    @property
    def k(self):
        return self.plan.k

    def to_csv(self):
        lines = ["fold," + ",".join(REPORT_FIELDS)]
        for r in self.per_fold:
            lines.append(_report_row(str(r.fold_index), r.report))
        lines.append(_report_row("mean", self.mean_report))
        return "\n".join(lines) + "\n"


def _report_row(label, report):
    return label + "," + ",".join(f"{getattr(report, f):.6f}" for f in REPORT_FIELDS)


def aggregate_folds(results):
    """Unweighted mean of every metric across folds."""
    reports = [r.report if isinstance(r, FoldResult) else r for r in results]
    if not reports:
        raise AggregationError("no fold results to aggregate")
    means = {}
    for name in REPORT_FIELDS:
        total = 0.0
        for rep in reports:
            total += getattr(rep, name)
        means[name] = total / len(reports)
    return MetricsReport(**means)


def fit_and_train(raw, net_cfg, train_cfg):
    """Fit scaling on ``raw``, then train a fresh network on the scaled samples."""
    params = fit_sample_normalizer(raw)
    scaled = scale_samples(raw, params)
    net, report = train(init_network(net_cfg.with_inputs(raw.n_features)), scaled, train_cfg)
    return net, params, report


def _run_fold(j, raw, plan, net_cfg, train_cfg):
    train_idx = plan.training_indices(j)
    val_idx = plan.folds[j]
    try:
        net, params, train_report = fit_and_train(raw.subset(train_idx), net_cfg, train_cfg)
    except NumericError as exc:
        raise FoldError(j, exc) from exc
    val = scale_samples(raw.subset(val_idx), params)
    pred = params.inverse("consumption", predict_many(net, val.features))
    report = compute_report(raw.targets[val_idx], pred)
    return FoldResult(j, report, train_report, train_idx, val_idx, params, pred)


def cross_validate(raw, k=DEFAULT_K, seed=0, mode="chronological", net_cfg=None,
                   train_cfg=None, max_workers=None):
    """k-fold cross validation over raw (unscaled) samples.

    After the folds, a final model is trained on every sample with
    parameters fitted on every sample.  Folds may run on a thread pool;
    results are always ordered by fold index.
    """
    net_cfg = net_cfg or NetworkConfig()
    train_cfg = train_cfg or TrainConfig()
    plan = make_folds(len(raw), k, seed, mode)

    def run(j):
        return _run_fold(j, raw, plan, net_cfg, train_cfg)

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            per_fold = list(pool.map(run, range(plan.k)))
    else:
        per_fold = [run(j) for j in range(plan.k)]

    final_model, final_params, _ = fit_and_train(raw, net_cfg, train_cfg)
    return CrossValReport(per_fold, aggregate_folds(per_fold), final_model, final_params, plan)


def two_fold_validate(raw, seed=0, mode="chronological", net_cfg=None, train_cfg=None):
    return cross_validate(raw, 2, seed, mode, net_cfg, train_cfg)

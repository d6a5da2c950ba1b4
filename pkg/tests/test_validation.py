import numpy as np
import pytest
from hypothesis import given, strategies as st

from enercast.dataset import Dataset, MonthlyRecord, SampleSet, generate_synthetic, raw_samples
from enercast.errors import AggregationError, FoldError, PlanError
from enercast.metrics import REPORT_FIELDS, MetricsReport
from enercast.network import NetworkConfig, TrainConfig
from enercast.validation import (
    FoldResult,
    aggregate_folds,
    cross_validate,
    make_folds,
    two_fold_validate,
)


def sizes(plan):
    return [len(f) for f in plan.folds]


class TestMakeFolds:
    def test_even_split(self):
        assert sizes(make_folds(12, 2)) == [6, 6]

    def test_remainder_goes_first(self):
        assert sizes(make_folds(10, 3)) == [4, 3, 3]
        assert sizes(make_folds(10, 3, seed=4, mode="shuffled")) == [4, 3, 3]

    def test_chronological_blocks(self):
        plan = make_folds(12, 3, mode="chronological")
        assert [list(f) for f in plan.folds] == [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 10, 11]]

    def test_shuffled_deterministic(self):
        a = make_folds(30, 4, seed=5, mode="shuffled")
        b = make_folds(30, 4, seed=5, mode="shuffled")
        c = make_folds(30, 4, seed=6, mode="shuffled")
        assert all(np.array_equal(x, y) for x, y in zip(a.folds, b.folds))
        assert not all(np.array_equal(x, y) for x, y in zip(a.folds, c.folds))

    @pytest.mark.parametrize("n, k", [(5, 6), (5, 1), (5, 0)])
    def test_bad_k(self, n, k):
        with pytest.raises(PlanError):
            make_folds(n, k)

    def test_bad_mode(self):
        with pytest.raises(PlanError):
            make_folds(10, 2, mode="random")

    @given(st.data(), st.sampled_from(["chronological", "shuffled"]), st.integers(0, 2**31))
    def test_partition(self, data, mode, seed):
        n = data.draw(st.integers(2, 200))
        k = data.draw(st.integers(2, n))
        plan = make_folds(n, k, seed, mode)
        flat = np.concatenate(plan.folds)
        assert len(plan.folds) == k
        assert sorted(flat.tolist()) == list(range(n))
        assert max(sizes(plan)) - min(sizes(plan)) <= 1

    def test_training_indices(self):
        plan = make_folds(10, 3)
        assert plan.training_indices(1).tolist() == [0, 1, 2, 3, 7, 8, 9]


def report(v):
    return MetricsReport(*(float(v),) * len(REPORT_FIELDS))


class TestAggregate:
    def test_single(self):
        r = MetricsReport(1.0, 2.0, 3.0, 4.0, 5.0)
        assert aggregate_folds([r]) == r

    def test_mean(self):
        m = aggregate_folds([report(1.0), report(3.0)])
        assert m.mse == 2.0

    def test_order_free(self, rng):
        reps = [MetricsReport(*rng.uniform(0, 10, 5)) for _ in range(7)]
        a = aggregate_folds(reps)
        b = aggregate_folds(reps[::-1])
        for f in REPORT_FIELDS:
            assert getattr(a, f) == pytest.approx(getattr(b, f), rel=1e-14)

    def test_empty(self):
        with pytest.raises(AggregationError):
            aggregate_folds([])


TINY = TrainConfig(learning_rate=0.05, max_epochs=20, mse_tolerance=0.0, patience=100)


@pytest.fixture(scope="module")
def tiny_raw():
    return raw_samples(generate_synthetic(36, seed=11), 4)


class TestCrossValidate:
    def test_fold_count_and_reduction(self, tiny_raw):
        cfg = NetworkConfig((1, 3, 1))
        two = two_fold_validate(tiny_raw, seed=1, net_cfg=cfg, train_cfg=TINY)
        k2 = cross_validate(tiny_raw, 2, 1, net_cfg=cfg, train_cfg=TINY)
        assert len(two.per_fold) == 2
        assert two.to_csv() == k2.to_csv()
        assert two.final_model.equals(k2.final_model)

    def test_mean_matches_folds(self, tiny_raw):
        cv = cross_validate(tiny_raw, 4, 0, net_cfg=NetworkConfig((1, 3, 1)), train_cfg=TINY)
        assert len(cv.per_fold) == 4
        for f in REPORT_FIELDS:
            expected = np.mean([getattr(r.report, f) for r in cv.per_fold])
            assert getattr(cv.mean_report, f) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("mode", ["chronological", "shuffled"])
    def test_validation_samples_unseen(self, tiny_raw, mode):
        cv = cross_validate(tiny_raw, 5, 3, mode, NetworkConfig((1, 3, 1)), TINY)
        covered = []
        for r in cv.per_fold:
            assert not set(r.train_indices) & set(r.validation_indices)
            assert len(r.train_indices) + len(r.validation_indices) == len(tiny_raw)
            covered += list(r.validation_indices)
        assert sorted(covered) == list(range(len(tiny_raw)))

    def test_leakage(self, tiny_raw):
        cfg = NetworkConfig((1, 3, 1))
        base = cross_validate(tiny_raw, 3, 0, net_cfg=cfg, train_cfg=TINY)
        val = base.per_fold[1].validation_indices
        x = tiny_raw.features.copy()
        y = tiny_raw.targets.copy()
        x[val] *= 3.0
        y[val] *= 3.0
        perturbed = SampleSet(x, y, tiny_raw.timestamps, tiny_raw.lag_window)
        again = cross_validate(perturbed, 3, 0, net_cfg=cfg, train_cfg=TINY)
        assert again.per_fold[1].params == base.per_fold[1].params
        assert again.per_fold[0].params != base.per_fold[0].params

    def test_deterministic(self, tiny_raw):
        cfg = NetworkConfig((1, 3, 1))
        a = cross_validate(tiny_raw, 3, 2, "shuffled", cfg, TINY)
        b = cross_validate(tiny_raw, 3, 2, "shuffled", cfg, TINY)
        assert a.to_csv() == b.to_csv()

    def test_threaded_matches_serial(self, tiny_raw):
        cfg = NetworkConfig((1, 3, 1))
        a = cross_validate(tiny_raw, 4, 0, net_cfg=cfg, train_cfg=TINY)
        b = cross_validate(tiny_raw, 4, 0, net_cfg=cfg, train_cfg=TINY, max_workers=4)
        assert a.to_csv() == b.to_csv()

    def test_constant_targets_learned(self):
        base = generate_synthetic(40, 1, noise=0.0)
        recs = [
            MonthlyRecord(r.year, r.month, 90.0, r.temperature, r.humidity, r.population, r.gdp_per_capita)
            for r in base
        ]
        raw = raw_samples(Dataset(recs), 3)
        cv = cross_validate(raw, 4, 0, net_cfg=NetworkConfig((1, 4, 1)),
                            train_cfg=TrainConfig(0.05, 2000, 1e-14, 50))
        for r in cv.per_fold:
            assert r.report.mse < 1e-6

    def test_fold_error_names_fold(self, tiny_raw):
        with pytest.raises(FoldError) as info:
            cross_validate(tiny_raw, 2, 0, net_cfg=NetworkConfig((1, 3, 1)),
                           train_cfg=TrainConfig(learning_rate=1e6, max_epochs=5))
        assert info.value.fold_index == 0
        assert "fold 0" in str(info.value)

    def test_csv(self, tiny_raw):
        cv = cross_validate(tiny_raw, 3, 0, net_cfg=NetworkConfig((1, 3, 1)), train_cfg=TINY)
        lines = cv.to_csv().splitlines()
        assert lines[0] == "fold,mse,rmse_paper,rmse_standard,mae,mape_pct"
        assert [line.split(",")[0] for line in lines[1:]] == ["0", "1", "2", "mean"]
        assert all(len(line.split(",")[1].split(".")[1]) == 6 for line in lines[1:])

    def test_fold_result_type(self, tiny_raw):
        cv = cross_validate(tiny_raw, 2, 0, net_cfg=NetworkConfig((1, 3, 1)), train_cfg=TINY)
        assert all(isinstance(r, FoldResult) and r.fold_index == i for i, r in enumerate(cv.per_fold))
        assert aggregate_folds(cv.per_fold) == cv.mean_report

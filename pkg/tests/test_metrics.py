import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from enercast.errors import DomainError, PairingError
from enercast.metrics import (
    REPORT_FIELDS,
    MetricsReport,
    SeriesPair,
    compute_report,
    mae,
    mape,
    mse,
    rmse_paper,
    rmse_standard,
)
from enercast.pipeline import load_fixture_tables

from oracles import FROZEN, exact_metrics, table_strings

METRICS = {
    "mse": mse,
    "rmse_paper": rmse_paper,
    "rmse_standard": rmse_standard,
    "mae": mae,
    "mape_pct": mape,
}

# Six decimals keep nonzero errors far from squaring to zero.
finite = st.floats(min_value=-1e3, max_value=1e3).map(lambda v: round(v, 6))
positive = st.floats(min_value=0.5, max_value=1e3).map(lambda v: round(v, 6))


@st.composite
def series(draw, min_size=1, max_size=30, actual=finite):
    n = draw(st.integers(min_size, max_size))
    a = draw(st.lists(actual, min_size=n, max_size=n))
    f = draw(st.lists(finite, min_size=n, max_size=n))
    return a, f


class TestExamples:
    def test_mse(self):
        assert mse([3.0, 5.0, 7.0], [3.0, 5.0, 7.0]) == 0.0
        assert mse([2, 4], [1, 3]) == 1.0

    def test_rmse_paper(self):
        assert rmse_paper([2], [0]) == 2.0
        assert rmse_paper([3, 3], [1, 1]) == pytest.approx(math.sqrt(2), rel=1e-15)

    def test_rmse_standard(self):
        assert rmse_standard([2, 4], [1, 3]) == 1.0
        assert rmse_standard([5.0], [2.5]) == rmse_paper([5.0], [2.5])
        assert rmse_standard([2, 4], [1, 1]) != rmse_paper([2, 4], [1, 1])

    def test_mae(self):
        assert mae([1.5, 2.5], [1.5, 2.5]) == 0.0
        assert mae([1, -1], [0, 0]) == 1.0

    def test_mape(self):
        assert mape([100], [110]) == pytest.approx(10.0, rel=1e-15)
        assert mape([4.0, 8.0], [4.0, 8.0]) == 0.0

    def test_zero_error_report(self):
        r = compute_report([1.0, 2.0], [1.0, 2.0])
        assert all(v == 0.0 for v in r.as_dict().values())

    def test_report_matches_individual_calls(self, rng):
        a, f = rng.uniform(50, 150, 12), rng.uniform(50, 150, 12)
        r = compute_report(a, f)
        for name, fn in METRICS.items():
            assert getattr(r, name) == fn(a, f)

    def test_series_pair_argument(self):
        pair = SeriesPair([2, 4], [1, 3])
        assert pair.n == 2
        assert mse(pair) == 1.0
        with pytest.raises(TypeError):
            mse(pair, [1, 2])


class TestErrors:
    @pytest.mark.parametrize("fn", list(METRICS.values()))
    def test_length_mismatch(self, fn):
        with pytest.raises(PairingError):
            fn([1.0, 2.0], [1.0])

    def test_empty(self):
        with pytest.raises(PairingError):
            mse([], [])

    def test_mape_zero_actual(self):
        with pytest.raises(DomainError):
            mape([1.0, 0.0], [1.0, 1.0])

    def test_report_propagates_domain_error(self):
        with pytest.raises(DomainError):
            compute_report([0.0], [1.0])


class TestPublishedTables:
    @pytest.mark.parametrize("key", sorted(FROZEN))
    def test_oracle_still_produces_frozen_values(self, key):
        year, scheme = key
        exact = exact_metrics(table_strings(year, "actual"), table_strings(year, scheme))
        for name, value in FROZEN[key].items():
            assert float(exact[name]) == pytest.approx(value, rel=1e-15)

    @pytest.mark.parametrize("key", sorted(FROZEN))
    def test_metrics_match_oracle(self, key):
        pair = load_fixture_tables()[key]
        for name, fn in METRICS.items():
            assert fn(pair) == pytest.approx(FROZEN[key][name], rel=1e-9)

    def test_headline_values(self):
        pair = load_fixture_tables()[(2012, "2fold")]
        assert mse(pair) == pytest.approx(1.847, abs=1e-3)
        assert mae(pair) == pytest.approx(1.178, abs=1e-3)

    def test_rmse_paper_identity_on_fixture(self):
        r = compute_report(load_fixture_tables()[(2012, "2fold")])
        assert r.rmse_paper == pytest.approx(math.sqrt(r.mse / 12), rel=1e-12)


class TestProperties:
    @given(series())
    def test_non_negative(self, s):
        for name, fn in METRICS.items():
            if name != "mape_pct":
                assert fn(*s) >= 0.0

    @given(series())
    def test_zero_iff_equal(self, s):
        a, f = s
        for name, fn in METRICS.items():
            if name == "mape_pct":
                continue
            assert fn(a, a) == 0.0
            assert (fn(a, f) == 0.0) == (a == f)

    @given(series())
    def test_rmse_paper_identity(self, s):
        a, f = s
        expected = math.sqrt(mse(a, f) / len(a))
        assert rmse_paper(a, f) == pytest.approx(expected, rel=1e-12, abs=1e-300)

    @given(series())
    def test_mae_le_rmse(self, s):
        assert mae(*s) <= rmse_standard(*s) * (1 + 1e-12)

    @given(series(min_size=2), st.randoms(use_true_random=False))
    def test_permutation_invariance(self, s, rnd):
        a, f = s
        order = list(range(len(a)))
        rnd.shuffle(order)
        pa, pf = [a[i] for i in order], [f[i] for i in order]
        for fn in (mse, rmse_paper, rmse_standard, mae):
            assert fn(pa, pf) == pytest.approx(fn(a, f), rel=1e-12, abs=1e-12)

    @given(series(actual=positive), st.floats(min_value=1e-3, max_value=1e3))
    def test_mape_scale_invariance(self, s, c):
        a, f = s
        scaled = mape([c * v for v in a], [c * v for v in f])
        assert scaled == pytest.approx(mape(a, f), rel=1e-9, abs=1e-9)

    @given(series(), st.floats(min_value=-1e3, max_value=1e3))
    def test_mae_translation(self, s, c):
        a, f = s
        shifted = mae([v + c for v in a], [v + c for v in f])
        assert shifted == pytest.approx(mae(a, f), rel=1e-9, abs=1e-9)


def test_report_csv():
    r = MetricsReport(1.0, 0.5, 1.0, 0.25, 12.3456789)
    text = r.to_csv()
    assert text.splitlines()[0] == "metric,value"
    assert [line.split(",")[0] for line in text.splitlines()[1:]] == list(REPORT_FIELDS)
    assert "mape_pct,12.345679" in text


def test_left_to_right_summation():
    # np.sum is pairwise; the metrics promise a plain running sum
    a = np.full(100, 1.0)
    f = a - np.linspace(0, 1e-3, 100)
    running = 0.0
    for x, y in zip(a, f):
        running += (x - y) ** 2
    assert mse(a, f) == running / 100

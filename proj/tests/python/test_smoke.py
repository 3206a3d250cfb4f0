import math

import numpy as np
import pytest

import ares


def test_metrics():
    assert ares.rmse([1, 2, 3], [1, 2, 5]) == pytest.approx(1.154701, abs=1e-6)
    assert ares.relative_rmse([1.1, 2.2], [1, 2]) == pytest.approx(10.0)
    assert ares.pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8)
    with pytest.raises(ares.ShapeError):
        ares.rmse([1, 2], [1])
    with pytest.raises(ares.DomainError):
        ares.pearson([1, 1, 1], [1, 2, 3])


def test_week_and_regions():
    assert ares.week_from_date("2012-01-11") == "2012-01-08"
    assert len(ares.regions()) == 11
    with pytest.raises(ares.ParseError):
        ares.week_from_date("2015-02-29")


def test_ols_recovers_coefficients():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(40, 2))
    y = 0.5 * x[:, 0] - 2.0 * x[:, 1] + 1.0
    coefs, intercept = ares.fit_ols(x, y)
    assert coefs == pytest.approx([0.5, -2.0], abs=1e-10)
    assert intercept == pytest.approx(1.0, abs=1e-10)


def test_svr_fit_and_predict():
    x = np.linspace(0, 1, 20).reshape(-1, 1)
    y = 3.0 * x[:, 0] + 0.5
    model = ares.svr_fit(x, y, c=100.0, epsilon=0.01, tolerance=1e-6)
    pred = np.array(model.predict(x))
    assert np.max(np.abs(pred - y)) <= 0.01 + 1e-4
    w = model.weights()
    # The flattest line inside the tube has slope 3 - 2 * epsilon over x in [0, 1].
    assert w["raw_w"][0] == pytest.approx(2.98, abs=1e-4)
    rbf = ares.svr_fit(x, y, kernel="rbf", gamma=0.5)
    with pytest.raises(ares.KernelError):
        rbf.weights()


def test_synthetic_backtest_round_trip():
    ds = ares.generate(seed=3, weeks=90, regions=["hhs1"], noise_sd=0.05)
    again = ares.load_dataset(ds.athena_csv(), ds.cdc_csv(), first=ds.first_week, last=ds.last_week)
    assert again.cdc("hhs1") == ds.cdc("hhs1")
    report = ares.run_backtest(ds, "2009-06-28", "2010-07-04", "2010-09-26", models=["ar2", "linear"])
    region = report["regions"]["hhs1"]
    assert len(region["observed"]) == 13
    assert set(region["predictions"]) == {"ar2", "linear"}
    assert len(report["metrics"]) == 2
    assert all(math.isfinite(m["rmse"]) for m in report["metrics"])


def test_bad_input_raises_typed_errors():
    header = "region,week_start,total_visits,flu_vaccine_visits,flu_visits,ili_visits,viral_ili_visits\n"
    cdc = "region,week_start,unweighted_ili_percent\nhhs1,2012-01-08,1.0\n"
    with pytest.raises(ares.ValidationError):
        ares.load_dataset(header + "hhs1,2012-01-08,10000,50,30,80,60\n", cdc, first="2012-01-08", last="2012-01-08")
    with pytest.raises(ares.InputError):
        ares.load_dataset(header + "hhs1,2012-01-08,10000,5x,30,80,120\n", cdc, first="2012-01-08", last="2012-01-08")

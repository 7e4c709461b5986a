import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from laurent_mtr import metrics
from laurent_mtr.errors import AllExcluded, EmptyInput, LengthMismatch, ShapeMismatch
from laurent_mtr.metrics import MetricsReport, mae, mape, report, rmse


def test_mae_examples():
    assert mae([1, 2, 3], [1, 2, 3]) == 0
    assert mae([1, 3], [2, 1]) == 1.5
    assert mae([10], [7]) == 3


def test_mape_examples():
    assert mape([2], [1]) == (50.0, 0)
    assert mape([1e-12, 2], [5, 2], zero_tol=1e-8) == (0.0, 1)
    assert mape([3, 4], [3, 4])[0] == 0
    with pytest.raises(AllExcluded):
        mape([0, 0], [1, 1])


def test_rmse_examples():
    assert rmse([0, 0], [3, 4]) == pytest.approx(math.sqrt(12.5))
    assert rmse([1, 2, 3], [3.5, 4.5, 5.5]) == pytest.approx(2.5)
    assert rmse([1, 2], [1, 2]) == 0


def test_errors():
    with pytest.raises(LengthMismatch):
        mae([1, 2], [1])
    with pytest.raises(EmptyInput):
        rmse([], [])
    with pytest.raises(ShapeMismatch):
        report(np.ones((3, 2)), np.ones((3, 1)))


def test_report_averages():
    Y = np.array([[1.0, 1.0], [2.0, 2.0]])
    Yhat = Y + np.array([[0.40, 1.02], [-0.40, -1.02]])
    r = report(Y, Yhat)
    assert r.avg_mae == pytest.approx(0.71)
    single = report(Y[:, :1], Yhat[:, :1])
    assert (single.avg_mae, single.avg_mape, single.avg_rmse) == (
        single.targets[0].mae, single.targets[0].mape, single.targets[0].rmse)


def test_report_permutation_invariant(rng):
    Y, Yhat = rng.normal(5, 1, size=(40, 2)), rng.normal(5, 1, size=(40, 2))
    perm = rng.permutation(40)
    a, b = report(Y, Yhat), report(Y[perm], Yhat[perm])
    for x, y in zip(a.targets, b.targets):
        assert x.mae == pytest.approx(y.mae, rel=1e-14)
        assert x.rmse == pytest.approx(y.rmse, rel=1e-14)


def test_serialisation(rng):
    r = report(rng.normal(5, 1, size=(10, 2)), rng.normal(5, 1, size=(10, 2)), target_names=["a", "b"])
    assert MetricsReport.from_dict(json.loads(r.to_json())) == r
    text = metrics.table_csv([("net", r)])
    header, row = text.strip().split("\n")
    assert header == ("model,mae_y1,mae_y2,avg_mae,mape_y1,mape_y2,avg_mape,"
                      "rmse_y1,rmse_y2,avg_rmse")
    assert float(row.split(",")[3]) == r.avg_mae


@settings(deadline=None)
@given(arrays(float, st.integers(1, 50),
              elements=st.floats(-1e3, 1e3).filter(lambda v: v == 0 or abs(v) > 1e-100)),
       st.floats(-1e3, 1e3))
def test_rmse_at_least_mae(e, c):
    y = np.zeros_like(e)
    assert rmse(y, e) >= mae(y, e) * (1 - 1e-12)
    assert rmse(y, np.full_like(e, c)) == pytest.approx(abs(c))

import math

import pytest

import mhdbl

SMALL = "grid.nx = 16\ngrid.ny = 192\ngrid.ymax = 30\ntime.t_final = 2\ntime.sample_interval = 0.25\n"


def test_zero_run_stays_zero():
    cols, summary = mhdbl.simulate(SMALL, {"scenario.id": "zero"})
    assert summary["status"] == "completed"
    assert all(v == 0.0 for v in cols["norm_ub"])
    assert all(v == 0.0 for v in cols["theta"])
    assert cols["t"][-1] == pytest.approx(2.0)


def test_standard_run_is_deterministic():
    a, _ = mhdbl.simulate(SMALL)
    b, _ = mhdbl.simulate(SMALL)
    assert a == b
    assert all(math.isfinite(x) for x in a["norm_gh"])
    assert all(x > y for x, y in zip(a["t"][1:], a["t"][:-1]))


def test_unknown_key():
    with pytest.raises(mhdbl.ConfigError, match="params.kapa"):
        mhdbl.canonical_config("params.kapa = 1\n")


def test_fit_exact_power_law():
    t = [10.0 * k for k in range(1, 40)]
    v = [3.0 * (1.0 + x) ** -0.75 for x in t]
    e, se, n = mhdbl.fit_decay(t, v, 10.0, 390.0)
    assert e == pytest.approx(-0.75, abs=1e-10)
    assert n == 39


def test_sup_constants_and_verify():
    s1, s2 = mhdbl.sup_constants()
    assert abs(s1 - 0.541044) < 1e-5
    assert abs(s2 - 0.886227) < 1e-6
    rep = mhdbl.verify("poincare", 3)
    assert rep["pass"]

import csv

import numpy as np
import pytest

from sqgci.scheme.params import ConfigError, SchemeParams
from sqgci.verification.scaling import (ALL_QUANTITIES, CHECKS, ScalingStudySpec, loglog_fit, measure, scaling_study,
                                        write_csv)


def test_loglog_fit_exact_power():
    lams = [64, 256, 1024, 4096]
    f = loglog_fit(lams, [3.0 * lam ** -0.25 for lam in lams])
    assert abs(f.slope + 0.25) <= 1e-12 and abs(f.intercept - np.log(3.0)) <= 1e-12 and f.residual <= 1e-12


def test_loglog_fit_nonpositive():
    for vals in ([1.0, 0.0], [1.0, -1.0], [1.0, np.nan], [1.0]):
        assert np.isnan(loglog_fit([64, 256][: len(vals)], vals).slope)


@pytest.mark.parametrize("lams,qs", [((64,), ALL_QUANTITIES), ((256, 64), ALL_QUANTITIES),
                                     ((64, 128), ALL_QUANTITIES), ((64, 256), ("nope",))])
def test_spec_validation(lams, qs):
    with pytest.raises(ConfigError):
        ScalingStudySpec(lams, qs)


def test_spec_orders_quantities():
    s = ScalingStudySpec([64, 256], ("R_D", "w_L1"))
    assert s.lambdas == (64, 256) and s.quantities == ("w_L1", "R_D")


def test_targets():
    assert CHECKS["w_L1"][1] == -0.25 and CHECKS["mikado_W_L1"][1] == -0.25
    assert CHECKS["w_L2"][1] == 0.0 and CHECKS["w_Linf"][1] == 0.25


def test_measure_degenerate_lambda(C):
    m = measure(256, SchemeParams(), ("w_L1", "R_D", "R_O", "oscillation_ratio"), C)
    assert m["w_L1"] == 0.0 and m["R_D"] == 0.0
    assert m["R_O"] > 0 and abs(m["oscillation_ratio"] - 1.0) < 1e-12


def test_riemann_study_and_csv(tmp_path, C):
    spec = ScalingStudySpec([64, 256], ("riemann_rel_error", "riemann_C_prime", "mikado_W_L1"))
    res = scaling_study(spec, SchemeParams(), C)
    assert res.values["riemann_rel_error"] == [1.0, 1.0]
    assert res.checks["riemann_rel_error"][0] is False
    assert abs(res.fits["mikado_W_L1"].slope + 0.25) <= 1e-6
    write_csv(res, tmp_path / "v.csv", tmp_path / "f.csv")
    rows = list(csv.reader(open(tmp_path / "v.csv")))
    assert rows[0] == ["lambda", "quantity", "value"] and len(rows) == 1 + 2 * 3
    assert rows[1][:2] == ["64", "riemann_rel_error"] and float(rows[1][2]) == 1.0
    fits = list(csv.DictReader(open(tmp_path / "f.csv")))
    assert [r["quantity"] for r in fits] == list(spec.quantities)
    assert {r["pass"] for r in fits} <= {"True", "False", ""}

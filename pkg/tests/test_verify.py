import json
import math
import re

import numpy as np
import pytest

from curvop.verify import classify, compare, report_json, run_verify

FLAGGED = {"Rashba: ConeRSOC row 3", "Dresselhaus: ConeDSOC row 2"}


@pytest.fixture(scope="module")
def report():
    return run_verify(phi=math.pi / 6, nu=12, nv=12)


def test_report_ok_with_flagged_rows(report):
    assert report["ok"]
    assert report["summary"]["failed"] == []
    assert set(report["summary"]["flagged"]) == FLAGGED


def test_cylinder_and_geometry_hard_pass(report):
    hard = [c for c in report["checks"]
            if c["group"].startswith("cylinder") or re.fullmatch(r"C\d+", c["source"])
            or c["group"] in ("cone H", "cone P", "cone L")]
    assert len(hard) > 30
    assert all(c["status"] == "pass" for c in hard)


def test_record_fields(report):
    keys = {"quantity", "source", "point", "oracle", "pipeline", "abs_err", "rel_err", "pass", "status"}
    assert all(keys <= set(c) for c in report["checks"])


def test_flagged_rows_within_loose_tolerance(report):
    # the flagged rows are real discrepancies, not roundoff
    for c in report["checks"]:
        if c["status"] == "flagged":
            assert c["rel_err"] > 1e-3


def test_compare_absolute_when_oracle_zero():
    pts = (np.zeros(3), np.zeros(3))
    c = compare("K", "x", np.array([0.0, 1e-13, 0.0]), 0.0, pts, 1e-12)
    assert c["metric"] == "absolute" and c["pass"]
    c = compare("K", "x", np.array([0.0, 1e-11, 0.0]), 0.0, pts, 1e-12)
    assert not c["pass"]


def test_classify_hard_fail_when_cylinder_fails():
    def rec(group, ok, source="row"):
        return {"group": group, "pass": ok, "source": source}
    checks = classify([rec("cone Rashba", False), rec("cylinder Rashba", True)])
    assert checks[0]["status"] == "flagged"
    checks = classify([rec("cone Rashba", False), rec("cylinder Rashba", False)])
    assert checks[0]["status"] == "fail"
    checks = classify([rec("cone Rashba", False), rec("cone Rashba", False, "other")])
    assert {c["status"] for c in checks} == {"fail"}


def test_tolerance_override():
    rep = run_verify(nu=6, nv=6, tol=1e-30)
    assert not rep["ok"]


def test_json_deterministic(report):
    a = report_json(report)
    b = report_json(run_verify(phi=math.pi / 6, nu=12, nv=12))
    assert a == b
    assert json.loads(a)["summary"]["total"] == report["summary"]["total"]

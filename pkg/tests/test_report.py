import csv
import io
import json
import math
from fractions import Fraction

import jsonschema
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wardlab import catalogue
from wardlab.classifiers import classify, stat_upward_hqc_verdict
from wardlab.density import AnalysisConfig, Status, Verdict
from wardlab.report import (
    CSV_HEADER,
    SCHEMA_VERSION,
    Report,
    density_from_dict,
    density_to_dict,
    load_schema,
    verdict_from_dict,
    verdict_to_dict,
)

config = AnalysisConfig(horizon=2000)


def _classify_report(name="alternating", labels=None):
    seq = catalogue.get(name)
    report = Report("classify", ["--seq", name], config, timestamp="2000-01-01T00:00:00+00:00")
    for label, v in classify(seq, labels, config).entries.items():
        report.results.append({"kind": "classification", "subject": name, "class": label,
                               "status": v.status.value, "verdict": verdict_to_dict(v)})
    return report


def test_report_validates_against_schema():
    report = _classify_report()
    jsonschema.validate(json.loads(report.to_json()), load_schema())
    assert report.to_dict()["schemaVersion"] == SCHEMA_VERSION


def test_round_trip_is_lossless():
    report = _classify_report()
    again = Report.from_dict(json.loads(report.to_json()))
    assert again.to_json() == report.to_json()
    v = stat_upward_hqc_verdict(catalogue.get("alternating"), config)
    assert verdict_from_dict(json.loads(json.dumps(verdict_to_dict(v)))) == v


def test_non_finite_metric_serializes():
    v = Verdict(Status.VIOLATED, 10, witness_indices=(3,), metric=math.inf, note="diverges")
    d = json.loads(json.dumps(verdict_to_dict(v), allow_nan=False))
    assert d["metric"] == "Infinity"
    assert verdict_from_dict(d).metric == math.inf


@given(st.fractions(min_value=0, max_value=1))
def test_density_round_trip(q):
    d = density_to_dict(q)
    assert density_from_dict(d) == q
    assert Fraction(d["decimal"]) == pytest.approx(q, abs=1e-27)


def test_csv_rows_descend_in_epsilon():
    report = _classify_report(labels=["statUpHalfQuasiCauchy"])
    rows = list(csv.reader(io.StringIO(report.to_csv())))
    assert tuple(rows[0]) == CSV_HEADER
    up = rows[1:]
    assert {r[0] for r in up} == {"statUpHalfQuasiCauchy"}
    eps = [float(r[2]) for r in up]
    assert eps == sorted(config.epsilon_grid, reverse=True)
    assert {r[1] for r in up} == {"violated"}
    assert all(r[4] == "2000" for r in rows[1:])


def test_output_is_deterministic():
    a, b = _classify_report(), _classify_report()
    assert a.to_json() == b.to_json() and a.to_csv() == b.to_csv() and a.to_text() == b.to_text()


def test_text_mentions_each_class():
    text = _classify_report("identity").to_text()
    assert text.startswith("classify: horizon 2000")
    assert "statUpHalfQuasiCauchy: satisfied" in text
    assert "statDownHalfQuasiCauchy: violated" in text

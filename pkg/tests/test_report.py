import json

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from crnlap import networks
from crnlap.random_networks import random_system
from crnlap.report import SCHEMA_VERSION, AnalysisReport, analyze, num, render_text


def test_num_rounding():
    assert num(1 / 3) == 0.333333333333
    assert num(3e-17) == 0.0
    assert num(float("inf")) is None
    assert num(-0.0) == 0.0


def test_report_contents(ex2):
    rep = analyze(ex2)
    assert rep.schema_version == SCHEMA_VERSION
    assert rep.deficiency.delta_L == 0 and not rep.deficiency.csc
    assert rep.verdict.verdict == "NoPositiveEquilibrium"
    assert rep.equilibria == []
    np.testing.assert_allclose(rep.kernel.conservation_basis, [[1, 0, 0, 0, 0, 0]])
    text = render_text(rep)
    assert "NoPositiveEquilibrium" in text


def test_report_round_trip_shipped():
    for name in ("ex1.crn", "ex2.crn", "star3.json", "ab.crn", "deficiency_one.crn"):
        rep = analyze(networks.shipped(name))
        again = AnalysisReport.from_json(rep.to_json())
        assert again == rep
        assert again.to_json() == rep.to_json()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_report_round_trip_random(seed):
    rep = analyze(random_system(np.random.default_rng(seed)))
    text = rep.to_json()
    assert AnalysisReport.from_dict(json.loads(text)).to_json() == text

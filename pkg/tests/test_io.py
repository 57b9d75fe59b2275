import io

import numpy as np
import pytest

from icatopsis.core import IdealPair, RankingOutcome, ValidationError
from icatopsis.io import (
    instance_from_json,
    instance_to_json,
    load_countries,
    read_decision_csv,
    read_ranking_csv,
    write_decision_csv,
    write_ranking_csv,
)
from icatopsis.synth import generate_random_instance
from icatopsis.topsis import topsis_rank

HEADER = "alternative,forest_area_pct,gni_per_capita_usd,life_expectancy_years\n"


def _read(text):
    return read_decision_csv(io.StringIO(text))


def test_reads_alternatives_as_columns():
    m = _read(HEADER + "A83,68.9229,57880,82.2049\nA52, 1.0 ,2,3\n")
    assert m.alternative_ids == ("A83", "A52")
    assert m.criterion_ids == ("forest_area_pct", "gni_per_capita_usd", "life_expectancy_years")
    assert m.values[:, 0].tolist() == [68.9229, 57880.0, 82.2049]
    assert m.values[:, 1].tolist() == [1.0, 2.0, 3.0]


def test_reads_from_path(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text(HEADER + "A,1,2,3\nB,4,5,6\n")
    assert read_decision_csv(p).shape == (3, 2)
    assert read_decision_csv(str(p)).shape == (3, 2)


def test_header_only():
    with pytest.raises(ValidationError, match="at least two"):
        _read(HEADER)


def test_blank_cell_is_named():
    with pytest.raises(ValidationError, match=r"line 3, column 3 \(gni_per_capita_usd\)") as info:
        _read(HEADER + "A,1,2,3\nB,4,,6\n")
    assert info.value.location == (3, 3)


@pytest.mark.parametrize(
    "body, pattern",
    [
        ("A,1,2,3\nB,4,x,6\n", "non-numeric"),
        ("A,1,2,3\nB,4,nan,6\n", "non-finite"),
        ("A,1,2,3\nB,4,5\n", "has 3 cells"),
        ("A,1,2,3\nA,4,5,6\n", "duplicate alternative"),
        ("A,1,2,3\n,4,5,6\n", "blank alternative label"),
    ],
)
def test_malformed_rows(body, pattern):
    with pytest.raises(ValidationError, match=pattern):
        _read(HEADER + body)


def test_bad_headers():
    with pytest.raises(ValidationError):
        _read("")
    with pytest.raises(ValidationError):
        _read("alternative\nA\nB\n")
    with pytest.raises(ValidationError, match="duplicate criterion"):
        _read("alt,c,c\nA,1,2\nB,3,4\n")


def test_decision_csv_round_trip():
    m = _read(HEADER + "A83,68.9229,57880,82.2049\nA52,0.1,1e-300,3.333333333333333\n")
    out = io.StringIO()
    write_decision_csv(m, out)
    back = _read(out.getvalue())
    assert np.array_equal(back.values, m.values)
    assert back.alternative_ids == m.alternative_ids and back.criterion_ids == m.criterion_ids


def test_ranking_csv_dominance():
    outcome = topsis_rank([[2.0, 1.0], [2.0, 1.0]]).outcome
    text = write_ranking_csv(outcome, ["A", "B"]).getvalue()
    assert text.splitlines() == ["position,alternative,closeness", "1,A,1.000000000", "2,B,0.000000000"]


def test_ranking_csv_round_trip_and_sorted():
    outcome = topsis_rank(np.random.default_rng(0).uniform(size=(3, 12))).outcome
    rows = read_ranking_csv(write_ranking_csv(outcome))
    assert [p for p, _, _ in rows] == list(range(1, 13))
    assert [a for _, a, _ in rows] == [f"A{i + 1}" for i in outcome.order]
    closeness = [c for _, _, c in rows]
    assert closeness == sorted(closeness, reverse=True)
    np.testing.assert_allclose(closeness, outcome.closeness[outcome.order], atol=5e-10)


def test_ranking_labels_checked():
    with pytest.raises(ValidationError):
        write_ranking_csv(RankingOutcome(np.array([0.2, 0.8]), IdealPair([1.0], [0.0])), ["only"])
    with pytest.raises(ValidationError):
        read_ranking_csv(io.StringIO("rank,name,score\n1,A,0.5\n"))


def test_country_fixture():
    m = load_countries()
    assert m.shape == (3, 16)
    k = m.alternative_ids.index("A83")
    assert m.values[:, k].tolist() == [68.9229, 57880.0, 82.2049]


def test_instance_json_round_trip():
    inst = generate_random_instance(3, 20, 25.0, seed=4)
    back = instance_from_json(instance_to_json(inst))
    for field in ("latents", "mixing", "noise", "observed"):
        assert np.array_equal(getattr(back, field), getattr(inst, field))
    assert back.snr_db == 25.0 and back.seed == 4

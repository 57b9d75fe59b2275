import logging
import warnings

import numpy as np
import pytest

from icatopsis.core import ValidationError
from icatopsis.metrics import measure_snr
from icatopsis.synth import (
    add_noise_at_snr,
    generate_instance,
    generate_latents,
    generate_random_instance,
    make_mixing_2x2,
    make_mixing_random,
)


def test_latents_support_mean_and_reproducibility():
    l = generate_latents(4, 2500, seed=1)
    assert l.shape == (4, 2500)
    assert l.min() >= 0.0 and l.max() <= 1.0
    assert l.mean() == pytest.approx(0.5, abs=0.02)
    assert np.array_equal(l, generate_latents(4, 2500, seed=1))
    assert not np.array_equal(l, generate_latents(4, 2500, seed=2))


def test_latents_validation():
    with pytest.raises(ValidationError):
        generate_latents(0, 10)
    with pytest.raises(ValidationError):
        generate_latents(2, 1)


def test_mixing_2x2():
    assert make_mixing_2x2(0.7, -0.25).tolist() == [[1.0, 0.7], [-0.25, 1.0]]
    assert np.array_equal(make_mixing_2x2(0.0, 0.0), np.eye(2))
    assert np.linalg.det(make_mixing_2x2(0.75, 0.75)) == pytest.approx(0.4375, abs=1e-15)


def test_mixing_2x2_warns_outside_regime():
    with pytest.warns(RuntimeWarning):
        make_mixing_2x2(0.9, 0.0)


def test_mixing_random_construction():
    for seed in range(200):
        a = make_mixing_random(4, seed=seed)
        assert np.array_equal(np.diag(a), np.ones(4))
        off = a[~np.eye(4, dtype=bool)]
        assert np.all(np.abs(off) <= 0.75)


def test_mixing_random_two_criteria_is_2x2_family():
    a = make_mixing_random(2, seed=3)
    assert np.array_equal(a, make_mixing_2x2(a[0, 1], a[1, 0]))


def test_mixing_random_five_criteria_conditioning(caplog):
    with caplog.at_level(logging.DEBUG, logger="icatopsis.synth"):
        conds = [np.linalg.cond(make_mixing_random(5, seed=s)) for s in range(1000)]
    assert max(conds) <= 1e6
    assert not any("rejected" in r.message for r in caplog.records)
    assert sum("accepted" in r.message for r in caplog.records) == 1000


def test_mixing_random_validation():
    with pytest.raises(ValidationError):
        make_mixing_random(3, (-1.0, 0.5))
    with pytest.raises(ValidationError):
        make_mixing_random(3, (0.5, -0.5))


def test_mixing_random_gives_up():
    # [[1, c], [c, 1]] has condition (1 + c) / (1 - c), about 4e6 here
    with pytest.raises(ValidationError, match="condition"):
        make_mixing_random(2, (0.9999995, 0.9999995), seed=0)


def test_noiseless():
    s = np.random.default_rng(0).uniform(size=(2, 10))
    v, g = add_noise_at_snr(s, None)
    assert np.array_equal(v, s) and not g.any()
    v, g = add_noise_at_snr(s, float("inf"))
    assert np.array_equal(v, s) and not g.any()


@pytest.mark.parametrize("snr", [0.0, 10.0, 30.0, 50.0])
def test_exact_realized_snr(snr):
    s = np.random.default_rng(1).uniform(size=(3, 100))
    v, g = add_noise_at_snr(s, snr, seed=4)
    assert np.mean(s**2) / np.mean(g**2) == pytest.approx(10 ** (snr / 10), rel=1e-9)
    assert measure_snr(s, g) == pytest.approx(snr, abs=0.1)
    assert np.array_equal(v - s, g)


def test_noise_is_zero_mean_gaussian():
    s = np.ones((2, 20_000))
    _, g = add_noise_at_snr(s, 0.0, seed=5)
    assert abs(g.mean()) < 0.02
    assert abs(np.mean(g**4) / np.mean(g**2) ** 2 - 3.0) < 0.15


def test_zero_signal():
    with pytest.raises(ValidationError):
        add_noise_at_snr(np.zeros((2, 5)), 10.0)


def test_instance_regenerates_bit_identically():
    a = generate_random_instance(3, 50, 25.0, seed=9)
    b = generate_random_instance(3, 50, 25.0, seed=9)
    for field in ("latents", "mixing", "noise", "observed"):
        assert np.array_equal(getattr(a, field), getattr(b, field))
    assert a.snr_db == 25.0 and a.seed == 9


def test_mixed_rows_are_correlated():
    for alpha, beta in ((0.3, 0.0), (0.0, -0.3), (0.5, 0.5), (-0.25, 0.7)):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            inst = generate_instance(make_mixing_2x2(alpha, beta), 1000, None, seed=10)
        assert abs(np.corrcoef(inst.observed)[0, 1]) > 0.1

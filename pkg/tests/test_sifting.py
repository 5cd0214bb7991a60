import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modekit import emd
from modekit.errors import ConfigError, LengthMismatch, TooFewExtrema
from modekit.experiments import default_corpus
from modekit.signal import EnvelopePair, local_mean
from modekit.sifting import (
    CRITERION_SATISFIED,
    IMF_CHECK_SATISFIED,
    MAX_ITER_REACHED,
    DualThreshold,
    FixedExact,
    FixedWithImfCheck,
    StandardDeviation,
    criterion_class,
    criterion_from_dict,
    dual_threshold_satisfied,
    extract_imf,
    imf_condition_holds,
    sd_value,
    sift_once,
)

from conftest import sine
from oracles import brute_extrema, brute_zero_crossings, interior, pearson

ALL_CRITERIA = [FixedWithImfCheck(), FixedExact(), StandardDeviation(), DualThreshold()]


def _envelope(mean, amplitude):
    mean = np.asarray(mean, float)
    amplitude = np.asarray(amplitude, float)
    return EnvelopePair.from_bounds(mean + amplitude, mean - amplitude)


# sift_once ---------------------------------------------------------------

def test_sift_once_sine_is_near_fixed_point():
    h = sine(5, 200, 1024)
    d, _ = sift_once(h)
    assert np.max(np.abs(interior(d - h))) < 0.05


def test_sift_once_removes_constant():
    s = sine(5, 200, 1024)
    d, _ = sift_once(s + 3.0)
    assert np.max(np.abs(interior(d - s))) < 0.05


def test_sift_once_identity_with_mean():
    rng = np.random.default_rng(3)
    h = rng.standard_normal(300)
    d, env = sift_once(h)
    np.testing.assert_array_equal(h - d, h - (h - env.mean))
    np.testing.assert_allclose(h - d, env.mean, rtol=0, atol=1e-12)
    assert d.shape == h.shape


# imf_condition_holds -----------------------------------------------------

def test_imf_condition_sine():
    s = sine(5, 200, 1024)
    ext = len(brute_extrema(s)[0]) + len(brute_extrema(s)[1])
    assert abs(brute_zero_crossings(s) - ext) <= 1
    assert imf_condition_holds(s)


def test_imf_condition_offset_sine_fails():
    assert not imf_condition_holds(sine(5, 200, 1024) + 3.0, 0.05)


def test_imf_condition_hump_fails():
    assert not imf_condition_holds([0, 1, 2, 1, 0])


# sd_value ----------------------------------------------------------------

def test_sd_identical_is_zero():
    x = np.array([0.3, -1.0, 2.0, 0.0])
    assert sd_value(x, x) == 0.0


def test_sd_hand_values():
    assert sd_value([1, 1], [0, 0]) == pytest.approx(2.0)
    assert sd_value([2, 0], [1, 0]) == pytest.approx(0.25)


def test_sd_length_mismatch():
    with pytest.raises(LengthMismatch):
        sd_value([1, 2, 3], [1, 2])


@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=50), st.floats(-1, 1))
def test_sd_non_negative(values, shift):
    a = np.array(values)
    assert sd_value(a, a + shift) >= 0.0


# dual_threshold_satisfied ------------------------------------------------

def test_dual_zero_mean():
    env = _envelope(np.zeros(100), np.ones(100))
    assert dual_threshold_satisfied(env, 0.01, 0.02, 0.5)
    assert dual_threshold_satisfied(env)


def test_dual_uniform_sigma_below():
    env = _envelope(np.full(100, 0.04), np.ones(100))
    assert dual_threshold_satisfied(env, theta1=0.05)


def test_dual_fraction_rule():
    sigma = np.full(100, 0.04)
    sigma[:4] = 0.4
    env = _envelope(sigma, np.ones(100))
    assert dual_threshold_satisfied(env, 0.05, 0.5, 0.05)
    assert not dual_threshold_satisfied(env, 0.05, 0.5, 0.01)


def test_dual_local_threshold_violation():
    sigma = np.full(100, 0.0)
    sigma[50] = 0.6
    assert not dual_threshold_satisfied(_envelope(sigma, np.ones(100)), 0.05, 0.5, 0.05)


def test_dual_ignores_vanishing_amplitude():
    amp = np.ones(100)
    amp[10] = 0.0
    mean = np.zeros(100)
    mean[10] = 0.3
    assert dual_threshold_satisfied(_envelope(mean, amp))


# extract_imf examples ----------------------------------------------------

def test_extract_sine_fast():
    s = sine(5, 200, 1024)
    res = extract_imf(s, DualThreshold())
    assert res.iterations <= 3
    assert pearson(res.imf, s) > 0.999


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_fixed_exact_count(seed):
    x = np.random.default_rng(seed).standard_normal(512)
    assert extract_imf(x, FixedExact(n=10)).iterations == 10


def test_extract_two_tone_first_mode(two_tone):
    x, _, high = two_tone
    res = extract_imf(x, DualThreshold())
    assert pearson(interior(res.imf), interior(high)) > 0.95


def test_extract_monotone_raises():
    with pytest.raises(TooFewExtrema):
        extract_imf(np.arange(50.0))


# invariants --------------------------------------------------------------

def _corpus_inputs():
    return [e.signal.samples for e in default_corpus(1024)[:6]]


def test_idempotent_dual():
    crit = DualThreshold()
    for x in _corpus_inputs():
        res = extract_imf(x, crit)
        if res.stop_reason != CRITERION_SATISFIED:
            continue
        env = local_mean(res.imf)
        assert dual_threshold_satisfied(env, crit.theta1, crit.theta2, crit.alpha,
                                        scale=np.max(np.abs(res.imf)))


def test_idempotent_sd():
    crit = StandardDeviation()
    for x in _corpus_inputs():
        res = extract_imf(x, crit)
        if res.stop_reason != CRITERION_SATISFIED or res.iterations < 2:
            continue
        prev = extract_imf(x, FixedExact(n=res.iterations - 1)).imf
        assert sd_value(prev, res.imf) < crit.sd_threshold


def test_idempotent_fixed_check():
    crit = FixedWithImfCheck()
    for x in _corpus_inputs():
        res = extract_imf(x, crit)
        if res.stop_reason == IMF_CHECK_SATISFIED:
            assert imf_condition_holds(res.imf, crit.mean_tolerance)
            assert res.iterations >= crit.n


@pytest.mark.parametrize("crit", ALL_CRITERIA, ids=lambda c: c.label)
@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(16, 400))
def test_iteration_bounds_and_length(crit, seed, n):
    crit = crit.with_max_iter(max(crit.n, 20) if isinstance(crit, FixedExact) else 20)
    x = np.random.default_rng(seed).standard_normal(n)
    try:
        res = extract_imf(x, crit)
    except TooFewExtrema:
        return
    assert 1 <= res.iterations <= crit.max_iter
    assert res.imf.shape == x.shape


def test_max_iter_stop_reason():
    x = np.random.default_rng(9).standard_normal(512)
    res = extract_imf(x, StandardDeviation(sd_threshold=1e-12, max_iter=3))
    assert res.iterations == 3
    assert res.stop_reason == MAX_ITER_REACHED


@pytest.mark.parametrize("crit", ALL_CRITERIA, ids=lambda c: c.label)
def test_deterministic(crit):
    x = np.random.default_rng(5).standard_normal(700)
    a = extract_imf(x, crit)
    b = extract_imf(x.copy(), crit)
    np.testing.assert_array_equal(a.imf, b.imf)
    assert a.iterations == b.iterations


def test_mean_energy_mostly_decreases():
    # pooled over the passes that build each mode of the corpus decompositions
    crit = DualThreshold()
    down = total = 0
    for entry in default_corpus():
        x = entry.signal.samples
        residue = x.copy()
        for mode in emd(x, crit).imfs:
            energy = extract_imf(residue, crit, track_energy=True).mean_energy
            steps = np.diff(energy)
            down += int(np.count_nonzero(steps <= 0))
            total += steps.size
            residue = residue - mode
    rate = down / total
    print(f"mean-energy non-increasing on {down}/{total} passes ({rate:.1%})")
    assert rate >= 0.90


def test_fixed_check_consecutive_is_stricter():
    x = np.random.default_rng(2).standard_normal(1024)
    one = extract_imf(x, FixedWithImfCheck(n=1, consecutive=1))
    three = extract_imf(x, FixedWithImfCheck(n=1, consecutive=3))
    assert three.iterations >= one.iterations


# construction ------------------------------------------------------------

@pytest.mark.parametrize("kwargs", [
    dict(kind="dual", theta1=0.6, theta2=0.5),
    dict(kind="dual", alpha=1.5),
    dict(kind="sd", sd_threshold=0),
    dict(kind="fixed", n=20, max_iter=10),
    dict(kind="fixed-check", n=0),
    dict(kind="emd9"),
    dict(kind="dual", bogus=1),
])
def test_invalid_criteria(kwargs):
    with pytest.raises(ConfigError):
        criterion_from_dict(kwargs)


def test_criterion_round_trip():
    for crit in ALL_CRITERIA:
        assert criterion_from_dict(crit.to_dict()) == crit
        assert criterion_class(crit.tag) is type(crit)

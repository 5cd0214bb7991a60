import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modekit import Decomposition, ModeDiagnostics, emd
from modekit.errors import EmptyDecomposition, LengthMismatch, TooFewExtrema, ZeroVariance
from modekit.metrics import (
    best_match,
    corpus_ecm,
    ecm,
    mean_period,
    mode_correlation,
    orthogonality_index,
    relative_ecm,
    summarize,
)

from conftest import sine
from oracles import interior, pearson


def _decomp(imfs, residue):
    imfs = np.atleast_2d(np.asarray(imfs, float))
    return Decomposition(imfs, np.asarray(residue, float),
                         tuple(ModeDiagnostics(1) for _ in imfs), "emd", {})


def test_ecm_exact_decomposition(two_tone):
    x = two_tone[0]
    assert ecm(emd(x), x) < 1e-18


def test_ecm_constant_offset():
    x = sine(3, 100, 200)
    d = _decomp([x], np.full(200, 0.1))
    assert ecm(d, x) == pytest.approx(0.01)
    assert relative_ecm(d, x) == pytest.approx(0.01 / np.mean(x * x))


def test_ecm_zero_iff_exact():
    x = np.array([1.0, -2.0, 3.0, 0.5])
    assert ecm(_decomp([x], np.zeros(4)), x) == 0.0
    assert ecm(_decomp([x], np.array([0, 0, 0, 1e-12])), x) > 0.0


def test_ecm_length_mismatch():
    with pytest.raises(LengthMismatch):
        ecm(_decomp([np.ones(5)], np.zeros(5)), np.ones(6))


def test_corpus_ecm_averages():
    x = np.zeros(10)
    ds = [_decomp([np.full(10, 0.1)], np.zeros(10)), _decomp([np.full(10, 0.3)], np.zeros(10))]
    assert corpus_ecm(ds, [x, x]) == pytest.approx((0.01 + 0.09) / 2)


def test_orthogonality_disjoint_supports():
    a = np.array([1.0, 2.0, 0.0, 0.0])
    b = np.array([0.0, 0.0, -1.0, 3.0])
    assert orthogonality_index(_decomp([a, b], np.zeros(4))) == 0.0


def test_orthogonality_duplicated_component():
    s = sine(2, 50, 100)
    assert orthogonality_index(_decomp([s, s], np.zeros(100))) == pytest.approx(0.5)


def test_orthogonality_needs_a_mode():
    d = Decomposition(np.empty((0, 4)), np.ones(4), (), "emd", {})
    with pytest.raises(EmptyDecomposition):
        orthogonality_index(d)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), scale=st.floats(1e-3, 1e3))
def test_orthogonality_scale_invariant(seed, scale):
    rng = np.random.default_rng(seed)
    comps = rng.standard_normal((3, 32))
    base = orthogonality_index(_decomp(comps[:2], comps[2]))
    scaled = orthogonality_index(_decomp(scale * comps[:2], scale * comps[2]))
    assert scaled == pytest.approx(base, rel=1e-9, abs=1e-12)


def test_mean_period_sine():
    assert mean_period(sine(5, 400, 2000), 400.0) == pytest.approx(0.2, rel=0.05)


def test_mean_period_alternating():
    x = np.array([1.0, -1.0] * 20 + [1.0])
    # every interior sample is an extremum, so the estimate sits just above 2 samples
    assert mean_period(x, 10.0) == pytest.approx(2 / 10.0, rel=0.06)


def test_mean_period_needs_extrema():
    with pytest.raises(TooFewExtrema):
        mean_period(np.arange(10.0))


@given(st.floats(1e-3, 1e3))
def test_mean_period_amplitude_invariant(a):
    s = sine(7, 300, 600)
    assert mean_period(a * s) == mean_period(s)


def test_correlation_signs():
    s = sine(4, 100, 300) + 0.1 * np.arange(300) / 300
    assert mode_correlation(s, s) == pytest.approx(1.0)
    assert mode_correlation(-s, s) == pytest.approx(-1.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_correlation_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal((2, 50))
    assert mode_correlation(a, b) == pytest.approx(pearson(interior(a), interior(b)), abs=1e-9)


def test_correlation_errors():
    with pytest.raises(ZeroVariance):
        mode_correlation(np.ones(20), np.arange(20.0))
    with pytest.raises(LengthMismatch):
        mode_correlation(np.ones(20), np.ones(21))


def test_two_tone_first_mode_correlation(two_tone):
    x, low, high = two_tone
    d = emd(x)
    assert mode_correlation(d.imfs[0], high, 0.8) > 0.95
    k, c = best_match(d, low)
    assert k >= 1 and c > 0.95


def test_summary_fields(two_tone):
    x = two_tone[0]
    d = emd(x)
    rep = summarize(d, x)
    assert rep.imf_count == d.imf_count == len(rep.per_mode)
    assert rep.total_iterations == d.total_iterations
    assert rep.ecm >= 0 and all(m.energy >= 0 for m in rep.per_mode)
    assert set(rep.to_dict()) >= {"imf_count", "ecm", "orthogonality_index", "per_mode"}

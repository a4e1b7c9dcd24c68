import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jackvar import estimators as E
from jackvar import functionals as F
from jackvar.empirical import from_samples
from jackvar.errors import InvalidB, TooFewSamples

BOX = F.TrimmedLStatistic(F.box(0.25))
MESA = F.TrimmedLStatistic(F.mesa(0.1, 0.2, 0.8, 0.9))
CUSP = F.TrimmedLStatistic(F.holder_cusp(0.5, 0.1))
ALL_SPECS = [F.identity, F.square, F.paper_sgn, BOX, MESA, CUSP]

values = st.lists(st.floats(-50, 50), min_size=2, max_size=40)


def brute_loo(spec, sample):
    """Rebuild every leave-one-out sample and evaluate the functional from scratch."""
    return np.array([F.evaluate(spec, from_samples(np.delete(sample.values, i))) for i in range(sample.n)])


def brute_jackknife(spec, sample):
    n = sample.n
    q = n * F.evaluate(spec, sample) - (n - 1) * brute_loo(spec, sample)
    return float(np.sum((q - q.mean()) ** 2) / (n - 1))


def literal_double_sum(w, sample):
    n = sample.n
    idx = np.arange(1, n)
    lv = np.array([w(j / n) for j in idx])
    gaps = np.diff(sample.values)
    kern = np.minimum.outer(idx, idx) / n - np.outer(idx, idx) / n ** 2
    return float((lv * gaps) @ kern @ (lv * gaps))


def exact_bootstrap(spec, sample):
    """n times the variance of T over all n^n equally likely resamples."""
    n = sample.n
    ts = [F.evaluate(spec, from_samples(sample.values[list(ix)]))
          for ix in itertools.product(range(n), repeat=n)]
    return n * float(np.var(ts))


# -- worked examples -----------------------------------------------------------

def test_pseudovalues_examples(s123):
    assert np.allclose(E.pseudovalues(F.identity, s123).values, [1, 2, 3], rtol=0, atol=1e-14)
    assert np.allclose(E.pseudovalues(F.square, s123).values, [-0.5, 4.0, 7.5], rtol=0, atol=1e-13)
    assert np.all(E.pseudovalues(F.constant(3.5), s123).values == 3.5)


def test_jackknife_examples(s123):
    assert E.jackknife_variance(F.identity, s123).value == pytest.approx(1.0, rel=1e-14)
    assert E.jackknife_variance(F.square, s123).value == pytest.approx(193 / 12, rel=1e-14)
    for spec in ALL_SPECS:
        assert E.jackknife_variance(spec, from_samples([5, 5, 5])).value == 0.0


def test_ijack_examples(s123, s1234):
    assert E.infinitesimal_jackknife_variance(F.identity, s123).value == pytest.approx(2 / 3, rel=1e-14)
    assert E.infinitesimal_jackknife_variance(F.square, s123).value == pytest.approx(32 / 3, rel=1e-14)
    assert E.infinitesimal_jackknife_variance(BOX, s1234).value == pytest.approx(1.25, rel=1e-14)


def test_decomposition_example(s123):
    d = E.decomposition(F.square, s123)
    assert np.allclose(d.delta, [-1 / 6, 1 / 3, -1 / 6], rtol=0, atol=1e-13)
    assert d.term1 == pytest.approx(32 / 3, rel=1e-13)
    assert d.term2 == pytest.approx(16 / 3, rel=1e-13)
    assert d.term3 == pytest.approx(0.0, abs=1e-12)
    assert d.term4 == pytest.approx(1 / 12, rel=1e-12)
    assert d.reconstructed == pytest.approx(193 / 12, rel=1e-13)


@given(values)
def test_decomposition_for_mean_has_zero_delta(vals):
    s = from_samples(vals)
    d = E.decomposition(F.identity, s)
    scale = max(1.0, float(np.max(np.abs(s.values - s.mean))))
    assert np.max(np.abs(d.delta)) <= 1e-10 * scale
    assert d.term3 == pytest.approx(0.0, abs=1e-9 * scale ** 2)


@pytest.mark.parametrize("fn", [E.pseudovalues, E.jackknife_variance, E.infinitesimal_jackknife_variance,
                                E.decomposition])
def test_needs_two_observations(fn):
    with pytest.raises(TooFewSamples):
        fn(F.square, from_samples([1.0]))


# -- oracles -------------------------------------------------------------------

@settings(max_examples=40)
@given(values, st.sampled_from(ALL_SPECS))
def test_leave_one_out_matches_brute_force(vals, spec):
    s = from_samples(vals)
    fast = E.leave_one_out_estimates(spec, s)
    slow = brute_loo(spec, s)
    assert np.allclose(fast, slow, rtol=1e-11, atol=1e-9)


@settings(max_examples=40)
@given(values, st.sampled_from(ALL_SPECS))
def test_jackknife_matches_brute_force(vals, spec):
    s = from_samples(vals)
    assert E.jackknife_variance(spec, s).value == pytest.approx(brute_jackknife(spec, s), rel=1e-8, abs=1e-9)


@settings(max_examples=60)
@given(values, st.sampled_from([BOX, MESA, CUSP]))
def test_double_sum_routes_agree(vals, spec):
    s = from_samples(vals)
    fast = E.infinitesimal_jackknife_variance(spec, s).value
    literal = literal_double_sum(spec.weight, s)
    phi = np.asarray(F.influence(spec, s, s.values))
    via_phi = float(np.mean(phi ** 2))
    assert fast == pytest.approx(literal, rel=1e-10, abs=1e-12)
    assert fast == pytest.approx(via_phi, rel=1e-10, abs=1e-12)


@settings(max_examples=60)
@given(values, st.sampled_from(ALL_SPECS))
def test_decomposition_identity(vals, spec):
    s = from_samples(vals)
    d = E.decomposition(spec, s)
    v = E.jackknife_variance(spec, s).value
    assert d.reconstructed == pytest.approx(v, rel=1e-10, abs=1e-12)


@given(values)
def test_exact_mean_relation(vals):
    s = from_samples(vals)
    vj = E.jackknife_variance(F.identity, s).value
    vi = E.infinitesimal_jackknife_variance(F.identity, s).value
    assert vj == pytest.approx(s.n / (s.n - 1) * vi, rel=1e-12, abs=1e-300)


# -- invariants ----------------------------------------------------------------

@settings(max_examples=30)
@given(values, st.sampled_from(ALL_SPECS), st.randoms(use_true_random=False))
def test_permutation_invariance(vals, spec, rnd):
    shuffled = list(vals)
    rnd.shuffle(shuffled)
    a, b = from_samples(vals), from_samples(shuffled)
    for fn in (E.jackknife_variance, E.infinitesimal_jackknife_variance):
        assert fn(spec, a).value == fn(spec, b).value
    assert E.bootstrap_variance(spec, a, 20, 3).value == E.bootstrap_variance(spec, b, 20, 3).value


@settings(max_examples=30)
@given(values, st.sampled_from([BOX, MESA, CUSP]), st.floats(0.01, 100))
def test_l_statistic_scale_equivariance(vals, spec, c):
    s, sc = from_samples(vals), from_samples(np.asarray(vals) * c)
    for fn in (E.jackknife_variance, E.infinitesimal_jackknife_variance):
        assert fn(spec, sc).value == pytest.approx(c * c * fn(spec, s).value, rel=1e-9, abs=1e-12)
    assert E.bootstrap_variance(spec, sc, 50, 1).value == pytest.approx(
        c * c * E.bootstrap_variance(spec, s, 50, 1).value, rel=1e-9, abs=1e-12)


@settings(max_examples=30)
@given(values, st.sampled_from([F.identity, F.square, F.paper_sgn]), st.floats(0.1, 10))
def test_function_of_mean_scale_equivariance(vals, spec, c):
    # scaled data with g~(y) = c g(y / c) gives c * T, hence c^2 * variance
    chained = F.SmoothFunctionOfMean(
        "chained", lambda y: c * spec.g(np.asarray(y) / c), lambda y: spec.g_prime(np.asarray(y) / c))
    s, sc = from_samples(vals), from_samples(np.asarray(vals) * c)
    for fn in (E.jackknife_variance, E.infinitesimal_jackknife_variance):
        assert fn(chained, sc).value == pytest.approx(c * c * fn(spec, s).value, rel=1e-8, abs=1e-10)


@settings(max_examples=30)
@given(values, st.sampled_from(ALL_SPECS))
def test_nonnegative(vals, spec):
    s = from_samples(vals)
    assert E.jackknife_variance(spec, s).value >= 0
    assert E.infinitesimal_jackknife_variance(spec, s).value >= 0
    assert E.bootstrap_variance(spec, s, 10, 0).value >= 0


# -- bootstrap -----------------------------------------------------------------

def test_bootstrap_constant_sample():
    for spec in ALL_SPECS:
        for seed in (0, 1, 99):
            assert E.bootstrap_variance(spec, from_samples([2.5] * 7), 50, seed).value == 0.0


def test_bootstrap_invalid_b(s123):
    with pytest.raises(InvalidB):
        E.bootstrap_variance(F.square, s123, 1, 0)
    with pytest.raises(TooFewSamples):
        E.bootstrap_variance(F.square, from_samples([1.0]), 10, 0)


def test_bootstrap_deterministic(s123):
    a = E.bootstrap_variance(F.square, s123, 200, 42)
    b = E.bootstrap_variance(F.square, s123, 200, 42)
    assert a.value == b.value
    assert a.aux == {"B": 200, "seed": 42}
    assert E.bootstrap_variance(F.square, s123, 200, 43).value != a.value


def test_exact_bootstrap_two_points():
    s = from_samples([0.0, 1.0])
    exact = exact_bootstrap(F.identity, s)
    assert exact == pytest.approx(0.25, rel=1e-15)
    assert exact == pytest.approx(E.infinitesimal_jackknife_variance(F.identity, s).value, rel=1e-15)
    mc = E.bootstrap_variance(F.identity, s, 200_000, 7).value
    assert mc == pytest.approx(0.25, rel=0.01)


@pytest.mark.parametrize("spec", [F.identity, F.square, BOX])
def test_monte_carlo_bootstrap_converges_to_enumeration(spec):
    s = from_samples([0.3, 1.1, 1.7, 2.9, 4.2])
    exact = exact_bootstrap(spec, s)
    mc = E.bootstrap_variance(spec, s, 400_000, 11).value
    # relative MC error of a variance is about sqrt(2/B) ~ 0.2%; allow 2%
    assert mc == pytest.approx(exact, rel=0.02)


def test_bootstrap_chunking_covers_b():
    s = from_samples(np.linspace(0, 1, 5000))
    v = E.bootstrap_variance(F.identity, s, 1000, 5)
    assert v.value > 0 and v.aux["B"] == 1000

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from hilberg.errors import ParameterError
from hilberg.sampling import (
    ProcessKind,
    ProcessSpec,
    Window,
    replicate_rng,
    sample_window,
    sample_zipf,
    zipf_sampler,
)
from hilberg.schedule import Block, Schedule, build_schedule


def _zipf_pmf(beta, k):
    with mpmath.workdps(30):
        return float(mpmath.power(k, -1 / mpmath.mpf(beta)) / mpmath.zeta(1 / mpmath.mpf(beta)))


def test_zipf_pmf_values():
    z = zipf_sampler(0.5)
    assert z.prob(1) == pytest.approx(6 / math.pi**2, abs=1e-12)
    assert z.prob(2) == pytest.approx(0.151982, abs=1e-6)


def test_zipf_first_frequency():
    draws = zipf_sampler(0.5).sample(replicate_rng(11, 0), 10**6)
    assert abs(np.mean(draws == 1) - 0.607927) < 0.0015


@pytest.mark.parametrize("beta", [0.25, 0.5, 0.75, 0.9])
def test_zipf_goodness_of_fit(beta):
    draws = zipf_sampler(beta).sample(replicate_rng(5, 1), 200_000)
    K = 40
    counts = np.bincount(np.minimum(draws.astype(float), K + 1).astype(int), minlength=K + 2)[1:]
    p = np.array([_zipf_pmf(beta, k) for k in range(1, K + 1)])
    p = np.append(p, 1 - p.sum())
    expected = p * len(draws)
    keep = expected > 5
    obs = np.append(counts[:-1][keep[:-1]], counts[:-1][~keep[:-1]].sum() + counts[-1])
    exp = np.append(expected[:-1][keep[:-1]], expected[:-1][~keep[:-1]].sum() + expected[-1])
    assert stats.chisquare(obs, exp).pvalue > 1e-3


def test_zipf_tail_mass():
    # P(K > 4096) against the Hurwitz tail
    beta = 0.75
    draws = zipf_sampler(beta).sample(replicate_rng(2, 0), 400_000)
    with mpmath.workdps(30):
        s = 1 / mpmath.mpf(beta)
        tail = float(mpmath.zeta(s, 4097) / mpmath.zeta(s))
    se = math.sqrt(tail * (1 - tail) / len(draws))
    assert abs(np.mean(draws.astype(float) > 4096) - tail) < 4 * se


def test_sample_zipf_positive_integer():
    k = sample_zipf(0.5, replicate_rng(0, 0))
    assert isinstance(k, int) and k >= 1


@given(st.integers(min_value=0, max_value=2**64 - 1), st.integers(min_value=0, max_value=1000))
@settings(max_examples=25)
def test_replicate_rng_deterministic(seed, r):
    a = replicate_rng(seed, r).random(4)
    b = replicate_rng(seed, r).random(4)
    assert np.array_equal(a, b)


def test_replicates_are_distinct():
    assert not np.array_equal(replicate_rng(1, 0).random(4), replicate_rng(1, 1).random(4))


@given(st.floats(min_value=0.05, max_value=0.95), st.integers(min_value=1, max_value=200), st.integers(0, 10**6))
@settings(max_examples=40)
def test_santa_fe_window_consistent(beta, n, seed):
    w = sample_window(ProcessSpec.santa_fe(beta), n, replicate_rng(seed, 0))
    assert len(w.left) == len(w.right) == n
    seen = {}
    for k, y in w.joint():
        assert k >= 1 and y in (0, 1)
        assert seen.setdefault(int(k), int(y)) == y


def test_santa_fe_small_example():
    w = sample_window(ProcessSpec.santa_fe(0.5), 3, replicate_rng(7, 0))
    bits = {}
    for k, y in w.joint():
        assert bits.setdefault(int(k), int(y)) == int(y)


def test_mixture_grand_mean():
    spec = ProcessSpec.mixture()
    means, thetas = [], []
    for r in range(1000):
        w = sample_window(spec, 10**4, replicate_rng(3, r))
        means.append(w.joint()[:10**4].mean())
        thetas.append(w.theta)
    means = np.array(means)
    assert abs(means.mean() - 0.5) < 0.015
    assert np.max(np.abs(means - np.array(thetas))) < 0.03


def test_modified_inactive_bits_are_zero():
    sched = build_schedule(0.5, 2)
    spec = ProcessSpec.modified_santa_fe(sched)
    for r in range(20):
        w = sample_window(spec, 500, replicate_rng(4, r))
        sym = w.joint()
        inactive = ~spec.active(sym[:, 0])
        assert inactive.any()
        assert np.all(sym[inactive, 1] == 0)


def test_process_spec_validation():
    with pytest.raises(ParameterError):
        ProcessSpec.santa_fe(1.0)
    with pytest.raises(ParameterError):
        ProcessSpec.santa_fe(0.0)
    with pytest.raises(ParameterError):
        ProcessSpec(ProcessKind.SANTA_FE, 0.5, build_schedule(0.5, 1))
    with pytest.raises(ParameterError):
        ProcessSpec(ProcessKind.MODIFIED_SANTA_FE, 0.5)
    with pytest.raises(ParameterError):
        ProcessSpec(ProcessKind.MODIFIED_SANTA_FE, 0.4, Schedule(0.5, (Block(1, 2, 49, 0.5),)))


def test_window_restrict():
    w = sample_window(ProcessSpec.mixture(), 8, replicate_rng(0, 0))
    sub = w.restrict(3)
    assert np.array_equal(sub.left, w.left[5:]) and np.array_equal(sub.right, w.right[:3])
    with pytest.raises(ParameterError):
        w.restrict(9)
    with pytest.raises(ParameterError):
        Window(2, w.left[:2], w.right[:3])

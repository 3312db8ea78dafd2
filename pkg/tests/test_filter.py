import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from ibifilter.filter import (
    FilterConfig,
    FilterState,
    IbiFilter,
    InvalidConfig,
    NonPositiveInterval,
    clamped_mode,
    filter_estimate,
    filter_init,
    filter_step,
    run_filter,
)
from ibifilter.igmath import ConjugateParams, DegenerateState, IGParams, ModeVariant, fc_mode


def warm(theta, config):
    return FilterState(ConjugateParams(*theta), steps=config.warmup_beats, warmed_up=True)


def test_init_from_seed():
    cfg = FilterConfig(warmup_beats=10)
    state = filter_init(cfg, 0.8)
    assert state.theta.as_tuple() == (4.0, 10.0, 6.25, 5.0)
    assert state.steps == 0 and not state.warmed_up
    assert 2 * state.theta.a / state.theta.b == pytest.approx(0.8)
    assert filter_init(cfg).theta == state.theta


def test_init_rejects_bad_seed():
    with pytest.raises(InvalidConfig):
        filter_init(FilterConfig(), -1.0)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"gamma": 1.0},
        {"gamma": 0.0},
        {"p_e": 1.0},
        {"p_e": -0.1},
        {"lambda_e": 0.0},
        {"warmup_beats": 0},
        {"lambda_bounds": (10.0, 1.0)},
        {"r_bounds": (0.0, 5.0)},
        {"r_bounds": (2.0, 1.0)},
    ],
)
def test_config_guards(kwargs):
    with pytest.raises(InvalidConfig):
        FilterConfig(**kwargs)


def test_non_positive_interval():
    cfg = FilterConfig()
    with pytest.raises(NonPositiveInterval):
        filter_step(filter_init(cfg), 0.0, cfg)
    with pytest.raises(NonPositiveInterval):
        filter_step(filter_init(cfg), -0.3, cfg)


def test_zero_anomaly_prior_is_plain_recursion():
    cfg = FilterConfig(p_e=0.0, gamma=0.95)
    state = warm((4.1, 10.0, 6.3, 5.0), cfg)
    new, out = filter_step(state, 1.7, cfg)
    assert out.beta1 == 1.0 and out.beta0 == 0.0
    expected = (0.95 * 4.1 + 0.85, 0.95 * 10 + 1, 0.95 * 6.3 + 0.5 / 1.7, 0.95 * 5 + 0.5)
    np.testing.assert_allclose(new.theta.as_tuple(), expected, rtol=1e-14)


def test_equal_hypothesis_likelihoods_give_half():
    theta = (4.1, 10.0, 6.3, 5.0)
    r, lambda_e = 0.95, 1.0
    mode = fc_mode(ConjugateParams(*theta))
    f1 = stats.invgauss.pdf(r, mode.mu / mode.lam, scale=mode.lam)
    f0 = lambda_e * math.exp(-lambda_e * r)
    # p_e * f0 == (1 - p_e) * f1
    cfg = FilterConfig(p_e=f1 / (f1 + f0), lambda_e=lambda_e, gamma=0.99)
    new, out = filter_step(warm(theta, cfg), r, cfg)
    assert out.beta1 == pytest.approx(0.5, abs=1e-12)
    expected = np.array(theta) * 0.99 + 0.5 * np.array([r / 2, 1, 0.5 / r, 0.5])
    np.testing.assert_allclose(new.theta.as_tuple(), expected, rtol=1e-12)


# Frozen from a 40-digit mpmath evaluation of h0, h1, beta1 and theta'.
ORACLE_STEPS = [
    # theta, r, beta1, theta'
    (
        (4.0, 10.0, 6.25, 5.0),
        0.8,
        0.99992030045687739468,
        (4.3599681201827509579, 10.899920300456877395, 6.8124501877855483717, 5.4499601502284386973),
    ),
    (
        (4.1, 10.0, 6.3, 5.0),
        0.95,
        0.97583267155277168785,
        (4.5225205189875665517, 10.875832671552771688, 6.7505961429225114147, 5.4379163357763858439),
    ),
]


@pytest.mark.parametrize("theta, r, beta1, theta_next", ORACLE_STEPS)
def test_single_step_against_oracle(theta, r, beta1, theta_next):
    cfg = FilterConfig(gamma=0.99, p_e=0.09, lambda_e=1.0)
    new, out = filter_step(warm(theta, cfg), r, cfg)
    assert out.beta1 == pytest.approx(beta1, rel=1e-12)
    assert out.beta0 == 1.0 - out.beta1
    np.testing.assert_allclose(new.theta.as_tuple(), theta_next, rtol=1e-12)


def test_identical_seed_state_clamps_lambda():
    cfg = FilterConfig()
    mode, clamped = clamped_mode(ConjugateParams(4.0, 10.0, 6.25, 5.0), cfg)
    assert clamped
    assert mode.mu == pytest.approx(0.8)
    assert mode.lam == cfg.lambda_bounds[1]


def test_tiny_interval_is_anomalous():
    cfg = FilterConfig()
    state = warm((4.1, 10.0, 6.3, 5.0), cfg)
    b0 = [filter_step(state, r, cfg)[1].beta0 for r in (0.1, 0.01, 0.001)]
    assert b0[-1] > 1 - 1e-12
    assert b0 == sorted(b0)


def test_long_interval_is_anomalous_when_exponential_tail_dominates():
    cfg = FilterConfig(lambda_e=1.0, r_bounds=(0.01, 100.0))
    theta = ConjugateParams(40.0, 100.0, 62.6, 50.0)
    mode = fc_mode(theta)
    assert cfg.lambda_e < mode.lam / (2 * mode.mu**2)
    state = FilterState(theta, cfg.warmup_beats, True)
    b0 = [filter_step(state, r, cfg)[1].beta0 for r in (2.0, 5.0, 20.0, 80.0)]
    assert b0[-1] > 1 - 1e-9
    assert b0 == sorted(b0)


def test_gated_interval_is_not_absorbed():
    cfg = FilterConfig(gamma=0.98)
    state = warm((4.1, 10.0, 6.3, 5.0), cfg)
    for r in (0.1, 7.0):
        new, out = filter_step(state, r, cfg)
        assert out.weight == 0.0
        np.testing.assert_allclose(new.theta.as_tuple(), np.array(state.theta.as_tuple()) * 0.98)
        # reported probability is still the computed one
        assert 0.0 <= out.beta0 <= 1.0


def test_warmup_forces_acceptance():
    cfg = FilterConfig(warmup_beats=5)
    state = filter_init(cfg)
    for i in range(5):
        state, out = filter_step(state, 1.3, cfg)
        assert out.weight == 1.0
        assert state.warmed_up == (i == 4)
    state, out = filter_step(state, 1.3, cfg)
    assert out.weight == out.beta1


def test_estimate_examples():
    theta = ConjugateParams(1.0, 2.0, 3.0, 0.5)
    verbatim_cfg = FilterConfig(mode_variant=ModeVariant.PAPER_VERBATIM, lambda_bounds=(1e-3, 1e6))
    mean, var, mu, lam = filter_estimate(FilterState(theta, 10, True), verbatim_cfg, strict=True)
    assert (mean, var, mu, lam) == (1.0, 0.5, 1.0, 2.0)
    a, b, c, d = theta.as_tuple()
    assert var == pytest.approx(16 * a**4 * d / (b**3 * (2 * a * c - b**2)))

    cfg = FilterConfig(lambda_bounds=(1e-3, 1e6))
    mean, var, mu, lam = filter_estimate(FilterState(theta, 10, True), cfg, strict=True)
    assert (mean, var, mu, lam) == (1.0, 4.0, 1.0, 0.25)
    assert var == pytest.approx(2 * a**2 * (4 * a * c - b**2) / (b**3 * d))


def test_estimate_strict_raises_when_clamped():
    cfg = FilterConfig()
    state = FilterState(ConjugateParams(4.0, 10.0, 6.25, 5.0), 10, True)
    with pytest.raises(DegenerateState):
        filter_estimate(state, cfg, strict=True)
    mean, var, mu, lam = filter_estimate(state, cfg)
    assert lam == cfg.lambda_bounds[1] and var > 0


@pytest.mark.parametrize("s", [0.5, 2.0, 10.0])
def test_estimate_mean_scales(s):
    theta = ConjugateParams(4.1, 10.0, 6.3, 5.0)
    cfg = FilterConfig()
    m1 = filter_estimate(FilterState(theta, 10, True), cfg)[0]
    m2 = filter_estimate(FilterState(ConjugateParams(s * 4.1, 10.0, 6.3 / s, 5.0), 10, True), cfg)[0]
    assert m2 == pytest.approx(s * m1)


def test_fixed_point():
    cfg = FilterConfig(p_e=0.0, gamma=0.99)
    trace = run_filter(np.full(3000, 0.8), cfg, seed_ibi=0.7)
    assert abs(trace.mu_star[-1] - 0.8) < 1e-6
    theta = trace.final_state.theta
    np.testing.assert_allclose(theta.as_tuple(), np.array([0.4, 1, 0.625, 0.5]) / (1 - 0.99), rtol=1e-6)


def test_step_output_std_consistent():
    rng = np.random.default_rng(1)
    trace = run_filter(rng.wald(0.8, 400, 500))
    np.testing.assert_allclose(trace.std_ibi, np.sqrt(trace.mu_star**3 / trace.lambda_star), rtol=1e-12)
    np.testing.assert_array_equal(trace.beta0 + trace.beta1, 1.0)


adversarial = st.lists(
    st.one_of(st.floats(min_value=1e-4, max_value=1e3), st.sampled_from([0.8, 0.2, 5.0, 1e-4, 1e3])),
    min_size=1,
    max_size=400,
)


@settings(max_examples=150, deadline=None)
@given(stream=adversarial, gamma=st.floats(min_value=0.5, max_value=0.999), warmup=st.integers(1, 50))
def test_bounded_memory_and_finiteness(stream, gamma, warmup):
    cfg = FilterConfig(gamma=gamma, warmup_beats=warmup)
    state = filter_init(cfg)
    bound = max(state.theta.b, 1 / (1 - gamma)) * (1 + 1e-12)
    for r in stream:
        state, out = filter_step(state, r, cfg)
        assert state.theta.b <= bound
        assert all(math.isfinite(v) and v >= 0 for v in state.theta.as_tuple())
        assert 0.0 <= out.beta0 <= 1.0 and 0.0 <= out.beta1 <= 1.0
        assert math.isfinite(out.lambda_star) and out.lambda_star > 0
        assert math.isfinite(out.std_ibi)


@pytest.mark.parametrize("variant", list(ModeVariant))
def test_identical_stream_never_poisons_lambda(variant):
    cfg = FilterConfig(mode_variant=variant)
    trace = run_filter(np.full(2000, 0.75), cfg)
    assert np.all(np.isfinite(trace.lambda_star)) and np.all(trace.lambda_star > 0)
    lo, hi = cfg.lambda_bounds
    assert np.all((trace.lambda_star >= lo) & (trace.lambda_star <= hi))


def test_wrapper_matches_functional_api():
    rng = np.random.default_rng(4)
    ibis = rng.wald(0.9, 300, 200)
    f = IbiFilter()
    outs = [f.update(r) for r in ibis]
    trace = run_filter(ibis)
    np.testing.assert_array_equal([o.beta0 for o in outs], trace.beta0)
    assert f.estimate()[0] == pytest.approx(trace.mean_ibi[-1])


def test_tracks_step_change_in_mean():
    rng = np.random.default_rng(8)
    ibis = np.concatenate((rng.wald(0.8, 400, 3000), rng.wald(1.0, 600, 3000)))
    trace = run_filter(ibis)
    assert trace.mu_star[2900] == pytest.approx(0.8, rel=0.02)
    assert trace.mu_star[-1] == pytest.approx(1.0, rel=0.02)

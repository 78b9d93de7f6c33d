import itertools
import math

import numpy as np
import pytest

import expanded_forms as ef
import oracle
from conftest import CORNERS, random_params
from rspsim.noise import (
    FidelityConvention,
    NoiseKind,
    apply_local_noise,
    average_fidelity,
    channel_density,
    closed_form_fidelity,
    conditional_output,
    fidelity_noisy,
    kraus_channel,
    noisy_outputs,
)
from rspsim.protocol import ProtocolParams, make_targets
from rspsim.qcore import DensityMatrix, DimensionError, density_from_state, fidelity_pure

KINDS = list(NoiseKind)
RATES = [i / 10 for i in range(11)]
PAPER = FidelityConvention.PAPER_UNNORMALIZED
UNIT = FidelityConvention.TRACE_NORMALIZED


def _random_psd(rng, n=5):
    a = rng.normal(size=(1 << n, 1 << n)) + 1j * rng.normal(size=(1 << n, 1 << n))
    return DensityMatrix(a @ a.conj().T)


# channels


def test_ad_zero_rate():
    ch = kraus_channel("ad", 0)
    np.testing.assert_array_equal(ch.operators[0], np.eye(2))
    np.testing.assert_array_equal(ch.operators[1], np.zeros((2, 2)))


def test_pf_full_rate():
    ch = kraus_channel(NoiseKind.PHASE_FLIP, 1)
    np.testing.assert_array_equal(ch.operators[0], np.zeros((2, 2)))
    np.testing.assert_array_equal(ch.operators[1], np.diag([1, -1]))


def test_bf_half():
    ch = kraus_channel("bf", 0.5)
    for op in ch.operators:
        nz = op[np.abs(op) > 0]
        np.testing.assert_allclose(np.abs(nz), math.sqrt(0.5))
    assert ch.completeness_error() < 1e-12


@pytest.mark.parametrize("kind", KINDS)
def test_completeness_on_grid(kind):
    for r in RATES:
        assert kraus_channel(kind, r).completeness_error() < 1e-12


@pytest.mark.parametrize("rate", [-0.1, 1.1, float("nan")])
def test_rate_out_of_range(rate):
    with pytest.raises(ValueError):
        kraus_channel("ad", rate)


# local noise


@pytest.mark.parametrize("kind", KINDS)
def test_rate_zero_is_identity(kind, rng):
    rho = _random_psd(rng)
    np.testing.assert_allclose(apply_local_noise(rho, kraus_channel(kind, 0)).entries, rho.entries, atol=1e-12)


@pytest.mark.parametrize("kind", KINDS)
def test_trace_preserved(kind, rng):
    for r in RATES:
        rho = _random_psd(rng)
        out = apply_local_noise(rho, kraus_channel(kind, r))
        assert abs(out.trace() - rho.trace()) < 1e-10
        assert out.is_hermitian(1e-10)


@pytest.mark.parametrize("kind", ["ad", "pf", "bf"])
def test_matches_naive_evolution(kind):
    for r in (0.0, 0.13, 0.5, 0.91, 1.0):
        ours = apply_local_noise(channel_density(PAPER), kraus_channel(kind, r)).entries
        np.testing.assert_allclose(ours, oracle.noisy(kind, r), atol=1e-13)


def test_ad_channel_expansion():
    for lam in np.linspace(0, 1, 11):
        ours = apply_local_noise(channel_density(PAPER), kraus_channel("ad", lam)).entries
        assert np.max(np.abs(ours - ef.ad_channel(lam))) < 1e-12


def test_bf_full_rate_is_triple_flip():
    rho = channel_density(PAPER)
    out = apply_local_noise(rho, kraus_channel("bf", 1)).entries
    xxx = np.kron(np.eye(4), np.kron(np.kron(oracle.X, oracle.X), oracle.X))
    np.testing.assert_allclose(out, xxx @ rho.entries @ xxx.T, atol=1e-15)
    np.testing.assert_allclose(out, ef.bf_channel(1.0), atol=1e-15)


def test_bf_channel_expansion():
    for nu in np.linspace(0, 1, 11):
        ours = apply_local_noise(channel_density(PAPER), kraus_channel("bf", nu)).entries
        assert np.max(np.abs(ours - ef.bf_channel(nu))) < 1e-12


def test_pf_channel_expansion_both_groupings():
    for mu in np.linspace(0, 1, 11):
        ours = apply_local_noise(channel_density(PAPER), kraus_channel("pf", mu)).entries
        assert np.max(np.abs(ours - ef.pf_channel_six_terms(mu))) < 1e-12
        assert np.max(np.abs(ef.pf_channel_six_terms(mu) - ef.pf_channel_regrouped(mu))) < 1e-12


def test_per_qubit_channels():
    chans = [kraus_channel("ad", 0.2), kraus_channel("pf", 0.3), kraus_channel("bf", 0.4)]
    rho = channel_density(PAPER)
    out = apply_local_noise(rho, chans).entries
    expected = np.zeros((32, 32), dtype=complex)
    for a, b, c in itertools.product(*(ch.operators for ch in chans)):
        k = oracle.kron(np.eye(4), a, b, c)
        expected += k @ rho.entries @ k.conj().T
    np.testing.assert_allclose(out, expected, atol=1e-13)


def test_local_noise_wrong_size():
    with pytest.raises(DimensionError):
        apply_local_noise(density_from_state(make_targets(CORNERS[0])[2]), kraus_channel("ad", 0.1))
    with pytest.raises(ValueError):
        apply_local_noise(channel_density(), [kraus_channel("ad", 0.1)] * 2)


# conditional output


def test_ideal_outcome2_output():
    p = ProtocolParams.from_probabilities(0.3, 0.6)
    out = conditional_output(channel_density(UNIT), 2, p)
    _, _, psi = make_targets(p)
    np.testing.assert_allclose(out.entries, 0.25 * np.outer(psi.amps, psi.amps.conj()), atol=1e-15)


@pytest.mark.parametrize(
    "kind, form",
    [("ad", ef.ad_output_outcome2), ("pf", ef.pf_output_outcome2), ("bf", ef.bf_output_outcome2)],
)
def test_outcome2_output_matches_expansion(kind, form, rng):
    for p in [random_params(rng) for _ in range(10)] + CORNERS:
        for r in (0.0, 0.25, 0.6, 1.0):
            eps = apply_local_noise(channel_density(PAPER), kraus_channel(kind, r))
            out = conditional_output(eps, 2, p)
            assert out.is_hermitian()
            assert out.min_eigenvalue() > -1e-10
            assert np.max(np.abs(out.entries - form(p, r))) < 1e-12


@pytest.mark.parametrize("kind", ["ad", "pf", "bf"])
@pytest.mark.parametrize("outcome", [1, 2, 3, 4])
def test_zero_rate_reduces_to_ideal(kind, outcome, rng):
    p = random_params(rng)
    out = conditional_output(apply_local_noise(channel_density(UNIT), kraus_channel(kind, 0)), outcome, p)
    _, _, psi = make_targets(p)
    assert abs(fidelity_pure(psi, out.scaled(4)) - 1) < 1e-12


def test_conditional_output_bad_outcome():
    with pytest.raises(ValueError):
        conditional_output(channel_density(), 0, CORNERS[0])


# fidelities


@pytest.mark.parametrize("kind", KINDS)
def test_noisy_fidelity_at_zero_rate(kind, rng):
    for _ in range(20):
        assert abs(fidelity_noisy(random_params(rng), kind, 0.0, 2, PAPER) - 1) < 1e-12


def test_ad_full_rate_endpoint(rng):
    for _ in range(30):
        p = random_params(rng)
        expected = p.alpha**2 * p.delta**2
        assert abs(fidelity_noisy(p, "ad", 1.0) - expected) < 1e-10
        assert abs(closed_form_fidelity("ad", p, 1.0) - expected) < 1e-10


def test_bf_full_rate_endpoint(rng):
    for _ in range(30):
        p = random_params(rng)
        expected = 16 * p.alpha**2 * p.beta**2 * p.gamma**2 * p.delta**2
        assert abs(fidelity_noisy(p, "bf", 1.0) - expected) < 1e-10
        assert abs(closed_form_fidelity("bf", p, 1.0) - expected) < 1e-10


def test_pf_full_rate_endpoint(rng):
    for _ in range(30):
        p = random_params(rng)
        expected = (p.alpha**2 - p.beta**2) ** 2
        assert abs(fidelity_noisy(p, "pf", 1.0) - expected) < 1e-10
        assert abs(closed_form_fidelity("pf", p, 1.0) - expected) < 1e-10


def test_closed_form_spot_values():
    s = 1 / math.sqrt(2)
    half = ProtocolParams(s, s, s, s)
    assert abs(closed_form_fidelity("bf", half, 0.5) - 0.5) < 1e-12
    assert abs(closed_form_fidelity("pf", half, 0.5) - 0.25) < 1e-12


@pytest.mark.parametrize("kind", KINDS)
def test_closed_form_unit_at_zero(kind, rng):
    for _ in range(20):
        assert abs(closed_form_fidelity(kind, random_params(rng), 0.0) - 1) < 1e-12


@pytest.mark.parametrize("kind", KINDS)
def test_closed_form_agrees_with_naive_oracle(kind, rng):
    for _ in range(40):
        p = random_params(rng)
        r = float(rng.uniform())
        ref = oracle.fidelity_outcome2(kind.value, r, p.alpha, p.beta, p.gamma, p.delta)
        assert abs(closed_form_fidelity(kind, p, r) - ref) < 1e-12
        assert abs(fidelity_noisy(p, kind, r) - ref) < 1e-12


@pytest.mark.parametrize("kind", [NoiseKind.PHASE_FLIP, NoiseKind.BIT_FLIP])
def test_flip_fidelities_symmetric_under_swaps(kind, rng):
    for _ in range(30):
        p = random_params(rng)
        r = float(rng.uniform())
        f = closed_form_fidelity(kind, p, r)
        swapped_ab = ProtocolParams(p.beta, p.alpha, p.gamma, p.delta)
        swapped_gd = ProtocolParams(p.alpha, p.beta, p.delta, p.gamma)
        assert abs(closed_form_fidelity(kind, swapped_ab, r) - f) < 1e-12
        assert abs(closed_form_fidelity(kind, swapped_gd, r) - f) < 1e-12
        assert abs(fidelity_noisy(swapped_ab, kind, r) - f) < 1e-10


@pytest.mark.parametrize("kind", KINDS)
def test_normalized_fidelity_in_unit_interval(kind):
    for a2 in np.linspace(0, 1, 6):
        for g2 in np.linspace(0, 1, 6):
            p = ProtocolParams.from_probabilities(a2, g2)
            for r in RATES:
                for outcome in (1, 2, 3, 4):
                    f = fidelity_noisy(p, kind, r, outcome, UNIT)
                    assert -1e-12 <= f <= 1 + 1e-12


@pytest.mark.parametrize("kind", KINDS)
def test_outcome_traces_sum_to_channel_trace(kind, rng):
    p = random_params(rng)
    outs = noisy_outputs(p, kind, 0.37, PAPER)
    assert abs(sum(o.trace().real for o in outs) - 4) < 1e-12


@pytest.mark.parametrize("kind", KINDS)
def test_average_fidelity(kind, rng):
    p = random_params(rng)
    assert abs(average_fidelity(p, kind, 0.0) - 1) < 1e-12
    r = 0.42
    expected = sum(fidelity_noisy(p, kind, r, i, PAPER) for i in range(1, 5)) / 4
    assert abs(average_fidelity(p, kind, r) - expected) < 1e-12

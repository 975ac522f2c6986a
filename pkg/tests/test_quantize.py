import numpy as np
import pytest

from mmwsim.config import SystemConfig, distortion_factor, validate_config
from mmwsim.errors import ParameterError
from mmwsim.quantize import (BussgangModel, bussgang_decompose,
                             lloyd_max_design, lloyd_max_quantize,
                             quant_noise_power_data, quant_noise_power_pilot)


@pytest.fixture(scope="module")
def gaussian_samples():
    rng = np.random.default_rng(42)
    n = 10 ** 6
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)


def test_one_bit_levels_are_sign_times_two_over_pi():
    levels, thresholds = lloyd_max_design(1)
    assert levels == pytest.approx([-np.sqrt(2 / np.pi), np.sqrt(2 / np.pi)])
    assert thresholds == pytest.approx([0.0])


def test_one_bit_quantizer_closed_form(gaussian_samples):
    z = gaussian_samples[:1000]
    q = lloyd_max_quantize(z, 1, 1.0)
    expect = np.sqrt(1.0 / np.pi) * (np.sign(z.real) + 1j * np.sign(z.imag))
    np.testing.assert_allclose(q, expect, rtol=1e-12)


def test_high_resolution_is_nearly_identity(gaussian_samples):
    # oracle-measured quantiles of the relative error at 12 bits
    z = gaussian_samples[:200000]
    q = lloyd_max_quantize(z, 12, 1.0)
    rel = np.abs(q - z) / np.abs(z)
    assert np.median(rel) < 5e-4
    assert np.quantile(rel, 0.90) < 2e-3
    assert np.quantile(rel, 0.99) < 5e-3


def test_zero_input_snaps_to_innermost_level():
    q = lloyd_max_quantize(np.zeros(4, dtype=complex), 3, 2.0)
    levels, _ = lloyd_max_design(3)
    inner = np.sqrt(1.0) * levels[len(levels) // 2 - 1]
    np.testing.assert_allclose(q, np.full(4, inner + 1j * inner))


def test_quantize_rejects_bad_args():
    with pytest.raises(ParameterError):
        lloyd_max_quantize(np.ones(4, dtype=complex), 0, 1.0)
    with pytest.raises(ParameterError):
        lloyd_max_quantize(np.ones(4, dtype=complex), 3, 0.0)


@pytest.mark.parametrize("bits", [1, 2, 3, 4, 5])
def test_empirical_distortion_matches_table(gaussian_samples, bits):
    q = lloyd_max_quantize(gaussian_samples, bits, 1.0)
    power = np.mean(np.abs(gaussian_samples) ** 2)
    mse = np.mean(np.abs(q - gaussian_samples) ** 2) / power
    assert mse == pytest.approx(distortion_factor(bits), rel=0.01)


@pytest.mark.parametrize("bits", [1, 2, 3, 4, 5])
def test_residual_decorrelation(gaussian_samples, bits):
    q = lloyd_max_quantize(gaussian_samples, bits, 1.0)
    gain, noise_var, cross = bussgang_decompose(gaussian_samples, q)
    rho = distortion_factor(bits)
    assert gain == pytest.approx(1.0 - rho, rel=0.01)
    assert cross < 0.01
    power = np.mean(np.abs(gaussian_samples) ** 2)
    assert noise_var / power == pytest.approx(rho * (1.0 - rho), rel=0.02)


def test_decompose_identity_limit(gaussian_samples):
    z = gaussian_samples[:100000]
    q = lloyd_max_quantize(z, 12, 1.0)
    gain, noise_var, _ = bussgang_decompose(z, q)
    assert gain == pytest.approx(1.0, abs=1e-3)
    assert noise_var < 1e-3


def test_decompose_length_mismatch():
    with pytest.raises(ParameterError):
        bussgang_decompose(np.ones(8), np.ones(9))


def _tables(L, K, val, beta):
    gains2 = np.full((L, L, K), val)
    betas = np.full((L, L, K), beta)
    for j in range(L):
        betas[j, j, :] = 1.0
    return gains2, betas


def test_noise_power_zero_when_distortionless():
    cfg = validate_config(SystemConfig(L=2, K=3, rho_ad=0.0, p_t=2.0))
    g2, b = _tables(2, 3, 1.5, cfg.beta_inter)
    assert quant_noise_power_data(cfg, g2, b, 0) == 0.0
    assert quant_noise_power_pilot(cfg, g2, b, 0) == 0.0


def test_noise_power_single_user_hand_value():
    M = 4
    cfg = validate_config(SystemConfig(L=1, K=1, M=M, adc_bits=2, p_t=3.0,
                                       p_p=6.0, tau=2, sigma_n2=0.7))
    g2, b = _tables(1, 1, float(M), cfg.beta_inter)
    rho = cfg.rho
    assert quant_noise_power_data(cfg, g2, b, 0) == pytest.approx(
        rho * (1 - rho) * (0.7 + 3.0 * M))
    assert quant_noise_power_pilot(cfg, g2, b, 0) == pytest.approx(
        rho * (1 - rho) * (0.7 + 6.0 / 2 * M))


def test_noise_power_linear_in_signal_power():
    cfg1 = validate_config(SystemConfig(L=2, K=4, adc_bits=3, p_t=1.0, sigma_n2=1e-12))
    cfg2 = validate_config(SystemConfig(L=2, K=4, adc_bits=3, p_t=2.0, sigma_n2=1e-12))
    g2, b = _tables(2, 4, 2.0, 0.1)
    assert quant_noise_power_data(cfg2, g2, b, 0) == pytest.approx(
        2.0 * quant_noise_power_data(cfg1, g2, b, 0))


def test_pilot_equals_data_when_tau_matches_power_ratio():
    # per-symbol pilot power P_p / tau equals P_t
    cfg = validate_config(SystemConfig(L=2, K=4, adc_bits=3, p_t=0.5, tau=6, p_p=3.0))
    g2, b = _tables(2, 4, 1.3, cfg.beta_inter)
    assert quant_noise_power_pilot(cfg, g2, b, 1) == pytest.approx(
        quant_noise_power_data(cfg, g2, b, 1))


def test_noise_power_symmetric_under_relabeling():
    rng = np.random.default_rng(3)
    L, K = 3, 5
    cfg = validate_config(SystemConfig(L=L, K=K, adc_bits=2, p_t=1.3))
    g2 = rng.uniform(0.0, 4.0, size=(L, L, K))
    b = rng.uniform(0.05, 1.0, size=(L, L, K))
    base = quant_noise_power_data(cfg, g2, b, 0)
    perm = rng.permutation(K)
    assert quant_noise_power_data(cfg, g2[:, :, perm], b[:, :, perm], 0) == pytest.approx(base)


def test_bussgang_model_dataclass():
    cfg = validate_config(SystemConfig(L=1, K=1, M=2, adc_bits=1, p_t=1.0))
    g2, b = _tables(1, 1, 2.0, cfg.beta_inter)
    model = BussgangModel.from_tables(cfg, g2, b, 0)
    assert model.gain == pytest.approx(1.0 - cfg.rho)
    assert 0.0 < model.gain <= 1.0
    assert model.sigma_q2 > 0.0 and model.sigma_pq2 > 0.0

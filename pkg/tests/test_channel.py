import numpy as np
import pytest

from mmwsim.bounds import exact_mean_inner, eta1
from mmwsim.channel import (dump_realization_csv, effective_channel,
                            sample_channel, steering_vector)
from mmwsim.config import SystemConfig, validate_config
from mmwsim.errors import ParameterError
from mmwsim.rng import substream
from mmwsim.training import train_beams


def _cfg(**kw):
    base = dict(L=2, K=3, N=16, M=4, adc_bits=3, p_t=1.0, seed=1)
    base.update(kw)
    return validate_config(SystemConfig(**base))


def test_steering_vector_broadside():
    np.testing.assert_allclose(steering_vector(np.pi / 2, 4, 0.5), np.ones(4), atol=1e-12)


def test_steering_vector_endfire():
    np.testing.assert_allclose(steering_vector(0.0, 2, 0.5), [1.0, -1.0], atol=1e-12)


def test_steering_vector_single_element():
    np.testing.assert_allclose(steering_vector(1.234, 1, 0.5), [1.0])


def test_steering_vector_rejects_empty():
    with pytest.raises(ParameterError):
        steering_vector(0.5, 0, 0.5)


def test_steering_vector_unit_modulus():
    v = steering_vector(0.777, 33, 0.5)
    np.testing.assert_allclose(np.abs(v), 1.0, atol=1e-12)
    assert v[0] == 1.0 + 0.0j


def test_sample_channel_beta_pattern():
    cfg = _cfg(L=2, K=3)
    real = sample_channel(cfg, substream(cfg.seed, 0))
    assert np.all(real.beta[0, 0] == 1.0) and np.all(real.beta[1, 1] == 1.0)
    assert np.all(real.beta[0, 1] == cfg.beta_inter)
    assert np.all(real.beta[1, 0] == cfg.beta_inter)
    single = sample_channel(_cfg(L=1, K=1), substream(1, 0))
    assert single.beta[0, 0, 0] == 1.0


def test_sample_channel_deterministic_per_trial():
    cfg = _cfg(seed=9)
    a = sample_channel(cfg, substream(cfg.seed, 5))
    b = sample_channel(cfg, substream(cfg.seed, 5))
    c = sample_channel(cfg, substream(cfg.seed, 6))
    np.testing.assert_array_equal(a.phi, b.phi)
    assert not np.array_equal(a.phi, c.phi)


def test_channel_matrix_rank_one_and_norm():
    cfg = _cfg()
    for t in range(100):
        real = sample_channel(cfg, substream(cfg.seed, t))
        H = real.channel_matrix(0, 1, 2)
        assert np.linalg.matrix_rank(H) == 1
        fro2 = np.sum(np.abs(H) ** 2)
        assert fro2 == pytest.approx(real.beta[0, 1, 2] * cfg.N * cfg.M, rel=1e-10)


def test_full_H_property_matches_per_link():
    cfg = _cfg(L=2, K=2, N=8, M=2)
    real = sample_channel(cfg, substream(0, 0))
    np.testing.assert_allclose(real.H[1, 0, 1], real.channel_matrix(1, 0, 1))


def test_effective_channel_equals_direct_product():
    cfg = _cfg(L=2, K=3, N=16, M=4)
    real = sample_channel(cfg, substream(cfg.seed, 0))
    training = train_beams(real, cfg)
    for j in range(2):
        for l in range(2):
            eff = effective_channel(real, training, j, l)
            direct = np.stack(
                [real.channel_matrix(j, l, k) @ training.w[l, k] for k in range(3)],
                axis=1)
            np.testing.assert_allclose(eff, direct, atol=1e-12)


def test_effective_channel_aligned_and_orthogonal_columns():
    cfg = _cfg(L=1, K=1, N=8, M=2)
    real = sample_channel(cfg, substream(3, 1))
    training = train_beams(real, cfg)
    # overwrite with a perfectly aligned beamformer
    training.w[0, 0] = real.h_U[0, 0, 0] / np.sqrt(2)
    training.c[0, 0, 0] = np.vdot(real.h_U[0, 0, 0], training.w[0, 0])
    eff = effective_channel(real, training, 0, 0)
    np.testing.assert_allclose(eff[:, 0], np.sqrt(2) * real.h_B[0, 0, 0], atol=1e-12)
    # and an orthogonal one
    h = real.h_U[0, 0, 0]
    w_perp = np.array([h[1].conj(), -h[0].conj()]) / np.sqrt(2)
    training.w[0, 0] = w_perp
    training.c[0, 0, 0] = np.vdot(h, w_perp)
    eff = effective_channel(real, training, 0, 0)
    np.testing.assert_allclose(eff[:, 0], 0.0, atol=1e-12)
    norm = np.linalg.norm(effective_channel(real, training, 0, 0)[:, 0])
    assert norm == pytest.approx(abs(training.c[0, 0, 0]) * np.sqrt(cfg.N), abs=1e-9)


def test_effective_channel_shape_mismatch():
    cfg = _cfg(L=2, K=3)
    real = sample_channel(cfg, substream(0, 0))
    training = train_beams(real, cfg)
    training.c = training.c[:, :, :2]
    with pytest.raises(ParameterError):
        effective_channel(real, training, 0, 0)


def _inner_products(N, draws, rng):
    th = rng.uniform(0.0, np.pi, size=(2, draws))
    n = np.arange(N)
    return np.exp(1j * np.pi * np.outer(np.cos(th[0]) - np.cos(th[1]), n)).sum(axis=1)


def test_mc_mean_inner_matches_exact_sum():
    rng = substream(21, 0)
    for N in (16, 256):
        draws = 10 ** 5
        vals = _inner_products(N, draws, rng).real
        se = np.std(vals, ddof=1) / np.sqrt(draws)
        assert abs(np.mean(vals) - exact_mean_inner(N)) < 3 * se


def test_large_N_column_orthogonality():
    # normalized inner products shrink like eta1/N
    N, draws = 1024, 2 * 10 ** 4
    rng = substream(22, 0)
    vals = _inner_products(N, draws, rng).real / N
    se = np.std(vals, ddof=1) / np.sqrt(draws)
    predicted = eta1(N) / N
    assert abs(np.mean(vals) - predicted) < 3 * se
    assert abs(np.mean(vals)) < predicted + 3 * se


def test_dump_realization_csv(tmp_path):
    cfg = _cfg(L=2, K=2, N=8, M=2)
    real = sample_channel(cfg, substream(0, 0))
    training = train_beams(real, cfg)
    path = tmp_path / "real.csv"
    dump_realization_csv(real, training, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "j,l,k,phi,theta,beta,abs_c"
    assert len(lines) == 1 + 2 * 2 * 2

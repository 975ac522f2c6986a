"""MRC detection, per-realization SIQNR, and the Monte-Carlo ergodic rate.

The semi-analytic mode conditions on the realized angles and beamforming
gains and integrates the data symbols, AWGN, quantization noise, and the
equivalent estimation noise analytically.  The symbol-level mode samples all
of those and runs the real quantizer, providing a model-error cross-check.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .channel import effective_channel, sample_channel
from .config import validate_config
from .errors import InternalConsistencyError, ParameterError, DegenerateInputError
from .estimation import estimate_all, pilot_statistics
from .quantize import lloyd_max_quantize, quant_noise_power_data
from .training import train_beams

THREADS_ENV = "SIMKIT_THREADS"


def mrc_detect(H_hat, received):
    """Maximal ratio combining: H_hat^H @ received."""
    H_hat = np.asarray(H_hat)
    received = np.asarray(received)
    if H_hat.ndim != 2 or received.shape[0] != H_hat.shape[0]:
        raise ParameterError(
            f"MRC shapes do not align: H_hat {H_hat.shape}, received {received.shape}"
        )
    return H_hat.conj().T @ received


def signal_power(realization, training, cfg, j, k):
    """Desired-signal power (1-rho)^2 P_t beta^2 |c|^4 N^2 for user (j, k)."""
    rho = cfg.rho
    return (
        (1.0 - rho) ** 2
        * cfg.p_t
        * realization.beta[j, j, k] ** 2
        * abs(training.c[j, j, k]) ** 4
        * realization.N ** 2
    )


def _conditional_powers(realization, training, mu_j, sigma_q2, cfg, j):
    """Per-user (S, I, I_floor) at BS j, vectorized over k.

    S and I follow the conditional split: S is the clean-channel signal power
    and I = E|I_n|^2 + E|I_q|^2 + E|S_r|^2 - S with the expectations taken
    over symbols, AWGN, quantization noise, and the estimation noise vector.
    I_floor is the always-positive mean-square-error form E|y - a x_k|^2 that
    the rate engine falls back to when destructive pilot contamination drives
    I itself below zero (rare, small K only).
    """
    rho = cfg.rho
    N = realization.N
    b_j = realization.beta[j]                     # (L, K)
    c_j = training.c[j]                           # (L, K)
    h_j = realization.h_B[j]                      # (L, K, N)
    gains2 = np.abs(c_j) ** 2

    total = float(np.sum(b_j * gains2))
    # u_k = sum_l beta^(1/2) c_jlk h_B_jlk: the pilot-contaminated estimate mean
    u = np.einsum("lk,lkn->kn", np.sqrt(b_j) * c_j, h_j)
    u_norm2 = np.sum(np.abs(u) ** 2, axis=1).real
    bracket = N * mu_j + u_norm2

    uh = np.einsum("kn,lin->kli", u.conj(), h_j)
    quad = np.einsum("li,kli->k", b_j * gains2, np.abs(uh) ** 2)

    e_in = (1.0 - rho) ** 2 * cfg.sigma_n2 * bracket
    e_iq = sigma_q2 * bracket
    e_sr = (1.0 - rho) ** 2 * cfg.p_t * (mu_j * N * total + quad)

    S = (1.0 - rho) ** 2 * cfg.p_t * (b_j[j] ** 2) * gains2[j] ** 2 * N ** 2
    I = e_in + e_iq + e_sr - S

    # clean coefficient a and the nu-averaged realized coefficient of x_jk
    a = (1.0 - rho) * np.sqrt(cfg.p_t) * b_j[j] * gains2[j] * N
    ea = (1.0 - rho) * np.sqrt(cfg.p_t) * np.sqrt(b_j[j]) * c_j[j] \
        * np.einsum("kn,kn->k", u.conj(), h_j[j])
    I_floor = I + 2.0 * a * (a - ea.real)
    return S, I, I_floor


def interference_power(realization, training, estimation, cfg, j, k):
    """Conditional interference-plus-noise power for user (j, k).

    Evaluates the closed-form expectations over data, AWGN, quantization
    noise, and estimation noise, holding the realized angles and gains fixed.
    """
    gains2 = np.abs(training.c) ** 2
    sigma_q2 = quant_noise_power_data(cfg, gains2, realization.beta, j)
    _, I, _ = _conditional_powers(realization, training, estimation.mu[j], sigma_q2, cfg, j)
    val = float(I[k])
    if val <= 0.0:
        raise InternalConsistencyError(
            f"conditional interference power is non-positive ({val:.4g}) for user "
            f"({j}, {k}); the realized estimate anti-aligned with the desired channel"
        )
    return val


def siqnr(S, I):
    """gamma = S / I."""
    if I <= 0.0:
        raise DegenerateInputError(f"interference power must be > 0, got {I}")
    return S / I


@dataclass
class RateReport:
    """Monte-Carlo ergodic-rate output.

    gamma_samples, S, and I are (trials, K) arrays for the evaluated cell.
    `pathological` counts realizations where the conditional interference
    power went non-positive and the mean-square-error floor was used instead.
    """

    rate_mc: float
    ci95: float
    trials: int
    mode: str
    gamma_samples: np.ndarray
    S: np.ndarray
    I: np.ndarray
    pathological: int
    seed: int


def _semi_trial(cfg, trial, training_noise_var):
    ch_rng = rngmod.substream(cfg.seed, trial, rngmod.STAGE_CHANNEL)
    realization = sample_channel(cfg, ch_rng)
    tr_rng = (
        rngmod.substream(cfg.seed, trial, rngmod.STAGE_TRAINING)
        if training_noise_var is not None
        else None
    )
    training = train_beams(realization, cfg, noise_var=training_noise_var, rng=tr_rng)
    gains2 = np.abs(training.c) ** 2
    _, mu, _ = pilot_statistics(realization, training, cfg)
    sigma_q2 = quant_noise_power_data(cfg, gains2, realization.beta, 0)
    S, I, I_floor = _conditional_powers(realization, training, mu[0], sigma_q2, cfg, 0)
    bad = I <= 0.0
    I = np.where(bad, I_floor, I)
    return S, I, int(np.sum(bad))


def _symbol_trial(cfg, trial, training_noise_var, n_symbols):
    rho = cfg.rho
    if rho > 0.0 and cfg.adc_bits is None:
        raise ParameterError("symbol_level mode needs adc_bits for the real quantizer")
    ch_rng = rngmod.substream(cfg.seed, trial, rngmod.STAGE_CHANNEL)
    realization = sample_channel(cfg, ch_rng)
    tr_rng = (
        rngmod.substream(cfg.seed, trial, rngmod.STAGE_TRAINING)
        if training_noise_var is not None
        else None
    )
    training = train_beams(realization, cfg, noise_var=training_noise_var, rng=tr_rng)

    pilot_rng = rngmod.substream(cfg.seed, trial, rngmod.STAGE_PILOT)
    est = estimate_all(realization, training, cfg, pilot_rng, quant_path="real")
    combiner = est.H_hat[0] / est.G[0][None, :]      # hbar + realized error

    L, K, N = realization.L, realization.K, realization.N
    eff_all = np.concatenate(
        [effective_channel(realization, training, 0, l) for l in range(L)], axis=1
    )                                                 # (N, L*K)
    b0 = realization.beta[0]
    gains2 = np.abs(training.c[0]) ** 2
    total = float(np.sum(b0 * gains2))
    agc_var = cfg.sigma_n2 + cfg.p_t * total

    data_rng = rngmod.substream(cfg.seed, trial, rngmod.STAGE_DATA)
    X = (
        data_rng.standard_normal((L * K, n_symbols))
        + 1j * data_rng.standard_normal((L * K, n_symbols))
    ) / np.sqrt(2.0)
    noise = (
        data_rng.standard_normal((N, n_symbols))
        + 1j * data_rng.standard_normal((N, n_symbols))
    ) * np.sqrt(cfg.sigma_n2 / 2.0)
    R = np.sqrt(cfg.p_t) * eff_all @ X + noise
    Q = lloyd_max_quantize(R, cfg.adc_bits, agc_var) if rho > 0.0 else R

    Y = combiner.conj().T @ Q                         # (K, n_symbols)
    a = (1.0 - rho) * np.sqrt(cfg.p_t) * b0[0] * gains2[0] * N
    S = a ** 2
    # measured mean-square deviation from the clean-coefficient signal; always
    # positive, and everything the analytic path treats as interference
    # (inter-user, inter-cell, noises, estimation error) lands in it
    I = np.mean(np.abs(Y - a[:, None] * X[:K, :]) ** 2, axis=1)
    return S, I, 0


def ergodic_rate(cfg, trials, mode="semi_analytic", training_noise_var=None,
                 symbols_per_trial=256):
    """Monte-Carlo ergodic rate over `trials` block-fading realizations.

    Returns mean log(1 + gamma) in the configured base with a 95% confidence
    half-width over per-trial averages.  Deterministic for a given cfg.seed
    regardless of worker count (SIMKIT_THREADS caps workers).
    """
    cfg = cfg if cfg.validated else validate_config(cfg)
    if trials < 10:
        raise ParameterError(f"trials must be >= 10, got {trials}")
    if mode in ("semi", "semi_analytic"):
        mode = "semi_analytic"
        worker = lambda t: _semi_trial(cfg, t, training_noise_var)
    elif mode in ("symbol", "symbol_level"):
        mode = "symbol_level"
        worker = lambda t: _symbol_trial(cfg, t, training_noise_var, symbols_per_trial)
    else:
        raise ParameterError(f"unknown mode {mode!r}")

    S = np.empty((trials, cfg.K))
    I = np.empty((trials, cfg.K))
    npath = 0
    n_workers = int(os.environ.get(THREADS_ENV, "1") or "1")
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            for t, (s_t, i_t, bad) in enumerate(pool.map(worker, range(trials))):
                S[t], I[t] = s_t, i_t
                npath += bad
    else:
        for t in range(trials):
            S[t], I[t], bad = worker(t)
            npath += bad

    gamma = S / I
    log_base = np.log(cfg.rate_log_base)
    per_trial = np.mean(np.log1p(gamma) / log_base, axis=1)
    rate = float(np.mean(per_trial))
    ci95 = float(1.96 * np.std(per_trial, ddof=1) / np.sqrt(trials))
    return RateReport(
        rate_mc=rate, ci95=ci95, trials=trials, mode=mode,
        gamma_samples=gamma, S=S, I=I, pathological=npath, seed=cfg.seed,
    )

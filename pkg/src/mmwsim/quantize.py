"""Scalar MMSE quantization and its linearized (gain + uncorrelated noise) model.

The analysis path only ever needs the distortion factor and the two noise
powers; the actual quantizer exists so the linearized model can be validated
empirically and so the rate engine has a fully-sampled mode.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import ndtr, ndtri  # standard normal CDF and its inverse

from .config import MIN_ADC_BITS, MAX_ADC_BITS
from .errors import ParameterError

_SQRT_2PI = np.sqrt(2.0 * np.pi)


def _norm_pdf(x):
    return np.exp(-0.5 * x * x) / _SQRT_2PI


@lru_cache(maxsize=None)
def lloyd_max_design(bits, max_iters=None, tol=1e-12):
    """Levels and thresholds of the MMSE quantizer for a unit-variance Gaussian.

    Fixed-point iteration (levels -> midpoint thresholds -> conditional means)
    warm-started from the optimal point density pdf^(1/3), which for a Gaussian
    is again Gaussian with variance 3.  Returns (levels, thresholds) with
    len(thresholds) == len(levels) - 1.
    """
    if not MIN_ADC_BITS <= bits <= MAX_ADC_BITS:
        raise ParameterError(f"adc bits must be in [1, 12], got {bits}")
    n = 2 ** bits
    if max_iters is None:
        # low depths converge fully; high depths start close enough that a
        # bounded budget leaves the levels within noise of optimal
        max_iters = 20000 if bits <= 6 else 1500
    p = (np.arange(n) + 0.5) / n
    # quantile init on the companded density
    y = np.sqrt(3.0) * ndtri(p)
    for _ in range(max_iters):
        t = 0.5 * (y[:-1] + y[1:])
        tl = np.concatenate(([-np.inf], t))
        tu = np.concatenate((t, [np.inf]))
        prob = ndtr(tu) - ndtr(tl)
        y_new = (_norm_pdf(tl) - _norm_pdf(tu)) / prob
        delta = np.max(np.abs(y_new - y))
        y = y_new
        if delta < tol:
            break
    thresholds = 0.5 * (y[:-1] + y[1:])
    return y, thresholds


def lloyd_max_distortion(bits, **design_kwargs):
    """MSE of the designed quantizer on a unit-variance Gaussian.

    Regenerates the value behind distortion_factor's frozen table.
    """
    levels, thresholds = lloyd_max_design(bits, **design_kwargs)
    tl = np.concatenate(([-np.inf], thresholds))
    tu = np.concatenate((thresholds, [np.inf]))
    prob = ndtr(tu) - ndtr(tl)
    # centroid condition makes E[(x - Q(x))^2] = E[x^2] - E[Q(x)^2]
    return 1.0 - float(np.sum(prob * levels ** 2))


def lloyd_max_quantize(samples, bits, input_variance):
    """Quantize complex samples with per-component Gaussian MMSE codebooks.

    Real and imaginary parts are quantized independently with the codebook
    matched to a Gaussian of variance input_variance / 2 per component, i.e.
    ideal automatic gain control.
    """
    if input_variance <= 0:
        raise ParameterError(f"input_variance must be > 0, got {input_variance}")
    levels, thresholds = lloyd_max_design(bits)
    scale = np.sqrt(input_variance / 2.0)
    samples = np.asarray(samples)
    re = levels[np.searchsorted(thresholds, samples.real / scale)]
    im = levels[np.searchsorted(thresholds, samples.imag / scale)]
    return scale * (re + 1j * im)


def bussgang_decompose(pre_quant, post_quant):
    """Empirical gain / noise split of a quantizer run.

    Returns (gain, noise_var, crosscorr) where gain = Re E[q y*] / E|y|^2,
    the noise is q - gain*y, and crosscorr measures how decorrelated the
    noise is from the input (should be ~0 for an MMSE quantizer).
    """
    pre_quant = np.asarray(pre_quant).ravel()
    post_quant = np.asarray(post_quant).ravel()
    if pre_quant.shape != post_quant.shape:
        raise ParameterError(
            f"pre/post lengths differ: {pre_quant.shape} vs {post_quant.shape}"
        )
    power = np.mean(np.abs(pre_quant) ** 2)
    gain = float(np.mean(post_quant * pre_quant.conj()).real / power)
    noise = post_quant - gain * pre_quant
    noise_var = float(np.mean(np.abs(noise) ** 2))
    crosscorr = float(abs(np.mean(noise * pre_quant.conj())) / power)
    return gain, noise_var, crosscorr


def total_rx_gain(gains2, betas, j):
    """sum_l sum_k beta_jlk |c_jlk|^2 at BS j."""
    return float(np.sum(betas[j] * gains2[j]))


def quant_noise_power_data(cfg, gains2, betas, j):
    """Data-phase quantization noise power at BS j.

    rho(1-rho) * (sigma_n^2 + P_t * sum beta|c|^2); gains2 and betas are the
    (L, L, K) tables of |c_jlk|^2 and beta_jlk.
    """
    rho = cfg.rho
    return rho * (1.0 - rho) * (cfg.sigma_n2 + cfg.p_t * total_rx_gain(gains2, betas, j))


def quant_noise_power_pilot(cfg, gains2, betas, j):
    """Pilot-phase quantization noise power at BS j (per-symbol power P_p/tau)."""
    rho = cfg.rho
    return rho * (1.0 - rho) * (
        cfg.sigma_n2 + cfg.p_p / cfg.tau * total_rx_gain(gains2, betas, j)
    )


@dataclass(frozen=True)
class BussgangModel:
    """Linearized quantizer statistics for one BS."""

    rho_ad: float
    gain: float
    sigma_q2: float
    sigma_pq2: float

    @classmethod
    def from_tables(cls, cfg, gains2, betas, j):
        rho = cfg.rho
        return cls(
            rho_ad=rho,
            gain=1.0 - rho,
            sigma_q2=quant_noise_power_data(cfg, gains2, betas, j),
            sigma_pq2=quant_noise_power_pilot(cfg, gains2, betas, j),
        )

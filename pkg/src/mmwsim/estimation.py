"""Orthogonal pilots, quantized pilot reception, and per-cell MMSE estimation."""

import csv
from dataclasses import dataclass

import numpy as np

from .channel import effective_channel
from .errors import ParameterError, DegenerateInputError
from .quantize import lloyd_max_quantize, quant_noise_power_pilot


def build_pilot_matrix(tau, K):
    """First K columns of the tau-point unitary DFT matrix; Psi^H Psi = I_K."""
    if tau < K:
        raise ParameterError(f"pilot length tau={tau} must be >= K={K}")
    m = np.arange(tau)[:, None]
    n = np.arange(K)[None, :]
    return np.exp(-2j * np.pi * m * n / tau) / np.sqrt(tau)


def noise_equivalent_mu(cfg, sigma_pq2):
    """Equivalent estimation-noise power: sigma_n^2/P_p + sigma_pq^2/((1-rho)^2 P_p)."""
    if cfg.p_p <= 0:
        raise ParameterError("p_p must be > 0")
    rho = cfg.rho
    return cfg.sigma_n2 / cfg.p_p + sigma_pq2 / ((1.0 - rho) ** 2 * cfg.p_p)


def mmse_gain_matrix(C, Bmat, mu_j, j):
    """Diagonal of the per-user MMSE shrinkage matrix at BS j.

    C and Bmat are the (L, L, K) gain and large-scale tables; entry k is
    beta_jjk |c_jjk|^2 / (sum_l beta_jlk |c_jlk|^2 + mu_j).
    """
    if mu_j < 0:
        raise ParameterError(f"mu_j must be >= 0, got {mu_j}")
    num = Bmat[j, j] * np.abs(C[j, j]) ** 2                     # (K,)
    den = np.sum(Bmat[j] * np.abs(C[j]) ** 2, axis=0) + mu_j    # (K,)
    if np.any(den == 0.0):
        raise DegenerateInputError("estimator bracket is singular (all gains and mu are zero)")
    return num / den


def receive_pilots(eff_channels, Psi, cfg, sigma_pq2, quant_path="bussgang", rng=None):
    """One quantized pilot observation Y_qp (N x tau) at a BS.

    eff_channels stacks the L effective channels (L, N, K) seen by this BS.
    The bussgang path applies the linearized model (scale by 1-rho, add white
    noise of power sigma_pq2); the real path runs the per-component MMSE
    quantizer with gain control matched to the statistical receive variance.
    """
    if rng is None:
        raise ParameterError("receive_pilots needs an rng")
    N = eff_channels.shape[1]
    tau = Psi.shape[0]
    Y_p = np.sqrt(cfg.p_p) * eff_channels.sum(axis=0) @ Psi.T
    Y_p = Y_p + _cn_noise(rng, (N, tau), cfg.sigma_n2)
    rho = cfg.rho
    if quant_path == "bussgang":
        return (1.0 - rho) * Y_p + _cn_noise(rng, (N, tau), sigma_pq2), Y_p
    if quant_path == "real":
        if cfg.adc_bits is None:
            raise ParameterError("the real quantizer path needs adc_bits")
        agc_var = sigma_pq2 / (rho * (1.0 - rho)) if rho > 0 else None
        if agc_var is None:
            return Y_p.copy(), Y_p
        return lloyd_max_quantize(Y_p, cfg.adc_bits, agc_var), Y_p
    raise ParameterError(f"unknown quant_path {quant_path!r}")


def estimate_channel(Y_qp, Psi, g_diag, cfg, hbar_jj=None):
    """MMSE channel estimate H_hat = Y_qp Psi* diag(g) / ((1-rho) sqrt(P_p)).

    When the true effective channel hbar_jj is supplied, the realized error
    matrix E = H_hat diag(1/g) - hbar_jj is returned as well (None otherwise).
    """
    g_diag = np.asarray(g_diag, dtype=float)
    if np.any(g_diag == 0.0):
        raise DegenerateInputError("estimation matrix has zero diagonal entries")
    rho = cfg.rho
    H_hat = (Y_qp @ Psi.conj()) * g_diag[None, :] / ((1.0 - rho) * np.sqrt(cfg.p_p))
    E = None
    if hbar_jj is not None:
        E = H_hat / g_diag[None, :] - hbar_jj
    return H_hat, E


@dataclass
class EstimationResult:
    """Pilot-phase outputs for every cell.

    Per-cell arrays are stacked along axis 0: Y_qp is (L, N, tau), G holds the
    estimator diagonals (L, K), H_hat is (L, N, K), e is (L, N, K) realized
    error columns, mu and sigma_pq2 are length-L.  C and Bmat alias the
    (L, L, K) gain and large-scale tables the estimator was given.
    """

    Psi: np.ndarray
    Y_qp: np.ndarray
    G: np.ndarray
    mu: np.ndarray
    H_hat: np.ndarray
    e: np.ndarray
    C: np.ndarray
    Bmat: np.ndarray
    sigma_pq2: np.ndarray


def pilot_statistics(realization, training, cfg):
    """(sigma_pq2, mu, G) per cell, from gains and config only (no sampling)."""
    L = realization.L
    gains2 = np.abs(training.c) ** 2
    sigma_pq2 = np.array(
        [quant_noise_power_pilot(cfg, gains2, realization.beta, j) for j in range(L)]
    )
    mu = np.array([noise_equivalent_mu(cfg, s) for s in sigma_pq2])
    G = np.stack(
        [mmse_gain_matrix(training.c, realization.beta, mu[j], j) for j in range(L)]
    )
    return sigma_pq2, mu, G


def estimate_all(realization, training, cfg, rng, quant_path="bussgang"):
    """Run the full pilot phase for every cell and return an EstimationResult."""
    L, N, K = realization.L, realization.N, realization.K
    Psi = build_pilot_matrix(cfg.tau, K)
    sigma_pq2, mu, G = pilot_statistics(realization, training, cfg)

    Y_qp = np.empty((L, N, cfg.tau), dtype=complex)
    H_hat = np.empty((L, N, K), dtype=complex)
    e = np.empty((L, N, K), dtype=complex)
    for j in range(L):
        eff = np.stack([effective_channel(realization, training, j, l) for l in range(L)])
        Y_qp[j], _ = receive_pilots(eff, Psi, cfg, sigma_pq2[j], quant_path, rng)
        H_hat[j], e[j] = estimate_channel(Y_qp[j], Psi, G[j], cfg, hbar_jj=eff[j])
    return EstimationResult(
        Psi=Psi, Y_qp=Y_qp, G=G, mu=mu, H_hat=H_hat, e=e,
        C=training.c, Bmat=realization.beta, sigma_pq2=sigma_pq2,
    )


def dump_error_power_csv(result, path):
    """Debug dump: realized per-user estimation error power ||e_jk||^2."""
    L, _, K = result.H_hat.shape
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j", "k", "err_power"])
        for j in range(L):
            for k in range(K):
                w.writerow([j, k, f"{np.sum(np.abs(result.e[j, :, k]) ** 2):.10g}"])


def _cn_noise(rng, shape, variance):
    """Circularly-symmetric complex Gaussian with the given per-entry variance."""
    if variance == 0.0:
        return np.zeros(shape, dtype=complex)
    s = np.sqrt(variance / 2.0)
    return s * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))

"""Sparse rank-one LoS channel sampling and effective-channel assembly."""

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError


def steering_vector(angle, count, spacing_ratio=0.5):
    """Uniform-linear-array response: element n is exp(-j*2*pi*n*d/lambda*cos(angle)).

    The first element is exactly 1+0j and every element has unit modulus.
    """
    if count < 1:
        raise ParameterError(f"steering vector length must be >= 1, got {count}")
    n = np.arange(count)
    return np.exp(-2j * np.pi * n * spacing_ratio * np.cos(angle))


@dataclass
class ChannelRealization:
    """One block-fading draw of every (BS j, cell l, user k) link.

    phi/theta/beta have shape (L, L, K) indexed [j, l, k]; h_U is (L, L, K, M)
    and h_B is (L, L, K, N).  The full N x M rank-one channel matrices are
    materialized lazily since most consumers only need the factors.
    """

    phi: np.ndarray
    theta: np.ndarray
    beta: np.ndarray
    h_U: np.ndarray
    h_B: np.ndarray
    _H: np.ndarray = field(default=None, repr=False)

    @property
    def L(self):
        return self.phi.shape[0]

    @property
    def K(self):
        return self.phi.shape[2]

    @property
    def M(self):
        return self.h_U.shape[3]

    @property
    def N(self):
        return self.h_B.shape[3]

    def channel_matrix(self, j, l, k):
        """beta^(1/2) * h_B h_U^H for one link (N x M, rank one)."""
        return np.sqrt(self.beta[j, l, k]) * np.outer(
            self.h_B[j, l, k], self.h_U[j, l, k].conj()
        )

    @property
    def H(self):
        """All channel matrices, shape (L, L, K, N, M)."""
        if self._H is None:
            self._H = np.sqrt(self.beta)[..., None, None] * (
                self.h_B[..., :, None] * self.h_U[..., None, :].conj()
            )
        return self._H


def sample_channel(cfg, rng):
    """Draw one ChannelRealization for a validated config.

    Angles are i.i.d. uniform on [0, pi] for every (j, l, k) triple; the
    large-scale gain is 1 intra-cell and cfg.beta_inter across cells.
    """
    L, K, N, M = cfg.L, cfg.K, cfg.N, cfg.M
    phi = rng.uniform(0.0, np.pi, size=(L, L, K))
    theta = rng.uniform(0.0, np.pi, size=(L, L, K))
    beta = np.full((L, L, K), cfg.beta_inter, dtype=float)
    beta[np.arange(L), np.arange(L), :] = 1.0

    r = cfg.antenna_spacing_ratio
    h_U = np.exp(-2j * np.pi * r * np.cos(phi)[..., None] * np.arange(M))
    h_B = np.exp(-2j * np.pi * r * np.cos(theta)[..., None] * np.arange(N))
    return ChannelRealization(phi=phi, theta=theta, beta=beta, h_U=h_U, h_B=h_B)


def effective_channel(realization, training, j, l):
    """Post-beamforming N x K channel from cell l's users to BS j.

    Column k is beta_jlk^(1/2) * c_jlk * h_B_jlk with c_jlk the realized
    beamforming gain from training.
    """
    if training.c.shape != realization.beta.shape:
        raise ParameterError(
            f"training gains shaped {training.c.shape} do not match channel "
            f"{realization.beta.shape}"
        )
    w = np.sqrt(realization.beta[j, l]) * training.c[j, l]      # (K,)
    return (realization.h_B[j, l] * w[:, None]).T               # (N, K)


def dump_realization_csv(realization, training, path):
    """Debug dump: one row per (j, l, k) with angles, beta, and |c|."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j", "l", "k", "phi", "theta", "beta", "abs_c"])
        L, K = realization.L, realization.K
        for j in range(L):
            for l in range(L):
                for k in range(K):
                    w.writerow([
                        j, l, k,
                        f"{realization.phi[j, l, k]:.10g}",
                        f"{realization.theta[j, l, k]:.10g}",
                        f"{realization.beta[j, l, k]:.10g}",
                        f"{abs(training.c[j, l, k]):.10g}",
                    ])

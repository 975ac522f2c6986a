"""Closed-form machinery: steering-sum constants, the rate lower bound, its
large-N limit, and the single-cell low-SNR scaling laws."""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.special
from scipy.signal import fftconvolve

from .config import validate_config
from .errors import ParameterError

EULER_GAMMA = 0.577215664901533  # Euler-Mascheroni constant

# Above this N the triple-product constant switches from its exact double sum
# to its proven upper bound (the ratio to N^2 vanishes either way).
ETA3_EXACT_MAX_N = 10 ** 5


def bessel_j0(x):
    """Bessel function of the first kind, order zero."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ParameterError("bessel_j0 needs finite input")
    out = scipy.special.j0(x)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=32)
def _j0_pi_table(N):
    """J0(n*pi) for n = 0..N-1."""
    return bessel_j0(math.pi * np.arange(N))


def sinc(x):
    """sin(x)/x with sinc(0) = 1 (unnormalized)."""
    return math.sin(x) / x if x != 0.0 else 1.0


def exact_mean_inner(N):
    """Exact E{h^H h'} over independent angles: sum of J0(n*pi)^2."""
    b = _j0_pi_table(N)
    return float(np.sum(b * b))


def exact_mean_abs2(N):
    """Exact E{|h^H h'|^2}: N + 2 sum (N-n) J0(n*pi)^2."""
    b = _j0_pi_table(N)
    n = np.arange(1, N)
    return float(N + 2.0 * np.sum((N - n) * b[1:] ** 2))


def _triple_double_sum(N):
    """sum_{m=1}^{N-1} sum_{n=0}^{N-m-1} J0(m pi) J0(n pi) J0((n+m) pi)."""
    b = _j0_pi_table(N)
    if N < 2:
        return 0.0
    conv = (np.convolve(b, b) if N <= 2048 else fftconvolve(b, b))[:N]
    # conv[s] = sum_{m=0..s} b_m b_{s-m}; drop the m=0 term to start at m=1
    return float(np.sum(b[1:] * (conv[1:] - b[0] * b[1:])))


def exact_mean_triple(N):
    """Exact E{h^H h' h'^H h''} over three independent angles."""
    return exact_mean_inner(N) + 2.0 * _triple_double_sum(N)


def eta1(N):
    """Large-N constant for E{h^H h'}: 1 + (ln N + a)/pi^2."""
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    return 1.0 + (math.log(N) + EULER_GAMMA) / math.pi ** 2


def eta2(N):
    """Large-N constant for E{|h^H h'|^2}."""
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    return N - 2.0 / math.pi ** 2 * (N - 1) + 2.0 * N / math.pi ** 2 * (math.log(N) + EULER_GAMMA)


def eta3(N):
    """Constant for the triple product: eta1 plus the exact double sum.

    For N > ETA3_EXACT_MAX_N the double sum is replaced by its proven upper
    bound (2(N-1)/pi^2)(ln N + a); eta3/N^2 vanishes either way, so the
    switch only matters for enormous N where the exact sum is pointless.
    """
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    if N > ETA3_EXACT_MAX_N:
        return eta3_upper_bound(N)
    return eta1(N) + 2.0 * _triple_double_sum(N)


def eta3_upper_bound(N):
    """eta1(N) + (2(N-1)/pi^2)(ln N + a), an upper bound on eta3 for N >= 2."""
    return eta1(N) + 2.0 * (N - 1) / math.pi ** 2 * (math.log(N) + EULER_GAMMA)


def gain_floor(cfg):
    """Analog-gain lower bound c = sqrt(M) sinc(M*pi*zeta/2)."""
    return math.sqrt(cfg.M) * sinc(0.5 * cfg.M * math.pi * cfg.zeta)


@dataclass(frozen=True)
class BoundInputs:
    """Scalars feeding the lower bound."""

    c: float          # analog-gain floor
    lam: float        # c^2 + (K-1)M + beta(L-1)KM
    mu: float         # bounded equivalent estimation-noise power
    eta1: float
    eta2: float
    eta3: float
    euler_a: float = EULER_GAMMA


def bound_inputs(cfg):
    cfg = cfg if cfg.validated else validate_config(cfg)
    c = gain_floor(cfg)
    L, K, M = cfg.L, cfg.K, cfg.M
    beta = cfg.beta_inter
    rho = cfg.rho
    lam = c ** 2 + (K - 1) * M + beta * (L - 1) * K * M
    mu = cfg.sigma_n2 / ((1.0 - rho) * cfg.p_p) + rho * lam / ((1.0 - rho) * cfg.tau)
    return BoundInputs(c=c, lam=lam, mu=mu, eta1=eta1(cfg.N), eta2=eta2(cfg.N), eta3=eta3(cfg.N))


@dataclass(frozen=True)
class BoundReport:
    """Lower bound value, its five interference terms, and the special cases."""

    P_u: float
    P_c: float
    P_n: float
    P_q: float
    P_e: float
    R_LB: float
    R_inf: float
    R_LB_s: float       # None unless L == 1
    R_LB_1: float
    R_LB_2: float
    xi1: float
    xi2: float
    inputs: BoundInputs


def lower_bound_rate(cfg):
    """Closed-form ergodic-rate lower bound and its term decomposition."""
    cfg = cfg if cfg.validated else validate_config(cfg)
    iv = bound_inputs(cfg)
    c, lam, mu = iv.c, iv.lam, iv.mu
    e1, e2, e3 = iv.eta1, iv.eta2, iv.eta3
    L, K, N, M = cfg.L, cfg.K, cfg.N, cfg.M
    beta = cfg.beta_inter
    rho = cfg.rho
    pt, sn2 = cfg.p_t, cfg.sigma_n2
    one = 1.0 - rho

    P_u = one ** 2 * pt * (K - 1) * M * c ** -2 * e2
    P_c = one ** 2 * pt * (L - 1) * K * beta * M * c ** -2 * e2
    bracket = (
        N * c ** 2
        + N * mu
        + (L - 1) * N * beta * M
        + (L - 1) * (L - 2) * beta * M * e1
        + 2.0 * (L - 1) * math.sqrt(beta) * c * math.sqrt(M) * e1
    )
    P_n = one ** 2 * sn2 * c ** -4 * bracket
    P_q = rho * one * (sn2 + lam * pt) * c ** -4 * bracket
    P_e = one ** 2 * pt * c ** -4 * (
        N * lam * mu
        + (L - 1) * N ** 2 * beta ** 2 * M ** 2
        + 2.0 * (L - 1) * (L - 2) * N * beta ** 2 * M ** 2 * e1
        + 2.0 * (L - 1) * N * (math.sqrt(beta) * c ** 3 * math.sqrt(M)
                               + beta ** 1.5 * c * M ** 1.5) * e1
        + (L - 1) * K * beta * M ** 2 * e2
        + (L - 1) * (L * K - K - 1) * beta ** 2 * M ** 2 * e2
        + (L - 1) * (L - 2) * K * beta * M ** 2 * e3
        + (L - 1) * (L - 2) * (L * K - K - 2) * beta ** 2 * M ** 2 * e3
        + 2.0 * (L - 1) * (K - 1) * math.sqrt(beta) * c * M ** 1.5 * e3
        + 2.0 * (L - 1) * (L * K - K - 1) * beta ** 1.5 * c * M ** 1.5 * e3
    )
    denom = P_u + P_c + P_n + P_q + P_e
    r_lb = cfg.log_rate(1.0 + one ** 2 * pt * N ** 2 / denom)

    xi1, r_lb_1 = low_snr_approx(cfg)
    xi2, r_lb_2 = high_pilot_approx(cfg)
    return BoundReport(
        P_u=P_u, P_c=P_c, P_n=P_n, P_q=P_q, P_e=P_e,
        R_LB=r_lb,
        R_inf=asymptotic_limit(cfg),
        R_LB_s=single_cell_bound(cfg) if L == 1 else None,
        R_LB_1=r_lb_1, R_LB_2=r_lb_2, xi1=xi1, xi2=xi2,
        inputs=iv,
    )


def asymptotic_limit(cfg):
    """N -> infinity limit log(1 + c^4 / ((L-1) beta^2 M^2)).

    Diverges for a single cell (no pilot contamination); reported as +inf.
    """
    cfg = cfg if cfg.validated else validate_config(cfg)
    if cfg.L == 1:
        return math.inf
    c = gain_floor(cfg)
    return cfg.log_rate(1.0 + c ** 4 / ((cfg.L - 1) * cfg.beta_inter ** 2 * cfg.M ** 2))


def single_cell_bound(cfg):
    """Single-cell closed-form bound, written in SNR form.

    Algebraically identical to lower_bound_rate at L = 1; kept as a separate
    expression so the identity is testable.
    """
    cfg = cfg if cfg.validated else validate_config(cfg)
    if cfg.L != 1:
        raise ParameterError(f"single_cell_bound needs L == 1, got L={cfg.L}")
    rho = cfg.rho
    one = 1.0 - rho
    c = gain_floor(cfg)
    K, N, M = cfg.K, cfg.N, cfg.M
    lam = c ** 2 + (K - 1) * M
    g_t = cfg.p_t / cfg.sigma_n2
    g_p = cfg.p_p / cfg.sigma_n2
    denom = (
        c ** -4 * N / (g_t * g_p)
        + c ** -2 * N * ((one + rho * c ** -2 * lam / cfg.tau) / g_t + c ** -2 * lam / g_p)
        + (one + c ** -2 * lam / cfg.tau) * rho * N * c ** -2 * lam
        + one ** 2 * M * (K - 1) * c ** -2 * eta2(N)
    )
    return cfg.log_rate(1.0 + one ** 2 * N ** 2 / denom)


def low_snr_approx(cfg):
    """(xi1, rate) for the low data & pilot SNR regime: xi1 = (1-rho)^2 N M^2 g_p."""
    cfg = cfg if cfg.validated else validate_config(cfg)
    one = 1.0 - cfg.rho
    g_t = cfg.p_t / cfg.sigma_n2
    g_p = cfg.p_p / cfg.sigma_n2
    xi1 = one ** 2 * cfg.N * cfg.M ** 2 * g_p
    return xi1, cfg.log_rate(1.0 + xi1 * g_t)


def high_pilot_approx(cfg):
    """(xi2, rate) for low data / high pilot SNR: xi2 = (1-rho)^2 N M / (1-rho+rho K/tau)."""
    cfg = cfg if cfg.validated else validate_config(cfg)
    rho = cfg.rho
    one = 1.0 - rho
    g_t = cfg.p_t / cfg.sigma_n2
    xi2 = one ** 2 * cfg.N * cfg.M / (one + rho * cfg.K / cfg.tau)
    return xi2, cfg.log_rate(1.0 + xi2 * g_t)

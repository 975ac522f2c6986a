"""Scenario configuration, validation, and the ADC distortion-factor table."""

import json
import math
from dataclasses import dataclass, replace, fields

from .errors import ParameterError, ConfigError

# Normalized MSE of the MSE-optimal (Lloyd-Max) scalar quantizer for a
# unit-variance Gaussian input, by bit depth.  Values come from running the
# fixed-point design in quantize.lloyd_max_design to convergence; b=1 is the
# analytic 1 - 2/pi.  tests/test_config.py regenerates the low depths.
RHO_AD_TABLE = {
    1: 0.363380227632,
    2: 0.117481847829,
    3: 0.034547760788,
    4: 0.009501008008,
    5: 0.002504668356,
    6: 6.442396653e-04,
    7: 1.634782300e-04,
    8: 4.118508286e-05,
    9: 1.033682869e-05,
    10: 2.587973554e-06,
    11: 6.464407687e-07,
    12: 1.616356268e-07,
}

MIN_ADC_BITS = 1
MAX_ADC_BITS = 12


def distortion_factor(bits):
    """Distortion factor of a `bits`-deep MMSE quantizer for Gaussian input.

    Strictly decreasing in `bits`; 1 - distortion_factor(bits) is the
    linearized quantizer gain.
    """
    if not isinstance(bits, (int,)) or isinstance(bits, bool):
        raise ParameterError(f"adc bits must be an integer, got {bits!r}")
    if not MIN_ADC_BITS <= bits <= MAX_ADC_BITS:
        raise ParameterError(
            f"adc bits must be in [{MIN_ADC_BITS}, {MAX_ADC_BITS}], got {bits}"
        )
    return RHO_AD_TABLE[bits]


@dataclass(frozen=True)
class SystemConfig:
    """All scenario parameters for one simulation or bound evaluation.

    Powers are linear.  `tau` and `p_p` default to K and tau*p_t when left
    unset.  Instances are immutable once validated and safe to share across
    worker threads.
    """

    L: int = 1                      # cells
    K: int = 1                      # users per cell
    N: int = 64                     # BS antennas
    M: int = 2                      # user antennas
    B: int = None                   # phase-shifter bits, default 6
    tau: int = None                 # pilot length, default K
    adc_bits: int = None            # ADC depth; ignored when rho_ad given
    rho_ad: float = None            # explicit distortion-factor override
    p_t: float = 1.0                # data transmit power
    p_p: float = None               # pilot power (total per user over tau)
    sigma_n2: float = 1.0           # noise power
    beta_inter: float = None        # inter-cell large-scale factor, default 0.1
    antenna_spacing_ratio: float = 0.5
    rate_log_base: float = 2.0
    seed: int = 0
    warnings: tuple = ()            # attached by validate_config
    validated: bool = False

    @property
    def rho(self):
        """Effective ADC distortion factor."""
        if self.rho_ad is not None:
            return self.rho_ad
        return distortion_factor(self.adc_bits)

    @property
    def zeta(self):
        """Phase codebook half-interval pi / 2^(B+1)."""
        return math.pi / 2 ** (self.B + 1)

    @property
    def snr_db(self):
        return 10.0 * math.log10(self.p_t / self.sigma_n2)

    @property
    def pilot_snr_db(self):
        return 10.0 * math.log10(self.p_p / self.sigma_n2)

    def log_rate(self, x):
        """log(x) in the configured rate base."""
        return math.log(x) / math.log(self.rate_log_base)


_CONFIG_KEYS = {f.name for f in fields(SystemConfig)} - {"warnings", "validated"}


def validate_config(cfg):
    """Normalize and check a SystemConfig.

    Fills defaults (beta_inter=0.1, B=6, tau=K, p_p=tau*p_t), collects every
    violation instead of stopping at the first, and attaches non-fatal
    warnings to the returned config.  Idempotent.
    """
    errors = []
    warnings = []

    updates = {}
    if cfg.beta_inter is None:
        updates["beta_inter"] = 0.1
    if cfg.B is None:
        updates["B"] = 6
    if cfg.tau is None:
        updates["tau"] = cfg.K
    if cfg.p_p is None:
        tau = updates.get("tau", cfg.tau)
        updates["p_p"] = tau * cfg.p_t
    cfg = replace(cfg, **updates)

    for name in ("L", "K", "N", "M"):
        v = getattr(cfg, name)
        if not isinstance(v, int) or v < 1:
            errors.append(f"{name} must be a positive integer, got {v!r}")
    if not isinstance(cfg.B, int) or cfg.B < 0:
        errors.append(f"B must be a non-negative integer, got {cfg.B!r}")
    if not isinstance(cfg.tau, int) or cfg.tau < 1:
        errors.append(f"tau must be a positive integer, got {cfg.tau!r}")
    elif isinstance(cfg.K, int) and cfg.K >= 1 and cfg.tau < cfg.K:
        errors.append(f"tau < K: orthogonal pilots need tau >= K (tau={cfg.tau}, K={cfg.K})")

    if cfg.rho_ad is not None:
        if not 0.0 <= cfg.rho_ad < 1.0:
            errors.append(f"rho_ad must be in [0, 1), got {cfg.rho_ad}")
    elif cfg.adc_bits is None:
        errors.append("one of adc_bits or rho_ad must be set")
    elif not isinstance(cfg.adc_bits, int) or not MIN_ADC_BITS <= cfg.adc_bits <= MAX_ADC_BITS:
        errors.append(f"adc_bits must be an integer in [1, 12], got {cfg.adc_bits!r}")

    for name in ("p_t", "p_p", "sigma_n2"):
        v = getattr(cfg, name)
        if not (isinstance(v, (int, float)) and v > 0):
            errors.append(f"{name} must be > 0, got {v!r}")

    if cfg.beta_inter is not None and not 0.0 < cfg.beta_inter < 1.0:
        errors.append(f"beta_inter must be in (0, 1), got {cfg.beta_inter}")
    if not (isinstance(cfg.antenna_spacing_ratio, (int, float)) and cfg.antenna_spacing_ratio > 0):
        errors.append(f"antenna_spacing_ratio must be > 0, got {cfg.antenna_spacing_ratio!r}")
    if not (isinstance(cfg.rate_log_base, (int, float)) and cfg.rate_log_base > 1):
        errors.append(f"rate_log_base must be > 1, got {cfg.rate_log_base!r}")

    if errors:
        raise ConfigError(errors)

    # The analytic lower gain bound only holds for zeta <= 2/M; wider
    # codebook intervals are allowed but flagged.
    if cfg.zeta > 2.0 / cfg.M:
        warnings.append(
            f"zeta = pi/2^(B+1) = {cfg.zeta:.4g} exceeds 2/M = {2.0 / cfg.M:.4g}; "
            "the analog-gain lower bound is not asserted"
        )

    return replace(cfg, warnings=tuple(warnings), validated=True)


def config_from_dict(doc):
    """Build a SystemConfig from a plain dict with strict key checking."""
    unknown = sorted(set(doc) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError([f"unknown config key {k!r}" for k in unknown])
    return SystemConfig(**doc)


def load_config(path):
    """Read a config JSON document; unknown keys are a hard error."""
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    return config_from_dict(doc)


# Keys settable through `--set key=value` and sweep axes.  snr_db and
# pilot_snr_db translate to p_t / p_p against the document's sigma_n2.
_INT_KEYS = {"L", "K", "N", "M", "B", "tau", "adc_bits", "seed"}
_FLOAT_KEYS = {"rho_ad", "p_t", "p_p", "sigma_n2", "beta_inter",
               "antenna_spacing_ratio", "rate_log_base"}
SETTABLE_KEYS = _INT_KEYS | _FLOAT_KEYS | {"snr_db", "pilot_snr_db"}


def set_param(doc, name, value):
    """Set one parameter on a raw config dict, coercing the value type."""
    if name not in SETTABLE_KEYS:
        raise ParameterError(f"unknown parameter {name!r}")
    sigma_n2 = doc.get("sigma_n2", 1.0)
    if name == "snr_db":
        doc["p_t"] = sigma_n2 * 10.0 ** (float(value) / 10.0)
    elif name == "pilot_snr_db":
        doc["p_p"] = sigma_n2 * 10.0 ** (float(value) / 10.0)
    elif name in _INT_KEYS:
        doc[name] = int(value)
    else:
        doc[name] = float(value)
    return doc

"""Shadowed-Rician small-scale fading of the power gain |h|^2.

The LoS amplitude is Nakagami-m with mean power ``omega``; the scattered part
is circularly-symmetric Gaussian with total power ``2 b0``. For integer m the
power gain is a finite mixture of Gamma(k + 1) laws, k = 0..m-1, which gives
the exponential-sum PDF and CDF used throughout.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidArgumentError


@dataclass(frozen=True)
class ShadowedRicianParams:
    """Shadowed-Rician parameters.

    Args:
        b0: half of the average scattered power, so ``2 * b0`` is the nLoS power.
        omega: average LoS power.
        m: Nakagami shadowing parameter, a positive integer.
    """

    b0: float
    omega: float
    m: int

    def __post_init__(self):
        if not self.b0 > 0:
            raise InvalidArgumentError(f"b0 must be positive, got {self.b0}")
        if not self.omega >= 0:
            raise InvalidArgumentError(f"omega must be non-negative, got {self.omega}")
        if isinstance(self.m, bool) or int(self.m) != self.m or self.m < 1:
            raise InvalidArgumentError(
                f"m must be a positive integer, got {self.m!r}: the closed forms rely on the "
                "finite Laguerre expansion of 1F1(m; 1; .), which exists only for integer m"
            )
        object.__setattr__(self, "m", int(self.m))

    @classmethod
    def from_rician_k(cls, k_factor, m, mean_power=1.0):
        """Parameters with Rician factor ``K = omega / 2b0`` and ``2b0 + omega = mean_power``."""
        if not k_factor >= 0:
            raise InvalidArgumentError("Rician K factor must be non-negative")
        scatter = mean_power / (k_factor + 1.0)
        return cls(scatter / 2.0, mean_power - scatter, m)

    @property
    def mean_power(self):
        return 2.0 * self.b0 + self.omega

    @property
    def rician_k(self):
        return self.omega / (2.0 * self.b0)

    @property
    def k_los(self):
        """Shadowed LoS factor, omega / ((2b0 + omega) m)."""
        return self.omega / (self.mean_power * self.m)

    @property
    def k_sct(self):
        """Isotropic scattering factor, 2b0 / (2b0 + omega)."""
        return 2.0 * self.b0 / self.mean_power

    @property
    def a_st(self):
        two_b0 = 2.0 * self.b0
        return (two_b0 * self.m / (two_b0 * self.m + self.omega)) ** self.m / two_b0

    @property
    def b_st(self):
        return 1.0 / (2.0 * self.b0)

    @property
    def c_st(self):
        two_b0 = 2.0 * self.b0
        return self.omega / (two_b0 * (two_b0 * self.m + self.omega))

    @property
    def e_st(self):
        """Decay rate of the exponential terms, m / (2b0 m + omega)."""
        return self.m / (2.0 * self.b0 * self.m + self.omega)

    def varsigma(self, k):
        """Coefficient a_ST c_ST^k / e_ST^(k+1) of the k-th exponential term."""
        two_b0_m = 2.0 * self.b0 * self.m
        return two_b0_m ** (self.m - k - 1) * self.omega**k / (two_b0_m + self.omega) ** (self.m - 1)

    @cached_property
    def mixture_weights(self):
        """C(m-1, k) K_Sct^(m-k-1) K_LoS^k / (K_Sct + K_LoS)^(m-1), k = 0..m-1.

        These are the binomial-expansion weights of the CDF; they are
        non-negative and sum to one. Evaluated in log space.
        """
        m = self.m
        p_los = self.k_los / (self.k_sct + self.k_los)
        if p_los == 0.0:
            w = np.zeros(m)
            w[0] = 1.0
            return w
        k = np.arange(m)
        log_c = np.array([math.lgamma(m) - math.lgamma(i + 1) - math.lgamma(m - i) for i in range(m)])
        log_w = log_c + k * math.log(p_los) + (m - 1 - k) * math.log1p(-p_los)
        w = np.exp(log_w)
        w.flags.writeable = False
        return w


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise InvalidArgumentError("power gain must be non-negative")
    return arr


def _finish(arr):
    return arr if arr.ndim else float(arr)


def _poisson_partial_sums(y, kmax):
    # sum_{p<=k} y^p e^{-y} / p!  for k = 0..kmax, shape (kmax+1,) + y.shape
    y = np.asarray(y, dtype=float)
    out = np.empty((kmax + 1,) + y.shape)
    term = np.exp(-y)
    acc = term.copy()
    out[0] = acc
    for p in range(1, kmax + 1):
        term = term * y / p
        acc = acc + term
        out[p] = acc
    return out


def pdf_power(params, x):
    """Density of |h|^2 in the (a_ST, c_ST, e_ST) exponential-sum form."""
    x = _as_array(x)
    m, e = params.m, params.e_st
    if m <= 12:
        total = np.zeros_like(x)
        xk = np.ones_like(x)
        for k in range(m):
            total = total + math.comb(m - 1, k) * params.c_st**k / math.factorial(k) * xk
            xk = xk * x
        return _finish(params.a_st * total * np.exp(-e * x))
    # Log-domain mixture of Gamma(k+1, 1/e_ST) densities for large m.
    w = params.mixture_weights
    with np.errstate(divide="ignore"):
        logx = np.log(x)
    total = np.zeros_like(x)
    for k in range(m):
        if w[k] == 0.0:
            continue
        logterm = math.log(w[k]) + (k + 1) * math.log(e) - math.lgamma(k + 1) - e * x
        if k:
            logterm = logterm + k * logx
        total = total + np.exp(logterm)
    return _finish(total)


def pdf_power_k(params, x):
    """Density of |h|^2 written with the K_LoS / K_Sct factors.

    For normalised fading (2b0 + omega = 1) this is the K-factor form of the
    density; otherwise the argument is rescaled by the mean power.
    """
    x = _as_array(x)
    s = params.k_sct + params.k_los
    y = x / (params.mean_power * s)
    w = params.mixture_weights
    total = np.zeros_like(x)
    for k in range(params.m):
        total = total + w[k] * y**k / math.factorial(k)
    return _finish(total * np.exp(-y) / (params.mean_power * s))


def survival_power(params, x):
    """P(|h|^2 > x) as the weighted sum of Poisson partial sums."""
    x = _as_array(x)
    y = x * params.e_st
    partial = _poisson_partial_sums(y, params.m - 1)
    w = params.mixture_weights.reshape((-1,) + (1,) * y.ndim)
    # The weights sum to one only to rounding; keep the result a probability
    # and pin the x = 0 value to the exact identity.
    total = np.clip(np.sum(w * partial, axis=0), 0.0, 1.0)
    return _finish(np.where(y == 0.0, 1.0, total))


def cdf_power(params, x):
    """P(|h|^2 <= x), K-factor form: one minus the weighted Poisson partial sums."""
    return _finish(1.0 - np.asarray(survival_power(params, x)))


def cdf_power_st(params, x):
    """P(|h|^2 <= x) written with varsigma(k) and e_ST directly (no log-domain weights)."""
    x = _as_array(x)
    y = x * params.e_st
    partial = _poisson_partial_sums(y, params.m - 1)
    total = np.zeros_like(y)
    for k in range(params.m):
        total = total + math.comb(params.m - 1, k) * params.varsigma(k) * partial[k]
    return _finish(np.where(y == 0.0, 0.0, np.clip(1.0 - total, 0.0, 1.0)))


def mean_power(params):
    """E[|h|^2] = 2 b0 + omega."""
    return params.mean_power


def varsigma_total(params):
    """sum_k C(m-1, k) varsigma(k), the CDF constant term; equals one."""
    return math.fsum(math.comb(params.m - 1, k) * params.varsigma(k) for k in range(params.m))


def mean_power_binomial_sum(params):
    """sum_k C(m-1, k) q^k (k + 1) with q = omega / (2 m b0), term by term."""
    q = params.omega / (2.0 * params.m * params.b0)
    return math.fsum(math.comb(params.m - 1, k) * q**k * (k + 1) for k in range(params.m))


def mean_power_binomial_closed(params):
    """Closed form (1 + q)^(m-1) + (m - 1) q (1 + q)^(m-2) of :func:`mean_power_binomial_sum`."""
    m = params.m
    q = params.omega / (2.0 * m * params.b0)
    return (1.0 + q) ** (m - 1) + (m - 1) * q * (1.0 + q) ** (m - 2)


def mean_power_from_series(params):
    """2 b0 I / (1 + q)^(m-2) with I the binomial sum; reduces to 2 b0 + omega."""
    q = params.omega / (2.0 * params.m * params.b0)
    return 2.0 * params.b0 * mean_power_binomial_sum(params) / (1.0 + q) ** (params.m - 2)


def sample_power(params, rng, size=None):
    """Draw |h|^2 = |A e^{j alpha} + Z|^2.

    ``A^2 ~ Gamma(m, omega / m)`` is the Nakagami LoS power, ``alpha`` a uniform
    phase and ``Z`` complex Gaussian with total variance ``2 b0``.
    """
    if params.omega > 0:
        amp = np.sqrt(rng.gamma(params.m, params.omega / params.m, size=size))
    else:
        amp = np.zeros(size) if size is not None else 0.0
    phase = rng.uniform(0.0, 2.0 * np.pi, size=size)
    sigma = math.sqrt(params.b0)
    re = amp * np.cos(phase) + sigma * rng.standard_normal(size)
    im = amp * np.sin(phase) + sigma * rng.standard_normal(size)
    return re * re + im * im

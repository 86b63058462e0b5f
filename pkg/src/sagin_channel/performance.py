"""Closed-form link performance: mean SNR, BER bound, outage, ergodic rate and goodput.

The instantaneous SNR is ``lambda_t * |h|^2`` with ``lambda_t`` the composed
link budget and ``|h|^2`` Shadowed-Rician. Every expression reduces to sums
over the binomial mixture weights of the fading law.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

from . import fading
from .errors import DomainError, InvalidArgumentError
from .specfun import exp_integral_e1, tricomi_u_equal

LN2 = math.log(2.0)
BER_VALID_MAX_SNR = 1e3  # 30 dB


def is_square_qam(order):
    """True for square constellations with a power-of-two side: 4, 16, 64, ..."""
    if isinstance(order, bool) or int(order) != order or order < 4:
        return False
    side = math.isqrt(int(order))
    return side * side == order and side & (side - 1) == 0


@dataclass(frozen=True)
class PerformanceInputs:
    """Operating point for the performance chain.

    Args:
        lambda_t: linear mean-SNR scale of the link budget.
        fading: Shadowed-Rician parameters of |h|^2.
        qam_order: square M-QAM constellation size (4, 16, 64, ...).
        outage_threshold: linear SNR below which the link is in outage.
    """

    lambda_t: float
    fading: fading.ShadowedRicianParams
    qam_order: int = 4
    outage_threshold: float = 0.1

    def __post_init__(self):
        if not self.lambda_t > 0:
            raise InvalidArgumentError(f"lambda_t must be positive, got {self.lambda_t}")
        if not is_square_qam(self.qam_order):
            raise InvalidArgumentError(f"qam_order must be a square power-of-two size >= 4, got {self.qam_order}")
        if not self.outage_threshold > 0:
            raise InvalidArgumentError("outage_threshold must be positive")
        object.__setattr__(self, "qam_order", int(self.qam_order))

    def replace(self, **changes):
        values = dict(
            lambda_t=self.lambda_t,
            fading=self.fading,
            qam_order=self.qam_order,
            outage_threshold=self.outage_threshold,
        )
        values.update(changes)
        return PerformanceInputs(**values)


class BerBound(NamedTuple):
    value: float
    valid: bool


def mean_snr(inputs):
    """E[gamma_SNR] = lambda_t (2b0 + omega); equals lambda_t for normalised fading."""
    return inputs.lambda_t * inputs.fading.mean_power


def ber_upper_bound(inputs):
    """Average-SNR M-QAM BER bound (1/5) exp(-3 E[gamma] / (2 (M - 1))).

    ``valid`` is False when the mean SNR exceeds 30 dB, outside the range in
    which the 1/5 prefactor is established.
    """
    snr = mean_snr(inputs)
    value = 0.2 * math.exp(-3.0 * snr / (2.0 * (inputs.qam_order - 1)))
    return BerBound(value, 0.0 <= snr <= BER_VALID_MAX_SNR)


def log_ber_upper_bound(inputs):
    """Natural log of the BER bound; stays finite where the bound underflows."""
    return math.log(0.2) - 3.0 * mean_snr(inputs) / (2.0 * (inputs.qam_order - 1))


def log_goodput_gap(inputs):
    """log(R_er - R_GP) = log(R_er) + log(BER bound)."""
    return math.log(ergodic_rate(inputs)) + log_ber_upper_bound(inputs)


def outage_probability(inputs):
    """P(lambda_t |h|^2 < gamma_th), the fading CDF at gamma_th / lambda_t."""
    return fading.cdf_power(inputs.fading, inputs.outage_threshold / inputs.lambda_t)


def _exp_e1(u):
    # e^u E1(u) = -e^u Ei(-u); the quadrature form avoids overflowing e^u.
    if u < 700.0:
        return math.exp(u) * exp_integral_e1(u)
    return tricomi_u_equal(1, u)


def _rate_integral(p, u):
    # u^p / p! * int_0^inf x^p e^{-u x} / (1 + x) dx = u^p Psi(p+1, p+1; u)
    if p == 0:
        return _exp_e1(u)
    try:
        return math.exp(p * math.log(u)) * tricomi_u_equal(p + 1, u)
    except DomainError as exc:
        raise DomainError(f"ergodic rate term p={p} at u={u}: {exc}") from exc


def ergodic_rate_parts(inputs):
    """Split the ergodic rate into its p = 0 and p >= 1 contributions (bits/s/Hz).

    The p = 0 part uses the exponential-integral term, the p >= 1 part the
    Tricomi terms. Their sum is :func:`ergodic_rate`.
    """
    params = inputs.fading
    u = params.e_st / inputs.lambda_t
    w = params.mixture_weights
    terms = [_rate_integral(p, u) for p in range(params.m)]
    first = float(math.fsum(w)) * terms[0]
    rest = 0.0
    for k in range(1, params.m):
        rest += float(w[k]) * math.fsum(terms[1 : k + 1])
    return first / LN2, rest / LN2


def ergodic_rate(inputs):
    """E[log2(1 + gamma_SNR)] in closed form."""
    first, rest = ergodic_rate_parts(inputs)
    return first + rest


def goodput_lower_bound(inputs):
    """(1 - BER bound) times the ergodic rate."""
    return (1.0 - ber_upper_bound(inputs).value) * ergodic_rate(inputs)

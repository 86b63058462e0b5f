"""Special functions used by the closed-form performance expressions.

Only the parameter ranges the closed forms need are covered: integer shape
parameters for the incomplete gamma and Tricomi functions, real arguments
everywhere. Domain violations raise :class:`~sagin_channel.errors.DomainError`
or :class:`~sagin_channel.errors.InvalidArgumentError`.
"""

import math
from fractions import Fraction
from functools import lru_cache

from scipy.integrate import quad

from .errors import ConvergenceError, DomainError, InvalidArgumentError

EULER_GAMMA = 0.57721566490153286061

# Above this argument the asymptotic expansion of Ei is more accurate than
# the power series; the smallest asymptotic term at 40 is ~7e-17 relative.
_EI_ASYMPTOTIC_SWITCH = 40.0
_MAX_TERMS = 10_000


def _check_int(name, value, minimum):
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise InvalidArgumentError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def _e1_series(x):
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!), used for 0 < x <= 1
    total = 0.0
    term = 1.0
    for k in range(1, _MAX_TERMS):
        term *= -x / k
        contrib = term / k
        total += contrib
        if abs(contrib) < 1e-17 * abs(total):
            break
    return -EULER_GAMMA - math.log(x) - total


def _e1_continued_fraction(x):
    # Modified Lentz evaluation of E1(x) = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_TERMS):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h * math.exp(-x)
    raise ConvergenceError(f"E1 continued fraction did not converge at x={x}")


def exp_integral_e1(x):
    """Exponential integral E1(x) = int_x^inf e^{-t}/t dt for x > 0."""
    x = float(x)
    if x <= 0.0:
        raise DomainError(f"E1(x) requires x > 0, got {x}")
    if x <= 1.0:
        return _e1_series(x)
    return _e1_continued_fraction(x)


def exp_integral_ei(x):
    """Principal-value exponential integral Ei(x) = int_{-inf}^x e^t/t dt.

    Negative arguments go through ``Ei(x) = -E1(-x)``. Positive arguments
    use the convergent series up to 40 and the asymptotic expansion beyond.

    Raises:
        DomainError: at x == 0, where Ei has a logarithmic singularity.
    """
    x = float(x)
    if x == 0.0:
        raise DomainError("Ei(x) is singular at x = 0")
    if x < 0.0:
        return -exp_integral_e1(-x)
    if x <= _EI_ASYMPTOTIC_SWITCH:
        total = 0.0
        term = 1.0
        for k in range(1, _MAX_TERMS):
            term *= x / k
            contrib = term / k
            total += contrib
            if contrib < 1e-17 * total:
                break
        return EULER_GAMMA + math.log(x) + total
    total = 1.0
    term = 1.0
    for k in range(1, _MAX_TERMS):
        nxt = term * k / x
        if nxt > term or nxt < 1e-17:
            break
        term = nxt
        total += term
    return math.exp(x) / x * total


def upper_incomplete_gamma_int(a, b):
    """Upper incomplete gamma Gamma(a, b) for integer a >= 1 and b >= 0."""
    a = _check_int("a", a, 1)
    if b < 0:
        raise InvalidArgumentError(f"b must be >= 0, got {b}")
    term = 1.0
    total = 1.0
    for p in range(1, a):
        term *= b / p
        total += term
    return math.factorial(a - 1) * math.exp(-b) * total


def lower_incomplete_gamma_int(a, b):
    """Lower incomplete gamma gamma(a, b) = (a-1)! (1 - e^{-b} sum_{p<a} b^p/p!).

    For b < a the same quantity is summed as the tail ``e^{-b} sum_{p>=a}
    b^p/p!`` so small arguments keep full relative precision.
    """
    a = _check_int("a", a, 1)
    if b < 0:
        raise InvalidArgumentError(f"b must be >= 0, got {b}")
    if b == 0:
        return 0.0
    if b >= a:
        return math.factorial(a - 1) - upper_incomplete_gamma_int(a, b)
    term = math.exp(-b)
    for p in range(1, a + 1):
        term *= b / p
    total = 0.0
    p = a
    while term > 1e-17 * total:
        total += term
        p += 1
        term *= b / p
        if p > a + _MAX_TERMS:
            raise ConvergenceError(f"incomplete gamma tail did not converge at a={a}, b={b}")
    return math.factorial(a - 1) * total


def laguerre(n, x):
    """Laguerre polynomial L_n(x) by its finite sum.

    The terms alternate in sign for x > 0 and cancel heavily, so the sum is
    formed in exact rational arithmetic and rounded once.
    """
    n = _check_int("n", n, 0)
    fx = Fraction(x)
    return float(sum(Fraction(math.comb(n, k), math.factorial(k)) * (-fx) ** k for k in range(n + 1)))


def kummer_1f1(a, z, b=1):
    """Kummer confluent hypergeometric 1F1(a; b; z) by its power series.

    Raises:
        ConvergenceError: when 10^4 terms do not reach 1e-14 relative change.
    """
    a = _check_int("a", a, 1)
    if b <= 0:
        raise InvalidArgumentError(f"b must be positive, got {b}")
    total = 1.0
    term = 1.0
    for k in range(_MAX_TERMS):
        term *= (a + k) / (b + k) * z / (k + 1)
        total += term
        if abs(term) <= 1e-14 * abs(total) and k > abs(z):
            return total
    raise ConvergenceError(f"1F1({a};{b};{z}) series did not converge in {_MAX_TERMS} terms")


@lru_cache(maxsize=8192)
def _tricomi_integral(a, x):
    # int_0^inf e^{-s} s^{a-1} / (x + s) ds in log coordinates s = e^y,
    # which flattens the 1/(x+s) peak near s = x for small x.
    def integrand(y):
        s = math.exp(y)
        return math.exp(-s + a * y) / (x + s)

    y_lo = min(math.log(x), 0.0) - 45.0
    y_hi = math.log(a + 60.0 + 15.0 * math.sqrt(a))
    points = [math.log(x)] if y_lo < math.log(x) < y_hi else None
    value, _err = quad(integrand, y_lo, y_hi, points=points, epsabs=0.0, epsrel=1e-13, limit=400)
    return value


def tricomi_u_equal(a, x):
    """Tricomi confluent hypergeometric Psi(a, a; x) for integer a >= 1, x > 0.

    Evaluated from ``Psi(a, b; x) = 1/Gamma(a) int_0^inf e^{-xt} t^{a-1}
    (1+t)^{b-a-1} dt`` at b = a by adaptive quadrature. Results are memoized
    per (a, x).
    """
    a = _check_int("a", a, 1)
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"Psi(a, a; x) requires x > 0, got {x}")
    integral = _tricomi_integral(a, x)
    return math.exp((1 - a) * math.log(x) - math.lgamma(a)) * integral

"""Elementary two-parameter laws used as mixture components.

Every law is a frozen :class:`BaseDistribution` value carrying a ``kind`` and
two real parameters ``p1``/``p2``. Their meaning depends on the kind:

=============  ==============  ===============  ==========================
kind           p1              p2               support
=============  ==============  ===============  ==========================
Exponential    rate            (unused, 0)      [0, inf)
Weibull        shape           scale            [0, inf)
Frechet        shape           scale            (0, inf)
Pareto         scale (min)     shape            [scale, inf)
Power          domain k        shape            (0, 1/k]
GumbelMin      location        scale            R
ExtremeValue   location        scale            R
=============  ==============  ===============  ==========================

The cumulative distribution functions are

* Weibull: ``1 - exp(-(t/scale)**shape)``
* Frechet: ``exp(-(t/scale)**-shape)``
* Pareto: ``1 - (scale/t)**shape``
* Power: ``(k t)**shape``
* GumbelMin: ``1 - exp(-exp((t - loc)/scale))``
* ExtremeValue: ``exp(-exp(-(t - loc)/scale))``

All evaluation methods accept scalars or numpy arrays and return the same
shape (a python float for scalar input).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import polygamma

from .errors import DomainError, MomentDoesNotExist, PositivityError

__all__ = ["Kind", "Interval", "BaseDistribution"]


class Kind(str, Enum):
    EXPONENTIAL = "Exponential"
    WEIBULL = "Weibull"
    FRECHET = "Frechet"
    PARETO = "Pareto"
    POWER = "Power"
    GUMBEL_MIN = "GumbelMin"
    EXTREME_VALUE = "ExtremeValue"


@dataclass(frozen=True)
class Interval:
    """Real interval, possibly unbounded, with explicit endpoint closure."""

    lo: float
    hi: float
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        if not (self.lo < self.hi or (self.lo == self.hi and self.lo_closed and self.hi_closed)):
            raise DomainError(f"empty interval ({self.lo}, {self.hi})")

    def contains(self, t: float) -> bool:
        above = t >= self.lo if self.lo_closed else t > self.lo
        below = t <= self.hi if self.hi_closed else t < self.hi
        return bool(above and below)

    def intersect(self, other: Interval) -> Interval:
        if self.lo > other.lo:
            lo, lo_closed = self.lo, self.lo_closed
        elif other.lo > self.lo:
            lo, lo_closed = other.lo, other.lo_closed
        else:
            lo, lo_closed = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hi_closed = self.hi, self.hi_closed
        elif other.hi < self.hi:
            hi, hi_closed = other.hi, other.hi_closed
        else:
            hi, hi_closed = self.hi, self.hi_closed and other.hi_closed
        return Interval(lo, hi, lo_closed, hi_closed)

    def __str__(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


_INF = math.inf
_ALL_REALS = Interval(-_INF, _INF)
_NONPOSITIVE = Interval(-_INF, 0.0, hi_closed=True)


def _as_array(t):
    arr = np.asarray(t, dtype=float)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    return float(arr) if scalar else arr


@dataclass(frozen=True)
class BaseDistribution:
    kind: Kind
    p1: float
    p2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "p1", float(self.p1))
        object.__setattr__(self, "p2", float(self.p2))
        k, p1, p2 = self.kind, self.p1, self.p2
        if not (math.isfinite(p1) and math.isfinite(p2)):
            raise DomainError(f"{k.value}: parameters must be finite, got ({p1}, {p2})")
        if k is Kind.EXPONENTIAL:
            if p1 <= 0:
                raise PositivityError(f"Exponential rate must be > 0, got {p1}")
        elif k in (Kind.GUMBEL_MIN, Kind.EXTREME_VALUE):
            if p2 <= 0:
                raise PositivityError(f"{k.value} scale must be > 0, got {p2}")
        elif p1 <= 0 or p2 <= 0:
            raise PositivityError(f"{k.value} parameters must be > 0, got ({p1}, {p2})")

    # convenience constructors, named by parameter role
    @classmethod
    def exponential(cls, rate):
        return cls(Kind.EXPONENTIAL, rate)

    @classmethod
    def weibull(cls, shape, scale):
        return cls(Kind.WEIBULL, shape, scale)

    @classmethod
    def frechet(cls, shape, scale):
        return cls(Kind.FRECHET, shape, scale)

    @classmethod
    def pareto(cls, scale, shape):
        return cls(Kind.PARETO, scale, shape)

    @classmethod
    def power(cls, domain, shape):
        return cls(Kind.POWER, domain, shape)

    @classmethod
    def gumbel_min(cls, loc, scale):
        return cls(Kind.GUMBEL_MIN, loc, scale)

    @classmethod
    def extreme_value(cls, loc, scale):
        return cls(Kind.EXTREME_VALUE, loc, scale)

    def __str__(self):
        if self.kind is Kind.EXPONENTIAL:
            return f"Exponential({self.p1:g})"
        return f"{self.kind.value}({self.p1:g}, {self.p2:g})"

    @property
    def support(self) -> Interval:
        k = self.kind
        if k in (Kind.EXPONENTIAL, Kind.WEIBULL):
            return Interval(0.0, _INF, lo_closed=True)
        if k is Kind.FRECHET:
            return Interval(0.0, _INF)
        if k is Kind.PARETO:
            return Interval(self.p1, _INF, lo_closed=True)
        if k is Kind.POWER:
            return Interval(0.0, 1.0 / self.p1, hi_closed=True)
        return _ALL_REALS

    def pdf(self, t):
        t, scalar = _as_array(t)
        k, a, b = self.kind, self.p1, self.p2
        out = np.zeros_like(t)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
            if k is Kind.EXPONENTIAL:
                m = t >= 0
                out[m] = a * np.exp(-a * t[m])
            elif k is Kind.WEIBULL:
                m = t >= 0
                z = t[m] / b
                out[m] = (a / b) * z ** (a - 1.0) * np.exp(-(z**a))
            elif k is Kind.FRECHET:
                m = t > 0
                z = t[m] / b
                out[m] = (a / b) * z ** (-1.0 - a) * np.exp(-(z**-a))
            elif k is Kind.PARETO:
                m = t >= a
                out[m] = b * np.exp(b * np.log(a / t[m])) / t[m]
            elif k is Kind.POWER:
                m = (t > 0) & (t <= 1.0 / a)
                out[m] = b * a * (a * t[m]) ** (b - 1.0)
            elif k is Kind.GUMBEL_MIN:
                z = (t - a) / b
                out = np.exp(z - np.exp(z)) / b
            else:
                z = -(t - a) / b
                out = np.exp(z - np.exp(z)) / b
        out = np.where(np.isnan(out), 0.0, out)
        return _out(out, scalar)

    def cdf(self, t):
        t, scalar = _as_array(t)
        k, a, b = self.kind, self.p1, self.p2
        out = np.zeros_like(t)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
            if k is Kind.EXPONENTIAL:
                m = t > 0
                out[m] = -np.expm1(-a * t[m])
            elif k is Kind.WEIBULL:
                m = t > 0
                out[m] = -np.expm1(-((t[m] / b) ** a))
            elif k is Kind.FRECHET:
                m = t > 0
                out[m] = np.exp(-((t[m] / b) ** -a))
            elif k is Kind.PARETO:
                m = t > a
                out[m] = -np.expm1(b * np.log(a / t[m]))
            elif k is Kind.POWER:
                m = t > 0
                out[m] = np.minimum((a * t[m]) ** b, 1.0)
            elif k is Kind.GUMBEL_MIN:
                out = -np.expm1(-np.exp((t - a) / b))
            else:
                out = np.exp(-np.exp(-(t - a) / b))
        return _out(out, scalar)

    def sf(self, t):
        """Reliability (survival) function ``P(X > t)``."""
        t, scalar = _as_array(t)
        k, a, b = self.kind, self.p1, self.p2
        out = np.ones_like(t)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
            if k is Kind.EXPONENTIAL:
                m = t > 0
                out[m] = np.exp(-a * t[m])
            elif k is Kind.WEIBULL:
                m = t > 0
                out[m] = np.exp(-((t[m] / b) ** a))
            elif k is Kind.FRECHET:
                m = t > 0
                out[m] = -np.expm1(-((t[m] / b) ** -a))
            elif k is Kind.PARETO:
                m = t > a
                out[m] = np.exp(b * np.log(a / t[m]))
            elif k is Kind.POWER:
                m = t > 0
                out[m] = np.maximum(-np.expm1(b * np.log(a * t[m])), 0.0)
            elif k is Kind.GUMBEL_MIN:
                out = np.exp(-np.exp((t - a) / b))
            else:
                out = -np.expm1(-np.exp(-(t - a) / b))
        return _out(out, scalar)

    def quantile(self, u):
        u, scalar = _as_array(u)
        if np.any(~((u > 0) & (u < 1))):
            raise DomainError("quantile level must lie strictly inside (0, 1)")
        return _out(self._quantile(u), scalar)

    def _quantile(self, u):
        # no domain check; u == 0 maps to the lower support end
        k, a, b = self.kind, self.p1, self.p2
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            if k is Kind.EXPONENTIAL:
                return -np.log1p(-u) / a
            if k is Kind.WEIBULL:
                return b * (-np.log1p(-u)) ** (1.0 / a)
            if k is Kind.FRECHET:
                return b * (-np.log(u)) ** (-1.0 / a)
            if k is Kind.PARETO:
                return a * np.exp(-np.log1p(-u) / b)
            if k is Kind.POWER:
                return np.exp(np.log(u) / b) / a
            if k is Kind.GUMBEL_MIN:
                return a + b * np.log(-np.log1p(-u))
            return a - b * np.log(-np.log(u))

    def sample(self, rng, size=None):
        """Inverse-transform draw(s) using ``rng.random``."""
        u = rng.random(size)
        out = self._quantile(np.asarray(u, dtype=float))
        return float(out) if size is None else out

    @property
    def max_moment_order(self) -> float:
        """Largest integer order with a finite raw moment (``inf`` if all exist)."""
        if self.kind is Kind.FRECHET:
            return math.ceil(self.p1) - 1
        if self.kind is Kind.PARETO:
            return math.ceil(self.p2) - 1
        return _INF

    def moment(self, n: int) -> float:
        """Raw moment ``E[X**n]``."""
        if n < 1 or int(n) != n:
            raise DomainError(f"moment order must be a positive integer, got {n}")
        n = int(n)
        if n > self.max_moment_order:
            raise MomentDoesNotExist(
                f"{self}: moment of order {n} is infinite "
                f"(largest finite order is {self.max_moment_order})",
                component=self,
                max_order=self.max_moment_order,
            )
        k, a, b = self.kind, self.p1, self.p2
        if k is Kind.EXPONENTIAL:
            return math.factorial(n) / a**n
        if k is Kind.WEIBULL:
            return b**n * math.gamma(1.0 + n / a)
        if k is Kind.FRECHET:
            return b**n * math.gamma(1.0 - n / a)
        if k is Kind.PARETO:
            return a**n * b / (b - n)
        if k is Kind.POWER:
            return a**-n * b / (b + n)
        return _gumbel_moment(a, b, n, maximum=k is Kind.EXTREME_VALUE)

    @property
    def mgf_domain(self) -> Interval:
        """Maximal set of ``t`` where ``E[exp(tX)]`` is finite."""
        k, a, b = self.kind, self.p1, self.p2
        if k is Kind.EXPONENTIAL:
            return Interval(-_INF, a)
        if k is Kind.WEIBULL:
            if a > 1:
                return _ALL_REALS
            if a == 1:
                return Interval(-_INF, 1.0 / b)
            return _NONPOSITIVE
        if k in (Kind.FRECHET, Kind.PARETO):
            return _NONPOSITIVE
        if k is Kind.POWER:
            return _ALL_REALS
        if k is Kind.GUMBEL_MIN:
            return Interval(-1.0 / b, _INF)
        return Interval(-_INF, 1.0 / b)

    def mgf_closed_form(self, t: float) -> float | None:
        """Textbook MGF where one exists in elementary/gamma terms, else None."""
        k, a, b = self.kind, self.p1, self.p2
        if not self.mgf_domain.contains(t):
            raise DomainError(f"{self}: MGF diverges at t={t}")
        if k is Kind.EXPONENTIAL:
            return a / (a - t)
        if k is Kind.GUMBEL_MIN:
            return math.exp(a * t) * float(gamma_fn(1.0 + b * t))
        if k is Kind.EXTREME_VALUE:
            return math.exp(a * t) * float(gamma_fn(1.0 - b * t))
        return None


def _gumbel_moment(loc, scale, n, maximum):
    # X = loc + scale*log(E) (min) or loc - scale*log(E) (max), E ~ Exp(1);
    # cumulants of log(E) are polygamma(m-1, 1).
    sign = -1.0 if maximum else 1.0
    kappa = [0.0]
    for m in range(1, n + 1):
        c = (sign * scale) ** m * float(polygamma(m - 1, 1.0))
        if m == 1:
            c += loc
        kappa.append(c)
    raw = [1.0]
    for j in range(1, n + 1):
        raw.append(math.fsum(math.comb(j - 1, m - 1) * kappa[m] * raw[j - m] for m in range(1, j + 1)))
    return raw[n]

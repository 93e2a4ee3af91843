"""Mixed hypoexponential-G families.

A hypoexponential variable ``S = X_1 + ... + X_n`` with ``X_i ~ Exp(a_i)``
(distinct rates) has the signed-mixture density ``sum_i f_{X_i}(t) / P_i``
with ``P_i = prod_{j != i} (1 - a_i / a_j)``. Pushing ``S`` through one
monotone map ``g`` turns every exponential component into a component of
another law while keeping the same weights:

======  ===================  ===========================  ====================
family  g(s)                 component                    rate a_i
======  ===================  ===========================  ====================
MHW     s**(1/k)             Weibull(shape k, scale l_i)  l_i**-k
MHF     s**(-1/k)            Frechet(shape k, scale l_i)  l_i**k
MHT     k*exp(s)             Pareto(scale k, shape l_i)   l_i
MHP     exp(-s)/k            Power(domain k, shape l_i)   l_i
MHG     l*log(s)             GumbelMin(k_i, l)            exp(-k_i/l)
MHE     -l*log(s)            ExtremeValue(k_i, l)         exp(k_i/l)
======  ===================  ===========================  ====================

The shared scalar is ``k`` for the first four families and the scale ``l``
for the last two; the per-component vector holds ``l_i`` or ``k_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import mpmath
import numpy as np

from .base import BaseDistribution, Kind
from .errors import DomainError, PositivityError, SeparationError
from .mixture import SignedMixture

__all__ = [
    "Family",
    "FamilySpec",
    "HypoexpSpec",
    "hypoexp_weights",
    "family_weights",
    "make_family",
    "to_base_rates",
    "from_rates",
    "transform_forward",
    "sample_family",
    "example_spec",
    "SEP_MIN",
]

SEP_MIN = 1e-6
_WEIGHT_DPS = 40
_REFINE_ABOVE = 1e3


class Family(str, Enum):
    MHW = "MHW"
    MHF = "MHF"
    MHT = "MHT"
    MHP = "MHP"
    MHG = "MHG"
    MHE = "MHE"

    @property
    def kind(self) -> Kind:
        return _KIND[self]

    @property
    def location_vector(self) -> bool:
        """True when the vector entries are real locations (MHG/MHE)."""
        return self in (Family.MHG, Family.MHE)


_KIND = {
    Family.MHW: Kind.WEIBULL,
    Family.MHF: Kind.FRECHET,
    Family.MHT: Kind.PARETO,
    Family.MHP: Kind.POWER,
    Family.MHG: Kind.GUMBEL_MIN,
    Family.MHE: Kind.EXTREME_VALUE,
}


def relative_separation(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1.0)


def _check_separated(values, sep_min, what):
    vals = sorted(values)
    for a, b in zip(vals[:-1], vals[1:]):
        if relative_separation(a, b) < sep_min:
            raise SeparationError(
                f"{what} {a!r} and {b!r} violate the separation minimum {sep_min:g}; "
                "the weights 1/P_i would be numerically meaningless"
            )


@dataclass(frozen=True)
class HypoexpSpec:
    """Distinct exponential rates of a hypoexponential sum."""

    rates: tuple[float, ...]
    sep_min: float = field(default=SEP_MIN, compare=False)

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        object.__setattr__(self, "rates", rates)
        if not rates:
            raise DomainError("at least one rate is required")
        if any(not (r > 0 and math.isfinite(r)) for r in rates):
            raise PositivityError(f"rates must be positive and finite: {rates}")
        _check_separated(rates, self.sep_min, "rates")


def _products(terms):
    """``1 / prod_{j != i} terms[i, j]`` in double precision."""
    n = terms.shape[0]
    out = []
    for i in range(n):
        p = 1.0
        for j in range(n):
            if j != i:
                p *= terms[i, j]
        out.append(float(1.0 / p))
    return tuple(out)


def _weights(values, terms, term_mp):
    """Weights from the double-precision factor matrix ``terms``.

    Large weights are recomputed from ``term_mp`` at 40 significant digits
    and rounded once: per-factor rounding compounds to ~n ulps per weight,
    which becomes a visible closure error once ``|w_i|`` is in the thousands.
    """
    with np.errstate(divide="ignore", over="ignore"):
        w = _products(terms)
    if max(abs(x) for x in w) < _REFINE_ABOVE:
        return w
    with mpmath.workdps(_WEIGHT_DPS):
        v = [mpmath.mpf(x) for x in values]
        out = []
        for i, vi in enumerate(v):
            p = mpmath.mpf(1)
            for j, vj in enumerate(v):
                if j != i:
                    p *= term_mp(vi, vj)
            out.append(float(1 / p) if p != 0 else math.inf)
    return tuple(out)


def hypoexp_weights(h: HypoexpSpec) -> tuple[float, ...]:
    """Weights ``1/P_i`` with ``P_i = prod_{j != i} (1 - a_i/a_j)``."""
    a = np.asarray(h.rates)
    # (a_j - a_i)/a_j keeps the small difference exact
    terms = (a[None, :] - a[:, None]) / a[None, :]
    return _weights(h.rates, terms, lambda ai, aj: 1 - ai / aj)


def _log_ratio(x, y):
    """``log(x/y)`` for positive x, y, accurate when x is close to y."""
    return np.log1p((x - y) / y)


@dataclass(frozen=True)
class FamilySpec:
    """A member of one of the six families; ``vector`` is kept sorted."""

    family: Family
    shared: float
    vector: tuple[float, ...]
    sep_min: float = field(default=SEP_MIN, compare=False)

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "shared", float(self.shared))
        vec = tuple(sorted(float(v) for v in self.vector))
        object.__setattr__(self, "vector", vec)
        if not vec:
            raise DomainError("the parameter vector must have at least one entry")
        if not all(math.isfinite(v) for v in vec) or not math.isfinite(self.shared):
            raise DomainError(f"non-finite parameter in {fam.value}({self.shared}, {vec})")
        if self.shared <= 0:
            raise PositivityError(f"{fam.value}: shared parameter must be > 0, got {self.shared}")
        if not fam.location_vector and vec[0] <= 0:
            raise PositivityError(f"{fam.value}: vector entries must be > 0, got {vec}")
        _check_separated(vec, self.sep_min, f"{fam.value} vector entries")

    @property
    def n(self) -> int:
        return len(self.vector)

    @property
    def params(self) -> tuple[float, ...]:
        """Flat parameter vector: shared scalar followed by sorted entries."""
        return (self.shared,) + self.vector

    def to_dict(self) -> dict:
        return {"family": self.family.value, "shared": self.shared, "vector": list(self.vector)}

    @classmethod
    def from_dict(cls, d, sep_min=SEP_MIN):
        return cls(d["family"], d["shared"], tuple(d["vector"]), sep_min=sep_min)

    def __str__(self):
        vec = ", ".join(f"{v:g}" for v in self.vector)
        return f"{self.family.value}({self.shared:g}; {vec})"


def family_weights(spec: FamilySpec) -> tuple[float, ...]:
    """The weights ``1/PW_i``, ``1/PF_i``, ... of the family's signed mixture."""
    fam, s = spec.family, spec.shared
    v = np.asarray(spec.vector)
    vi, vj = v[:, None], v[None, :]
    with mpmath.workdps(_WEIGHT_DPS):
        k = mpmath.mpf(s)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if fam is Family.MHW:
            terms = -np.expm1(s * _log_ratio(vj, vi))
            term = lambda a, b: 1 - (b / a) ** k  # noqa: E731
        elif fam is Family.MHF:
            terms = -np.expm1(s * _log_ratio(vi, vj))
            term = lambda a, b: 1 - (a / b) ** k  # noqa: E731
        elif fam in (Family.MHT, Family.MHP):
            terms = (vj - vi) / vj
            term = lambda a, b: 1 - a / b  # noqa: E731
        elif fam is Family.MHG:
            terms = -np.expm1((vj - vi) / s)
            term = lambda a, b: -mpmath.expm1((b - a) / k)  # noqa: E731
        else:
            terms = -np.expm1((vi - vj) / s)
            term = lambda a, b: -mpmath.expm1((a - b) / k)  # noqa: E731
    return _weights(spec.vector, terms, term)


def _component(spec: FamilySpec, v: float) -> BaseDistribution:
    fam, s = spec.family, spec.shared
    if fam is Family.MHW:
        return BaseDistribution.weibull(shape=s, scale=v)
    if fam is Family.MHF:
        return BaseDistribution.frechet(shape=s, scale=v)
    if fam is Family.MHT:
        return BaseDistribution.pareto(scale=s, shape=v)
    if fam is Family.MHP:
        return BaseDistribution.power(domain=s, shape=v)
    if fam is Family.MHG:
        return BaseDistribution.gumbel_min(loc=v, scale=s)
    return BaseDistribution.extreme_value(loc=v, scale=s)


def make_family(spec: FamilySpec) -> SignedMixture:
    """Build the signed mixture of ``spec``'s components and weights."""
    comps = tuple(_component(spec, v) for v in spec.vector)
    return SignedMixture(comps, family_weights(spec))


def to_base_rates(spec: FamilySpec) -> HypoexpSpec:
    """Exponential rates whose sum, pushed through ``g``, yields ``spec``."""
    fam, s = spec.family, spec.shared
    v = np.asarray(spec.vector)
    if fam is Family.MHW:
        rates = v**-s
    elif fam is Family.MHF:
        rates = v**s
    elif fam in (Family.MHT, Family.MHP):
        rates = v
    elif fam is Family.MHG:
        rates = np.exp(-v / s)
    else:
        rates = np.exp(v / s)
    return HypoexpSpec(tuple(float(r) for r in rates), sep_min=spec.sep_min)


def from_rates(family, shared: float, rates, sep_min: float = SEP_MIN) -> FamilySpec:
    """Inverse of :func:`to_base_rates` for a fixed shared parameter."""
    fam = Family(family)
    a = np.asarray(rates, dtype=float)
    if np.any(a <= 0):
        raise PositivityError(f"rates must be positive: {tuple(a)}")
    if fam is Family.MHW:
        v = a ** (-1.0 / shared)
    elif fam is Family.MHF:
        v = a ** (1.0 / shared)
    elif fam in (Family.MHT, Family.MHP):
        v = a
    elif fam is Family.MHG:
        v = -shared * np.log(a)
    else:
        v = shared * np.log(a)
    return FamilySpec(fam, shared, tuple(float(x) for x in v), sep_min=sep_min)


def transform_forward(spec: FamilySpec, s):
    """Apply the family's monotone map ``g`` to hypoexponential value(s) ``s``."""
    arr = np.asarray(s, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("the transform is defined for s > 0 only")
    fam, k = spec.family, spec.shared
    if fam is Family.MHW:
        out = arr ** (1.0 / k)
    elif fam is Family.MHF:
        out = arr ** (-1.0 / k)
    elif fam is Family.MHT:
        out = k * np.exp(arr)
    elif fam is Family.MHP:
        out = np.exp(-arr) / k
    elif fam is Family.MHG:
        out = k * np.log(arr)
    else:
        out = -k * np.log(arr)
    return float(out) if out.ndim == 0 else out


def sample_family(spec: FamilySpec, count: int, rng) -> np.ndarray:
    """``count`` iid draws of ``g(Exp(a_1) + ... + Exp(a_n))``.

    ``rng`` is a :class:`numpy.random.Generator`; the draws depend only on its
    state. Negative weights rule out component selection, so the sum is
    simulated directly.
    """
    if count < 1:
        raise DomainError("count must be at least 1")
    rates = to_base_rates(spec).rates
    s = np.zeros(count)
    for r in rates:
        s += rng.exponential(1.0 / r, count)
    # an exponential draw of exactly 0 has probability ~2**-53 per variate
    s = np.maximum(s, np.finfo(float).tiny)
    return transform_forward(spec, s)


_EXAMPLES = {
    Family.MHW: (2.0, (1.0, 1.5, 2.0, 2.5)),
    Family.MHF: (3.0, (1.0, 1.5, 2.0, 2.5)),
    Family.MHT: (1.0, (2.0, 3.0, 4.0, 5.0)),
    Family.MHP: (1.0, (1.0, 2.0, 3.0, 4.0)),
    Family.MHG: (1.0, (0.0, 0.5, 1.0, 1.5)),
    Family.MHE: (1.0, (0.0, 0.5, 1.0, 1.5)),
}


def example_spec(family, n: int = 3) -> FamilySpec:
    """A well-conditioned member of ``family`` with ``n`` (<= 4) components."""
    fam = Family(family)
    shared, vec = _EXAMPLES[fam]
    if not 1 <= n <= len(vec):
        raise DomainError(f"example specs exist for 1..{len(vec)} components")
    return FamilySpec(fam, shared, vec[:n])

"""Signed linear combinations of densities.

A :class:`SignedMixture` has density ``sum_i A_i f_i(t)`` where the real
weights ``A_i`` add up to one but may be negative. CDF, reliability, MGF and
raw moments are the same linear combination of the component quantities;
the hazard is ``pdf / reliability``.

Negative weights make the naive sum cancel badly, so every combination is
evaluated with Neumaier compensation after ordering the terms by decreasing
magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy import integrate, optimize

from .base import BaseDistribution, Interval
from .errors import ConstructionError, DomainError, MomentDoesNotExist
from .quadrature import quad_integral

__all__ = [
    "SignedMixture",
    "CheckOutcome",
    "ValidationReport",
    "validate_mixture",
    "compensated_sum",
]

WEIGHT_SUM_RTOL = 1e-12
CLAMP_WIDTH = 1e-9
HAZARD_FLOOR = 1e-300
MGF_RTOL = 1e-9


def compensated_sum(terms):
    """Sum the rows of ``terms`` (shape ``(n, ...)``) column-wise.

    Terms are visited in order of decreasing absolute value; Neumaier's
    correction is carried alongside the running sum.
    """
    terms = np.asarray(terms, dtype=float)
    n = terms.shape[0]
    if n == 1:
        return terms[0].copy()
    if n == 2:
        # a single rounded addition is already correctly rounded
        return terms[0] + terms[1]
    order = np.argsort(-np.abs(terms), axis=0, kind="stable")
    terms = np.take_along_axis(terms, order, axis=0)
    s = terms[0].copy()
    c = np.zeros_like(s)
    for x in terms[1:]:
        t = s + x
        big = np.abs(s) >= np.abs(x)
        c += np.where(big, (s - t) + x, (x - t) + s)
        s = t
    return s + c


def _weighted(weights, values):
    return compensated_sum(np.asarray(weights)[(slice(None),) + (None,) * (values.ndim - 1)] * values)


@dataclass(frozen=True)
class SignedMixture:
    """Density ``sum_i weights[i] * components[i].pdf``.

    With ``strict=True`` (the default) the weights must add up to one within
    ``1e-12`` of ``sum |A_i|``. Pass ``strict=False`` to build a candidate
    that :func:`validate_mixture` can then diagnose.
    """

    components: tuple[BaseDistribution, ...]
    weights: tuple[float, ...]
    strict: bool = field(default=True, compare=False)

    def __post_init__(self):
        comps = tuple(self.components)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "weights", weights)
        if len(comps) < 1:
            raise ConstructionError("a mixture needs at least one component")
        if len(comps) != len(weights):
            raise ConstructionError(f"{len(comps)} components but {len(weights)} weights")
        if not all(math.isfinite(w) for w in weights):
            raise ConstructionError(f"non-finite weight in {weights}")
        first = comps[0].support
        for c in comps[1:]:
            s = c.support
            if not (math.isclose(s.lo, first.lo, rel_tol=1e-12, abs_tol=0.0)
                    and math.isclose(s.hi, first.hi, rel_tol=1e-12, abs_tol=0.0)):
                raise ConstructionError(f"components do not share a support: {first} vs {s}")
        if self.strict and self.weight_sum_error > WEIGHT_SUM_RTOL * self.weight_scale:
            raise ConstructionError(
                f"weights sum to {math.fsum(weights)!r}, not 1 (tolerance {WEIGHT_SUM_RTOL:g} relative)"
            )

    @classmethod
    def single(cls, component):
        return cls((component,), (1.0,))

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def weight_scale(self) -> float:
        return max(1.0, math.fsum(abs(w) for w in self.weights))

    @property
    def weight_sum_error(self) -> float:
        return abs(math.fsum(self.weights) - 1.0)

    @property
    def support(self) -> Interval:
        return self.components[0].support

    def _stack(self, method, t):
        t = np.asarray(t, dtype=float)
        return np.stack([getattr(c, method)(t) for c in self.components]), t.ndim == 0

    def _combine(self, method, t):
        values, scalar = self._stack(method, t)
        out = _weighted(self.weights, values)
        return out, scalar

    def pdf(self, t):
        out, scalar = self._combine("pdf", t)
        return float(out) if scalar else out

    def _clamped(self, method, t):
        out, scalar = self._combine(method, t)
        lo_bad = out < -CLAMP_WIDTH
        hi_bad = out > 1.0 + CLAMP_WIDTH
        if np.any(lo_bad | hi_bad):
            worst = out[lo_bad | hi_bad].flat[0]
            raise ConstructionError(
                f"mixture {method} evaluates to {worst!r}, outside [0, 1] beyond round-off; "
                "the weights do not define a distribution"
            )
        out = np.clip(out, 0.0, 1.0)
        return float(out) if scalar else out

    def cdf(self, t):
        return self._clamped("cdf", t)

    def sf(self, t):
        """Reliability function ``sum_i A_i R_i(t)``."""
        return self._clamped("sf", t)

    reliability = sf

    def hazard(self, t):
        """Hazard rate ``pdf(t) / sf(t)``; undefined where reliability vanishes."""
        r = np.asarray(self.sf(t), dtype=float)
        if np.any(r <= HAZARD_FLOOR):
            raise DomainError("hazard undefined: reliability is zero (or below 1e-300)")
        out = np.asarray(self.pdf(t)) / r
        return float(out) if out.ndim == 0 else out

    @property
    def mgf_domain(self) -> Interval:
        dom = self.components[0].mgf_domain
        for c in self.components[1:]:
            dom = dom.intersect(c.mgf_domain)
        return dom

    def mgf(self, t: float) -> float:
        """``E[exp(tX)]``, each component integrated numerically."""
        t = float(t)
        for c in self.components:
            if not c.mgf_domain.contains(t):
                raise DomainError(f"MGF of {c} diverges at t={t} (finite on {c.mgf_domain})")
        vals = np.array([component_mgf(c, t) for c in self.components])
        return float(_weighted(self.weights, vals))

    @property
    def max_moment_order(self) -> float:
        return min(c.max_moment_order for c in self.components)

    def moment(self, k: int) -> float:
        """Raw moment ``sum_i A_i E[X_i**k]``."""
        for c in self.components:
            if k > c.max_moment_order:
                raise MomentDoesNotExist(
                    f"moment of order {k} is infinite for component {c}; "
                    f"largest finite order is {c.max_moment_order}",
                    component=c,
                    max_order=c.max_moment_order,
                )
        vals = np.array([c.moment(k) for c in self.components])
        return float(_weighted(self.weights, vals))

    def quantile(self, u):
        """Inverse CDF by bracketed root finding (vectorised over ``u``)."""
        u_arr = np.asarray(u, dtype=float)
        if np.any(~((u_arr > 0) & (u_arr < 1))):
            raise DomainError("quantile level must lie strictly inside (0, 1)")
        out = np.array([self._quantile_one(float(x)) for x in u_arr.ravel()]).reshape(u_arr.shape)
        return float(out) if out.ndim == 0 else out

    def _quantile_one(self, u):
        qs = [c.quantile(u) for c in self.components]
        lo, hi = min(qs), max(qs)
        sup = self.support
        width = max(hi - lo, 1e-3 * max(abs(lo), abs(hi), 1.0))
        lo, hi = lo - width, hi + width
        if math.isfinite(sup.lo):
            lo = max(lo, sup.lo)
        if math.isfinite(sup.hi):
            hi = min(hi, sup.hi)
        g = lambda x: self.cdf(x) - u  # noqa: E731
        for _ in range(200):
            if g(lo) <= 0:
                break
            lo = sup.lo if math.isfinite(sup.lo) and lo - width <= sup.lo else lo - width
            width *= 2
        for _ in range(200):
            if g(hi) >= 0:
                break
            hi = sup.hi if math.isfinite(sup.hi) and hi + width >= sup.hi else hi + width
            width *= 2
        return optimize.brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def component_mgf(c: BaseDistribution, t: float) -> float:
    """MGF of one component by adaptive quadrature of ``exp(t x) f(x)``."""
    sup = c.support

    def integrand(x):
        f = c.pdf(x)
        return math.exp(t * x) * f if f > 0 else 0.0

    pieces = _split_points(c, sup)
    total = 0.0
    for a, b in zip(pieces[:-1], pieces[1:]):
        val, _ = integrate.quad(integrand, a, b, epsabs=0.0, epsrel=MGF_RTOL * 1e-3, limit=400)
        total += val
    return total


def _split_points(c, sup):
    # break the range at a few interior quantiles so QUADPACK sees the bulk
    inner = [float(c.quantile(u)) for u in (0.01, 0.5, 0.99)]
    pts = [sup.lo] + [x for x in inner if sup.lo < x < sup.hi] + [sup.hi]
    return sorted(set(pts))


@dataclass
class CheckOutcome:
    name: str
    passed: bool
    worst_value: float
    worst_at: float | None
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list[CheckOutcome]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name) -> CheckOutcome:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _validation_grid(m: SignedMixture, grid_size: int, n_crossover: int = 64):
    levels = (np.arange(grid_size) + 0.5) / grid_size
    pts = np.concatenate([c.quantile(levels) for c in m.components])
    pts = np.unique(pts[np.isfinite(pts)])
    if m.n > 1 and pts.size > 1:
        # refine cells where two weighted components swap dominance
        terms = np.abs(np.asarray(m.weights)[:, None] * np.stack([c.pdf(pts) for c in m.components]))
        cells = []
        for i, j in combinations(range(m.n), 2):
            d = np.sign(terms[i] - terms[j])
            idx = np.nonzero(d[:-1] * d[1:] < 0)[0]
            cells.extend(idx.tolist())
        if cells:
            cells = np.unique(cells)
            per_cell = max(1, n_crossover // cells.size)
            extra = [np.linspace(pts[c], pts[c + 1], per_cell + 2)[1:-1] for c in cells]
            extra = np.concatenate(extra)[:n_crossover]
            pts = np.union1d(pts, extra)
    return pts


def validate_mixture(m: SignedMixture, grid_size: int = 512) -> ValidationReport:
    """Check weight closure, pdf nonnegativity on a grid, and normalisation."""
    if grid_size < 16:
        raise DomainError("grid_size must be at least 16")
    checks = []

    err = m.weight_sum_error
    checks.append(CheckOutcome(
        "weight_sum",
        err <= WEIGHT_SUM_RTOL * m.weight_scale,
        math.fsum(m.weights),
        None,
        f"|sum A - 1| = {err:.3g}",
    ))

    pts = _validation_grid(m, grid_size)
    dens = m.pdf(pts)
    scale = float(np.max(np.abs(dens))) if dens.size else 1.0
    i = int(np.argmin(dens))
    checks.append(CheckOutcome(
        "nonnegativity",
        bool(dens[i] >= -1e-9 * scale),
        float(dens[i]),
        float(pts[i]),
        f"{pts.size} grid points, pdf scale {scale:.3g}",
    ))

    sup = m.support
    try:
        total = quad_integral(m.pdf, sup.lo, sup.hi, rel_tol=1e-11, **quad_hints(m))
        ok = abs(total - 1.0) <= 1e-8
        detail = ""
    except Exception as exc:  # report, never raise
        total, ok, detail = getattr(exc, "estimate", float("nan")), False, str(exc)
    checks.append(CheckOutcome("normalization", ok, total, None, detail))
    return ValidationReport(checks)


def quad_hints(m: SignedMixture) -> dict:
    """Length scale and centre for mapping infinite ranges onto the bulk."""
    q = np.concatenate([c.quantile(np.array([0.25, 0.5, 0.75])) for c in m.components])
    spread = float(np.max(q) - np.min(q))
    return {"scale": spread if spread > 0 else 1.0, "center": float(np.median(q))}

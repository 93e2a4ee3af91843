"""Maximum likelihood and method-of-moments fitting for the six families.

The parameter vector is laid out as ``(shared, v_1, ..., v_n)`` with the
``v_i`` sorted ascending in every reported result. Optimisation runs in a
free coordinate system (logarithms of positive parameters, raw locations)
and treats infeasible points (a non-positive density, collapsing vector
entries, data outside the support) as an infinitely bad objective.

MLE is a bounded Nelder-Mead search with random restarts followed by a
Newton polish of the score equation. The score for the polish is computed by
complex-step differentiation of a dedicated log-density, which keeps it
accurate to round-off; the reported ``grad_norm`` is an independent central
finite-difference estimate.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import (
    ConstructionError,
    DomainError,
    InsufficientData,
    MixHypoError,
    MomentDoesNotExist,
    NoConvergence,
)
from .family import (
    SEP_MIN,
    Family,
    FamilySpec,
    from_rates,
    make_family,
    relative_separation,
    to_base_rates,
)

__all__ = [
    "FitConfig",
    "FitResult",
    "log_likelihood",
    "sample_moments",
    "fit_mle",
    "fit_mom",
    "fit",
    "quantile_init",
]

log = logging.getLogger(__name__)

STATIONARITY_RTOL = 1e-4
MOM_CONVERGED = 1e-10
# entries closer than MERGE_FACTOR * sep_min have run into the separation
# constraint; such fits are reported as boundary solutions
MERGE_FACTOR = 100.0
_ENDPOINT_GAP = 1e-4
_BAD_RESIDUAL = 1e3


@dataclass
class FitConfig:
    """Options for :func:`fit_mle` / :func:`fit_mom`.

    ``fixed_shared`` pins the shared scalar (e.g. ``k = 1`` turns MHW into
    the plain hypoexponential). ``bounds`` holds one ``(lo, hi)`` pair per
    free parameter in natural units; ``None`` entries mean unbounded.
    """

    method: str
    family: Family
    n_components: int = 2
    init: tuple[float, ...] | None = None
    bounds: tuple[tuple[float | None, float | None], ...] | None = None
    max_iter: int = 2000
    tol: float = 1e-8
    restarts: int = 5
    fixed_shared: float | None = None
    sep_min: float = SEP_MIN

    def __post_init__(self):
        self.method = self.method.lower()
        if self.method not in ("mle", "mom"):
            raise DomainError(f"unknown method {self.method!r}; expected 'mle' or 'mom'")
        self.family = Family(self.family)
        if self.n_components < 1:
            raise DomainError("n_components must be at least 1")
        if self.restarts < 0 or self.max_iter < 1 or not self.tol > 0:
            raise DomainError("restarts >= 0, max_iter >= 1 and tol > 0 are required")
        if self.fixed_shared is not None and not self.fixed_shared > 0:
            raise DomainError("fixed_shared must be positive")
        if self.init is not None and len(self.init) != self.n_params:
            raise DomainError(f"init must have {self.n_params} entries")
        if self.bounds is not None and len(self.bounds) != self.n_params:
            raise DomainError(f"bounds must have {self.n_params} pairs")

    @property
    def n_params(self) -> int:
        return self.n_components + (0 if self.fixed_shared is not None else 1)


@dataclass
class FitResult:
    params: FamilySpec
    objective: float
    grad_norm: float
    converged: bool
    iterations: int
    sample_size: int
    method: str = "mle"
    message: str = ""
    residuals: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "grad_norm": _json_float(self.grad_norm),
            "iterations": self.iterations,
            "message": self.message,
            "method": self.method,
            "objective": _json_float(self.objective),
            "params": self.params.to_dict(),
            "residuals": [_json_float(r) for r in self.residuals],
            "sample_size": self.sample_size,
        }


def _json_float(x):
    return x if math.isfinite(x) else None


# -- parameter plumbing ------------------------------------------------------


class _Layout:
    """Maps free optimisation coordinates to natural parameters and back."""

    def __init__(self, cfg: FitConfig):
        self.cfg = cfg
        self.family = cfg.family
        self.fixed = cfg.fixed_shared
        n = cfg.n_components
        # True where the natural parameter is positive (log-transformed)
        positive = [] if self.fixed is not None else [True]
        positive += [not self.family.location_vector] * n
        self.positive = np.array(positive)

    def natural(self, z):
        z = np.asarray(z, dtype=float)
        with np.errstate(over="ignore"):
            return np.where(self.positive, np.exp(z), z)

    def free(self, theta):
        theta = np.asarray(theta, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.positive, np.log(theta), theta)

    def split(self, theta):
        theta = list(theta)
        shared = self.fixed if self.fixed is not None else theta.pop(0)
        return shared, theta

    def spec(self, theta) -> FamilySpec:
        shared, vec = self.split(theta)
        return FamilySpec(self.family, shared, tuple(vec), sep_min=self.cfg.sep_min)

    def theta_of(self, spec: FamilySpec):
        vals = list(spec.vector)
        if self.fixed is None:
            vals.insert(0, spec.shared)
        return np.array(vals)

    def free_bounds(self, bounds):
        lo, hi = [], []
        for j, pos in enumerate(self.positive):
            b_lo, b_hi = bounds[j] if bounds is not None else (None, None)
            if pos:
                lo.append(math.log(b_lo) if b_lo is not None and b_lo > 0 else -np.inf)
                hi.append(math.log(b_hi) if b_hi is not None else np.inf)
            else:
                lo.append(b_lo if b_lo is not None else -np.inf)
                hi.append(b_hi if b_hi is not None else np.inf)
        return np.array(lo), np.array(hi)


def _check_data(data, n_params):
    x = np.asarray(data, dtype=float).ravel()
    if x.size == 0:
        raise InsufficientData("no observations")
    if not np.all(np.isfinite(x)):
        raise DomainError("data contain non-finite values")
    if x.size < 5 * n_params:
        raise InsufficientData(
            f"{x.size} observations for {n_params} parameters; at least {5 * n_params} are required"
        )
    return x


# -- objectives --------------------------------------------------------------


def log_likelihood(spec: FamilySpec, data) -> float:
    """``sum_i log pdf(x_i)``; ``-inf`` if any density value is not positive."""
    x = np.asarray(data, dtype=float)
    try:
        dens = make_family(spec).pdf(x)
    except ConstructionError:
        return -math.inf
    if not np.all(dens > 0) or not np.all(np.isfinite(dens)):
        return -math.inf
    return math.fsum(np.log(dens))


def _complex_logpdf(family, shared, vec, x):
    """Per-point log density written with complex-safe elementwise ops."""
    n = len(vec)
    v = list(vec)
    weights = []
    for i in range(n):
        p = 1.0
        for j in range(n):
            if j == i:
                continue
            if family is Family.MHW:
                p = p * -np.expm1(shared * (np.log(v[j]) - np.log(v[i])))
            elif family is Family.MHF:
                p = p * -np.expm1(shared * (np.log(v[i]) - np.log(v[j])))
            elif family in (Family.MHT, Family.MHP):
                p = p * (v[j] - v[i]) / v[j]
            elif family is Family.MHG:
                p = p * -np.expm1((v[j] - v[i]) / shared)
            else:
                p = p * -np.expm1((v[i] - v[j]) / shared)
        weights.append(1.0 / p)
    lx = np.log(x) if family not in (Family.MHG, Family.MHE) else None
    total = 0.0
    for w, vi in zip(weights, v):
        if family is Family.MHW:
            z = lx - np.log(vi)
            lf = np.log(shared) - np.log(vi) + (shared - 1.0) * z - np.exp(shared * z)
        elif family is Family.MHF:
            z = lx - np.log(vi)
            lf = np.log(shared) - np.log(vi) - (1.0 + shared) * z - np.exp(-shared * z)
        elif family is Family.MHT:
            lf = np.log(vi) + vi * np.log(shared) - (vi + 1.0) * lx
        elif family is Family.MHP:
            lf = np.log(vi) + vi * np.log(shared) + (vi - 1.0) * lx
        elif family is Family.MHG:
            z = (x - vi) / shared
            lf = z - np.exp(z) - np.log(shared)
        else:
            z = -(x - vi) / shared
            lf = z - np.exp(z) - np.log(shared)
        total = total + w * np.exp(lf)
    return np.log(total)


def _score_complex_step(layout: _Layout, theta, x):
    """Gradient of the log-likelihood in natural parameters (complex step)."""
    h = 1e-30
    g = np.empty(theta.size)
    for j in range(theta.size):
        tc = theta.astype(complex)
        tc[j] += 1j * h * max(abs(theta[j]), 1.0)
        shared, vec = layout.split(tc)
        ll = _complex_logpdf(layout.family, shared, vec, x)
        g[j] = np.sum(ll.imag) / (h * max(abs(theta[j]), 1.0))
    return g


def _fd_scales(layout: _Layout, theta, x):
    """Per-parameter length scales for the finite-difference score.

    Normally ``max(|theta_j|, 1e-3)``. A shared scalar that sets a support
    endpoint (MHT, MHP) is also capped by its distance to the nearest
    observation, the length over which the likelihood changes there.
    """
    scales = np.maximum(np.abs(theta), 1e-3)
    if layout.fixed is None and layout.family in (Family.MHT, Family.MHP):
        limit = x.min() if layout.family is Family.MHT else 1.0 / x.max()
        gap = limit - theta[0]
        if gap > 0:
            scales[0] = min(scales[0], gap)
    return scales


def _score_fd(layout: _Layout, theta, x):
    """Central finite-difference score with step ``1e-5 * scale_j``."""
    scales = _fd_scales(layout, theta, x)
    g = np.empty(theta.size)
    for j in range(theta.size):
        h = 1e-5 * scales[j]
        up, dn = theta.copy(), theta.copy()
        up[j] += h
        dn[j] -= h
        g[j] = (_ll_natural(layout, up, x) - _ll_natural(layout, dn, x)) / (2 * h)
    return g


def _ll_natural(layout: _Layout, theta, x):
    """Fast log-likelihood used inside the optimisers (same sentinel rules)."""
    try:
        spec = layout.spec(theta)
    except MixHypoError:
        return -math.inf
    if not _in_support(spec, x):
        return -math.inf
    with np.errstate(all="ignore"):
        lp = _complex_logpdf(spec.family, spec.shared, spec.vector, x)
    if not np.all(np.isfinite(lp)):
        return -math.inf
    return float(np.sum(lp))


def _in_support(spec: FamilySpec, x):
    fam, s = spec.family, spec.shared
    if fam is Family.MHT:
        return x.min() >= s
    if fam is Family.MHP:
        return x.max() <= 1.0 / s and x.min() > 0
    if fam in (Family.MHW, Family.MHF):
        return x.min() > 0
    return True


def sample_moments(data, k_max: int) -> list[float]:
    """``(mean(x), mean(x**2), ..., mean(x**k_max))``."""
    x = np.asarray(data, dtype=float).ravel()
    if x.size == 0:
        raise InsufficientData("no observations")
    if k_max < 1:
        raise DomainError("k_max must be at least 1")
    return [math.fsum(x**k) / x.size for k in range(1, k_max + 1)]


# -- initialisation ----------------------------------------------------------


def _single_component(family: Family, x, fixed_shared=None):
    """Two-quantile fit of the one-component law, returned as (shared, v)."""
    q25, q50, q75 = np.quantile(x, [0.25, 0.5, 0.75])
    # Exp(1) quantiles and their logs
    e25, e75 = -math.log(0.75), -math.log(0.25)
    if family in (Family.MHW, Family.MHF):
        # log Z = log v +/- log(E) / k; the map is decreasing for MHF
        if fixed_shared is None:
            k = (math.log(e75) - math.log(e25)) / max(math.log(q75) - math.log(q25), 1e-12)
        else:
            k = fixed_shared
        sign = 1.0 if family is Family.MHW else -1.0
        return k, math.exp(math.log(q50) - sign * math.log(math.log(2.0)) / k)
    if family is Family.MHT:
        # log Z = log k + E / v
        lv = (e75 - e25) / max(math.log(q75) - math.log(q25), 1e-12)
        k = fixed_shared or min(math.exp(math.log(q25) - e25 / lv), x.min())
        return k, lv
    if family is Family.MHP:
        # -log Z = log k + E / v, quantiles flip
        lv = (e75 - e25) / max(math.log(q75) - math.log(q25), 1e-12)
        k = fixed_shared or min(math.exp(-math.log(q75) - e25 / lv), 1.0 / x.max())
        return k, lv
    # Z = k +/- l log(E)
    spread = math.log(e75) - math.log(e25)
    lam = fixed_shared or (q75 - q25) / spread
    if family is Family.MHG:
        return lam, q50 - lam * math.log(math.log(2.0))
    return lam, q50 + lam * math.log(math.log(2.0))


def quantile_init(cfg: FitConfig, data) -> FamilySpec:
    """Heuristic start: quartile-matched single law split into ``n`` rates.

    The single law corresponds to one exponential rate ``a``; the ``n``
    component rates are spread by +/-25% around ``n * a`` and rescaled so
    that the mean of the hypoexponential sum stays ``1/a``.
    """
    x = np.asarray(data, dtype=float)
    fam, n = cfg.family, cfg.n_components
    shared, v = _single_component(fam, x, cfg.fixed_shared)
    one = FamilySpec(fam, shared, (v,), sep_min=cfg.sep_min)
    a = to_base_rates(one).rates[0]
    if n == 1:
        return one
    spread = np.linspace(-0.25, 0.25, n)
    rates = n * a * (1.0 + spread)
    rates *= a * np.sum(1.0 / rates)
    return from_rates(fam, shared, rates, sep_min=cfg.sep_min)


def _merged(spec: FamilySpec) -> bool:
    v, limit = spec.vector, MERGE_FACTOR * spec.sep_min
    return any(relative_separation(a, b) < limit for a, b in zip(v[:-1], v[1:]))


# -- MLE ---------------------------------------------------------------------


def _neg_ll_free(layout, x):
    def f(z):
        val = _ll_natural(layout, layout.natural(z), x)
        return -val if math.isfinite(val) else math.inf
    return f


def _nelder_mead(f, z0, lo, hi, cfg, step=0.1):
    dim = z0.size
    simplex = np.vstack([z0] + [z0 + step * np.eye(dim)[j] for j in range(dim)])
    simplex = np.clip(simplex, lo, hi)
    res = optimize.minimize(
        f,
        z0,
        method="Nelder-Mead",
        bounds=list(zip(lo, hi)) if np.any(np.isfinite(lo) | np.isfinite(hi)) else None,
        options={
            "initial_simplex": simplex,
            "maxfev": cfg.max_iter * dim,
            "maxiter": cfg.max_iter,
            "xatol": 1e-10,
            "fatol": cfg.tol * 1e-6,
            "adaptive": dim > 3,
        },
    )
    return res


def _newton_polish(layout, theta, x, lo, hi, max_steps=30):
    """Newton iterations on the complex-step score; never lowers the likelihood."""
    best_ll = _ll_natural(layout, theta, x)
    for _ in range(max_steps):
        g = _score_complex_step(layout, theta, x)
        if not np.all(np.isfinite(g)):
            break
        dim = theta.size
        H = np.empty((dim, dim))
        for j in range(dim):
            d = 1e-6 * max(abs(theta[j]), 1e-3)
            tp = theta.copy()
            tp[j] += d
            H[:, j] = (_score_complex_step(layout, tp, x) - g) / d
        H = 0.5 * (H + H.T)
        try:
            eig = np.linalg.eigvalsh(H)
        except np.linalg.LinAlgError:
            break
        if not np.all(eig < 0):
            break
        step = -np.linalg.solve(H, g)
        accepted = False
        for _ in range(30):
            cand = theta + step
            z = layout.free(cand)
            if np.all(np.isfinite(z)) and np.all(z >= lo) and np.all(z <= hi):
                ll = _ll_natural(layout, cand, x)
                if math.isfinite(ll) and ll >= best_ll - 1e-12 * abs(best_ll):
                    accepted = True
                    break
            step *= 0.5
        if not accepted:
            break
        done = np.all(np.abs(step) <= 4 * np.finfo(float).eps * np.maximum(np.abs(theta), 1e-300))
        theta, best_ll = cand, max(ll, best_ll)
        if done:
            break
    return theta


def _endpoint(cfg: FitConfig, x):
    """Closed-form MLE of a support endpoint carried by the shared scalar.

    For MHT the support starts at ``k`` and for MHP it ends at ``1/k``. With a
    single component the density is positive at that end, the likelihood is
    monotone in ``k`` up to the sample extreme and the estimate is ``min(x)``
    or ``1/max(x)`` (clipped to the user box). With two or more components
    the density vanishes at the endpoint and the maximum is interior.
    """
    if (cfg.fixed_shared is not None or cfg.n_components != 1
            or cfg.family not in (Family.MHT, Family.MHP)):
        return None
    k = float(x.min()) if cfg.family is Family.MHT else 1.0 / float(x.max())
    if cfg.bounds is not None:
        b_lo, b_hi = cfg.bounds[0]
        if b_hi is not None:
            k = min(k, b_hi)
        if b_lo is not None and b_lo > k:
            k = b_lo
    return k


def fit_mle(data, cfg: FitConfig, rng) -> FitResult:
    """Maximise the log-likelihood over the feasible box.

    Nelder-Mead multi-start in free coordinates, then a Newton polish. For
    MHT and MHP the shared scalar is a support endpoint and is set to its
    closed-form estimate when there is a single component; stationarity is then
    judged on the remaining parameter.
    """
    x = _check_data(data, cfg.n_params)
    k_end = _endpoint(cfg, x)
    inner = cfg
    if k_end is not None:
        inner = FitConfig(
            "mle", cfg.family, cfg.n_components,
            init=None if cfg.init is None else tuple(cfg.init[1:]),
            bounds=None if cfg.bounds is None else tuple(cfg.bounds[1:]),
            max_iter=cfg.max_iter, tol=cfg.tol, restarts=cfg.restarts,
            fixed_shared=k_end, sep_min=cfg.sep_min,
        )
    layout = _Layout(inner)
    lo, hi = layout.free_bounds(inner.bounds)

    if inner.init is not None:
        starts = [np.asarray(inner.init, dtype=float)]
    else:
        starts = _default_starts(inner, x, rng, layout)
    starts = [_make_feasible(layout, st, x) for st in starts]
    start = starts[0]

    f = _neg_ll_free(layout, x)
    z_starts = [np.clip(layout.free(st), lo, hi) for st in starts]
    candidates = []
    iterations = 0
    # every start once, then perturbed copies with a slowly widening spread
    runs = [(z, 0.0) for z in z_starts]
    runs += [(z_starts[r % len(z_starts)], 0.15 * (1 + r // 2)) for r in range(inner.restarts)]
    for z_base, sigma in runs:
        z0 = z_base if sigma == 0 else np.clip(z_base + rng.normal(0.0, sigma, z_base.size), lo, hi)
        if not math.isfinite(f(z0)):
            continue
        res = _nelder_mead(f, z0, lo, hi, inner)
        iterations += int(res.nit)
        if math.isfinite(res.fun):
            candidates.append((res.fun, layout.natural(res.x)))
    if not candidates:
        return FitResult(_spec_or_start(layout, start), -math.inf, math.inf, False, iterations,
                         x.size, "mle", "no feasible starting point")

    def canon(theta):
        return layout.theta_of(layout.spec(theta))

    candidates = [(fun, canon(theta)) for fun, theta in candidates]
    best_fun = min(c[0] for c in candidates)
    ties = [c for c in candidates if c[0] - best_fun <= 1e-12 * max(abs(best_fun), 1.0)]
    theta = min(ties, key=lambda c: tuple(c[1]))[1]

    theta = canon(_newton_polish(layout, theta, x, lo, hi))
    spec = layout.spec(theta)
    ll = log_likelihood(spec, x)
    grad_norm = float(np.linalg.norm(_score_fd(layout, theta, x)))
    z = layout.free(theta)
    on_boundary = bool(np.any(np.isclose(z, lo, rtol=0, atol=1e-9) | np.isclose(z, hi, rtol=0, atol=1e-9)))
    merged = _merged(spec)
    converged = (
        math.isfinite(grad_norm)
        and grad_norm <= STATIONARITY_RTOL * max(abs(ll), 1.0)
        and not on_boundary
        and not merged
    )
    if converged:
        msg = "stationary point found"
    elif merged:
        msg = "vector entries merged at the separation limit"
    elif on_boundary:
        msg = "optimum on the search-box boundary"
    else:
        msg = "score not small at optimum"

    log.info("mle %s: ll=%.10g grad_norm=%.3g converged=%s", spec, ll, grad_norm, converged)
    return FitResult(spec, ll, grad_norm, converged, iterations, x.size, "mle", msg)


def _spec_or_start(layout, start):
    try:
        return layout.spec(start)
    except MixHypoError as exc:
        raise NoConvergence(f"no feasible starting point: {exc}") from exc


def _default_starts(cfg, x, rng, layout):
    """Method-of-moments estimate (when it exists) and the quantile heuristic."""
    starts = []
    try:
        mom = fit_mom(x, FitConfig("mom", cfg.family, cfg.n_components, fixed_shared=cfg.fixed_shared,
                                   restarts=1, sep_min=cfg.sep_min), rng)
        theta = layout.theta_of(mom.params)
        if not _merged(mom.params) and math.isfinite(_ll_natural(layout, theta, x)):
            starts.append(theta)
    except MixHypoError as exc:
        log.debug("moment start unavailable: %s", exc)
    starts.append(layout.theta_of(quantile_init(cfg, x)))
    return starts


def _make_feasible(layout, theta, x):
    """Nudge the support-defining shared parameter so all data are inside."""
    theta = np.array(theta, dtype=float)
    if layout.fixed is not None:
        return theta
    fam = layout.family
    # with two or more components the density vanishes at the endpoint, so
    # the start keeps a small gap to the data extreme
    if fam is Family.MHT:
        theta[0] = min(theta[0], x.min() * (1 - _ENDPOINT_GAP))
    if fam is Family.MHP:
        theta[0] = min(theta[0], (1.0 / x.max()) * (1 - _ENDPOINT_GAP))
    return theta


# -- method of moments --------------------------------------------------------


def _mom_bounds(cfg: FitConfig, layout: _Layout, p: int):
    """Natural-unit box; heavy-tailed families need shape > p."""
    bounds = list(cfg.bounds) if cfg.bounds is not None else [(None, None)] * cfg.n_params
    fam = cfg.family
    shape_idx = []
    if fam is Family.MHF and layout.fixed is None:
        shape_idx = [0]
    elif fam is Family.MHT:
        off = 0 if layout.fixed is not None else 1
        shape_idx = list(range(off, off + cfg.n_components))
    for j in shape_idx:
        b_lo, b_hi = bounds[j]
        if b_hi is not None and b_hi <= p:
            raise MomentDoesNotExist(
                f"{fam.value}: the search box caps a shape parameter at {b_hi:g}, "
                f"but {p} finite moments need shape > {p}",
                max_order=math.ceil(b_hi) - 1,
            )
        floor = p * (1.0 + 1e-6)
        bounds[j] = (max(b_lo, floor) if b_lo is not None else floor, b_hi)
    if fam is Family.MHF and layout.fixed is not None and layout.fixed <= p:
        raise MomentDoesNotExist(f"MHF with k={layout.fixed:g} has no moment of order {p}",
                                 max_order=math.ceil(layout.fixed) - 1)
    return bounds


def fit_mom(data, cfg: FitConfig, rng) -> FitResult:
    """Match the first ``p`` raw moments, ``p`` = number of free parameters."""
    layout = _Layout(cfg)
    x = _check_data(data, cfg.n_params)
    p = cfg.n_params
    bounds = _mom_bounds(cfg, layout, p)
    lo, hi = layout.free_bounds(bounds)
    mu = np.array(sample_moments(x, p))
    denom = np.where(np.abs(mu) > 1e-300, np.abs(mu), 1.0)

    def residuals(z):
        try:
            spec = layout.spec(layout.natural(z))
            m = make_family(spec)
            g = np.array([m.moment(k) for k in range(1, p + 1)])
        except MixHypoError:
            return np.full(p, _BAD_RESIDUAL)
        r = (g - mu) / denom
        return np.where(np.isfinite(r), r, _BAD_RESIDUAL)

    if cfg.init is not None:
        start = np.asarray(cfg.init, dtype=float)
    else:
        start = layout.theta_of(quantile_init(cfg, x))
    z_start = layout.free(start)
    # pull the start strictly inside the box
    span = np.where(np.isfinite(hi - lo), hi - lo, 1.0)
    z_start = np.clip(z_start, lo + 1e-3 * span, hi - 1e-3 * span)

    results = []
    nfev = 0
    for r in range(cfg.restarts + 1):
        z0 = z_start if r == 0 else np.clip(z_start + rng.normal(0.0, 0.3, z_start.size),
                                            lo + 1e-3 * span, hi - 1e-3 * span)
        try:
            res = optimize.least_squares(
                residuals, z0, bounds=(lo, hi), method="trf", x_scale=1.0,
                xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=cfg.max_iter,
            )
        except ValueError as exc:
            log.debug("least squares start rejected: %s", exc)
            continue
        nfev += int(res.nfev)
        obj = float(np.sum(res.fun**2))
        fitted = layout.spec(layout.natural(res.x))
        merged = _merged(fitted)
        results.append((merged, obj, layout.theta_of(fitted), res.fun))
        if obj <= MOM_CONVERGED * 1e-6 and not merged:
            break
    if not results:
        spec = layout.spec(start)
        return FitResult(spec, math.inf, math.nan, False, nfev, x.size, "mom", "no feasible start")
    # solutions with merged entries only win when nothing else was found
    results.sort(key=lambda c: (c[0], c[1], tuple(c[2])))
    merged, best_obj = results[0][0], results[0][1]
    ties = [c for c in results if c[0] == merged and c[1] - best_obj <= 1e-12 * max(best_obj, 1e-300)]
    _, obj, theta, res_vec = min(ties, key=lambda c: tuple(c[2]))
    spec = layout.spec(theta)
    converged = obj <= MOM_CONVERGED and not merged
    if converged:
        msg = "moment equations solved"
    elif merged:
        msg = "vector entries merged at the separation limit"
    else:
        msg = "moment residual above 1e-10"
    log.info("mom %s: residual=%.3g converged=%s", spec, obj, converged)
    return FitResult(spec, obj, math.nan, converged, nfev, x.size, "mom", msg,
                     residuals=[float(v) for v in res_vec])


def fit(data, cfg: FitConfig, rng) -> FitResult:
    return fit_mle(data, cfg, rng) if cfg.method == "mle" else fit_mom(data, cfg, rng)

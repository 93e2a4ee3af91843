"""Acceptance suite: one test (and one PASS/FAIL line) per criterion."""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from mixhypo.cli import main
from mixhypo.errors import MomentDoesNotExist
from mixhypo.estimation import FitConfig, fit_mle, fit_mom
from mixhypo.family import (
    Family,
    FamilySpec,
    HypoexpSpec,
    example_spec,
    family_weights,
    hypoexp_weights,
    make_family,
    relative_separation,
)
from mixhypo.mixture import quad_hints
from mixhypo.quadrature import quad_integral
from mixhypo.verify import construction_suite

SEED = 0
GOLDEN = Path(__file__).parent / "golden"

# pinned tolerances
WEIGHT_CLOSURE_ABS = 1e-10
CDF_QUAD_ABS = 1e-8
CDF_SF_ABS = 1e-12
HAZARD_REL = 1e-10
MOMENT_REL = 1e-6
MGF0_ABS = 1e-10
KS_COEFFICIENT = 1.63
KS_SAMPLES = 100_000
HAND_ABS = 1e-12
RECOVERY_REL = 0.10
STATIONARITY_RTOL = 1e-4
EXP_MLE_REL = 1e-12
ERRATUM_REL = 1e-6


# -- 1 ---------------------------------------------------------------------------------


def _random_spec(rng, fam: Family, n: int) -> FamilySpec:
    while True:
        shared = float(np.exp(rng.uniform(math.log(0.5), math.log(3.0))))
        if fam.location_vector:
            vec = np.sort(rng.uniform(-3.0, 3.0, n))
        else:
            vec = np.sort(np.exp(rng.uniform(math.log(0.5), math.log(5.0), n)))
        if all(relative_separation(a, b) >= 0.05 for a, b in zip(vec[:-1], vec[1:])):
            return FamilySpec(fam, shared, tuple(float(v) for v in vec))


def test_weight_closure(acceptance):
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    worst, worst_spec = 0.0, None
    for fam in Family:
        for n in range(2, 9):
            for _ in range(100):
                spec = _random_spec(rng, fam, n)
                err = abs(math.fsum(family_weights(spec)) - 1.0)
                if err > worst:
                    worst, worst_spec = err, spec
    elapsed = time.perf_counter() - start
    ok = worst <= WEIGHT_CLOSURE_ABS and elapsed < 5.0
    acceptance(1, "weight closure", ok, f"worst |sum-1|={worst:.2e} at {worst_spec}, {elapsed:.2f}s")
    assert ok


# -- 2 ---------------------------------------------------------------------------------


def _theorem_suite(spec):
    m = make_family(spec)
    sup = m.support
    hints = quad_hints(m)
    u = (np.arange(20) + 0.5) / 20
    t = m.quantile(u)
    worst = {"cdf": 0.0, "cdf+sf": 0.0, "hazard": 0.0, "moment": 0.0, "mgf0": 0.0}

    for ti in t:
        quad = quad_integral(m.pdf, sup.lo, float(ti), rel_tol=1e-12, abs_tol=1e-13,
                             scale=hints["scale"], center=hints["center"])
        worst["cdf"] = max(worst["cdf"], abs(m.cdf(ti) - quad))
    worst["cdf+sf"] = float(np.max(np.abs(m.cdf(t) + m.sf(t) - 1.0)))
    pdf = m.pdf(t)
    worst["hazard"] = float(np.max(np.abs(m.hazard(t) * m.sf(t) - pdf) / pdf))

    for k in range(1, 5):
        if k > m.max_moment_order:
            with pytest.raises(MomentDoesNotExist):
                m.moment(k)
            continue

        def integrand(x, k=k):
            x = np.asarray(x, dtype=float)
            f = m.pdf(x)
            with np.errstate(invalid="ignore", over="ignore"):
                return np.where(f != 0, x**k * f, 0.0)

        quad = quad_integral(integrand, sup.lo, sup.hi, rel_tol=1e-11, **hints)
        worst["moment"] = max(worst["moment"], abs(m.moment(k) - quad) / abs(quad))
    worst["mgf0"] = abs(m.mgf(0.0) - 1.0)
    return worst


def test_theorem_suite(acceptance):
    limits = {"cdf": CDF_QUAD_ABS, "cdf+sf": CDF_SF_ABS, "hazard": HAZARD_REL,
              "moment": MOMENT_REL, "mgf0": MGF0_ABS}
    start = time.perf_counter()
    worst = dict.fromkeys(limits, 0.0)
    for fam in Family:
        for n in (1, 2, 3, 4):
            for key, val in _theorem_suite(example_spec(fam, n)).items():
                worst[key] = max(worst[key], val)
    elapsed = time.perf_counter() - start
    ok = all(worst[k] <= limits[k] for k in limits) and elapsed < 60.0
    detail = ", ".join(f"{k}={worst[k]:.1e}" for k in limits) + f", {elapsed:.1f}s"
    acceptance(2, "theorem suite", ok, detail)
    assert ok


# -- 3 ---------------------------------------------------------------------------------


def test_construction_equivalence(acceptance):
    start = time.perf_counter()
    report = construction_suite(seed=SEED, samples=KS_SAMPLES,
                                tolerances={"ks_coefficient": KS_COEFFICIENT})
    elapsed = time.perf_counter() - start
    crit = KS_COEFFICIENT / math.sqrt(KS_SAMPLES)
    dists = [c.printed_value for c in report.checks]
    ok = len(dists) == 18 and max(dists) < crit and elapsed < 30.0
    acceptance(3, "construction equivalence", ok,
               f"{len(dists)} cases, max KS={max(dists):.5f} < {crit:.5f}, {elapsed:.1f}s")
    assert ok


# -- 4 ---------------------------------------------------------------------------------


def test_hand_derived_values(acceptance):
    ln2 = math.log(2.0)
    # density 2e^{-t} - 2e^{-2t}, cdf 1 - 2e^{-t} + e^{-2t}, mean 1 + 1/2
    want_pdf = 2 * math.exp(-ln2) - 2 * math.exp(-2 * ln2)
    want_cdf = 1 - 2 * math.exp(-ln2) + math.exp(-2 * ln2)
    want_mean = 1.0 + 0.5
    m = make_family(FamilySpec("MHW", 1.0, (1.0, 0.5)))
    errs = [
        abs(m.pdf(ln2) - want_pdf),
        abs(m.cdf(ln2) - want_cdf),
        abs(m.moment(1) - want_mean),
    ]
    # 1/P_i = prod_{j != i} a_j / (a_j - a_i)
    for rates, want in [((1.0, 2.0), (2 / 1, 1 / -1)),
                        ((1.0, 2.0, 3.0), (2 / 1 * 3 / 2, 1 / -1 * 3 / 1, 1 / -2 * 2 / -1))]:
        got = hypoexp_weights(HypoexpSpec(rates))
        errs.extend(abs(g - w) for g, w in zip(got, want))
    worst = max(errs)
    ok = worst <= HAND_ABS
    acceptance(4, "hand-derived values", ok, f"worst abs error {worst:.1e}")
    assert ok


# -- 5 ---------------------------------------------------------------------------------

RECOVERY_TRUTHS = [
    FamilySpec("MHW", 2.0, (0.5, 2.0)),
    FamilySpec("MHF", 4.0, (1.0, 1.5)),
    FamilySpec("MHT", 1.0, (200.0, 300.0)),
    FamilySpec("MHP", 1.0, (1.0, 3.0)),
    FamilySpec("MHG", 0.5, (1.0, 2.0)),
    FamilySpec("MHE", 0.5, (1.0, 2.0)),
]


@pytest.mark.slow
def test_estimation_recovery(acceptance):
    from mixhypo.family import sample_family

    start = time.perf_counter()
    lines, ok = [], True
    for f_idx, truth in enumerate(RECOVERY_TRUTHS):
        want = np.array(truth.params)
        errs = {"mle": [], "mom": []}
        stationary = True
        for rep in range(10):
            x = sample_family(truth, 10_000, np.random.default_rng([SEED, f_idx, rep]))
            mle = fit_mle(x, FitConfig("mle", truth.family, 2), np.random.default_rng([SEED, f_idx, rep, 1]))
            mom = fit_mom(x, FitConfig("mom", truth.family, 2), np.random.default_rng([SEED, f_idx, rep, 2]))
            stationary &= mle.converged and mle.grad_norm <= STATIONARITY_RTOL * abs(mle.objective)
            errs["mle"].append(np.abs(np.array(mle.params.params) - want) / np.abs(want))
            errs["mom"].append(np.abs(np.array(mom.params.params) - want) / np.abs(want))
        med = {k: np.median(np.array(v), axis=0) for k, v in errs.items()}
        fam_ok = stationary and all(np.all(v <= RECOVERY_REL) for v in med.values())
        ok &= fam_ok
        lines.append(f"{truth.family.value} mle {np.max(med['mle']):.3f} mom {np.max(med['mom']):.3f}"
                     + ("" if stationary else " non-stationary"))

    rng = np.random.default_rng(SEED)
    x = rng.exponential(1 / 1.7, 10_000)
    exp_fit = fit_mle(x, FitConfig("mle", "MHW", 1, fixed_shared=1.0), rng)
    # Weibull with unit shape: scale is 1/rate
    rate_err = abs(1 / exp_fit.params.vector[0] - 1 / x.mean()) * x.mean()
    ok &= rate_err <= EXP_MLE_REL

    elapsed = time.perf_counter() - start
    ok &= elapsed < 300.0
    acceptance(5, "estimation recovery", ok,
               "; ".join(lines) + f"; exp rate rel err {rate_err:.1e}; {elapsed:.0f}s")
    assert ok


# -- 6 ---------------------------------------------------------------------------------

EXPECTED_ERRATA = [
    "MHW[n=3].corollary.F",
    "MHW[n=3].corollary.E",
    "MHG[n=3].base.F",
    "MHT[n=3].corollary.F",
]
EXPECTED_MATCH = ["MHE[n=3].corollary.F"]


def test_errata_audit(acceptance, tmp_path):
    out = tmp_path / "check.json"
    start = time.perf_counter()
    code = main(["check", "--output", str(out)])
    elapsed = time.perf_counter() - start
    checks = {c["name"]: c for c in json.loads(out.read_text())["checks"]}
    missing = []
    for name in EXPECTED_ERRATA:
        c = checks.get(name)
        if not (c and c["verdict"] == "ERRATUM" and c["rel_diff"] > ERRATUM_REL
                and c["corrected_rel_diff"] <= ERRATUM_REL):
            missing.append(name)
    for name in EXPECTED_MATCH:
        c = checks.get(name)
        if not (c and c["verdict"] == "MATCH" and c["rel_diff"] <= ERRATUM_REL):
            missing.append(name)
    n_err = sum(c["verdict"] == "ERRATUM" for c in checks.values())
    ok = code == 0 and not missing and elapsed < 60.0
    acceptance(6, "errata audit", ok,
               f"exit {code}, {n_err} ERRATUM, unmet {missing or 'none'}, {elapsed:.1f}s")
    assert ok


# -- 7 ---------------------------------------------------------------------------------


def test_cli_determinism(acceptance, tmp_path):
    jobs = {
        "eval_mhw.csv": ["eval", "--family", "MHW", "--shared", "1", "--vector", "1,0.5",
                         "--t", "0.5", "--t", str(math.log(2)), "--t", "2"],
        "sample_mht.txt": ["sample", "--family", "MHT", "--shared", "1", "--vector", "1,2",
                           "--count", "10", "--seed", "42"],
    }
    ok = True
    for golden, args in jobs.items():
        outputs = []
        for run in range(2):
            path = tmp_path / f"{run}-{golden}"
            ok &= main(args + ["--output", str(path)]) == 0
            outputs.append(path.read_bytes())
        ok &= outputs[0] == outputs[1] == (GOLDEN / golden).read_bytes()
    acceptance(7, "CLI determinism", ok, "eval and sample byte-identical to golden files")
    assert ok

"""Command-line front end: ``mixhypo {eval,sample,fit,check,figures}``.

Exit codes:

====  =====================================================
0     success
2     configuration or input error
3     construction error (positivity, separation, weights)
4     fit did not converge (the result is still written)
5     insufficient data for the requested fit
6     a verification check failed
====  =====================================================

Every command reads an optional JSON config (``--config``); flags given on
the command line override keys from the file. The merged configuration is
validated against ``config_schema.json`` before anything runs.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .errors import (
    ConstructionError,
    DomainError,
    InsufficientData,
    MixHypoError,
    MomentDoesNotExist,
    NoConvergence,
)
from .estimation import FitConfig, fit
from .family import SEP_MIN, Family, FamilySpec, make_family, sample_family
from .verify import full_check

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONSTRUCTION = 3
EXIT_NO_CONVERGENCE = 4
EXIT_INSUFFICIENT = 5
EXIT_CHECK_FAILED = 6

CSV_HEADER = "t,pdf,cdf,reliability,hazard"
DEFAULT_POINTS = 512
DEFAULT_QUANTILES = (0.001, 0.999)

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}

log = logging.getLogger("mixhypo")


class ConfigError(Exception):
    pass


def _schema():
    text = resources.files("mixhypo").joinpath("config_schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def load_config(path: str | None, overrides: dict) -> dict:
    """Merge the JSON file at ``path`` with ``overrides`` and validate."""
    cfg = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("the config file must hold a JSON object")
    for key, val in overrides.items():
        if val is None:
            continue
        if key == "spec" and isinstance(cfg.get("spec"), dict):
            cfg["spec"] = {**cfg["spec"], **val}
        else:
            cfg[key] = val
    try:
        jsonschema.validate(cfg, _schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid configuration at {where}: {exc.message}") from exc
    return cfg


def fmt(x: float) -> str:
    """Round-trip decimal text for a float."""
    return format(float(x), ".17g")


def _spec_from(cfg) -> FamilySpec:
    s = cfg.get("spec")
    if s is None:
        raise ConfigError("a family spec is required (--family/--shared/--vector or 'spec' in the config)")
    return FamilySpec(s["family"], s["shared"], tuple(s["vector"]), sep_min=s.get("sep_min", SEP_MIN))


def _emit(text: str, output: str | None):
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# -- eval ----------------------------------------------------------------------


def curve_rows(m, t) -> list[str]:
    t = np.asarray(t, dtype=float)
    pdf, cdf, rel = m.pdf(t), m.cdf(t), m.sf(t)
    rows = []
    for ti, p, c, r in zip(t, pdf, cdf, rel):
        try:
            h = m.hazard(float(ti))
        except DomainError:
            h = math.nan
        rows.append(",".join(fmt(v) for v in (ti, p, c, r, h)))
    return rows


def eval_grid(m, cfg) -> np.ndarray:
    if "t" in cfg:
        return np.asarray(cfg["t"], dtype=float)
    points = cfg.get("points", DEFAULT_POINTS)
    lo = cfg.get("t_min")
    hi = cfg.get("t_max")
    if lo is None:
        lo = float(m.quantile(DEFAULT_QUANTILES[0]))
    if hi is None:
        hi = float(m.quantile(DEFAULT_QUANTILES[1]))
    if not lo < hi:
        raise ConfigError(f"t_min ({lo}) must be below t_max ({hi})")
    return np.linspace(lo, hi, points)


def cmd_eval(cfg) -> int:
    m = make_family(_spec_from(cfg))
    rows = curve_rows(m, eval_grid(m, cfg))
    _emit("\n".join([CSV_HEADER] + rows) + "\n", cfg.get("output"))
    return EXIT_OK


# -- sample --------------------------------------------------------------------


def cmd_sample(cfg) -> int:
    if "seed" not in cfg:
        raise ConfigError("sampling needs an explicit --seed; refusing to seed from the clock")
    spec = _spec_from(cfg)
    rng = np.random.default_rng(cfg["seed"])
    x = sample_family(spec, cfg.get("count", 1000), rng)
    _emit("".join(fmt(v) + "\n" for v in np.atleast_1d(x)), cfg.get("output"))
    return EXIT_OK


# -- fit -----------------------------------------------------------------------


def read_data(path: str) -> np.ndarray:
    """One real per line; ``#`` starts a comment; blank lines are ignored."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read data {path}: {exc}") from exc
    values = []
    for no, line in enumerate(lines, 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            v = float(text)
        except ValueError:
            raise ConfigError(f"{path}:{no}: not a number: {text!r}") from None
        if not math.isfinite(v):
            raise ConfigError(f"{path}:{no}: non-finite value {text!r}")
        values.append(v)
    return np.array(values)


def cmd_fit(cfg) -> int:
    if "data" not in cfg:
        raise ConfigError("fit needs a data file")
    family = cfg.get("family") or (cfg.get("spec") or {}).get("family")
    if family is None:
        raise ConfigError("fit needs --family")
    x = read_data(cfg["data"])
    bounds = cfg.get("bounds")
    try:
        fc = FitConfig(
            cfg.get("method", "mle"), family, cfg.get("n_components", 2),
            init=tuple(cfg["init"]) if "init" in cfg else None,
            bounds=tuple(tuple(b) for b in bounds) if bounds is not None else None,
            max_iter=cfg.get("max_iter", 2000), tol=cfg.get("tol", 1e-8),
            restarts=cfg.get("restarts", 5), fixed_shared=cfg.get("fixed_shared"),
            sep_min=cfg.get("sep_min", SEP_MIN),
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    rng = np.random.default_rng(cfg.get("seed", 0))
    result = fit(x, fc, rng)
    _emit(json.dumps(result.to_dict(), sort_keys=True, indent=2) + "\n", cfg.get("output"))
    if not result.converged:
        log.warning("fit did not converge: %s", result.message)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


# -- check ---------------------------------------------------------------------


def cmd_check(cfg) -> int:
    report = full_check(
        families=cfg.get("families"),
        seed=cfg.get("seed", 0),
        samples=cfg.get("samples", 100_000),
        grid=cfg.get("grid", 20),
        tolerances=cfg.get("tolerances"),
    )
    _emit(report.to_json(include_runtime=False) + "\n", cfg.get("output"))
    for c in report.failed:
        log.error("check failed: %s (%s)", c.name, c.note or c.citation)
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


# -- figures -------------------------------------------------------------------

# Curve sets for the seven figures: the hypoexponential parent (MHW with k = 1
# has exponential components with rates 1/lambda_i) and the six families.
FIGURES = {
    1: [("MHW", 1.0, (1.0, 0.5)), ("MHW", 1.0, (1.0, 0.5, 1 / 3)), ("MHW", 1.0, (2.0, 1.0, 2 / 3))],
    2: [("MHW", 2.0, (1.0, 1.5, 2.0)), ("MHW", 0.5, (1.0, 2.0, 3.0)), ("MHW", 3.0, (1.0, 2.0))],
    3: [("MHF", 3.0, (1.0, 1.5, 2.0)), ("MHF", 1.5, (1.0, 2.0, 3.0)), ("MHF", 5.0, (1.0, 2.0))],
    4: [("MHT", 1.0, (2.0, 3.0, 4.0)), ("MHT", 1.0, (1.0, 3.0)), ("MHT", 2.0, (1.5, 2.5, 3.5))],
    5: [("MHP", 1.0, (1.0, 2.0, 3.0)), ("MHP", 1.0, (0.5, 1.5)), ("MHP", 2.0, (2.0, 3.0, 4.0))],
    6: [("MHG", 1.0, (0.0, 0.5, 1.0)), ("MHG", 0.5, (0.0, 1.0, 2.0)), ("MHG", 2.0, (1.0, 2.0))],
    7: [("MHE", 1.0, (0.0, 0.5, 1.0)), ("MHE", 0.5, (0.0, 1.0, 2.0)), ("MHE", 2.0, (1.0, 2.0))],
}


def figure_csv(number: int, points: int = DEFAULT_POINTS) -> str:
    """Curve data for one figure; every curve shares one ``t`` grid."""
    mixes = [make_family(FamilySpec(f, k, v)) for f, k, v in FIGURES[number]]
    lo = min(float(m.quantile(DEFAULT_QUANTILES[0])) for m in mixes)
    hi = max(float(m.quantile(DEFAULT_QUANTILES[1])) for m in mixes)
    t = np.linspace(lo, hi, points)
    lines = ["curve,family,shared,vector," + CSV_HEADER]
    for idx, ((f, k, v), m) in enumerate(zip(FIGURES[number], mixes), 1):
        label = f"{idx},{f},{fmt(k)}," + " ".join(fmt(x) for x in v)
        lines.extend(f"{label},{row}" for row in curve_rows(m, t))
    return "\n".join(lines) + "\n"


def cmd_figures(cfg) -> int:
    out = Path(cfg.get("output", "."))
    out.mkdir(parents=True, exist_ok=True)
    for number in cfg.get("figures") or sorted(FIGURES):
        path = out / f"figure{number}.csv"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(figure_csv(number, cfg.get("points", DEFAULT_POINTS)))
        log.info("wrote %s", path)
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_spec_flags(p):
    g = p.add_argument_group("family spec")
    g.add_argument("--family", choices=[f.value for f in Family])
    g.add_argument("--shared", type=float, help="k for MHW/MHF/MHT/MHP, lambda for MHG/MHE")
    g.add_argument("--vector", type=_floats, help="comma-separated per-component entries")
    g.add_argument("--sep-min", type=float, dest="sep_min")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixhypo", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file (flags override it)")
        p.add_argument("--output", "-o", help="write to this path instead of stdout")

    p = sub.add_parser("eval", help="tabulate pdf, cdf, reliability and hazard as CSV")
    common(p)
    _add_spec_flags(p)
    p.add_argument("--t", type=float, action="append", help="evaluation point (repeatable)")
    p.add_argument("--t-min", type=float, dest="t_min")
    p.add_argument("--t-max", type=float, dest="t_max")
    p.add_argument("--points", type=int)

    p = sub.add_parser("sample", help="draw variates, one per line")
    common(p)
    _add_spec_flags(p)
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("fit", help="fit a family by MLE or method of moments")
    common(p)
    p.add_argument("data", nargs="?", help="data file, one value per line")
    p.add_argument("--family", choices=[f.value for f in Family])
    p.add_argument("--method", choices=["mle", "mom"])
    p.add_argument("--components", type=int, dest="n_components")
    p.add_argument("--fixed-shared", type=float, dest="fixed_shared")
    p.add_argument("--init", type=_floats)
    p.add_argument("--restarts", type=int)
    p.add_argument("--max-iter", type=int, dest="max_iter")
    p.add_argument("--tol", type=float)
    p.add_argument("--sep-min", type=float, dest="sep_min")
    p.add_argument("--seed", type=int, help="stream for restart perturbations (default 0)")

    p = sub.add_parser("check", help="run the closed-form audit and oracle suites")
    common(p)
    p.add_argument("--family", action="append", dest="families", choices=[f.value for f in Family])
    p.add_argument("--tolerance", action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--grid", type=int)

    p = sub.add_parser("figures", help="write curve data for figures 1-7 as CSV files")
    p.add_argument("--config")
    p.add_argument("--output", "-o", help="output directory (default: current directory)")
    p.add_argument("--figure", type=int, action="append", dest="figures")
    p.add_argument("--points", type=int)
    return parser


def _overrides(args) -> dict:
    d = {k: v for k, v in vars(args).items() if k not in ("command", "config", "tolerance")}
    spec = {k: d.pop(k) for k in ("shared", "vector") if k in d}
    if args.command in ("eval", "sample"):
        spec["family"] = d.pop("family", None)
        if "sep_min" in d:
            spec["sep_min"] = d.pop("sep_min")
        spec = {k: v for k, v in spec.items() if v is not None}
        d["spec"] = spec or None
    if getattr(args, "tolerance", None):
        tol = {}
        for item in args.tolerance:
            name, sep, val = item.partition("=")
            if not sep:
                raise ConfigError(f"--tolerance expects NAME=VALUE, got {item!r}")
            try:
                tol[name] = float(val)
            except ValueError:
                raise ConfigError(f"--tolerance {name}: not a number: {val!r}") from None
        d["tolerances"] = tol
    return d


def _setup_logging():
    level_name = os.environ.get("MIXHYPO_LOG", "warn").lower()
    if level_name not in _LOG_LEVELS:
        raise ConfigError(f"MIXHYPO_LOG must be one of {sorted(_LOG_LEVELS)}, got {level_name!r}")
    logging.basicConfig(level=_LOG_LEVELS[level_name], stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


_COMMANDS = {"eval": cmd_eval, "sample": cmd_sample, "fit": cmd_fit, "check": cmd_check, "figures": cmd_figures}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        _setup_logging()
        overrides = _overrides(args)
        if args.command == "check" and "tolerances" in overrides and args.config:
            # merge per-key with tolerances from the file
            with open(args.config, encoding="utf-8") as fh:
                base = json.load(fh).get("tolerances", {})
            overrides["tolerances"] = {**base, **overrides["tolerances"]}
        cfg = load_config(args.config, overrides)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"mixhypo: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InsufficientData as exc:
        print(f"mixhypo: insufficient data: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except ConstructionError as exc:
        print(f"mixhypo: construction error: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except (MomentDoesNotExist, DomainError) as exc:
        print(f"mixhypo: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoConvergence as exc:
        print(f"mixhypo: no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except MixHypoError as exc:
        print(f"mixhypo: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except (OSError, json.JSONDecodeError) as exc:
        print(f"mixhypo: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

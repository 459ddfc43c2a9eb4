"""Batch command line: function values, transforms and diagnostic reports.

Exit codes: 0 pass, 1 fail, 4 inconclusive, 2 configuration or input
error, 3 numerical failure.  Files written under ``--out`` are the only
machine-readable output; stdout carries short log lines.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import errors
from .damek_ricci import DRParams, dr_density_asymptotics, dr_spherical_phi_grid, dr_to_jacobi
from .ineq import (
    ExponentPair,
    WeightFunction,
    bracket_symbol,
    check_dini,
    check_hausdorff_young,
    check_hyp,
    check_lipschitz_equivalence,
    check_spectral,
    dini_spectrum,
    empirical_multiplier_ratio,
    paley_constant,
    phi_estimate_suite,
    power_tail_spectrum,
)
from .quad import QuadratureSpec
from .report import DiagnosticReport, EXIT_CODES, FAIL, INCONCLUSIVE, PASS, _clean, verdict_from
from .specfun import JacobiParams, c_function, jacobi_phi_grid
from .transform import (
    default_corpus,
    default_plan,
    forward,
    inverse,
    plancherel_defect,
    read_radial_csv,
    read_spectral_csv,
    write_radial_csv,
    write_spectral_csv,
    _fmt,
)

log = logging.getLogger("jacobiharm")

EXIT_CONFIG, EXIT_NUMERIC = 2, 3
SUITES = ("plancherel", "hy", "paley", "hyp", "multiplier", "spectral", "lipschitz", "dini",
          "phi_estimates", "density_asymptotics")

DEFAULTS = {
    "params": {"jacobi": {"alpha": 1.0, "beta": 0.0}},
    "quadrature": {"panel_order": 16, "rel_tol": 1e-10, "abs_tol": 1e-30, "max_depth": 30},
    "grids": {
        "lambda": {"n": 1024, "lam_max": 60.0, "lam_switch": 1.0, "lam_min": 1e-3, "n_geometric": 128},
        "t": {"t_max": 10.0, "n": 201},
        "phi_lambda": [0.0, 0.5, 1.0, 5.0, 10.0],
        "phi_t": [0.0, 0.5, 1.0, 2.0, 4.0],
    },
    "corpus": ["gaussian", "gaussian_quadratic", "heat_0.25", "heat_1", "bump"],
    "C_global": 10.0,
    "checks": {
        "damek_ricci": {"m": 2, "l": 1},
        "plancherel": {"tol": 1e-5},
        "hy": {"p_values": [1.2, 1.5, 2.0]},
        "paley": {"p": 1.5},
        "hyp": {"p": 1.5, "b": None},
        "multiplier": {"p": 1.5, "q": 3.0, "gamma": 2.0},
        "spectral": {"p": 1.5, "q": 3.0, "phi": "exp"},
        "lipschitz": {"alpha": 0.5, "t_grid": [1e-3, 1e-1, 9], "r_grid": [10.0, 1e3, 9]},
        "dini": {"alpha": 0.5, "beta": 1.0, "mode": "kappa_measure", "r_grid": [10.0, 1e12, 23]},
        "phi_estimates": {"lambda": [0.05, 5.0, 60], "t": [0.05, 5.0, 60]},
        "density_asymptotics": {"lambda": [1e-3, 100.0, 101]},
    },
}


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration

def _merge(base, override, path=""):
    out = copy.deepcopy(base)
    for key, val in override.items():
        where = f"{path}{key}"
        if key not in base and path != "params.":
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(val, dict) and isinstance(base.get(key), dict) and where != "params":
            out[key] = _merge(base[key], val, where + ".")
        else:
            out[key] = copy.deepcopy(val)
    return out


def load_config(path=None) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            user = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config must be a JSON object")
        cfg = _merge(cfg, user)
    return cfg


def _log_grid(spec):
    lo, hi, n = spec
    return np.geomspace(float(lo), float(hi), int(n))


def _lin_grid(spec):
    lo, hi, n = spec
    return np.linspace(float(lo), float(hi), int(n))


class Run:
    """Validated view of a configuration with lazily built plan and corpus."""

    def __init__(self, cfg: dict):
        self.cfg = cfg
        params = cfg["params"]
        if not isinstance(params, dict) or len(params) != 1 or next(iter(params)) not in ("jacobi", "damek_ricci"):
            raise ConfigError("params needs exactly one of 'jacobi' or 'damek_ricci'")
        try:
            if "jacobi" in params:
                self.params = JacobiParams(float(params["jacobi"]["alpha"]), float(params["jacobi"]["beta"]))
                self.jacobi = self.params
            else:
                self.params = DRParams(int(params["damek_ricci"]["m"]), int(params["damek_ricci"]["l"]))
                self.jacobi = dr_to_jacobi(self.params)
            self.quad = QuadratureSpec(**cfg["quadrature"])
            self.dr = (self.params if isinstance(self.params, DRParams)
                       else DRParams(**cfg["checks"]["damek_ricci"]))
            self.C_global = float(cfg["C_global"])
            unknown = set(cfg["corpus"]) - set(DEFAULTS["corpus"])
            if unknown:
                raise ConfigError(f"unknown corpus members {sorted(unknown)}")
        except (KeyError, TypeError, errors.DomainError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc
        self._plan = None
        self._corpus = None

    @property
    def plan(self):
        if self._plan is None:
            grid_kw = dict(self.cfg["grids"]["lambda"])
            grid_kw.update({f"t_{k}": v for k, v in self.cfg["grids"]["t"].items()})
            try:
                self._plan = default_plan(self.jacobi, self.quad, **grid_kw)
            except (TypeError, errors.DomainError) as exc:
                raise ConfigError(f"invalid grids: {exc}") from exc
        return self._plan

    @property
    def corpus(self):
        if self._corpus is None:
            full = default_corpus(self.plan)
            self._corpus = {k: full[k] for k in self.cfg["corpus"]}
        return self._corpus


# ---------------------------------------------------------------------------
# suites

def _corpus_report(rows, bound, ok, notes, **details):
    """Combine per-function values ``rows = [(name, value)]`` into one report."""
    values = [v for _, v in rows]
    return DiagnosticReport(bound=bound, empirical=max(values), verdict=verdict_from(ok(values)),
                            samples=tuple(enumerate(values)), notes=notes,
                            details={"corpus": [n for n, _ in rows], **details})


def _paley_weight(alpha):
    return WeightFunction(lambda lam: np.maximum(lam, 1.0) ** -(2 * alpha + 3), True)


def suite_plancherel(run: Run, pool):
    tol = run.cfg["checks"]["plancherel"]["tol"]
    items = list(run.corpus.items())
    defects = list(pool.map(lambda kv: plancherel_defect(kv[1], run.plan), items))
    return _corpus_report(list(zip([k for k, _ in items], defects)), tol, lambda v: max(v) < tol,
                          "empirical: largest relative Plancherel defect over the corpus")


def suite_hy(run: Run, pool):
    ps = run.cfg["checks"]["hy"]["p_values"]
    jobs = [(name, f, p) for name, f in run.corpus.items() for p in ps]
    ratios = list(pool.map(lambda j: check_hausdorff_young(j[1], j[2], run.plan).ratio, jobs))
    return _corpus_report([(f"{n}@p={p}", r) for (n, _, p), r in zip(jobs, ratios)], 1.0,
                          lambda v: max(v) <= 1 + 1e-6,
                          "empirical: largest ||F||_{p'}/||f||_p; samples: (job index, ratio)", p_values=ps)


def _weighted_suite(run: Run, pool, b_of_p, name):
    p = run.cfg["checks"][name]["p"]
    psi = _paley_weight(run.jacobi.alpha)
    M = paley_constant(psi, run.jacobi)
    b = b_of_p(p)
    items = list(run.corpus.items())
    reps = list(pool.map(lambda kv: check_hyp(kv[1], psi, p, b, run.plan, M=M, C_global=run.C_global), items))
    return _corpus_report([(k, r.ratio) for (k, _), r in zip(items, reps)], run.C_global,
                          lambda v: max(v) <= run.C_global,
                          "empirical: largest LHS/RHS ratio; bound: C_global", p=p, b=b, M_psi=M)


def suite_paley(run: Run, pool):
    return _weighted_suite(run, pool, lambda p: p, "paley")


def suite_hyp(run: Run, pool):
    b = run.cfg["checks"]["hyp"]["b"]
    return _weighted_suite(run, pool, lambda p: (p + p / (p - 1)) / 2 if b is None else b, "hyp")


def suite_multiplier(run: Run, pool):
    c = run.cfg["checks"]["multiplier"]
    pq = ExponentPair(c["p"], c["q"])
    h = bracket_symbol(run.jacobi.rho, c["gamma"])
    return empirical_multiplier_ratio(h, pq, run.corpus, run.plan, C_global=run.C_global)


def suite_spectral(run: Run, pool):
    c = run.cfg["checks"]["spectral"]
    rho2 = run.jacobi.rho ** 2
    phis = {"exp": lambda u: np.exp(-u), "power": lambda u: (u - rho2 + 1) ** -2.0}
    if c["phi"] not in phis:
        raise ConfigError(f"spectral phi must be one of {sorted(phis)}")
    return check_spectral(phis[c["phi"]], ExponentPair(c["p"], c["q"]), run.jacobi)


def suite_lipschitz(run: Run, pool):
    c = run.cfg["checks"]["lipschitz"]
    F = power_tail_spectrum(c["alpha"], run.dr)
    return check_lipschitz_equivalence(F, c["alpha"], run.dr, _log_grid(c["t_grid"]), _log_grid(c["r_grid"]))


def suite_dini(run: Run, pool):
    c = run.cfg["checks"]["dini"]
    F = dini_spectrum(c["alpha"], c["beta"], run.dr)
    return check_dini(F, c["alpha"], c["beta"], run.dr, _log_grid(c["r_grid"]), c["mode"])


def suite_phi_estimates(run: Run, pool):
    c = run.cfg["checks"]["phi_estimates"]
    return phi_estimate_suite(run.dr, _lin_grid(c["lambda"]), _lin_grid(c["t"]))


def suite_density_asymptotics(run: Run, pool):
    return dr_density_asymptotics(run.dr, _log_grid(run.cfg["checks"]["density_asymptotics"]["lambda"]))


SUITE_FUNCS = {name: globals()[f"suite_{name}"] for name in SUITES}


# ---------------------------------------------------------------------------
# commands

def _floats(text, fallback):
    if text is None:
        return np.asarray(fallback, dtype=float)
    try:
        return np.array([float(x) for x in text.split(",") if x.strip()], dtype=float)
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc


def cmd_phi(run: Run, args, out: Path) -> int:
    lam = _floats(args.lam, run.cfg["grids"]["phi_lambda"])
    t = _floats(args.t, run.cfg["grids"]["phi_t"])
    if isinstance(run.params, DRParams):
        vals = dr_spherical_phi_grid(run.params, lam, t)
    else:
        vals = jacobi_phi_grid(run.params, lam, t)
    path = out / "phi.csv"
    with open(path, "w", newline="") as fh:
        fh.write("lambda,t,phi\n")
        for i, li in enumerate(lam):
            for j, tj in enumerate(t):
                fh.write(f"{_fmt(li)},{_fmt(tj)},{_fmt(np.real(vals[i, j]))}\n")
    log.info("wrote %s", path)
    return 0


def cmd_cfun(run: Run, args, out: Path) -> int:
    lam = _floats(args.lam, run.cfg["grids"]["phi_lambda"])
    lam = lam[lam != 0]
    # Damek-Ricci normalization evaluates the Jacobi c-function at 2 lambda
    scale = 2.0 if isinstance(run.params, DRParams) else 1.0
    vals = np.atleast_1d(c_function(run.jacobi, scale * lam))
    path = out / "cfun.csv"
    with open(path, "w", newline="") as fh:
        fh.write("lambda,re,im\n")
        for li, v in zip(lam, vals):
            fh.write(f"{_fmt(li)},{_fmt(v.real)},{_fmt(v.imag)}\n")
    log.info("wrote %s", path)
    return 0


def _read_input(reader, path):
    try:
        return reader(path)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def cmd_transform(run: Run, args, out: Path) -> int:
    f = _read_input(read_radial_csv, args.input)
    path = out / "transform.csv"
    write_spectral_csv(path, forward(f, run.plan))
    log.info("wrote %s", path)
    return 0


def cmd_inverse(run: Run, args, out: Path) -> int:
    F = _read_input(read_spectral_csv, args.input)
    path = out / "inverse.csv"
    write_radial_csv(path, inverse(F, run.plan))
    log.info("wrote %s", path)
    return 0


def _run_suite(run: Run, name: str, pool) -> DiagnosticReport:
    try:
        return SUITE_FUNCS[name](run, pool)
    except errors.InfiniteBound as exc:
        return DiagnosticReport(bound=math.inf, empirical=math.nan, verdict=INCONCLUSIVE, notes=str(exc))


def cmd_check(run: Run, args, out: Path) -> int:
    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        rep = _run_suite(run, args.suite, pool)
    path = out / f"check_{args.suite}.json"
    path.write_text(rep.to_json())
    log.info("%s: %s (ratio %s) -> %s", args.suite, rep.verdict, rep.ratio, path)
    return rep.exit_code


def _worst(verdicts):
    if FAIL in verdicts:
        return FAIL
    if INCONCLUSIVE in verdicts:
        return INCONCLUSIVE
    return PASS


def cmd_report_all(run: Run, args, out: Path) -> int:
    # suites run one after another; each may use the pool internally
    reports = {}
    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        for name in SUITES:
            reports[name] = _run_suite(run, name, pool)
            (out / f"check_{name}.json").write_text(reports[name].to_json())
            log.info("%s: %s", name, reports[name].verdict)
    summary = {name: {"verdict": r.verdict, "ratio": r.ratio} for name, r in reports.items()}
    overall = _worst([r.verdict for r in reports.values()])
    text = json.dumps(_clean({"overall": overall, "suites": summary}), indent=2, allow_nan=False)
    (out / "summary.json").write_text(text + "\n")
    return EXIT_CODES[overall]


COMMANDS = {"phi": cmd_phi, "cfun": cmd_cfun, "transform": cmd_transform, "inverse": cmd_inverse,
            "check": cmd_check, "report-all": cmd_report_all}


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON config file")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker cap")
    common.add_argument("--show-defaults", action="store_true", default=argparse.SUPPRESS,
                        help="print the embedded default config and exit")
    parser = argparse.ArgumentParser(prog="jacobiharm", parents=[common],
                                     description="Jacobi and Damek-Ricci harmonic analysis diagnostics")
    sub = parser.add_subparsers(dest="command")
    for name in ("phi", "cfun"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--lambda", dest="lam", help="comma-separated lambda values")
        if name == "phi":
            sp.add_argument("--t", help="comma-separated t values")
    for name in ("transform", "inverse"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("input", help="input CSV")
    sp = sub.add_parser("check", parents=[common])
    sp.add_argument("suite", choices=SUITES)
    sub.add_parser("report-all", parents=[common])
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stdout)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    for key, default in (("config", None), ("out", "jacobiharm_out"), ("threads", 1), ("show_defaults", False)):
        if not hasattr(args, key):
            setattr(args, key, default)
    if args.show_defaults:
        sys.stdout.write(json.dumps(DEFAULTS, indent=2) + "\n")
        return 0
    if args.command is None:
        parser.print_usage()
        return EXIT_CONFIG
    if args.threads < 1:
        log.error("--threads must be at least 1")
        return EXIT_CONFIG
    try:
        run = Run(load_config(args.config))
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](run, args, out)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except (ArithmeticError, errors.DomainError, errors.PoleError, errors.NotMonotone,
            errors.EnvelopeViolation) as exc:
        log.error("numeric failure: %s: %s", type(exc).__name__, exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

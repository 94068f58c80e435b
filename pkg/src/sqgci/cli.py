"""Command line interface: ``run``, ``verify``, ``scale-study`` and ``export``.

Configuration files are INI files with the sections ``[scheme]``, ``[run]``,
``[tolerances]`` and ``[scaling]``; unknown sections or keys are errors.

Exit codes: 0 all checks pass, 2 a check failed, 3 configuration error
(including an inadmissible lambda), 4 numerical budget exceeded, 5 output
not writable.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .geometry import PositivityViolation
from .scheme.advance import MeanCheckError
from .scheme.constants import QuadratureError
from .scheme.increment import BallViolation
from .scheme.params import DEFAULT_TOLERANCES, BudgetError, ConfigError, SchemeParams
from .spectral.dump import write_field
from .spectral.products import AliasError

log = logging.getLogger("sqgci")

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_BUDGET, EXIT_IO = 0, 2, 3, 4, 5

_SCHEME_KEYS = {
    "gamma": float, "amplitude_A": float, "eps_gamma": float, "lambda_policy": str,
    "grid_factor": int, "max_grid": int, "positivity_floor": float,
}
_RUN_KEYS = {
    "q_max": int, "outputs": str, "strict": bool, "emit_fields": bool, "emit_spectra": bool,
    "emit_report": bool, "emit_scaling_csv": bool, "weak_tests": int, "seed": int,
}
_SCALING_KEYS = {"lambdas": str, "quantities": str}


@dataclass
class RunConfig:
    params: SchemeParams = field(default_factory=SchemeParams)
    q_max: int = 0
    outputs: str = "out"
    strict: bool = False
    emit_fields: bool = False
    emit_spectra: bool = False
    emit_report: bool = True
    emit_scaling_csv: bool = False
    weak_tests: int = 100
    seed: int = 0
    scaling_lambdas: tuple = (64, 256, 1024)
    scaling_quantities: tuple = ()

    def __post_init__(self):
        if self.q_max < 0:
            raise ConfigError("q_max must be non-negative")
        if self.weak_tests < 1:
            raise ConfigError("weak_tests must be positive")


def _parse_list(raw: str, conv):
    return tuple(conv(x.strip()) for x in raw.replace(";", ",").split(",") if x.strip())


def _read_section(cp, name: str, keys: dict) -> dict:
    if not cp.has_section(name):
        return {}
    out = {}
    for key, raw in cp.items(name):
        if key not in keys:
            raise ConfigError(f"unknown key {key!r} in section [{name}]")
        conv = keys[key]
        try:
            out[key] = cp.getboolean(name, key) if conv is bool else conv(raw)
        except ValueError as e:
            raise ConfigError(f"[{name}] {key} = {raw!r}: {e}") from None
    return out


def parse_config(text: str) -> RunConfig:
    """Parse a configuration file; every problem raises :class:`ConfigError`."""
    cp = configparser.ConfigParser(interpolation=None, strict=True)
    cp.optionxform = str  # keys are case sensitive
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(str(e)) from None
    unknown = set(cp.sections()) - {"scheme", "run", "tolerances", "scaling"}
    if unknown:
        raise ConfigError(f"unknown sections {sorted(unknown)}")
    scheme = _read_section(cp, "scheme", _SCHEME_KEYS)
    tol = _read_section(cp, "tolerances", {k: float for k in DEFAULT_TOLERANCES})
    run = _read_section(cp, "run", _RUN_KEYS)
    scaling = _read_section(cp, "scaling", _SCALING_KEYS)
    if "lambda_policy" in scheme:
        pol = scheme["lambda_policy"].strip()
        if pol != "auto":
            try:
                scheme["lambda_policy"] = _parse_list(pol, int)
            except ValueError:
                raise ConfigError(f"lambda_policy must be 'auto' or a list of integers, got {pol!r}") from None
    params = SchemeParams(**scheme, tolerances=tol)
    extra = {}
    if "lambdas" in scaling:
        try:
            extra["scaling_lambdas"] = _parse_list(scaling["lambdas"], int)
        except ValueError:
            raise ConfigError(f"scaling lambdas must be integers, got {scaling['lambdas']!r}") from None
    if "quantities" in scaling and scaling["quantities"].strip() != "all":
        extra["scaling_quantities"] = _parse_list(scaling["quantities"], str)
    if isinstance(params.lambda_policy, tuple) and len(params.lambda_policy) < run.get("q_max", 0):
        raise ConfigError(f"lambda_policy lists {len(params.lambda_policy)} values for q_max = {run['q_max']}")
    return RunConfig(params=params, **run, **extra)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    return parse_config(text)


# artifacts -----------------------------------------------------------------

def _ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def radial_spectrum(f) -> np.ndarray:
    """``E(r) = sum |c_j|^2`` over ``round(|j|) = r`` summed over components."""
    comps = getattr(f, "components", (f,))
    n = comps[0].n
    k = comps[0].grid.freqs
    r = np.rint(np.hypot(k[:, None], k[None, :])).astype(np.int64)
    e = np.zeros(int(r.max()) + 1)
    for c in comps:
        np.add.at(e, r.ravel(), np.abs(c.on_grid(n).coeffs.ravel()) ** 2)
    return e


def write_spectra(tr, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["q", "field", "radius", "energy"])
        for s in tr.states:
            for name, f in (("v", s.v), ("u", s.u), ("R", s.R)):
                e = radial_spectrum(f)
                for r in np.nonzero(e)[0]:
                    w.writerow([s.q, name, int(r), repr(float(e[r]))])


def write_fields(tr, outdir) -> list:
    outdir = _ensure_dir(outdir)
    paths = []
    for s in tr.states:
        for name, f in (("u", s.u), ("v", s.v), ("p", s.p), ("R", s.R)):
            p = outdir / f"q{s.q}_{name}.sqgf"
            write_field(p, f)
            paths.append(p)
    return paths


def _write_report(rep, path):
    Path(path).write_text(rep.dumps())
    log.info("report written to %s", path)


def _summarise(rep) -> int:
    if rep.passed:
        log.info("all checks passed")
        return EXIT_OK
    log.warning("%d checks failed: %s", len(rep.failures), ", ".join(rep.failures))
    return EXIT_CHECK


# verbs ---------------------------------------------------------------------

def cmd_run(args) -> int:
    from .verification.items import check_items
    from .verification.trace import run_trace, save_trace
    cfg = load_config(args.config)
    if args.q_max is not None:
        cfg.q_max = args.q_max
    if args.out is not None:
        cfg.outputs = args.out
    strict = cfg.strict or args.strict
    out = _ensure_dir(cfg.outputs)
    log.info("running %d steps with lambda policy %s", cfg.q_max, cfg.params.lambda_policy)
    tr = run_trace(cfg.params, cfg.q_max)
    save_trace(tr, out / "trace")
    rep = check_items(tr, strict=strict, n_tests=cfg.weak_tests, seed=cfg.seed)
    if cfg.emit_report:
        _write_report(rep, out / "report.json")
    if cfg.emit_fields:
        write_fields(tr, out / "fields")
    if cfg.emit_spectra:
        write_spectra(tr, out / "spectra.csv")
    code = _summarise(rep)
    if cfg.emit_scaling_csv:
        code = max(code, _scaling(cfg, out))
    return code


def cmd_verify(args) -> int:
    from .verification.items import check_items
    from .verification.trace import load_trace
    try:
        tr = load_trace(args.trace)
    except (OSError, KeyError, ValueError) as e:
        raise ConfigError(f"cannot load trace {args.trace}: {e}") from None
    rep = check_items(tr, strict=args.strict, n_tests=args.weak_tests, seed=args.seed)
    out = Path(args.out) if args.out else Path(str(args.trace) + ".report.json")
    _ensure_dir(out.parent)
    _write_report(rep, out)
    return _summarise(rep)


def _scaling(cfg: RunConfig, out: Path) -> int:
    from .verification.scaling import ALL_QUANTITIES, ScalingStudySpec, scaling_study, write_csv
    spec = ScalingStudySpec(cfg.scaling_lambdas, cfg.scaling_quantities or ALL_QUANTITIES)
    res = scaling_study(spec, cfg.params, progress=lambda lam, m: log.info("lambda %d done", lam))
    write_csv(res, out / "scaling_values.csv", out / "scaling_fits.csv")
    for q in spec.quantities:
        ok, desc = res.checks[q]
        log.info("%-18s slope %-12.6g %s%s", q, res.fits[q].slope, desc,
                 "" if ok is None else ("  ok" if ok else "  FAIL"))
    return EXIT_OK if res.passed else EXIT_CHECK


def cmd_scale_study(args) -> int:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.lambdas:
        cfg.scaling_lambdas = _parse_list(args.lambdas, int)
    if args.quantities:
        cfg.scaling_quantities = _parse_list(args.quantities, str)
    out = _ensure_dir(args.out or cfg.outputs)
    return _scaling(cfg, out)


def cmd_export(args) -> int:
    from .verification.trace import load_trace
    try:
        tr = load_trace(args.trace)
    except (OSError, KeyError, ValueError) as e:
        raise ConfigError(f"cannot load trace {args.trace}: {e}") from None
    out = _ensure_dir(args.out)
    if args.what in ("fields", "all"):
        write_fields(tr, out / "fields")
    if args.what in ("spectra", "all"):
        write_spectra(tr, out / "spectra.csv")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors, keeping exit code 2 for failed checks."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sqgci", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="build the iterates, check them and write a report")
    p.add_argument("config", help="INI configuration file")
    p.add_argument("--out", help="output directory (overrides [run] outputs)")
    p.add_argument("--q-max", type=int, help="number of steps (overrides [run] q_max)")
    p.add_argument("--strict", action="store_true", help="check the verbatim inductive thresholds")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="re-check a saved trace")
    p.add_argument("trace", help="trace stem (without .npz/.json)")
    p.add_argument("--out", help="report path (default: <trace>.report.json)")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--weak-tests", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scale-study", help="sweep single steps over lambda and fit log-log slopes")
    p.add_argument("config", nargs="?", help="INI configuration file")
    p.add_argument("--lambdas", help="comma separated lambdas (overrides [scaling] lambdas)")
    p.add_argument("--quantities", help="comma separated quantity names")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_scale_study)

    p = sub.add_parser("export", help="dump grid fields and spectra of a saved trace")
    p.add_argument("trace", help="trace stem (without .npz/.json)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--what", choices=("fields", "spectra", "all"), default="all")
    p.set_defaults(func=cmd_export)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (ConfigError, BallViolation, PositivityViolation) as e:
        log.error("configuration error: %s", e)
        return EXIT_CONFIG
    except (BudgetError, AliasError, QuadratureError) as e:
        log.error("numerical budget exceeded: %s", e)
        return EXIT_BUDGET
    except MeanCheckError as e:
        log.error("check failed during assembly: %s", e)
        return EXIT_CHECK
    except OSError as e:
        log.error("cannot write output: %s", e)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end and the config-driven run/emit pipeline.

Subcommands::

    momentgrowth analyze --config run.json [--out DIR] [--format json ...]
    momentgrowth growth --family power --param alpha=2 --scale order
    momentgrowth eval --family power --param alpha=2 --z 1,0 --n 10
    momentgrowth check --suite identities

``MOMENTGROWTH_PRECISION`` and ``MOMENTGROWTH_THREADS`` override the
precision and the worker count of a run.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .errors import ConfigurationError, HypothesisError, InsufficientDataError, MomentGrowthError
from .sequences import CoeffSpec, available_terms, classify_shape, spec_convergence_exponent
from .xreal import XReal

log = logging.getLogger("momentgrowth")

SCHEMA = 1
ANALYSES = ("classify", "indeterminacy", "summability", "growth", "entire", "bounds", "appendix_checks")
FORMATS = ("json", "csv-curves", "text-summary")
ENV_PRECISION = "MOMENTGROWTH_PRECISION"
ENV_THREADS = "MOMENTGROWTH_THREADS"
DEFAULT_RADII = tuple(f"log2:{k}" for k in range(0, 41, 4))
_TRANSFORM = {"order": "raw", "log": "log", "dlog": "loglog"}
_LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# radii


def parse_radius(text) -> float:
    """Natural log of a radius given as decimal, ``log2:<x>`` or ``loglog:<t>``.

    ``loglog:t`` means ``r = exp(exp(t))``.  Zero maps to ``-inf``.
    """
    if isinstance(text, (int, float)):
        text = repr(float(text))
    s = str(text).strip()
    try:
        if s.startswith("log2:"):
            return float(s[5:]) * _LN2
        if s.startswith("loglog:"):
            return math.exp(float(s[7:]))
        r = XReal(s)
    except (ValueError, OverflowError) as exc:
        raise ConfigurationError(f"bad radius {text!r}") from exc
    if r.sign < 0:
        raise ConfigurationError(f"radius must be >= 0, got {text!r}")
    return -math.inf if r.is_zero() else r.ln_float()


def radius_text(log_r: float) -> str:
    return f"log2:{log_r / _LN2:.12g}"


# ---------------------------------------------------------------------------
# config


@dataclass(frozen=True)
class RunConfig:
    spec: CoeffSpec
    precision_bits: int = 128
    depth: int = 200
    analyses: dict = field(default_factory=dict)
    radii: tuple[str, ...] = DEFAULT_RADII
    z_grid: tuple[complex, ...] = (1 + 0j,)
    out_dir: str = "momentgrowth-out"
    formats: tuple[str, ...] = FORMATS
    threads: int = 1

    @classmethod
    def from_dict(cls, data: dict, env=None) -> "RunConfig":
        env = os.environ if env is None else env
        if not isinstance(data, dict):
            raise ConfigurationError("config must be a JSON object")
        if data.get("schema") != SCHEMA:
            raise ConfigurationError(f"unsupported config schema {data.get('schema')!r}; expected {SCHEMA}")
        spec = CoeffSpec.from_dict(data.get("spec"))
        raw = data.get("analyses", {})
        if isinstance(raw, list):
            raw = {name: {} for name in raw}
        if not isinstance(raw, dict):
            raise ConfigurationError("analyses must be a list of names or an object")
        unknown = sorted(set(raw) - set(ANALYSES))
        if unknown:
            raise ConfigurationError(f"unknown analyses: {unknown}")
        prec = int(env.get(ENV_PRECISION, data.get("precision_bits", 128)))
        if prec < 64:
            raise ConfigurationError("precision_bits must be >= 64")
        depth = int(data.get("depth", 200))
        if depth < 1:
            raise ConfigurationError("depth must be >= 1")
        grids = data.get("grids", {})
        radii = tuple(str(r) for r in grids.get("radii", DEFAULT_RADII))
        for r in radii:
            parse_radius(r)
        z_grid = tuple(_parse_z(z) for z in grids.get("z", ["1,0"]))
        out = data.get("output", {})
        formats = tuple(out.get("formats", FORMATS))
        bad = sorted(set(formats) - set(FORMATS))
        if bad:
            raise ConfigurationError(f"unknown output formats: {bad}")
        threads = int(env.get(ENV_THREADS, data.get("threads", 1)))
        return cls(spec, prec, depth, {k: dict(v or {}) for k, v in raw.items()}, radii, z_grid,
                   str(out.get("dir", "momentgrowth-out")), formats, max(1, threads))

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "spec": self.spec.to_dict(),
            "precision_bits": self.precision_bits,
            "depth": self.depth,
            "analyses": {k: self.analyses[k] for k in ANALYSES if k in self.analyses},
            "grids": {"radii": list(self.radii), "z": [f"{z.real!r},{z.imag!r}" for z in self.z_grid]},
            "output": {"dir": self.out_dir, "formats": list(self.formats)},
            "threads": self.threads,
        }


def _parse_z(text) -> complex:
    if isinstance(text, (int, float, complex)):
        return complex(text)
    parts = str(text).split(",")
    try:
        if len(parts) == 1:
            return complex(parts[0].replace("i", "j"))
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ConfigurationError(f"bad z value {text!r}; expected '<re>,<im>'")


def load_config(path, env=None) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    return RunConfig.from_dict(data, env)


# ---------------------------------------------------------------------------
# report


@dataclass
class Finding:
    level: str  # PASS, FLAGGED or ERROR
    analysis: str
    message: str

    def to_dict(self) -> dict:
        return {"level": self.level, "analysis": self.analysis, "message": self.message}


@dataclass
class Report:
    config: RunConfig
    results: dict = field(default_factory=dict)
    findings: list[Finding] = field(default_factory=list)
    curves: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    version: str = __version__

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.level == "ERROR"]

    @property
    def warnings(self) -> list[str]:
        return [f"{f.analysis}: {f.message}" for f in self.findings if f.level == "FLAGGED"]

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "version": self.version,
            "config": self.config.to_dict(),
            "results": self.results,
            "findings": [f.to_dict() for f in self.findings],
            "warnings": self.warnings,
        }
        if timing:
            out["timing"] = self.timing
        return out


def _estimate_warnings(obj, path: str = "") -> list[str]:
    """Paths of low-confidence estimates inside a result tree."""
    found = []
    if isinstance(obj, dict):
        if obj.get("confidence") == "low" and "window_max" in obj:
            found.append(path or "estimate")
        for k, v in obj.items():
            found.extend(_estimate_warnings(v, f"{path}.{k}" if path else str(k)))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            found.extend(_estimate_warnings(v, f"{path}[{i}]"))
    return found


def _clean(v):
    """JSON-safe copy: non-finite floats become strings, XReal uses its record."""
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, XReal):
        return v.to_record()
    if hasattr(v, "item") and not isinstance(v, (str, bytes)):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return v


# ---------------------------------------------------------------------------
# analyses


def _pmap(fn, items, threads: int):
    # results come back in input order whatever the worker count
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _run_classify(cfg: RunConfig, opts: dict, report: Report) -> dict:
    return classify_shape(cfg.spec, int(opts.get("window", 10_000))).to_dict()


def _run_indeterminacy(cfg: RunConfig, opts: dict, report: Report) -> dict:
    from .nevanlinna import indeterminacy

    v = indeterminacy(cfg.spec, int(opts.get("N", 1000)), cfg.precision_bits)
    report.findings.append(Finding("PASS", "indeterminacy", v.verdict))
    return v.to_dict()


def _run_summability(cfg: RunConfig, opts: dict, report: Report) -> dict:
    from .nevanlinna import summability

    alphas = [float(a) for a in opts.get("alphas", [0.6])]
    N = int(opts.get("N", 4000))
    out = {}
    for a in alphas:
        for z in cfg.z_grid:
            rep = summability(cfg.spec, a, z, N, prec=cfg.precision_bits)
            out[f"alpha={a:g} z={z.real:g},{z.imag:g}"] = rep.to_dict()
            if not rep.bound_ok:
                report.findings.append(Finding("ERROR", "summability", f"growth bound violated at alpha={a:g}"))
            else:
                report.findings.append(Finding("PASS", "summability", f"alpha={a:g}: {rep.verdict}"))
    return out


def _product_curve(spec: CoeffSpec, cfg: RunConfig) -> list[list]:
    from .growth.products import counting_sandwich, spec_zero_logs

    lu = spec_zero_logs(spec, min(1_000_000, available_terms(spec)))

    def row(text):
        L = parse_radius(text)
        if L == -math.inf:
            return [text, "0", 0, "0", "0"]
        c = counting_sandwich(log_u=lu, r=str(text))
        return [radius_text(L), c.logM.to_text(), c.n_r, c.N_r.to_text(), c.Q_r.to_text()]

    return _pmap(row, cfg.radii, cfg.threads)


def _run_growth(cfg: RunConfig, opts: dict, report: Report) -> dict:
    from .entirefns import governing_scale, product_maxmod_samples
    from .growth.estimate import scale_from_maxmod

    scales = opts.get("scales") or [governing_scale(cfg.spec)]
    out = {}
    for scale in scales:
        if scale not in _TRANSFORM:
            raise ConfigurationError(f"unknown scale {scale!r}")
        entry = {}
        e = spec_convergence_exponent(cfg.spec, _TRANSFORM[scale], min(100_000, available_terms(cfg.spec)))
        entry["conv_exponent"] = e.to_dict()
        try:
            entry["product_maxmod"] = scale_from_maxmod(product_maxmod_samples(cfg.spec, scale), scale).to_dict()
        except InsufficientDataError as exc:
            report.findings.append(Finding("FLAGGED", "growth", f"{scale}: {exc}"))
        out[scale] = entry
    report.curves["product"] = [["r", "logM", "n_r", "N_r", "Q_r"]] + _product_curve(cfg.spec, cfg)
    return out


def _run_entire(cfg: RunConfig, opts: dict, report: Report) -> dict:
    from .entirefns import NAMES, _build, _Inputs, compare_growth

    names = tuple(opts.get("names", ("Phi", "F", "L", "H", "G")))
    bad = sorted(set(names) - set(NAMES))
    if bad:
        raise ConfigurationError(f"unknown function names: {bad}")
    N = int(opts.get("N", cfg.depth))
    table = compare_growth(cfg.spec, N, opts.get("scale"), cfg.precision_bits, names=names)
    inp = _Inputs(cfg.spec, N, cfg.precision_bits)
    logs = [parse_radius(r) for r in cfg.radii]
    for name in names:
        fn = _build(inp, name)
        report.curves[name] = [["r", "logM"]] + [
            [radius_text(L), repr(fn.log_maxmod(L))] if L > -math.inf else ["0", "0"] for L in logs
        ]
    level = "PASS" if table.chain_ok and table.ordering_ok else "FLAGGED"
    report.findings.append(Finding(level, "entire", f"chain_ok={table.chain_ok} ordering_ok={table.ordering_ok}"))
    return table.to_dict()


def _run_bounds(cfg: RunConfig, opts: dict, report: Report) -> dict:
    from .entirefns import s2n_upper
    from .nevanlinna import berezanskii_bounds

    out = {}
    try:
        z = cfg.z_grid[0] if cfg.z_grid else complex(1, 1)
        ber = berezanskii_bounds(cfg.spec, z, int(opts.get("N", 2000)), cfg.precision_bits)
        out["berezanskii"] = ber.to_dict()
        report.findings.append(Finding("PASS" if ber.ok else "FLAGGED", "bounds", f"berezanskii fit ok={ber.ok}"))
    except HypothesisError as exc:
        report.findings.append(Finding("FLAGGED", "bounds", str(exc)))
    try:
        out["s2n_upper"] = s2n_upper(cfg.spec, int(opts.get("moments_N", 40)), cfg.precision_bits).to_dict()
    except HypothesisError as exc:
        report.findings.append(Finding("FLAGGED", "bounds", str(exc)))
    return out


def _run_appendix(cfg: RunConfig, opts: dict, report: Report) -> dict:
    from .checks import run_suite

    results = run_suite("appendix")
    for r in results:
        report.findings.append(Finding("PASS" if r.passed else "ERROR", "appendix_checks", r.line()))
    out = {}
    for r in results:
        d = r.to_dict()
        # wall time belongs to the timing block, not the reproducible results
        report.timing[f"check_{r.number}"] = d.pop("seconds")
        out[str(r.number)] = d
    return out


_RUNNERS = {
    "classify": _run_classify,
    "indeterminacy": _run_indeterminacy,
    "summability": _run_summability,
    "growth": _run_growth,
    "entire": _run_entire,
    "bounds": _run_bounds,
    "appendix_checks": _run_appendix,
}


def run(cfg: RunConfig) -> Report:
    """Execute the requested analyses in a fixed order; failures stay per-analysis."""
    report = Report(cfg)
    for name in ANALYSES:
        if name not in cfg.analyses:
            continue
        t0 = time.perf_counter()
        try:
            result = _RUNNERS[name](cfg, cfg.analyses[name], report)
            report.results[name] = _clean(result)
            for path in _estimate_warnings(report.results[name]):
                report.findings.append(Finding("FLAGGED", name, f"low confidence: {path}"))
        except InsufficientDataError as exc:
            report.findings.append(Finding("FLAGGED", name, f"insufficient data: {exc}"))
        except ConfigurationError:
            raise
        except MomentGrowthError as exc:
            report.findings.append(Finding("ERROR", name, f"{type(exc).__name__}: {exc}"))
        report.timing[name] = round(time.perf_counter() - t0, 3)
    return report


def emit(report: Report, formats=None, out_dir=None) -> list[Path]:
    """Write the report in the requested formats; returns the written paths."""
    formats = tuple(formats or report.config.formats)
    out = Path(out_dir or report.config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        p = out / "report.json"
        p.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
        written.append(p)
    if "csv-curves" in formats:
        for name in sorted(report.curves):
            p = out / f"curve_{name}.csv"
            with p.open("w", newline="") as fh:
                csv.writer(fh).writerows(report.curves[name])
            written.append(p)
    if "text-summary" in formats:
        p = out / "summary.txt"
        p.write_text(text_summary(report))
        written.append(p)
    return written


def text_summary(report: Report) -> str:
    lines = [f"momentgrowth {report.version} {report.config.spec.label()}"]
    order = {name: i for i, name in enumerate(ANALYSES)}
    for f in sorted(report.findings, key=lambda f: (order.get(f.analysis, 99), f.level, f.message)):
        lines.append(f"{f.level:<8} {f.analysis}: {f.message}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing


def _spec_from_args(args) -> CoeffSpec:
    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise ConfigurationError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        params[k.strip()] = v.strip()
    return CoeffSpec.from_dict({"family": args.family, "params": params, "offset": args.offset})


def _precision(args) -> int:
    if args.prec is not None:
        return args.prec
    return int(os.environ.get(ENV_PRECISION, 128))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="momentgrowth", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the analyses listed in a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output directory (overrides the config)")
    p.add_argument("--format", action="append", choices=FORMATS, help="repeatable; default from config")

    def family_args(q):
        q.add_argument("--family", required=True)
        q.add_argument("--param", action="append", metavar="KEY=VALUE")
        q.add_argument("--offset", type=int, default=0)
        q.add_argument("--prec", type=int, default=None)

    p = sub.add_parser("growth", help="growth estimates at one scale")
    family_args(p)
    p.add_argument("--scale", choices=tuple(_TRANSFORM), default=None)
    p.add_argument("--depth", type=int, default=200)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("eval", help="P_n(z) and Q_n(z) as CSV")
    family_args(p)
    p.add_argument("--z", required=True, help="<re>,<im>")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("check", help="run an acceptance suite")
    p.add_argument("--suite", required=True, choices=("paper-examples", "identities", "appendix", "all"))
    p.add_argument("--json", action="store_true")
    return parser


def _cmd_analyze(args) -> int:
    cfg = load_config(args.config)
    report = run(cfg)
    for path in emit(report, args.format, args.out):
        print(path)
    sys.stdout.write(text_summary(report))
    return 1 if report.errors else 0


def _cmd_growth(args) -> int:
    from .entirefns import compare_growth

    spec = _spec_from_args(args)
    table = compare_growth(spec, args.depth, args.scale, _precision(args))
    if args.json:
        print(json.dumps(_clean(table.to_dict()), indent=2, sort_keys=True))
        return 0
    print(f"{spec.label()} scale={table.scale}")
    for name, rep in table.rows.items():
        print(f"  {name:<4} {rep.rho.value:.4f}  [{rep.method}, {rep.rho.confidence}]")
    print(f"  spread={table.spread:.4f} chain_ok={table.chain_ok} ordering_ok={table.ordering_ok}")
    return 0


def _cmd_eval(args) -> int:
    from .polys import eval_pq

    spec = _spec_from_args(args)
    pair = eval_pq(spec, _parse_z(args.z), args.n, _precision(args))
    csv.writer(sys.stdout).writerows(pair.csv_rows())
    return 0


def _cmd_check(args) -> int:
    from .checks import run_suite

    results = run_suite(args.suite)
    if args.json:
        print(json.dumps([r.to_dict() for r in results], indent=2, sort_keys=True))
    else:
        for r in results:
            print(f"{r.line()}  ({r.seconds:.1f} s)")
    return 0 if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handler = {"analyze": _cmd_analyze, "growth": _cmd_growth, "eval": _cmd_eval, "check": _cmd_check}[args.command]
    try:
        return handler(args)
    except ConfigurationError as exc:
        log.error("configuration error: %s", exc)
        return 2
    except MomentGrowthError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: fourier-gap {bounds,optimize,dual,primes,explicit,audit}."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import bounds as bnd
from . import dual, explicit, primes
from .core import DomainError, Mode
from .families import REFERENCE_MIXTURE, h_kernel, parse_mixture
from .quadrature import DEFAULT_SPEC, QuadratureError, QuadratureSpec

log = logging.getLogger("fourier_gap")

EXIT_OK, EXIT_ERROR, EXIT_ASSERT = 0, 1, 2


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    subcommand: str
    output_format: str = "json"
    output_path: str | None = None
    tol: float | None = None
    zeros_path: str | None = None
    seed: int = 0
    threads: int = 1
    svg: bool = False
    options: dict = field(default_factory=dict)

    def quad_spec(self) -> QuadratureSpec:
        if self.tol is None:
            return DEFAULT_SPEC
        return QuadratureSpec(abs_tol=self.tol, rel_tol=self.tol)


@dataclass
class Outcome:
    payload: dict | list
    csv_header: list[str] | None = None
    csv_rows: list[list[str]] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    plot: tuple[str, np.ndarray, list[tuple[str, np.ndarray]]] | None = None


# ---------------------------------------------------------------- parsing helpers

def parse_A_list(text: str) -> list[float]:
    """Comma list of A values; accepts 'inf' and fractions like 36/11."""
    out = []
    for item in text.split(","):
        item = item.strip().lower()
        if not item:
            continue
        if item in ("inf", "infinity", "+inf"):
            out.append(math.inf)
            continue
        try:
            out.append(float(Fraction(item)))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"cannot parse A value {item!r}") from None
    if not out:
        raise ConfigError("--A needs at least one value")
    return out


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _clean(obj):
    # json.dumps emits Infinity for inf; reports use the string "inf" instead
    if isinstance(obj, float) and not math.isfinite(obj):
        return _jsonable(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, default=_jsonable) + "\n"


def atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def render_svg(title: str, x: np.ndarray, series: list[tuple[str, np.ndarray]],
               width: int = 640, height: int = 400) -> str:
    """Standalone SVG line plot, one polyline per series."""
    pad = 48
    ys = np.concatenate([np.asarray(y, dtype=float) for _, y in series])
    ys = ys[np.isfinite(ys)]
    x = np.asarray(x, dtype=float)
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1

    def px(v):
        return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

    def py(v):
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             '<rect width="100%" height="100%" fill="white"/>',
             f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
             f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
             f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
             f'<text x="{pad}" y="{height - pad + 16}" font-size="11">{x0:.4g}</text>',
             f'<text x="{width - pad}" y="{height - pad + 16}" font-size="11" text-anchor="end">{x1:.4g}</text>',
             f'<text x="{pad - 4}" y="{height - pad}" font-size="11" text-anchor="end">{y0:.4g}</text>',
             f'<text x="{pad - 4}" y="{pad + 4}" font-size="11" text-anchor="end">{y1:.4g}</text>']
    if y0 < 0 < y1:
        parts.append(f'<line x1="{pad}" y1="{py(0):.2f}" x2="{width - pad}" y2="{py(0):.2f}" '
                     'stroke="#999" stroke-dasharray="4 3"/>')
    for i, (label, y) in enumerate(series):
        y = np.asarray(y, dtype=float)
        ok = np.isfinite(y)
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[ok], y[ok]))
        col = colors[i % len(colors)]
        parts.append(f'<polyline fill="none" stroke="{col}" stroke-width="1.5" points="{pts}"/>')
        parts.append(f'<text x="{width - pad}" y="{pad + 14 * i}" font-size="11" text-anchor="end" '
                     f'fill="{col}">{label}</text>')
    parts.append("</svg>\n")
    return "\n".join(parts)


# ---------------------------------------------------------------- subcommands

def _fmt(v: float) -> str:
    return bnd.format_A(v)


def run_bounds(cfg: RunConfig) -> Outcome:
    o = cfg.options
    A_values = parse_A_list(o["A"])
    records = bnd.bounds_table(A_values, o["target"], threads=cfg.threads, q=cfg.quad_spec())
    failures = [f"A={_fmt(r.A)}: bounds {r.lower} .. {r.upper} outside [1, 2] or out of order"
                for r in records if not (1 - 1e-12 <= r.lower <= r.upper + 1e-12 and r.upper <= 2 + 1e-12)]
    payload = {"target": o["target"], "records": [
        {"A": r.A, "target": r.target.value, "lower": r.lower, "upper": r.upper,
         "lower_witness": r.lower_witness, "upper_witness": r.upper_witness} for r in records]}
    finite = [r for r in records if math.isfinite(r.A)]
    plot = None
    if finite:
        xs = np.array([r.A for r in finite])
        order = np.argsort(xs)
        plot = (f"bounds for {o['target']}", xs[order],
                [("lower", np.array([r.lower for r in finite])[order]),
                 ("upper", np.array([r.upper for r in finite])[order])])
    return Outcome(payload, bnd.CSV_HEADER, [r.row() for r in records], failures, plot)


def run_optimize(cfg: RunConfig) -> Outcome:
    o = cfg.options
    A_values = parse_A_list(o["A"])
    if len(A_values) != 1:
        raise ConfigError("optimize takes a single --A value")
    A = A_values[0]
    init = REFERENCE_MIXTURE
    if o.get("init"):
        try:
            init = parse_mixture(Path(o["init"]).read_text())
        except ValueError as exc:
            raise ConfigError(f"{o['init']}: {exc}") from None
    mode = Mode.J if o["target"] == "C" else Mode.JPLUS
    ocfg = bnd.OptimizerConfig(max_evaluations=o["max_evals"], seed=cfg.seed, restarts=o["restarts"],
                               threads=cfg.threads)
    res = bnd.optimize_mixture(A, mode, init, ocfg, cfg.quad_spec())
    failures = []
    if res.report.functional_value < res.initial_value:
        failures.append("optimizer returned a value below its start")
    payload = {"A": A, "mode": mode.value, "initial_value": res.initial_value, "improved": res.improved,
               "evaluations": res.evaluations, "report": res.report.as_dict(),
               "mixture": [{"c": c, "m": m, "s": s} for c, m, s in res.mixture.as_tuples()]}
    rows = [[repr(c), str(m), repr(s)] for c, m, s in res.mixture.as_tuples()]
    xs = np.linspace(-3, 3, 601)
    plot = ("optimised mixture F(x)", xs, [("F", res.mixture.f(xs))])
    return Outcome(payload, ["c", "m", "s"], rows, failures, plot)


def _witness(cfg: RunConfig):
    o = cfg.options
    kind = o["witness"]
    if kind == "psi":
        return dual.build_psi()
    if kind == "psi-example":
        return dual.build_psi_example()
    if kind == "tilde":
        return dual.build_tilde_psi()
    A_values = parse_A_list(o["A"]) if o.get("A") else [5.0]
    if len(A_values) != 1:
        raise ConfigError("the mollified witness takes a single --A value")
    if o["target"] == "C":
        return dual.mollify(dual.build_psi(), A_values[0], dual.MollifyMode.C)
    return dual.mollify(dual.build_psi_example(), A_values[0], dual.MollifyMode.CPLUS)


def run_dual(cfg: RunConfig) -> Outcome:
    failures = []
    try:
        w = _witness(cfg)
    except dual.CertificationError as exc:
        return Outcome({"error": str(exc)}, failures=[str(exc)])
    payload = w.to_json()
    kind = cfg.options["witness"]
    if kind == "psi":
        d0 = dual.default_d0()
        payload["d0"] = d0
        payload["profile"] = {"y": dual.default_profile().y, "epsilon": dual.default_profile().epsilon,
                              "tau": dual.TAU}
        if abs(w.sup_norm - d0) > 1e-3:
            failures.append(f"certified sup {w.sup_norm} differs from d0 {d0} by more than 1e-3")
    elif kind == "psi-example":
        if not w.sup_norm < dual.PSI_EXAMPLE_BOUND:
            failures.append(f"certified sup {w.sup_norm} is not below {dual.PSI_EXAMPLE_BOUND}")
    elif kind == "tilde":
        payload["a0"] = dual.tilde_psi_a0().value
    else:
        rng = w.check_transform_range()
        payload["transform_range"] = rng
        if not rng["ok"]:
            failures.append(f"transform range check failed: {rng}")
        if rng["core_deviation"] > 1e-9:
            failures.append(f"transform leaves 1 on the core by {rng['core_deviation']:.3g}")
    xs = np.linspace(-6.0, 6.0, 2401)
    ys = w(xs)
    rows = [[f"{x:.6g}", f"{y:.12g}"] for x, y in zip(xs, ys)]
    return Outcome(payload, ["x", "value"], rows, failures, (payload["name"], xs, [(payload["name"], ys)]))


def run_primes(cfg: RunConfig) -> Outcome:
    o = cfg.options
    if o.get("window"):
        try:
            lo, hi, n = o["window"].split(",")
            scan = primes.bt_ratio_scan(float(lo), float(hi), int(n), threads=cfg.threads)
        except ValueError as exc:
            raise ConfigError(f"--window: {exc}") from None
        payload = {"stats": [{"x": s.x, "window": s.window_kind.value, "c": s.c, "count": s.prime_count,
                              "normalized": s.normalized} for s in scan.stats],
                   "running_max": scan.running_max}
        failures = [] if scan.max_normalized < 36 / 11 else [f"normalized count {scan.max_normalized} >= 36/11"]
        xs = np.array([s.x for s in scan.stats])
        plot = ("normalized window counts", np.log10(xs), [("count/(sqrt x/log x)", np.array([s.normalized for s in scan.stats]))])
        return Outcome(payload, primes.WINDOW_CSV_HEADER, [s.row() for s in scan.stats], failures, plot)
    if o.get("verify") is not None:
        x = o["verify"]
        chk = primes.verify_interval(x, primes.CRAMER_C)
        payload = {"x": x, "c": primes.CRAMER_C, **asdict(chk)}
        fails = [] if chk.ok else [f"no prime in [{chk.lo}, {chk.hi}]"]
        return Outcome(payload, ["x", "lo", "hi", "witness"], [[f"{x:.10g}", str(chk.lo), str(chk.hi), str(chk.witness)]], fails)
    N = int(float(o.get("max_ratio") or 10**6))
    scan = primes.scan_gaps(N, threads=cfg.threads, resume_path=o.get("resume"))
    failures = []
    if not scan.max_ratio.cramer_ratio < primes.CRAMER_C:
        failures.append(f"cramer ratio {scan.max_ratio.cramer_ratio} at p={scan.max_ratio.p} is not below 22/25")
    if N >= 11 and not scan.log_sq_ok():
        failures.append(f"gap >= (log p)^2 at p={scan.max_log_sq.p}")
    payload = {"N": N, "p_min": scan.p_min, "primes_scanned": scan.primes_scanned,
               "max_cramer_ratio": asdict(scan.max_ratio), "max_gap": asdict(scan.max_gap),
               "max_log_sq_ratio": asdict(scan.max_log_sq)}
    rows = [scan.max_ratio.row(), scan.max_gap.row(), scan.max_log_sq.row()]
    return Outcome(payload, primes.GAP_CSV_HEADER, rows, failures)


def run_explicit(cfg: RunConfig) -> Outcome:
    o = cfg.options
    try:
        table = explicit.load_zeros(cfg.zeros_path)
    except OSError as exc:
        raise ConfigError(f"cannot read zero table: {exc}") from None
    ev = explicit.explicit_formula_check(table, o["a"], o["theta"], o.get("height"))
    heights = parse_A_list(o["counts"]) if o.get("counts") else []
    counts = [asdict(explicit.zero_count_check(table, h)) for h in heights]
    failures = []
    if abs(ev.residual) > ev.tail_estimate:
        failures.append(f"|residual| {abs(ev.residual):.3g} exceeds the tail estimate {ev.tail_estimate:.3g}")
    failures += [f"zero count at {c['x']} outside its band" for c in counts if not c["ok"]]
    payload = {"evaluation": ev.as_dict(), "zero_counts": counts, "zeros": {"source": table.source,
               "count": len(table), "max_height": table.max_height}}
    rows = [[k, repr(v)] for k, v in ev.as_dict().items()]
    return Outcome(payload, ["quantity", "value"], rows, failures)


def run_audit(cfg: RunConfig) -> Outcome:
    o = cfg.options
    lam = o["lam"]
    audit = explicit.audit_zero_sum_constants(lam)
    payload: dict = {"audit": audit.as_dict()}
    failures = []
    asserted = abs(lam - 0.9) < 1e-12
    if lam < 1:
        edge = explicit.edge_value_check(lam)
        payload["edge"] = edge.as_dict()
        if asserted and not (edge.ok and edge.assembled_ok):
            failures.append(f"8 F^(1) = {edge.eight_fhat} exceeds {edge.limit}")
    pp = explicit.prime_power_report(o["x"], o["c"], lam)
    payload["prime_powers"] = pp.as_dict()
    payload["asserted"] = asserted
    if asserted and not audit.ok:
        failures.append(f"assembled constant {audit.assembled} is not below {audit.limit}")
    if not pp.ok:
        failures.append("prime-power contribution above its bound")
    rows = [[f"audit.{k}", repr(v)] for k, v in audit.as_dict().items()]
    rows += [[f"edge.{k}", repr(v)] for k, v in payload.get("edge", {}).items()]
    rows += [[f"prime_powers.{k}", repr(v)] for k, v in pp.as_dict().items()]
    xs = np.linspace(-4.0, 4.0, 801)
    plot = (f"F = H(x/{lam:g})", xs, [("F", h_kernel(xs / lam))])
    return Outcome(payload, ["quantity", "value"], rows, failures, plot)


RUNNERS = {"bounds": run_bounds, "optimize": run_optimize, "dual": run_dual,
           "primes": run_primes, "explicit": run_explicit, "audit": run_audit}


# ---------------------------------------------------------------- argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="write the report here (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--svg", action="store_true", help="also write an SVG line plot next to --out")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None, help="quadrature abs/rel tolerance")
    common.add_argument("--threads", type=int, default=None, help="worker pool size (default: CPU count)")
    common.add_argument("--zeros", help=f"zero table path (fallback: ${explicit.ZEROS_ENV})")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="fourier-gap", description=__doc__)
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    s = sub.add_parser("bounds", parents=[common], help="lower/upper bounds for C(A) or C+(A)")
    s.add_argument("--A", default="1,1.5,2,2.6,3,36/11,4,5,10,inf")
    s.add_argument("--target", choices=["C", "Cplus"], default="C")

    s = sub.add_parser("optimize", parents=[common], help="Nelder-Mead search over Gaussian mixtures")
    s.add_argument("--A", default="36/11")
    s.add_argument("--target", choices=["C", "Cplus"], default="Cplus")
    s.add_argument("--init", help="mixture file, one 'c m s' triple per line")
    s.add_argument("--max-evals", type=int, default=4000)
    s.add_argument("--restarts", type=int, default=5)

    s = sub.add_parser("dual", parents=[common], help="build and certify a dual witness")
    s.add_argument("--witness", choices=["psi", "psi-example", "tilde", "mollified"], default="psi")
    s.add_argument("--A", default=None, help="A for the mollified witness (default 5)")
    s.add_argument("--target", choices=["C", "Cplus"], default="C", help="base of the mollified witness")

    s = sub.add_parser("primes", parents=[common], help="prime-gap scans")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--max-ratio", help="scan consecutive primes up to N")
    g.add_argument("--window", help="X_LO,X_HI,SAMPLES for sqrt-window counts")
    g.add_argument("--verify", type=float, help="check [x, x + (22/25) sqrt(x) log x] for a prime")
    s.add_argument("--resume", help="JSON checkpoint for --max-ratio scans")

    s = sub.add_parser("explicit", parents=[common], help="check the explicit formula against a zero table")
    s.add_argument("--a", type=float, default=1000.0)
    s.add_argument("--theta", type=float, default=5 * math.pi)
    s.add_argument("--height", type=float, default=None, help="truncate the zero sum here")
    s.add_argument("--counts", default=None, help="comma list of heights for zero-count checks")

    s = sub.add_parser("audit", parents=[common], help="constants in the prime-gap argument")
    s.add_argument("--lambda", dest="lam", type=float, default=0.9)
    s.add_argument("--x", type=float, default=1e6)
    s.add_argument("--c", type=float, default=primes.CRAMER_C)
    return p


_COMMON = {"out", "format", "svg", "seed", "tol", "threads", "zeros", "verbose", "subcommand"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    fmt = ns.format or ("csv" if ns.subcommand in ("bounds", "primes") else "json")
    threads = ns.threads if ns.threads is not None else (os.cpu_count() or 1)
    if threads < 1:
        raise ConfigError("--threads must be >= 1")
    if ns.tol is not None and not ns.tol > 0:
        raise ConfigError("--tol must be positive")
    opts = {k: v for k, v in vars(ns).items() if k not in _COMMON}
    return RunConfig(ns.subcommand, fmt, ns.out, ns.tol, ns.zeros, ns.seed, threads, ns.svg, opts)


def render(cfg: RunConfig, out: Outcome) -> str:
    if cfg.output_format == "csv" and out.csv_header is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(out.csv_header)
        w.writerows(out.csv_rows)
        return buf.getvalue()
    tol = cfg.tol if cfg.tol is not None else {"abs_tol": DEFAULT_SPEC.abs_tol, "rel_tol": DEFAULT_SPEC.rel_tol}
    report = {"subcommand": cfg.subcommand, "tolerance": tol, "seed": cfg.seed, "options": cfg.options,
              "result": out.payload, "failures": out.failures}
    return dumps(report)


def run(cfg: RunConfig) -> int:
    log.info("config %s", json.dumps(_clean(asdict(cfg)), sort_keys=True, default=_jsonable))
    out = RUNNERS[cfg.subcommand](cfg)
    text = render(cfg, out)
    if cfg.output_path:
        atomic_write(cfg.output_path, text)
    else:
        sys.stdout.write(text)
    if cfg.svg and out.plot is not None:
        title, xs, series = out.plot
        target = Path(cfg.output_path).with_suffix(".svg") if cfg.output_path else Path(f"{cfg.subcommand}.svg")
        atomic_write(target, render_svg(title, xs, series))
    for f in out.failures:
        log.error("assertion failed: %s", f)
    return EXIT_ASSERT if out.failures else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        ns = build_parser().parse_args(argv)
        if ns.verbose:
            log.setLevel(logging.DEBUG)
        cfg = config_from_args(ns)
        if cfg.zeros_path is None and cfg.subcommand == "explicit":
            cfg.zeros_path = str(explicit.resolve_zeros_path(None))
        return run(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, DomainError, ValueError, QuadratureError, explicit.ZeroTableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

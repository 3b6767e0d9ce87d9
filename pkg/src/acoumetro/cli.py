"""Command-line front end.

    acoumetro simulate --replicates 15 --speed-noise 0.01 --out log.csv
    acoumetro calibrate log.csv --degree 3 --model-out model.csv
    acoumetro budget samples.csv --ub reference=0.02 --k 2
    acoumetro conform --specs table3
    acoumetro atten data.csv --eval 3
    acoumetro scatter --beta 2 --q 1 --k 1
    acoumetro turbidity samples.csv --degree 1 --reading 50

Global flags (``--seed``, ``--config``, ``--out``, ``--format``) may come
before or after the subcommand. ``--config`` names a JSON object whose keys
are option names (dashes or underscores); command-line values win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import atten, budget, calib, scatter, turbidity
from .channel import ChannelGeometry, Pulse, Velocimeter

DEFAULT_SEED = 42

_GLOBAL_DEFAULTS = {"seed": DEFAULT_SEED, "config": None, "out": None, "format": "text"}


class CliError(Exception):
    pass


def num(x) -> str:
    """Fixed report formatting: 6 significant digits."""
    if x is None:
        return ""
    x = float(x)
    if x == 0:
        return "0"
    return f"{x:.6g}"


def _add_globals(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help=f"random seed (default {DEFAULT_SEED})")
    g.add_argument("--config", default=argparse.SUPPRESS, help="JSON file of option values")
    g.add_argument("--out", default=argparse.SUPPRESS, help="output file (default stdout)")
    g.add_argument("--format", choices=("text", "csv"), default=argparse.SUPPRESS,
                   help="report format (default text)")


def _csv_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _label_value(text: str) -> tuple[str, float]:
    label, sep, value = text.partition("=")
    try:
        if not sep:
            return ("u_B", float(text))
        return (label, float(value))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LABEL=VALUE, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acoumetro",
        description="Sound-speed channel simulation, calibration and acoustic metrology reports.",
    )
    _add_globals(parser)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("simulate", help="simulate a thermostat calibration run")
    _add_globals(p)
    p.add_argument("--temperatures", type=_csv_list, help="bath levels, degC (default 4,8,...,28)")
    p.add_argument("--replicates", type=int, help="codes recorded per level (default 15)")
    p.add_argument("--speed-noise", type=float, help="timing noise as equivalent speed, m/s (default 0)")
    p.add_argument("--mode", choices=("exact", "waveform"), help="timing path (default exact)")
    p.add_argument("--noise-std", type=float, help="waveform amplitude noise (default 0)")
    p.add_argument("--l1", type=float, help="translucent reflector offset, m (default 0.010)")
    p.add_argument("--l2", type=float, help="full reflector offset, m (default 0.035)")
    p.add_argument("--t-res", type=float, help="timer resolution, s (default 1e-11)")
    p.add_argument("--tau-e", type=float, help="electronic delay, s (default 0)")
    p.add_argument("--r-partial", type=float, help="translucent reflection coefficient (default 0.5)")
    p.add_argument("--r-full", type=float, help="full reflection coefficient (default 0.93)")
    p.add_argument("--f0", type=float, help="carrier frequency, Hz (default 2.4e6)")

    p = sub.add_parser("calibrate", help="fit speed against code from a calibration log")
    _add_globals(p)
    p.add_argument("log", nargs="?", help="calibration log CSV (timestamp,temperature_C,code_N)")
    p.add_argument("--degree", type=int, help="polynomial degree (default 3)")
    p.add_argument("--model-out", help="write the fitted model CSV here")

    p = sub.add_parser("budget", help="type A/B uncertainty budget from repeated measurements")
    _add_globals(p)
    p.add_argument("samples", nargs="?", help="CSV with header speed_m_s")
    p.add_argument("--ub", type=_label_value, action="append",
                   help="type B component LABEL=VALUE in m/s (repeatable)")
    p.add_argument("--k", type=float, help="coverage factor (default 2)")
    p.add_argument("--of-mean", action="store_true", default=None,
                   help="type A as standard uncertainty of the mean, s/sqrt(n)")

    p = sub.add_parser("conform", help="check measured errors against spec sheets")
    _add_globals(p)
    p.add_argument("--specs", action="append",
                   help="spec database CSV, or bundled table1/table2/table3 (repeatable)")
    p.add_argument("--measured", help="CSV name,measured_error,units,field")

    p = sub.add_parser("atten", help="fit the a1*f^b attenuation law")
    _add_globals(p)
    p.add_argument("data", nargs="?", help="CSV freq_MHz,alpha_dB_per_m")
    p.add_argument("--eval", type=float, action="append", help="evaluate at this frequency, MHz")

    p = sub.add_parser("scatter", help="Born scattering coefficients")
    _add_globals(p)
    p.add_argument("--beta", type=float, help="compressibility contrast")
    p.add_argument("--q", type=float, help="density contrast")
    p.add_argument("--k", type=float, help="wavenumber, rad/m")
    p.add_argument("--freq", type=float, help="frequency, Hz (with --c, instead of --k)")
    p.add_argument("--c", type=float, help="sound speed, m/s (default 1500)")
    p.add_argument("--density", type=float, help="relative number density (default 1)")
    p.add_argument("--n-polar", type=int, help="polar quadrature nodes (default 64)")
    p.add_argument("--n-azimuth", type=int, help="azimuthal quadrature nodes (default 64)")
    p.add_argument("--scheme", choices=("gauss", "midpoint"), help="quadrature (default gauss)")
    p.add_argument("--angle", type=float, action="append", help="also print D at this angle, deg")

    p = sub.add_parser("turbidity", help="concentration calibration curve from samples")
    _add_globals(p)
    p.add_argument("samples", nargs="?", help="CSV reading,concentration_ppm,enabled")
    p.add_argument("--mode", choices=("polynomial", "lookup"), help="curve type (default polynomial)")
    p.add_argument("--degree", type=int, help="polynomial degree 1-4 (default 1)")
    p.add_argument("--reading", type=float, action="append", help="evaluate at this reading")
    p.add_argument("--disable", type=int, action="append", help="disable sample by 0-based index")
    return parser


class Options:
    """Resolved options: command line, then config file, then built-in default."""

    def __init__(self, ns: argparse.Namespace, config: dict):
        self._ns = ns
        self._cfg = {k.replace("-", "_"): v for k, v in config.items()}

    def get(self, name, default=None):
        v = getattr(self._ns, name, None)
        if v is not None:
            return v
        if name in self._cfg:
            return self._cfg[name]
        return _GLOBAL_DEFAULTS.get(name, default)


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise CliError(f"{path}: config must be a JSON object")
    return cfg


def _require(opts: Options, name: str, what: str):
    v = opts.get(name)
    if v is None:
        raise CliError(f"missing {what}")
    return v


def _table(rows, header, fmt) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(str(h))
              for i, h in enumerate(header)]
    buf.write("  ".join(str(h).ljust(w) for h, w in zip(header, widths)).rstrip() + "\n")
    for r in rows:
        buf.write("  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")
    return buf.getvalue()


def _kv(lines, fmt) -> str:
    """Render (key, value, unit) triples."""
    if fmt == "csv":
        return _table([(k, v, u) for k, v, u in lines], ("quantity", "value", "units"), "csv")
    width = max(len(k) for k, _, _ in lines)
    return "".join(f"{k.ljust(width)} = {v} {u}".rstrip() + "\n" for k, v, u in lines)


def cmd_simulate(opts: Options) -> str:
    geom = ChannelGeometry(
        l1=opts.get("l1", 0.010),
        l2=opts.get("l2", 0.035),
        r_full=opts.get("r_full", 0.93),
        r_partial=opts.get("r_partial", 0.5),
        carrier_freq=opts.get("f0", 2.4e6),
        timer_resolution=opts.get("t_res", 1e-11),
        electronic_delay=opts.get("tau_e", 0.0),
    )
    inst = Velocimeter(
        geom,
        mode=opts.get("mode", "exact"),
        speed_noise=opts.get("speed_noise", 0.0),
        noise_std=opts.get("noise_std", 0.0),
        pulse=Pulse(carrier_freq=geom.carrier_freq),
    )
    temps = opts.get("temperatures", list(calib.DEFAULT_TEMPERATURES))
    rows = calib.simulate_log(inst, temps, opts.get("replicates", 15), opts.get("seed"))
    buf = io.StringIO()
    calib.write_log(rows, buf)
    return buf.getvalue()


def cmd_calibrate(opts: Options) -> str:
    path = _require(opts, "log", "calibration log path")
    points = calib.points_from_log(calib.read_log(path))
    model = calib.fit_speed_vs_code(points, degree=opts.get("degree", 3))
    if opts.get("model_out"):
        model.to_csv(opts.get("model_out"))
    res = calib.residuals(model, points)
    fmt = opts.get("format")
    rows = [
        (num(p.temperature), f"{p.code:.2f}", f"{p.code_std:.2f}", num(calib.DEFAULT_CURVE.speed(p.temperature)),
         num(calib.predict(model, p.code)), num(dc))
        for p, (_, dc) in zip(points, res)
    ]
    header = ("temperature_C", "code_N", "code_std", "c_ref_m_s", "c_fit_m_s", "residual_m_s")
    if fmt == "csv":
        return _table(rows, header, "csv")
    lines = [
        ("degree", str(model.degree), ""),
        ("points", str(len(points)), ""),
        ("rmse", num(model.rmse), "m/s"),
        ("code_center", num(model.code_center), "counts"),
        ("code_scale", num(model.code_scale), "counts"),
    ]
    lines += [(f"c{i}", num(c), "m/s") for i, c in enumerate(model.coefficients)]
    return _kv(lines, "text") + "\n" + _table(rows, header, "text")


def _read_speed_samples(path) -> list[float]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        if next(reader, None) != ["speed_m_s"]:
            raise CliError(f"{path}:1: expected header 'speed_m_s'")
        for lineno, rec in enumerate(reader, start=2):
            try:
                (v,) = rec
                out.append(float(v))
            except ValueError as exc:
                raise CliError(f"{path}:{lineno}: malformed row {rec!r}") from exc
    return out


def cmd_budget(opts: Options) -> str:
    samples = _read_speed_samples(_require(opts, "samples", "samples CSV path"))
    ub = [tuple(x) for x in opts.get("ub", [])]
    b = budget.UncertaintyBudget.from_samples(
        samples, ub, opts.get("k", budget.DEFAULT_COVERAGE), bool(opts.get("of_mean", False))
    )
    lines = [
        ("n", str(b.n_observations), ""),
        ("mean", num(sum(samples) / len(samples)), "m/s"),
        ("u_A", num(b.u_a), "m/s"),
    ]
    lines += [(f"u_B[{lbl}]", num(v), "m/s") for lbl, v in b.u_b_components]
    lines += [("u_c", num(b.u_c), "m/s"), ("k", num(b.coverage_k), ""), ("U", num(b.U), "m/s")]
    return _kv(lines, opts.get("format"))


def _read_measured(path) -> list[tuple[str, float, str, str]]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        if next(reader, None) != ["name", "measured_error", "units", "field"]:
            raise CliError(f"{path}:1: expected header 'name,measured_error,units,field'")
        for lineno, rec in enumerate(reader, start=2):
            try:
                name, v, units, field = rec
                out.append((name, float(v), units, field))
            except ValueError as exc:
                raise CliError(f"{path}:{lineno}: malformed row {rec!r}") from exc
    return out


def conformance_verdicts(specs, measured=()) -> list[budget.Verdict]:
    by_name = {s.name: s for s in specs}
    measured_names = set()
    verdicts = []
    for name, value, units, field in measured:
        if name not in by_name:
            raise CliError(f"measured row names unknown instrument {name!r}")
        verdicts.append(budget.check_conformance(value, units, by_name[name], field))
        measured_names.add(name)
    for s in specs:
        if None not in (s.calibration_error, s.stability, s.final_accuracy):
            verdicts.append(budget.table1_consistency(s))
        if s.declared_error is not None and s.name not in measured_names:
            verdicts.append(budget.type_test_conformance(s))
    return verdicts


def cmd_conform(opts: Options) -> str:
    sources = _require(opts, "specs", "--specs")
    if isinstance(sources, str):
        sources = [sources]
    specs = []
    for src in sources:
        path = budget.bundled_path(src) if src in budget.BUNDLED_TABLES else Path(src)
        try:
            with path.open(encoding="utf-8", newline="") as fh:
                specs += budget.read_specs(fh)
        except OSError as exc:
            raise CliError(f"cannot read spec database {src}: {exc}") from exc
    measured = []
    if opts.get("measured"):
        try:
            measured = _read_measured(opts.get("measured"))
        except OSError as exc:
            raise CliError(f"cannot read measured-error file: {exc}") from exc
    rows = [
        (v.name, v.check, v.status, num(v.value), num(v.limit), num(v.margin), v.units)
        for v in conformance_verdicts(specs, measured)
    ]
    return _table(rows, ("name", "check", "verdict", "value", "limit", "margin", "units"),
                  opts.get("format"))


def cmd_atten(opts: Options) -> str:
    model = atten.fit_power_law(atten.read_attenuation_csv(_require(opts, "data", "data CSV path")))
    lines = [("a1", num(model.a1), "dB/m at 1 MHz"), ("b", num(model.b), "")]
    for f in opts.get("eval", []):
        lines.append((f"alpha({num(f)} MHz)", num(atten.eval_power_law(model, f)), "dB/m"))
    return _kv(lines, opts.get("format"))


def cmd_scatter(opts: Options) -> str:
    k = opts.get("k")
    if k is None:
        f = _require(opts, "freq", "--k or --freq")
        k = 2 * math.pi * f / opts.get("c", 1500.0)
    prof = scatter.ContrastProfile(
        _require(opts, "beta", "--beta"), _require(opts, "q", "--q"), k, opts.get("density", 1.0)
    )
    quad = scatter.QuadratureSpec(
        opts.get("n_polar", 64), opts.get("n_azimuth", 64), opts.get("scheme", "gauss")
    )
    lines = [
        ("k", num(prof.k), "rad/m"),
        ("backscatter D(180 deg)", num(scatter.backscatter_coefficient(prof)), "1/(m sr)"),
        ("total mu_s", num(scatter.total_coefficient(prof, quad)), "1/m"),
    ]
    for deg in opts.get("angle", []):
        d = scatter.differential_coefficient(prof, math.radians(deg))
        lines.append((f"D({num(deg)} deg)", num(d), "1/(m sr)"))
    return _kv(lines, opts.get("format"))


def cmd_turbidity(opts: Options) -> str:
    samples = turbidity.read_samples(_require(opts, "samples", "samples CSV path"))
    for i in opts.get("disable", []):
        samples = samples.disable(i)
    curve = turbidity.fit_curve(samples, opts.get("mode", "polynomial"), opts.get("degree", 1))
    lines = [("mode", curve.mode, ""), ("enabled samples", str(len(samples.enabled)), ""),
             ("domain_min", num(curve.domain[0]), "reading"),
             ("domain_max", num(curve.domain[1]), "reading")]
    if curve.mode == "polynomial":
        lines.append(("degree", str(curve.degree), ""))
        lines += [(f"p{i}", num(c), f"ppm/reading^{i}") for i, c in enumerate(curve.coefficients)]
    for r in opts.get("reading", []):
        lines.append((f"concentration({num(r)})", num(turbidity.concentration(curve, r)), "ppm"))
    return _kv(lines, opts.get("format"))


COMMANDS = {
    "simulate": cmd_simulate,
    "calibrate": cmd_calibrate,
    "budget": cmd_budget,
    "conform": cmd_conform,
    "atten": cmd_atten,
    "scatter": cmd_scatter,
    "turbidity": cmd_turbidity,
}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        opts = Options(ns, _load_config(getattr(ns, "config", None)))
        report = COMMANDS[ns.command](opts)
        out = opts.get("out")
        if out:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(report)
        else:
            sys.stdout.write(report)
    except (CliError, ValueError, KeyError, OSError, ZeroDivisionError, RuntimeError) as exc:
        print(f"acoumetro {ns.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: capacity reports, Monte Carlo sweeps, SVG plots.

Three subcommands cover the experiment loop end to end:

  mnac capacity --config exp.ini --out results/
  mnac sweep    --config exp.ini --out results/
  mnac plot results/sweep.csv --kind success --out results/

Config files are flat INI text (stock `configparser`).  Output CSVs are
written atomically (temp file + rename) and sweeps resume cell-by-cell:
rows already present in the output file are never recomputed, and because
every cell's random stream is derived from (seed, n, snr) alone, a resumed
file is byte-identical to a fresh single-shot run.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import math
import os
import sys

from .capacity import (
    min_identification_cost,
    optimize_rate,
    optimize_sampling,
    optimize_threshold,
)
from .channel import RngSeed
from .metrics import DecoderSpec, RecoveryCriterion, run_cell
from .model import ChannelParams, NetworkConfig

__all__ = [
    "ConfigError",
    "main",
    "build_parser",
    "SWEEP_COLUMNS",
    "CAPACITY_COLUMNS",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

SWEEP_COLUMNS = ("ell", "k", "n", "snr_db", "q_sp", "gamma", "decoder",
                 "criterion", "zeta", "trials", "successes", "success_prob",
                 "stderr")
CAPACITY_COLUMNS = ("snr_db", "capacity", "gamma_star", "q_sp_star", "n_cost",
                    "n_gaussian", "lower_bound")

_KNOWN_KEYS = {
    "network": {"devices", "active", "sampling_prob"},
    "channel": {"snr_db", "threshold", "on_power", "fading_var", "noise_var"},
    "sweep": {"n", "trials", "seed", "criteria", "fixed_codebook", "output"},
    "decoders": {"names"},
    "capacity": {"alpha", "output"},
}

_DECODER_KNOBS = {
    "rho": float,
    "eta": float,
    "damping": float,
    "max_iters": int,
    "tol": float,
    "enumeration_cap": int,
}

_REQUIRED = object()


class ConfigError(Exception):
    """A problem with user-supplied configuration or input-file contents."""


def _fmt(x) -> str:
    """Canonical CSV real format: 12 significant digits, '.' separator."""
    return "%.12g" % float(x)


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# config parsing

def _load_config(path: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(delimiters=("=",), interpolation=None,
                                   inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as fh:
            content = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    try:
        cp.read_string(content, source=path)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    for section in cp.sections():
        if section.startswith("decoder."):
            for key in cp.options(section):
                if key not in _DECODER_KNOBS:
                    raise ConfigError(
                        f"[{section}]: unknown option {key!r}; valid options:"
                        f" {', '.join(sorted(_DECODER_KNOBS))}")
        elif section in _KNOWN_KEYS:
            for key in cp.options(section):
                if key not in _KNOWN_KEYS[section]:
                    raise ConfigError(
                        f"[{section}]: unknown option {key!r}; valid options:"
                        f" {', '.join(sorted(_KNOWN_KEYS[section]))}")
        else:
            raise ConfigError(f"unknown config section [{section}]")
    return cp


def _get(cp, section: str, key: str, default=_REQUIRED) -> str:
    if not cp.has_section(section):
        if default is not _REQUIRED:
            return default
        raise ConfigError(f"missing config section [{section}]")
    if not cp.has_option(section, key):
        if default is not _REQUIRED:
            return default
        raise ConfigError(f"missing key {key!r} in section [{section}]")
    return cp.get(section, key).strip()


def _parse_int(text: str, where: str, minimum: int | None = None) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise ConfigError(f"{where}: expected an integer, got {text!r}") from exc
    if minimum is not None and value < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}, got {value}")
    return value


def _parse_float(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"{where}: expected a number, got {text!r}") from exc


def _parse_floats(text: str, where: str) -> list:
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    if not tokens:
        raise ConfigError(f"{where}: empty list")
    return [_parse_float(t, where) for t in tokens]


def _parse_bool(text: str, where: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{where}: expected a boolean, got {text!r}")


def _parse_n_grid(text: str, where: str) -> list:
    """Channel-use axis: either 'start:stop:step' (inclusive) or a comma list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{where}: ranges use start:stop:step")
        start = _parse_int(parts[0], where, minimum=1)
        stop = _parse_int(parts[1], where, minimum=1)
        step = _parse_int(parts[2], where, minimum=1)
        if stop < start:
            raise ConfigError(f"{where}: range stop {stop} below start {start}")
        return list(range(start, stop + 1, step))
    values = [_parse_int(t.strip(), where, minimum=1)
              for t in text.split(",") if t.strip()]
    if not values:
        raise ConfigError(f"{where}: empty list")
    ordered = sorted(values)
    for a, b in zip(ordered, ordered[1:]):
        if a == b:
            raise ConfigError(f"{where}: duplicate value {a}")
    return ordered


def _parse_criterion(token: str, where: str) -> RecoveryCriterion:
    parts = [p.strip() for p in token.split(":")]
    try:
        if parts[0] == "exact" and len(parts) == 1:
            return RecoveryCriterion.exact()
        if parts[0] == "partial" and len(parts) == 2:
            return RecoveryCriterion.partial(_parse_float(parts[1], where))
        if parts[0] == "unknown_k" and len(parts) == 3:
            return RecoveryCriterion.partial_unknown_k(
                _parse_float(parts[1], where), _parse_float(parts[2], where))
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(
        f"{where}: unrecognized criterion {token!r}; expected 'exact',"
        " 'partial:ZETA', or 'unknown_k:ZETA:SIGMA'")


def _parse_criteria(text: str, where: str) -> list:
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    if not tokens:
        raise ConfigError(f"{where}: empty criterion list")
    crits = [_parse_criterion(t, where) for t in tokens]
    seen = set()
    for c in crits:
        key = (c.descriptor(), c.zeta)
        if key in seen:
            raise ConfigError(f"{where}: duplicate criterion {key[0]!r}")
        seen.add(key)
    return crits


def _parse_network(cp):
    ell = _parse_int(_get(cp, "network", "devices"), "[network] devices",
                     minimum=2)
    k = _parse_int(_get(cp, "network", "active"), "[network] active",
                   minimum=1)
    if k >= ell:
        raise ConfigError("[network]: active must be smaller than devices")
    q_text = _get(cp, "network", "sampling_prob", "auto")
    if q_text.lower() == "auto":
        q_spec = None
    else:
        q_spec = _parse_float(q_text, "[network] sampling_prob")
        if not 0.0 < q_spec < 1.0:
            raise ConfigError("[network] sampling_prob: must lie in (0, 1)")
    return ell, k, q_spec


def _parse_channel(cp):
    """Channel operating points: (snr_db, on_power, fading_var, noise_var)
    tuples plus the threshold spec (None = optimize)."""
    has_snr = cp.has_option("channel", "snr_db")
    has_power = cp.has_option("channel", "on_power")
    if has_snr == has_power:
        raise ConfigError("[channel]: give exactly one of 'snr_db' (list)"
                          " or 'on_power' (+ fading_var/noise_var)")
    if has_snr:
        snrs = _parse_floats(_get(cp, "channel", "snr_db"), "[channel] snr_db")
        if len(set(snrs)) != len(snrs):
            raise ConfigError("[channel] snr_db: duplicate values")
        points = [(s, 10.0 ** (s / 10.0), 1.0, 1.0) for s in sorted(snrs)]
    else:
        power = _parse_float(_get(cp, "channel", "on_power"),
                             "[channel] on_power")
        fading = _parse_float(_get(cp, "channel", "fading_var", "1.0"),
                              "[channel] fading_var")
        noise = _parse_float(_get(cp, "channel", "noise_var", "1.0"),
                             "[channel] noise_var")
        if min(power, fading, noise) <= 0.0:
            raise ConfigError("[channel]: powers and variances must be"
                              " positive")
        snr = 10.0 * math.log10(fading * power / noise)
        points = [(snr, power, fading, noise)]
    g_text = _get(cp, "channel", "threshold", "auto")
    if g_text.lower() == "auto":
        g_spec = None
    else:
        g_spec = _parse_float(g_text, "[channel] threshold")
        if g_spec <= 0.0:
            raise ConfigError("[channel] threshold: must be positive")
    return points, g_spec


def _resolve_operating_point(k: int, point, q_spec, g_spec):
    """Fill in 'auto' knobs with capacity-optimal values for this SNR."""
    snr, power, fading, noise = point
    if q_spec is None and g_spec is None:
        rp = optimize_rate(power, fading, noise, k)
        return snr, ChannelParams(power, fading, noise, rp.threshold), \
            rp.sampling_prob
    if q_spec is None:
        params = ChannelParams(power, fading, noise, g_spec)
        rp = optimize_sampling(params, k)
        return snr, params, rp.sampling_prob
    if g_spec is None:
        rp = optimize_threshold(power, fading, noise, k, q_spec)
        return snr, ChannelParams(power, fading, noise, rp.threshold), q_spec
    return snr, ChannelParams(power, fading, noise, g_spec), q_spec


# ---------------------------------------------------------------------------
# CSV plumbing

def _check_header(header, columns, path: str) -> None:
    header = tuple(h.strip() for h in header)
    if header == columns:
        return
    missing = [c for c in columns if c not in header]
    extra = [c for c in header if c not in columns]
    details = []
    if missing:
        details.append("missing column(s): " + ", ".join(repr(c) for c in missing))
    if extra:
        details.append("unexpected column(s): " + ", ".join(repr(c) for c in extra))
    if not details:
        details.append("columns out of order")
    raise ConfigError(f"{path}: bad CSV header ({'; '.join(details)});"
                      f" expected {','.join(columns)}")


def _read_csv_rows(path: str, columns) -> list:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ConfigError(f"{path}: empty CSV file")
        _check_header(header, columns, path)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(columns):
                raise ConfigError(f"{path}:{lineno}: expected"
                                  f" {len(columns)} fields, got {len(row)}")
            rows.append(tuple(field.strip() for field in row))
    return rows


def _write_csv(path: str, columns, rows) -> None:
    lines = [",".join(columns)]
    lines.extend(",".join(row) for row in rows)
    _atomic_write(path, "\n".join(lines) + "\n")


def _sweep_key(row) -> tuple:
    # identity of a cell: (n, snr_db, decoder, criterion, zeta) as written
    return (row[2], row[3], row[6], row[7], row[8])


def _sweep_sort_key(row) -> tuple:
    return (float(row[3]), int(row[2]), row[6], row[7], float(row[8]))


# ---------------------------------------------------------------------------
# capacity subcommand

def cmd_capacity(args) -> int:
    cp = _load_config(args.config)
    ell, k, _ = _parse_network(cp)
    points, _ = _parse_channel(cp)
    alpha = _parse_float(_get(cp, "capacity", "alpha", "0.0"),
                         "[capacity] alpha")
    if not 0.0 <= alpha < 1.0:
        raise ConfigError("[capacity] alpha: must lie in [0, 1)")
    out_name = _get(cp, "capacity", "output", "capacity.csv")

    rows = []
    for snr, power, fading, noise in points:
        report = min_identification_cost(ell, k, power, fading, noise, alpha)
        rows.append((_fmt(snr), _fmt(report.c_star), _fmt(report.gamma_star),
                     _fmt(report.q_star), _fmt(report.n_required),
                     _fmt(report.gaussian_baseline),
                     _fmt(report.sublinear_lower_bound)))
        print(f"snr={snr:g} dB  capacity={report.c_star:.6g} bits/use  "
              f"gamma*={report.gamma_star:.6g}  q_sp*={report.q_star:.6g}  "
              f"n={report.n_required:.1f}  n_gaussian="
              f"{report.gaussian_baseline:.1f}  "
              f"lower_bound={report.sublinear_lower_bound:.1f}")

    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, out_name)
    _write_csv(path, CAPACITY_COLUMNS, rows)
    print(f"wrote {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep subcommand

def _decoder_specs(cp) -> list:
    names = [t.strip() for t in
             _get(cp, "decoders", "names").split(",") if t.strip()]
    if not names:
        raise ConfigError("[decoders] names: empty decoder list")
    if len(set(names)) != len(names):
        raise ConfigError("[decoders] names: duplicate decoder")
    specs = []
    for name in names:
        section = f"decoder.{name}"
        kwargs = {}
        if cp.has_section(section):
            for key in cp.options(section):
                conv = _DECODER_KNOBS[key]
                text = cp.get(section, key).strip()
                where = f"[{section}] {key}"
                kwargs[key] = (_parse_int(text, where) if conv is int
                               else _parse_float(text, where))
        try:
            specs.append(DecoderSpec(name=name, **kwargs))
        except ValueError as exc:
            raise ConfigError(f"[decoders]: {exc}") from exc
    return specs


def _infeasible_reason(spec: DecoderSpec, ell: int, k: int):
    if spec.name in ("ml", "algorithm1"):
        total = math.comb(ell, k)
        if total > spec.enumeration_cap:
            return (f"C({ell},{k}) = {total} candidate sets exceed the"
                    f" enumeration cap of {spec.enumeration_cap}")
    if spec.name == "algorithm1" and ell - k < k:
        return "population too small: the level thresholds need ell >= 2k"
    return None


def _marker_row(ell, k, n, snr, q_sp, gamma, decoder, crit) -> tuple:
    return (str(ell), str(k), str(n), _fmt(snr), _fmt(q_sp), _fmt(gamma),
            decoder, crit.descriptor(), _fmt(crit.zeta), "0", "0", "nan",
            "nan")


def _record_row(rec) -> tuple:
    return (str(rec.ell), str(rec.k), str(rec.n), _fmt(rec.snr_db),
            _fmt(rec.sampling_prob), _fmt(rec.threshold), rec.decoder,
            rec.criterion, _fmt(rec.zeta), str(rec.trials),
            str(rec.successes), _fmt(rec.success_prob), _fmt(rec.stderr))


def cmd_sweep(args) -> int:
    cp = _load_config(args.config)
    ell, k, q_spec = _parse_network(cp)
    points, g_spec = _parse_channel(cp)
    ns = _parse_n_grid(_get(cp, "sweep", "n"), "[sweep] n")
    trials = args.trials if args.trials is not None else \
        _parse_int(_get(cp, "sweep", "trials", "100"), "[sweep] trials",
                   minimum=1)
    if trials < 1:
        raise ConfigError("--trials: must be >= 1")
    seed_value = args.seed if args.seed is not None else \
        _parse_int(_get(cp, "sweep", "seed", "0"), "[sweep] seed", minimum=0)
    criteria = _parse_criteria(_get(cp, "sweep", "criteria", "exact"),
                               "[sweep] criteria")
    fixed_codebook = _parse_bool(_get(cp, "sweep", "fixed_codebook", "false"),
                                 "[sweep] fixed_codebook")
    out_name = _get(cp, "sweep", "output", "sweep.csv")
    specs = _decoder_specs(cp)
    try:
        seed = RngSeed(seed_value)
    except ValueError as exc:
        raise ConfigError(f"seed: {exc}") from exc

    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, out_name)
    existing = _read_csv_rows(path, SWEEP_COLUMNS) if os.path.exists(path) \
        else []
    rows = {_sweep_key(r): r for r in existing}

    ops = []
    for point in points:
        try:
            ops.append(_resolve_operating_point(k, point, q_spec, g_spec))
        except ValueError as exc:
            raise ConfigError(f"channel operating point: {exc}") from exc
    for snr, params, q_sp in ops:
        print(f"operating point: snr={snr:g} dB  q_sp={q_sp:.6g}"
              f"  gamma={params.threshold:.6g}")

    for snr, params, q_sp in ops:
        # non-negative salt word; streams depend only on (seed, n, snr)
        snr_word = round(snr * 1000.0) % (2 ** 63)
        for n in ns:
            try:
                cfg = NetworkConfig(ell, k, n, q_sp)
            except ValueError as exc:
                raise ConfigError(f"network config at n={n}: {exc}") from exc
            runnable, markers = [], []
            for spec in specs:
                reason = _infeasible_reason(spec, ell, k)
                (markers if reason else runnable).append((spec, reason))
            todo = [spec for spec, _ in runnable
                    if any(_sweep_key(_marker_row(ell, k, n, snr, q_sp,
                                                  params.threshold, spec.name,
                                                  crit)) not in rows
                           for crit in criteria)]
            if todo:
                records = run_cell(cfg, params, todo, criteria, trials, seed,
                                   salt=(n, snr_word),
                                   fixed_codebook=fixed_codebook, snr_db=snr)
                for rec in records:
                    row = _record_row(rec)
                    rows.setdefault(_sweep_key(row), row)
                print(f"cell snr={snr:g} n={n}: {len(todo)} decoder(s) x"
                      f" {trials} trials in {records[0].wall_time:.1f}s")
            for spec, reason in markers:
                fresh = 0
                for crit in criteria:
                    row = _marker_row(ell, k, n, snr, q_sp, params.threshold,
                                      spec.name, crit)
                    if _sweep_key(row) not in rows:
                        rows[_sweep_key(row)] = row
                        fresh += 1
                if fresh:
                    print(f"cell snr={snr:g} n={n}: skipped {spec.name}"
                          f" ({reason})", file=sys.stderr)

    ordered = sorted(rows.values(), key=_sweep_sort_key)
    _write_csv(path, SWEEP_COLUMNS, ordered)
    print(f"wrote {path} ({len(ordered)} rows)")
    infeasible_present = any(r[9] == "0" for r in ordered)
    return EXIT_INFEASIBLE if infeasible_present else EXIT_OK


# ---------------------------------------------------------------------------
# plot subcommand

def _load_sweep_points(path: str):
    """Parse sweep rows into plot-ready tuples, dropping marker rows."""
    rows = _read_csv_rows(path, SWEEP_COLUMNS)
    points = []
    geometries = set()
    for row in rows:
        try:
            trials = int(row[9])
            if trials == 0:
                continue  # infeasible-cell marker
            points.append({
                "ell": int(row[0]), "k": int(row[1]), "n": int(row[2]),
                "snr_db": float(row[3]), "decoder": row[6],
                "criterion": row[7], "zeta": float(row[8]),
                "success_prob": float(row[11]),
            })
            geometries.add((int(row[0]), int(row[1])))
        except ValueError as exc:
            raise ConfigError(f"{path}: unparsable row {row!r}: {exc}") \
                from exc
    if not points:
        raise ConfigError(f"{path}: no completed sweep rows to plot")
    if len(geometries) > 1:
        raise ConfigError(f"{path}: mixed (ell, k) geometries"
                          f" {sorted(geometries)}; plot one at a time")
    return points, geometries.pop()


def _criterion_label(criterion: str, zeta: float) -> str:
    if criterion == "exact":
        return "exact"
    return f"{criterion} {zeta:g}%"


def _plot_success(points, geometry, target: float):
    from .svgplot import LineSeries, render_line_chart

    ell, k = geometry
    groups = {}
    for p in points:
        key = (p["decoder"], p["criterion"], p["zeta"], p["snr_db"])
        groups.setdefault(key, []).append((p["n"], p["success_prob"]))
    snr_values = sorted({key[3] for key in groups})
    series = []
    for key in sorted(groups, key=lambda t: (t[0], t[1], t[2], t[3])):
        decoder, criterion, zeta, snr = key
        pts = sorted(groups[key])
        label = f"{decoder}, {_criterion_label(criterion, zeta)}"
        if len(snr_values) > 1:
            label += f", {snr:g} dB"
        series.append(LineSeries(label=label,
                                 xs=tuple(x for x, _ in pts),
                                 ys=tuple(y for _, y in pts)))
    return render_line_chart(
        series,
        title=f"Identification success, {ell} devices, {k} active",
        x_label="Number of channel-uses, n",
        y_label="Probability of successful identification",
        y_range=(0.0, 1.05))


def _plot_cost(points, geometry, target: float, decoder: str,
               criterion: RecoveryCriterion):
    from .svgplot import LineSeries, crossing_point, render_line_chart

    ell, k = geometry
    wanted = (decoder, criterion.descriptor(), criterion.zeta)
    curves = {}
    for p in points:
        if (p["decoder"], p["criterion"], p["zeta"]) != wanted:
            continue
        curves.setdefault(p["snr_db"], []).append((p["n"], p["success_prob"]))
    if not curves:
        raise ConfigError(f"no rows for decoder {decoder!r} under criterion"
                          f" {criterion.descriptor()!r}")
    snrs = sorted(curves)
    theory = [min_identification_cost(ell, k, 10.0 ** (snr / 10.0)).n_required
              for snr in snrs]
    series = [LineSeries(label="theory minimum", xs=tuple(snrs),
                         ys=tuple(theory), dashed=True)]
    emp_x, emp_y = [], []
    for snr in snrs:
        pts = sorted(curves[snr])
        cross = crossing_point([x for x, _ in pts], [y for _, y in pts],
                               target)
        if cross is not None:
            emp_x.append(snr)
            emp_y.append(cross)
    if emp_x:
        series.append(LineSeries(label=f"{decoder} at {target:g} success",
                                 xs=tuple(emp_x), ys=tuple(emp_y)))
    else:
        print(f"note: no SNR reaches {target:g} success for {decoder};"
              " plotting theory only", file=sys.stderr)
    return render_line_chart(
        series,
        title=f"Identification cost, {ell} devices, {k} active",
        x_label="SNR (dB)",
        y_label="Number of channel-uses, n")


def cmd_plot(args) -> int:
    points, geometry = _load_sweep_points(args.csv)
    if not 0.0 < args.target_success <= 1.0:
        raise ConfigError("--target-success: must lie in (0, 1]")
    if args.kind == "success":
        svg = _plot_success(points, geometry, args.target_success)
    else:
        criterion = _parse_criterion(args.criterion, "--criterion")
        svg = _plot_cost(points, geometry, args.target_success, args.decoder,
                         criterion)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, f"{args.kind}.svg")
    _atomic_write(path, svg)
    print(f"wrote {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mnac",
        description="Simulate and decode sparse device activity over a"
                    " non-coherent on-off random access channel.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_cap = sub.add_parser("capacity",
                           help="per-SNR rate optimum and channel-use budget")
    p_cap.add_argument("--config", required=True, help="INI experiment file")
    p_cap.add_argument("--out", default=".", help="output directory")
    p_cap.set_defaults(func=cmd_capacity)

    p_sweep = sub.add_parser("sweep",
                             help="Monte Carlo success-probability sweep")
    p_sweep.add_argument("--config", required=True, help="INI experiment file")
    p_sweep.add_argument("--out", default=".", help="output directory")
    p_sweep.add_argument("--seed", type=int, default=None,
                         help="override [sweep] seed")
    p_sweep.add_argument("--trials", type=int, default=None,
                         help="override [sweep] trials")
    p_sweep.set_defaults(func=cmd_sweep)

    p_plot = sub.add_parser("plot", help="render sweep CSV to a static SVG")
    p_plot.add_argument("csv", help="sweep results CSV")
    p_plot.add_argument("--kind", choices=("success", "cost"),
                        default="success")
    p_plot.add_argument("--out", default=".", help="output directory")
    p_plot.add_argument("--target-success", type=float, default=0.95,
                        help="success level defining the empirical cost")
    p_plot.add_argument("--decoder", default="bp_st",
                        help="decoder for the cost overlay")
    p_plot.add_argument("--criterion", default="exact",
                        help="criterion for the cost overlay, config syntax")
    p_plot.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

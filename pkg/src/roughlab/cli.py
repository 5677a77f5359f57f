"""Command line front end: simulation, RV computation, estimation, experiments.

Exit codes: 0 success, 2 usage or validation, 3 numerical failure
(no crossing, degenerate data), 4 I/O.
"""

import argparse
import os
import sys

import numpy as np

from . import experiments as xp
from ._csvio import FLOAT_FMT, pick_column, read_table, write_rows
from .errors import (
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    DegenerateSeriesError,
    ExperimentFailureError,
    InvalidArgumentError,
    RoughlabError,
)
from .estimator import estimate_roughness, log_regression_estimate, mq_delta
from .pathvar import SampledPath
from .simulate import ModelSpec, simulate_fbm, simulate_market
from .volatility import acf as acf_op
from .volatility import realized_vol_series

_EXPERIMENTS = ("fbm-table", "sv-table", "fou-sweep", "k-sensitivity")

_MODEL_CHOICES = ("fbm", "abs-bm-vol", "ou-sv", "fou-sv")


def _float_list(text):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}") from None


def _int_list(text):
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from None


def _delta_spec(text):
    """Lags as 'lo:hi' (inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        lo, _, hi = text.partition(":")
        try:
            return list(range(int(lo), int(hi) + 1))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad lag range: {text!r}") from None
    return _int_list(text)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="roughlab",
        description="Pathwise roughness measurement via normalized p-th variation.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    subparsers = {}

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key=value file supplying any long flag; flags override it")
        subparsers[name] = p
        return p

    p = add("simulate", "write a simulated market (or fBM path) as CSV")
    p.add_argument("--model", choices=_MODEL_CHOICES, default="ou-sv")
    p.add_argument("--hurst", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--sigma0", type=float, default=1.0)
    p.add_argument("--y0", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")

    p = add("rv", "realized volatility series from a price CSV")
    p.add_argument("input", nargs="?")
    p.add_argument("--window", type=int, default=300)
    p.add_argument("--step", type=int)
    p.add_argument("--normalized", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--log", action="store_true", help="emit log rv")
    p.add_argument("-o", "--output")

    p = add("estimate", "roughness estimate from a series CSV")
    p.add_argument("input", nargs="?")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--k", type=int)
    group.add_argument("--auto-k", action="store_true")
    p.add_argument("--method", choices=("single-t", "least-squares"), default="single-t")
    p.add_argument("--column", help="value column (default: value, rv, log_rv, log_price, else 2nd)")
    p.add_argument("--t", type=float, help="evaluation time in the input's units (default: end)")
    p.add_argument("--guard-zero-denominators", action="store_true")
    p.add_argument("--curve-out", help="write the (h, W, log W) grid as CSV")

    p = add("regress", "moment-scaling log regression from a series CSV")
    p.add_argument("input", nargs="?")
    p.add_argument("--q-grid", type=_float_list, default=[0.5, 1.0, 1.5, 2.0, 3.0])
    p.add_argument("--delta-grid", type=_delta_spec, default=list(range(1, 51)))
    p.add_argument("--log-input", action="store_true")
    p.add_argument("--column")
    p.add_argument("--points-out", help="write the log-log regression points as CSV")

    p = add("acf", "sample autocorrelation of a series CSV")
    p.add_argument("input", nargs="?")
    p.add_argument("--max-lag", type=int, default=20)
    p.add_argument("--column")
    p.add_argument("-o", "--output")

    p = add("experiment", "run a packaged study and write raw/summary/histogram CSVs")
    p.add_argument("name", nargs="?", choices=_EXPERIMENTS)
    p.add_argument("--model", choices=_MODEL_CHOICES[1:], default="ou-sv")
    p.add_argument("--hurst", type=float)
    p.add_argument("--h-list", type=_float_list)
    p.add_argument("--paths", type=int)
    p.add_argument("--L", type=int, dest="big_l")
    p.add_argument("--K", type=int, dest="big_k")
    p.add_argument("--window", type=int, default=300)
    p.add_argument("--horizon", type=float)
    p.add_argument("--iv-mode", choices=("window-rms", "point"))
    p.add_argument("--method", choices=("single-t", "least-squares"), default="single-t")
    p.add_argument("--k-grid", type=_int_list)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int)
    p.add_argument("-o", "--output", help="output file prefix (default: experiment name)")

    return parser, subparsers


def _load_config(path, subparser):
    # keyed by both dest and flag spelling, so L= works where dest is big_l
    by_key = {}
    for action in subparser._actions:
        if action.option_strings and action.dest != "config":
            by_key[action.dest] = action
            for opt in action.option_strings:
                by_key[opt.lstrip("-").lower().replace("-", "_")] = action
    overrides = {}
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidArgumentError(f"{path}:{line_no}: expected key=value, got {raw!r}")
            key, _, value = line.partition("=")
            dest = key.strip().lower().replace("-", "_")
            value = value.strip()
            if dest not in by_key:
                raise InvalidArgumentError(f"{path}:{line_no}: unknown option {key.strip()!r}")
            action = by_key[dest]
            overrides[action.dest] = _coerce(action, value, path, line_no)
    return overrides


def _coerce(action, value, path, line_no):
    if isinstance(action, (argparse._StoreTrueAction, argparse.BooleanOptionalAction)):
        lowered = value.lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise InvalidArgumentError(f"{path}:{line_no}: expected a boolean, got {value!r}")
    if action.type is not None:
        try:
            return action.type(value)
        except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
            raise InvalidArgumentError(f"{path}:{line_no}: {exc}") from None
    if action.choices and value not in action.choices:
        raise InvalidArgumentError(
            f"{path}:{line_no}: {value!r} not one of {sorted(action.choices)}"
        )
    return value


def _require(args, attr, flag, command):
    value = getattr(args, attr, None)
    if value is None:
        raise InvalidArgumentError(f"{command} requires {flag}")
    return value


def _resolve_threads(explicit):
    if explicit is not None:
        if explicit < 1:
            raise InvalidArgumentError("--threads must be >= 1")
        return explicit
    env = os.environ.get("ROUGHLAB_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidArgumentError(f"ROUGHLAB_THREADS is not an integer: {env!r}") from None
    return os.cpu_count() or 1


def _read_series(args, preferences):
    input_path = _require(args, "input", "an input CSV", args.command)
    header, cols = read_table(input_path)
    name = pick_column(header, cols, getattr(args, "column", None), preferences)
    values = cols[name]
    lowered = {h.lower(): h for h in header}
    time_col = lowered.get("time") or lowered.get("timestamp")
    times = cols[time_col] if time_col else None
    return times, values, name


def _to_unit_path(times, values):
    """Affine time rescale to [0, 1]; sample index grid when no time column exists."""
    if times is None:
        return SampledPath.from_values(values)
    t0, t1 = times[0], times[-1]
    if t1 <= t0:
        raise InvalidArgumentError("time column must be increasing")
    return SampledPath((times - t0) / (t1 - t0), values)


def cmd_simulate(args):
    steps = _require(args, "steps", "--steps", "simulate")
    out = _require(args, "output", "-o/--output", "simulate")
    variant = args.model.replace("-", "_")
    seed = args.seed
    if variant == "fbm":
        hurst = _require(args, "hurst", "--hurst", "simulate --model fbm")
        path = simulate_fbm(hurst, steps, horizon=args.horizon, seed=seed)
        times, log_price = path.times, path.values
        price = np.exp(log_price)
        spot = np.zeros_like(log_price)  # fbm is a bare signal; no volatility component
    else:
        kwargs = {"gamma": args.gamma, "theta": args.theta, "sigma0": args.sigma0}
        if variant == "fou_sv":
            kwargs["hurst"] = _require(args, "hurst", "--hurst", "simulate --model fou-sv")
            kwargs["y0"] = args.y0
        model = ModelSpec(variant=variant, **kwargs)
        market = simulate_market(model, steps, horizon=args.horizon, seed=seed)
        times = market.price.times
        price = market.price.values
        log_price = market.log_price.values
        spot = market.spot_vol.values
    write_rows(
        out,
        ["time", "price", "log_price", "spot_vol"],
        zip(times, price, log_price, spot),
    )
    print(f"wrote {out}: {times.size} rows")
    return EXIT_OK


def cmd_rv(args):
    out = _require(args, "output", "-o/--output", "rv")
    times, values, name = _read_series(args, preferences=("price", "log_price"))
    if name.lower() == "price":
        if np.any(values <= 0):
            raise InvalidArgumentError("price column must be strictly positive")
        values = np.log(values)
    path = _to_unit_path(times, values) if times is None else SampledPath(times, values)
    rv = realized_vol_series(path, window=args.window, step=args.step, normalized=args.normalized)
    out_values = rv.values
    header = ["time", "rv"]
    if args.log:
        if np.any(rv.values <= 0):
            raise DegenerateSeriesError("zero realized volatility window; cannot take logs")
        out_values = np.log(rv.values)
        header = ["time", "log_rv"]
    write_rows(out, header, zip(rv.times, out_values))
    print(f"wrote {out}: {rv.values.size} windows")
    return EXIT_OK


def cmd_estimate(args):
    times, values, _ = _read_series(args, preferences=("value", "rv", "log_rv", "log_price"))
    if args.k is None and not args.auto_k:
        raise InvalidArgumentError("estimate requires --k or --auto-k")
    path = _to_unit_path(times, values)
    t_eval = None
    if args.t is not None:
        if times is None:
            t_eval = args.t
        else:
            t_eval = (args.t - times[0]) / (times[-1] - times[0])
    est = estimate_roughness(
        path,
        K=args.k,
        method=args.method.replace("-", "_"),
        t=t_eval,
        zero_denominator_guard=args.guard_zero_denominators,
    )
    print(f"h_hat = {est.h_hat:.6f}")
    print(f"p_hat = {est.p_hat:.6f}")
    print(f"method = {est.method}")
    print(f"K = {est.K}")
    print(f"L = {est.L}")
    print(f"residual = {est.residual:.6g}")
    if est.at_boundary:
        print("note: least-squares argmin at the grid boundary")
    if args.curve_out:
        write_rows(
            args.curve_out,
            ["h", "w", "log_w"],
            zip(est.curve.h_grid, est.curve.w_values, est.curve.log_w_values),
        )
        print(f"wrote {args.curve_out}: {est.curve.h_grid.size} rows")
    return EXIT_OK


def cmd_regress(args):
    _, values, _ = _read_series(args, preferences=("rv", "value", "log_rv", "spot_vol"))
    series = values
    if args.log_input:
        if np.any(series <= 0):
            raise InvalidArgumentError("--log-input requires strictly positive values")
        series = np.log(series)
    est = log_regression_estimate(series, q_grid=args.q_grid, delta_grid=args.delta_grid)
    print(f"{'q':>6}  {'xi_q':>10}  {'log_C_q':>10}")
    for q, xi, c in zip(est.q_grid, est.xi, est.intercepts):
        print(f"{q:>6g}  {xi:>10.6f}  {c:>10.6f}")
    print(f"h_hat_r = {est.h_hat_r:.6f}")
    if args.points_out:
        rows = []
        for q in est.q_grid:
            for d in est.delta_grid:
                m = mq_delta(series, float(q), int(d))
                if m > 0:
                    rows.append((q, d, np.log(float(d)), np.log(m)))
        write_rows(args.points_out, ["q", "delta", "log_delta", "log_m"], rows)
        print(f"wrote {args.points_out}: {len(rows)} rows")
    return EXIT_OK


def cmd_acf(args):
    _, values, _ = _read_series(args, preferences=("error", "log_error", "rv", "value"))
    lags = acf_op(values, args.max_lag)
    if args.output:
        write_rows(args.output, ["lag", "acf"], enumerate(lags))
        print(f"wrote {args.output}: {lags.size} rows")
    else:
        print("lag,acf")
        for k, val in enumerate(lags):
            print(f"{k},{FLOAT_FMT % val}")
    return EXIT_OK


def _print_report(report):
    print(f"# {report.name}")
    hdr = (
        f"{'model':<12}{'hurst':>7}{'col':>5}{'n':>5}"
        f"{'min':>9}{'q1':>9}{'median':>9}{'mean':>9}{'q3':>9}{'max':>9}"
    )
    print(hdr)
    for s in report.summaries:
        hurst = f"{s.hurst:.2f}" if s.hurst is not None else "-"
        st = s.stats
        print(
            f"{s.model:<12}{hurst:>7}{s.column:>5}{st.n:>5}"
            f"{st.min:>9.4f}{st.q1:>9.4f}{st.median:>9.4f}{st.mean:>9.4f}{st.q3:>9.4f}{st.max:>9.4f}"
        )
    print(f"wall time: {report.wall_time:.1f}s")


def cmd_experiment(args):
    name = _require(args, "name", "an experiment name", "experiment")
    threads = _resolve_threads(args.threads)
    prefix = args.output or name
    iv_mode = (args.iv_mode or "").replace("-", "_") or None
    method = args.method.replace("-", "_")
    try:
        if name == "fbm-table":
            report = xp.run_fbm_study(
                args.h_list or [0.1, 0.3, 0.5, 0.8],
                L=args.big_l or 90000,
                K=args.big_k or 300,
                n_paths=args.paths or 50,
                base_seed=args.seed,
                threads=threads,
                horizon=args.horizon or 1.0,
                method=method,
            )
        elif name == "sv-table":
            model_kwargs = {"variant": args.model.replace("-", "_")}
            if model_kwargs["variant"] == "fou_sv":
                model_kwargs["hurst"] = _require(args, "hurst", "--hurst", "sv-table with fou-sv")
            report = xp.run_sv_study(
                ModelSpec(**model_kwargs),
                L=args.big_l or 90000,
                K=args.big_k or 300,
                window=args.window,
                n_paths=args.paths or 100,
                base_seed=args.seed,
                threads=threads,
                horizon=args.horizon or xp.SV_DEFAULT_HORIZON,
                iv_mode=iv_mode or "window_rms",
                method=method,
            )
        elif name == "fou-sweep":
            report = xp.run_fou_sweep(
                args.h_list or [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8],
                n_paths=args.paths or 20,
                L=args.big_l or 90000,
                K=args.big_k or 300,
                base_seed=args.seed,
                threads=threads,
                window=args.window,
                horizon=args.horizon or xp.SV_DEFAULT_HORIZON,
                iv_mode=iv_mode or "point",
                method=method,
            )
        else:
            hurst = args.hurst if args.hurst is not None else 0.1
            L = args.big_l or 90000
            path = simulate_fbm(hurst, L, horizon=args.horizon or 1.0, seed=args.seed)
            k_grid = args.k_grid or [150, 180, 200, 225, 250, 300, 360, 450, 500, 600]
            points = xp.run_k_sensitivity(path, k_grid, method=method)
            out_path = xp.write_k_sensitivity_csv(points, f"{prefix}_k.csv")
            print(f"{'K':>6}  {'h_hat':>9}  note")
            for pt in points:
                h_txt = f"{pt.h_hat:.4f}" if pt.h_hat is not None else "-"
                print(f"{pt.K:>6}  {h_txt:>9}  {pt.note}")
            print(f"wrote {out_path}")
            return EXIT_OK
    except ExperimentFailureError as exc:
        if exc.report is not None:
            paths = xp.write_report_csvs(exc.report, prefix)
            print(f"error: {exc}", file=sys.stderr)
            print(f"partial outputs kept: {', '.join(paths.values())}", file=sys.stderr)
        raise
    paths = xp.write_report_csvs(report, prefix)
    _print_report(report)
    print("wrote " + ", ".join(paths.values()))
    return EXIT_OK


_HANDLERS = {
    "simulate": cmd_simulate,
    "rv": cmd_rv,
    "estimate": cmd_estimate,
    "regress": cmd_regress,
    "acf": cmd_acf,
    "experiment": cmd_experiment,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser, subparsers = build_parser()
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        if args.config:
            overrides = _load_config(args.config, subparsers[args.command])
            subparsers[args.command].set_defaults(**overrides)
            args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    except RoughlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main_entry():
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    main_entry()

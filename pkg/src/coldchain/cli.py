"""Command-line driver: sweep orchestration and machine-readable outputs.

Subcommands
-----------
decay-scan      collective decay rates of every eigenstate over a period range
cross-section   scattering cross-section spectrum of a fixed chain
fiber-spectrum  guided-mode transmission/reflection spectrum, or T/R versus N
scaling         minimal decay rate versus N with a power-law fit
disorder-scan   disorder-averaged minimal decay rate over a period range

All lengths are in units of lambda0 and all rates/detunings in units of
gamma0; every output file records the tool version, the fully resolved
configuration and the master seed, so identical headers imply bit-identical
files.  Progress goes to stderr; ``--out -`` streams the table to stdout.
"""

from __future__ import annotations

import argparse
import configparser
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

import coldchain
from coldchain.core import (
    AtomArray,
    FiberGeometry,
    PolarizationAxis,
    regular_chain,
)
from coldchain.fiber import sigma_fiber, solve_he11
from coldchain.scaling import disorder_ensemble, optimize_period, scaling_study
from coldchain.scattering import s_matrix_direct
from coldchain.spectral import (
    cross_section_direct,
    cross_section_expanded,
    eigensystem,
    ipr,
    nn_correlation,
    oscillator_strengths,
)
from coldchain.vacuum import sigma_vacuum
from coldchain.core import K0

_UNITS_NOTE = "lengths in lambda0; rates, shifts and detunings in gamma0"


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float) and np.isnan(x):
        return "nan"
    return format(float(x), ".17g")


def _parse_frange(text: str) -> np.ndarray:
    try:
        lo, hi, step = (float(t) for t in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected lo:hi:step, got {text!r}"
        ) from exc
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    n = int(np.floor((hi - lo) / step + 0.5)) + 1
    return lo + step * np.arange(n)


def _parse_irange(text: str) -> list[int]:
    try:
        lo, hi, step = (int(t) for t in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected lo:hi:step integers, got {text!r}"
        ) from exc
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return list(range(lo, hi + 1, step))


def _parse_window(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(t) for t in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from exc
    return lo, hi


def _axis(args) -> PolarizationAxis:
    return (
        PolarizationAxis.TRANSVERSE_X
        if args.axis == "transverse"
        else PolarizationAxis.LONGITUDINAL_Z
    )


def _fiber(args) -> FiberGeometry | None:
    if args.env != "fiber":
        return None
    return FiberGeometry(
        radius=args.fiber_radius,
        permittivity=args.fiber_eps,
        atom_offset=args.atom_offset,
    )


def _delta_grid(args) -> np.ndarray:
    if args.delta_points < 2:
        raise SystemExit("--delta-points must be >= 2")
    return np.linspace(args.delta_min, args.delta_max, args.delta_points)


def _resolved_config(args) -> dict:
    skip = {"func", "config", "out"}
    cfg = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in skip and not k.startswith("_")
    }
    return {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in cfg.items()}


def _header_lines(args) -> list[str]:
    cfg = _resolved_config(args)
    cfg_str = " ".join(f"{k}={v}" for k, v in cfg.items())
    return [
        f"coldchain {coldchain.__version__}",
        f"command: {args.subcommand}",
        f"config: {cfg_str}",
        f"seed: {getattr(args, 'seed', 0)}",
        f"units: {_UNITS_NOTE}",
    ]


def _write_table(args, columns: list[str], rows: list[list]) -> None:
    import csv

    header = _header_lines(args)
    if args.format == "json":
        payload = {
            "header": header,
            "columns": columns,
            "rows": [[(r if isinstance(r, str) else float(r)) for r in row] for row in rows],
        }
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        for line in header:
            buf.write(f"# {line}\r\n")
        writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([c if isinstance(c, str) else _fmt(c) for c in row])
        text = buf.getvalue()
    if args.out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        raise SystemExit(2) from exc
    print(f"wrote {args.out} ({len(rows)} rows)", file=sys.stderr)


def _write_json(args, path: str, payload: dict) -> None:
    payload = {"header": _header_lines(args), **payload}
    try:
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        raise SystemExit(2) from exc
    print(f"wrote {path}", file=sys.stderr)


def _parallel_map(fn, items, threads: int):
    """Order-preserving map, threaded when requested.

    Results are assembled by item index, never by completion order, so the
    output is identical for any thread count.
    """
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, item) for item in items]
        return [f.result() for f in futures]


# ----------------------------------------------------------------- commands


def _sigma_for_env(array: AtomArray):
    return sigma_fiber(array) if array.is_fiber else sigma_vacuum(array)


def cmd_decay_scan(args) -> None:
    if args.dz_range is None:
        raise SystemExit("decay-scan needs --dz-range")
    axis, fiber = _axis(args), _fiber(args)
    dzs = args.dz_range

    def work(dz: float):
        array = regular_chain(args.n, dz, axis, fiber)
        es = eigensystem(_sigma_for_env(array))
        out = []
        for j in range(es.n):
            corr = nn_correlation(es, j) if es.n >= 2 else float("nan")
            out.append(
                [dz, j, es.decay_rates[j], es.lambdas[j].real, corr]
            )
        return out

    chunks = _parallel_map(work, list(dzs), args.threads)
    rows = [row for chunk in chunks for row in chunk]
    _write_table(
        args,
        ["delta_z", "state_index", "gamma_over_gamma0", "re_lambda", "nn_correlation"],
        rows,
    )


def cmd_cross_section(args) -> None:
    if args.dz is None:
        raise SystemExit("cross-section needs --dz")
    axis, fiber = _axis(args), _fiber(args)
    array = regular_chain(args.n, args.dz, axis, fiber)
    sigma = _sigma_for_env(array)
    k_vec = np.array([0.0, 0.0, K0]) if args.photon == "axial" else np.array([K0, 0.0, 0.0])
    grid = _delta_grid(args)
    es = eigensystem(sigma)
    f = oscillator_strengths(es, array, k_vec)
    table = cross_section_expanded(es, f, grid)
    direct = cross_section_direct(sigma, array, k_vec, grid)
    worst = np.max(np.abs(table.total - direct.total)) / np.max(np.abs(direct.total))
    print(f"expansion vs direct inversion: max rel diff {worst:.2e}", file=sys.stderr)
    columns = ["delta", "sigma_total", "sigma_total_norm"] + [
        f"sigma_{j + 1:03d}" for j in range(es.n)
    ]
    norm = K0**2 / array.n_atoms
    rows = [
        [grid[i], table.total[i], table.total[i] * norm]
        + [table.partials[j, i] for j in range(es.n)]
        for i in range(grid.size)
    ]
    _write_table(args, columns, rows)


def _fiber_resonance_point(n: int, dz: float, axis, fiber) -> tuple[float, float, float]:
    """(T, R, resonance detuning) of the most subradiant state."""
    array = regular_chain(n, dz, axis, fiber)
    sigma = sigma_fiber(array)
    es = eigensystem(sigma)
    mode = solve_he11(fiber)
    delta_star = float(es.lambdas[0].real)
    s_ff, s_bf = s_matrix_direct(sigma, array, mode, np.array([delta_star]))
    return float(abs(s_ff[0]) ** 2), float(abs(s_bf[0]) ** 2), delta_star


def cmd_fiber_spectrum(args) -> None:
    if args.env != "fiber":
        raise SystemExit("fiber-spectrum requires --env fiber")
    axis, fiber = _axis(args), _fiber(args)

    if args.n_range is not None:
        def work(n: int):
            if args.dz is not None:
                dz = args.dz
            else:
                dz, _ = optimize_period(n, axis, fiber, window=args.dz_window)
            t, r, delta_star = _fiber_resonance_point(n, dz, axis, fiber)
            return [n, t, r, dz, delta_star]

        rows = _parallel_map(work, list(args.n_range), args.threads)
        _write_table(
            args,
            ["n", "t_at_resonance", "r_at_resonance", "delta_z_used", "delta_resonance"],
            rows,
        )
        return

    if args.dz is not None:
        dz = args.dz
    else:
        dz, _ = optimize_period(args.n, axis, fiber, window=args.dz_window)
        print(f"optimized period dz = {dz:.6f}", file=sys.stderr)
    array = regular_chain(args.n, dz, axis, fiber)
    sigma = sigma_fiber(array)
    mode = solve_he11(fiber)
    grid = _delta_grid(args)
    s_ff, s_bf = s_matrix_direct(sigma, array, mode, grid)
    rows = [
        [grid[i], float(abs(s_ff[i]) ** 2), float(abs(s_bf[i]) ** 2)]
        for i in range(grid.size)
    ]
    _write_table(args, ["delta", "t", "r"], rows)


def cmd_scaling(args) -> None:
    if args.n_range is None:
        raise SystemExit("scaling needs --n-range")
    axis, fiber = _axis(args), _fiber(args)
    n_values = list(args.n_range)

    result = scaling_study(
        n_values,
        axis,
        fiber,
        window=args.dz_window,
        fixed_period=args.dz,
        fit_window=(args.fit_min, args.fit_max),
    )

    def stats(i: int):
        n = int(result.n_values[i])
        dz = float(result.delta_z_used[i])
        if args.delta_a > 0:
            ens = disorder_ensemble(
                n, dz, args.delta_a, args.realizations, args.seed, axis, fiber
            )
            return ens.gamma_ave, ens.ipr_mean
        array = regular_chain(n, dz, axis, fiber)
        es = eigensystem(_sigma_for_env(array))
        return float(es.decay_rates[0]), ipr(es, 0)

    extras = _parallel_map(stats, list(range(len(n_values))), args.threads)
    rows = [
        [
            int(result.n_values[i]),
            result.delta_z_used[i],
            result.gamma_min[i],
            extras[i][0],
            extras[i][1],
        ]
        for i in range(len(n_values))
    ]
    _write_table(
        args, ["n", "delta_z_used", "gamma_min", "gamma_ave", "ipr_mean"], rows
    )
    summary = {
        "alpha": result.exponent,
        "stderr": result.stderr,
        "fit_window": list(result.fit_window),
        "r_squared": result.r_squared,
    }
    if args.out != "-":
        _write_json(args, os.path.splitext(args.out)[0] + ".summary.json", summary)
    else:
        print(json.dumps(summary, sort_keys=True), file=sys.stderr)


def cmd_disorder_scan(args) -> None:
    if args.dz_range is None:
        raise SystemExit("disorder-scan needs --dz-range")
    axis, fiber = _axis(args), _fiber(args)

    def work(dz: float):
        ens = disorder_ensemble(
            args.n, dz, args.delta_a, args.realizations, args.seed, axis, fiber
        )
        return [dz, ens.gamma_ave, ens.gamma_std, ens.ipr_mean]

    rows = _parallel_map(work, list(args.dz_range), args.threads)
    _write_table(
        args, ["delta_z_reg", "gamma_ave", "gamma_std", "ipr_mean"], rows
    )


# ------------------------------------------------------------------- parser


def _add_shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="INI config file; flags win")
    p.add_argument("--n", type=int, default=10, help="number of atoms")
    p.add_argument("--n-range", type=_parse_irange, default=None, metavar="A:B:STEP")
    p.add_argument("--dz", type=float, default=None, help="chain period [lambda0]")
    p.add_argument("--dz-range", type=_parse_frange, default=None, metavar="A:B:STEP")
    p.add_argument(
        "--dz-window",
        type=_parse_window,
        default=(0.05, 0.499),
        metavar="LO:HI",
        help="period search window for optimization",
    )
    p.add_argument(
        "--axis", choices=["transverse", "longitudinal"], default="transverse"
    )
    p.add_argument("--env", choices=["vacuum", "fiber"], default="vacuum")
    p.add_argument("--fiber-radius", type=float, default=0.25)
    p.add_argument("--fiber-eps", type=float, default=2.1)
    p.add_argument("--atom-offset", type=float, default=0.25)
    p.add_argument("--delta-min", type=float, default=-5.0)
    p.add_argument("--delta-max", type=float, default=5.0)
    p.add_argument("--delta-points", type=int, default=1001)
    p.add_argument("--delta-a", type=float, default=0.0, help="max disorder/2 [lambda0]")
    p.add_argument("--realizations", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("COLDCHAIN_THREADS", "1")),
        help="parallel sweep workers (default $COLDCHAIN_THREADS or 1)",
    )
    p.add_argument("--out", default="-", help="output path, - for stdout")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--fit-min", type=int, default=20)
    p.add_argument("--fit-max", type=int, default=10**9)
    p.add_argument(
        "--photon",
        choices=["axial", "transverse"],
        default="axial",
        help="probe photon direction for cross sections",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coldchain",
        description="Collective decay and guided-mode spectra of 1D emitter chains",
    )
    parser.add_argument("--version", action="version", version=coldchain.__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, fn, doc in [
        ("decay-scan", cmd_decay_scan, "eigenstate decay rates over a period range"),
        ("cross-section", cmd_cross_section, "cross-section spectrum of a fixed chain"),
        ("fiber-spectrum", cmd_fiber_spectrum, "guided T/R spectrum or T/R versus N"),
        ("scaling", cmd_scaling, "minimal decay versus N with power-law fit"),
        ("disorder-scan", cmd_disorder_scan, "ensemble-averaged decay over periods"),
    ]:
        p = sub.add_parser(name, help=doc)
        _add_shared(p)
        p.set_defaults(func=fn)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    """Pre-load INI config values as parser defaults so that flags win."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", default=None)
    known, _ = probe.parse_known_args(argv)
    if known.config is None:
        return
    ini = configparser.ConfigParser()
    if not ini.read(known.config):
        print(f"error: cannot read config {known.config}", file=sys.stderr)
        raise SystemExit(2)
    flat: dict[str, str] = {}
    for section in ini.sections():
        for key, value in ini.items(section):
            flat[key.replace("-", "_")] = value
    for action_group in parser._subparsers._group_actions:  # noqa: SLF001
        for sp in action_group.choices.values():
            for action in sp._actions:  # noqa: SLF001
                if action.dest in flat and action.dest != "config":
                    raw = flat[action.dest]
                    action.default = action.type(raw) if action.type else raw


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    _apply_config(parser, argv)
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except SystemExit:
        raise
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

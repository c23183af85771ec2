"""Command line interface writing CSV curve tables

    brsfading <subcommand> [flags]

Subcommands pdf, cdf, mgf, rho, outage, lcr, afd and simulate evaluate one library
operation over a grid; ``figure {rho,outage,lcr,afd}`` writes one CSV per curve of
the corresponding figure set. Values come from the defaults below, then from
``--config`` (JSON or YAML), then from the flags.

Exit status is 0 on success, 2 for invalid arguments or parameters and 3 when a
numerical procedure misses its accuracy target.
"""
import argparse
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from ._utils import parse_grid, worker_count
from ._version import __version__
from .apps import SampledEnvelopeScenario, ScScenario, afd, lcr, outage_sc
from .checks import NoneType, is_finite, is_grid, is_non_negative, is_positive
from .dist import (
    DiagonalCollapse,
    MgfPoint,
    joint_cdf,
    joint_pdf,
    marginal_cdf,
    mgf,
    power_moments,
    rho_bs,
)
from .errors import UndefinedFadeDurationError
from .mc import dump_pairs, estimate_cdf_grid, estimate_moments, estimate_probability
from .model import BrsParams, RhoClass, params_options, validate
from .options import OptionsFactory, load_config
from .tables import CurveRow, CurveTable, write_summary_csv, write_wide_csv
from .withmeta import WithMeta

logger = logging.getLogger(__name__)

FIGURES = ("rho", "outage", "lcr", "afd")
#: draws of ``simulate`` when --mc is 0
SIMULATE_DRAWS = 10**6

#: (K, m values, rho values) plotted when not overridden
FIGURE_DEFAULTS = {
    "rho": (1.0, (1.0, 2.0, 5.0, 20.0), None),
    "outage": (10.0, (1.0, 5.0), (0.3, 0.8)),
    "lcr": (10.0, (1.0, 5.0), (0.5, 0.9)),
    "afd": (10.0, (1.0, 5.0), (0.5, 0.9)),
}


def _grid(default, doc):
    return WithMeta(default, doc=doc, value_type=tuple, check_all=is_grid)


def _optional(doc, types=(float, int)):
    return WithMeta(None, doc=doc, value_type=list(types) + [NoneType])


_levels = OptionsFactory(
    u_db=_grid(
        parse_grid("-30:2:10"), "Threshold levels 20 log10(u / sqrt(gamma_bar)) in dB"
    ),
    ts=WithMeta(
        1e-3,
        doc="Sampling period T_S in seconds",
        value_type=float,
        check_all=(is_finite, is_positive),
    ),
)

cli_options = OptionsFactory(
    params_options,
    mc=OptionsFactory(
        draws=WithMeta(
            0,
            doc="Monte Carlo draws per curve, 0 disables the MC columns",
            value_type=int,
            check_all=is_non_negative,
        ),
        seed=WithMeta(
            7,
            doc="Seed of the Monte Carlo draws",
            value_type=int,
            check_all=is_non_negative,
        ),
        threads=_optional("Worker threads, capped by BRS_THREADS", types=(int,)),
    ),
    pdf=OptionsFactory(
        r1=_grid(parse_grid("0:0.1:4"), "Envelope values r1"),
        r2=WithMeta(
            1.0,
            doc="Envelope value r2",
            value_type=float,
            check_all=(is_finite, is_non_negative),
        ),
    ),
    cdf=OptionsFactory(
        r1=_grid(parse_grid("0:0.1:4"), "Envelope values r1"),
        r2=_optional("Envelope value r2, omit for the marginal CDF"),
    ),
    mgf=OptionsFactory(
        theta1=_grid((0.0,), "Values of theta1"),
        theta2=WithMeta(
            0.0, doc="Value of theta2", value_type=float, check_all=is_finite
        ),
    ),
    rho_sweep=OptionsFactory(
        m_list=_grid(FIGURE_DEFAULTS["rho"][1], "Nakagami m of each curve"),
        rho_grid=_grid(parse_grid("0:0.05:1"), "Values of rho"),
    ),
    outage=OptionsFactory(
        gamma_bar_db=_grid(parse_grid("0:2:30"), "Average SNR per branch in dB"),
        gamma_th_db=WithMeta(
            10.0,
            doc="Outage threshold SNR in dB",
            value_type=float,
            check_all=is_finite,
        ),
    ),
    lcr=_levels,
    afd=_levels,
    simulate=OptionsFactory(
        draws=WithMeta(
            lambda options: options.mc.draws or SIMULATE_DRAWS,
            doc="Draws of the moment summary, --mc when it is set",
            value_type=int,
            check_all=is_positive,
        ),
        dump_pairs=_optional("File receiving the raw float64 pairs", types=(str,)),
    ),
    figure=OptionsFactory(
        k_factor=_optional("K of every curve (default 1 for rho, 10 otherwise)"),
        m_list=_optional("Nakagami m values of the curves", types=(tuple, list)),
        rho_list=_optional("rho values of the curves", types=(tuple, list)),
        out=WithMeta(
            "figures", doc="Directory receiving the CSV files", value_type=str
        ),
    ),
)


def _draw_count(text):
    value = float(text)
    if not value.is_integer():
        raise argparse.ArgumentTypeError(f"{text} is not a whole number of draws")
    return int(value)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("parameters")
    group.add_argument("--sigma2", type=float, help="diffuse power sigma^2")
    group.add_argument("--k-factor", type=float, help="Rician factor K")
    group.add_argument("--m", type=float, help="Nakagami shaping factor m")
    group.add_argument("--m-list", type=parse_grid, help="m of each curve, e.g. 1,2,5")
    group.add_argument("--rho", type=float, help="correlation coefficient rho")
    group.add_argument(
        "--rho-grid", type=parse_grid, help="rho values, start:step:stop"
    )
    group.add_argument("--gamma-bar-db", type=parse_grid, help="average SNR grid in dB")
    group.add_argument("--gamma-th-db", type=float, help="outage threshold in dB")
    group.add_argument(
        "--u-db", type=parse_grid, help="threshold grid relative to sqrt(gamma_bar), dB"
    )
    group.add_argument("--ts", type=float, help="sampling period in seconds")
    group.add_argument("--r1", type=parse_grid, help="r1 grid (pdf, cdf)")
    group.add_argument("--r2", type=float, help="r2 value (pdf, cdf)")
    group.add_argument("--theta1", type=parse_grid, help="theta1 grid (mgf)")
    group.add_argument("--theta2", type=float, help="theta2 value (mgf)")
    run_group = common.add_argument_group("run")
    run_group.add_argument(
        "--mc", type=_draw_count, help="Monte Carlo draws, 0 disables"
    )
    run_group.add_argument("--seed", type=int, help="Monte Carlo seed")
    run_group.add_argument("--threads", type=int, help="worker threads")
    run_group.add_argument("--out", help="output file (directory for figure)")
    run_group.add_argument("--dump-pairs", help="write raw pairs as little-endian f8")
    run_group.add_argument("--config", help="JSON or YAML file with option values")
    run_group.add_argument(
        "-v", "--verbose", action="count", default=0, help="more logging, repeatable"
    )

    parser = argparse.ArgumentParser(
        prog="brsfading",
        description="Bivariate Rician shadowed fading curves as CSV tables",
        epilog="Options and defaults:\n\n" + cli_options.get_help_table(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("pdf", "joint PDF over r1 at fixed r2"),
        ("cdf", "joint CDF over r1 at fixed r2, marginal CDF without --r2"),
        ("mgf", "joint MGF of the powers over theta1 at fixed theta2"),
        ("rho", "power correlation rho_BS over rho, one column per m"),
        ("outage", "selection combining outage over the average SNR"),
        ("lcr", "level crossing rate per second over the threshold"),
        ("afd", "average fade duration in seconds over the threshold"),
        ("simulate", "Monte Carlo moments next to the analytic values"),
    ):
        subparsers.add_parser(name, parents=[common], help=help_text)
    figure = subparsers.add_parser(
        "figure", parents=[common], help="one CSV per curve of a figure set"
    )
    figure.add_argument("name", choices=FIGURES)
    return parser


def build_options(args):
    """Defaults, overridden by the config file, overridden by the flags"""
    values = load_config(args.config) if args.config else {}

    def put(section, key, value):
        if value is None:
            return
        target = values if section is None else values.setdefault(section, {})
        target[key] = value

    if args.command == "figure":
        put("figure", "k_factor", args.k_factor)
        put("figure", "m_list", args.m_list or (None if args.m is None else (args.m,)))
        put("figure", "rho_list", None if args.rho is None else (args.rho,))
        put("figure", "out", args.out)
    else:
        put(None, "k_factor", args.k_factor)
        put(None, "m", args.m)
        put(None, "rho", args.rho)
        m_list = args.m_list or (None if args.m is None else (args.m,))
        put("rho_sweep", "m_list", m_list)
    put(None, "sigma2", args.sigma2)
    put("rho_sweep", "rho_grid", args.rho_grid)
    put("outage", "gamma_bar_db", args.gamma_bar_db)
    put("outage", "gamma_th_db", args.gamma_th_db)
    for section in ("lcr", "afd"):
        put(section, "u_db", args.u_db)
        put(section, "ts", args.ts)
    put("pdf" if args.command == "pdf" else "cdf", "r1", args.r1)
    put("pdf" if args.command == "pdf" else "cdf", "r2", args.r2)
    put("mgf", "theta1", args.theta1)
    put("mgf", "theta2", args.theta2)
    put("mc", "draws", args.mc)
    put("mc", "seed", args.seed)
    put("mc", "threads", args.threads)
    put("simulate", "dump_pairs", args.dump_pairs)
    return cli_options.create(values)


def _map_rows(function, items, threads):
    """function applied to every item by a worker pool, results in item order"""
    items = list(items)
    workers = min(worker_count(threads), max(1, len(items)))
    if workers == 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(function, items))


def _params(options):
    return validate(BrsParams.from_options(options))


def _label(value):
    return f"{value:g}"


def pdf_table(options):
    params = _params(options)
    r2 = options.pdf.r2

    def row(r1):
        value = joint_pdf(params, r1, r2)
        if isinstance(value, DiagonalCollapse):
            value = value.marginal_density
        return CurveRow(r1, value)

    diagonal = params.rho_class is RhoClass.DEGENERATE_HIGH
    if diagonal:
        logger.warning(
            "rho=%g: density reported along the diagonal r1 = r2", params.rho
        )
    return CurveTable.for_params(
        params,
        rows=_map_rows(row, options.pdf.r1, options.mc.threads),
        quantity="joint_pdf",
        r2=r2,
        diagonal_collapse=diagonal,
    )


def cdf_table(options):
    params = _params(options)
    r2 = options.cdf.r2
    mc = options.mc
    r1_grid = options.cdf.r1
    if r2 is None:
        y = _map_rows(lambda r1: marginal_cdf(params, r1), r1_grid, mc.threads)
    else:
        y = _map_rows(lambda r1: joint_cdf(params, r1, r2), r1_grid, mc.threads)

    y_mc = y_se = [None] * len(y)
    if mc.draws:
        if r2 is None:
            grid = estimate_cdf_grid(
                params, r1_grid, mc.draws, mc.seed, threads=mc.threads
            )
            y_mc, y_se = grid.marginal.value, grid.marginal.std_error
        else:
            estimates = [
                estimate_probability(
                    lambda a, b, r1=r1: (a <= r1) & (b <= r2),
                    params,
                    mc.draws,
                    mc.seed,
                    threads=mc.threads,
                )
                for r1 in r1_grid
            ]
            y_mc = [e.value for e in estimates]
            y_se = [e.std_error for e in estimates]
    rows = [CurveRow(*values) for values in zip(r1_grid, y, y_mc, y_se)]
    return CurveTable.for_params(
        params,
        seed=mc.seed if mc.draws else None,
        rows=rows,
        quantity="marginal_cdf" if r2 is None else "joint_cdf",
        r2=r2,
    )


def mgf_table(options):
    params = _params(options)
    theta2 = options.mgf.theta2
    y = _map_rows(
        lambda theta1: mgf(params, MgfPoint(theta1, theta2)),
        options.mgf.theta1,
        options.mc.threads,
    )
    rows = [CurveRow(x, value) for x, value in zip(options.mgf.theta1, y)]
    return CurveTable.for_params(params, rows=rows, quantity="mgf", theta2=theta2)


def rho_curve(params, rho_grid, mc):
    """rho_BS against rho for one (sigma^2, K, m)"""
    points = [params.with_rho(rho) for rho in rho_grid]
    y = _map_rows(rho_bs, points, mc.threads)
    rows = []
    for rho, point, value in zip(rho_grid, points, y):
        if mc.draws:
            estimate = estimate_moments(point, mc.draws, mc.seed, threads=mc.threads)
            rows.append(
                CurveRow(rho, value, estimate.rho_bs.value, estimate.rho_bs.std_error)
            )
        else:
            rows.append(CurveRow(rho, value))
    table = CurveTable.for_params(
        params, seed=mc.seed if mc.draws else None, rows=rows, quantity="rho_bs"
    )
    table.header["rho"] = "x"
    return table


def outage_curve(k_factor, m, rho, gamma_bar_db, gamma_th_db, mc):
    """Outage against the average SNR in dB; MC draws are shared by all rows"""
    scenarios = [
        ScScenario.from_db(g, k_factor, m, rho, gamma_th_db) for g in gamma_bar_db
    ]
    y = _map_rows(outage_sc, scenarios, mc.threads)
    y_mc = y_se = [None] * len(y)
    if mc.draws:
        # |H_k| scales with sigma: draw once with sigma^2 = 1, rescale the threshold
        unit = BrsParams(1.0, k_factor, m, rho)
        levels = [math.sqrt(s.gamma_th / s.params().sigma2) for s in scenarios]
        grid = estimate_cdf_grid(unit, levels, mc.draws, mc.seed, threads=mc.threads)
        y_mc, y_se = grid.joint.value, grid.joint.std_error
    header = {
        "sigma2": "gamma_bar/(1 + k_factor)",
        "k_factor": k_factor,
        "m": m,
        "rho": rho,
        "seed": mc.seed if mc.draws else None,
        "quantity": "outage_sc",
        "gamma_th_db": gamma_th_db,
    }
    rows = [CurveRow(*values) for values in zip(gamma_bar_db, y, y_mc, y_se)]
    return CurveTable(header, rows)


def _fade_duration(scenario):
    try:
        return afd(scenario)
    except UndefinedFadeDurationError:
        return math.inf


def crossing_curve(params, u_db, ts, mc, *, quantity, normalized=False):
    """LCR or AFD against the threshold in dB relative to sqrt(gamma_bar)

    With ``normalized`` the LCR is multiplied by T_S and the AFD divided by it.
    """
    scenarios = [SampledEnvelopeScenario.from_db(params, u, ts) for u in u_db]
    scale = ts if normalized else 1.0
    if quantity == "lcr":
        y = [v * scale for v in _map_rows(lcr, scenarios, mc.threads)]
    else:
        y = [v / scale for v in _map_rows(_fade_duration, scenarios, mc.threads)]

    y_mc = y_se = [None] * len(y)
    if mc.draws:
        levels = [s.u for s in scenarios]
        grid = estimate_cdf_grid(params, levels, mc.draws, mc.seed, threads=mc.threads)
        crossing = np.asarray(grid.crossing.value)
        marginal = np.asarray(grid.marginal.value)
        if quantity == "lcr":
            y_mc = crossing / ts * scale
            y_se = np.asarray(grid.crossing.std_error) / ts * scale
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(crossing > 0, marginal / crossing, np.inf)
                # delta method; the crossing event is contained in R_1 < u
                y_se = ratio * np.sqrt((1.0 / crossing - 1.0 / marginal) / mc.draws)
            y_mc = ratio * ts / scale
            y_se = np.where(crossing > 0, y_se * ts / scale, np.inf)
    rows = [CurveRow(*values) for values in zip(u_db, y, y_mc, y_se)]
    return CurveTable.for_params(
        params,
        seed=mc.seed if mc.draws else None,
        rows=rows,
        quantity=f"{quantity}{'_normalized' if normalized else ''}",
        ts=ts,
    )


def _value_and_error(estimate):
    return estimate.value, estimate.std_error


def simulate_rows(options):
    params = _params(options)
    mc = options.mc
    draws = options.simulate.draws
    logger.info("simulating %d pairs with seed %d", draws, mc.seed)
    if options.simulate.dump_pairs is not None:
        dump_pairs(
            options.simulate.dump_pairs, params, draws, mc.seed, threads=mc.threads
        )
    estimate = estimate_moments(params, draws, mc.seed, threads=mc.threads)
    analytic = power_moments(params)
    rows = [
        (name, getattr(analytic, name), *_value_and_error(getattr(estimate, name)))
        for name in ("m10", "m01", "m20", "m02", "m11")
    ]
    rows.append(
        ("rho_bs", rho_bs(params), estimate.rho_bs.value, estimate.rho_bs.std_error)
    )
    header = dict(params.to_dict(), seed=mc.seed, draws=draws)
    return rows, header


def _emit(write, out):
    if out is None:
        write(sys.stdout)
    else:
        write(out)
        logger.info("wrote %s", out)


def figure_tables(name, options):
    """{file name: CurveTable} of the curves of figure ``name``"""
    section = options.figure
    default_k, default_m, default_rho = FIGURE_DEFAULTS[name]
    k_factor = default_k if section.k_factor is None else float(section.k_factor)
    m_list = default_m if section.m_list is None else section.m_list
    rho_list = default_rho if section.rho_list is None else section.rho_list
    mc = options.mc
    tables = {}
    if name == "rho":
        for m in m_list:
            params = BrsParams(1.0, k_factor, m, 0.5)
            curve = rho_curve(params, options.rho_sweep.rho_grid, mc)
            tables[f"rho_m{_label(m)}.csv"] = curve
        return tables
    for m in m_list:
        for rho in rho_list:
            file_name = f"{name}_m{_label(m)}_rho{_label(rho)}.csv"
            if name == "outage":
                tables[file_name] = outage_curve(
                    k_factor,
                    m,
                    rho,
                    options.outage.gamma_bar_db,
                    options.outage.gamma_th_db,
                    mc,
                )
            else:
                levels = options[name]
                params = validate(BrsParams.from_mean_power(1.0, k_factor, m, rho))
                tables[file_name] = crossing_curve(
                    params, levels.u_db, levels.ts, mc, quantity=name, normalized=True
                )
    return tables


def execute(options, args):
    command = args.command
    logger.info("running %s", command)
    if command == "figure":
        directory = Path(options.figure.out)
        directory.mkdir(parents=True, exist_ok=True)
        for file_name, table in figure_tables(args.name, options).items():
            table.write_csv(directory / file_name)
            logger.info("wrote %s", directory / file_name)
        return
    if command == "simulate":
        rows, header = simulate_rows(options)
        _emit(lambda f: write_summary_csv(rows, f, header=header), args.out)
        return
    if command == "rho":
        base = _params(options)
        curves = {
            f"rho_bs_m{_label(m)}": rho_curve(
                validate(BrsParams(base.sigma2, base.k_factor, m, 0.5)),
                options.rho_sweep.rho_grid,
                options.mc,
            )
            for m in options.rho_sweep.m_list
        }
        header = {"sigma2": base.sigma2, "k_factor": base.k_factor, "m": "per column"}
        header.update(rho="x", seed=options.mc.seed if options.mc.draws else None)
        _emit(
            lambda f: write_wide_csv(curves, f, x_name="rho", header=header), args.out
        )
        return
    if command == "outage":
        params = _params(options)
        table = outage_curve(
            params.k_factor,
            params.m,
            params.rho,
            options.outage.gamma_bar_db,
            options.outage.gamma_th_db,
            options.mc,
        )
    elif command in ("lcr", "afd"):
        levels = options[command]
        table = crossing_curve(
            _params(options), levels.u_db, levels.ts, options.mc, quantity=command
        )
    else:
        table = {"pdf": pdf_table, "cdf": cdf_table, "mgf": mgf_table}[command](options)
    _emit(table.write_csv, args.out)


def _configure_logging(verbosity):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        level=level, format="%(asctime)s [%(levelname)s] %(name)s: %(message)s"
    )


def run(argv=None):
    """Run the command line and return the exit status"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        return exit_request.code if isinstance(exit_request.code, int) else 2
    _configure_logging(args.verbose)
    try:
        options = build_options(args)
        logger.debug("%s", options.as_table())
        execute(options, args)
    except (ValueError, TypeError, KeyError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 2
    except ArithmeticError as error:
        print(f"error: {error}", file=sys.stderr)
        return 3
    return 0


def main(argv=None):
    sys.exit(run(argv))

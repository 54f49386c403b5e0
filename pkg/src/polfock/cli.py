"""Command-line driver.

    polfock surfaces       [--config FILE] [--set key.path=value ...] [options]
    polfock splittings     ...
    polfock downconversion ...
    polfock dissociation   ...
    polfock validate-config SCENARIO [--config FILE] [--set ...]

Exit codes: 0 success, 2 configuration error, 3 numerical error.
The default output directory is $POLFOCK_OUTPUT_DIR/<scenario>
(./polfock-output/<scenario> when unset).
"""

import argparse
import logging
import sys

from . import __version__
from .config import SCENARIOS, dump_config, load_config
from .errors import ConfigError, DomainError, NumericalError, OracleError, TruncationError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

log = logging.getLogger("polfock")


def _add_config_args(p):
    p.add_argument("--config", "-c", metavar="FILE", help="YAML scenario file")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE", help="override one field, e.g. cavity.chi=0.005")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="polfock",
        description="Molecule-cavity polaritons in the polarized Fock state basis.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        _add_config_args(p)
        p.add_argument("--output-dir", "-o", metavar="DIR")
        p.add_argument("--jobs", "-j", type=int, default=1,
                       help="worker processes for chi scans (default 1)")
        p.add_argument("--emit-plots-data", action="store_true",
                       help="also write tidy long-format tables")
        p.add_argument("--plot", action="store_true",
                       help="render PNG figures next to the tables (needs matplotlib)")
    p = sub.add_parser("validate-config", help="check a config and print it resolved")
    p.add_argument("scenario", choices=SCENARIOS)
    _add_config_args(p)
    return parser


def _report(result):
    """Short tab-delimited summary on stdout."""
    s = result.summary
    if result.scenario == "surfaces":
        for chi, cross in s["crossings"].items():
            for label, e in cross.items():
                r = "nan" if e["r"] is None else f"{e['r']:.6f}"
                g = "nan" if e["gap"] is None else f"{e['gap']:.6e}"
                print(f"crossing\tchi={chi}\t{label}\tR={r}\tgap={g}")
    elif result.scenario == "splittings":
        for row in s["rows"]:
            print(f"splitting\tchi={row['chi']!r}\t{row['variant']}\t{row['crossing']}"
                  f"\tgap={row['gap']:.6e}\testimate={row['estimate']:.6e}")
    else:
        for run in s["runs"]:
            fields = [f"chi={run['chi']!r}", f"state={run['initial_state']}"]
            if "peak_photon_number" in run:
                fields += [f"peak_N={run['peak_photon_number']:.6f}",
                           f"t_peak={run['t_peak']:g}"]
            if "final_dissociation" in run:
                fields.append(f"P_diss={run['final_dissociation']:.6f}")
            fields += [f"norm_drift={run['max_norm_drift']:.2e}",
                       f"energy_drift={run['max_rel_energy_drift']:.2e}"]
            print("run\t" + "\t".join(fields))


def _run(args):
    from .output import resolve_output_dir, write_result
    from .scenarios import run

    if args.jobs < 1:
        raise ConfigError("must be at least 1", "--jobs")
    cfg = load_config(args.command, args.config, args.overrides)
    out = resolve_output_dir(args.output_dir, cfg)
    result = run(cfg, jobs=args.jobs)
    paths = write_result(result, cfg, out, emit_long=args.emit_plots_data)
    if args.plot:
        from .plotting import plot_result
        paths += plot_result(result, out)
    _report(result)
    for p in paths:
        print(f"wrote\t{p}")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "validate-config":
            cfg = load_config(args.scenario, args.config, args.overrides)
            sys.stdout.write(dump_config(cfg))
            return EXIT_OK
        return _run(args)
    except (ConfigError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, TruncationError, OracleError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

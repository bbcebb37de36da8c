"""Command-line front end: ``crosskerr {state,dynamics,identity-check,sweep,figures}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, load_scenarios
from .errors import IntegrityError, QuadratureError
from .runner import RunResult, bundled_scenario_dir, default_threads, render_scenario, sweep_csv

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3

log = logging.getLogger("crosskerr")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: ./out)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for sweep points")
    common.add_argument("--convention", choices=("operator", "literal"), default=None,
                        help="override the coefficient convention of every scenario")
    common.add_argument("-v", "--verbose", action="store_true")

    with_config = argparse.ArgumentParser(add_help=False, parents=[common])
    with_config.add_argument("--config", type=Path, required=True, help="scenario file")

    p = argparse.ArgumentParser(prog="crosskerr", description=__doc__)
    sub = p.add_subparsers(dest="verb", required=True)
    sub.add_parser("state", parents=[with_config], help="build states and write static statistics")
    sub.add_parser("dynamics", parents=[with_config], help="time traces of the atom-field evolution")
    sub.add_parser("identity-check", parents=[with_config], help="resolution-of-identity residuals")
    sub.add_parser("sweep", parents=[with_config], help="long-format CSV over the single list-valued axis")
    fig = sub.add_parser("figures", parents=[common], help="run every bundled figure scenario")
    fig.add_argument("--only", nargs="*", default=None, help="restrict to these bundled file stems")
    return p


def _load(args, **overrides):
    return load_scenarios(args.config, convention=args.convention, **overrides)


def _run(args) -> int:
    threads = max(1, args.threads)
    outputs = RunResult()
    if args.verb == "figures":
        files = sorted(bundled_scenario_dir().glob("*.ini"))
        if args.only:
            files = [f for f in files if f.stem in set(args.only)]
            if not files:
                raise ConfigError(f"no bundled scenario matches {args.only}")
        scenarios = [sc for f in files for sc in load_scenarios(f, convention=args.convention)]
    elif args.verb == "state":
        scenarios = _load(args, kind="state")
    elif args.verb == "dynamics":
        scenarios = _load(args, kind="dynamics")
    elif args.verb == "identity-check":
        scenarios = _load(args, kind="state", observables="identity_check")
    else:
        scenarios = _load(args)
        for sc in scenarios:
            if not any(isinstance(getattr(sc, k), list) for k in ("N", "mu_abs", "mu_phase", "kappa_tilde", "g_ratio")):
                raise ConfigError(f"{args.config}: [{sc.name}] sweep needs exactly one list-valued axis, found none")
        for sc in scenarios:
            log.info("sweep %s over %s", sc.name, sc.axis)
            outputs.files[f"{sc.name}_sweep.csv"] = sweep_csv(sc, threads)
        for path in outputs.write(args.out):
            print(path)
        return EXIT_OK

    for sc in scenarios:
        log.info("running %s (%s, axis %s)", sc.name, sc.kind, sc.axis)
        rendered = render_scenario(sc, threads)
        prefix = f"{sc.name}/" if args.verb == "figures" else ""
        outputs.files.update({prefix + k: v for k, v in rendered.files.items()})
    for path in outputs.write(args.out):
        print(path)
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (IntegrityError, QuadratureError) as exc:
        print(f"numerical integrity failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

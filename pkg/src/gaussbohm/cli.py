"""Command line: ``gaussbohm run <config|preset> [options]`` and ``gaussbohm presets``."""
from __future__ import annotations

import argparse
import logging
import sys

from .core import DomainError
from .scenario import OUT_ENV, ConfigError, default_out_dir, dumps, resolve, run

EXIT_OK = 0
EXIT_AUDIT = 1
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3


def _lambdas(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gaussbohm", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario file or a named preset")
    r.add_argument("scenario", help="preset name (e.g. fig7a) or path to a TOML scenario")
    r.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./gaussbohm-out)")
    r.add_argument("--strict-audits", action="store_true",
                   help="exit with status 1 if a Bohmian non-crossing audit fails")
    r.add_argument("--dt", type=float, help="override the integration step")
    r.add_argument("--lambda", dest="lambdas", type=_lambdas,
                   help="override the coupling(s), e.g. 0,0.5,1")
    r.add_argument("--format", choices=("csv", "json"), default="csv")
    r.add_argument("-q", "--quiet", action="store_true")
    sub.add_parser("presets", help="list the named presets")
    s = sub.add_parser("show", help="print the explicit config of a preset or file")
    s.add_argument("scenario")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if getattr(args, "quiet", False) else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    if args.command == "presets":
        from .presets import PRESETS, preset

        for name in PRESETS:
            print(f"{name:6s} {preset(name).description}")
        return EXIT_OK
    try:
        config = resolve(args.scenario)
        if args.command == "show":
            sys.stdout.write(dumps(config))
            return EXIT_OK
        if args.dt is not None or args.lambdas is not None:
            config = config.with_overrides(dt=args.dt, lambdas=args.lambdas)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out if args.out is not None else default_out_dir()
    art = run(config, out, fmt=args.format)
    for notice in art.manifest["notices"]:
        print(f"notice: {notice}", file=sys.stderr)
    if not args.quiet:
        for row in art.summary():
            audit = ("n/a" if row["bohmian_violations"] is None
                     else "pass" if row["bohmian_violations"] == 0 else "FAIL")
            print(f"lambda={row['lambda']!r:8s} {row['status']:6s} {row['propagation']:8s} "
                  f"non-crossing={audit}")
        print(f"wrote {len(art.files)} files to {art.out_dir}")
    if art.failed:
        for f in art.manifest["failures"]:
            print(f"integration failure at lambda={f['lambda']}: {f['message']}", file=sys.stderr)
        return EXIT_INTEGRATION
    if args.strict_audits and not art.audits_passed:
        return EXIT_AUDIT
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

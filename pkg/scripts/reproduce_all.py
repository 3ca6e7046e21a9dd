#!/usr/bin/env python3
"""Run every figure preset and (optionally) render the images.

Writes one CSV per preset into --out, then, when --render is given and
the qetsim-plots package is installed, one PNG per preset next to them.
"""

import argparse
import sys

from qetsim.cli import run_cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out", help="output directory (default: out)")
    parser.add_argument("--resolution", type=int, default=None, help="override range-axis step counts")
    parser.add_argument("--variant", choices=("paper", "standard"), default=None)
    parser.add_argument("--render", action="store_true", help="also render PNGs via qetsim-plots")
    args = parser.parse_args()

    argv = ["reproduce", "--out", args.out]
    if args.resolution is not None:
        argv += ["--resolution", str(args.resolution)]
    if args.variant is not None:
        argv += ["--variant", args.variant]
    code = run_cli(argv)
    if code != 0 or not args.render:
        return code

    try:
        from qetsim_plots.render import main as render_main
    except ImportError:
        print("qetsim-plots is not installed; skipping rendering", file=sys.stderr)
        return 0
    return render_main([args.out, args.out])


if __name__ == "__main__":
    raise SystemExit(main())

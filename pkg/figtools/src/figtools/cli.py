"""Command line: render one figure or the whole set from sweep outputs."""

import argparse
import os
import sys

from .figures import FIGURE_IDS, FigureSpec, plot

#: default input CSV per figure id, relative to the sweep output directory
_DEFAULT_INPUT = {
    "rmse_vs_R": "results.csv",
    "rmse_vs_psnr": "results.csv",
    "spectra": "spectra.csv",
    "convergence": "traces.csv",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="figtools", description="Render figures from reconstruction sweep CSVs"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plot", help="render a single figure")
    p.add_argument("figure", choices=FIGURE_IDS)
    p.add_argument("--in", dest="inputs", nargs="+", required=True,
                   help="input CSV path(s)")
    p.add_argument("--out", required=True, help="output PNG path")
    p.add_argument("--title", default="")

    p = sub.add_parser("all", help="render every figure found in a sweep directory")
    p.add_argument("--sweep-dir", required=True,
                   help="directory holding results.csv / traces.csv / spectra.csv")
    p.add_argument("--out-dir", required=True)
    return parser


def _cmd_plot(args):
    spec = FigureSpec(
        figure_id=args.figure, inputs=tuple(args.inputs), output=args.out,
        title=args.title,
    )
    print(plot(spec))
    return 0


def _cmd_all(args):
    os.makedirs(args.out_dir, exist_ok=True)
    rendered, skipped = [], []
    for figure_id in FIGURE_IDS:
        src = os.path.join(args.sweep_dir, _DEFAULT_INPUT[figure_id])
        if not os.path.exists(src):
            skipped.append(figure_id)
            continue
        out = os.path.join(args.out_dir, f"{figure_id}.png")
        rendered.append(plot(FigureSpec(figure_id=figure_id, inputs=(src,), output=out)))
        print(out)
    if skipped:
        print(f"skipped (no input CSV): {', '.join(skipped)}", file=sys.stderr)
    if not rendered:
        print("error: nothing to render", file=sys.stderr)
        return 1
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plot":
            return _cmd_plot(args)
        return _cmd_all(args)
    except Exception as err:  # noqa: BLE001 - single CLI error boundary
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``figures <fig-id> --in <csv> --out <path>``."""

from __future__ import annotations

import argparse
import sys

from .render import FIGURE_IDS, FigureJob, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render a headline figure from simulation CSV output.",
    )
    parser.add_argument("figure_id", choices=FIGURE_IDS, metavar="fig-id",
                        help="one of: " + ", ".join(FIGURE_IDS))
    parser.add_argument("--in", dest="input_csv", required=True, help="input CSV table")
    parser.add_argument("--out", dest="output_path", required=True, help="output image path")
    parser.add_argument("--summary", help="summary.json path (default: next to the CSV)")
    parser.add_argument("--format", choices=("png", "svg"), default="png")
    args = parser.parse_args(argv)

    job = FigureJob(
        figure_id=args.figure_id,
        input_csv=args.input_csv,
        output_path=args.output_path,
        summary_path=args.summary,
        fmt=args.format,
    )
    try:
        render(job)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.output_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

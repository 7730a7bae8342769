"""Command-line interface: entpart-figures render --spec <json or path>."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FigureSpec, RenderError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="entpart-figures", description="Render figures from entpart results CSVs."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from a JSON spec")
    p.add_argument(
        "--spec",
        required=True,
        help="inline JSON spec or path to a JSON file "
        '(e.g. \'{"kind": "score-vs-t", "csv": "score.csv", "out": "score.png"}\')',
    )
    args = parser.parse_args(argv)

    text = args.spec
    if not text.lstrip().startswith("{"):
        try:
            text = Path(text).read_text()
        except FileNotFoundError:
            print(f"spec file not found: {args.spec}", file=sys.stderr)
            return 3
    try:
        spec = FigureSpec.from_json(text)
        out = render(spec)
    except RenderError as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

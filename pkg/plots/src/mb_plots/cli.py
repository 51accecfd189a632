"""mb-plot: render figures from harness CSV outputs.

    mb-plot stability_regret --in 'results/*/aggregate.csv' --out fig.png
    mb-plot conflicts --in 'results/*/aggregate.csv' --out conflicts.png
    mb-plot proxy_compare --in 'ucb/*/proxy.csv' --in-dotted 'ts/*/proxy.csv' --out cmp.png
"""

from __future__ import annotations

import argparse
import glob
import sys
from pathlib import Path

from .figures import FIGURE_KINDS, FigureSpec, render
from .io import SchemaError


def _expand(patterns: list[str]) -> tuple[Path, ...]:
    paths: list[Path] = []
    for pattern in patterns:
        matched = sorted(glob.glob(pattern))
        if matched:
            paths.extend(Path(p) for p in matched)
        else:
            paths.append(Path(pattern))  # literal path; existence checked on read
    return tuple(paths)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mb-plot", description=__doc__.splitlines()[0])
    parser.add_argument("kind", choices=FIGURE_KINDS)
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        metavar="GLOB", help="input CSV file or glob (repeatable)")
    parser.add_argument("--in-dotted", dest="inputs_dotted", action="append", default=[],
                        metavar="GLOB", help="dotted-group inputs (proxy_compare)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--span", type=float, default=0.3, help="LOESS span in (0, 1]")
    parser.add_argument("--labels", help="comma-separated labels for the inputs")
    return parser


def cli_main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            inputs=_expand(args.inputs),
            inputs_dotted=_expand(args.inputs_dotted),
            out_path=Path(args.out),
            span=args.span,
            labels=tuple(args.labels.split(",")) if args.labels else None,
        )
        out = render(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()

"""Command line interface: compute score documents, order axes, serve HTTP.

Exit codes: 0 on success, 1 on usage errors (bad flags, malformed weights),
2 on data errors (missing file, unusable dataset).
"""

from __future__ import annotations

import argparse
import json
import sys

from .data import load_csv
from .errors import NoActivePropertiesError, PcpError
from .ordering import MAX_EXACT_DIMS, order_greedy, order_tsp
from .scoring import (
    DEFAULT_PERMUTATIONS,
    ScoringEngine,
    parse_weights,
    result_document,
)
from .service import DEFAULT_PORT, create_app
from .windows import WindowSpec


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the CLI contract reserves
    # 2 for data errors, so usage problems are rerouted through _UsageError.
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="pcporder",
        description="Score axis pairs of a numeric CSV and order parallel-coordinate axes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--input", required=True, help="CSV file with a header row")
        p.add_argument(
            "--columns",
            default=None,
            help="comma-separated column subset (default: all columns)",
        )
        p.add_argument(
            "--window",
            type=float,
            default=0.25,
            help="window fraction of the normalized axis range (default 0.25)",
        )
        p.add_argument(
            "--stride",
            type=float,
            default=None,
            help="stride fraction (default: half the window)",
        )
        p.add_argument(
            "--weights",
            required=True,
            help='property weights, e.g. "pos_corr=1.0,fan=0.5"',
        )
        p.add_argument("--seed", type=int, required=True, help="PRNG seed (>= 0)")
        p.add_argument(
            "--permutations",
            type=int,
            default=DEFAULT_PERMUTATIONS,
            help="skewness permutation-test resamples (default 200)",
        )
        p.add_argument("--out", required=True, help="output JSON path")

    compute = sub.add_parser("compute", help="write the matrix + profiles document")
    add_common(compute)

    order = sub.add_parser(
        "order", help="compute document plus an axis ordering; print the order"
    )
    add_common(order)
    order.add_argument(
        "--mode",
        choices=("tsp", "greedy"),
        default="tsp",
        help="exact search or greedy heuristic (default tsp)",
    )

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=None)
    serve.add_argument("--max-sync-work", type=int, default=None)
    serve.add_argument("--cache-bytes", type=int, default=None)
    serve.add_argument("--static-dir", default=None)

    return parser


def _build_document(args) -> tuple[dict, list[str], str]:
    """Shared compute/order pipeline. Returns (document, dims, method_note)."""
    try:
        spec = WindowSpec(window_fraction=args.window, stride_fraction=args.stride)
        weights = parse_weights(args.weights)
        weights.require_active()
        if args.seed < 0:
            raise ValueError(f"seed must be >= 0, got {args.seed}")
    except (ValueError, NoActivePropertiesError) as err:
        raise _UsageError(str(err)) from None

    columns = (
        [c.strip() for c in args.columns.split(",")] if args.columns else None
    )
    loaded = load_csv(args.input, columns)
    dataset = loaded.dataset

    engine = ScoringEngine()
    matrix = engine.matrix(
        dataset, weights, spec, seed=args.seed, permutations=args.permutations
    )
    pair_profiles = engine.profiles(
        dataset, spec, seed=args.seed, permutations=args.permutations
    )
    profiles = [pair_profiles[key] for key in sorted(pair_profiles)]

    ordering_json = None
    if args.command == "order":
        if args.mode == "tsp" and dataset.dim_count > MAX_EXACT_DIMS:
            print(
                f"note: {dataset.dim_count} axes exceed the exact-search limit "
                f"({MAX_EXACT_DIMS}); using the greedy heuristic",
                file=sys.stderr,
            )
        result = order_greedy(matrix) if args.mode == "greedy" else order_tsp(matrix)
        ordering_json = result.to_json()

    doc = result_document(
        dataset,
        weights,
        spec,
        args.seed,
        matrix=matrix,
        profiles=profiles,
        dropped_rows=loaded.dropped_rows,
        ordering=ordering_json,
    )
    return doc, dataset.dims, args.command


def _write_document(doc: dict, path: str) -> None:
    # allow_nan=False turns any stray NaN/inf into a hard error instead of
    # emitting invalid JSON.
    text = json.dumps(doc, allow_nan=False, indent=2)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
        fh.write("\n")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(str(err), file=sys.stderr)
        return 1

    try:
        if args.command == "serve":
            import uvicorn

            port = args.port
            if port is None:
                import os

                port = int(os.environ.get("PORT", DEFAULT_PORT))
            app = create_app(
                max_sync_work=args.max_sync_work,
                cache_bytes=args.cache_bytes,
                static_dir=args.static_dir,
            )
            uvicorn.run(app, host=args.host, port=port)
            return 0

        doc, dims, command = _build_document(args)
        _write_document(doc, args.out)
        if command == "order":
            for axis_index in doc["ordering"]["order"]:
                print(dims[axis_index])
        return 0
    except _UsageError as err:
        print(str(err), file=sys.stderr)
        return 1
    except FileNotFoundError as err:
        print(f"file_not_found: {err}", file=sys.stderr)
        return 2
    except PcpError as err:
        print(f"{err.code}: {err.message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command line: ``welltris preprocess | estimate | sample | exact``.

Exit codes: 0 ok, 2 input error, 3 empty join, 4 oracle size guard.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .core import SchemaError
from .estimator import EmptyJoinError, EstimatorConfig, estimate_join_size, sample_join_rows
from .gapbox import build_index
from .ingest import DomainEncoding, IngestError, load_tables
from .oracle import GRID_LIMIT, OracleGuardError, exact_join
from .trie import GapBoxIndex, IndexFormatError

EXIT_INPUT = 2
EXIT_EMPTY = 3
EXIT_GUARD = 4

ENCODING_SUFFIX = ".encoding"


class InputError(Exception):
    pass


def encoding_path(index_path: str) -> str:
    return index_path + ENCODING_SUFFIX


def dump_encoding(schema, encoding: DomainEncoding) -> str:
    # one line per attribute, global order: name<TAB>v0,v1,...
    lines = [f"L={schema.L}"]
    for attr in schema.attributes:
        lines.append(attr + "\t" + ",".join(encoding.values[attr]))
    return "\n".join(lines) + "\n"


def load_encoding(path: str) -> tuple[list[str], DomainEncoding]:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("L="):
        raise InputError(f"{path}: missing L= header")
    L = int(lines[0][2:])
    attrs, values = [], {}
    for line in lines[1:]:
        if not line:
            continue
        name, _, vals = line.partition("\t")
        attrs.append(name)
        values[name] = vals.split(",") if vals else []
    return attrs, DomainEncoding.from_values(L, values)


def _load_index(path: str) -> tuple[GapBoxIndex, DomainEncoding | None]:
    enc_path = encoding_path(path)
    attrs, encoding = (None, None)
    if os.path.exists(enc_path):
        attrs, encoding = load_encoding(enc_path)
    return GapBoxIndex.load(path, attrs), encoding


def cmd_preprocess(args) -> int:
    schema, encoding, relations = load_tables(args.csv)
    idx = build_index(schema, relations)
    idx.save(args.output)
    with open(encoding_path(args.output), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_encoding(schema, encoding))
    print(f"{args.output}: {len(schema.tables)} tables, d={schema.d}, L={schema.L}, "
          f"{idx.box_count} gap boxes", file=sys.stderr)
    return 0


def cmd_estimate(args) -> int:
    idx, _ = _load_index(args.index)
    cfg = EstimatorConfig(epsilon=args.epsilon, delta=args.delta, seed=args.seed)
    t0 = time.perf_counter()
    est = estimate_join_size(idx, cfg)
    out = est.as_dict()
    out["wall_ms"] = round((time.perf_counter() - t0) * 1000, 3)
    print(json.dumps(out))
    return 0


def cmd_sample(args) -> int:
    idx, encoding = _load_index(args.index)
    if encoding is None:
        raise InputError(f"{encoding_path(args.index)} not found")
    attrs = idx.schema.attributes
    print(",".join(attrs))
    if args.q == 0:
        return 0
    rows = sample_join_rows(idx, args.q, EstimatorConfig(seed=args.seed))
    for p in rows:
        print(",".join(encoding.decode(a, c) for a, c in zip(attrs, p)))
    return 0


def cmd_exact(args) -> int:
    schema, encoding, relations = load_tables(args.csv)
    rows, z = exact_join(relations, schema, limit=args.limit)
    if args.rows:
        print(",".join(schema.attributes))
        for p in sorted(rows):
            print(",".join(encoding.decode(a, c) for a, c in zip(schema.attributes, p)))
    else:
        print(z)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="welltris", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="build the gap-box index from CSV tables")
    p.add_argument("csv", nargs="+", help="one CSV per table, header row first")
    p.add_argument("-o", "--output", required=True, help="index file to write")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("estimate", help="estimate the join size")
    p.add_argument("index")
    p.add_argument("--epsilon", type=float, default=0.5, help="relative error (default 0.5)")
    p.add_argument("--delta", type=float, default=0.1, help="failure probability (default 0.1)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sample", help="draw join rows uniformly at random")
    p.add_argument("index")
    p.add_argument("--q", type=int, required=True, help="number of rows to draw")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("exact", help="exact join size (brute force, size-guarded)")
    p.add_argument("csv", nargs="+", help="one CSV per table, header row first")
    p.add_argument("--rows", action="store_true", help="print the joined rows")
    p.add_argument("--limit", type=int, default=GRID_LIMIT, help="largest intermediate result allowed")
    p.set_defaults(func=cmd_exact)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EmptyJoinError as exc:
        print(f"welltris: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except OracleGuardError as exc:
        print(f"welltris: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (OSError, InputError, IngestError, IndexFormatError, SchemaError, ValueError) as exc:
        print(f"welltris: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

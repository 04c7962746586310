"""Command-line interface: ``rapcensus <command> ...``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from .canon import code_hex
from .census import (
    CensusDatabase,
    CensusError,
    DatabaseError,
    ancestors,
    composition_audit,
    extend,
    init,
    load_reference,
    verify_against,
)
from .core import (
    ParseError,
    Polyhedron,
    PolyhedronError,
    face_vector,
    parse_polyhedron,
    validate_pogorelov,
    very_good_edges,
)
from .geometry import GeometryError, volume
from .render import RenderOptions, RenderError, contact_sheet, to_svg, tutte_embedding
from .surgery import all_compositions, double_lobell, lobell, lobell_index, reduce_to_lobell

EXIT_OK = 0
EXIT_FAILURE = 1  # verification or audit did not pass
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_SOLVER = 4
EXIT_DB = 5
EXIT_CENSUS = 6

WORKERS_ENV = "RAPCENSUS_WORKERS"


class SeedSpecError(ValueError):
    pass


def parse_seed_spec(spec: str) -> list[Polyhedron]:
    """``lobell:<n|a..b>``, ``double:lobell:<n>``, ``file:<path>``, comma separated."""
    out: list[Polyhedron] = []
    for item in filter(None, (s.strip() for s in spec.split(","))):
        kind, _, rest = item.partition(":")
        try:
            if kind == "lobell":
                if ".." in rest:
                    a, b = (int(x) for x in rest.split(".."))
                    out.extend(lobell(n) for n in range(a, b + 1))
                else:
                    out.append(lobell(int(rest)))
            elif kind == "double":
                inner, _, n = rest.partition(":")
                if inner != "lobell":
                    raise SeedSpecError(f"unknown doubled seed {inner!r}")
                out.append(double_lobell(int(n)))
            elif kind == "file":
                out.append(parse_polyhedron(Path(rest).read_text(encoding="utf-8")))
            else:
                raise SeedSpecError(f"unknown seed kind {kind!r}")
        except (ValueError, OSError) as exc:
            if isinstance(exc, (SeedSpecError, ParseError)):
                raise
            raise SeedSpecError(f"bad seed {item!r}: {exc}") from None
    if not out:
        raise SeedSpecError("empty seed list")
    return out


def _workers(args) -> int:
    if args.workers is not None:
        n = args.workers
    else:
        try:
            n = int(os.environ.get(WORKERS_ENV, "1"))
        except ValueError:
            raise SystemExit(f"{WORKERS_ENV} must be an integer")
    if n < 1:
        raise SystemExit("worker count must be at least 1")
    return n


def _options(args) -> dict:
    tol = getattr(args, "tol", 1e-10)
    if tol <= 0 or args.volume_tol <= 0:
        raise SystemExit("tolerances must be positive")
    return dict(workers=_workers(args), tol=tol, volume_tol=args.volume_tol, restarts=args.restarts)


def _load(args) -> CensusDatabase:
    if not Path(args.db).exists():
        raise DatabaseError(f"no database at {args.db}; run init first")
    return CensusDatabase.load(args.db, **_options(args))


def _target(args, db: CensusDatabase | None):
    """Polyhedron chosen by --rank, --id or --seed, with a label."""
    if getattr(args, "seed", None):
        polys = parse_seed_spec(args.seed)
        return polys[0], args.seed
    if db is None:
        db = _load(args)
    if args.rank is not None:
        e = db.by_rank(args.rank)
        return e.poly, f"rank {args.rank}"
    if args.id is not None:
        if args.id not in db.entries:
            raise DatabaseError(f"no entry {args.id}")
        return db.entries[args.id].poly, f"entry {args.id}"
    raise SystemExit("choose a polyhedron with --rank, --id or --seed")


# -- commands -----------------------------------------------------------------


def cmd_init(args) -> int:
    seeds = parse_seed_spec(args.seeds)
    db = init(seeds, args.db, **_options(args))
    for e in sorted(db.entries.values(), key=lambda e: e.id):
        vol = f"{e.volume:.7f}" if e.volume is not None else "FAIL"
        print(f"entry {e.id}: {e.poly!r} volume {vol}")
    return EXIT_OK


def cmd_extend(args) -> int:
    db = _load(args)
    extend(db, args.n, progress=lambda r: print(r.line(), flush=True))
    return EXIT_OK


def cmd_show(args) -> int:
    db = _load(args)
    if args.rank is not None:
        eid = db.by_rank(args.rank).id
    elif args.id is not None:
        eid = args.id
        if eid not in db.entries:
            raise DatabaseError(f"no entry {eid}")
    else:
        for e in db.ranked():
            print(f"{e.rank}\t{e.volume:.7f}\t{e.face_vector.to_text()}\tentry {e.id}")
        return EXIT_OK
    print(db.entries[eid].row())
    print("family tree:")
    for depth, e, links in ancestors(db, eid):
        if depth > args.generations:
            break
        rank = f"rank {e.rank}" if e.rank is not None else "unranked"
        vol = f"{e.volume:.5f}" if e.volume is not None else "FAIL"
        via = ", ".join(f"{p}@{s}" for p, s in links) or e.provenance
        print(f"{'  ' * depth}entry {e.id} ({rank}, volume {vol}) <- {via}")
    return EXIT_OK


def cmd_render(args) -> int:
    opts = RenderOptions(size=args.size, stroke=args.stroke, dots=not args.no_dots)
    if args.sheet:
        db = _load(args)
        items = [(str(e.rank), e.poly) for e in db.ranked()[: args.sheet]]
        data = contact_sheet(items, columns=args.columns, options=opts)
    else:
        poly, label = _target(args, None)
        data = to_svg(poly, tutte_embedding(poly, args.outer), opts, title=label)
    if args.out in (None, "-"):
        sys.stdout.buffer.write(data)
    else:
        Path(args.out).write_bytes(data)
    return EXIT_OK


def cmd_verify(args) -> int:
    db = _load(args)
    table = load_reference(args.reference)
    report = verify_against(db, table, tol=args.tol, upto=args.upto)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_compose(args) -> int:
    db = _load(args)
    if args.pair:
        a, b = (db.by_rank(r) for r in args.pair)
        report = all_compositions(a.poly, b.poly)
        print(f"raw {report.raw} deduplicated {report.deduplicated}")
        for poly, site in report.results:
            where = db.by_code.get(bytes.fromhex(code_hex(poly)))
            state = f"entry {where}" if where is not None else "not in database"
            print(f"{site.descriptor()}\t{face_vector(poly).to_text()}\t{state}")
        return EXIT_OK
    report = composition_audit(db, args.bound)
    for line in report.lines():
        print(line)
    for item in report.absent:
        vg = "has very good edges" if very_good_edges(item.poly) else "no very good edges"
        vol = volume(item.poly).volume
        print(f"  {item.poly!r}: {vg}, volume {vol:.5f}")
    return EXIT_OK


def cmd_reduce(args) -> int:
    poly, label = _target(args, None)
    chain = reduce_to_lobell(poly)
    print(f"{label}: {poly!r}")
    for i, st in enumerate(chain.steps, start=1):
        print(f"step {i}: {st.describe()}")
    print("terminal: " + " ".join(f"L{n}" for n in chain.terminal))
    if args.volumes:
        for state in chain.states():
            total = sum(volume(c).volume for c in state)
            print(f"  {len(state)} component(s), total volume {total:.7f}")
    return EXIT_OK


def cmd_check(args) -> int:
    poly, label = _target(args, None)
    report = validate_pogorelov(poly)
    print(f"{label}: {poly!r} code {code_hex(poly)}")
    if report.valid:
        n = lobell_index(poly)
        extra = f" (Löbell L{n})" if n is not None else ""
        print(f"valid{extra}; volume {volume(poly).volume:.10f}")
        return EXIT_OK
    for r in report.reasons():
        print(f"invalid: {r}")
    return EXIT_FAILURE


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    # verify reuses --tol for the reference tolerance, so it gets a parent
    # without the solver's --tol
    base = argparse.ArgumentParser(add_help=False)
    base.add_argument("--db", default="census.tsv", help="census database file (default: census.tsv)")
    base.add_argument("--workers", type=int, default=None, help=f"worker processes (env {WORKERS_ENV})")
    base.add_argument("--volume-tol", type=float, default=1e-6, help="accepted volume error estimate")
    base.add_argument("--restarts", type=int, default=16, help="solver restarts from scratch")
    base.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False, parents=[base])
    common.add_argument("--tol", type=float, default=1e-10, help="realization residual tolerance")

    def pick(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--rank", type=int)
        g.add_argument("--id", type=int)
        g.add_argument("--seed", help="seed spec instead of a database entry")

    parser = argparse.ArgumentParser(prog="rapcensus", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", parents=[common], help="create a database from seeds")
    p.add_argument("--seeds", default="lobell:5..14,double:lobell:5")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("extend", parents=[common], help="assign the next N ranks")
    p.add_argument("-n", type=int, default=1)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("show", parents=[common], help="list ranks or show one entry and its ancestry")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--rank", type=int)
    g.add_argument("--id", type=int)
    p.add_argument("--generations", type=int, default=5)
    p.set_defaults(func=cmd_show)

    p = sub.add_parser("render", parents=[common], help="SVG of a 1-skeleton or a contact sheet")
    pick(p)
    p.add_argument("--outer", type=int, default=None, help="outer face id (default: a largest face)")
    p.add_argument("--size", type=int, default=512)
    p.add_argument("--stroke", type=float, default=1.5)
    p.add_argument("--no-dots", action="store_true")
    p.add_argument("--sheet", type=int, default=0, help="contact sheet of ranks 1..N")
    p.add_argument("--columns", type=int, default=10)
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("verify", parents=[base], help="compare ranks with a reference table")
    p.add_argument("--reference", default="appendix_a", help="rank/volume file, or appendix_a / table1")
    p.add_argument("--upto", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-4, help="volume tolerance")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compose", parents=[common], help="composition audit or pairwise compositions")
    p.add_argument("--pair", type=int, nargs=2, metavar="RANK")
    p.add_argument("--bound", type=float, default=15.0)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("reduce", parents=[common], help="reduction chain down to Löbell polyhedra")
    pick(p)
    p.add_argument("--volumes", action="store_true")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("check", parents=[common], help="validity and volume of one polyhedron")
    pick(p)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, SeedSpecError) as exc:
        print(f"rapcensus: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except GeometryError as exc:
        print(f"rapcensus: geometry: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except DatabaseError as exc:
        print(f"rapcensus: database: {exc}", file=sys.stderr)
        return EXIT_DB
    except (CensusError, KeyError) as exc:
        print(f"rapcensus: census: {exc}", file=sys.stderr)
        return EXIT_CENSUS
    except (PolyhedronError, RenderError) as exc:
        print(f"rapcensus: {type(exc).__module__.split('.')[-1]}: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

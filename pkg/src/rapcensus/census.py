"""Volume-ordered census of right-angled polyhedra.

The database is a list of polyhedra, each either expanded (its edge-children
have been generated, and it carries a rank) or unexpanded.  One step selects
the smallest-volume unexpanded entry, gives it the next rank and inserts its
new edge-children.  Because edge addition strictly increases volume, the
ranked entries are exactly the smallest members of the descendant set of the
seeds, in volume order.
"""

from __future__ import annotations

import logging
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from .canon import canonical_code
from .core import (
    FaceVector,
    Polyhedron,
    PolyhedronError,
    face_vector,
    lemma_witness,
    parse_polyhedron,
    serialize_polyhedron,
    validate_pogorelov,
)
from .geometry import GeometryError, Realization, realize, realize_child, volume
from .surgery import (
    CompositionSite,
    EdgeAdditionSite,
    addition_sites,
    all_compositions,
    apply_edge_addition,
    double_lobell,
    edge_delete,
    lobell,
    lobell_index,
)

__all__ = [
    "CensusError",
    "DuplicateError",
    "DatabaseError",
    "SelectionError",
    "CensusEntry",
    "CensusDatabase",
    "StepReport",
    "VerifyReport",
    "AuditReport",
    "default_seeds",
    "init",
    "step",
    "extend",
    "register_seed",
    "load_reference",
    "verify_against",
    "composition_audit",
    "ancestors",
]

log = logging.getLogger(__name__)

HEADER = "# rapcensus v1"
COLUMNS = ("id", "status", "rank", "volume", "face_vector", "code", "parents", "provenance")
PROVENANCES = ("seed", "edge-child", "composition")
TIE_TOLERANCE = 1e-9
VOLUME_TOLERANCE = 1e-6


class CensusError(RuntimeError):
    pass


class DuplicateError(CensusError):
    pass


class DatabaseError(CensusError):
    pass


class SelectionError(CensusError):
    pass


@dataclass
class CensusEntry:
    id: int
    poly: Polyhedron
    code: bytes
    face_vector: FaceVector
    provenance: str
    volume: float | None = None
    volume_status: str = "pending"  # ok | failed | pending
    rank: int | None = None
    expanded: bool = False
    parents: list[tuple[int, str]] = field(default_factory=list)

    def row(self) -> str:
        vol = f"{self.volume:.17g}" if self.volume_status == "ok" else "FAIL"
        parents = ";".join(f"{p}@{s}" for p, s in self.parents) or "-"
        return "\t".join(
            [
                str(self.id),
                "expanded" if self.expanded else "unexpanded",
                str(self.rank) if self.rank is not None else "-",
                vol,
                self.face_vector.to_text(),
                self.code.hex(),
                parents,
                self.provenance,
            ]
        )


@dataclass
class CensusDatabase:
    path: Path | None = None
    entries: dict[int, CensusEntry] = field(default_factory=dict)
    by_code: dict[bytes, int] = field(default_factory=dict)
    by_face_vector: dict[str, list[int]] = field(default_factory=dict)
    next_rank: int = 1
    workers: int = 1
    tol: float = 1e-10
    volume_tol: float = VOLUME_TOLERANCE
    restarts: int = 16
    _realizations: dict[int, Realization] = field(default_factory=dict, repr=False)

    # -- indexing ---------------------------------------------------------

    def add(self, entry: CensusEntry) -> CensusEntry:
        if entry.code in self.by_code:
            raise DuplicateError(f"polyhedron already present as entry {self.by_code[entry.code]}")
        fv = entry.face_vector.to_text()
        for other in self.by_face_vector.get(fv, ()):
            if self.entries[other].code == entry.code:  # pragma: no cover - guarded above
                raise DatabaseError("code index out of sync")
        self.entries[entry.id] = entry
        self.by_code[entry.code] = entry.id
        self.by_face_vector.setdefault(fv, []).append(entry.id)
        return entry

    def new_id(self) -> int:
        return max(self.entries, default=0) + 1

    def lookup(self, poly: Polyhedron) -> CensusEntry | None:
        eid = self.by_code.get(canonical_code(poly))
        if eid is None:
            return None
        entry = self.entries[eid]
        if entry.face_vector != face_vector(poly):
            raise DatabaseError(f"entry {eid}: equal codes with different face vectors")
        return entry

    def ranked(self) -> list[CensusEntry]:
        out = [e for e in self.entries.values() if e.rank is not None]
        return sorted(out, key=lambda e: e.rank)  # type: ignore[arg-type, return-value]

    def by_rank(self, rank: int) -> CensusEntry:
        for e in self.entries.values():
            if e.rank == rank:
                return e
        raise KeyError(f"no entry with rank {rank}")

    def unexpanded(self) -> list[CensusEntry]:
        return [e for e in self.entries.values() if not e.expanded]

    # -- persistence ------------------------------------------------------

    def dumps(self) -> str:
        lines = [HEADER, "#" + "\t".join(COLUMNS)]
        lines += [self.entries[i].row() for i in sorted(self.entries)]
        return "\n".join(lines) + "\n"

    def save(self, path: str | os.PathLike | None = None) -> Path:
        """Write structure files, then the table via temp file and rename."""
        target = Path(path) if path is not None else self.path
        if target is None:
            raise DatabaseError("database has no path")
        self.path = target
        folder = target.parent
        folder.mkdir(parents=True, exist_ok=True)
        for e in self.entries.values():
            rap = folder / f"{e.id}.rap"
            text = serialize_polyhedron(e.poly)
            if not rap.exists() or rap.read_text(encoding="utf-8") != text:
                _atomic_write(rap, text)
        _atomic_write(target, self.dumps())
        return target

    @classmethod
    def load(cls, path: str | os.PathLike, check_codes: bool = False, **options) -> "CensusDatabase":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise DatabaseError(f"cannot read database {path}: {exc}") from None
        lines = text.split("\n")
        if not lines or lines[0] != HEADER:
            raise DatabaseError(f"{path}: missing header {HEADER!r}")
        db = cls(path=path, **options)
        ranks = []
        for lineno, line in enumerate(lines[1:], start=2):
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != len(COLUMNS):
                raise DatabaseError(f"{path}:{lineno}: expected {len(COLUMNS)} columns, got {len(cols)}")
            try:
                eid = int(cols[0])
                status = cols[1]
                if status not in ("expanded", "unexpanded"):
                    raise ValueError(f"bad status {status!r}")
                rank = None if cols[2] == "-" else int(cols[2])
                vol = None if cols[3] == "FAIL" else float(cols[3])
                fv = FaceVector.from_text(cols[4])
                code = bytes.fromhex(cols[5])
                parents = []
                if cols[6] != "-":
                    for item in cols[6].split(";"):
                        pid, site = item.split("@", 1)
                        parents.append((int(pid), site))
                prov = cols[7]
                if prov not in PROVENANCES:
                    raise ValueError(f"bad provenance {prov!r}")
            except ValueError as exc:
                raise DatabaseError(f"{path}:{lineno}: {exc}") from None
            rap = path.parent / f"{eid}.rap"
            try:
                poly = parse_polyhedron(rap.read_text(encoding="utf-8"))
            except (OSError, PolyhedronError) as exc:
                raise DatabaseError(f"{rap}: {exc}") from None
            if check_codes and canonical_code(poly) != code:
                raise DatabaseError(f"{rap}: structure does not match recorded code")
            entry = CensusEntry(
                eid,
                poly,
                code,
                fv,
                prov,
                vol,
                "ok" if vol is not None else "failed",
                rank,
                status == "expanded",
                parents,
            )
            try:
                db.add(entry)
            except DuplicateError as exc:
                raise DatabaseError(f"{path}:{lineno}: {exc}") from None
            if rank is not None:
                if not entry.expanded:
                    raise DatabaseError(f"{path}:{lineno}: ranked entry must be expanded")
                ranks.append(rank)
        if sorted(ranks) != list(range(1, len(ranks) + 1)):
            raise DatabaseError(f"{path}: ranks are not contiguous from 1")
        for e in db.entries.values():
            for pid, _ in e.parents:
                if pid not in db.entries:
                    raise DatabaseError(f"entry {e.id}: unknown parent {pid}")
        db.next_rank = len(ranks) + 1
        return db

    # -- geometry ---------------------------------------------------------

    def realization(self, eid: int) -> Realization:
        """Realization used to continue an entry's children.

        Solved from scratch; if that fails, continued from the first
        recorded parent.  Either way the result depends only on the stored
        structures, never on what happens to be cached.
        """
        cached = self._realizations.get(eid)
        if cached is not None:
            return cached
        entry = self.entries[eid]
        try:
            real = realize(entry.poly, tol=self.tol, restarts=self.restarts)
        except GeometryError:
            if entry.provenance != "edge-child" or not entry.parents:
                raise
            pid = entry.parents[0][0]
            real = realize_child(entry.poly, self.realization(pid), tol=self.tol)
        self._realizations[eid] = real
        return real


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# Volumes (worker-side)
# ---------------------------------------------------------------------------


def _volume_task(args) -> float | None:
    """Volume of one polyhedron, by continuation when a parent is given."""
    rot, parent, tol, volume_tol, restarts = args
    poly = Polyhedron(rot)
    real = None
    if parent is not None:
        prot, normals, verts, res, margin = parent
        preal = Realization(Polyhedron(prot), normals, verts, res, margin)
        try:
            real = realize_child(poly, preal, tol=tol)
        except GeometryError:
            real = None
    try:
        if real is None:
            real = realize(poly, tol=tol, restarts=restarts)
        res = volume(poly, real)
    except GeometryError:
        return None
    if not math.isfinite(res.volume) or res.estimated_error > volume_tol:
        return None
    return res.volume


def _parent_payload(real: Realization):
    return (real.poly.rot, real.normals, real.vertices, real.residual, real.margin)


def _compute_volumes(db: CensusDatabase, tasks: list) -> list[float | None]:
    if not tasks:
        return []
    if db.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=db.workers) as pool:
            return list(pool.map(_volume_task, tasks, chunksize=max(1, len(tasks) // (4 * db.workers))))
    return [_volume_task(t) for t in tasks]


# ---------------------------------------------------------------------------
# Seeds and initialisation
# ---------------------------------------------------------------------------


def default_seeds() -> list[Polyhedron]:
    """Löbell polyhedra L5..L14 and the doubled dodecahedron."""
    return [lobell(n) for n in range(5, 15)] + [double_lobell(5)]


def _check_seed(poly: Polyhedron) -> None:
    report = validate_pogorelov(poly)
    if not report.valid:
        raise CensusError("invalid seed: " + "; ".join(report.reasons()))


def init(
    seeds: Sequence[Polyhedron] | None = None,
    db_path: str | os.PathLike | None = None,
    **options,
) -> CensusDatabase:
    """Fresh database with one unexpanded entry per seed."""
    seeds = default_seeds() if seeds is None else list(seeds)
    db = CensusDatabase(path=Path(db_path) if db_path is not None else None, **options)
    codes = set()
    for p in seeds:
        _check_seed(p)
        c = canonical_code(p)
        if c in codes:
            raise DuplicateError(f"duplicate seed {p!r}")
        codes.add(c)
    vols = _compute_volumes(db, [(p.rot, None, db.tol, db.volume_tol, db.restarts) for p in seeds])
    for p, v in zip(seeds, vols):
        _insert(db, p, "seed", v, [])
    if db.path is not None:
        db.save()
    return db


def _insert(db: CensusDatabase, poly: Polyhedron, provenance: str, vol: float | None, parents) -> CensusEntry:
    entry = CensusEntry(
        db.new_id(),
        poly,
        canonical_code(poly),
        face_vector(poly),
        provenance,
        vol,
        "ok" if vol is not None else "failed",
        parents=list(parents),
    )
    return db.add(entry)


def register_seed(db: CensusDatabase, poly: Polyhedron, provenance: str = "seed") -> int:
    """Add an extra unexpanded entry (e.g. a composition missing from the descendants)."""
    _check_seed(poly)
    if canonical_code(poly) in db.by_code:
        raise DuplicateError(f"polyhedron already present as entry {db.by_code[canonical_code(poly)]}")
    (vol,) = _compute_volumes(db, [(poly.rot, None, db.tol, db.volume_tol, db.restarts)])
    entry = _insert(db, poly, provenance, vol, [])
    if db.path is not None:
        db.save()
    return entry.id


# ---------------------------------------------------------------------------
# Stepping
# ---------------------------------------------------------------------------


@dataclass
class StepReport:
    rank: int
    entry_id: int
    volume: float
    raw_children: int
    new_entries: list[int]
    dedup_hits: int
    failures: list[int]

    def line(self) -> str:
        return (
            f"rank {self.rank}: entry {self.entry_id} volume {self.volume:.7f} "
            f"children {self.raw_children} new {len(self.new_entries)} "
            f"known {self.dedup_hits} failed {len(self.failures)}"
        )


def _lower_bound(db: CensusDatabase, entry: CensusEntry) -> float:
    """A volume lower bound for an entry whose volume failed: any parent's volume."""
    vols = [db.entries[p].volume for p, _ in entry.parents if db.entries[p].volume is not None]
    return max(vols, default=0.0)


def select(db: CensusDatabase) -> CensusEntry:
    """Smallest-volume unexpanded entry; near-ties go to the smaller code."""
    pool = [e for e in db.unexpanded() if e.volume_status == "ok"]
    if not pool:
        raise SelectionError("no unexpanded entry with a known volume")
    vmin = min(e.volume for e in pool)  # type: ignore[type-var]
    blocked = [e for e in db.unexpanded() if e.volume_status != "ok" and _lower_bound(db, e) <= vmin]
    if blocked:
        ids = ", ".join(str(e.id) for e in blocked)
        raise SelectionError(f"volume failed for entries {ids}, which may be smaller than {vmin:.7f}")
    ties = [e for e in pool if e.volume <= vmin + TIE_TOLERANCE]  # type: ignore[operator]
    return min(ties, key=lambda e: (e.code, e.id))


def _seed_bound(db: CensusDatabase) -> float | None:
    """Volume of the largest Löbell seed; beyond it larger Löbell seeds are missing."""
    best = None
    for e in db.entries.values():
        if e.provenance == "seed" and e.volume is not None:
            n = lobell_index(e.poly)
            if n is not None and (best is None or n > best[0]):
                best = (n, e.volume)
    return None if best is None else best[1]


def step(db: CensusDatabase, save: bool = True) -> StepReport:
    entry = select(db)
    bound = _seed_bound(db)
    if bound is not None and entry.volume >= bound:  # type: ignore[operator]
        raise SelectionError(
            f"next volume {entry.volume:.7f} reaches the largest Löbell seed; add more Löbell seeds"
        )
    parent_real = db.realization(entry.id)
    payload = _parent_payload(parent_real)
    fresh: dict[bytes, tuple[Polyhedron, list[tuple[int, str]]]] = {}
    hits = 0
    sites = addition_sites(entry.poly)
    for site in sites:
        child = apply_edge_addition(entry.poly, site)
        code = canonical_code(child)
        known = db.by_code.get(code)
        if known is not None:
            hits += 1
            target = db.entries[known]
            if db.entries[known].face_vector != face_vector(child):
                raise DatabaseError(f"entry {known}: equal codes with different face vectors")
            if all(p != entry.id for p, _ in target.parents):
                target.parents.append((entry.id, site.descriptor()))
            continue
        if code in fresh:
            hits += 1
            continue
        if not validate_pogorelov(child).valid:
            continue
        fresh[code] = (child, [(entry.id, site.descriptor())])
    order = list(fresh.values())
    tasks = [(c.rot, payload, db.tol, db.volume_tol, db.restarts) for c, _ in order]
    vols = _compute_volumes(db, tasks)
    new_ids, failures = [], []
    for (child, parents), v in zip(order, vols):
        e = _insert(db, child, "edge-child", v, parents)
        new_ids.append(e.id)
        if v is None:
            failures.append(e.id)
            log.warning("volume failed for entry %d", e.id)
    entry.expanded = True
    entry.rank = db.next_rank
    db.next_rank += 1
    if save and db.path is not None:
        db.save()
    return StepReport(entry.rank, entry.id, entry.volume, len(sites), new_ids, hits, failures)  # type: ignore[arg-type]


def extend(db: CensusDatabase, n: int, progress=None) -> list[StepReport]:
    reports = []
    for _ in range(n):
        r = step(db)
        reports.append(r)
        if progress is not None:
            progress(r)
    return reports


# ---------------------------------------------------------------------------
# Verification against published tables
# ---------------------------------------------------------------------------


def load_reference(source: str | os.PathLike | None = None) -> dict[int, float]:
    """Rank -> volume table.  ``None`` or ``"appendix_a"``/``"table1"`` load bundled data."""
    if source is None or str(source) in ("appendix_a", "table1"):
        name = "table1.tsv" if str(source) == "table1" else "appendix_a.tsv"
        text = resources.files("rapcensus").joinpath("data", name).read_text(encoding="utf-8")
    else:
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise CensusError(f"cannot read reference {source}: {exc}") from None
    table: dict[int, float] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.replace(":", " ").split()
        if len(parts) != 2:
            raise CensusError(f"reference line {lineno}: expected 'rank volume'")
        try:
            table[int(parts[0])] = float(parts[1])
        except ValueError:
            raise CensusError(f"reference line {lineno}: cannot parse {line!r}") from None
    return table


@dataclass
class VerifyReport:
    compared: int
    max_deviation: float
    first_mismatch: int | None
    inversions: list[int]
    near_collisions: list[tuple[int, int]]
    missing: list[int]
    tol: float

    @property
    def passed(self) -> bool:
        return self.first_mismatch is None and not self.inversions and not self.missing

    def lines(self) -> list[str]:
        out = [
            f"compared {self.compared} ranks, max deviation {self.max_deviation:.3e} (tol {self.tol:g})",
        ]
        if self.first_mismatch is not None:
            out.append(f"first mismatch at rank {self.first_mismatch}")
        if self.missing:
            out.append(f"missing ranks: {self.missing[0]}..{self.missing[-1]}")
        if self.inversions:
            out.append("rank-order inversions at " + ", ".join(map(str, self.inversions)))
        for a, b in self.near_collisions:
            out.append(f"near-collision: ranks {a} and {b} have almost equal volume but differ")
        out.append("PASS" if self.passed else "FAIL")
        return out


def verify_against(
    db: CensusDatabase,
    reference: dict[int, float] | str | os.PathLike | None = None,
    tol: float = 1e-4,
    upto: int | None = None,
    collision_tol: float = 1e-6,
) -> VerifyReport:
    table = reference if isinstance(reference, dict) else load_reference(reference)
    ranks = sorted(table) if upto is None else [r for r in sorted(table) if r <= upto]
    ranked = {e.rank: e for e in db.ranked()}
    worst, first, missing = 0.0, None, []
    for r in ranks:
        e = ranked.get(r)
        if e is None or e.volume is None:
            missing.append(r)
            continue
        dev = abs(e.volume - table[r])
        worst = max(worst, dev)
        if dev > tol and first is None:
            first = r
    inversions, collisions = [], []
    seq = [ranked[r] for r in sorted(ranked)]
    for a, b in zip(seq, seq[1:]):
        if b.volume < a.volume - TIE_TOLERANCE:  # type: ignore[operator]
            inversions.append(b.rank)
        if abs(b.volume - a.volume) < collision_tol and a.code != b.code:  # type: ignore[operator]
            collisions.append((a.rank, b.rank))
    return VerifyReport(len(ranks) - len(missing), worst, first, inversions, collisions, missing, tol)


# ---------------------------------------------------------------------------
# Composition audit
# ---------------------------------------------------------------------------


@dataclass
class AuditItem:
    pair: tuple[int, int]
    poly: Polyhedron
    site: CompositionSite
    status: str  # in-db | descendant | absent


@dataclass
class AuditReport:
    bound: float
    set_a: list[int]
    set_b: list[int]
    pairs: list[tuple[int, int]]
    items: list[AuditItem]

    @property
    def absent(self) -> list[AuditItem]:
        return [i for i in self.items if i.status == "absent"]

    def lines(self) -> list[str]:
        out = [
            f"A: {len(self.set_a)} ranks below {self.bound:g} - vol(rank 1)",
            "B: ranks " + ",".join(map(str, self.set_b)),
            "pairs: " + " ".join(f"({a},{b})" for a, b in self.pairs),
        ]
        counts: dict[str, int] = {}
        for i in self.items:
            counts[i.status] = counts.get(i.status, 0) + 1
        out.append("compositions: " + ", ".join(f"{k} {v}" for k, v in sorted(counts.items())))
        for i in self.absent:
            out.append(f"absent: A{i.pair[0]} with A{i.pair[1]} at site {i.site.descriptor()}")
        return out


class _DescendantOracle:
    """Decides membership in the descendant set of the seeds.

    A polyhedron is a descendant iff it is a seed, or deleting some edge
    yields a valid descendant.  Entries of the database are descendants by
    construction; everything else is settled by a memoised backward search.
    """

    def __init__(self, db: CensusDatabase):
        self.known = {c: True for c in db.by_code if db.entries[db.by_code[c]].provenance != "composition"}
        self.seeds = {e.code for e in db.entries.values() if e.provenance == "seed"}

    def __call__(self, poly: Polyhedron) -> bool:
        code = canonical_code(poly)
        hit = self.known.get(code)
        if hit is not None:
            return hit
        result = False
        if lobell_index(poly) is not None:
            result = True
        else:
            for e in range(poly.num_edges):
                try:
                    parent = edge_delete(poly, e)
                except PolyhedronError:
                    continue
                if validate_pogorelov(parent).valid and self(parent):
                    result = True
                    break
        self.known[code] = result
        return result


def composition_audit(db: CensusDatabase, volume_bound: float = 15.0) -> AuditReport:
    ranked = db.ranked()
    if not ranked:
        raise CensusError("composition audit needs a ranked database")
    v1 = ranked[0].volume
    limit = volume_bound - v1  # type: ignore[operator]
    pending = [e.volume for e in db.unexpanded() if e.volume_status == "ok"]
    if not pending or min(pending) < limit or any(e.volume_status != "ok" for e in db.unexpanded()):  # type: ignore[type-var]
        raise CensusError(f"database is not expanded past volume {limit:.5f}; extend it first")
    set_a = [e for e in ranked if e.volume < limit]  # type: ignore[operator]
    set_b = [e for e in set_a if lemma_witness(e.poly) is None]
    pairs = []
    for i, a in enumerate(set_b):
        for b in set_b[i:]:
            if a.volume + b.volume < volume_bound:  # type: ignore[operator]
                pairs.append((a, b))
    oracle = _DescendantOracle(db)
    items = []
    for a, b in pairs:
        # larger polyhedron first, matching the naming "A39 with A1"
        p, q = (b, a) if b.rank > a.rank else (a, b)  # type: ignore[operator]
        report = all_compositions(p.poly, q.poly)
        for poly, site in report.results:
            if canonical_code(poly) in db.by_code:
                status = "in-db"
            elif oracle(poly):
                status = "descendant"
            else:
                status = "absent"
            items.append(AuditItem((p.rank, q.rank), poly, site, status))  # type: ignore[arg-type]
    return AuditReport(
        volume_bound,
        [e.rank for e in set_a],  # type: ignore[misc]
        [e.rank for e in set_b],  # type: ignore[misc]
        [(a.rank, b.rank) for a, b in pairs],  # type: ignore[misc]
        items,
    )


# ---------------------------------------------------------------------------
# Family tree
# ---------------------------------------------------------------------------


def ancestors(db: CensusDatabase, eid: int) -> list[tuple[int, CensusEntry, list[tuple[int, str]]]]:
    """Breadth-first ancestry: (generation, entry, parent links) with the entry itself at 0."""
    out = []
    seen = {eid}
    frontier = [eid]
    depth = 0
    while frontier:
        nxt = []
        for i in frontier:
            e = db.entries[i]
            out.append((depth, e, list(e.parents)))
            for p, _ in e.parents:
                if p not in seen:
                    seen.add(p)
                    nxt.append(p)
        frontier = sorted(nxt)
        depth += 1
    return out


def replay_parent(db: CensusDatabase, eid: int, link: tuple[int, str]) -> Polyhedron:
    """Apply a recorded parent move; the result must have the child's code."""
    pid, desc = link
    parent = db.entries[pid].poly
    return apply_edge_addition(parent, EdgeAdditionSite.from_descriptor(parent, desc))


"""Rotation-system representation of trivalent spherical maps.

A polyhedron is stored as a tuple of counterclockwise neighbour triples,
one per vertex.  Darts are numbered ``3*v + i`` for the ``i``-th neighbour
of vertex ``v``; ``next`` rotates counterclockwise around the tail and
faces are the orbits of ``d -> next(twin(d))`` (every face lies to the
right of its darts, so boundaries come out clockwise in a planar drawing).
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

__all__ = [
    "PolyhedronError",
    "ParseError",
    "Polyhedron",
    "FaceVector",
    "PrismaticCircuit",
    "ValidityReport",
    "LemmaWitness",
    "parse_polyhedron",
    "serialize_polyhedron",
    "faces",
    "face_vector",
    "prismatic_circuits",
    "crossed_by_prismatic",
    "validate_pogorelov",
    "is_three_connected",
    "edge_context",
    "very_good_edges",
    "lemma_witness",
    "check_lemma_witness",
]

FORMAT_TAG = "RAP1"


class PolyhedronError(ValueError):
    """Structural problem with a rotation system."""


class ParseError(PolyhedronError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


Edge = tuple[int, int]


@dataclass(frozen=True, eq=False)
class Polyhedron:
    """Immutable trivalent map given by counterclockwise rotations.

    Construction checks degree, simplicity and adjacency symmetry; the
    spherical (genus 0) condition is reported by :attr:`is_spherical`
    and by :func:`validate_pogorelov`.
    """

    rot: tuple[tuple[int, int, int], ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        rot = tuple(tuple(int(x) for x in r) for r in self.rot)
        object.__setattr__(self, "rot", rot)
        n = len(rot)
        for v, nbrs in enumerate(rot):
            if len(nbrs) != 3:
                raise PolyhedronError(f"vertex {v} has degree {len(nbrs)}, expected 3")
            for w in nbrs:
                if not 0 <= w < n:
                    raise PolyhedronError(f"vertex {v} lists unknown neighbour {w}")
                if w == v:
                    raise PolyhedronError(f"vertex {v} has a loop")
            if len(set(nbrs)) != 3:
                raise PolyhedronError(f"vertex {v} has parallel edges")
        for v, nbrs in enumerate(rot):
            for w in nbrs:
                if v not in rot[w]:
                    raise PolyhedronError(f"edge {v}-{w} is not listed at vertex {w}")

    # -- basic counts -------------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self.rot)

    @property
    def num_edges(self) -> int:
        return 3 * len(self.rot) // 2

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    @property
    def num_darts(self) -> int:
        return 3 * len(self.rot)

    # -- dart algebra -------------------------------------------------------

    @cached_property
    def twin(self) -> tuple[int, ...]:
        rot = self.rot
        out = []
        for v, nbrs in enumerate(rot):
            for w in nbrs:
                out.append(3 * w + rot[w].index(v))
        return tuple(out)

    @staticmethod
    def next(d: int) -> int:
        return d - d % 3 + (d % 3 + 1) % 3

    @staticmethod
    def prev(d: int) -> int:
        return d - d % 3 + (d % 3 + 2) % 3

    def tail(self, d: int) -> int:
        return d // 3

    def head(self, d: int) -> int:
        return self.rot[d // 3][d % 3]

    def dart(self, u: int, w: int) -> int:
        """Dart from ``u`` to ``w``."""
        try:
            return 3 * u + self.rot[u].index(w)
        except ValueError:
            raise PolyhedronError(f"{u}-{w} is not an edge") from None

    # -- derived tables -----------------------------------------------------

    @cached_property
    def faces(self) -> tuple[tuple[int, ...], ...]:
        """Face boundaries as dart cycles, in order of first dart."""
        twin = self.twin
        seen = [False] * self.num_darts
        out = []
        for start in range(self.num_darts):
            if seen[start]:
                continue
            cyc = []
            d = start
            while not seen[d]:
                seen[d] = True
                cyc.append(d)
                t = twin[d]
                d = t - t % 3 + (t % 3 + 1) % 3
            out.append(tuple(cyc))
        return tuple(out)

    @cached_property
    def face_of_dart(self) -> tuple[int, ...]:
        table = [0] * self.num_darts
        for f, cyc in enumerate(self.faces):
            for d in cyc:
                table[d] = f
        return tuple(table)

    @cached_property
    def face_sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.faces)

    @cached_property
    def face_vertices(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(d // 3 for d in cyc) for cyc in self.faces)

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        """Undirected edges sorted by (smaller endpoint, larger endpoint)."""
        return tuple(sorted((v, w) for v, nbrs in enumerate(self.rot) for w in nbrs if v < w))

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def edge_faces(self) -> tuple[tuple[int, int], ...]:
        """The two faces on either side of each edge (right of u->w first)."""
        fod = self.face_of_dart
        tw = self.twin
        out = []
        for u, w in self.edges:
            d = self.dart(u, w)
            out.append((fod[d], fod[tw[d]]))
        return tuple(out)

    @cached_property
    def vertex_faces(self) -> tuple[tuple[int, int, int], ...]:
        fod = self.face_of_dart
        return tuple((fod[3 * v], fod[3 * v + 1], fod[3 * v + 2]) for v in range(self.num_vertices))

    @cached_property
    def dual_adjacency(self) -> tuple[dict[int, int], ...]:
        """For each face, map neighbouring face -> shared edge index."""
        adj: list[dict[int, int]] = [dict() for _ in self.faces]
        for i, (f, g) in enumerate(self.edge_faces):
            adj[f][g] = i
            adj[g][f] = i
        return tuple(adj)

    @property
    def is_spherical(self) -> bool:
        return self.num_vertices - self.num_edges + self.num_faces == 2

    def mirror(self) -> "Polyhedron":
        """Same graph with every rotation reversed."""
        return Polyhedron(tuple((a, c, b) for a, b, c in self.rot))

    def relabel(self, perm: Sequence[int], rotate: Sequence[int] | None = None) -> "Polyhedron":
        """Rename vertex ``v`` to ``perm[v]``; optionally cycle each rotation start."""
        n = self.num_vertices
        new: list[tuple[int, int, int] | None] = [None] * n
        for v, nbrs in enumerate(self.rot):
            s = rotate[v] % 3 if rotate is not None else 0
            r = nbrs[s:] + nbrs[:s]
            new[perm[v]] = tuple(perm[w] for w in r)  # type: ignore[assignment]
        return Polyhedron(tuple(new))  # type: ignore[arg-type]

    def __repr__(self) -> str:
        try:
            fv = str(face_vector(self))
        except PolyhedronError:
            fv = "{" + ", ".join(f"{k}: {n}" for k, n in sorted(Counter(self.face_sizes).items())) + "}"
        return f"Polyhedron(V={self.num_vertices}, F={self.num_faces}, fv={fv})"


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------


def parse_polyhedron(text: str) -> Polyhedron:
    """Parse the ``RAP1`` rotation-system format.

    Errors carry the 1-based line number that caused them.
    """
    header = None
    rows: dict[int, tuple[tuple[int, int, int], int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != FORMAT_TAG or not parts[1].isdigit():
                raise ParseError(f"expected '{FORMAT_TAG} <V>' header, got {line!r}", lineno)
            header = int(parts[1])
            continue
        if ":" not in line:
            raise ParseError(f"malformed vertex line {line!r}", lineno)
        lhs, rhs = line.split(":", 1)
        try:
            v = int(lhs)
            nbrs = tuple(int(x) for x in rhs.split())
        except ValueError:
            raise ParseError(f"non-integer token in {line!r}", lineno) from None
        if len(nbrs) != 3:
            raise ParseError(f"vertex {v} has degree {len(nbrs)}, expected 3", lineno)
        if v in rows:
            raise ParseError(f"vertex {v} listed twice", lineno)
        if not 0 <= v < header:
            raise ParseError(f"vertex id {v} out of range 0..{header - 1}", lineno)
        rows[v] = (nbrs, lineno)  # type: ignore[assignment]
    if header is None:
        raise ParseError("empty input")
    missing = sorted(set(range(header)) - set(rows))
    if missing:
        raise ParseError(f"missing vertex lines for {missing[:5]}")
    for v, (nbrs, lineno) in rows.items():
        for w in nbrs:
            if not 0 <= w < header:
                raise ParseError(f"vertex {v} lists unknown neighbour {w}", lineno)
            if w == v or nbrs.count(w) > 1:
                raise ParseError(f"vertex {v} is not simple", lineno)
            if v not in rows[w][0]:
                raise ParseError(f"edge {v}-{w} is not listed at vertex {w}", lineno)
    poly = Polyhedron(tuple(rows[v][0] for v in range(header)))
    if not poly.is_spherical:
        chi = poly.num_vertices - poly.num_edges + poly.num_faces
        raise ParseError(f"rotation system is not spherical (Euler characteristic {chi})")
    return poly


def serialize_polyhedron(poly: Polyhedron, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"{FORMAT_TAG} {poly.num_vertices}")
    lines.extend(f"{v}: {a} {b} {c}" for v, (a, b, c) in enumerate(poly.rot))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Faces and face vectors
# ---------------------------------------------------------------------------


def faces(poly: Polyhedron) -> list[tuple[int, ...]]:
    return list(poly.faces)


@dataclass(frozen=True)
class FaceVector:
    """Counts of k-gonal faces starting at k = 5, trailing zeros trimmed."""

    counts: tuple[int, ...]

    @classmethod
    def from_sizes(cls, sizes: Iterable[int]) -> "FaceVector":
        c = Counter(sizes)
        small = sorted(k for k in c if k < 5)
        if small:
            raise PolyhedronError(f"face of size {small[0]} < 5")
        top = max(c) if c else 4
        return cls(tuple(c.get(k, 0) for k in range(5, top + 1)))

    def __getitem__(self, k: int) -> int:
        """Number of k-gons."""
        i = k - 5
        return self.counts[i] if 0 <= i < len(self.counts) else 0

    def euler_sum(self) -> int:
        return sum((6 - k) * n for k, n in enumerate(self.counts, start=5))

    def to_text(self) -> str:
        return ",".join(f"{k}:{n}" for k, n in enumerate(self.counts, start=5) if n)

    @classmethod
    def from_text(cls, text: str) -> "FaceVector":
        pairs = dict(tuple(int(x) for x in p.split(":")) for p in text.split(",") if p)
        top = max(pairs) if pairs else 4
        return cls(tuple(pairs.get(k, 0) for k in range(5, top + 1)))

    def __str__(self) -> str:
        return "[" + ", ".join(map(str, self.counts)) + "]"


def face_vector(poly: Polyhedron) -> FaceVector:
    return FaceVector.from_sizes(poly.face_sizes)


# ---------------------------------------------------------------------------
# Prismatic circuits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrismaticCircuit:
    """A closed curve through ``faces`` crossing ``edges[i]`` between
    ``faces[i]`` and ``faces[i+1]`` (indices mod k); edges are edge indices."""

    faces: tuple[int, ...]
    edges: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.edges)

    @classmethod
    def normalized(cls, faces: Sequence[int], edges: Sequence[int]) -> "PrismaticCircuit":
        k = len(faces)
        i = min(range(k), key=lambda j: faces[j])
        fs = list(faces[i:]) + list(faces[:i])
        es = list(edges[i:]) + list(edges[:i])
        if k > 2 and fs[-1] < fs[1]:
            fs = [fs[0]] + fs[1:][::-1]
            es = es[::-1]
            es = es[1:] + es[:1]
        return cls(tuple(fs), tuple(es))

    def verify(self, poly: Polyhedron) -> bool:
        k = self.k
        if k < 3 or len(set(self.faces)) != k or len(set(self.edges)) != k:
            return False
        adj = poly.dual_adjacency
        for i in range(k):
            f, g = self.faces[i], self.faces[(i + 1) % k]
            if adj[f].get(g) != self.edges[i]:
                return False
        ends = [v for e in self.edges for v in poly.edges[e]]
        return len(set(ends)) == 2 * k


def _disjoint_edges(poly: Polyhedron, edge_ids: Sequence[int]) -> bool:
    seen: set[int] = set()
    for e in edge_ids:
        u, w = poly.edges[e]
        if u in seen or w in seen:
            return False
        seen.add(u)
        seen.add(w)
    return True


def _dual_cycles(poly: Polyhedron, k: int) -> Iterator[tuple[list[int], list[int]]]:
    """Simple k-cycles of the dual graph, each reported once."""
    adj = poly.dual_adjacency
    for s in range(poly.num_faces):
        path = [s]
        edges: list[int] = []

        def extend(f: int) -> Iterator[tuple[list[int], list[int]]]:
            if len(path) == k:
                e = adj[f].get(s)
                if e is not None and path[1] < path[-1]:
                    yield list(path), edges + [e]
                return
            for g, e in adj[f].items():
                if g <= s or g in path:
                    continue
                path.append(g)
                edges.append(e)
                yield from extend(g)
                path.pop()
                edges.pop()

        yield from extend(s)


def prismatic_circuits(poly: Polyhedron, k: int) -> list[PrismaticCircuit]:
    """All prismatic k-circuits, one per unoriented curve."""
    if k not in (3, 4, 5):
        raise ValueError(f"prismatic circuit length must be 3, 4 or 5, got {k}")
    key = ("prismatic", k)
    if key not in poly._cache:
        out = [
            PrismaticCircuit.normalized(fs, es)
            for fs, es in _dual_cycles(poly, k)
            if _disjoint_edges(poly, es)
        ]
        out.sort(key=lambda c: (c.faces, c.edges))
        poly._cache[key] = out
    return list(poly._cache[key])


def crossed_by_prismatic(poly: Polyhedron, edge: int, k: int = 5) -> PrismaticCircuit | None:
    """A prismatic k-circuit crossing ``edge``, or None.

    Only cycles through the dual edge are searched.
    """
    adj = poly.dual_adjacency
    f0, f1 = poly.edge_faces[edge]
    path = [f1]
    edges = [edge]

    def extend(f: int) -> PrismaticCircuit | None:
        if len(path) == k - 1:
            e = adj[f].get(f0)
            if e is not None and _disjoint_edges(poly, edges + [e]):
                return PrismaticCircuit.normalized([f0] + path, edges + [e])
            return None
        for g, e in adj[f].items():
            if g == f0 or g in path:
                continue
            if not _disjoint_edges(poly, edges + [e]):
                continue
            path.append(g)
            edges.append(e)
            found = extend(g)
            path.pop()
            edges.pop()
            if found is not None:
                return found
        return None

    return extend(f1)


# ---------------------------------------------------------------------------
# Validity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidityReport:
    trivalent: bool
    simple: bool
    planar_sphere: bool
    three_connected: bool
    prismatic3: PrismaticCircuit | None = None
    prismatic4: PrismaticCircuit | None = None

    @property
    def valid(self) -> bool:
        return (
            self.trivalent
            and self.simple
            and self.planar_sphere
            and self.three_connected
            and self.prismatic3 is None
            and self.prismatic4 is None
        )

    def reasons(self) -> list[str]:
        out = []
        for name in ("trivalent", "simple", "planar_sphere", "three_connected"):
            if not getattr(self, name):
                out.append(f"not {name}")
        if self.prismatic3 is not None:
            out.append(f"prismatic 3-circuit through faces {self.prismatic3.faces}")
        if self.prismatic4 is not None:
            out.append(f"prismatic 4-circuit through faces {self.prismatic4.faces}")
        return out


def _connected(poly: Polyhedron, removed: frozenset[int] = frozenset()) -> bool:
    n = poly.num_vertices
    start = next((v for v in range(n) if v not in removed), None)
    if start is None:
        return True
    seen = {start} | set(removed)
    stack = [start]
    while stack:
        v = stack.pop()
        for w in poly.rot[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def is_three_connected(poly: Polyhedron) -> bool:
    """Vertex 3-connectivity via the dual of a spherical cubic map.

    For cubic graphs vertex and edge connectivity agree, and a minimal
    edge cut of a spherical map is a cycle of the dual, so it suffices
    that the dual has no loops and no parallel edges.
    """
    if poly.num_vertices < 4 or not _connected(poly):
        return False
    if not poly.is_spherical:
        return _three_connected_bruteforce(poly)
    seen = set()
    for f, g in poly.edge_faces:
        if f == g:
            return False
        key = (min(f, g), max(f, g))
        if key in seen:
            return False
        seen.add(key)
    return True


def _three_connected_bruteforce(poly: Polyhedron) -> bool:
    n = poly.num_vertices
    if n < 4 or not _connected(poly):
        return False
    for v in range(n):
        if not _connected(poly, frozenset([v])):
            return False
    for a, b in itertools.combinations(range(n), 2):
        if not _connected(poly, frozenset([a, b])):
            return False
    return True


def validate_pogorelov(poly: Polyhedron) -> ValidityReport:
    # degree and simplicity are enforced by Polyhedron itself
    sphere = poly.is_spherical
    three = is_three_connected(poly)
    p3 = p4 = None
    if sphere and three:
        c3 = prismatic_circuits(poly, 3)
        c4 = prismatic_circuits(poly, 4)
        p3 = c3[0] if c3 else None
        p4 = c4[0] if c4 else None
    return ValidityReport(True, True, sphere, three, p3, p4)


# ---------------------------------------------------------------------------
# Edge predicates
# ---------------------------------------------------------------------------


def _as_edge_id(poly: Polyhedron, e: int | Edge) -> int:
    if isinstance(e, tuple):
        return poly.edge_index[(min(e), max(e))]
    return int(e)


def edge_context(poly: Polyhedron, e: int | Edge) -> tuple[int, int, int, int]:
    """Faces (J1, J2, K1, K2) for an edge.

    J1, J2 contain the edge; K1 (at the smaller endpoint) and K2 are the
    faces it edge-connects.
    """
    i = _as_edge_id(poly, e)
    u, w = poly.edges[i]
    j1, j2 = poly.edge_faces[i]
    k1 = next(f for f in poly.vertex_faces[u] if f not in (j1, j2))
    k2 = next(f for f in poly.vertex_faces[w] if f not in (j1, j2))
    return j1, j2, k1, k2


def very_good_edges(poly: Polyhedron) -> list[int]:
    """Indices of edges that edge-connect two large faces and are crossed
    by no prismatic 5-circuit."""
    if "very_good" not in poly._cache:
        sizes = poly.face_sizes
        out = []
        for i in range(poly.num_edges):
            _, _, k1, k2 = edge_context(poly, i)
            if sizes[k1] >= 6 and sizes[k2] >= 6 and crossed_by_prismatic(poly, i, 5) is None:
                out.append(i)
        poly._cache["very_good"] = out
    return list(poly._cache["very_good"])


@dataclass(frozen=True)
class LemmaWitness:
    """Very good edges satisfying one of the two composition conditions.

    For ``kind == 1``: ``edges = (e1, e2)`` and ``faces = (F1, F2, G1, G2)``.
    For ``kind == 2``: ``edges = (e12, e23, e31)`` and ``faces = (F1, F2, F3)``.
    """

    kind: int
    edges: tuple[int, ...]
    faces: tuple[int, ...]


def _edge_on_face(poly: Polyhedron, e: int, f: int) -> bool:
    return f in poly.edge_faces[e]


def _condition_one(poly: Polyhedron, e1: int, e2: int) -> LemmaWitness | None:
    a1, b1, f1, f2 = edge_context(poly, e1)
    a2, b2, g1, g2 = edge_context(poly, e2)
    if {a1, b1} & {a2, b2}:
        return None
    if {f1, f2} & {g1, g2}:
        return None
    if _edge_on_face(poly, e1, g1) or _edge_on_face(poly, e1, g2):
        return None
    if _edge_on_face(poly, e2, f1) or _edge_on_face(poly, e2, f2):
        return None
    return LemmaWitness(1, (e1, e2), (f1, f2, g1, g2))


def _condition_two(poly: Polyhedron, trio: Sequence[int]) -> LemmaWitness | None:
    ctx = [edge_context(poly, e) for e in trio]
    for i, j in itertools.combinations(range(3), 2):
        if set(ctx[i][:2]) & set(ctx[j][:2]):
            return None
    pairs = [frozenset(c[2:]) for c in ctx]
    if any(len(p) != 2 for p in pairs):
        return None
    allf = set().union(*pairs)
    if len(allf) != 3 or len(set(pairs)) != 3:
        return None
    # order as e12, e23, e31 with F1, F2, F3
    for perm in itertools.permutations(range(3)):
        p = [pairs[i] for i in perm]
        f2 = p[0] & p[1]
        f3 = p[1] & p[2]
        f1 = p[2] & p[0]
        if len(f1) == len(f2) == len(f3) == 1:
            (a,), (b,), (c,) = f1, f2, f3
            return LemmaWitness(2, tuple(trio[i] for i in perm), (a, b, c))
    return None


def check_lemma_witness(poly: Polyhedron, w: LemmaWitness) -> bool:
    """Re-verify every clause of a witness from scratch."""
    vg = set(very_good_edges(poly))
    if not set(w.edges) <= vg:
        return False
    if w.kind == 1:
        e1, e2 = w.edges
        a1, b1, f1, f2 = edge_context(poly, e1)
        a2, b2, g1, g2 = edge_context(poly, e2)
        if (f1, f2, g1, g2) != w.faces:
            return False
        clause_a = not ({a1, b1} & {a2, b2})
        clause_b = all(fi != gj for fi in (f1, f2) for gj in (g1, g2))
        clause_c = (
            g1 not in (a1, b1) and g2 not in (a1, b1) and f1 not in (a2, b2) and f2 not in (a2, b2)
        )
        return clause_a and clause_b and clause_c
    if w.kind == 2:
        e12, e23, e31 = w.edges
        f1, f2, f3 = w.faces
        if len({f1, f2, f3}) != 3:
            return False
        ctx = {e: edge_context(poly, e) for e in w.edges}
        for x, y in itertools.combinations(w.edges, 2):
            if set(ctx[x][:2]) & set(ctx[y][:2]):
                return False
        want = {e12: {f1, f2}, e23: {f2, f3}, e31: {f3, f1}}
        return all(set(ctx[e][2:]) == want[e] for e in w.edges)
    return False


def lemma_witness(poly: Polyhedron) -> LemmaWitness | None:
    """First witness of condition (1), else of condition (2), else None.

    Very good edges are scanned in edge order (smaller endpoint, larger
    endpoint); pairs and triples lexicographically.
    """
    vg = very_good_edges(poly)
    for e1, e2 in itertools.combinations(vg, 2):
        w = _condition_one(poly, e1, e2)
        if w is not None:
            return w
    for trio in itertools.combinations(vg, 3):
        w = _condition_two(poly, trio)
        if w is not None:
            return w
    return None

"""Constructions and moves on trivalent spherical maps.

Löbell polyhedra, edge addition / deletion, composition / decomposition
and greedy reduction chains down to Löbell components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .core import (
    PolyhedronError,
    Polyhedron,
    PrismaticCircuit,
    prismatic_circuits,
    very_good_edges,
)

__all__ = [
    "SurgeryError",
    "EdgeAdditionSite",
    "CompositionSite",
    "ReductionStep",
    "ReductionChain",
    "lobell",
    "lobell_index",
    "double_lobell",
    "edge_delete",
    "edge_additions",
    "apply_edge_addition",
    "addition_sites",
    "compose",
    "composition_sites",
    "all_compositions",
    "decompose",
    "is_face_parallel",
    "nontrivial_circuits",
    "reduce_to_lobell",
]


class SurgeryError(PolyhedronError):
    pass


def _from_drawing(adj: Sequence[Sequence[int]], xy: Sequence[tuple[float, float]]) -> Polyhedron:
    """Rotation system read off a straight-line planar drawing."""
    rot = []
    for v, nbrs in enumerate(adj):
        x0, y0 = xy[v]
        rot.append(tuple(sorted(nbrs, key=lambda w: math.atan2(xy[w][1] - y0, xy[w][0] - x0))))
    return Polyhedron(tuple(rot))


def _check_counts(poly: Polyhedron) -> Polyhedron:
    if not poly.is_spherical or 2 * poly.num_edges != 3 * poly.num_vertices:
        raise SurgeryError("surgery produced a non-spherical map")
    return poly


def lobell(n: int) -> Polyhedron:
    """Löbell polyhedron L_n: two n-gons separated by two rings of pentagons.

    Vertex layout: top ring ``a_i`` (0..n-1), ``b_i`` below each ``a_i``,
    zig-zag ``c_i``, bottom ring ``d_i``.
    """
    if n < 5:
        raise ValueError(f"Löbell polyhedra need n >= 5, got {n}")
    a = lambda i: i % n
    b = lambda i: n + i % n
    c = lambda i: 2 * n + i % n
    d = lambda i: 3 * n + i % n
    adj: list[list[int]] = [[] for _ in range(4 * n)]

    def join(u: int, w: int) -> None:
        adj[u].append(w)
        adj[w].append(u)

    for i in range(n):
        join(a(i), a(i + 1))
        join(a(i), b(i))
        join(b(i), c(i))
        join(c(i), b(i + 1))
        join(c(i), d(i))
        join(d(i), d(i + 1))
    xy = []
    for radius, shift in ((1.0, 0.0), (2.0, 0.0), (3.0, 0.5), (5.0, 0.5)):
        for i in range(n):
            t = 2 * math.pi * (i + shift) / n
            xy.append((radius * math.cos(t), radius * math.sin(t)))
    return _check_counts(_from_drawing(adj, xy))


def lobell_index(poly: Polyhedron) -> int | None:
    """n if ``poly`` is isomorphic to L_n, else None."""
    from .canon import canonical_code

    sizes = sorted(poly.face_sizes)
    n = poly.num_vertices // 4
    if n < 5 or poly.num_vertices != 4 * n:
        return None
    expected = sorted([5] * (2 * n) + [n] * 2)
    if sizes != expected:
        return None
    return n if canonical_code(poly) == canonical_code(lobell(n)) else None


# ---------------------------------------------------------------------------
# Edge deletion / addition
# ---------------------------------------------------------------------------


def _drop_vertices(rot: list[list[int]], removed: set[int]) -> Polyhedron:
    keep = [v for v in range(len(rot)) if v not in removed]
    new_id = {v: i for i, v in enumerate(keep)}
    return Polyhedron(tuple(tuple(new_id[w] for w in rot[v]) for v in keep))


def edge_delete(poly: Polyhedron, e: int | tuple[int, int]) -> Polyhedron:
    """Remove an edge and smooth its two endpoints.

    Remaining vertices keep their relative order.  Raises SurgeryError if
    the result would have a loop or parallel edges.
    """
    if isinstance(e, tuple):
        e = poly.edge_index[(min(e), max(e))]
    x, y = poly.edges[e]
    rot = [list(r) for r in poly.rot]
    for s, t in ((x, y), (y, x)):
        a1, a2 = [w for w in rot[s] if w != t]
        if a1 in rot[a2] or a1 in (x, y) or a2 in (x, y):
            raise SurgeryError(f"deleting edge {x}-{y} creates parallel edges or a loop")
        rot[a1][rot[a1].index(s)] = a2
        rot[a2][rot[a2].index(s)] = a1
    try:
        out = _drop_vertices(rot, {x, y})
    except PolyhedronError as exc:
        raise SurgeryError(f"deleting edge {x}-{y}: {exc}") from None
    return _check_counts(out)


@dataclass(frozen=True)
class EdgeAdditionSite:
    """Chord across ``face`` between boundary darts at positions ``i < j``.

    ``edge_a`` and ``edge_b`` are the subdivided edges as vertex pairs;
    ``gaps`` counts boundary edges strictly between them on each side.
    """

    face: int
    i: int
    j: int
    edge_a: tuple[int, int]
    edge_b: tuple[int, int]
    gaps: tuple[int, int]

    def descriptor(self) -> str:
        return f"{self.face}:{self.i}:{self.j}"

    @classmethod
    def from_descriptor(cls, poly: Polyhedron, text: str) -> "EdgeAdditionSite":
        f, i, j = (int(x) for x in text.split(":"))
        return _make_site(poly, f, i, j)


def _make_site(poly: Polyhedron, f: int, i: int, j: int) -> EdgeAdditionSite:
    cyc = poly.faces[f]
    m = len(cyc)
    if not 0 <= i < j < m:
        raise SurgeryError(f"bad edge-addition positions {i}, {j} on face {f}")
    da, db = cyc[i], cyc[j]
    return EdgeAdditionSite(
        f,
        i,
        j,
        (da // 3, poly.head(da)),
        (db // 3, poly.head(db)),
        (j - i - 1, m - (j - i) - 1),
    )


def addition_sites(poly: Polyhedron) -> list[EdgeAdditionSite]:
    """Every chord with at least two boundary edges on either side."""
    out = []
    for f, cyc in enumerate(poly.faces):
        m = len(cyc)
        if m < 6:
            continue
        for i in range(m):
            for j in range(i + 3, m):
                if m - (j - i) - 1 >= 2:
                    out.append(_make_site(poly, f, i, j))
    return out


def apply_edge_addition(poly: Polyhedron, site: EdgeAdditionSite) -> Polyhedron:
    """New vertices ``V`` (on edge_a) and ``V+1`` (on edge_b), joined inside the face."""
    n = poly.num_vertices
    x, y = n, n + 1
    rot = [list(r) for r in poly.rot] + [None, None]  # type: ignore[list-item]
    (u, w), (p, q) = site.edge_a, site.edge_b
    # face lies right of u->w and p->q
    rot[x] = [w, u, y]
    rot[y] = [q, p, x]
    for s, t, new in ((u, w, x), (w, u, x), (p, q, y), (q, p, y)):
        rot[s][rot[s].index(t)] = new
    return _check_counts(Polyhedron(tuple(tuple(r) for r in rot)))


def edge_additions(poly: Polyhedron) -> list[tuple[Polyhedron, EdgeAdditionSite]]:
    """All raw edge-children with their sites (no deduplication)."""
    return [(apply_edge_addition(poly, s), s) for s in addition_sites(poly)]


# ---------------------------------------------------------------------------
# Composition / decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompositionSite:
    """Glue face ``face_p`` of P to face ``face_q`` of Q.

    Boundary vertex ``i`` of P's face meets boundary vertex ``(offset - i) % k``
    of Q's face (or of the mirrored Q when ``flip`` is set).
    """

    face_p: int
    face_q: int
    offset: int
    flip: bool = False

    def descriptor(self) -> str:
        return f"{self.face_p}:{self.face_q}:{self.offset}:{int(self.flip)}"


def _face_in_mirror(q: Polyhedron, qm: Polyhedron, f: int) -> int:
    verts = set(q.face_vertices[f])
    for g, vs in enumerate(qm.face_vertices):
        if len(vs) == len(verts) and set(vs) == verts:
            return g
    raise SurgeryError("mirror face lookup failed")


def compose(p: Polyhedron, q: Polyhedron, site: CompositionSite) -> Polyhedron:
    k = p.face_sizes[site.face_p]
    if q.face_sizes[site.face_q] != k:
        raise SurgeryError(
            f"face sizes differ: {k} vs {q.face_sizes[site.face_q]}"
        )
    fq = site.face_q
    if site.flip:
        qm = q.mirror()
        fq = _face_in_mirror(q, qm, fq)
        q = qm
    pv = p.face_vertices[site.face_p]
    qv = q.face_vertices[fq]
    pset, qset = set(pv), set(qv)

    def outer(poly: Polyhedron, ring: tuple[int, ...], ringset: set[int]) -> list[int]:
        out = []
        for v in ring:
            (a,) = [w for w in poly.rot[v] if w not in ringset]
            out.append(a)
        return out

    a = outer(p, pv, pset)
    b = outer(q, qv, qset)
    keep_p = [v for v in range(p.num_vertices) if v not in pset]
    keep_q = [v for v in range(q.num_vertices) if v not in qset]
    id_p = {v: i for i, v in enumerate(keep_p)}
    id_q = {v: len(keep_p) + i for i, v in enumerate(keep_q)}
    # ring vertex -> vertex across the glued face
    across_p = {pv[i]: id_q[b[(site.offset - i) % k]] for i in range(k)}
    across_q = {qv[(site.offset - i) % k]: id_p[a[i]] for i in range(k)}
    rot = []
    for v in keep_p:
        rot.append(tuple(across_p[w] if w in pset else id_p[w] for w in p.rot[v]))
    for v in keep_q:
        rot.append(tuple(across_q[w] if w in qset else id_q[w] for w in q.rot[v]))
    try:
        out = Polyhedron(tuple(rot))
    except PolyhedronError as exc:
        raise SurgeryError(f"composition is not simple: {exc}") from None
    return _check_counts(out)


def composition_sites(p: Polyhedron, q: Polyhedron) -> list[CompositionSite]:
    """All 2k identifications for every pair of equal-size faces."""
    out = []
    for fp, kp in enumerate(p.face_sizes):
        for fq, kq in enumerate(q.face_sizes):
            if kp != kq:
                continue
            for flip in (False, True):
                for s in range(kp):
                    out.append(CompositionSite(fp, fq, s, flip))
    return out


@dataclass
class CompositionReport:
    raw: int
    results: list[tuple[Polyhedron, CompositionSite]] = field(default_factory=list)

    @property
    def deduplicated(self) -> int:
        return len(self.results)


def all_compositions(
    p: Polyhedron, q: Polyhedron, face_size: int | None = None
) -> CompositionReport:
    """Every composition of P and Q, deduplicated by canonical code.

    ``results`` keeps the first site (in site order) for each code.
    """
    from .canon import canonical_code

    seen: dict[bytes, tuple[Polyhedron, CompositionSite]] = {}
    raw = 0
    for site in composition_sites(p, q):
        if face_size is not None and p.face_sizes[site.face_p] != face_size:
            continue
        raw += 1
        c = compose(p, q, site)
        seen.setdefault(canonical_code(c), (c, site))
    return CompositionReport(raw, list(seen.values()))


def is_face_parallel(poly: Polyhedron, circuit: PrismaticCircuit) -> bool:
    """True if the circuit just encircles one face (one side is a single face)."""
    ends = [set(poly.edges[e]) for e in circuit.edges]
    for f, verts in enumerate(poly.face_vertices):
        if len(verts) != circuit.k:
            continue
        vs = set(verts)
        if all(len(vs & e) == 1 for e in ends):
            return True
    return False


def nontrivial_circuits(poly: Polyhedron, k: int = 5) -> list[PrismaticCircuit]:
    return [c for c in prismatic_circuits(poly, k) if not is_face_parallel(poly, c)]


def decompose(poly: Polyhedron, circuit: PrismaticCircuit) -> tuple[Polyhedron, Polyhedron]:
    """Cut along a prismatic circuit and cap both sides with a new k-gon.

    Returns (left side, right side) relative to the circuit's face order.
    """
    k = circuit.k
    if k < 5:
        raise SurgeryError(f"decomposition needs k >= 5, got {k}")
    if not circuit.verify(poly):
        raise SurgeryError("not a prismatic circuit of this polyhedron")
    n = poly.num_vertices
    fod = poly.face_of_dart
    left, right = [], []
    for f, e in zip(circuit.faces, circuit.edges):
        u, w = poly.edges[e]
        d = poly.dart(u, w)
        if fod[d] != f:
            u, w = w, u
        left.append(u)
        right.append(w)
    rot = [list(r) for r in poly.rot]
    pnew = [n + i for i in range(k)]
    qnew = [n + k + i for i in range(k)]
    for i in range(k):
        u, w = left[i], right[i]
        rot[u][rot[u].index(w)] = pnew[i]
        rot[w][rot[w].index(u)] = qnew[i]
    for i in range(k):
        rot.append([left[i], pnew[i - 1], pnew[(i + 1) % k]])
    for i in range(k):
        rot.append([right[i], qnew[(i + 1) % k], qnew[i - 1]])
    sides = []
    for start in (left[0], right[0]):
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in rot[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        order = sorted(seen)
        new_id = {v: i for i, v in enumerate(order)}
        sides.append(_check_counts(Polyhedron(tuple(tuple(new_id[w] for w in rot[v]) for v in order))))
    if sides[0].num_vertices + sides[1].num_vertices != n + 2 * k:
        raise SurgeryError("circuit does not separate the polyhedron")
    return sides[0], sides[1]


# ---------------------------------------------------------------------------
# Reduction chains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReductionStep:
    """One move applied to ``components[index]`` of the state before it."""

    components: tuple[Polyhedron, ...]
    index: int
    move: str  # "delete" or "decompose"
    edge: int | None = None
    circuit: PrismaticCircuit | None = None

    def describe(self) -> str:
        target = self.components[self.index]
        if self.move == "delete":
            return f"delete edge {target.edges[self.edge]} of component {self.index}"
        return f"decompose component {self.index} along {self.circuit.k}-circuit {self.circuit.faces}"


@dataclass
class ReductionChain:
    steps: list[ReductionStep]
    final: tuple[Polyhedron, ...]
    terminal: tuple[int, ...]  # Löbell indices of final components, sorted

    def states(self) -> list[tuple[Polyhedron, ...]]:
        return [s.components for s in self.steps] + [self.final]


def reduce_to_lobell(poly: Polyhedron, max_steps: int = 1000) -> ReductionChain:
    """Greedy reduction: delete the first very good edge, else decompose
    along the first non-face-parallel prismatic 5-circuit."""
    state: tuple[Polyhedron, ...] = (poly,)
    steps: list[ReductionStep] = []
    for _ in range(max_steps):
        idx = next((i for i, c in enumerate(state) if lobell_index(c) is None), None)
        if idx is None:
            terminal = tuple(sorted(lobell_index(c) for c in state))  # type: ignore[type-var]
            return ReductionChain(steps, state, terminal)
        comp = state[idx]
        vg = very_good_edges(comp)
        if vg:
            e = vg[0]
            steps.append(ReductionStep(state, idx, "delete", edge=e))
            state = state[:idx] + (edge_delete(comp, e),) + state[idx + 1 :]
            continue
        circuits = nontrivial_circuits(comp, 5)
        if not circuits:
            raise SurgeryError(
                f"reduction stuck: {comp!r} has no very good edge and no prismatic 5-circuit"
            )
        c = circuits[0]
        steps.append(ReductionStep(state, idx, "decompose", circuit=c))
        a, b = decompose(comp, c)
        state = state[:idx] + (a, b) + state[idx + 1 :]
    raise SurgeryError(f"reduction exceeded {max_steps} steps")


def double_lobell(n: int = 5) -> Polyhedron:
    """L_n glued to itself along a pentagon (L5 ∪ L5 for n = 5)."""
    base = lobell(n)
    f = next(i for i, s in enumerate(base.face_sizes) if s == 5)
    return compose(base, base, CompositionSite(f, f, 0, False))

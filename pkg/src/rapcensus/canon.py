"""Canonical codes for 3-connected trivalent spherical maps.

A 3-connected planar graph has a unique embedding up to reflection, so
minimising a breadth-first map code over all starting darts and both
orientations gives a complete isomorphism invariant.  Starting darts are
pre-filtered by a local signature (sizes of the faces around the dart),
which is itself isomorphism invariant.
"""

from __future__ import annotations

from typing import Iterable

from .core import Polyhedron

__all__ = ["canonical_code", "code_hex", "isomorphic", "isomorphic_bruteforce", "shuffle_labels"]


def _bfs_code(twin: tuple[int, ...], n: int, start: int, step: int, best: list[int] | None) -> list[int] | None:
    """Map code from ``start``; ``step`` is +1 (ccw) or +2 (cw) within a vertex.

    Returns None as soon as the code exceeds ``best``.
    """
    number = [-1] * n
    ref = [0] * n
    v0 = start // 3
    number[v0] = 0
    ref[v0] = start
    order = [v0]
    code: list[int] = []
    nxt = 1
    pos = 0
    tight = best is not None
    qi = 0
    while qi < len(order):
        v = order[qi]
        qi += 1
        d = ref[v]
        base = d - d % 3
        r = d % 3
        for _ in range(3):
            dd = base + r
            t = twin[dd]
            w = t // 3
            if number[w] < 0:
                number[w] = nxt
                ref[w] = t
                nxt += 1
                order.append(w)
            c = number[w]
            if tight:
                b = best[pos]  # type: ignore[index]
                if c > b:
                    return None
                if c < b:
                    tight = False
            code.append(c)
            pos += 1
            r = (r + step) % 3
    return code


def _signature(poly: Polyhedron, d: int, mirrored: bool) -> tuple[int, int, int]:
    """(right face, left face, third face at tail) sizes as seen in the traversal orientation."""
    fod = poly.face_of_dart
    sizes = poly.face_sizes
    right = sizes[fod[d]]
    left = sizes[fod[Polyhedron.next(d)]]
    third = sizes[fod[Polyhedron.prev(d)]]
    if mirrored:
        right, left = left, right
    return (right, left, third)


def canonical_code(poly: Polyhedron) -> bytes:
    """Byte string equal for two polyhedra iff they are isomorphic graphs."""
    cached = poly._cache.get("canon")
    if cached is not None:
        return cached
    n = poly.num_vertices
    twin = poly.twin
    cands = []
    for d in range(poly.num_darts):
        for mirrored in (False, True):
            cands.append((_signature(poly, d, mirrored), d, mirrored))
    top = max(c[0] for c in cands)
    best: list[int] | None = None
    for sig, d, mirrored in cands:
        if sig != top:
            continue
        code = _bfs_code(twin, n, d, 2 if mirrored else 1, best)
        if code is not None and (best is None or code < best):
            best = code
    assert best is not None
    width = 1 if n < 256 else 2
    out = n.to_bytes(2, "big") + bytes(top) + b"".join(c.to_bytes(width, "big") for c in best)
    poly._cache["canon"] = out
    return out


def code_hex(poly: Polyhedron) -> str:
    return canonical_code(poly).hex()


def isomorphic(p: Polyhedron, q: Polyhedron) -> bool:
    if p.num_vertices != q.num_vertices:
        return False
    return canonical_code(p) == canonical_code(q)


def isomorphic_bruteforce(p: Polyhedron, q: Polyhedron) -> bool:
    """Graph isomorphism by backtracking over vertex bijections.

    Ignores the embedding entirely; exponential in the worst case but fine
    for the small cubic graphs used as a cross-check.
    """
    n = p.num_vertices
    if n != q.num_vertices:
        return False
    pa = [set(r) for r in p.rot]
    qa = [set(r) for r in q.rot]
    # order p's vertices by BFS so every vertex after the first has a mapped neighbour
    order = [0]
    seen = {0}
    for v in order:
        for w in p.rot[v]:
            if w not in seen:
                seen.add(w)
                order.append(w)
    if len(order) != n:
        return False
    phi = [-1] * n
    used = [False] * n

    def ok(v: int, x: int) -> bool:
        for w in pa[v]:
            y = phi[w]
            if y >= 0 and y not in qa[x]:
                return False
        return True

    def solve(i: int) -> bool:
        if i == n:
            return True
        v = order[i]
        if i == 0:
            choices: Iterable[int] = range(n)
        else:
            anchor = next(w for w in p.rot[v] if phi[w] >= 0)
            choices = q.rot[phi[anchor]]
        for x in choices:
            if used[x] or not ok(v, x):
                continue
            phi[v] = x
            used[x] = True
            if solve(i + 1):
                return True
            phi[v] = -1
            used[x] = False
        return False

    return solve(0)


def shuffle_labels(poly: Polyhedron, rng) -> Polyhedron:
    """Random vertex renaming plus random rotation starting points."""
    n = poly.num_vertices
    perm = list(range(n))
    rng.shuffle(perm)
    shifts = [rng.randrange(3) for _ in range(n)]
    return poly.relabel(perm, shifts)

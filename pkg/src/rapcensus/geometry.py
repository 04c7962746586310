"""Right-angled realizations in the hyperboloid model and their volumes.

Conventions: Minkowski form ``<x, y> = x0*y0 + x1*y1 + x2*y2 - x3*y3``
(time coordinate last).  Each face plane is a unit spacelike normal ``n``
with the polyhedron on the side ``<x, n> <= 0``; vertices lie on the upper
sheet ``<v, v> = -1, v3 > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.special

from .core import Polyhedron

__all__ = [
    "GeometryError",
    "ConvergenceError",
    "ContainmentError",
    "Realization",
    "VolumeResult",
    "minkowski",
    "clausen2",
    "lobachevsky",
    "tetrahedron_volume",
    "tetrahedron_gram",
    "orthoscheme_volume",
    "simplex_volume",
    "realize",
    "realize_child",
    "vertices_of",
    "edge_length",
    "volume",
    "residuals",
    "jacobian",
    "dump_realization",
]

METRIC = np.array([1.0, 1.0, 1.0, -1.0])


class GeometryError(RuntimeError):
    pass


class ConvergenceError(GeometryError):
    def __init__(self, message: str, best_residual: float):
        super().__init__(f"{message} (best residual {best_residual:.3e})")
        self.best_residual = best_residual


class ContainmentError(GeometryError):
    pass


def minkowski(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.sum(x * METRIC * y, axis=-1)


# ---------------------------------------------------------------------------
# Lobachevsky function
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def _clausen_coefficients(terms: int = 30) -> np.ndarray:
    k = np.arange(1, terms + 1)
    b = np.abs(scipy.special.bernoulli(2 * terms)[2::2])
    return b / (2 * k * scipy.special.factorial(2 * k + 1))


def clausen2(x) -> np.ndarray:
    """Clausen function Cl2(x) = -int_0^x log|2 sin(t/2)| dt."""
    x = np.asarray(x, dtype=float)
    y = np.remainder(x + np.pi, 2 * np.pi) - np.pi
    ay = np.abs(y)
    with np.errstate(divide="ignore", invalid="ignore"):
        head = np.where(ay > 0, y - y * np.log(ay), 0.0)
    c = _clausen_coefficients()
    y2 = y * y
    series = np.zeros_like(y)
    for coef in c[::-1]:
        series = series * y2 + coef
    return head + series * y2 * y


def lobachevsky(theta) -> np.ndarray | float:
    """Lobachevsky function -int_0^theta log|2 sin t| dt (odd, pi-periodic)."""
    out = 0.5 * clausen2(2.0 * np.asarray(theta, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# Tetrahedra
# ---------------------------------------------------------------------------


def tetrahedron_gram(angles) -> np.ndarray:
    """Gram matrix of the face normals.

    Angle order: edges 12, 13, 14, 34, 24, 23 of vertices 1..4; face ``i``
    is opposite vertex ``i``.
    """
    A, B, C, D, E, F = np.cos(np.asarray(angles, dtype=float))
    return np.array(
        [
            [1.0, -D, -E, -F],
            [-D, 1.0, -C, -B],
            [-E, -C, 1.0, -A],
            [-F, -B, -A, 1.0],
        ]
    )


def _check_compact(angles) -> None:
    g = tetrahedron_gram(angles)
    if not np.linalg.det(g) < 0:
        raise GeometryError("Gram matrix does not have hyperbolic signature")
    for i in range(4):
        keep = [j for j in range(4) if j != i]
        if np.linalg.eigvalsh(g[np.ix_(keep, keep)]).min() <= 0:
            raise GeometryError(f"vertex {i + 1} is not finite (vertex link not spherical)")


def _li2(z: np.ndarray) -> np.ndarray:
    return scipy.special.spence(1.0 - z)


def _tetra_volume_batch(angles: np.ndarray) -> np.ndarray:
    """Murakami-Yano formula, vectorised over rows of six angles."""
    a, b, c, d, e, f = np.exp(1j * np.asarray(angles, dtype=float)).T
    abcdef = a * b * c * d * e * f
    q2 = -abcdef * (abcdef + a * b * f + a * c * e + a * d + b * c * d + b * e + c * f + d * e * f)
    q1 = (
        a * a * b * c * d * d * e * f
        - a * a * b * c * e * f
        + a * b * b * c * d * e * e * f
        - a * b * b * c * d * f
        + a * b * c * c * d * e * f * f
        - a * b * c * c * d * e
        - a * b * d * e * f * f
        + a * b * d * e
        - a * c * d * e * e * f
        + a * c * d * f
        - b * c * d * d * e * f
        + b * c * e * f
    )
    q0 = -(1 + a * b * c + a * b * d * e + a * c * d * f + a * e * f + b * c * e * f + b * d * f + c * d * e)
    disc = np.sqrt(q1 * q1 - 4 * q0 * q2)
    zp = (-q1 + disc) / (2 * q2)
    zm = (-q1 - disc) / (2 * q2)

    def u(z):
        return 0.5 * (
            _li2(z)
            + _li2(a * b * d * e * z)
            + _li2(a * c * d * f * z)
            + _li2(b * c * e * f * z)
            - _li2(-a * b * c * z)
            - _li2(-a * e * f * z)
            - _li2(-b * d * f * z)
            - _li2(-c * d * e * z)
        )

    return 0.5 * (u(zp) - u(zm)).imag


def tetrahedron_volume(angles, check: bool = True) -> float:
    """Volume of a compact hyperbolic tetrahedron from its dihedral angles.

    Angles are ordered as edges 12, 13, 14, 34, 24, 23 (opposite pairs
    are positions (0,3), (1,4), (2,5)).
    """
    if check:
        _check_compact(angles)
    return float(_tetra_volume_batch(np.asarray(angles, dtype=float)[None, :])[0])


def orthoscheme_volume(a1: float, a2: float, a3: float) -> float:
    """Compact orthoscheme with essential angles a1, a2, a3 (others pi/2).

    Gram matrix is tridiagonal with off-diagonals -cos(a1), -cos(a2), -cos(a3).
    """
    s = math.cos(a2) ** 2 - math.sin(a1) ** 2 * math.sin(a3) ** 2
    if s <= 0:
        raise GeometryError("orthoscheme angles are not hyperbolic")
    delta = math.atan(math.sqrt(s) / (math.cos(a1) * math.cos(a3)))
    L = lobachevsky
    return 0.25 * (
        L(a1 + delta)
        - L(a1 - delta)
        + L(a3 + delta)
        - L(a3 - delta)
        - L(math.pi / 2 - a2 + delta)
        + L(math.pi / 2 - a2 - delta)
        + 2 * L(math.pi / 2 - delta)
    )


def _simplex_angles(pts: np.ndarray) -> np.ndarray:
    """Dihedral angles (edge order 12,13,14,34,24,23) of tetrahedra given by
    hyperboloid vertices, shape (..., 4, 4)."""
    m = pts * METRIC
    inv = np.linalg.inv(m)
    u = np.swapaxes(inv, -1, -2)  # u[j] satisfies <p_i, u_j> = delta_ij
    u = -u / np.sqrt(minkowski(u, u))[..., None]
    g = np.einsum("...ik,k,...jk->...ij", u, METRIC, u)
    ang = np.arccos(np.clip(-g, -1.0, 1.0))
    # edge (i, j) is the meet of the two faces opposite the other vertices
    return np.stack(
        [ang[..., 2, 3], ang[..., 1, 3], ang[..., 1, 2], ang[..., 0, 1], ang[..., 0, 2], ang[..., 0, 3]],
        axis=-1,
    )


def simplex_volume(pts: np.ndarray) -> np.ndarray:
    """Volumes of tetrahedra given by four hyperboloid points each."""
    pts = np.asarray(pts, dtype=float)
    single = pts.ndim == 2
    if single:
        pts = pts[None]
    vol = _tetra_volume_batch(_simplex_angles(pts))
    return vol[0] if single else vol


# ---------------------------------------------------------------------------
# Realization
# ---------------------------------------------------------------------------


def residuals(poly: Polyhedron, normals: np.ndarray) -> np.ndarray:
    """Normalisation residuals (one per face) then orthogonality (one per edge)."""
    ef = np.asarray(poly.edge_faces)
    n = normals.reshape(-1, 4)
    return np.concatenate([minkowski(n, n) - 1.0, minkowski(n[ef[:, 0]], n[ef[:, 1]])])


def jacobian(poly: Polyhedron, normals: np.ndarray) -> np.ndarray:
    n = normals.reshape(-1, 4)
    nf = len(n)
    ef = np.asarray(poly.edge_faces)
    jac = np.zeros((nf + len(ef), 4 * nf))
    jn = n * METRIC
    for f in range(nf):
        jac[f, 4 * f : 4 * f + 4] = 2 * jn[f]
    for r, (f, g) in enumerate(ef, start=nf):
        jac[r, 4 * f : 4 * f + 4] = jn[g]
        jac[r, 4 * g : 4 * g + 4] = jn[f]
    return jac


def _vertex_points(poly: Polyhedron, normals: np.ndarray) -> np.ndarray:
    vf = np.asarray(poly.vertex_faces)
    mats = normals[vf] * METRIC  # rows J n_f, so mats @ v = <n_f, v>
    # null vector of each 3x4 system by signed 3x3 minors
    cols = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]]
    v = np.stack([(-1) ** i * np.linalg.det(mats[:, :, c]) for i, c in enumerate(cols)], axis=-1)
    q = minkowski(v, v)
    with np.errstate(invalid="ignore"):
        v = v / np.sqrt(np.abs(q))[:, None]
    v *= np.sign(v[:, 3])[:, None]
    return v


def _boost_to(point: np.ndarray) -> np.ndarray:
    """Lorentz matrix taking the timelike unit ``point`` to (0, 0, 0, 1)."""
    x = point[:3]
    t = point[3]
    lam = np.eye(4)
    lam[:3, :3] += np.outer(x, x) / (1.0 + t)
    lam[:3, 3] = -x
    lam[3, :3] = -x
    lam[3, 3] = t
    return lam


@dataclass
class Realization:
    poly: Polyhedron
    normals: np.ndarray
    vertices: np.ndarray
    residual: float
    margin: float
    iterations: int = 0
    restarts: int = 0
    history: list[float] = field(default_factory=list, repr=False)


def _dual_tutte_sphere(poly: Polyhedron) -> np.ndarray:
    """Face directions on S^2 from a Tutte embedding of the dual triangulation."""
    nf = poly.num_faces
    outer = list(poly.vertex_faces[0])
    adj = poly.dual_adjacency
    lap = np.zeros((nf, nf))
    rhs = np.zeros((nf, 2))
    pinned = {f: (math.cos(2 * math.pi * i / 3), math.sin(2 * math.pi * i / 3)) for i, f in enumerate(outer)}
    for f in range(nf):
        if f in pinned:
            lap[f, f] = 1.0
            rhs[f] = pinned[f]
            continue
        lap[f, f] = len(adj[f])
        for g in adj[f]:
            lap[f, g] -= 1.0
    xy = np.linalg.solve(lap, rhs)
    xy -= xy.mean(axis=0)
    xy /= np.abs(xy).max() * 0.6
    r2 = (xy**2).sum(axis=1)
    pts = np.column_stack([2 * xy / (1 + r2)[:, None], (r2 - 1) / (1 + r2)])
    return _centre_on_sphere(pts)


def _centre_on_sphere(pts: np.ndarray, sweeps: int = 50) -> np.ndarray:
    """Apply Möbius boosts until the point cloud's centroid is near 0."""
    for _ in range(sweeps):
        c = pts.mean(axis=0)
        nc = np.linalg.norm(c)
        if nc < 1e-6:
            break
        # light-like lift (p, 1), boost along -c with rapidity ~ |c|
        beta = min(0.5, nc)
        gamma = 1.0 / math.sqrt(1 - beta * beta)
        dirn = c / nc
        par = pts @ dirn
        t_new = gamma * (1.0 - beta * par)
        par_new = gamma * (par - beta)
        perp = pts - np.outer(par, dirn)
        pts = (perp + np.outer(par_new, dirn)) / t_new[:, None]
        pts /= np.linalg.norm(pts, axis=1)[:, None]
    return pts


def _relax_directions(poly: Polyhedron, dirs: np.ndarray, sweeps: int = 200) -> np.ndarray:
    """Spherical Laplacian smoothing: move each face direction halfway to
    the mean of its neighbours, re-centring as we go."""
    adj = [list(a) for a in poly.dual_adjacency]
    for _ in range(sweeps):
        new = np.array([dirs[a].mean(axis=0) for a in adj])
        new /= np.linalg.norm(new, axis=1)[:, None]
        dirs = 0.5 * dirs + 0.5 * new
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        dirs = _centre_on_sphere(dirs)
    return dirs


def _initial_normals(poly: Polyhedron, dirs: np.ndarray) -> np.ndarray:
    ef = np.asarray(poly.edge_faces)
    cosphi = np.einsum("ij,ij->i", dirs[ef[:, 0]], dirs[ef[:, 1]])
    target = np.log(np.clip(cosphi, 0.05, 0.999))
    nf = poly.num_faces
    a = np.zeros((len(ef), nf))
    a[np.arange(len(ef)), ef[:, 0]] = 1.0
    a[np.arange(len(ef)), ef[:, 1]] = 1.0
    logt = np.linalg.lstsq(a, target, rcond=None)[0]
    t = np.clip(np.exp(logt), 0.05, 0.995)
    r = np.arctanh(t)
    return np.column_stack([np.cosh(r)[:, None] * dirs, np.sinh(r)])


def _newton(poly: Polyhedron, x0: np.ndarray, tol: float, max_iter: int) -> tuple[np.ndarray, float, int, list[float]]:
    """Damped Gauss-Newton with minimum-norm steps.

    The solution set is the 6-dimensional orbit of the Lorentz group; the
    minimum-norm step is the one orthogonal to that orbit's tangent space,
    which fixes the gauge to first order at every iterate.
    """
    x = x0.reshape(-1).copy()
    r = residuals(poly, x)
    norm = float(np.linalg.norm(r))
    history = [float(np.abs(r).max())]
    for it in range(1, max_iter + 1):
        jac = jacobian(poly, x)
        step = np.linalg.lstsq(jac, -r, rcond=None)[0]
        lam = 1.0
        while lam > 1e-4:
            xn = x + lam * step
            rn = residuals(poly, xn)
            nn = float(np.linalg.norm(rn))
            if nn < norm * (1 - 1e-4 * lam) or nn < 1e-14:
                break
            lam *= 0.5
        else:
            return x, history[-1], it, history
        x, r, norm = xn, rn, nn
        history.append(float(np.abs(r).max()))
        if history[-1] <= tol:
            # one more full step drives the residual to round-off
            jac = jacobian(poly, x)
            xn = x + np.linalg.lstsq(jac, -r, rcond=None)[0]
            rn = residuals(poly, xn)
            if np.abs(rn).max() < history[-1]:
                x, r = xn, rn
                history.append(float(np.abs(r).max()))
            return x, history[-1], it, history
    return x, history[-1], max_iter, history


def _containment(poly: Polyhedron, normals: np.ndarray, verts: np.ndarray) -> float:
    """Smallest value of -<v, n_g> over vertices v not on face g."""
    vals = verts @ (normals * METRIC).T  # <v, n_g>
    mask = np.ones_like(vals, dtype=bool)
    vf = np.asarray(poly.vertex_faces)
    mask[np.arange(len(vf))[:, None], vf] = False
    return float((-vals[mask]).min())


def _normalise_gauge(normals: np.ndarray, verts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c = verts.sum(axis=0)
    c = c / math.sqrt(-minkowski(c, c))
    lam = _boost_to(c)
    return normals @ lam.T, verts @ lam.T


def _least_squares(poly: Polyhedron, x0: np.ndarray, max_nfev: int = 300) -> np.ndarray:
    sol = scipy.optimize.least_squares(
        lambda x: residuals(poly, x),
        x0.reshape(-1),
        jac=lambda x: jacobian(poly, x),
        method="trf",
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=max_nfev,
    )
    return sol.x


def _finish(poly: Polyhedron, x: np.ndarray, tol: float) -> tuple[Realization | None, float, float | None]:
    """Polish, orient and check a candidate.

    Returns (realization or None, residual, containment margin if solved).
    """
    x, res, its, hist = _newton(poly, x, tol * 1e-2, 30)
    if res > tol:
        return None, res, None
    normals = x.reshape(-1, 4)
    verts = _vertex_points(poly, normals)
    if not np.all(np.isfinite(verts)):
        return None, res, None
    # the equations do not see the sign of each normal; orient every face
    # so that most vertices lie on its inner side
    vals = verts @ (normals * METRIC).T
    normals = normals * np.where(np.median(vals, axis=0) > 0, -1.0, 1.0)[:, None]
    margin = _containment(poly, normals, verts)
    if margin <= 0:
        return None, res, margin
    normals, verts = _normalise_gauge(normals, verts)
    res = float(np.abs(residuals(poly, normals)).max())
    return Realization(poly, normals, verts, res, margin, its, 0, hist), res, margin


def realize(
    poly: Polyhedron,
    tol: float = 1e-10,
    restarts: int = 16,
    seed: int = 0,
) -> Realization:
    """Solve for the right-angled realization of a Pogorelov-valid polyhedron.

    The starting point comes from a smoothed dual Tutte embedding on the
    sphere; a trust-region least-squares solve is followed by minimum-norm
    Newton polishing.  Restarts perturb the face directions.

    Raises ConvergenceError when no attempt reaches ``tol`` and
    ContainmentError when a converged solution is not a convex polyhedron
    with this combinatorics.
    """
    rng = np.random.default_rng(seed)
    base = _relax_directions(poly, _dual_tutte_sphere(poly))
    best = math.inf
    bad_branch = None
    for attempt in range(restarts + 1):
        dirs = base
        if attempt:
            dirs = base + rng.normal(scale=0.1 * min(2.0, 1 + attempt / 8), size=base.shape)
            dirs /= np.linalg.norm(dirs, axis=1)[:, None]
            dirs = _relax_directions(poly, _centre_on_sphere(dirs), sweeps=20)
        x = _least_squares(poly, _initial_normals(poly, dirs))
        real, res, margin = _finish(poly, x, tol)
        best = min(best, res)
        if real is not None:
            real.restarts = attempt
            return real
        if margin is not None:
            bad_branch = margin
    if bad_branch is not None:
        raise ContainmentError(f"converged only to non-polyhedral solutions (margin {bad_branch:.3e})")
    raise ConvergenceError(f"no geometric solution after {restarts + 1} attempts", best)


def _child_face_map(parent: Polyhedron, child: Polyhedron) -> list[int]:
    """Parent face containing each child face (old vertices keep their ids)."""
    n = parent.num_vertices
    pvf = [set(fs) for fs in parent.vertex_faces]
    out = []
    for cyc in child.face_vertices:
        common: set[int] | None = None
        for v in cyc:
            if v < n:
                common = set(pvf[v]) if common is None else common & pvf[v]
        if not common or len(common) != 1:
            raise GeometryError("child is not an edge addition of the parent")
        out.append(common.pop())
    return out


def realize_child(
    child: Polyhedron,
    parent: Realization,
    tol: float = 1e-10,
    start_angle: float = math.pi - 0.2,
    min_step: float = 1e-4,
) -> Realization:
    """Realization of an edge-addition child by continuation from its parent.

    The child's vertices ``0..V-1`` must be the parent's, with ``V`` and
    ``V+1`` the endpoints of the new edge.  The split face is folded along
    the new edge, whose dihedral angle is then driven from ``start_angle``
    down to pi/2 while every other angle stays right.
    """
    poly = parent.poly
    n = poly.num_vertices
    if child.num_vertices != n + 2:
        raise GeometryError("child must have exactly two more vertices than the parent")
    fmap = _child_face_map(poly, child)
    x_id, y_id = n, n + 1
    halves = [c for c in child.vertex_faces[x_id] if c in child.vertex_faces[y_id]]
    if len(halves) != 2 or fmap[halves[0]] != fmap[halves[1]]:
        raise GeometryError("new edge does not split a parent face")
    f = fmap[halves[0]]
    nf_vec = parent.normals[f]
    pv = parent.vertices
    ends = [[w for w in child.rot[v] if w < n] for v in (x_id, y_id)]
    pts = [_normalise_timelike(pv[a] + pv[b]) for a, b in ends]
    sys = np.stack([pts[0], pts[1], nf_vec]) * METRIC
    m = scipy.linalg.null_space(sys)[:, 0]
    m = m / math.sqrt(minkowski(m, m))
    new_edge = child.edge_index[(x_id, y_id)]
    row = child.num_faces + new_edge

    def init(theta: float) -> np.ndarray:
        beta = 0.5 * (math.pi - theta)
        normals = parent.normals[fmap].copy()
        for h, other in ((halves[0], halves[1]), (halves[1], halves[0])):
            probe = next(v for v in child.face_vertices[other] if v < n and v not in child.face_vertices[h])
            s = -1.0 if minkowski(pv[probe], m) > 0 else 1.0
            normals[h] = math.cos(beta) * nf_vec + s * math.sin(beta) * m
        return normals.reshape(-1)

    def correct(x: np.ndarray, theta: float, iters: int = 12) -> np.ndarray | None:
        target = -math.cos(theta)
        for _ in range(iters):
            r = residuals(child, x)
            r[row] -= target
            if np.abs(r).max() < 1e-11:
                return x
            x = x + np.linalg.lstsq(jacobian(child, x), -r, rcond=None)[0]
            if not np.all(np.isfinite(x)):
                return None
        r = residuals(child, x)
        r[row] -= target
        return x if np.abs(r).max() < 1e-9 else None

    theta = start_angle
    x = correct(init(theta), theta, iters=30)
    if x is None:
        raise ConvergenceError("continuation could not start", math.inf)
    prev = None
    h = (theta - math.pi / 2) / 4
    while theta > math.pi / 2:
        t1 = max(math.pi / 2, theta - h)
        guess = x if prev is None else x + (x - prev[0]) * (theta - t1) / (prev[1] - theta)
        y = correct(guess, t1)
        if y is None:
            h *= 0.5
            if h < min_step:
                raise ConvergenceError(f"continuation stalled at angle {theta:.6f}", math.inf)
            continue
        prev = (x, theta)
        x, theta = y, t1
        h = min(h * 1.5, theta - math.pi / 2 + 1e-12) if theta > math.pi / 2 else h
    real, res, margin = _finish(child, x, tol)
    if real is None:
        if margin is not None:
            raise ContainmentError(f"continuation reached a non-polyhedral solution (margin {margin:.3e})")
        raise ConvergenceError("continuation did not polish to tolerance", res)
    return real


def vertices_of(real: Realization | Polyhedron, normals: np.ndarray | None = None) -> np.ndarray:
    """Vertex coordinates from face normals (three incident planes each)."""
    if isinstance(real, Realization):
        poly, normals = real.poly, real.normals
    else:
        poly = real
    assert normals is not None
    verts = _vertex_points(poly, np.asarray(normals, dtype=float))
    if not np.all(np.isfinite(verts)):
        raise GeometryError("singular incidence system at some vertex")
    return verts


def edge_length(real: Realization, e: int | tuple[int, int]) -> float:
    poly = real.poly
    if isinstance(e, tuple):
        e = poly.edge_index[(min(e), max(e))]
    u, w = poly.edges[e]
    c = -minkowski(real.vertices[u], real.vertices[w])
    return float(np.arccosh(max(c, 1.0)))


def dump_realization(real: Realization) -> str:
    """Text dump: face normals then vertices, columns x y z t, 17 significant digits."""
    lines = [f"# residual {real.residual:.17g} margin {real.margin:.17g}", "# faces: id x y z t"]
    for f, n in enumerate(real.normals):
        lines.append(f"F {f} " + " ".join(f"{c:.17g}" for c in n))
    lines.append("# vertices: id x y z t")
    for v, p in enumerate(real.vertices):
        lines.append(f"V {v} " + " ".join(f"{c:.17g}" for c in p))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Volume
# ---------------------------------------------------------------------------


@dataclass
class VolumeResult:
    volume: float
    method: str
    tetrahedra_count: int
    estimated_error: float
    realization: Realization | None = field(default=None, repr=False)


def _normalise_timelike(x: np.ndarray) -> np.ndarray:
    return x / np.sqrt(-minkowski(x, x))[..., None]


def _cone_tetrahedra(poly: Polyhedron, verts: np.ndarray, centre: np.ndarray) -> np.ndarray:
    fv = poly.face_vertices
    tets = []
    for cyc in fv:
        fp = _normalise_timelike(verts[list(cyc)].sum(axis=0))
        for i in range(len(cyc)):
            tets.append((centre, fp, verts[cyc[i]], verts[cyc[(i + 1) % len(cyc)]]))
    return np.asarray(tets)


def cone_volume(poly: Polyhedron, verts: np.ndarray, centre: np.ndarray) -> tuple[float, int]:
    tets = _cone_tetrahedra(poly, verts, centre)
    orient = np.linalg.det(tets)
    if np.any(orient <= 0) and np.any(orient >= 0):
        raise GeometryError("cone decomposition has inverted tetrahedra")
    return float(simplex_volume(tets).sum()), len(tets)


def volume(poly: Polyhedron, real: Realization | None = None, **kwargs) -> VolumeResult:
    """Hyperbolic volume via a cone decomposition from the vertex centroid.

    Every face is fanned from its own vertex centroid; the estimated error
    is the disagreement with a second cone point.
    """
    if real is None:
        real = realize(poly, **kwargs)
    verts = real.vertices
    centre = _normalise_timelike(verts.sum(axis=0))
    vol, count = cone_volume(poly, verts, centre)
    # second cone point: centroid of the face-centroids
    fcs = np.array([_normalise_timelike(verts[list(c)].sum(axis=0)) for c in poly.face_vertices])
    alt = _normalise_timelike(fcs.sum(axis=0))
    vol2, _ = cone_volume(poly, verts, alt)
    err = abs(vol - vol2) + real.residual
    return VolumeResult(vol, "cone-murakami-yano", count, err, real)

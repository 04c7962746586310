from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import load_fixture, small_family
from oracles import dihedral_angles, klein_volume, murakami_yano_polynomial, random_tetrahedron
from rapcensus.core import very_good_edges
from rapcensus.geometry import (
    GeometryError,
    clausen2,
    dump_realization,
    edge_length,
    jacobian,
    lobachevsky,
    minkowski,
    orthoscheme_volume,
    realize,
    realize_child,
    residuals,
    simplex_volume,
    tetrahedron_gram,
    tetrahedron_volume,
    vertices_of,
    volume,
)
from rapcensus.surgery import compose, composition_sites, double_lobell, edge_additions, edge_delete, lobell

FAMILY = small_family()

# reference ranks 1, 2, 4, 7, 11 (L5, L6, L7, L5 doubled, L8)
REFERENCE = [
    (lobell(5), 4.3062108),
    (lobell(6), 6.023046),
    (lobell(7), 7.5632491),
    (double_lobell(5), 8.6124152),
    (lobell(8), 9.0190528),
]


# -- Lobachevsky function ------------------------------------------------------


@settings(max_examples=200)
@given(st.floats(min_value=-10, max_value=10))
def test_lobachevsky_odd_and_periodic(x):
    assert abs(lobachevsky(-x) + lobachevsky(x)) <= 1e-10
    assert abs(lobachevsky(x + math.pi) - lobachevsky(x)) <= 1e-10


@settings(max_examples=200)
@given(st.floats(min_value=-3, max_value=3))
def test_lobachevsky_duplication(x):
    lhs = lobachevsky(2 * x)
    rhs = 2 * (lobachevsky(x) + lobachevsky(x + math.pi / 2))
    assert abs(lhs - rhs) <= 1e-10


def test_lobachevsky_known_values():
    assert abs(lobachevsky(0.0)) < 1e-15
    assert abs(lobachevsky(math.pi / 2)) < 1e-12
    # Cl2(pi/2) is Catalan's constant; the maximum of the Lobachevsky
    # function sits at pi/6 and equals Cl2(pi/3) / 2
    assert abs(clausen2(math.pi / 2) - 0.915965594177219015) < 1e-13
    assert abs(lobachevsky(math.pi / 6) - 0.5 * 1.0149416064096536250) < 1e-12


def test_lobachevsky_against_quadrature():
    from scipy.integrate import quad

    for theta in (0.1, 0.4, 0.9, 1.3):
        ref = -quad(lambda t: math.log(abs(2 * math.sin(t))), 0, theta, limit=200)[0]
        assert abs(lobachevsky(theta) - ref) < 1e-10


# -- tetrahedra -----------------------------------------------------------------


def test_murakami_yano_against_quadrature():
    rng = np.random.default_rng(11)
    for _ in range(30):
        pts = random_tetrahedron(rng)
        ang = dihedral_angles(pts)
        v = tetrahedron_volume(ang)
        assert v > 0
        assert abs(v - klein_volume(pts)) <= 1e-7 * max(1.0, v)
        assert abs(v - murakami_yano_polynomial(ang)) <= 1e-10


def test_simplex_volume_batch_matches_single():
    rng = np.random.default_rng(3)
    pts = np.stack([random_tetrahedron(rng) for _ in range(8)])
    batch = simplex_volume(pts)
    for p, v in zip(pts, batch):
        assert abs(simplex_volume(p) - v) < 1e-13
        assert abs(v - klein_volume(p)) <= 1e-7 * max(1.0, v)


@pytest.mark.parametrize("a1, a2, a3", [(math.pi / 5, math.pi / 3, math.pi / 4), (math.pi / 3, math.pi / 5, math.pi / 3), (0.7, 1.0, 0.7)])
def test_orthoscheme_matches_general_formula(a1, a2, a3):
    # tridiagonal Gram with off-diagonals cos a1, cos a2, cos a3; the face
    # pairs (1,2), (2,3), (3,4) meet along edges 34, 14, 12
    half = math.pi / 2
    angles = [a3, half, a2, a1, half, half]
    g = tetrahedron_gram(angles)
    off = [g[0, 1], g[1, 2], g[2, 3]]
    assert np.allclose(off, [-math.cos(a1), -math.cos(a2), -math.cos(a3)], atol=1e-15)
    assert abs(g[0, 2]) < 1e-15 and abs(g[0, 3]) < 1e-15 and abs(g[1, 3]) < 1e-15
    assert abs(orthoscheme_volume(a1, a2, a3) - tetrahedron_volume(angles)) < 1e-10


def test_noncompact_angles_rejected():
    with pytest.raises(GeometryError):
        tetrahedron_volume([math.pi / 3] * 6)  # spherical (regular Euclidean-like) simplex
    with pytest.raises(GeometryError):
        orthoscheme_volume(math.pi / 3, math.pi / 3, math.pi / 3)


# -- realizations -------------------------------------------------------------


@pytest.mark.parametrize("poly", FAMILY[:10], ids=repr)
def test_jacobian_matches_finite_differences(poly):
    rng = np.random.default_rng(poly.num_vertices)
    x = rng.normal(size=4 * poly.num_faces)
    jac = jacobian(poly, x)
    h = 1e-6
    fd = np.empty_like(jac)
    for i in range(len(x)):
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        fd[:, i] = (residuals(poly, xp) - residuals(poly, xm)) / (2 * h)
    rel = np.abs(fd - jac).max() / np.abs(jac).max()
    assert rel <= 1e-6


@pytest.mark.parametrize("poly", FAMILY, ids=repr)
def test_realization_residual_and_containment(poly):
    real = realize(poly)
    assert real.residual <= 1e-10
    assert real.margin > 0
    n = real.normals
    assert np.allclose(minkowski(n, n), 1.0, atol=1e-10)
    for f, g in poly.edge_faces:
        assert abs(minkowski(n[f], n[g])) <= 1e-10
    verts = vertices_of(real)
    assert np.allclose(minkowski(verts, verts), -1.0, atol=1e-9)
    assert np.all(verts[:, 3] > 0)
    # every vertex strictly inside every face plane it is not on
    vals = verts @ (n * np.array([1, 1, 1, -1.0])).T
    for v, fs in enumerate(poly.vertex_faces):
        for f in range(poly.num_faces):
            if f in fs:
                assert abs(vals[v, f]) < 1e-8
            else:
                assert vals[v, f] < 0


def test_gauge_centres_vertices():
    real = realize(lobell(6))
    c = real.vertices.sum(axis=0)
    assert np.allclose(c[:3], 0.0, atol=1e-9)


def test_dodecahedron_edge_lengths_equal():
    real = realize(lobell(5))
    lengths = [edge_length(real, e) for e in range(30)]
    assert max(lengths) - min(lengths) < 1e-9
    assert edge_length(real, real.poly.edges[0]) == pytest.approx(lengths[0])


def test_dump_realization_has_all_rows():
    real = realize(lobell(5))
    text = dump_realization(real)
    assert text.count("\nF ") == 12 and text.count("\nV ") == 20


@pytest.mark.parametrize("poly, ref", REFERENCE, ids=lambda x: repr(x) if not isinstance(x, float) else "")
def test_reference_volumes(poly, ref):
    res = volume(poly)
    assert abs(res.volume - ref) <= 1e-5
    assert res.estimated_error < 1e-8
    assert res.tetrahedra_count == 2 * poly.num_edges


def test_equal_volume_pair():
    v38 = volume(load_fixture("a38.rap")).volume
    v39 = volume(load_fixture("a39.rap")).volume
    assert abs(v38 - 10.67059) < 1e-4
    assert abs(v38 - v39) < 1e-9


def test_exceptional_volume():
    assert abs(volume(load_fixture("exceptional.rap")).volume - 15.07032) < 1e-4


@pytest.mark.parametrize("poly", FAMILY[1:8], ids=repr)
def test_continuation_agrees_with_direct_solve(poly):
    parent = realize(poly)
    for child, _ in edge_additions(poly)[:3]:
        cont = realize_child(child, parent)
        assert cont.residual <= 1e-10 and cont.margin > 0
        assert abs(volume(child, cont).volume - volume(child).volume) < 1e-9


def test_continuation_rejects_non_children():
    parent = realize(lobell(6))
    with pytest.raises(GeometryError):
        realize_child(lobell(7), parent)


@pytest.mark.parametrize("poly", FAMILY, ids=repr)
def test_very_good_deletion_strictly_decreases_volume(poly):
    vg = very_good_edges(poly)
    if not vg:
        pytest.skip("no very good edge")
    v = volume(poly).volume
    for e in vg[:3]:
        assert volume(edge_delete(poly, e)).volume < v


@pytest.mark.parametrize("q", [lobell(5), lobell(6), lobell(7), double_lobell(5)], ids=repr)
def test_composition_superadditive(q):
    p = lobell(5)
    vp, vq = volume(p).volume, volume(q).volume
    seen = 0
    for site in composition_sites(p, q)[::7][:4]:
        c = compose(p, q, site)
        assert volume(c).volume >= vp + vq - 1e-9
        seen += 1
    assert seen


def test_doubled_dodecahedron_is_exactly_twice():
    # all pentagons of L5 are congruent, so the gluing is isometric
    assert abs(volume(double_lobell(5)).volume - 2 * volume(lobell(5)).volume) < 1e-9

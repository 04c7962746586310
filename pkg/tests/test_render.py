from __future__ import annotations

import math

import numpy as np
import pytest

from conftest import GOLDEN, small_family
from rapcensus.canon import canonical_code
from rapcensus.render import (
    RenderError,
    RenderOptions,
    contact_sheet,
    crossings,
    default_outer_face,
    polyhedron_from_svg,
    to_svg,
    tutte_embedding,
)
from rapcensus.surgery import double_lobell, lobell

FAMILY = small_family()


@pytest.mark.parametrize("poly", FAMILY, ids=repr)
def test_tutte_embedding_is_barycentric_and_planar(poly):
    emb = tutte_embedding(poly)
    ring = set(poly.face_vertices[emb.outer_face])
    for v in range(poly.num_vertices):
        if v not in ring:
            mean = emb.coords[list(poly.rot[v])].mean(axis=0)
            assert np.allclose(emb.coords[v], mean, atol=1e-12)
    assert crossings(poly, emb) == []


def test_outer_face_is_regular_polygon():
    p = lobell(7)
    emb = tutte_embedding(p)
    assert p.face_sizes[emb.outer_face] == 7
    ring = emb.coords[list(p.face_vertices[emb.outer_face])]
    assert np.allclose(np.hypot(ring[:, 0], ring[:, 1]), 1.0, atol=1e-15)


def test_dodecahedron_drawing_has_fivefold_symmetry():
    p = lobell(5)
    emb = tutte_embedding(p, 0)
    c, s = math.cos(2 * math.pi / 5), math.sin(2 * math.pi / 5)
    rot = np.array([[c, -s], [s, c]])
    pts = emb.coords
    turned = pts @ rot.T
    # every rotated vertex lands on some vertex
    dist = np.linalg.norm(turned[:, None, :] - pts[None, :, :], axis=2)
    assert dist.min(axis=1).max() < 1e-9


def test_outer_face_choice_preserves_structure():
    p = double_lobell(5)
    codes = set()
    for f in range(p.num_faces):
        emb = tutte_embedding(p, f)
        assert crossings(p, emb) == []
        codes.add(canonical_code(polyhedron_from_svg(to_svg(p, emb))))
    assert codes == {canonical_code(p)}


def test_bad_outer_face():
    with pytest.raises(RenderError):
        tutte_embedding(lobell(5), 12)


def test_default_outer_face_is_largest():
    p = lobell(8)
    assert p.face_sizes[default_outer_face(p)] == 8


def test_svg_is_deterministic_and_roundtrips():
    p = lobell(6)
    a, b = to_svg(p, title="L6"), to_svg(p, title="L6")
    assert a == b
    assert a.startswith(b"<?xml")
    assert polyhedron_from_svg(a).rot == p.rot
    thin = to_svg(p, options=RenderOptions(size=200, stroke=0.5, dots=False))
    assert b"<circle" not in thin and b'width="200"' in thin


def test_svg_without_metadata():
    with pytest.raises(RenderError):
        polyhedron_from_svg(b"<svg></svg>")


@pytest.mark.parametrize("name, poly", [("l5.svg", lobell(5)), ("rank7.svg", double_lobell(5))])
def test_golden_svg(name, poly):
    data = to_svg(poly, title=name[:-4])
    assert data == (GOLDEN / name).read_bytes()


def test_contact_sheet():
    items = [(str(i + 1), p) for i, p in enumerate(FAMILY[:12])]
    data = contact_sheet(items, columns=5, panel=100)
    assert data == contact_sheet(items, columns=5, panel=100)
    assert b'width="500"' in data and b'height="342"' in data
    assert data.count(b"<text") == 12

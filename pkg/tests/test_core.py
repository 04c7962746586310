from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import load_fixture, small_family
from oracles import prismatic_bruteforce
from rapcensus.core import (
    FaceVector,
    ParseError,
    Polyhedron,
    PolyhedronError,
    _three_connected_bruteforce,
    check_lemma_witness,
    crossed_by_prismatic,
    edge_context,
    face_vector,
    is_three_connected,
    lemma_witness,
    parse_polyhedron,
    prismatic_circuits,
    serialize_polyhedron,
    validate_pogorelov,
    very_good_edges,
)
from rapcensus.surgery import double_lobell, edge_additions, lobell

FAMILY = small_family()


def prism(n: int) -> Polyhedron:
    """n-gonal prism: valid cubic graph with quadrilaterals (n >= 3)."""
    rot = []
    for i in range(n):
        rot.append(((i + 1) % n, (i - 1) % n, n + i))
    for i in range(n):
        rot.append((n + (i - 1) % n, n + (i + 1) % n, i))
    return Polyhedron(tuple(rot))


def test_lobell_counts():
    for n in range(5, 12):
        p = lobell(n)
        assert p.num_vertices == 4 * n
        assert p.num_faces == 2 * n + 2
        assert p.is_spherical
        fv = face_vector(p)
        assert fv[5] == 2 * n + (2 if n == 5 else 0)
        assert fv[n] == (2 if n != 5 else 12)


def test_dodecahedron_face_vector():
    assert face_vector(lobell(5)).to_text() == "5:12"
    assert face_vector(lobell(5)).counts == (12,)


def test_double_lobell_face_vector():
    # six untouched pentagons per copy; five side pentagons merge into hexagons
    p = double_lobell(5)
    fv = face_vector(p)
    assert fv.to_text() == "5:12,6:5"
    assert p.num_vertices == 2 * 20 - 10


def test_face_vector_text_roundtrip():
    fv = FaceVector.from_sizes([5] * 16 + [8] * 2)
    assert fv.to_text() == "5:16,8:2"
    assert FaceVector.from_text("5:16,8:2") == fv
    assert str(fv) == "[16, 0, 0, 2]"


def test_face_vector_rejects_small_faces():
    with pytest.raises(PolyhedronError):
        face_vector(prism(5))


@pytest.mark.parametrize("poly", FAMILY, ids=repr)
def test_euler_sum_is_twelve(poly):
    # sum (6 - k) f_k = 12 for every trivalent sphere
    assert face_vector(poly).euler_sum() == 12
    assert 2 * poly.num_edges == 3 * poly.num_vertices


def test_serialize_parse_roundtrip():
    p = lobell(7)
    text = serialize_polyhedron(p, comment="seven")
    assert text.startswith("# seven\nRAP1 28\n")
    q = parse_polyhedron(text)
    assert q.rot == p.rot


def test_fixture_l6_matches_constructor():
    assert load_fixture("l6.rap").rot == lobell(6).rot


@pytest.mark.parametrize(
    "text, line",
    [
        ("RAP1 x\n", 1),
        ("RAP2 4\n", 1),
        ("RAP1 4\n0: 1 2\n", 2),
        ("RAP1 4\n0: 1 2 3\n0: 1 2 3\n", 3),
        ("RAP1 4\n0: 1 2 a\n", 2),
        ("RAP1 4\n9: 1 2 3\n", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as info:
        parse_polyhedron(text)
    assert info.value.line == line


def test_parse_rejects_missing_and_asymmetric():
    with pytest.raises(ParseError):
        parse_polyhedron("RAP1 4\n0: 1 2 3\n")
    with pytest.raises(ParseError):
        parse_polyhedron("RAP1 4\n0: 1 2 3\n1: 0 2 3\n2: 0 1 3\n3: 1 2 2\n")
    with pytest.raises(ParseError):
        parse_polyhedron("")


def test_parse_rejects_torus_rotation():
    # K4 with one rotation reversed has Euler characteristic 0
    text = "RAP1 4\n0: 1 2 3\n1: 0 3 2\n2: 0 1 3\n3: 0 1 2\n"
    with pytest.raises(ParseError, match="not spherical"):
        parse_polyhedron(text)


def test_constructor_rejects_bad_structure():
    with pytest.raises(PolyhedronError):
        Polyhedron(((1, 2), (0, 2), (0, 1)))
    with pytest.raises(PolyhedronError):
        Polyhedron(((1, 1, 2), (0, 0, 2), (0, 1, 1)))
    with pytest.raises(PolyhedronError):
        Polyhedron(((0, 1, 2), (0, 2, 3), (0, 1, 3), (1, 2, 0)))


def test_faces_are_closed_dart_cycles():
    p = lobell(6)
    for cyc in p.faces:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            assert p.head(a) == b // 3


def test_validity_of_known_polyhedra():
    for p in [lobell(n) for n in range(5, 12)] + [double_lobell(5)]:
        report = validate_pogorelov(p)
        assert report.valid, report.reasons()


def test_prism_has_prismatic_circuits():
    report = validate_pogorelov(prism(3))
    assert not report.valid
    assert report.prismatic3 is not None
    report = validate_pogorelov(prism(6))
    assert report.prismatic4 is not None
    assert any("prismatic 4-circuit" in r for r in report.reasons())


@pytest.mark.parametrize("poly", FAMILY[:8], ids=repr)
def test_three_connectivity_agrees_with_bruteforce(poly):
    assert is_three_connected(poly) == _three_connected_bruteforce(poly)


def test_three_connectivity_detects_two_cut():
    # two K4-minus-an-edge pieces joined by two edges: cubic, planar, 2-connected only
    rot = (
        (1, 2, 4),
        (0, 3, 2),
        (0, 1, 3),
        (1, 7, 2),
        (0, 5, 6),
        (4, 7, 6),
        (4, 5, 7),
        (3, 6, 5),
    )
    p = Polyhedron(rot)
    assert not _three_connected_bruteforce(p)
    assert not is_three_connected(p)


@pytest.mark.parametrize("poly", [prism(3), prism(4), prism(5), lobell(5), lobell(6)], ids=repr)
def test_prismatic_circuits_match_bruteforce(poly):
    for k in (3, 4):
        got = {frozenset(c.edges) for c in prismatic_circuits(poly, k)}
        assert got == prismatic_bruteforce(poly, k)
        for c in prismatic_circuits(poly, k):
            assert c.verify(poly)


def test_prismatic_five_circuits_of_dodecahedron_are_face_parallel():
    got = {frozenset(c.edges) for c in prismatic_circuits(lobell(5), 5)}
    assert got == prismatic_bruteforce(lobell(5), 5)
    assert len(got) == 12


def test_prismatic_circuits_rejects_bad_k():
    with pytest.raises(ValueError):
        prismatic_circuits(lobell(5), 6)


def test_lobell_has_no_very_good_edges():
    for n in range(5, 11):
        assert very_good_edges(lobell(n)) == []


def test_double_dodecahedron_has_no_very_good_edges():
    assert very_good_edges(double_lobell(5)) == []


def test_a3_has_very_good_edges():
    children = edge_additions(lobell(6))
    a3 = children[0][0]
    vg = very_good_edges(a3)
    assert vg
    for e in vg:
        _, _, k1, k2 = edge_context(a3, e)
        assert a3.face_sizes[k1] >= 6 and a3.face_sizes[k2] >= 6
        assert crossed_by_prismatic(a3, e, 5) is None


def test_exceptional_polyhedron_has_no_very_good_edge():
    p = load_fixture("exceptional.rap")
    assert validate_pogorelov(p).valid
    assert very_good_edges(p) == []
    assert lemma_witness(p) is None


def test_edge_context_faces():
    p = lobell(6)
    for e in range(p.num_edges):
        j1, j2, k1, k2 = edge_context(p, e)
        u, w = p.edges[e]
        assert {j1, j2} <= set(p.vertex_faces[u]) & set(p.vertex_faces[w])
        assert k1 in p.vertex_faces[u] and k2 in p.vertex_faces[w]
        assert len({j1, j2, k1, k2}) == 4


@pytest.mark.parametrize("poly", FAMILY, ids=repr)
def test_lemma_witness_checks(poly):
    w = lemma_witness(poly)
    if w is not None:
        assert check_lemma_witness(poly, w)


def test_witness_checker_rejects_tampering():
    a3 = edge_additions(lobell(6))[0][0]
    children = edge_additions(a3)
    for child, _ in children:
        w = lemma_witness(child)
        if w is not None:
            bad = type(w)(w.kind, w.edges, tuple(reversed(w.faces)))
            assert not check_lemma_witness(child, bad) or bad == w
            break


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_validity_invariant_under_relabeling(seed):
    from rapcensus.canon import shuffle_labels

    rng = random.Random(seed)
    p = rng.choice(FAMILY)
    q = shuffle_labels(p, rng)
    assert validate_pogorelov(q).valid == validate_pogorelov(p).valid
    assert face_vector(q) == face_vector(p)
    assert len(very_good_edges(q)) == len(very_good_edges(p))
    assert (lemma_witness(q) is None) == (lemma_witness(p) is None)

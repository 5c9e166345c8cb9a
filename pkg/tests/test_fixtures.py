"""Built-in fixtures and the arrangement generator."""

from itertools import permutations

import pytest

from gkmgraphs.errors import GkmError
from gkmgraphs.fixtures import KlmSpec, fixture, gen_klm, local_model
from gkmgraphs.graph import validate_axial


def label_preserving_isomorphism(a, b):
    """Brute-force search for a vertex bijection matching darts by
    (axial value, leg/edge status) and preserving incidence."""
    if a.rank != b.rank or len(a.vertices) != len(b.vertices):
        return None

    def profile(g, v):
        return sorted(
            (g.axial(d), g.darts[d].is_leg) for d in g.darts_at(v)
        )

    for perm in permutations(b.vertices):
        phi = dict(zip(a.vertices, perm))
        if any(profile(a, v) != profile(b, phi[v]) for v in a.vertices):
            continue
        good = True
        for did, d in a.darts.items():
            if d.is_leg:
                continue
            match = [
                bd
                for bd in b.darts_at(phi[d.source])
                if b.darts[bd].target == phi[d.target]
                and b.axial(bd) == d.axial
            ]
            if len(match) != 1:
                good = False
                break
        if good:
            return phi
    return None


def test_gen_klm_validates_and_counts():
    for spec in ((1, 1, 1), (2, 1, 2), (2, 2, 2), (3, 2, 1)):
        g = gen_klm(KlmSpec(*spec))
        k, l, m = spec
        assert len(g.vertices) == k * l + k * m + l * m
        assert validate_axial(g).ok


def test_gen_klm_111_is_isomorphic_to_the_triangle_fixture():
    a = gen_klm(KlmSpec(1, 1, 1))
    b = fixture("fig2_left")
    phi = label_preserving_isomorphism(a, b)
    assert phi is not None
    assert phi["X1.Y1"] == "p"  # the bottom-left vertex carries e1*, e2*


def test_gen_klm_111_forgetful_labels_at_bottom_left():
    from gkmgraphs.cohomology import forgetful_graph

    g = gen_klm(KlmSpec(1, 1, 1))
    fg = forgetful_graph(g)
    assert {fg.axial(d) for d in g.darts_at("X1.Y1")} == {
        (1, 0), (0, 1), (-1, 0), (0, -1)
    }


def test_gen_klm_rejects_degenerate_specs():
    with pytest.raises(GkmError):
        KlmSpec(0, 1, 1)
    with pytest.raises(GkmError):
        KlmSpec(1, -1, 2)


def test_fixture_unknown_id():
    with pytest.raises(GkmError, match="unknown fixture"):
        fixture("fig99")


def test_local_model_ids():
    g = local_model(3)
    assert len(g.vertices) == 1
    assert len(g.leg_ids()) == 6
    assert fixture("local_model(3)") == g


def test_sphere_fixture_carries_the_reading_note():
    g = fixture("fig11_sphere")
    assert "reading" in g.meta.get("comment", "")
    # two distinct parallel edges
    assert len(g.canonical_edges()) == 2
    assert len({(g.darts[e].source, g.darts[e].target) for e in g.canonical_edges()}) == 1


def test_klm_metadata_names_cover_all_lines():
    g = gen_klm(KlmSpec(2, 2, 1))
    names = g.meta["hyperplane_names"]
    assert sorted(names) == ["X1", "X2", "Y1", "Y2", "Z1"]
    for name, verts in names.items():
        assert all(name in v.split(".") for v in verts)
    assert sorted(g.meta["positive_normals"]) == sorted(names)

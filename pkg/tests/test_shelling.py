"""Complex construction, shellings, characteristic covectors, module
bases, expansion and structure constants."""

import pytest

from gkmgraphs.cohomology import cohomology_basis
from gkmgraphs.errors import InconsistentLambda, NotShellable
from gkmgraphs.fixtures import KlmSpec, fixture, gen_klm
from gkmgraphs.hyperplanes import all_hyperplanes, choose_positive_halfspace
from gkmgraphs.polynomials import IntPolynomial
from gkmgraphs.shelling import (
    SimplicialComplex,
    basis_monomial_name,
    build_complex,
    characteristic_function,
    express_in_basis,
    find_shelling,
    hilbert_rank,
    klm_canonical_order,
    module_basis,
    ordinary_cohomology,
    relation_for_hyperplane,
    shelling_context,
)


def klm_ctx(k, l, m):
    return shelling_context(gen_klm(KlmSpec(k, l, m)))


def test_complex_of_disjoint_points():
    g = fixture("fig8_line5")
    c = build_complex(g)
    assert c.dim == 0
    assert all(len(f) == 1 for f in c.facets)
    assert len(c.facets) == 5


def test_complex_of_pentagon_is_five_cycle():
    g = fixture("fig7_pentagon")
    c = build_complex(g)
    assert len(c.facets) == 5
    assert all(len(f) == 2 for f in c.facets)
    edges = {tuple(sorted(f)) for f in c.facets}
    # each hyperplane appears in exactly two facets: a 5-cycle
    from collections import Counter

    count = Counter(n for e in edges for n in e)
    assert set(count.values()) == {2}


def test_complex_refuses_disconnected_intersections():
    from gkmgraphs.errors import AssumptionViolation

    with pytest.raises(AssumptionViolation) as ei:
        build_complex(fixture("fig11_sphere"))
    assert ei.value.assumption == 2


def test_complex_facet_count_matches_vertex_count_for_klm():
    for spec in ((1, 1, 1), (2, 1, 2), (2, 2, 2)):
        g = gen_klm(KlmSpec(*spec))
        c = build_complex(g)
        k, l, m = spec
        assert len(c.facets) == k * l + k * m + l * m
        # number of 1-simplices equals the number of graph vertices
        ones = [f for f in c.faces if len(f) == 2]
        assert len(ones) == k * l + k * m + l * m


def test_pentagon_shelling_follows_the_cyclic_pattern():
    g = fixture("fig7_pentagon")
    c = build_complex(g)
    # walk the 5-cycle in order: the minimal new faces come out as
    # (empty, vertex, vertex, vertex, full edge)
    adjacency = {}
    for f in c.facets:
        a, b = sorted(f)
        adjacency.setdefault(a, []).append(f)
        adjacency.setdefault(b, []).append(f)
    start = sorted(c.facets, key=lambda f: sorted(f))[0]
    order = [start]
    seen = {start}
    while len(order) < 5:
        last = order[-1]
        nxt = [
            f
            for v in sorted(last)
            for f in adjacency[v]
            if f not in seen
        ]
        order.append(nxt[0])
        seen.add(nxt[0])
    shell = find_shelling(c, order=order)
    mus = shell.minimal_faces
    assert mus[0] == frozenset()
    assert [len(mu) for mu in mus] == [0, 1, 1, 1, 2]
    assert mus[4] == order[4]


def test_line_points_shellable_in_any_order():
    g = fixture("fig8_line5")
    c = build_complex(g)
    order = list(reversed(c.facets))
    shell = find_shelling(c, order=order)
    assert shell.minimal_faces[0] == frozenset()
    assert shell.minimal_faces[1:] == order[1:]


def test_klm_212_canonical_shelling_mu_sequence():
    ctx = klm_ctx(2, 1, 2)
    order = [sorted(f) for f in ctx.shelling.order]
    assert order == [
        ["X1", "Y1"], ["X1", "Z1"], ["X1", "Z2"], ["X2", "Y1"],
        ["X2", "Z1"], ["X2", "Z2"], ["Y1", "Z1"], ["Y1", "Z2"],
    ]
    mus = [sorted(f) for f in ctx.shelling.minimal_faces]
    assert mus == [
        [], ["Z1"], ["Z2"], ["X2"],
        ["X2", "Z1"], ["X2", "Z2"], ["Y1", "Z1"], ["Y1", "Z2"],
    ]


def test_klm_canonical_order_verifies_for_other_sizes():
    for spec in ((2, 2, 2), (3, 2, 1), (1, 3, 2)):
        ctx = klm_ctx(*spec)
        assert len(ctx.shelling.order) == len(ctx.complex.facets)


def test_not_shellable_complex_is_reported():
    # two disjoint edges: the second facet always introduces two minimal
    # vertices at once
    c = SimplicialComplex(
        vertex_names=["a", "b", "c", "d"],
        faces={
            frozenset(),
            frozenset("a"), frozenset("b"), frozenset("c"), frozenset("d"),
            frozenset(("a", "b")), frozenset(("c", "d")),
        },
        facets=[frozenset(("a", "b")), frozenset(("c", "d"))],
        facet_vertex={},
        dim=1,
    )
    with pytest.raises(NotShellable):
        find_shelling(c)
    with pytest.raises(NotShellable):
        find_shelling(c, order=list(c.facets))


def test_shelling_interval_partition_and_ordering_facts():
    """Every face lies in exactly one interval [mu_i, sigma_i], and a
    minimal face only appears in facets at or after its own position."""
    for ctx in (
        klm_ctx(2, 1, 2),
        shelling_context(fixture("fig7_pentagon")),
        shelling_context(fixture("fig8_line5")),
    ):
        order = ctx.shelling.order
        mus = ctx.shelling.minimal_faces
        for face in ctx.complex.faces:
            homes = [
                i
                for i in range(len(order))
                if mus[i] <= face <= order[i]
            ]
            assert len(homes) == 1, (sorted(face), homes)
        for i, mu in enumerate(mus):
            for j, sigma in enumerate(order):
                if mu <= sigma:
                    assert j >= i


def test_characteristic_functions_of_klm():
    ctx = klm_ctx(2, 1, 2)
    assert ctx.lambdas == {
        "X1": (1, 0), "X2": (1, 0), "Y1": (0, 1),
        "Z1": (-1, -1), "Z2": (-1, -1),
    }


def test_characteristic_function_rank_one():
    g = fixture("fig8_line5")
    for h in all_hyperplanes(g):
        pos, _ = choose_positive_halfspace(g, h)
        lam = characteristic_function(g, h, pos)
        assert lam in ((1,), (-1,))


def test_characteristic_function_consistency_across_vertices():
    g = fixture("fig7_pentagon")
    for h in all_hyperplanes(g):
        pos, _ = choose_positive_halfspace(g, h)
        characteristic_function(g, h, pos)  # raises if inconsistent


def test_characteristic_function_detects_corruption():
    g = gen_klm(KlmSpec(2, 1, 2))
    planes = {h.name: h for h in all_hyperplanes(g)}
    pos, neg = choose_positive_halfspace(g, planes["X1"])
    # swap one normal so the two vertices disagree
    broken = dict(pos.normals)
    keys = sorted(broken)
    broken[keys[0]] = neg.normals[keys[0]]
    from gkmgraphs.hyperplanes import Halfspace

    bad = Halfspace(pos.hyperplane, pos.vertices, pos.dart_ids, broken)
    with pytest.raises(InconsistentLambda):
        characteristic_function(g, planes["X1"], bad)


def test_module_basis_examples():
    ctx = klm_ctx(2, 1, 2)
    names = [basis_monomial_name(b) for b in module_basis(ctx)]
    assert names == ["1", "Z1", "Z2", "X2", "X2*Z1", "X2*Z2", "Y1*Z1", "Y1*Z2"]
    g = fixture("fig8_line5")
    ctx8 = shelling_context(g)
    names8 = {basis_monomial_name(b) for b in module_basis(ctx8)}
    assert names8 == {"1", "L2", "L3", "L4", "L5"}


def test_module_basis_degrees_give_solver_ranks():
    for spec in ((1, 1, 1), (2, 1, 2)):
        ctx = klm_ctx(*spec)
        for k in range(4):
            _, rank = cohomology_basis(ctx.graph, k, forgetful=True)
            assert rank == hilbert_rank(ctx, k)
    ctx7 = shelling_context(fixture("fig7_pentagon"))
    for k in range(4):
        _, rank = cohomology_basis(ctx7.graph, k, forgetful=True)
        assert rank == hilbert_rank(ctx7, k)


def poly_of(ctx, *names_exps):
    mono = [0] * ctx.ngens
    for name, e in names_exps:
        mono[ctx.gen_index(name)] += e
    return IntPolynomial(ctx.ngens, {tuple(mono): 1})


def test_expansion_of_z1_squared():
    ctx = klm_ctx(2, 1, 2)
    exp = express_in_basis(ctx, poly_of(ctx, ("Z1", 2)))
    named = exp.to_dict(ctx, ["e1", "e2"])
    assert named == {"Z1": "-e2", "Y1*Z1": "1"}


def test_expansion_of_x2_squared():
    ctx = klm_ctx(2, 1, 2)
    exp = express_in_basis(ctx, poly_of(ctx, ("X2", 2)))
    named = exp.to_dict(ctx, ["e1", "e2"])
    assert named == {"X2": "e1", "X2*Z1": "1", "X2*Z2": "1"}


def test_basis_idempotence():
    ctx = klm_ctx(2, 1, 2)
    basis = module_basis(ctx)
    for i, b in enumerate(basis):
        exp = express_in_basis(ctx, ctx.monomial_poly(b))
        nonzero = {
            j: c for j, c in exp.coefficients.items() if not c.is_zero()
        }
        assert set(nonzero) == {i}
        assert nonzero[i] == IntPolynomial.constant(ctx.graph.rank, 1)


def test_expansion_reconstructs_under_localization():
    ctx = klm_ctx(2, 1, 2)
    f = poly_of(ctx, ("X2", 1), ("Z1", 1)) + 2 * poly_of(ctx, ("Y1", 2))
    exp = express_in_basis(ctx, f)
    basis = module_basis(ctx)
    recon = IntPolynomial.zero(ctx.ngens)
    for i, c in exp.coefficients.items():
        recon = recon + ctx.lift_coefficient(c) * ctx.monomial_poly(basis[i])
    for sigma in ctx.shelling.order:
        p = ctx.facet_point(sigma)
        assert ctx.localize_at(f, p) == ctx.localize_at(recon, p)


def test_localization_matrix_is_triangular_with_nonzero_diagonal():
    for ctx in (klm_ctx(2, 1, 2), shelling_context(fixture("fig7_pentagon"))):
        basis = module_basis(ctx)
        for i, sigma in enumerate(ctx.shelling.order):
            p = ctx.facet_point(sigma)
            for j in range(len(basis)):
                val = ctx.localize_at(ctx.monomial_poly(basis[j]), p)
                if j > i:
                    assert val.is_zero()
                if j == i:
                    assert not val.is_zero()


def test_algebra_unit_identity():
    # sum_i <e_j, lambda(L_i)> tau_{L_i} localizes to e_j at every vertex
    for ctx in (klm_ctx(2, 1, 2), shelling_context(fixture("fig8_line5"))):
        n = ctx.graph.rank
        for j in range(n):
            for v in ctx.graph.vertices:
                total = IntPolynomial.zero(n)
                for name in ctx.names:
                    c = ctx.lambdas[name][j]
                    if c:
                        total = total + c * ctx.taus[name].values[v]
                assert total == IntPolynomial.variable(n, j)


def test_relation_for_hyperplane_klm():
    ctx = klm_ctx(2, 1, 2)
    facet = frozenset({"X1", "Y1"})
    coeffs, u = relation_for_hyperplane(ctx, facet, "X1")
    assert u == (1, 0)
    assert coeffs == {"X1": 1, "X2": 1, "Z1": -1, "Z2": -1}
    coeffs, u = relation_for_hyperplane(ctx, facet, "Y1")
    assert u == (0, 1)
    assert coeffs == {"Y1": 1, "Z1": -1, "Z2": -1}


def test_relation_for_hyperplane_rank_one():
    ctx = shelling_context(fixture("fig8_line5"))
    facet = ctx.shelling.order[0]
    (name,) = facet
    coeffs, u = relation_for_hyperplane(ctx, facet, name)
    # sum of <u, lambda> L over all hyperplanes equals u
    assert all(c == ctx.lambdas[n][0] * u[0] for n, c in coeffs.items())


def test_ordinary_cohomology_212():
    ctx = klm_ctx(2, 1, 2)
    table = ordinary_cohomology(ctx)
    assert table["ordinary_ranks"] == {"0": 1, "1": 3, "2": 4}
    assert table["ordinary_products"]["X2*X2"] == {"X2*Z1": 1, "X2*Z2": 1}
    assert table["ordinary_products"]["Z1*Z1"] == {"Y1*Z1": 1}
    assert table["ordinary_products"]["Z1*Z2"] == {}
    assert table["ordinary_products"]["Z2*Z2"] == {"Y1*Z2": 1}


def test_ordinary_structure_constants_all_one():
    for spec in ((1, 1, 1), (2, 1, 2), (2, 2, 2), (3, 2, 1)):
        table = ordinary_cohomology(klm_ctx(*spec))
        for prods in table["ordinary_products"].values():
            assert all(c == 1 for c in prods.values())


def test_klm_canonical_order_rejects_non_klm_names():
    assert klm_canonical_order(["L1", "L2"]) is None

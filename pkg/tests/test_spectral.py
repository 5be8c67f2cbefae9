import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import fd_eigenvalues, tadpole_roots
from qgraph.graph import CutSet, GraphPoint, partition_graph
from qgraph.linalg import smallest_singular_values
from qgraph.spectral import (
    BoundaryCondition,
    count_below,
    eigenfunction_basis,
    eigenvalue_count_check,
    eigenvalue_list,
    eigenvalues,
    evaluate,
    l2_inner,
    lambda1,
    mu2,
    nth_eigenvalue,
    sample_eigenfunction,
    secular_matrix,
    vertex_residual,
)
from qgraph.zoo import path, random_graph, random_tree, star, star3, tadpole

STD = BoundaryCondition()
PI2 = math.pi ** 2


def sigma_min(m):
    return smallest_singular_values(m, 1)[0]


def test_secular_interval_nullspace():
    m = secular_matrix(path(), STD, math.pi)
    s = smallest_singular_values(m, 2)
    assert s[0] < 1e-12 and s[1] > 1e-3


def test_secular_dirichlet_full_rank():
    m = secular_matrix(path(), BoundaryCondition.on(["v0", "v1"]), math.pi / 2)
    assert sigma_min(m) > 1e-3


def test_secular_tadpole_root():
    assert sigma_min(secular_matrix(tadpole(), STD, 0.304)) < 1e-3


def test_secular_shape():
    g = star3()
    assert secular_matrix(g, STD, 1.0).shape == (6, 6)
    with pytest.raises(ValueError):
        secular_matrix(g, STD, 0.0)


def test_interval_spectrum():
    mus = eigenvalue_list(eigenvalues(path(), STD, 4), 4)
    assert mus[0] == 0.0
    assert mus[1:] == pytest.approx([PI2, 4 * PI2, 9 * PI2], rel=1e-12)


def test_interval_longer():
    mus = eigenvalue_list(eigenvalues(path(3.0), STD, 5), 5)
    assert mus == pytest.approx([(j * math.pi / 3) ** 2 for j in range(5)], rel=1e-10, abs=1e-14)


def test_star_spectrum_multiplicities():
    pairs = eigenvalues(star3(), STD, 7)
    got = [(p.mu, p.multiplicity) for p in pairs]
    want = [(0.0, 1), (PI2 / 4, 2), (PI2, 1), (9 * PI2 / 4, 2), (4 * PI2, 1)]
    assert [m for _, m in got] == [m for _, m in want]
    assert [x for x, _ in got] == pytest.approx([x for x, _ in want], rel=1e-10)


def test_tadpole_double_eigenvalue():
    pairs = eigenvalues(tadpole(), STD, 5)
    mus = eigenvalue_list(pairs, 5)
    assert mus[3] == pytest.approx(1.0, rel=1e-10) and mus[4] == pytest.approx(1.0, rel=1e-10)
    assert pairs[-1].multiplicity == 2


def test_tadpole_roots_match_oracle():
    ks = [p.k for p in eigenvalues(tadpole(), STD, 3)][1:3]
    assert ks == pytest.approx(tadpole_roots(), abs=1e-8)


def test_tadpole_loop_supported_eigenfunction():
    pair = eigenvalues(tadpole(), STD, 5)[-1]
    amps = [max(f.amplitude("tail") for f in pair.basis)]
    assert amps[0] > 0.1
    # some combination vanishes on the tail
    a = np.array([f.coeffs["tail"] for f in pair.basis])
    assert np.linalg.matrix_rank(a, tol=1e-8) == 1


def test_dirichlet_has_no_zero():
    pairs = eigenvalues(path(), BoundaryCondition.on(["v0"]), 2)
    assert pairs[0].k > 0
    assert pairs[0].mu == pytest.approx(PI2 / 4, rel=1e-12)


def test_nth_eigenvalue_and_count():
    g = star3()
    assert nth_eigenvalue(g, STD, 4) == pytest.approx(PI2, rel=1e-12)
    assert count_below(g, STD, math.pi / 2) == 1
    assert count_below(g, STD, math.pi / 2 + 1e-6) == 3


def test_interval_eigenfunction_form():
    pair = eigenvalues(path(), STD, 2)[1]
    (f,) = eigenfunction_basis(path(), STD, pair)
    a, b = f.coeffs["e1"]
    assert abs(a) == pytest.approx(math.sqrt(2), rel=1e-10) and abs(b) < 1e-10
    assert l2_inner(path(), f, f) == pytest.approx(1.0, rel=1e-12)


def test_evaluate_cosine():
    from qgraph.spectral import Eigenfunction

    f = Eigenfunction(math.pi, {"e1": (1.0, 0.0)})
    v, d = evaluate(f, GraphPoint("e1", 0.5))
    assert v == pytest.approx(0.0, abs=1e-15) and d == pytest.approx(-math.pi)
    assert evaluate(f, GraphPoint("e1", 0.0)) == (1.0, 0.0)


def test_evaluate_derivative_central_difference():
    g = random_tree(4, 11)
    pair = eigenvalues(g, STD, 4)[-1]
    f = pair.basis[0]
    rng = np.random.default_rng(0)
    h = 1e-6
    for _ in range(100):
        e = g.edges[int(rng.integers(len(g.edges)))]
        x = float(rng.uniform(h, e.length - h))
        num = (f.value(e.id, x + h) - f.value(e.id, x - h)) / (2 * h)
        assert abs(num - evaluate(f, GraphPoint(e.id, x))[1]) < 1e-6


@pytest.mark.parametrize("seed", range(10))
def test_residuals_on_random_trees(seed):
    g = random_tree(2 + seed % 4, seed)
    for bc in (STD, BoundaryCondition.topological(g)):
        for pair in eigenvalues(g, bc, 6):
            for f in pair.basis:
                assert vertex_residual(g, bc, f) < 1e-8
            gram = [[l2_inner(g, f, h) for h in pair.basis] for f in pair.basis]
            assert np.allclose(gram, np.eye(pair.multiplicity), atol=1e-9)


@pytest.mark.parametrize(
    "g, kmax",
    [(path(), 10 * math.pi), (star3(), 6 * math.pi), (tadpole(), 3.0)],
    ids=["interval", "star", "tadpole"],
)
def test_weyl_count(g, kmax):
    rep = eigenvalue_count_check(g, STD, kmax)
    assert rep["ok"] and not rep["missed_root_suspected"]


def test_weyl_count_interval_exact():
    assert eigenvalue_count_check(path(), STD, 10 * math.pi)["count"] == 11


def test_star_closed_form_count():
    # equilateral unit star: k in {pi/2 (x2), pi, 3pi/2 (x2), 2pi, ...}; up to 6pi
    rep = eigenvalue_count_check(star3(), STD, 6 * math.pi)
    closed = 1 + sum(2 for j in range(6) if (j + 0.5) * math.pi <= 6 * math.pi) + 6
    assert rep["count"] == closed


def _fd_input(g):
    return list(g.vertices), [(e.id, e.source, e.target, e.length) for e in g.edges]


@pytest.mark.parametrize("g", [star((0.7, 1.0, 1.3)), tadpole(1.0, 1.5)], ids=["star", "tadpole"])
def test_finite_element_oracle(g):
    vs, es = _fd_input(g)
    ref = fd_eigenvalues(vs, es, 6)
    got = eigenvalue_list(eigenvalues(g, STD, 6), 6)
    assert got[0] == pytest.approx(0.0, abs=1e-12) and abs(ref[0]) < 1e-8
    assert np.max(np.abs(np.array(got[1:]) - ref[1:]) / ref[1:]) < 1e-3


def test_finite_element_oracle_dirichlet():
    g = random_tree(4, 5)
    vs, es = _fd_input(g)
    leaves = frozenset(g.leaves())
    ref = fd_eigenvalues(vs, es, 5, dirichlet=leaves)
    got = eigenvalue_list(eigenvalues(g, BoundaryCondition(leaves), 5), 5)
    assert np.max(np.abs(np.array(got) - ref) / ref) < 1e-3


def test_mu2_and_lambda1_closed_forms():
    g = path(0.3)
    assert mu2(g) == pytest.approx(nth_eigenvalue(g, STD, 2), rel=1e-12)
    assert lambda1(g, ["v0"]) == pytest.approx((math.pi / 0.6) ** 2, rel=1e-12)
    assert lambda1(g, ["v0", "v1"]) == pytest.approx(nth_eigenvalue(g, BoundaryCondition.on(["v0", "v1"]), 1), rel=1e-12)
    with pytest.raises(ValueError):
        lambda1(g, [])


def test_sample_eigenfunction():
    pair = eigenvalues(path(), STD, 2)[1]
    rows = sample_eigenfunction(path(), pair.basis[0], 2)
    assert [r[1] for r in rows] == [0.0, 1.0]
    rows = sample_eigenfunction(path(), pair.basis[0], 11)
    assert len(rows) == 11
    with pytest.raises(ValueError):
        sample_eigenfunction(path(), pair.basis[0], 1)


def test_eigenvalues_rejects_nonpositive_count():
    with pytest.raises(ValueError):
        eigenvalues(path(), STD, 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10_000), st.data())
def test_dirichlet_monotonicity(n_edges, seed, data):
    g = random_tree(n_edges, seed)
    vs = list(g.vertices)
    base = data.draw(st.sets(st.sampled_from(vs), max_size=len(vs) - 1))
    extra = data.draw(st.sampled_from([v for v in vs if v not in base]))
    small = eigenvalue_list(eigenvalues(g, BoundaryCondition(frozenset(base)), 5), 5)
    big = eigenvalue_list(eigenvalues(g, BoundaryCondition(frozenset(base | {extra})), 5), 5)
    assert all(b >= s * (1 - 1e-9) - 1e-12 for s, b in zip(small, big))


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10_000), st.data())
def test_domain_monotonicity_lambda1(n_edges, seed, data):
    g = random_tree(n_edges, seed)
    e = g.edges[data.draw(st.integers(0, len(g.edges) - 1))]
    cut = CutSet((GraphPoint(e.id, data.draw(st.floats(0.05, 0.95)) * e.length),))
    leaves = set(g.leaves())
    whole = lambda1(g, leaves)
    for c in partition_graph(g, cut).clusters:
        dirichlet = set(c.boundary) | (leaves & set(c.vertices))
        assert lambda1(c, dirichlet) >= whole * (1 - 1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 5), st.integers(0, 1), st.integers(0, 10_000))
def test_count_matches_eigenvalues(n_edges, beta, seed):
    g = random_graph(n_edges + beta, beta, seed)
    mus = eigenvalue_list(eigenvalues(g, STD, 6))
    for j, mu in enumerate(mus):
        if mu == 0.0 or (j + 1 < len(mus) and mus[j + 1] - mu < 1e-7 * mu):
            continue
        assert count_below(g, STD, math.sqrt(mu) * (1 + 1e-8)) == j + 1

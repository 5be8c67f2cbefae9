"""The fourteen acceptance criteria at their stated tolerances.

Each test records one PASS/FAIL line, printed in the terminal summary.
"""
import functools
import math

import pytest

from oracles import fd_eigenvalues, star3_two_partition_grid, tadpole_roots
from qgraph import verify as V
from qgraph.morse import nodal_points, representative_for_index
from qgraph.partition import lambda_N, minimal_partition, minimal_partition_general
from qgraph.spectral import BoundaryCondition, eigenvalue_list, eigenvalues, pair_for_index
from qgraph.zoo import path, random_graph, random_trees, star3, tadpole

PI2 = math.pi ** 2
STD = BoundaryCondition()


def rel(a, b):
    return abs(a - b) / abs(b)


@functools.cache
def trees():
    return tuple((f"tree{i}", g) for i, g in enumerate(random_trees(20, 7)))


def test_01_path_spectrum(record):
    mus = eigenvalue_list(eigenvalues(path(), STD, 6), 6)
    err = max(rel(mus[k], k * k * PI2) for k in range(1, 6))
    record(1, err < 1e-8, f"path mu_2..mu_6 max rel err {err:.1e}")
    assert err < 1e-8


def test_02_path_partitions(record):
    worst_e = worst_l = 0.0
    for k in (2, 3, 4):
        r = minimal_partition(path(), k)
        worst_e = max(worst_e, rel(r.energy, k * k * PI2))
        worst_l = max(worst_l, max(abs(c.total_length - 1 / k) for c in r.partition.clusters))
    ok = worst_e < 1e-5 and worst_l < 1e-5
    record(2, ok, f"L^N_2..4 max rel err {worst_e:.1e}, cluster length dev {worst_l:.1e}")
    assert ok


def test_03_equilateral_star(record):
    pairs = eigenvalues(star3(), STD, 7)
    pattern = [(p.mu, p.multiplicity) for p in pairs]
    want = [(0.0, 1), (PI2 / 4, 2), (PI2, 1), (9 * PI2 / 4, 2), (4 * PI2, 1)]
    mults = [m for _, m in pattern] == [m for _, m in want]
    spec_err = max(abs(a - b) / max(b, 1.0) for (a, _), (b, _) in zip(pattern, want))
    ln = [minimal_partition(star3(), k).energy for k in (2, 3)]
    part_err = max(rel(x, PI2) for x in ln)
    ok = mults and spec_err < 1e-8 and part_err < 1e-5
    record(3, ok, f"multiplicities {'exact' if mults else 'WRONG'}, spectrum err {spec_err:.1e}, "
                  f"L^N_2,3 rel err {part_err:.1e}")
    assert ok


def test_04_tadpole_spectrum(record):
    pairs = eigenvalues(tadpole(), STD, 5)
    mus = eigenvalue_list(pairs, 5)
    double = pairs[-1].multiplicity == 2 and max(rel(mus[3], 1.0), rel(mus[4], 1.0)) < 1e-8
    ks = [pairs[1].k, pairs[2].k]
    fig = max(abs(ks[0] - 0.304), abs(ks[1] - 0.696))
    ora = max(abs(a - b) for a, b in zip(ks, tadpole_roots()))
    ok = double and fig < 5e-3 and ora < 1e-8
    record(4, ok, f"mu_4=mu_5=1 double: {double}; roots {ks[0]:.6f}, {ks[1]:.6f}; "
                  f"figure dev {fig:.1e}, root-finder dev {ora:.1e}")
    assert ok


def test_05_tadpole_nodal_counts(record):
    g = tadpole()
    pairs = eigenvalues(g, STD, 5)
    phis = []
    for n in range(1, 6):
        pair, first = pair_for_index(pairs, n)
        f, _ = representative_for_index(g, pair, first, n)
        phis.append(len(nodal_points(g, f, allow_non_morse=True)))
    record(5, phis == [0, 1, 3, 2, 4], f"phi = {phis}")
    assert phis == [0, 1, 3, 2, 4]


def test_06_tadpole_partitions(record):
    errs = []
    for k in (2, 3):
        r = minimal_partition_general(tadpole(), k)
        errs.append(rel(r.energy, k * k / 16))
    record(6, max(errs) < 1e-4, f"L^N_2, L^N_3 rel err {max(errs):.1e}")
    assert max(errs) < 1e-4


def test_07_courant(record):
    res = V.courant(list(trees()), 8)
    tad = V.courant([("tadpole", tadpole())], 8, expect_violation=True)
    witness = [c for c in tad.violations if c["n"] == 3 and c["phi"] == 3]
    ok = res.checked > 0 and not res.violations and bool(witness)
    record(7, ok, f"{res.checked} tree eigenfunctions, {len(res.violations)} violations; "
                  f"tadpole n=3 witness phi={witness[0]['phi'] if witness else None}")
    assert ok


def test_08_generic_nodal_count(record):
    res = V.nodal_count(list(trees()), 8)
    ok = res.checked > 0 and not res.violations
    record(8, ok, f"{res.checked} generic cases, {len(res.violations)} violations")
    assert ok


def test_09_neumann_identity(record):
    res = V.neumann_identity(list(trees()), 8, tol=1e-6)
    errs = [c["max_rel_err"] for c in res.cases if c.get("checked")]
    ok = res.checked > 0 and not res.violations
    record(9, ok, f"{res.checked} cases, max rel err {max(errs, default=0):.1e}")
    assert ok


def test_10_spm_equality(record):
    targets = [("path", path()), *trees()]
    eq = V.spm_equality(targets, 4, tol=1e-5, match_tol=1e-5)
    m2 = V.main2(targets, 5, tol=1e-5)
    eq_checked = [c for c in eq.cases if c.get("checked") and "rel_err" in c]
    err = max((c["rel_err"] for c in eq_checked), default=0.0)
    dist = max((c["max_cut_distance"] for c in eq_checked), default=0.0)
    ok = len(eq_checked) > 0 and not eq.violations and m2.checked > 0 and not m2.violations
    record(10, ok, f"{len(eq_checked)} generic equality cases (rel err {err:.1e}, cut dev {dist:.1e}), "
                   f"{m2.checked} Neumann-domain cases, "
                   f"{len(eq.violations) + len(m2.violations)} violations")
    assert ok


@functools.cache
def interlacing_suite():
    targets = [("path", path()), ("star", star3()), ("tadpole", tadpole()), *trees()]
    return V.interlacing(targets, 6)


@pytest.mark.xfail(
    strict=True,
    reason="tadpole(2pi, 2pi): lambda_1 = 0.0179 < L^N_1 = 1/16 at n = 2 (and a failure at n = 6); "
           "trees satisfy the chain",
)
def test_11_interlacing(record):
    res = interlacing_suite()
    bad = res.violations
    where = ", ".join(f"{c['graph']} n={c['n']} slacks={[round(s, 4) for s in c['slacks']]}" for c in bad)
    record(11, not bad, f"{res.checked} cases, {len(bad)} violations" + (f": {where}" if bad else ""))
    assert not bad


def test_11_interlacing_holds_on_trees():
    res = interlacing_suite()
    assert all(c["graph"] == "tadpole" for c in res.violations)
    assert any(c["graph"] == "tadpole" and c["n"] == 2 for c in res.violations)


def test_12_surgery(record):
    graphs = [tadpole(), *[random_graph(3 + i % 3, 1 + i % 2, 100 + i) for i in range(6)]]
    res = V.surgery([(f"g{i}", g) for i, g in enumerate(graphs)], 50, tol=1e-8, seed=12)
    worst = min(min(c["neumann_slack"], c["dirichlet_slack"], c["cluster_slack"]) for c in res.cases)
    ok = res.checked == 50 and not res.violations
    record(12, ok, f"{res.checked} trials, {len(res.violations)} violations, worst slack {worst:.1e}")
    assert ok


def test_13_fd_oracle(record):
    worst = 0.0
    for i in range(10):
        beta = i % 2
        g = random_graph(2 + i % 5, beta, 1300 + i)
        ref = fd_eigenvalues(list(g.vertices), [(e.id, e.source, e.target, e.length) for e in g.edges], 6)
        got = eigenvalue_list(eigenvalues(g, STD, 6), 6)
        # mu_1 = 0: absolute comparison
        errs = [abs(got[0] - ref[0])] + [rel(a, b) for a, b in zip(got[1:], ref[1:])]
        worst = max(worst, max(errs))
    record(13, worst < 1e-3, f"10 graphs, first 6 eigenvalues, max rel err {worst:.1e}")
    assert worst < 1e-3


def test_14_perturbed_star(record):
    g = star3(eps=0.1)
    r = minimal_partition(g, 2)
    center = not r.cutset.interior and len(r.cutset.vertex_splits) == 1
    intervals = all(c.is_path for c in r.partition.clusters)
    err = rel(r.energy, PI2 / 1.1 ** 2)
    grid, label = star3_two_partition_grid((1.0, 1.0, 1.1), 1e-3)
    agree = rel(r.energy, grid) < 1e-4 and label.startswith("split")
    ok = center and intervals and err < 1e-4 and not r.equipartition and agree
    record(14, ok, f"centre split {center}, energy rel err {err:.1e}, equipartition {r.equipartition}, "
                   f"grid oracle {grid:.6f} ({label})")
    assert ok
    assert lambda_N(r.partition).energy == pytest.approx(r.energy, rel=1e-9)

import math

import numpy as np
import pytest

from oracles import star3_two_partition_refined
from qgraph.errors import BudgetExceeded, EmptyBoundary, InfeasibleK, PartitionError
from qgraph.graph import CutSet, GraphPoint, apply_cut, betti_number, partition_graph
from qgraph.partition import (
    binary_splits,
    lambda_D,
    lambda_N,
    minimal_partition,
    minimal_partition_general,
    verify_interlacing,
    verify_surgery_monotonicity,
)
from qgraph.spectral import BoundaryCondition, eigenvalue_list, eigenvalues
from qgraph.zoo import path, random_graph, random_tree, star3, tadpole

PI2 = math.pi ** 2


def test_lambda_N_interval_halves():
    p = partition_graph(path(), CutSet((GraphPoint("e1", 0.5),)))
    e = lambda_N(p)
    assert e.energy == pytest.approx(4 * PI2, rel=1e-12) and e.equipartition


def test_lambda_N_uneven_cut():
    p = partition_graph(path(), CutSet((GraphPoint("e1", 0.3),)))
    e = lambda_N(p)
    assert e.energy == pytest.approx((math.pi / 0.3) ** 2, rel=1e-12)
    assert not e.equipartition


def test_lambda_N_star_split():
    split = binary_splits(star3(), "c")
    s = next(x for x in split if len(x.groups[0]) == 1 or len(x.groups[1]) == 1)
    e = lambda_N(partition_graph(star3(), CutSet((), (s,))))
    assert sorted(v for _, v in e.values) == pytest.approx([PI2 / 4, PI2], rel=1e-12)


def test_lambda_D_mixed_interval():
    p = partition_graph(path(), CutSet((GraphPoint("e1", 0.5),)))
    e = lambda_D(p)
    assert e.energy == pytest.approx(PI2, rel=1e-12) and e.equipartition


def test_lambda_D_symmetric_cut_is_best():
    xs = np.linspace(0.05, 0.95, 91)
    vals = [lambda_D(partition_graph(path(), CutSet((GraphPoint("e1", float(x)),)))).energy for x in xs]
    assert xs[int(np.argmin(vals))] == pytest.approx(0.5)


def test_lambda_D_needs_boundary():
    with pytest.raises(EmptyBoundary):
        lambda_D(partition_graph(path(), CutSet()))


@pytest.mark.parametrize("k", [2, 3, 4])
def test_path_minimal(k):
    r = minimal_partition(path(), k)
    assert r.energy == pytest.approx(k * k * PI2, rel=1e-5)
    assert r.equipartition
    assert [c.total_length for c in r.partition.clusters] == pytest.approx([1 / k] * k, abs=1e-5)
    assert lambda_N(r.partition).energy == pytest.approx(r.energy, rel=1e-9)


@pytest.mark.parametrize("k", [2, 3])
def test_equilateral_star(k):
    assert minimal_partition(star3(), k).energy == pytest.approx(PI2, rel=1e-5)


def test_perturbed_star_center_split():
    r = minimal_partition(star3(eps=0.1), 2)
    assert r.energy == pytest.approx(PI2 / 1.21, rel=1e-4)
    assert not r.equipartition
    assert not r.cutset.interior and len(r.cutset.vertex_splits) == 1


@pytest.mark.parametrize("lengths", [(0.5, 0.6, 1.5), (0.7, 1.0, 1.3), (0.6, 0.8, 0.9)])
def test_star_against_grid_oracle(lengths):
    ref = star3_two_partition_refined(lengths, 1e-3 * min(lengths))
    assert minimal_partition(star3(lengths), 2).energy == pytest.approx(ref, rel=1e-4)


@pytest.mark.parametrize("k", [2, 3])
def test_tadpole_general(k):
    r = minimal_partition_general(tadpole(), k)
    assert r.energy == pytest.approx(k * k / 16, rel=1e-4)
    assert lambda_N(r.partition).energy == pytest.approx(r.energy, rel=1e-9)


def test_tadpole_strictly_above_mu_k():
    mus = eigenvalue_list(eigenvalues(tadpole(), BoundaryCondition(), 4))
    for k in (2, 3):
        assert minimal_partition_general(tadpole(), k).energy > mus[k - 1] * (1 + 1e-6)
        # mu_k(interval) < mu_k(tadpole) <= mu_{k+1}(interval), interval of length 4 pi
        assert ((k - 1) / 4) ** 2 < mus[k - 1] <= (k / 4) ** 2 * (1 + 1e-12)


def test_tree_reduction_on_tadpole():
    # minimum over trees obtained by breaking the loop equals the general optimum
    g = tadpole()
    trees = [apply_cut(g, CutSet((GraphPoint("loop", x),))) for x in np.linspace(0.2, 2 * math.pi - 0.2, 15)]
    trees += [
        t
        for s in binary_splits(g, "a")
        if (t := apply_cut(g, CutSet((), (s,)))).is_connected and betti_number(t) == 0
    ]
    best = min(minimal_partition(t, 2).energy for t in trees)
    assert minimal_partition_general(g, 2).energy == pytest.approx(best, rel=1e-6)


def test_tree_only_entry_point():
    with pytest.raises(PartitionError):
        minimal_partition(tadpole(), 2)


def test_infeasible_and_budget():
    with pytest.raises(InfeasibleK):
        minimal_partition(path(), 0)
    with pytest.raises(BudgetExceeded):
        minimal_partition(random_tree(5, 1), 6, budget=3)


def test_bad_kind():
    with pytest.raises(ValueError):
        minimal_partition(path(), 2, kind="robin")


def test_result_dict():
    d = minimal_partition(path(), 2).to_dict()
    assert d["k"] == 2 and d["cuts"] == [{"edge_id": "e1", "x": pytest.approx(0.5)}]
    assert d["equipartition"] is True


def test_deterministic():
    g = random_tree(4, 3)
    a = minimal_partition(g, 3, seed=1)
    b = minimal_partition(g, 3, seed=1, screen=False)
    assert a.energy == pytest.approx(b.energy, rel=1e-12)


@pytest.mark.parametrize("g", [path(), star3(eps=0.1), random_tree(4, 9), tadpole()], ids=["path", "star", "tree", "tadpole"])
def test_monotone_in_k(g):
    es = [minimal_partition_general(g, k).energy for k in (2, 3, 4)]
    assert all(b >= a * (1 - 1e-9) for a, b in zip(es, es[1:]))


def test_interlacing_path():
    r = verify_interlacing(path(), 3)
    assert r["ok"] and r["LN_n_minus_1"] == pytest.approx(4 * PI2, rel=1e-6)
    assert r["mu_n_minus_beta"] == pytest.approx(4 * PI2, rel=1e-9)


def test_interlacing_tadpole_n3():
    r = verify_interlacing(tadpole(), 3)
    assert r["ok"] and r["beta"] == 1
    assert r["slacks"][1] > 1e-3


def test_interlacing_requires_n():
    with pytest.raises(ValueError):
        verify_interlacing(tadpole(), 1)


def test_surgery_on_cyclic_graphs():
    graphs = [tadpole(), random_graph(4, 1, 2), random_graph(5, 2, 3)]
    rep = verify_surgery_monotonicity(graphs, 20, seed=4)
    assert rep["ok"] and len(rep["trials"]) == 20


def test_surgery_sliver():
    # cutting a lollipop loop open lowers mu_2
    g = tadpole(1.0, 1.0)
    before = lambda_N(partition_graph(g, CutSet())).energy
    after = lambda_N(partition_graph(g, CutSet((GraphPoint("loop", 0.1),)))).energy
    assert after <= before


def test_surgery_needs_cycles():
    with pytest.raises(PartitionError):
        verify_surgery_monotonicity([path()], 3)

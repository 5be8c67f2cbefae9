import json
import math

import pytest

from qgraph.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_path(capsys):
    code, out, _ = run(capsys, "spectrum", "path", "--length", "1", "--count", "4")
    assert code == 0
    vals = [float(line.split()[1]) for line in out.splitlines()]
    assert vals == pytest.approx([0.0, math.pi ** 2, 4 * math.pi ** 2, 9 * math.pi ** 2], rel=1e-11)
    assert "9.86960440109" in out


def test_spectrum_star_json(capsys):
    code, out, _ = run(capsys, "spectrum", "star3", "--lengths", "1,1,1", "--count", "3", "--json")
    assert code == 0
    rows = json.loads(out)["eigenvalues"]
    assert [r["multiplicity"] for r in rows] == [1, 2, 2]
    assert rows[1]["mu"] == pytest.approx(math.pi ** 2 / 4, rel=1e-11)


def test_spectrum_csv_and_dirichlet(capsys):
    code, out, _ = run(capsys, "spectrum", "path", "--count", "2", "--dirichlet", "v0,v1", "--csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "index,mu,k,multiplicity"
    assert float(lines[1].split(",")[1]) == pytest.approx(math.pi ** 2, rel=1e-11)


def test_spectrum_deterministic(capsys):
    a = run(capsys, "spectrum", "random-tree", "--seed", "3", "--json")[1]
    b = run(capsys, "spectrum", "random-tree", "--seed", "3", "--json")[1]
    assert a == b


def test_graph_file(tmp_path, capsys):
    f = tmp_path / "g.json"
    f.write_text('{"vertices": ["a","b"], "edges": [{"id":"e1","from":"a","to":"b","length":2.0}]}')
    code, out, _ = run(capsys, "spectrum", "--graph", str(f), "--count", "2")
    assert code == 0
    assert float(out.splitlines()[1].split()[1]) == pytest.approx(math.pi ** 2 / 4, rel=1e-11)


def test_malformed_json(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text("{not json")
    code, out, err = run(capsys, "spectrum", str(f))
    assert code == 2 and out == "" and "input error" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "nowhere"],
        ["spectrum", "path", "--count", "0"],
        ["spectrum", "path", "--dirichlet", "zz"],
        ["spectrum", "star3", "--lengths", "1,x,1"],
        ["bogus-command"],
    ],
)
def test_input_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_eigenfunction_constant(capsys):
    code, out, _ = run(capsys, "eigenfunction", "tadpole", "--index", "1", "--samples", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "edge_id,x,value,derivative"
    vals = {float(line.split(",")[2]) for line in lines[1:]}
    assert len(lines) == 5 and max(vals) - min(vals) < 1e-12


def test_eigenfunction_tadpole_index2_sign_change_on_tail(capsys):
    code, out, _ = run(capsys, "eigenfunction", "tadpole", "--index", "2", "--samples", "201")
    assert code == 0
    tail = [float(line.split(",")[2]) for line in out.splitlines()[1:] if line.startswith("tail,")]
    signs = [v > 0 for v in tail if abs(v) > 1e-9]
    assert sum(a != b for a, b in zip(signs, signs[1:])) == 1


def test_eigenfunction_degenerate_files(tmp_path, capsys):
    out = tmp_path / "f.csv"
    code, text, _ = run(capsys, "eigenfunction", "tadpole", "--index", "4", "--samples", "5", "--out", str(out))
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["f.basis0.csv", "f.basis1.csv", "f.morse.csv"]


def test_eigenfunction_index_out_of_range(capsys, monkeypatch):
    import qgraph.cli as cli

    monkeypatch.setattr(cli, "eigenvalues", lambda g, n_max: [])
    assert run(capsys, "eigenfunction", "path", "--index", "3")[0] == 3


@pytest.mark.parametrize("index, phi", [(1, 0), (2, 1), (3, 3), (4, 2), (5, 4)])
def test_nodal_report_tadpole(capsys, index, phi):
    code, out, _ = run(capsys, "nodal-report", "tadpole", "--index", str(index))
    assert code == 0
    assert json.loads(out)["node_count"] == phi


def test_neumann_report_path(capsys):
    code, out, _ = run(capsys, "neumann-report", "path", "--index", "6")
    d = json.loads(out)
    assert code == 0 and d["neumann_domain_count"] == 5
    assert all(c["mu2"] == pytest.approx(25 * math.pi ** 2, rel=1e-9) for c in d["domains"])


def test_report_star_not_generic(capsys):
    d = json.loads(run(capsys, "nodal-report", "star3", "--index", "2")[1])
    assert d["is_generic"] is False


@pytest.mark.parametrize(
    "argv, energy",
    [
        (["path", "--k", "3"], 9 * math.pi ** 2),
        (["star3", "--lengths", "1,1,1", "--k", "2"], math.pi ** 2),
        (["tadpole", "--k", "2"], 0.25),
    ],
)
def test_minpart(capsys, argv, energy):
    code, out, _ = run(capsys, "minpart", *argv)
    d = json.loads(out)
    assert code == 0 and d["energy"] == pytest.approx(energy, rel=1e-5)
    assert set(d) >= {"k", "kind", "energy", "cuts", "clusters", "equipartition", "classes_examined"}


def test_minpart_perturbed_star(capsys):
    d = json.loads(run(capsys, "minpart", "star3", "--eps", "--k", "2")[1])
    assert d["energy"] == pytest.approx(math.pi ** 2 / 1.21, rel=1e-4)
    assert d["equipartition"] is False


def test_minpart_infeasible(capsys):
    assert run(capsys, "minpart", "path", "--k", "0")[0] == 2


def test_verify_courant_trees(capsys):
    code, out, _ = run(capsys, "verify", "courant", "--random-trees", "20", "--seed", "7", "--nmax", "8")
    assert code == 0 and out.startswith("courant: PASS")


def test_verify_courant_tadpole_witness(capsys):
    code, out, _ = run(capsys, "verify", "courant", "--graph", "tadpole", "--nmax", "7", "--expect-violation", "--json")
    d = json.loads(out)
    assert code == 0
    assert d["violations"] >= 1
    assert any(c["n"] == 3 and c["phi"] == 3 and not c["ok"] for c in d["cases"])
    assert run(capsys, "verify", "courant", "--graph", "tadpole", "--nmax", "7")[0] == 5


def test_verify_spm_equality_path(capsys):
    code, out, _ = run(capsys, "verify", "spm-equality", "--graph", "path", "--nmax", "5")
    assert code == 0, out


def test_verify_surgery(capsys):
    code, out, _ = run(capsys, "verify", "surgery", "--random-graphs", "4", "--trials", "10", "--seed", "1")
    assert code == 0, out


def test_verify_needs_target(capsys):
    assert run(capsys, "verify", "courant")[0] == 2

"""Command-line front end: ``qgraph <command> ...``.

Exit codes: 0 ok, 2 input error, 3 solver error, 4 analysis error,
5 verification failure. Output is assembled in full before printing, so a
failing command never leaves partial results on stdout.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import verify as V
from .errors import AnalysisError, GraphError, PartitionError, QGraphError, SolverError
from .graph import MetricGraph, graph_from_json
from .morse import DomainReport, domain_summary, report, representative_for_index
from .partition import DIRICHLET, NEUMANN, minimal_partition_general
from .spectral import BoundaryCondition, eigenvalues, pair_for_index, sample_eigenfunction
from .zoo import ZOO, from_zoo, random_graph, random_trees

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_ANALYSIS, EXIT_VERIFY = 0, 2, 3, 4, 5
DIGITS = 12

log = logging.getLogger("qgraph")


class InputError(Exception):
    pass


def _round(obj: Any) -> Any:
    """Floats to 12 significant digits, recursively."""
    if isinstance(obj, float):
        if math.isfinite(obj):
            return float(f"{obj:.{DIGITS}g}")
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return _round(obj.item())
    return obj


def _fmt(x: float) -> str:
    return f"{x:.{DIGITS}g}"


def _dumps(obj: Any) -> str:
    return json.dumps(_round(obj), indent=2) + "\n"


def _floats(text: str | None, what: str) -> list[float] | None:
    if text is None:
        return None
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def load_graph(args: argparse.Namespace) -> tuple[str, MetricGraph]:
    src = getattr(args, "graph", None) or getattr(args, "source", None)
    if src is None:
        raise InputError("no graph given: pass a JSON file or one of " + ", ".join(ZOO))
    path = Path(src)
    if path.is_file():
        return path.stem, graph_from_json(path.read_text())
    if src not in ZOO:
        raise InputError(f"{src!r} is neither a file nor a zoo graph ({', '.join(ZOO)})")
    lengths = _floats(args.lengths, "--lengths")
    g = from_zoo(src, length=args.length, lengths=lengths, eps=args.eps, seed=args.seed, edges=args.edges)
    return src, g


def _targets(args: argparse.Namespace) -> list[tuple[str, MetricGraph]]:
    out = []
    if args.graph or args.source:
        out.append(load_graph(args))
    if args.random_trees:
        out += [(f"tree{i}", g) for i, g in enumerate(random_trees(args.random_trees, args.seed))]
    if args.random_graphs:
        for i in range(args.random_graphs):
            beta = 1 + i % 2
            out.append((f"graph{i}", random_graph(beta + 3 + i % 3, beta, args.seed + i)))
    if not out:
        raise InputError("verify needs --graph, --random-trees or --random-graphs")
    return out


# --- commands ----------------------------------------------------------------


def cmd_spectrum(args: argparse.Namespace) -> str:
    name, g = load_graph(args)
    if args.count < 1:
        raise InputError("--count must be >= 1")
    dirichlet = [v for v in (args.dirichlet or "").split(",") if v]
    unknown = [v for v in dirichlet if v not in g.vertices]
    if unknown:
        raise InputError(f"unknown Dirichlet vertices: {', '.join(unknown)}")
    pairs = eigenvalues(g, BoundaryCondition.on(dirichlet), args.count)
    rows, n = [], 1
    for p in pairs:
        for _ in range(p.multiplicity):
            if n <= args.count:
                rows.append({"index": n, "mu": p.mu, "k": p.k, "multiplicity": p.multiplicity})
            n += 1
    if args.json:
        return _dumps({"graph": name, "dirichlet": dirichlet, "eigenvalues": rows})
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "mu", "k", "multiplicity"])
        for r in rows:
            w.writerow([r["index"], _fmt(r["mu"]), _fmt(r["k"]), r["multiplicity"]])
        return buf.getvalue()
    lines = [f"{r['index']:>4}  {_fmt(r['mu'])}" + (f"  (x{r['multiplicity']})" if r["multiplicity"] > 1 else "")
             for r in rows]
    return "\n".join(lines) + "\n"


def _csv_rows(rows: list[tuple], label: str | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow((["function"] if label is not None else []) + ["edge_id", "x", "value", "derivative"])
    for eid, x, v, d in rows:
        w.writerow(([label] if label is not None else []) + [eid, _fmt(x), _fmt(v), _fmt(d)])
    return buf.getvalue()


def cmd_eigenfunction(args: argparse.Namespace) -> str:
    _, g = load_graph(args)
    if args.index < 1:
        raise InputError("--index must be >= 1")
    if args.samples < 2:
        raise InputError("--samples must be >= 2")
    pairs = eigenvalues(g, n_max=args.index)
    try:
        pair, first = pair_for_index(pairs, args.index)
    except IndexError as exc:
        raise SolverError(str(exc)) from None
    funcs = [(f"basis{i}", f) for i, f in enumerate(pair.basis)]
    if pair.multiplicity > 1:
        from .morse import morse_representative

        rep = morse_representative(g, pair.basis)
        if rep is not None:
            funcs.append(("morse", rep))
    if args.out is None:
        if len(funcs) == 1:
            return _csv_rows(sample_eigenfunction(g, funcs[0][1], args.samples))
        buf = io.StringIO()
        for i, (label, f) in enumerate(funcs):
            text = _csv_rows(sample_eigenfunction(g, f, args.samples), label)
            buf.write(text if i == 0 else text.split("\n", 1)[1])
        return buf.getvalue()
    out = Path(args.out)
    texts = {}
    for label, f in funcs:
        target = out if len(funcs) == 1 else out.with_name(f"{out.stem}.{label}{out.suffix or '.csv'}")
        texts[target] = _csv_rows(sample_eigenfunction(g, f, args.samples))
    for target, text in texts.items():
        target.write_text(text)
    return "".join(f"wrote {t}\n" for t in texts)


def _report_dict(g: MetricGraph, rep: DomainReport, which: str) -> dict:
    d: dict[str, Any] = {
        "is_morse": rep.is_morse,
        "is_generic": rep.is_generic,
        "reasons": list(rep.reasons),
        "notes": list(rep.notes),
    }
    pts = rep.nodal_points if which == "nodal" else rep.neumann_points
    d["points"] = [p.as_dict() for p in pts.interior] + [{"vertex": v} for v in pts.vertices]
    if which == "nodal":
        d["node_count"] = rep.node_count
        d["nodal_count"] = rep.nodal_count
        if rep.nodal_domains is not None:
            d["domains"] = domain_summary(rep.nodal_domains)
    else:
        d["neumann_point_count"] = len(rep.neumann_points)
        if rep.neumann_domains is not None:
            d["domains"] = domain_summary(rep.neumann_domains)
            d["neumann_domain_count"] = rep.neumann_domains.k
    return d


def _cmd_report(args: argparse.Namespace, which: str) -> str:
    name, g = load_graph(args)
    if args.index < 1:
        raise InputError("--index must be >= 1")
    pairs = eigenvalues(g, n_max=args.index)
    try:
        pair, first = pair_for_index(pairs, args.index)
    except IndexError as exc:
        raise SolverError(str(exc)) from None
    f, member = representative_for_index(g, pair, first, args.index)
    if f is None:
        raise AnalysisError("eigenfunction is not Morse and no Morse representative exists")
    non_morse = member == "localized"
    if which == "neumann" and non_morse:
        f = None
        from .morse import morse_representative

        f = morse_representative(g, pair.basis)
        member = "morse"
        if f is None:
            raise AnalysisError("Neumann domains need a Morse eigenfunction; none exists")
    rep = report(g, pair, f=f, allow_non_morse=non_morse)
    out = {
        "graph": name,
        "index": args.index,
        "mu": pair.mu,
        "multiplicity": pair.multiplicity,
        "member": member,
        **_report_dict(g, rep, which),
    }
    return _dumps(out)


def cmd_nodal_report(args: argparse.Namespace) -> str:
    return _cmd_report(args, "nodal")


def cmd_neumann_report(args: argparse.Namespace) -> str:
    return _cmd_report(args, "neumann")


def cmd_minpart(args: argparse.Namespace) -> str:
    name, g = load_graph(args)
    if args.k < 1:
        raise InputError("--k must be >= 1")
    res = minimal_partition_general(g, args.k, args.kind, seed=args.seed)
    return _dumps({"graph": name, **res.to_dict()})


def cmd_verify(args: argparse.Namespace) -> tuple[str, int]:
    targets = _targets(args)
    theorem = args.theorem
    kw: dict[str, Any] = {}
    if args.tol is not None:
        kw["tol"] = args.tol
    if theorem == "surgery":
        res = V.surgery(targets, args.trials, seed=args.seed, **kw)
    elif theorem == "courant":
        res = V.courant(targets, args.nmax, expect_violation=args.expect_violation, **kw)
    elif theorem in ("spm-equality", "main2", "interlacing"):
        res = V.SUITES[theorem](targets, args.nmax, seed=args.seed, **kw)
    else:
        res = V.SUITES[theorem](targets, args.nmax, **kw)
    if theorem != "courant":
        res.expect_violation = args.expect_violation
    code = EXIT_OK if res.passed else EXIT_VERIFY
    if args.json:
        return _dumps(res.to_dict()), code
    lines = [f"{theorem}: {'PASS' if res.passed else 'FAIL'} "
             f"({res.checked} checked, {len(res.violations)} violations"
             f"{', violation expected' if res.expect_violation else ''})"]
    lines += [f"  note: {n}" for n in res.notes]
    for c in res.violations:
        lines.append("  witness: " + json.dumps(_round(c), sort_keys=True))
    return "\n".join(lines) + "\n", code


# --- parser ------------------------------------------------------------------


def _graph_options(p: argparse.ArgumentParser, positional: bool = True) -> None:
    if positional:
        p.add_argument("source", nargs="?", help="graph JSON file or zoo name")
    p.add_argument("--graph", help="graph JSON file or zoo name (" + ", ".join(ZOO) + ")")
    p.add_argument("--length", type=float, help="path length")
    p.add_argument("--lengths", help="comma-separated edge lengths (star3, tadpole loop,tail)")
    p.add_argument("--eps", type=float, nargs="?", const=0.1, help="star3 perturbation (bare flag: 0.1)")
    p.add_argument("--edges", type=int, default=4, help="edge count for random-tree")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qgraph", description="Quantum graph spectra, nodal data and minimal partitions.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="eigenvalues with multiplicities")
    _graph_options(p)
    p.add_argument("--count", type=int, default=6)
    p.add_argument("--dirichlet", help="comma-separated Dirichlet vertices")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("eigenfunction", help="sample an eigenfunction to CSV")
    _graph_options(p)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--out", help="CSV file; degenerate eigenvalues write one file per function")
    p.set_defaults(func=cmd_eigenfunction)

    for name, func in (("nodal-report", cmd_nodal_report), ("neumann-report", cmd_neumann_report)):
        p = sub.add_parser(name, help=f"{name.split('-')[0]} points and domains as JSON")
        _graph_options(p)
        p.add_argument("--index", type=int, required=True)
        p.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
        p.set_defaults(func=func)

    p = sub.add_parser("minpart", help="spectral minimal k-partition as JSON")
    _graph_options(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--kind", choices=(NEUMANN, DIRICHLET), default=NEUMANN)
    p.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
    p.set_defaults(func=cmd_minpart)

    p = sub.add_parser("verify", help="run a theorem check suite")
    p.add_argument("theorem", choices=V.THEOREMS)
    _graph_options(p, positional=False)
    p.set_defaults(source=None)
    p.add_argument("--random-trees", type=int, default=0, metavar="N")
    p.add_argument("--random-graphs", type=int, default=0, metavar="N", help="graphs with one or two cycles")
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--trials", type=int, default=50, help="surgery trials")
    p.add_argument("--tol", type=float)
    p.add_argument("--expect-violation", action="store_true", help="pass iff a violation is found")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    return ap


def _setup_logging() -> None:
    level = os.environ.get("QGRAPH_LOG", "").lower()
    levels = {"debug": logging.DEBUG, "info": logging.INFO}
    logging.basicConfig(
        level=levels.get(level, logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        result = args.func(args)
    except (InputError, GraphError, ValueError, KeyError, OSError) as exc:
        print(f"qgraph: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"qgraph: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (AnalysisError, PartitionError) as exc:
        print(f"qgraph: analysis error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except QGraphError as exc:
        print(f"qgraph: error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    text, code = result if isinstance(result, tuple) else (result, EXIT_OK)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

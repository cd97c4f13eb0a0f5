"""Command-line driver: sampling, spectra, classification, verification, bounds.

Exit codes: 0 success, 1 verification failure, 2 bad input, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from . import analysis, operators, qep
from .eig import EigenSolveError, Spectrum, eigs_general, eigs_symmetric, match_spectra
from .graphgen import (
    DegreeStats,
    Graph,
    InvalidParameters,
    SbmParams,
    degree_concentration,
    expected_stats,
    sample_sbm,
    write_edge_list,
    read_edge_list,
)

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_BAD_INPUT = 2
EXIT_NUMERIC = 3


def _fmt(x: float) -> float:
    # floats pass through json.dumps with repr round-trip fidelity
    return float(x)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("NBSPEC_THREADS", "4")))
    except ValueError:
        return 4


def _regular_graph(d: int, n: int) -> Graph:
    """Circulant d-regular graph on n vertices (offsets 1..d//2, plus n/2 if d odd)."""
    if d >= n or d < 1 or (d % 2 == 1 and n % 2 == 1):
        raise InvalidParameters(f"no circulant {d}-regular graph on {n} vertices")
    edges = set()
    for k in range(1, d // 2 + 1):
        for i in range(n):
            j = (i + k) % n
            edges.add((min(i, j), max(i, j)))
    if d % 2 == 1:
        for i in range(n // 2):
            edges.add((i, i + n // 2))
    labels = np.zeros(n, dtype=np.int8)
    labels[n // 2 :] = 1
    return Graph(n=n, edges=tuple(sorted(edges)), labels=labels)


def _complete_graph(n: int) -> Graph:
    edges = tuple((i, j) for i in range(n) for j in range(i + 1, n))
    labels = np.zeros(n, dtype=np.int8)
    labels[n // 2 :] = 1
    return Graph(n=n, edges=edges, labels=labels)


def fig1_params(which: str, n: int = 1000, seed: int = 1) -> SbmParams:
    logsq = math.log(n) ** 2 / n
    if which == "right":
        return SbmParams(n=n, p=3 * logsq, q=logsq, seed=seed)
    return SbmParams(n=n, p=logsq, q=logsq, seed=seed)


def resolve_graph(args) -> Tuple[Graph, DegreeStats, Optional[SbmParams]]:
    """Graph + stats from --preset, --input, or raw --n/--p/--q/--seed."""
    preset = getattr(args, "preset", None)
    if preset:
        if preset == "k3":
            g = _complete_graph(3)
            return g, DegreeStats(alpha=2.0, beta=None, gamma=1.0), None
        if preset == "k4":
            g = _complete_graph(4)
            return g, DegreeStats(alpha=3.0, beta=None, gamma=2.0), None
        if preset.startswith("regular:"):
            d, n = map(int, preset.split(":", 1)[1].split(","))
            g = _regular_graph(d, n)
            return g, DegreeStats(alpha=float(d), beta=None, gamma=float(d) - 1), None
        if preset in ("fig1-left", "fig1-right"):
            params = fig1_params(preset.split("-")[1], seed=args.seed)
            g = sample_sbm(params)
            return g, expected_stats(params), params
        raise InvalidParameters(f"unknown preset {preset!r}")
    if getattr(args, "input", None):
        with open(args.input) as fh:
            g = read_edge_list(fh)
        mean_deg = float(g.degrees.mean())
        if mean_deg <= 1:
            raise InvalidParameters("graph too sparse for analysis (mean degree <= 1)")
        return g, DegreeStats(alpha=mean_deg, beta=None, gamma=mean_deg - 1), None
    if args.n is None or args.p is None or args.q is None:
        raise InvalidParameters("provide --preset, --input, or all of --n --p --q")
    params = SbmParams(n=args.n, p=args.p, q=args.q, seed=args.seed)
    return sample_sbm(params), expected_stats(params), params


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config_dict(args, params: Optional[SbmParams]) -> dict:
    doc = {
        "command": args.command,
        "seed": args.seed,
        "tau": getattr(args, "tau", None),
        "dense_cap": getattr(args, "dense_cap", None),
    }
    if params is not None:
        doc.update({"n": params.n, "p": params.p, "q": params.q, "seed": params.seed})
    if getattr(args, "preset", None):
        doc["preset"] = args.preset
    return doc


def cmd_sample(args) -> int:
    graph, stats, params = resolve_graph(args)
    out = _outdir(args)
    path = out / "graph.edgelist"
    with open(path, "w") as fh:
        write_edge_list(graph, fh, params)
    filled = degree_concentration(graph, stats)
    summary = {
        "config": _config_dict(args, params),
        "n": graph.n,
        "edges": graph.num_edges,
        "alpha": stats.alpha,
        "beta": stats.beta,
        "max_deviation": filled.max_deviation,
        "relative_deviation": filled.relative_deviation,
        "concentrated": filled.concentrated,
        "edge_list": str(path),
    }
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def _h_spectrum(graph: Graph) -> Spectrum:
    return eigs_general(operators.build_H(graph).matrix)


def cmd_spectrum(args) -> int:
    graph, stats, params = resolve_graph(args)
    out = _outdir(args)
    spec_h = _h_spectrum(graph)
    with open(out / "spectrum_H.csv", "w") as fh:
        spec_h.write_csv(fh)
    doc = {
        "config": _config_dict(args, params),
        "n": graph.n,
        "edges": graph.num_edges,
        "alpha": stats.alpha,
        "beta": stats.beta,
        "spectrum_H_csv": str(out / "spectrum_H.csv"),
        "dim_H": len(spec_h),
    }
    if 2 * graph.num_edges <= args.dense_cap:
        spec_b = eigs_general(operators.build_B(graph, dense_cap=args.dense_cap).matrix)
        with open(out / "spectrum_B.csv", "w") as fh:
            spec_b.write_csv(fh)
        doc["spectrum_B_csv"] = str(out / "spectrum_B.csv")
        doc["dim_B"] = len(spec_b)
        doc["trivial_multiplicity"] = graph.num_edges - graph.n
    print(json.dumps(doc, indent=2))
    return EXIT_OK


def cmd_classify(args) -> int:
    out = _outdir(args)

    def one(seed: int) -> dict:
        local = argparse.Namespace(**vars(args))
        local.seed = seed
        graph, stats, params = resolve_graph(local)
        if args.estimate:
            stats = analysis.estimate_stats(graph)
        spec = _h_spectrum(graph)
        report = analysis.classify_spectrum(spec, stats, tau=args.tau)
        if args.format == "svg" or args.svg:
            with open(out / f"spectrum_seed{seed}.svg", "w") as fh:
                analysis.write_spectrum_svg(spec, math.sqrt(stats.gamma), fh)
        return {
            "config": _config_dict(local, params),
            "classification": report.to_dict(),
        }

    seeds = list(range(args.seed, args.seed + args.seeds))
    if len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=_threads()) as pool:
            results = list(pool.map(one, seeds))
    else:
        results = [one(seeds[0])]
    doc = results[0] if len(results) == 1 else {"runs": results}
    text = json.dumps(doc, indent=2)
    (out / "classification.json").write_text(text + "\n")
    print(text)
    return EXIT_OK


def cmd_bound(args) -> int:
    graph, stats, params = resolve_graph(args)
    if args.pair == "H":
        l0 = qep.QepPair.from_linearization(operators.build_H0(graph, stats))
        l1 = qep.QepPair.from_linearization(operators.build_H(graph))
    else:
        l0 = qep.QepPair.from_linearization(operators.build_K0(graph, stats))
        l1 = qep.QepPair.from_linearization(operators.build_K(graph))
    report = qep.qep_bound(l0, l1)
    out = _outdir(args)
    text = report.to_json()
    (out / f"bound_{args.pair}.json").write_text(text + "\n")
    summary = {
        "config": _config_dict(args, params),
        "pair": args.pair,
        "kappa": report.kappa,
        "epsilon_global": report.epsilon_global,
        "all_within_bound": report.all_within_bound(),
        "report": str(out / f"bound_{args.pair}.json"),
    }
    print(json.dumps(summary, indent=2))
    return EXIT_OK if report.all_within_bound() else EXIT_VERIFY_FAIL


def _verify_suite(args) -> dict:
    rng = np.random.default_rng(args.seed)
    results = {}
    fault = args.fault_inject

    # small seeded Erdos-Renyi pool, conditioned on min degree >= 1
    graphs = []
    seed = args.seed
    while len(graphs) < 10:
        params = SbmParams(n=16, p=0.4, q=0.4, seed=seed)
        g = sample_sbm(params)
        seed += 1
        if g.min_degree() >= 1:
            graphs.append(g)

    # ihara-bass
    if 2 * max(g.num_edges for g in graphs) > args.dense_cap:
        results["ihara-bass"] = {"status": "skipped", "reason": "dense cap too low"}
    else:
        worst = 0.0
        ok = True
        for g in graphs:
            match, gap = analysis.ihara_bass_check(g, dense_cap=args.dense_cap)
            worst = max(worst, gap)
            ok = ok and match
        if fault:
            ok, worst = False, worst + 1.0
        results["ihara-bass"] = {"status": "pass" if ok else "fail", "max_gap": worst}

    # det-identity (log-space)
    ok = True
    worst = 0.0
    for g in graphs:
        h = operators.build_H(g).matrix
        sign, logdet = np.linalg.slogdet(h)
        if g.min_degree() >= 2:
            target = float(np.sum(np.log(g.degrees - 1.0)))
            rel = abs(logdet - target) / max(abs(target), 1.0)
            worst = max(worst, rel)
            ok = ok and rel <= 1e-6
        else:
            ok = ok and (sign == 0 or logdet < -6)
    results["det-identity"] = {"status": "pass" if ok else "fail", "max_rel": worst}

    # eigenvalue-one
    ok = True
    worst = 0.0
    for g in graphs:
        spec = _h_spectrum(g)
        gap = float(np.min(np.abs(spec.values - 1.0)))
        worst = max(worst, gap)
        ok = ok and gap <= 1e-8
    results["eigenvalue-one"] = {"status": "pass" if ok else "fail", "max_gap": worst}

    # reciprocity: Spec(K) vs 1/Spec(H)
    ok = True
    worst = 0.0
    for g in graphs:
        if g.min_degree() < 2:
            continue
        spec_h = _h_spectrum(g)
        spec_k = eigs_general(operators.build_K(g).matrix)
        m_ok, gap = match_spectra(spec_k.values, 1.0 / spec_h.values, tolerance=1e-6)
        worst = max(worst, gap)
        ok = ok and m_ok
    results["reciprocity"] = {"status": "pass" if ok else "fail", "max_gap": worst}

    # qep random trials
    violations = 0
    trials = 50
    for _ in range(trials):
        n = int(rng.integers(2, 13))
        a = rng.uniform(-1, 1, (n, n))
        a = (a + a.T) / 2
        c = rng.uniform(0.5, 2.0)
        e = rng.uniform(-1, 1, (n, n))
        e *= rng.uniform(0, 0.5) / max(qep.spectral_norm(e), 1e-12)
        l0 = qep.QepPair(a, c * np.eye(n))
        l1 = qep.QepPair(a, c * np.eye(n) + e)
        report = qep.qep_bound(l0, l1)
        if not report.all_within_bound():
            violations += 1
    results["qep-random-trials"] = {
        "status": "pass" if violations == 0 else "fail",
        "trials": trials,
        "violations": violations,
    }

    # semicircle KS at moderate scale
    params = fig1_params("right", n=800, seed=args.seed)
    g = sample_sbm(params)
    stats = expected_stats(params)
    spec_a = eigs_symmetric(g.adjacency())
    esd = analysis.semicircle_ks(spec_a, "A-spectrum", stats)
    ks_ok = esd.ks_distance <= 0.06
    results["semicircle-ks"] = {
        "status": "pass" if ks_ok else "fail",
        "ks_distance": esd.ks_distance,
    }
    return results


def cmd_verify(args) -> int:
    results = _verify_suite(args)
    all_pass = all(v["status"] in ("pass", "skipped") for v in results.values())
    doc = {"config": _config_dict(args, None), "results": results, "pass": all_pass}
    print(json.dumps(doc, indent=2))
    return EXIT_OK if all_pass else EXIT_VERIFY_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nbspec",
        description="Non-backtracking spectra of SBM graphs: operators, bounds, classification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--p", type=float, default=None)
        p.add_argument("--q", type=float, default=None)
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--preset", default=None,
                       help="fig1-left | fig1-right | k3 | k4 | regular:d,n")
        p.add_argument("--input", default=None, help="edge-list file to load")
        p.add_argument("--tau", type=float, default=0.25,
                       help="annulus half-width for classification")
        p.add_argument("--dense-cap", type=int, default=operators.DEFAULT_DENSE_CAP)
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", choices=("csv", "json", "svg"), default="json")

    p = sub.add_parser("sample", help="sample an SBM and write its edge list")
    common(p)

    p = sub.add_parser("spectrum", help="compute Spec(H) (and Spec(B) under the cap)")
    common(p)

    p = sub.add_parser("classify", help="classify the non-backtracking spectrum")
    common(p)
    p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
    p.add_argument("--svg", action="store_true", help="emit the spectrum scatter SVG")
    p.add_argument("--estimate", action="store_true",
                   help="estimate alpha/beta from the graph instead of the parameters")

    p = sub.add_parser("bound", help="QEP Bauer-Fike report for (H0,H) or (K0,K)")
    common(p)
    p.add_argument("--pair", choices=("H", "K"), default="H")

    p = sub.add_parser("verify", help="run the invariant verification suite")
    common(p)
    p.add_argument("--fault-inject", action="store_true",
                   help="force an ihara-bass failure (harness self-test)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_INPUT if exc.code not in (0, None) else EXIT_OK
    handlers = {
        "sample": cmd_sample,
        "spectrum": cmd_spectrum,
        "classify": cmd_classify,
        "bound": cmd_bound,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except (InvalidParameters, operators.DegreeTooSmallError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (EigenSolveError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

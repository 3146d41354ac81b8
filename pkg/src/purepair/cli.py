"""Command-line entry point: ``purepair <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import generators as gen
from .bigraph import Bigraph, dumps, format_rational, loads, parse_rational
from .coherence import coherence_threshold, is_coherent
from .containment import bicontains
from .experiments import SUITES, run_suite, survey_epsilon
from .parade import build_parade
from .reduction import PreconditionError, betterthm_pipeline, forestsymm_pipeline


def _jsonable(x):
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in x]
    return x


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _report(args: argparse.Namespace, body: dict, started: float) -> str:
    config = {k: v for k, v in vars(args).items() if k != "func"}
    payload = {
        "config": config,
        "version": __version__,
        "wall_time_s": round(time.perf_counter() - started, 6),
        **body,
    }
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"


def _read_graph(path: str) -> Bigraph:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return loads(text)


def _pattern(name_or_path: str) -> Bigraph:
    if name_or_path in gen.PATTERNS:
        return gen.pattern(name_or_path)
    return loads(Path(name_or_path).read_text())


# -- subcommands ----------------------------------------------------------------------


def cmd_gen(args: argparse.Namespace) -> int:
    graphs: list[Bigraph] = []
    if args.kind == "random":
        p = parse_rational(args.p)
        for i in range(args.trials):
            graphs.append(gen.random_bigraph(args.n1, args.n2, p, gen.instance_rng(args.seed, i)))
    elif args.kind == "exhaustive":
        graphs = list(gen.exhaustive(args.n1, args.n2))
    elif args.kind == "forest":
        for i in range(args.trials):
            graphs.append(gen.random_forest(args.n1, gen.py_rng(args.seed, i)))
    else:
        graphs = [gen.named(args.kind, args.n1, args.n2)]
    if args.format == "json":
        body = [{"n1": G.n1, "n2": G.n2, "edges": list(G.edges())} for G in graphs]
        _emit(json.dumps(body) + "\n", args.out)
    else:
        _emit("".join(dumps(G) for G in graphs), args.out)
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    G = _read_graph(args.graph)
    body: dict = {"n1": G.n1, "n2": G.n2, "edges": G.edge_count}
    if args.pattern:
        H = _pattern(args.pattern)
        emb = bicontains(G, H)
        body["contains"] = emb is not None
        if emb is not None:
            body["embedding"] = {"map1": emb.map1, "map2": emb.map2}
    if args.eps:
        rep = is_coherent(G, parse_rational(args.eps), budget=args.budget)
        body["coherence"] = {
            "verdict": rep.verdict,
            "exact": rep.exact,
            "degree_ok": [rep.degree_ok_1, rep.degree_ok_2],
            "witness": None if rep.witness is None else [rep.witness[0].sorted(), rep.witness[1].sorted()],
            "nodes": rep.nodes,
        }
    if args.threshold:
        th = coherence_threshold(G, budget=args.budget)
        body["threshold"] = {"coherent_iff_eps_above": th.value, "exact": th.exact,
                             "degree_parts": [th.degree_part_1, th.degree_part_2], "pair_part": th.pair_part}
    if args.pipeline != "none":
        if not args.pattern:
            raise SystemExit("--pipeline needs --pattern")
        H = _pattern(args.pattern)
        try:
            if args.pipeline == "forestsymm":
                pp = forestsymm_pipeline(G, H, parse_rational(args.pipeline_eps), budget=args.budget)
            else:
                pp = betterthm_pipeline(G, H, parse_rational(args.tau), budget=args.budget)
            body["pure_pair"] = {"kind": pp.kind, "z1": pp.z1.sorted(), "z2": pp.z2.sorted(),
                                 "fraction": pp.fraction, "exact": pp.exact, "details": pp.details}
        except PreconditionError as exc:
            body["pure_pair"] = {"error": str(exc)}
    _emit(_report(args, body, started), args.out)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    rep = run_suite(args.suite, args.seed, args.trials)
    body = {"suite": rep.suite, "passed": rep.passed, "failed": rep.failed, "counterexample": rep.counterexample}
    _emit(_report(args, body, started), args.out)
    return 0 if rep.ok else 1


def cmd_survey(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    if args.n1 * args.n2 > 20 and args.mode == "exhaustive":
        raise SystemExit("exhaustive survey refused above 20 cells; use --mode sampled")
    rows = survey_epsilon(args.pattern, args.n1, args.n2, args.mode, args.trials, args.seed)
    fmt = lambda x: "" if x is None else format_rational(x)  # noqa: E731
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n1", "n2", "H-id", "metric", "count", "min", "median"])
        for r in rows:
            w.writerow([r.n1, r.n2, r.h_id, r.metric, r.count, fmt(r.minimum), fmt(r.median)])
        _emit(buf.getvalue(), args.out)
    else:
        body = {"rows": [{"n1": r.n1, "n2": r.n2, "H-id": r.h_id, "metric": r.metric, "count": r.count,
                          "min": fmt(r.minimum), "median": fmt(r.median)} for r in rows]}
        _emit(_report(args, body, started), args.out)
    return 0


def cmd_parade_build(args: argparse.Namespace) -> int:
    G = _read_graph(args.graph)
    P = build_parade(G, args.K, args.policy, args.seed)
    if args.format == "json":
        _emit(json.dumps(P.to_json_dict(args.graph)) + "\n", args.out)
    else:
        _emit(P.dumps(args.graph), args.out)
    return 0


# -- parser -----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="purepair", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--budget", type=int, default=10**6, help="search-node budget")
    common.add_argument("--out", help="write output here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate bigraphs")
    g.add_argument("kind", choices=["random", "exhaustive", "forest", *gen.NAMED])
    g.add_argument("--n1", type=int, default=4)
    g.add_argument("--n2", type=int, default=4)
    g.add_argument("--p", default="1/2", help="edge probability as p/q")
    g.add_argument("--format", choices=["text", "json"], default="text")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", parents=[common], help="containment, coherence and pure pairs for one bigraph")
    c.add_argument("graph", help="bigraph file ('-' for stdin)")
    c.add_argument("--pattern", help="pattern name or bigraph file")
    c.add_argument("--eps", help="coherence parameter as p/q")
    c.add_argument("--threshold", action="store_true")
    c.add_argument("--pipeline", choices=["none", "forestsymm", "betterthm"], default="none")
    c.add_argument("--pipeline-eps", default="1/4")
    c.add_argument("--tau", default="1/2")
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("survey", parents=[common], help="empirical surveys")
    s.add_argument("what", choices=["epsilon"])
    s.add_argument("--pattern", default="p3")
    s.add_argument("--n1", type=int, default=4)
    s.add_argument("--n2", type=int, default=4)
    s.add_argument("--max-n", type=int, help="sets both --n1 and --n2")
    s.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.set_defaults(func=cmd_survey)

    p = sub.add_parser("parade-build", parents=[common], help="cut a bigraph into a parade")
    p.add_argument("graph")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--policy", choices=["contiguous", "random"], default="contiguous")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_parade_build)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "max_n", None):
        args.n1 = args.n2 = args.max_n
    try:
        return args.func(args)
    except (ValueError, PreconditionError) as exc:
        print(f"purepair: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

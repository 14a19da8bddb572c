"""Command-line experiment runner.

Every run writes its outputs and a ``manifest.json`` into ``--out``.  The
manifest records the resolved parameters and the SHA-256 of every output, so
``fkmixer --replay DIR/manifest.json --out OTHER`` reruns the experiment and
checks that the CSVs come out byte-identical.

Exit codes: 0 success, 2 invalid arguments, 3 validation failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import (GraphFamily, all_balls, bottleneck_escape, influence_decay_exact,
                          kr_sparse_check, mixing_scaling, planted_graph, shatter_stats)
from .dynamics import FkChain, PottsChain, sw_step
from .errors import InvalidInputError, RetryExhaustedError, TooLargeError
from .graphs import MultiGraph, read_degree_sequence, sample_configuration_model, sample_simple_graph
from .plotting import histogram_plot, line_plot
from .rc_core import BoundaryPartition, RcParams
from .rng import stream
from .thresholds import beta_u, decay_fit, p_u, regular_tree, regular_tree_phi
from .validation import SUITES, run_suite

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION = 0, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers


def _floats(text) -> list:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).split(",") if x.strip()]


def _ints(text) -> list:
    """``8,12,16`` or an inclusive range ``2-14``."""
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def _pairs(text) -> list:
    """``0-3,5-6`` -> [(0, 3), (5, 6)]."""
    out = []
    for part in str(text or "").split(","):
        if part.strip():
            a, b = part.split("-")
            out.append((int(a), int(b)))
    return out


def read_config(path) -> dict:
    """Flat ``key = value`` file; keys are flag names with or without dashes."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.lstrip("-").replace("-", "_")] = v
    return out


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("FKMIXER_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# output handling


class Outputs:
    """Collects files written by one run and serializes the manifest."""

    def __init__(self, out_dir):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []

    def path(self, name: str) -> Path:
        self.files.append(name)
        return self.dir / name

    def csv(self, name: str, header, rows, echo: bool = False) -> None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        self.path(name).write_text(buf.getvalue())
        if echo:
            sys.stdout.write(buf.getvalue())

    def json(self, name: str, obj) -> None:
        self.path(name).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")

    def digests(self) -> dict:
        return {f: hashlib.sha256((self.dir / f).read_bytes()).hexdigest() for f in sorted(set(self.files))}


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.10g}" if math.isfinite(x) else ("inf" if x > 0 else "nan")
    return str(x)


# ---------------------------------------------------------------------------
# shared parameter resolution


def _resolve_p(args, gamma_attr: str = "gamma") -> float:
    if args.p is not None and args.p_frac is not None:
        raise UsageError("give either --p or --p-frac, not both")
    if args.p_frac is not None:
        gamma = getattr(args, gamma_attr, None)
        if gamma is None:
            raise UsageError("--p-frac needs --gamma")
        return float(args.p_frac) * p_u(args.q, gamma)
    if args.p is None:
        raise UsageError("one of --p or --p-frac is required")
    return float(args.p)


def _graph_from_args(args) -> MultiGraph:
    if args.graph:
        return MultiGraph.read_edgelist(args.graph)
    if args.family is None:
        raise UsageError("give --graph FILE or --family")
    return _build_family_graph(args, (args.seed, "graph"))


def _build_family_graph(args, seed) -> MultiGraph:
    fam = args.family
    if fam == "er":
        return GraphFamily("er", args.gamma).sample(args.n, seed)
    if fam == "regular":
        return GraphFamily("regular", args.gamma).sample(args.n, seed)
    if fam == "single-edge":
        return MultiGraph(2, [(0, 1)])
    if fam == "planted":
        return planted_graph(args.n, args.base, args.d_star, seed)
    if fam == "config":
        if not args.degree_file:
            raise UsageError("--family config needs --degree-file")
        dn = read_degree_sequence(args.degree_file)
        return sample_simple_graph(dn, seed) if args.simple else sample_configuration_model(dn, seed)
    raise UsageError(f"unknown family {fam!r}")


def _boundary(args, n: int) -> BoundaryPartition:
    pairs = _pairs(getattr(args, "wire", None))
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise UsageError("--wire vertex out of range")
    return BoundaryPartition(n, pairs)


# ---------------------------------------------------------------------------
# subcommands


def cmd_threshold(args, out: Outputs) -> int:
    rows = []
    for q in _floats(args.q):
        for gamma in _floats(args.gamma):
            pu = p_u(q, gamma)
            rows.append([_fmt(q), _fmt(gamma), f"{pu:.{args.digits}f}",
                         f"{beta_u(q, gamma):.{args.digits}f}",
                         f"{RcParams(pu, q).phat:.{args.digits}f}"])
    out.csv("threshold.csv", ["q", "gamma", "p_u", "beta_u", "phat_at_pu"], rows, echo=True)
    qs = sorted({r[0] for r in rows})
    gammas = _floats(args.gamma)
    if len(gammas) > 1:
        for q in qs:
            pts = [(float(r[1]), float(r[2])) for r in rows if r[0] == q]
            line_plot(out.path(f"threshold_q{q}.svg"), [a for a, _ in pts], [b for _, b in pts],
                      "gamma", "p_u", title=f"q = {q}")
    return EXIT_OK


def cmd_gen_graph(args, out: Outputs) -> int:
    g = _graph_from_args(args)
    g.write_edgelist(out.path("graph.txt"))
    deg = g.degrees()
    out.csv("degrees.csv", ["vertex", "degree"], [[v, int(d)] for v, d in enumerate(deg)])
    summary = {"n": g.n, "m": g.m, "max_degree": int(deg.max()) if g.n else 0,
               "mean_degree": float(deg.mean()) if g.n else 0.0, "simple": g.is_simple()}
    out.json("graph_summary.json", summary)
    print(f"n={g.n} m={g.m} max_degree={summary['max_degree']}")
    return EXIT_OK


def cmd_sample_rc(args, out: Outputs) -> int:
    g = _graph_from_args(args)
    params = RcParams(_resolve_p(args), args.q)
    bc = _boundary(args, g.n)
    start = np.ones(g.m, dtype=bool) if args.start == "open" else np.zeros(g.m, dtype=bool)
    chain = FkChain(g, params, bc, start, backend=args.backend)
    traj = chain.run_continuous(args.t, (args.seed, "burn-in"), record=bool(args.trajectory))
    if traj is not None:
        traj.write_csv(out.path("trajectory.csv"))
    freq = np.zeros(g.m)
    for k in range(args.samples):
        chain.run_continuous(args.spacing, (args.seed, "sample", k))
        freq += chain.config
    freq /= max(args.samples, 1)
    out.csv("edge_marginals.csv", ["edge", "u", "v", "open_frequency"],
            [[e, int(a), int(b), _fmt(f)] for e, ((a, b), f) in enumerate(zip(g.edges.tolist(), freq))])
    out.csv("final_config.csv", ["edge", "open"], [[e, int(x)] for e, x in enumerate(chain.config)])
    print(f"p={params.p:.6g} q={params.q:g} phat={params.phat:.6g} mean open fraction={freq.mean() if g.m else 0:.6g}")
    return EXIT_OK


def cmd_sample_potts(args, out: Outputs) -> int:
    g = _graph_from_args(args)
    if args.beta is not None:
        beta = float(args.beta)
    else:
        beta = -math.log1p(-_resolve_p(args))
    sigma = stream(args.seed, "potts-start").integers(int(args.q), size=g.n)
    chain = PottsChain(g, beta, int(args.q), sigma)
    if args.method == "sw":
        for k in range(args.sweeps):
            sw_step(chain, (args.seed, "sw", k))
        agree = None
    else:
        steps = args.sweeps * g.n
        agree = chain.edge_agreements(steps, max(g.n, 1), (args.seed, "glauber"))
    out.csv("spins.csv", ["vertex", "spin"], [[v, int(s)] for v, s in enumerate(chain.spins)])
    if agree is not None:
        out.csv("edge_agreement.csv", ["edge", "u", "v", "agreement"],
                [[e, int(a), int(b), _fmt(x)] for e, ((a, b), x) in enumerate(zip(g.edges.tolist(), agree))])
    print(f"beta={beta:.6g} q={args.q} method={args.method}")
    return EXIT_OK


def cmd_couple(args, out: Outputs) -> int:
    params = RcParams(_resolve_p(args), args.q)
    fam = GraphFamily(args.family, args.gamma)
    rep = mixing_scaling(_ints(args.ns), fam, params, args.seeds, args.t_max, seed=args.seed,
                         threads=args.threads)
    out.csv("couple.csv", ["n", "median_coupling_time", "iqr"],
            [[r.n, _fmt(r.median), _fmt(r.iqr)] for r in rep.rows], echo=True)
    out.csv("couple_runs.csv", ["n", "seed_index", "coupling_time"],
            [[r.n, i, _fmt(t)] for r in rep.rows for i, t in enumerate(r.times)])
    out.json("couple_report.json", rep.to_dict())
    line_plot(out.path("couple.svg"), [r.n for r in rep.rows], [r.median for r in rep.rows],
              "n", "median coupling time", logx=True, err=[r.iqr / 2 for r in rep.rows],
              censored=[r.timeouts > 0 for r in rep.rows])
    if rep.fit is not None:
        print(f"slope vs log n = {rep.fit.slope:.4g}, R^2 = {rep.fit.r2:.4f}")
    return EXIT_OK


def cmd_shatter(args, out: Outputs) -> int:
    g = _build_family_graph(args, (args.seed, "graph"))
    params = RcParams(_resolve_p(args), args.q)
    rep = shatter_stats(g, params, args.t, args.seeds, seed=args.seed, keep_configs=True,
                        threads=args.threads)
    R = args.R if args.R is not None else int(math.floor(0.3 * math.log2(max(g.n, 2))))
    balls = all_balls(g, R)
    checks = [kr_sparse_check(g, w, args.K, R, balls) for w in rep.configs]
    out.csv("shatter.csv", ["seed_index", "max_cluster", "max_sparsity", "kr_sparse"],
            [[i, m, c.max_sparsity, int(c.ok)] for i, (m, c) in enumerate(zip(rep.max_cluster, checks))])
    header, rows = rep.histogram_table()
    out.csv("cluster_sizes.csv", header, rows)
    out.json("shatter_report.json", rep.to_dict() | {"K": args.K, "R": R})
    histogram_plot(out.path("cluster_sizes.svg"), [r[0] for r in rows], [r[1] for r in rows],
                   title=f"n = {g.n}, t = {args.t:g}")
    bound = g.n ** 0.5
    print(f"max cluster <= sqrt(n) in {rep.fraction_at_most(bound):.2%} of runs; "
          f"({args.K},{R})-sparse in {np.mean([c.ok for c in checks]):.2%}")
    return EXIT_OK


def cmd_tree_decay(args, out: Outputs) -> int:
    params = RcParams(_resolve_p(args), args.q)
    heights = _ints(args.heights)
    branching = int(round(args.gamma))
    phis = [(h, regular_tree_phi(branching, h, params)) for h in heights]
    fit = decay_fit(phis)
    out.csv("tree_decay.csv", ["height", "phi"], [[h, _fmt(ph)] for h, ph in phis], echo=True)
    out.json("tree_decay_fit.json", {"rate": fit.rate, "slope": fit.slope, "intercept": fit.intercept,
                                     "phat": params.phat, "p": params.p, "q": params.q,
                                     "branching": branching})
    line_plot(out.path("tree_decay.svg"), heights, [ph for _, ph in phis], "height", "phi",
              logy=True, title=f"rate {fit.rate:.4f}, phat {params.phat:.4f}")
    return EXIT_OK


def cmd_influence(args, out: Outputs) -> int:
    params = RcParams(_resolve_p(args), args.q)
    radii = _ints(args.radii)
    tree = regular_tree(args.branching, max(radii)).to_graph()
    rep = influence_decay_exact(tree, 0, radii, params, K=args.K)
    header, rows = rep.table()
    out.csv("influence.csv", header, [[r, _fmt(tv), k] for r, tv, k in rows], echo=True)
    out.json("influence_report.json", rep.to_dict())
    line_plot(out.path("influence.svg"), radii, rep.max_tv, "radius", "max TV", logy=True)
    return EXIT_OK


def cmd_potts_bottleneck(args, out: Outputs) -> int:
    if args.beta is not None:
        beta = float(args.beta)
    else:
        beta = float(args.beta_frac) * beta_u(args.q, args.gamma)
    rows, runs, meds, cens = [], [], [], []
    d_stars = _ints(args.d_stars)
    for d in d_stars:
        g = planted_graph(args.n, args.base, d, (args.seed, "graph", d))
        rep = bottleneck_escape(g, beta, args.q, 0, args.eps, args.seeds, args.step_cap,
                                seed=(args.seed, "escape", d), exact=False, threads=args.threads)
        med = rep.median_sweeps()
        meds.append(med if med is not None else float(np.median(rep.sweeps)))
        cens.append(med is None)
        rows.append([d, rep.gap, _fmt(meds[-1]), _fmt(rep.uncensored_fraction)])
        runs.extend([d, i, s, int(c)] for i, (s, c) in enumerate(zip(rep.steps, rep.censored)))
    out.csv("bottleneck.csv", ["d_star", "gap", "median_sweeps", "uncensored_fraction"], rows, echo=True)
    out.csv("bottleneck_runs.csv", ["d_star", "seed_index", "steps", "censored"], runs)
    line_plot(out.path("bottleneck.svg"), d_stars, meds, "d_star", "median escape time (sweeps)",
              logy=True, censored=cens)
    return EXIT_OK


def cmd_validate(args, out: Outputs) -> int:
    results = run_suite(args.suite)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'}  {r.name}: {r.detail}")
    out.csv("validate.csv", ["check", "passed", "detail"], [[r.name, int(r.ok), r.detail] for r in results])
    return EXIT_OK if all(r.ok for r in results) else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# parser


def _graph_opts(p, family_default=None):
    p.add_argument("--graph", help="edge-list file (header 'n m', then 'u v' lines)")
    p.add_argument("--family", choices=["er", "regular", "planted", "config", "single-edge"],
                   default=family_default)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--gamma", type=float, default=2.0, help="growth rate (ER mean degree, regular degree - 1)")
    p.add_argument("--base", type=int, default=3, help="base degree for --family planted")
    p.add_argument("--d-star", type=int, default=10, help="planted degree for --family planted")
    p.add_argument("--degree-file", help="one degree per line, for --family config")
    p.add_argument("--simple", action="store_true", help="condition the configuration model on simplicity")


def _rc_opts(p, q_type=float):
    p.add_argument("--p", type=float)
    p.add_argument("--p-frac", type=float, help="set p = x * p_u(q, gamma)")
    p.add_argument("--q", type=q_type, default=q_type(2))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fkmixer",
        description="Random-cluster (FK) Glauber dynamics experiments on random graphs.",
        epilog="Exit codes: 0 success, 2 invalid arguments, 3 validation failure.")
    parser.add_argument("--version", action="version", version=f"fkmixer {__version__}")
    parser.add_argument("--replay", metavar="MANIFEST", help="rerun a manifest and compare output digests")
    parser.add_argument("--out", help="output directory when replaying")
    sub = parser.add_subparsers(dest="command")

    def add(name, fn, help_, csv_doc):
        p = sub.add_parser(name, help=help_, description=f"{help_}\n\nCSV: {csv_doc}",
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--seed", type=int, default=0, help="master seed (all randomness derives from it)")
        p.add_argument("--out", default=f"fkmixer-{name}", help="output directory")
        p.add_argument("--config", help="flat key = value file; flags override it")
        p.add_argument("--threads", type=int, default=_default_threads(),
                       help="worker threads for replicas (default $FKMIXER_THREADS or 1)")
        p.set_defaults(func=fn)
        return p

    p = add("threshold", cmd_threshold, "uniqueness threshold p_u(q, gamma)",
            "threshold.csv q,gamma,p_u,beta_u,phat_at_pu")
    p.add_argument("--q", default="2", help="q value or comma list")
    p.add_argument("--gamma", default="2", help="gamma value or comma list")
    p.add_argument("--digits", type=int, default=6)

    p = add("gen-graph", cmd_gen_graph, "sample a random graph",
            "degrees.csv vertex,degree; graph.txt edge list")
    _graph_opts(p, "er")

    p = add("sample-rc", cmd_sample_rc, "run FK dynamics and estimate edge marginals",
            "edge_marginals.csv edge,u,v,open_frequency; trajectory.csv event_time,edge,new_state")
    _graph_opts(p)
    _rc_opts(p)
    p.add_argument("--wire", help="boundary pairs to identify, e.g. 0-3,5-6")
    p.add_argument("--t", type=float, default=100.0, help="burn-in time")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--spacing", type=float, default=1.0)
    p.add_argument("--start", choices=["open", "closed"], default="open")
    p.add_argument("--backend", choices=["search", "hdt", "naive"], default="search")
    p.add_argument("--trajectory", action="store_true", help="dump every burn-in event")

    p = add("sample-potts", cmd_sample_potts, "run Potts Glauber or Swendsen-Wang",
            "spins.csv vertex,spin; edge_agreement.csv edge,u,v,agreement")
    _graph_opts(p)
    _rc_opts(p, q_type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--sweeps", type=int, default=100)
    p.add_argument("--method", choices=["glauber", "sw"], default="glauber")

    p = add("couple", cmd_couple, "grand-coupling times across n",
            "couple.csv n,median_coupling_time,iqr")
    p.add_argument("--family", choices=["er", "regular", "single-edge"], default="er")
    p.add_argument("--gamma", type=float, default=2.0)
    _rc_opts(p)
    p.add_argument("--ns", default="512,1024,2048")
    p.add_argument("--seeds", type=int, default=32)
    p.add_argument("--t-max", type=float, default=1e4)

    p = add("shatter", cmd_shatter, "cluster sizes and sparse boundaries of X^1_t",
            "shatter.csv seed_index,max_cluster,max_sparsity,kr_sparse; cluster_sizes.csv size,count")
    _graph_opts(p, "er")
    _rc_opts(p)
    p.set_defaults(n=4096)
    p.add_argument("--t", type=float, default=50.0)
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--K", type=int, default=8)
    p.add_argument("--R", type=int, help="ball radius (default floor(0.3 log2 n))")

    p = add("tree-decay", cmd_tree_decay, "root-to-boundary connectivity on regular trees",
            "tree_decay.csv height,phi")
    p.add_argument("--gamma", type=float, default=2.0, help="branching number")
    _rc_opts(p)
    p.add_argument("--heights", default="2-14")

    p = add("influence", cmd_influence, "exact boundary influence on the root edges of tree balls",
            "influence.csv radius,max_tv,pairs")
    p.add_argument("--branching", type=int, default=2)
    p.add_argument("--gamma", type=float, default=2.0, help="gamma used by --p-frac")
    _rc_opts(p)
    p.add_argument("--radii", default="1,2,3")
    p.add_argument("--K", type=int, default=4)

    p = add("potts-bottleneck", cmd_potts_bottleneck, "Potts Glauber escape times from the bottleneck set",
            "bottleneck.csv d_star,gap,median_sweeps,uncensored_fraction")
    p.add_argument("--n", type=int, default=101)
    p.add_argument("--base", type=int, default=3)
    p.add_argument("--d-stars", default="8,12,16,20,24")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--gamma", type=float, default=2.1)
    p.add_argument("--beta", type=float)
    p.add_argument("--beta-frac", type=float, default=0.8, help="beta = x * beta_u(q, gamma)")
    p.add_argument("--eps", type=float, default=0.25, help="bottleneck_eps")
    p.add_argument("--seeds", type=int, default=32)
    p.add_argument("--step-cap", type=int, default=10**8)

    p = add("validate", cmd_validate, "exact-oracle validation suite", "validate.csv check,passed,detail")
    p.add_argument("--suite", choices=sorted(SUITES), default="small-oracles")
    return parser


def _apply_config(parser, argv):
    """Parse argv with config-file values installed as subcommand defaults."""
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        conf = read_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(conf) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        sub.set_defaults(**conf)
        args = parser.parse_args(argv)
    return args


def _params(args) -> dict:
    skip = {"func", "config", "replay", "threads"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def execute(args) -> int:
    out = Outputs(args.out)
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    code = args.func(args, out)
    manifest = {
        "subcommand": args.command,
        "params": _params(args),
        "seed": args.seed,
        "version": __version__,
        "started": started,
        "finished": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "exit_code": code,
        "outputs": out.digests(),
    }
    (out.dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return code


def replay(manifest_path, out_dir) -> int:
    man = json.loads(Path(manifest_path).read_text())
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices[man["subcommand"]]
    args = sub.parse_args([])
    for k, v in man["params"].items():
        setattr(args, k, v)
    args.command = man["subcommand"]
    args.threads = _default_threads()
    args.config = None
    if out_dir:
        args.out = out_dir
    code = execute(args)
    new = json.loads((Path(args.out) / "manifest.json").read_text())["outputs"]
    bad = [f for f, h in man["outputs"].items() if f.endswith(".csv") and new.get(f) != h]
    for f in bad:
        print(f"replay mismatch: {f}", file=sys.stderr)
    if bad:
        return EXIT_VALIDATION
    print(f"replay reproduced {sum(f.endswith('.csv') for f in man['outputs'])} CSV files")
    return code


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        if args.replay:
            if args.command:
                raise UsageError("--replay takes no subcommand")
            return replay(args.replay, args.out)
        if not args.command:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        return execute(args)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    except (UsageError, InvalidInputError, TooLargeError, RetryExhaustedError,
            FileNotFoundError, ValueError) as e:
        print(f"fkmixer: error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Command-line entry point: ``socialsense <subcommand> ...``.

Subcommands ``diffuse``, ``sample``, ``learn``, ``incest``, ``rp`` and ``arx``
write CSV or JSON to ``--output`` (stdout by default).  A ``--config`` JSON
object supplies the same options by their long names (dashes become
underscores); keys are validated by the same parser, and flags given on the
command line win.

Exit status is 0 on success, 1 on a domain error (a JSON error object is
written to stderr) and 2 on a usage error or a malformed input file.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import diffusion, incest, lp, network, revealed_prefs, sampling, social_learning, timeseries

FIXTURES_ENV = "SOCIALSENSE_FIXTURES"
PACKAGE_FIXTURES = Path(__file__).resolve().parent / "fixtures"

COMMON = ("command", "verb", "mode", "config", "output", "format", "quiet")

PRESETS = {
    "diffuse": {
        "paper-example": {
            "generator": "powerlaw",
            "nodes": 100,
            "gamma": 2.5,
            "max_degree": 17,
            "min_degree": 2,
            "kernel": "adoption",
            "thresholds": [1.0, 10.0],
            "p_forget": 0.3,
            "switches": [200, 500],
            "states": [0, 1, 0],
            "steps": 700,
            "initial_fraction": 0.05,
        }
    },
    "learn": {"fitted": {"B": social_learning.FITTED_B, "c": social_learning.FITTED_COSTS}},
    "incest": {"fitted": {"B": social_learning.FITTED_B, "c": social_learning.FITTED_COSTS}},
    "arx": {name: dict(cfg) for name, cfg in timeseries.PRESETS.items()},
}


class UsageError(Exception):
    """Bad flags, bad config or an unreadable input file (exit 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ------------------------------------------------------------ value parsing
def _floats(text) -> list:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(";", ",").split(",") if v.strip()]


def _ints(text) -> list:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in str(text).split(",") if v.strip()]


def _points(text) -> list:
    """``"1,2;3,4"`` to ``[[1, 2], [3, 4]]``."""
    return [[float(v) for v in row.split(",")] for row in str(text).split(";") if row.strip()]


def _matrix(text):
    try:
        value = json.loads(text) if isinstance(text, str) else text
        return np.asarray(value, dtype=float)
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(f"not a JSON number array: {text!r}") from None


def _seed_range(text) -> list:
    lo, sep, hi = str(text).partition("..")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}")
    lo, hi = int(lo), int(hi)
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty seed range {text!r}")
    return list(range(lo, hi + 1))


def child_seed(seed: int, *keys: int) -> int:
    """Deterministic child stream seed for one part of a run."""
    return int(np.random.SeedSequence([int(seed), *keys]).generate_state(1)[0])


# --------------------------------------------------------------- formatting
def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.12g" % v
    return str(v)


def clean(obj):
    """JSON-ready copy with floats rounded to 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float("%.12g" % obj) if np.isfinite(obj) else None
    return obj


class Table:
    def __init__(self, columns: Sequence[str], rows: Optional[list] = None):
        self.columns = list(columns)
        self.rows = [] if rows is None else rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([fmt(v) for v in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"columns": self.columns, "rows": self.rows}


class Result:
    """What a subcommand produced: a table for CSV, a document for JSON."""

    def __init__(self, table: Optional[Table] = None, doc: Optional[dict] = None, notes: Optional[list] = None):
        self.table = table
        self.doc = doc
        self.notes = notes or []

    def render(self, form: str) -> str:
        if form == "csv":
            if self.table is None:
                raise UsageError("this command has no CSV form; use --format json")
            return self.table.to_csv()
        doc = dict(self.doc or {})
        if self.table is not None:
            doc.update(self.table.to_dict())
        return json.dumps(clean(doc), indent=1) + "\n"


# ------------------------------------------------------------------- inputs
def resolve_input(path: str) -> Path:
    """Find an input file; ``fixtures/NAME`` falls back to the fixture directory.

    The fixture directory is ``$SOCIALSENSE_FIXTURES`` when set, else the one
    shipped with the package.
    """
    p = Path(path)
    if p.exists():
        return p
    parts = p.parts
    if parts and parts[0] == "fixtures":
        root = Path(os.environ.get(FIXTURES_ENV) or PACKAGE_FIXTURES)
        q = root.joinpath(*parts[1:])
        if q.exists():
            return q
    raise UsageError(f"{path}: no such file")


def load(reader, path: str, *args):
    """Run a file reader, turning every failure into a usage error."""
    p = resolve_input(path)
    try:
        text = p.read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"{path}: {exc}") from None
    if not text.strip():
        raise UsageError(f"{path}: empty file")
    try:
        return reader(p, *args)
    except (ValueError, OSError) as exc:
        raise UsageError(str(exc)) from None


# ------------------------------------------------------------------ diffuse
def _widen(kernel: diffusion.TransitionKernel, n_states: int) -> diffusion.TransitionKernel:
    if kernel.n_states >= n_states:
        return kernel
    if kernel.n_states != 1:
        raise diffusion.DiffusionError(f"kernel has {kernel.n_states} target states, schedule needs {n_states}")
    return diffusion.TransitionKernel(np.repeat(kernel.p01, n_states, 0), np.repeat(kernel.p10, n_states, 0))


def _graph(args, seed: int) -> network.Graph:
    if args.graph:
        return load(network.read_edge_list, args.graph)
    if args.generator == "powerlaw":
        spec = network.PowerLaw(args.nodes, args.gamma, args.max_degree, min_degree=args.min_degree)
    elif args.generator == "er":
        if args.edge_prob is None:
            raise UsageError("--generator er needs --edge-prob")
        spec = network.ErdosRenyi(args.nodes, args.edge_prob, args.max_degree)
    else:
        if not args.degrees:
            raise UsageError("--generator configuration needs --degrees")
        pmf = np.zeros(max(args.degrees) + 1)
        for d in args.degrees:
            pmf[d] += 1.0
        spec = network.Configuration(args.nodes, tuple(pmf / pmf.sum()), args.max_degree)
    return network.generate_graph(spec, seed)


def _kernel(args, max_degree: int) -> diffusion.TransitionKernel:
    if args.kernel == "adoption":
        return diffusion.adoption_kernel(max_degree, args.thresholds, args.p_forget)
    if args.kernel == "linear":
        return diffusion.linear_kernel(max_degree, args.beta, args.p10)
    return diffusion.constant_kernel(max_degree, args.p01, args.p10)


def run_diffuse(args) -> Result:
    seeds = args.seeds or [args.seed]
    table = None
    notes = []
    for seed in seeds:
        graph = _graph(args, child_seed(seed, 0))
        kernel = _widen(_kernel(args, graph.max_degree), max(args.states) + 1)
        path = diffusion.switching_schedule(args.steps, args.switches, args.states)
        sim = diffusion.simulate_sis(graph, kernel, path, args.initial_fraction, args.steps, child_seed(seed, 1))
        mf = diffusion.run_mean_field(kernel, network.degree_distribution(graph), path, sim.rho[0], args.steps, graph.n_nodes)
        degs = [d for d in range(1, sim.class_sizes.size) if sim.class_sizes[d] > 0]
        cols = ["k", "s_k", "alpha_sim", "alpha_mf"] + [f"rho_sim_{d}" for d in degs] + [f"rho_mf_{d}" for d in degs]
        if args.seeds:
            cols.insert(0, "seed")
        if table is None:
            table = Table(cols)
        elif cols != table.columns:
            raise diffusion.DiffusionError("seeds produced graphs with different degree classes; pass --graph to fix the graph")
        for k in range(args.steps + 1):
            row = [k, int(path[k]), sim.alpha[k], mf.alpha[k]]
            row += [sim.rho[k, d] for d in degs] + [mf.rho_bar[k, d] for d in degs]
            table.rows.append(([seed] if args.seeds else []) + row)
        notes.append(f"seed {seed}: mean |alpha_sim - alpha_mf| = {np.mean(np.abs(sim.alpha - mf.alpha)):.4g}, mean-field clamps = {mf.clamps}")
    return Result(table, {"command": "diffuse", "seeds": seeds}, notes)


# ------------------------------------------------------------------- sample
SAMPLE_METHODS = ("census", "uniform", "social", "rds")


def run_sample(args) -> Result:
    graph = load(network.read_edge_list, args.graph)
    values = load(sampling.read_node_values, args.values, graph.n_nodes)
    Y = int(values.max()) + 1
    methods = args.method or list(SAMPLE_METHODS)
    for m in methods:
        if m not in SAMPLE_METHODS:
            raise UsageError(f"unknown method {m!r}; choose from {', '.join(SAMPLE_METHODS)}")
    seeds = args.seeds or [args.seed]
    cols = ["method", "degree", "sample_count"] + [f"p_{y}" for y in range(Y)] + ["tv_census"]
    if args.seeds:
        cols.insert(0, "seed")
    table = Table(cols)
    for seed in seeds:
        for i, m in enumerate(methods):
            if m == "census":
                size = graph.n_nodes if args.degree is None else int(np.sum(graph.degrees == args.degree))
                est = sampling.SentimentEstimate(sampling.census(graph, values, args.degree, Y), size, args.degree)
            elif m == "uniform":
                if args.degree is None:
                    raise UsageError("--method uniform needs --degree")
                est = sampling.uniform_sample(graph, values, args.degree, args.sample_size, child_seed(seed, i), Y)
            elif m == "social":
                est = sampling.social_sample(graph, values, args.sample_size, child_seed(seed, i), Y)
            else:
                walk = sampling.WalkConfig(args.walk_length, args.burn_in)
                within = args.degree if args.rds_within_degree else None
                est = sampling.rds_pmf(graph, values, walk, child_seed(seed, i), within, Y)
            ref = sampling.census(graph, values, est.degree, Y)
            row = [m, est.degree, est.sample_count, *est.pmf, network.total_variation(est.pmf, ref)]
            table.rows.append(([seed] if args.seeds else []) + row)
    return Result(table, {"command": "sample"})


# -------------------------------------------------------------------- learn
def _model(args):
    B = args.B if args.B is not None else social_learning.FITTED_B
    c = args.c if args.c is not None else social_learning.FITTED_COSTS
    return np.asarray(B, dtype=float), np.asarray(c, dtype=float), args.prior


def run_learn(args) -> Result:
    B, c, prior = _model(args)
    seeds = args.seeds or [args.seed]
    X = B.shape[0] if B.ndim == 2 else 0
    cols = ["k", "y_k", "a_k"] + [f"pi_k_{x}" for x in range(X)]
    if args.seeds:
        cols.insert(0, "seed")
    table = Table(cols)
    cascades = {}
    for seed in seeds:
        run = social_learning.run_protocol(args.true_state, B, c, args.horizon, child_seed(seed, 0), prior)
        cascades[seed] = run.cascade_time
        for k in range(args.horizon):
            row = [k, run.observations[k], run.actions[k], *run.public_beliefs[k]]
            table.rows.append(([seed] if args.seeds else []) + row)
    if args.seeds:
        doc = {"command": "learn", "cascade_time": {str(s): t for s, t in cascades.items()}}
    else:
        doc = {"command": "learn", "cascade_time": cascades[args.seed]}
    notes = [f"seed {s}: cascade_time = {t}" for s, t in cascades.items()]
    return Result(table, doc, notes)


# ------------------------------------------------------------------- incest
def _dag(args) -> incest.FlowDag:
    if args.dag and args.fixture:
        raise UsageError("give --dag or --fixture, not both")
    if args.dag:
        return load(incest.load_dag, args.dag)
    return incest.FIXTURES[args.fixture or "seven_node"]()


def run_incest(args) -> Result:
    dag = _dag(args)
    nodes = [args.node] if args.node is not None else list(range(dag.n_nodes))
    for n in nodes:
        if not 0 <= n < dag.n_nodes:
            raise UsageError(f"--node {n} outside 0..{dag.n_nodes - 1}")
    if args.mode == "weights":
        T = incest.closure(dag)
        table = Table(["node", "m", "w", "in_H", "in_F"])
        for n in nodes:
            w = incest.incest_weights(dag, n, T=T)
            for m in range(n):
                table.rows.append([n, m, w[m], bool(dag.adjacency[m, n]), bool(T[m, n])])
        return Result(table, {"command": "incest", "mode": "weights"})
    if args.mode == "achievable":
        T = incest.closure(dag)
        table = Table(["node", "achievable", "witness"])
        for n in nodes:
            ok, bad = incest.achievable(dag, n, T=T)
            table.rows.append([n, ok, " ".join(str(int(j)) for j in bad)])
        return Result(table, {"command": "incest", "mode": "achievable"})
    B, c, prior = _model(args)
    run = incest.simulate_reputation(dag, B, c, args.true_state, args.fusion, child_seed(args.seed, 0), prior, not args.admin)
    X = run.public_beliefs.shape[1]
    cols = ["node", "agent", "epoch", "y", "a"] + [f"prior_{x}" for x in range(X)] + [f"public_{x}" for x in range(X)]
    table = Table(cols)
    for n in nodes:
        table.rows.append([n, dag.agents[n], dag.epochs[n], run.observations[n], run.actions[n], *run.prior_beliefs[n], *run.public_beliefs[n]])
    return Result(table, {"command": "incest", "mode": "simulate", "fusion": args.fusion})


# ----------------------------------------------------------------------- rp
def _single(args, data: revealed_prefs.MultiAgentDataset) -> revealed_prefs.ConsumerDataset:
    if args.agent is None:
        if data.n_agents > 1:
            raise UsageError(f"the dataset has {data.n_agents} agents; choose one with --agent")
        return data.agent(0)
    if not 0 <= args.agent < data.n_agents:
        raise UsageError(f"--agent {args.agent} outside 0..{data.n_agents - 1}")
    return data.agent(args.agent)


def _nash(args, data):
    cert = revealed_prefs.nash_rationality_test(data, args.lambda_floor, precheck=not args.no_precheck)
    doc = {"verdict": "pass" if cert.feasible else "fail"}
    if cert.feasible:
        doc["certificate"] = {"potentials": cert.potentials, "multipliers": cert.multipliers}
        doc["max_violation"] = revealed_prefs.certificate_violation(cert, data)
    else:
        doc["witness"] = cert.witness
    return cert, doc


def _require(cert, doc):
    if not cert.feasible:
        raise revealed_prefs.RevealedPreferenceError("the data are not rationalizable: " + json.dumps(clean(doc.get("witness"))))


def run_rp(args) -> Result:
    data = load(revealed_prefs.read_dataset, args.input)
    doc = {"command": "rp", "verb": args.verb, "n_obs": data.n_obs, "n_goods": data.n_goods, "n_agents": data.n_agents}
    table = None
    if args.verb == "garp":
        res = revealed_prefs.garp_check(_single(args, data))
        doc["verdict"] = "pass" if res.passed else "fail"
        if not res.passed:
            doc["witness"] = {"cycle": res.cycle}
    elif args.verb == "afriat":
        single = _single(args, data)
        cert = revealed_prefs.afriat_feasible(single, args.lambda_floor)
        doc["verdict"] = "pass" if cert.feasible else "fail"
        if cert.feasible:
            doc["certificate"] = {"utilities": cert.utilities, "multipliers": cert.multipliers}
            doc["max_violation"] = revealed_prefs.certificate_violation(cert, single)
        else:
            doc["witness"] = {"cycle": cert.witness, "farkas": cert.farkas}
    elif args.verb == "nash":
        _, out = _nash(args, data)
        doc.update(out)
    elif args.verb == "utility":
        single = _single(args, data)
        cert = revealed_prefs.afriat_feasible(single, args.lambda_floor)
        if not cert.feasible:
            raise revealed_prefs.RevealedPreferenceError("the data are not rationalizable: " + json.dumps({"cycle": cert.witness}))
        u = revealed_prefs.build_utility(cert, single)
        doc["verdict"] = "pass"
        doc["certificate"] = {"utilities": cert.utilities, "multipliers": cert.multipliers}
        doc["planes"] = {"levels": u.levels, "gradients": u.gradients, "anchors": u.anchors}
        points = args.points or u.anchors.tolist()
        for z in points:
            if len(z) != data.n_goods:
                raise UsageError(f"--points rows need {data.n_goods} entries")
        table = Table([f"x_{j + 1}" for j in range(data.n_goods)] + ["u"], [[*z, u(z)] for z in points])
    elif args.verb == "predict":
        if args.price is None or args.budgets is None:
            raise UsageError("predict needs --price and --budgets")
        cert, out = _nash(args, data)
        _require(cert, out)
        pred = revealed_prefs.predict_response(cert, data, args.price, args.budgets)
        doc.update(verdict="pass", responses=pred.responses, value=pred.value)
        table = Table(["agent"] + [f"x_{j + 1}" for j in range(data.n_goods)], [[i, *row] for i, row in enumerate(pred.responses)])
    else:
        if args.point is None:
            raise UsageError("mrs needs --point")
        cert, out = _nash(args, data)
        _require(cert, out)
        pot = revealed_prefs.build_potential(cert, data)
        if len(args.point) != data.n_agents * data.n_goods:
            raise UsageError(f"--point needs {data.n_agents * data.n_goods} entries (agents x goods)")
        agent = 0 if args.agent is None else args.agent
        goods = tuple(args.goods)
        if len(goods) != 2:
            raise UsageError("--goods takes two indices")
        res = revealed_prefs.marginal_rate_substitution(pot, args.point, agent, goods)
        doc.update(verdict="pass", mrs=res.value, smooth=res.smooth, active=res.active)
        table = Table(["agent", "good_j", "good_k", "mrs", "smooth"], [[agent, goods[0], goods[1], res.value, res.smooth]])
    return Result(table, doc)


# ---------------------------------------------------------------------- arx
def run_arx(args) -> Result:
    tau, rho = load(timeseries.read_series, args.input)
    scan = None
    delay = args.delay
    if args.scan_max_delay is not None:
        scan = timeseries.delay_scan(tau, rho, args.n_a, args.n_b, args.scan_max_delay, args.train_fraction, args.train_length)
        delay = scan.best_delay
    if args.train_length is not None:
        split = args.train_length
        if not 0 < split < tau.size:
            raise timeseries.ArxError(f"--train-length must lie in 1..{tau.size - 1}")
        model = timeseries.arx_fit(tau[:split], rho[:split], args.n_a, args.n_b, delay)
        pred = timeseries.arx_predict(model, tau, rho, start=split, free_run=args.free_run)
        start = split
    else:
        model = timeseries.arx_fit(tau, rho, args.n_a, args.n_b, delay)
        start = model.start
        pred = timeseries.arx_predict(model, tau, rho, start=start, free_run=args.free_run)
    ks = np.arange(start, start + pred.size)
    table = Table(["k", "tau", "tau_hat"], [[int(k), tau[k], p] for k, p in zip(ks, pred)])
    model_doc = model.to_dict()
    if scan is not None:
        model_doc["delay_scan"] = {"rmse": scan.rmse, "split": scan.split}
    model_doc["prediction_rmse"] = float(np.sqrt(np.mean((tau[ks] - pred) ** 2))) if pred.size else None
    if args.model_out:
        Path(args.model_out).write_text(json.dumps(clean(model_doc), indent=1) + "\n")
    return Result(table, {"command": "arx", "model": model_doc})


# ------------------------------------------------------------------- parser
def _common(p: argparse.ArgumentParser, default_format: str) -> None:
    g = p.add_argument_group("run options")
    g.add_argument("--config", help="JSON object of options for this subcommand")
    g.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    g.add_argument("--output", "-o", default="-", help="output file (default stdout)")
    g.add_argument("--format", choices=("csv", "json"), default=default_format)
    g.add_argument("--quiet", "-q", action="store_true", help="no summary lines on stderr")


def _model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=("fitted",), help="fitted observation model and costs (the default)")
    p.add_argument("--B", type=_matrix, help="observation model B[x][y] as JSON")
    p.add_argument("--c", type=_matrix, help="costs c[x][a] as JSON")
    p.add_argument("--prior", type=_matrix, help="prior pmf as JSON (uniform by default)")
    p.add_argument("--true-state", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="socialsense", description="Social sensing: diffusion, social learning, data incest, revealed preferences, ARX.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("diffuse", help="SIS diffusion on a graph with its mean-field approximation")
    p.add_argument("--preset", choices=tuple(PRESETS["diffuse"]))
    p.add_argument("--graph", help="edge list file (u v per line); generated when omitted")
    p.add_argument("--generator", choices=("powerlaw", "er", "configuration"), default="powerlaw")
    p.add_argument("--nodes", type=int, default=100)
    p.add_argument("--gamma", type=float, default=2.5)
    p.add_argument("--max-degree", type=int, default=17)
    p.add_argument("--min-degree", type=int, default=2)
    p.add_argument("--edge-prob", type=float)
    p.add_argument("--degrees", type=_ints, help="degrees drawn uniformly (configuration generator)")
    p.add_argument("--kernel", choices=("adoption", "constant", "linear"), default="adoption")
    p.add_argument("--thresholds", type=_floats, default=[1.0, 10.0], help="adoption threshold per target state")
    p.add_argument("--p-forget", type=float, default=0.3)
    p.add_argument("--p01", type=float, default=0.1)
    p.add_argument("--p10", type=float, default=0.3)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--switches", type=_ints, default=[200, 500], help="steps at which the target state changes")
    p.add_argument("--states", type=_ints, default=[0, 1, 0], help="target state in each segment")
    p.add_argument("--steps", type=int, default=700)
    p.add_argument("--initial-fraction", type=float, default=0.05)
    p.add_argument("--seeds", type=_seed_range, help="ensemble a..b (adds a seed column)")
    _common(p, "csv")

    p = sub.add_parser("sample", help="sentiment pmf by census, uniform, social or RDS sampling")
    p.add_argument("--graph", required=True, help="edge list file")
    p.add_argument("--values", required=True, help="node,value CSV")
    p.add_argument("--method", type=lambda s: s if isinstance(s, list) else s.split(","), help="comma list of census,uniform,social,rds")
    p.add_argument("--degree", type=int)
    p.add_argument("--sample-size", type=int, default=1000)
    p.add_argument("--walk-length", type=int, default=5000)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--rds-within-degree", action="store_true", help="walk only on the --degree subgraph (must be connected)")
    p.add_argument("--seeds", type=_seed_range)
    _common(p, "csv")

    p = sub.add_parser("learn", help="sequential social learning protocol")
    _model_flags(p)
    p.add_argument("--horizon", type=int, default=200)
    p.add_argument("--seeds", type=_seed_range)
    _common(p, "csv")

    p = sub.add_parser("incest", help="data-incest removal on an information-flow DAG")
    p.add_argument("mode", choices=("weights", "achievable", "simulate"))
    p.add_argument("--dag", help="DAG JSON file")
    p.add_argument("--fixture", choices=tuple(incest.FIXTURES))
    p.add_argument("--node", type=int, help="report one node only")
    _model_flags(p)
    p.add_argument("--fusion", choices=incest.MODES, default="fair")
    p.add_argument("--admin", action="store_true", help="fair rating from all earlier beliefs, even if not achievable")
    _common(p, "csv")

    p = sub.add_parser("rp", help="revealed-preference tests")
    p.add_argument("verb", choices=("garp", "afriat", "nash", "utility", "predict", "mrs"))
    p.add_argument("--input", required=True, help="CSV with header t,p_1..p_m,agent,x_1..x_m")
    p.add_argument("--agent", type=int)
    p.add_argument("--lambda-floor", type=float, default=revealed_prefs.LAMBDA_FLOOR)
    p.add_argument("--no-precheck", action="store_true", help="nash: skip the per-agent GARP check")
    p.add_argument("--points", type=_points, help="utility: points 'x1,x2;x1,x2'")
    p.add_argument("--price", type=_floats)
    p.add_argument("--budgets", type=_floats, help="predict: one budget per agent")
    p.add_argument("--point", type=_floats, help="mrs: stacked responses of all agents")
    p.add_argument("--goods", type=_ints, default=[0, 1])
    _common(p, "json")

    p = sub.add_parser("arx", help="fit and predict an ARX model")
    p.add_argument("--input", required=True, help="CSV with header k,tau,rho")
    p.add_argument("--preset", choices=tuple(PRESETS["arx"]))
    p.add_argument("--n-a", type=int, default=1)
    p.add_argument("--n-b", type=int, default=1)
    p.add_argument("--delay", type=int, default=0)
    p.add_argument("--scan-max-delay", type=int, help="choose the delay by holdout scan over 0..D")
    p.add_argument("--train-length", type=int, help="fit on k < L and predict the rest")
    p.add_argument("--train-fraction", type=float, default=0.75)
    p.add_argument("--free-run", action="store_true")
    p.add_argument("--model-out", help="also write the model JSON here")
    _common(p, "csv")
    return parser


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices.get(name)
    return None


def _tokens(sub: argparse.ArgumentParser, options: dict, origin: str) -> list:
    """Turn an options mapping into argv tokens for ``sub``."""
    by_dest = {a.dest: a for a in sub._actions if a.option_strings}
    out = []
    for key, value in options.items():
        action = by_dest.get(key)
        if action is None or key in COMMON:
            raise UsageError(f"{origin}: unknown key {key!r}")
        flag = action.option_strings[-1] if action.option_strings[-1].startswith("--") else action.option_strings[0]
        if isinstance(action, argparse._StoreTrueAction):
            if not isinstance(value, bool):
                raise UsageError(f"{origin}: {key!r} must be true or false")
            out += [flag] if value else []
        elif isinstance(value, bool) or value is None or isinstance(value, dict):
            raise UsageError(f"{origin}: bad value for {key!r}")
        elif isinstance(value, (list, tuple)):
            flat = json.dumps(value) if action.type is _matrix else ",".join(map(str, value))
            if action.type is _points:
                flat = ";".join(",".join(map(str, row)) for row in value)
            out += [flag, flat]
        else:
            out += [flag, str(value)]
    return out


def parse(argv: Sequence[str]) -> argparse.Namespace:
    """Parse argv with preset < config file < command line precedence."""
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = _subparser(parser, args.command)
    prefix = []
    preset = getattr(args, "preset", None)
    if preset and preset in PRESETS.get(args.command, {}):
        prefix += _tokens(sub, PRESETS[args.command][preset], f"preset {preset}")
    if args.config:
        try:
            config = json.loads(resolve_input(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.config}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        if not isinstance(config, dict):
            raise UsageError(f"{args.config}: expected a JSON object")
        if config.get("preset") and config["preset"] in PRESETS.get(args.command, {}) and not preset:
            prefix += _tokens(sub, PRESETS[args.command][config["preset"]], f"preset {config['preset']}")
        prefix += _tokens(sub, config, args.config)
    if not prefix:
        return args
    rest = list(argv)
    rest.remove(args.command)
    head = [args.command]
    # the verb or mode goes first so the inserted options cannot split it off
    positional = getattr(args, "verb", None) or getattr(args, "mode", None)
    if positional is not None:
        rest.remove(positional)
        head.append(positional)
    return parser.parse_args(head + prefix + rest)


RUNNERS = {"diffuse": run_diffuse, "sample": run_sample, "learn": run_learn, "incest": run_incest, "rp": run_rp, "arx": run_arx}


def _error(kind: str, exc: BaseException, code: int) -> int:
    err = {"kind": kind, "type": type(exc).__name__, "message": str(exc)}
    witness = getattr(exc, "witness", None)
    if witness:
        err["witness"] = witness
    sys.stderr.write(json.dumps({"error": clean(err)}) + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse(argv)
        result = RUNNERS[args.command](args)
        text = result.render(args.format)
    except UsageError as exc:
        return _error("usage", exc, 2)
    except (ValueError, lp.LPNumericalError, np.linalg.LinAlgError) as exc:
        return _error("domain", exc, 1)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    if not args.quiet:
        for line in result.notes:
            sys.stderr.write(line + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())

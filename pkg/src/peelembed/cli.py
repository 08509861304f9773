"""Command-line interface: validate, gen, solve-la, solve-hc, oracle, bench.

Exit codes: 0 ok, 1 invariant/assertion failure, 2 usage or parse error.
The bench subcommand emits a fixed-column CSV; wall times are only filled in
with --timing so that default output is byte-identical across runs.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import fields

from .errors import ConfigParse, PeelEmbedError
from .hc_dense import DenseHcConfig, solve_hc_dense
from .hc_peeling import HcPeelConfig, solve_hc
from .instances import GeneratorSpec, generate
from .la_dense import DenseLaConfig, solve_la_dense
from .la_peeling import LaPeelConfig, solve_la
from .metric import (
    Metric,
    format_metric,
    parse_metric,
    parse_point_cloud,
    subset_stats,
)
from .objectives import evaluate_hc, evaluate_la
from .oracles import (
    HC_ORACLE_MAX_N,
    LA_ORACLE_MAX_N,
    average_linkage_hc,
    brute_force_hc,
    brute_force_la,
    random_bisection_la,
)
from .partition_search import SearchBudget

CSV_COLUMNS = [
    "instance",
    "family",
    "n",
    "eps",
    "algorithm",
    "value",
    "oracle_value",
    "ratio",
    "depth",
    "cases",
    "wall_time",
]


def _load_metric(path: str, fmt: str) -> Metric:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if fmt == "matrix":
        return parse_metric(text)
    if fmt == "points":
        return parse_point_cloud(text)
    # auto: a matrix file starts with a bare count followed by n*n floats
    tokens = text.split()
    try:
        n = int(tokens[0])
        if len(tokens) == 1 + n * n:
            return parse_metric(text)
    except (ValueError, IndexError):
        pass
    return parse_point_cloud(text)


def _write_out(out: str, text: str) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_validate(args) -> int:
    m = _load_metric(args.input, args.format)
    stats = subset_stats(m, range(m.n))
    print(f"ok n={m.n} diameter={stats.diameter:g} weight={stats.weight_sum:g} "
          f"density={stats.density:g}")
    return 0


def _cmd_gen(args) -> int:
    known = {f.name for f in fields(GeneratorSpec)}
    params = {k: v for k, v in vars(args).items() if k in known and v is not None}
    spec = GeneratorSpec(**params)
    m = generate(spec)
    _write_out(args.out, format_metric(m))
    return 0


def _la_configs(args):
    budget = SearchBudget(restarts=args.budget_restarts)
    dense = DenseLaConfig(eps=args.eps, grid_mode=args.grid_mode, budget=budget)
    return dense, LaPeelConfig(eps=args.eps, dense=dense)


def _hc_configs(args):
    budget = SearchBudget(restarts=args.budget_restarts)
    dense = DenseHcConfig(eps=args.eps, grid_mode=args.grid_mode, budget=budget)
    return dense, HcPeelConfig(eps=args.eps, dense=dense)


def _cmd_solve_la(args) -> int:
    m = _load_metric(args.input, args.format)
    dense, peel = _la_configs(args)
    if args.dense_only:
        arr = solve_la_dense(m, dense, seed=args.seed)
        trace = None
    else:
        arr, trace = solve_la(m, peel, seed=args.seed)
    print(f"value {evaluate_la(m, arr):.12g}")
    print(f"arrangement {arr.serialize()}")
    if trace is not None:
        print(f"depth {trace.depth} cases {trace.case_sequence()}")
        if args.trace:
            _write_out(args.trace, trace.to_json_lines())
    return 0


def _cmd_solve_hc(args) -> int:
    m = _load_metric(args.input, args.format)
    dense, peel = _hc_configs(args)
    if args.dense_only:
        tree = solve_hc_dense(m, dense, seed=args.seed)
        trace = None
    else:
        tree, trace = solve_hc(m, peel, seed=args.seed)
    print(f"value {evaluate_hc(m, tree):.12g}")
    print(f"tree {tree.serialize()}")
    if trace is not None:
        print(f"depth {trace.depth} cases {trace.case_sequence()}")
        if args.trace:
            _write_out(args.trace, trace.to_json_lines())
    return 0


def _cmd_oracle(args) -> int:
    m = _load_metric(args.input, args.format)
    if args.objective == "la":
        res = brute_force_la(m)
        print(f"value {res.value:.12g}")
        print(f"arrangement {res.witness.serialize()}")
    else:
        res = brute_force_hc(m)
        print(f"value {res.value:.12g}")
        print(f"tree {res.witness.serialize()}")
    print(f"explored {res.explored}")
    return 0


def _bench_rows(config: dict, seed: int, timing: bool):
    eps_values = config.get("eps", [0.25])
    algorithms = config.get("algorithms", ["peel-la", "peel-hc"])
    budget = SearchBudget(restarts=int(config.get("restarts", 32)))
    for idx, inst in enumerate(config.get("instances", [])):
        inst = dict(inst)
        label = inst.pop("label", None)
        try:
            spec = GeneratorSpec(**inst)
        except TypeError as exc:
            raise ConfigParse(f"bad instance entry {idx}: {exc}") from None
        m = generate(spec)
        label = label or f"{spec.family}-n{spec.n}-s{spec.seed}"
        oracle_la = brute_force_la(m).value if m.n <= LA_ORACLE_MAX_N else None
        oracle_hc = brute_force_hc(m).value if m.n <= HC_ORACLE_MAX_N else None
        for algorithm in algorithms:
            eps_list = eps_values if algorithm.startswith(("peel", "dense")) else [None]
            for eps in eps_list:
                start = time.perf_counter()
                depth, cases = None, None
                if algorithm == "peel-la":
                    cfg = LaPeelConfig(eps=eps, dense=DenseLaConfig(eps=eps, budget=budget))
                    arr, trace = solve_la(m, cfg, seed=seed)
                    value, oracle = evaluate_la(m, arr), oracle_la
                    depth, cases = trace.depth, trace.case_sequence()
                elif algorithm == "peel-hc":
                    cfg = HcPeelConfig(eps=eps, dense=DenseHcConfig(eps=eps, budget=budget))
                    tree, trace = solve_hc(m, cfg, seed=seed)
                    value, oracle = evaluate_hc(m, tree), oracle_hc
                    depth, cases = trace.depth, trace.case_sequence()
                elif algorithm == "dense-la":
                    arr = solve_la_dense(m, DenseLaConfig(eps=eps, budget=budget), seed=seed)
                    value, oracle = evaluate_la(m, arr), oracle_la
                elif algorithm == "dense-hc":
                    tree = solve_hc_dense(m, DenseHcConfig(eps=eps, budget=budget), seed=seed)
                    value, oracle = evaluate_hc(m, tree), oracle_hc
                elif algorithm == "avg-link":
                    value, oracle = evaluate_hc(m, average_linkage_hc(m)), oracle_hc
                elif algorithm == "bisect-la":
                    arr = random_bisection_la(m, seed=seed)
                    value, oracle = evaluate_la(m, arr), oracle_la
                elif algorithm == "oracle-la":
                    value, oracle = oracle_la, oracle_la
                elif algorithm == "oracle-hc":
                    value, oracle = oracle_hc, oracle_hc
                else:
                    raise ConfigParse(f"unknown algorithm {algorithm!r}")
                elapsed = time.perf_counter() - start
                ratio = None if oracle in (None, 0.0) else value / oracle
                if ratio is not None and ratio > 1.0 + 1e-9:
                    raise AssertionError(
                        f"{algorithm} on {label}: value {value} above oracle {oracle}"
                    )
                yield {
                    "instance": label,
                    "family": spec.family,
                    "n": m.n,
                    "eps": "" if eps is None else f"{eps:g}",
                    "algorithm": algorithm,
                    "value": f"{value:.12g}",
                    "oracle_value": "" if oracle is None else f"{oracle:.12g}",
                    "ratio": "" if ratio is None else f"{ratio:.6f}",
                    "depth": "" if depth is None else depth,
                    "cases": "" if cases is None else cases,
                    "wall_time": f"{elapsed:.6f}" if timing else "",
                }


def run_bench(config: dict, seed: int = 0, timing: bool = False) -> str:
    """Render the sweep as CSV text (deterministic unless timing is on)."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in _bench_rows(config, seed, timing):
        writer.writerow(row)
    return buf.getvalue()


def _cmd_bench(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigParse(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(config, dict) or "instances" not in config:
        raise ConfigParse("config must be a JSON object with an 'instances' list")
    _write_out(args.out, run_bench(config, seed=args.seed, timing=args.timing))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="peelembed")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1,
                        help="accepted for interface stability; execution is sequential")
    parser.add_argument("--out", default="-")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(p):
        p.add_argument("--input", required=True)
        p.add_argument("--format", choices=["auto", "matrix", "points"], default="auto")

    p = sub.add_parser("validate")
    add_input(p)

    p = sub.add_parser("gen")
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int)
    p.add_argument("--m-clusters", dest="m_clusters", type=int)
    p.add_argument("--intra-scale", dest="intra_scale", type=float)
    p.add_argument("--inter-scale", dest="inter_scale", type=float)
    p.add_argument("--core-n", dest="core_n", type=int)
    p.add_argument("--outlier-n", dest="outlier_n", type=int)
    p.add_argument("--ratio", type=float)
    p.add_argument("--weight-ratio", dest="weight_ratio", type=float)

    for name in ("solve-la", "solve-hc"):
        p = sub.add_parser(name)
        add_input(p)
        p.add_argument("--eps", type=float, required=True)
        p.add_argument("--grid-mode", choices=["reduced", "faithful"], default="reduced")
        p.add_argument("--budget-restarts", type=int, default=32)
        p.add_argument("--dense-only", action="store_true")
        p.add_argument("--trace")

    p = sub.add_parser("oracle")
    add_input(p)
    p.add_argument("--objective", choices=["la", "hc"], required=True)

    p = sub.add_parser("bench")
    p.add_argument("--config", required=True)
    p.add_argument("--timing", action="store_true")
    return parser


_COMMANDS = {
    "validate": _cmd_validate,
    "gen": _cmd_gen,
    "solve-la": _cmd_solve_la,
    "solve-hc": _cmd_solve_hc,
    "oracle": _cmd_oracle,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigParse as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PeelEmbedError, AssertionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

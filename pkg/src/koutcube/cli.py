"""Command-line entry point: ``koutcube <subcommand> [flags]``.

Exit status is 0 on success, 2 on a usage error and 1 when a size cap
refuses the request. All output is deterministic for fixed flags.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from contextlib import contextmanager

from . import connectivity as conn
from . import experiments as ex
from .errors import BudgetError
from .hypercube import SubcubeSpec, iso_check
from .sampler import sample_kout, write_sample
from .seeding import Seed
from .structure import components
from .walk import WalkParams, bound_report, exact_distribution, simulate_walks

PROG = "koutcube"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker threads, overrides ${ex.THREADS_ENV}")
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="k-out random subgraphs of the hypercube")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        # a fresh parent each time: parents share Action objects, so set_defaults would leak
        return sub.add_parser(name, parents=[_common()], help=help_, description=help_)

    p = add("sample", "write one k-out sample in the binary dump format")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trial", type=int, default=0)

    p = add("components", "component statistics per trial")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--k", type=int, nargs="+", required=True)
    p.add_argument("--trials", type=int, default=1)

    p = add("cycles", "cycle census of 1-out samples")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--trials", type=int, default=1)

    p = add("kconn", "vertex connectivity of small samples")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--k", type=int, nargs="+", required=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--ceiling", type=int, default=None, help="stop counting at this value")

    p = add("cut-census", "components after deleting a vertex set, and the capped active set")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--L", type=_int_list, default=[], help="comma-separated vertices to delete")
    p.add_argument("--active-cap", type=int, default=None,
                   help=f"also compute the active set with this cap (at most {conn.MAX_ACTIVE_CAP})")

    p = add("subcube-scan", "components that are whole subcubes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--plant-free", type=_int_list, default=None,
                   help="plant a subcube component with these free coordinates")
    p.add_argument("--plant-ones", type=_int_list, default=[])

    p = add("walk", "exact law and tail checks of the biased walk")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--horizon", type=int, default=None, help="steps (default 2n^2)")
    p.add_argument("--dist", default=None, help="also write the per-step law as CSV here")
    p.add_argument("--mc-runs", type=int, default=0,
                   help="Monte Carlo runs estimating P(L_2l = 0) for l = 1..5")

    p = add("iso-check", "edge-isoperimetric inequality check")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=10_000)

    p = add("sweep", "connectivity rate against k")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k-min", type=int, default=1)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--trials", type=int, default=20)

    p = add("summarize", "group trial records into a CSV summary")
    p.add_argument("--in", dest="inp", default="-", help="JSONL records (default stdin)")
    p.set_defaults(format="csv")
    return parser


@contextmanager
def _text_out(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _emit_rows(rows: list[dict], fmt: str, path) -> None:
    with _text_out(path) as fh:
        if fmt == "csv":
            if rows:
                w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
                w.writeheader()
                w.writerows(rows)
        else:
            for row in rows:
                fh.write(_dump(row) + "\n")


def _emit_records(records, fmt: str, path) -> None:
    with _text_out(path) as fh:
        if fmt == "jsonl":
            ex.write_jsonl(records, fh)
            return
        w = None
        for rec in records:
            row = {"experiment": rec.experiment, "n": rec.n, "k": rec.k, "trial": rec.trial,
                   "seed": rec.seed, **rec.metrics}
            if w is None:
                w = csv.DictWriter(fh, fieldnames=list(row), lineterminator="\n")
                w.writeheader()
            w.writerow(row)


def _workers(args) -> int:
    if args.threads is None:
        return ex.default_workers()
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    return args.threads


def _check_nk(n: int, k: int) -> None:
    if not 1 <= n <= 30:
        raise UsageError(f"--n must lie in [1, 30], got {n}")
    if not 1 <= k <= n:
        raise UsageError(f"infeasible pair n={n}, k={k}: need 1 <= k <= n")


def _trials(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    return args.trials


def _spec_json(spec: SubcubeSpec) -> dict:
    return {"ones": sorted(spec.ones), "free": sorted(spec.free), "zeros": sorted(spec.zeros)}


def cmd_sample(args):
    _check_nk(args.n, args.k)
    sample = sample_kout(args.n, args.k, Seed(ex.trial_seed(args.seed, args.n, args.k, args.trial)))
    if args.out is None or args.out == "-":
        write_sample(sample, sys.stdout.buffer)
        sys.stdout.buffer.flush()
    else:
        with open(args.out, "wb") as fh:
            write_sample(sample, fh)


def _run_experiment(args, name, ns, ks, metrics, **extra):
    config = ex.ExperimentConfig(name, tuple(ns), tuple(ks), _trials(args), args.seed,
                                 metrics=metrics, workers=_workers(args), **extra)
    config.validate()
    _emit_records(ex.run(config), args.format, args.out)


def cmd_components(args):
    _run_experiment(args, "components", args.n, args.k, ex.DEFAULT_METRICS)


def cmd_cycles(args):
    metrics = ("component_count", "two_cycles", "longer_cycles", "max_tail")
    _run_experiment(args, "cycles", args.n, (1,), metrics)


def cmd_kconn(args):
    big = [n for n in args.n if (1 << n) > conn.MAX_FLOW_VERTICES]
    if big:
        raise BudgetError(f"kconn refuses n={big[0]}: 2**n exceeds the {conn.MAX_FLOW_VERTICES}-vertex cap")
    metrics = ("connected", "kappa", "degree_k_count")
    _run_experiment(args, "kconn", args.n, args.k, metrics, kconn_ceiling=args.ceiling)


def cmd_cut_census(args):
    _check_nk(args.n, args.k)
    if args.active_cap is not None and args.active_cap > conn.MAX_ACTIVE_CAP:
        raise BudgetError(f"active-set cap is limited to {conn.MAX_ACTIVE_CAP}")
    if (1 << args.n) > conn.MAX_FLOW_VERTICES and args.active_cap is not None:
        raise BudgetError(f"active-set search refuses n={args.n}: 2**n exceeds {conn.MAX_FLOW_VERTICES}")
    if any(not 0 <= v < (1 << args.n) for v in args.L):
        raise UsageError("--L vertices must lie in [0, 2**n)")
    rows = []
    for t in range(_trials(args)):
        seed = ex.trial_seed(args.seed, args.n, args.k, t)
        sample = sample_kout(args.n, args.k, Seed(seed))
        census = conn.minimal_disconnected_sets(sample, args.L)
        sizes = census.sizes
        row = {"trial": t, "seed": seed, "L": list(census.L), "num_sets": len(sizes),
               "smallest": min(sizes) if sizes else 0, "largest": max(sizes) if sizes else 0}
        if args.active_cap is not None:
            row["active"] = conn.active_set(sample, args.active_cap).size
        if args.format == "csv":
            row["L"] = " ".join(map(str, row["L"]))
        else:
            row["sizes"] = sorted(sizes, reverse=True)
        rows.append(row)
    _emit_rows(rows, args.format, args.out)


def cmd_subcube_scan(args):
    _check_nk(args.n, args.k)
    spec = None
    if args.plant_free is not None:
        try:
            spec = SubcubeSpec.from_sets(args.n, args.plant_free, args.plant_ones)
        except ValueError as err:
            raise UsageError(str(err))
        if spec.dim != args.k:
            raise UsageError(f"planted subcube needs {args.k} free coordinates, got {spec.dim}")
    rows = []
    for t in range(_trials(args)):
        seed = ex.trial_seed(args.seed, args.n, args.k, t)
        if spec is None:
            sample = sample_kout(args.n, args.k, Seed(seed))
        else:
            sample = conn.plant_subcube_component(args.n, args.k, spec, Seed(seed))
        found = conn.subcube_component_scan(sample)
        row = {"trial": t, "seed": seed, "connected": int(components(sample).count == 1),
               "subcube_hits": len(found)}
        if spec is not None:
            row["planted_found"] = int(spec in found)
        if args.format == "jsonl":
            row["specs"] = [_spec_json(s) for s in found]
        rows.append(row)
    _emit_rows(rows, args.format, args.out)


def cmd_walk(args):
    if args.n < 2:
        raise UsageError("--n must be at least 2 for the walk")
    dist = exact_distribution(WalkParams(args.n, args.horizon))
    if args.format == "csv":
        with _text_out(args.out) as fh:
            dist.write_csv(fh)
        return
    report = bound_report(args.n, dist)
    report["horizon"] = dist.params.horizon
    report["window"] = list(dist.window_covered)
    if args.mc_runs > 0:
        steps = min(10, dist.params.horizon)
        paths = simulate_walks(args.n, steps, args.mc_runs, Seed(args.seed))
        report["mc_runs"] = args.mc_runs
        report["mc_prob_zero"] = {str(t): float((paths[:, t] == 0).mean()) for t in range(2, steps + 1, 2)}
        report["dp_prob_zero"] = {str(t): dist.prob_zero(t) for t in range(2, steps + 1, 2)}
    with _text_out(args.out) as fh:
        fh.write(_dump(report) + "\n")
    if args.dist:
        with open(args.dist, "w", newline="", encoding="utf-8") as fh:
            dist.write_csv(fh)


def cmd_iso_check(args):
    if not 1 <= args.n <= 26:
        raise UsageError("--n must lie in [1, 26]")
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    _emit_rows([iso_check(args.n, args.samples, args.seed)], args.format, args.out)


def cmd_sweep(args):
    k_max = args.n if args.k_max is None else args.k_max
    _check_nk(args.n, args.k_min)
    _check_nk(args.n, k_max)
    result = ex.threshold_sweep(args.n, range(args.k_min, k_max + 1), _trials(args), args.seed,
                                workers=_workers(args))
    rows = [{"n": result.n, "k": p.k, "rate": p.rate, "wilson_lo": p.wilson_lo, "wilson_hi": p.wilson_hi,
             "trials": p.trials, "mean_components": p.mean_components,
             "k0": result.k0, "k1": result.k1} for p in result.points]
    _emit_rows(rows, args.format, args.out)


def cmd_summarize(args):
    if args.inp == "-":
        rows = ex.summarize(ex.read_jsonl(sys.stdin))
    else:
        try:
            with open(args.inp, encoding="utf-8") as fh:
                rows = ex.summarize(ex.read_jsonl(fh))
        except FileNotFoundError:
            raise UsageError(f"no such file: {args.inp}")
    with _text_out(args.out) as fh:
        if args.format == "jsonl":
            for r in rows:
                fh.write(_dump(dict(zip(ex.SUMMARY_HEADER, [r.n, r.k, r.metric, r.mean, r.std, r.wilson_lo,
                                                            r.wilson_hi, r.min, r.max, r.count]))) + "\n")
        else:
            ex.write_summary_csv(rows, fh)


COMMANDS = {
    "sample": cmd_sample,
    "components": cmd_components,
    "cycles": cmd_cycles,
    "kconn": cmd_kconn,
    "cut-census": cmd_cut_census,
    "subcube-scan": cmd_subcube_scan,
    "walk": cmd_walk,
    "iso-check": cmd_iso_check,
    "sweep": cmd_sweep,
    "summarize": cmd_summarize,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as err:
        print(f"{PROG}: error: {err}", file=sys.stderr)
        return 2
    except (ex.ConfigError, ValueError) as err:
        print(f"{PROG}: error: {err}", file=sys.stderr)
        return 2
    except BudgetError as err:
        print(f"{PROG}: refused: {err}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Exit codes: 0 success, 2 invalid config or arguments, 3 I/O error,
4 degenerate input.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

from .alignment import DEFAULT_REGIME_CONSTANTS, check_regime
from .errors import ConfigError, DegenerateInputError, DomainError, NetRecoveryError
from .graph import Permutation, permute, read_edgelist, write_edgelist, write_permutation
from .matching import cleanup_pair, match_degree_profiles
from .recovery import recover, write_average_csv
from .sampling import CorrParams, NoiseParams, derive_seed, edge_unbiased_alpha, make_rng, sample_er, sample_noisy
from .simharness import format_medians_csv, load_config, run_grid

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DEGENERATE = 4

log = logging.getLogger("netrecovery")


def _threshold_arg(text: str):
    if text == "auto":
        return "auto"
    try:
        w = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number in (0, 1) or 'auto', got {text!r}")
    if not 0 < w < 1:
        raise argparse.ArgumentTypeError(f"threshold must lie in (0, 1), got {w}")
    return w


def cmd_generate(args) -> int:
    n = args.n
    p = args.p if args.p is not None else math.log(n) ** 2 / n
    parent = sample_er(n, p, derive_seed(args.seed, 0))
    alpha = args.alpha if args.alpha is not None else edge_unbiased_alpha(parent, args.beta)
    noise = NoiseParams(alpha=alpha, beta=args.beta)
    os.makedirs(args.out_dir, exist_ok=True)
    write_edgelist(parent, os.path.join(args.out_dir, "parent.txt"))
    for i in range(args.m):
        sample = sample_noisy(parent, noise, derive_seed(args.seed, 1, i))
        if i == 0:
            truth = Permutation.identity(n)
        else:
            truth = Permutation.random(n, make_rng(derive_seed(args.seed, 2, i)))
        write_edgelist(permute(sample, truth.inverse()), os.path.join(args.out_dir, f"sample_{i}.txt"))
        write_permutation(truth, os.path.join(args.out_dir, f"truth_{i}.txt"))
    print(json.dumps({"n": n, "m": args.m, "p": p, "alpha": alpha, "beta": args.beta, "parent_edges": parent.num_edges}))
    return EXIT_OK


def cmd_match(args) -> int:
    g1, g2 = read_edgelist(args.g1), read_edgelist(args.g2)
    pi = match_degree_profiles(g1, g2)
    if args.cleanup:
        pi = cleanup_pair(g1, g2, pi, args.T)
    write_permutation(pi, args.out)
    return EXIT_OK


def cmd_recover(args) -> int:
    graphs = [read_edgelist(path) for path in args.graphs]
    result = recover(
        graphs,
        cleanup=not args.no_cleanup,
        seeds=args.seeds,
        T=args.T,
        w=args.threshold,
        seed=args.seed,
    )
    write_edgelist(result.estimate, args.out)
    if args.average:
        write_average_csv(result.average, args.average)
    print(json.dumps({"m": len(graphs), "threshold": result.threshold, "edges": result.estimate.num_edges}))
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    result = run_grid(config, workers=args.workers, csv_path=args.out)
    if args.summary:
        with open(args.summary, "w", encoding="utf-8", newline="") as fh:
            fh.write(format_medians_csv(result.medians))
    if args.plot:
        from .plotting import emit_plot

        emit_plot(result.medians, args.plot)
    sys.stdout.write(format_medians_csv(result.medians))
    return EXIT_OK


def cmd_check_regime(args) -> int:
    report = check_regime(args.n, CorrParams(q=args.q, s=args.s), (args.sigma0, args.L0, args.C0))
    print(
        json.dumps(
            {
                "sigma": report.sigma,
                "L": report.L,
                "constants": dict(zip(("sigma0", "L0", "C0"), report.constants)),
                "checks": report.checks,
                "all_pass": report.all_pass,
            },
            indent=2,
        )
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netrecovery", description="Recover a parent network from unlabeled noisy samples.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample a parent graph and m noisy, relabeled copies")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, default=2)
    g.add_argument("--p", type=float, help="parent density (default log^2(n)/n)")
    g.add_argument("--beta", type=float, required=True)
    g.add_argument("--alpha", type=float, help="type-I rate (default: edge-unbiased)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out-dir", required=True)
    g.set_defaults(func=cmd_generate)

    mt = sub.add_parser("match", help="match two edge-list graphs")
    mt.add_argument("g1")
    mt.add_argument("g2")
    mt.add_argument("--out", required=True, help="permutation file")
    mt.add_argument("--cleanup", action="store_true", help="refine with the cleanup iteration")
    mt.add_argument("--T", type=int)
    mt.set_defaults(func=cmd_match)

    r = sub.add_parser("recover", help="estimate the parent from m edge-list samples")
    r.add_argument("graphs", nargs="+")
    r.add_argument("--out", required=True, help="estimated edge list")
    r.add_argument("--average", help="write the aligned average as CSV")
    r.add_argument("--no-cleanup", action="store_true")
    r.add_argument("--seeds", action="store_true", help="pin high-degree seed pairs")
    r.add_argument("--T", type=int)
    r.add_argument("--threshold", type=_threshold_arg, default=0.5)
    r.add_argument("--seed", type=int, default=0, help="seed for cleanup pair draws")
    r.set_defaults(func=cmd_recover)

    s = sub.add_parser("simulate", help="run an experiment grid from a YAML config")
    s.add_argument("config")
    s.add_argument("--out", required=True, help="per-trial CSV")
    s.add_argument("--summary", help="per-point median CSV")
    s.add_argument("--plot", help="SVG figure")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("check-regime", help="evaluate the exact-recovery conditions")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--q", type=float, required=True)
    c.add_argument("--s", type=float, required=True)
    c.add_argument("--sigma0", type=float, default=DEFAULT_REGIME_CONSTANTS[0])
    c.add_argument("--L0", type=float, default=DEFAULT_REGIME_CONSTANTS[1])
    c.add_argument("--C0", type=float, default=DEFAULT_REGIME_CONSTANTS[2])
    c.set_defaults(func=cmd_check_regime)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DegenerateInputError, DomainError) as exc:
        print(f"error: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (NetRecoveryError, ValueError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

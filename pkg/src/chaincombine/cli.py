"""Batch command-line front end.

Three subcommands cover the pipeline:

* ``harness``  - simulate data, shard it, run one chain per shard plus a
  full-data chain, and write the bundle + manifests.
* ``combine``  - read a bundle manifest and write combined samples.
* ``metric``   - score combined samples against a full-data chain with
  per-parameter relative L2 distances.

Exit codes: 0 success, 1 usage error, 2 data/validation error,
3 numerical failure.  Errors are printed to stderr with an
``error: <Type>:`` prefix.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .combiners import (
    DpeConfig,
    consensus_covariance,
    consensus_independent,
    sample_average,
    semiparametric_dpe,
)
from .core import CombinedSamples, shuffle_within_machines, validate_bundle
from .density import density_pair, relative_l2_distance
from .errors import ChainCombineError, DimensionMismatch, NumericalError
from .harness import (
    MhConfig,
    partition_rows,
    sample_gamma_posterior,
    sample_logistic_posterior,
    simulate_gamma_data,
    simulate_logistic_data,
    split_logistic_rows,
)
from .io import FLOAT_FORMAT, read_bundle, read_samples, write_bundle, write_samples

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

METHODS = ("sample-avg", "consensus-indep", "consensus-cov", "semiparam-dpe")

# Generating coefficients for the logistic test problem.
LOGISTIC_BETA = (0.47, -1.70, 0.54, -0.90, 0.86)


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"error: UsageError: {message}\n")


def build_parser():
    parser = _Parser(
        prog="chaincombine",
        description="Combine subposterior MCMC samples from sharded data sets.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    combine = sub.add_parser(
        "combine", help="combine a bundle of subposterior samples"
    )
    combine.add_argument("--method", required=True, choices=METHODS)
    combine.add_argument("--bundle", required=True, help="bundle manifest path")
    combine.add_argument("--out", required=True, help="output matrix file (T x d)")
    combine.add_argument(
        "--shuff",
        action="store_true",
        help="randomly permute draws within each machine before combining",
    )
    combine.add_argument("--seed", type=int, default=0)
    combine.add_argument(
        "--bandw",
        default=None,
        help="comma-separated starting bandwidths (semiparam-dpe only)",
    )
    combine.add_argument(
        "--no-anneal",
        action="store_true",
        help="keep the bandwidth fixed instead of shrinking it per iteration",
    )
    combine.add_argument(
        "--discard",
        type=int,
        default=0,
        help="drop this many leading draws from the semiparam-dpe chain",
    )
    combine.set_defaults(func=run_combine)

    metric = sub.add_parser(
        "metric", help="score combined samples against a full-data chain"
    )
    metric.add_argument("--full", required=True, help="full-data samples (T x d)")
    metric.add_argument("--combined", required=True, help="combined samples (T x d)")
    metric.add_argument(
        "--density-out",
        default=None,
        help="write gridded density pairs per parameter next to this stem",
    )
    metric.set_defaults(func=run_metric)

    harness = sub.add_parser(
        "harness", help="simulate data, shard it and sample every shard"
    )
    harness.add_argument("--model", required=True, choices=("logistic", "gamma"))
    harness.add_argument("--n", type=int, default=20_000, help="observations to simulate")
    harness.add_argument("--shards", type=int, default=5, help="number of data shards M")
    harness.add_argument("--iters", type=int, default=10_000, help="retained draws T")
    harness.add_argument("--burnin", type=int, default=1_000)
    harness.add_argument(
        "--thin", type=int, default=1,
        help="Metropolis steps advanced per retained draw",
    )
    harness.add_argument("--seed", type=int, default=0)
    harness.add_argument("--alpha", type=float, default=4.0, help="Gamma shape (gamma model)")
    harness.add_argument("--beta", type=float, default=2.0, help="Gamma rate (gamma model)")
    harness.add_argument("--out-dir", required=True)
    harness.set_defaults(func=run_harness)

    return parser


def run_combine(args):
    """Read a bundle, combine it with the requested method, write T x d output."""
    bundle = read_bundle(args.bundle)
    if args.shuff:
        bundle = shuffle_within_machines(bundle, args.seed)
    if args.method == "semiparam-dpe":
        bandw = _parse_bandwidths(args.bandw)
        config = DpeConfig(bandw=bandw, anneal=not args.no_anneal, seed=args.seed)
        combined = semiparametric_dpe(bundle, config)
        if args.discard:
            if not 0 <= args.discard < combined.T:
                raise DimensionMismatch(
                    f"--discard must lie in [0, {combined.T}), got {args.discard}"
                )
            combined = CombinedSamples(combined.values[:, args.discard:])
    else:
        if args.discard:
            raise DimensionMismatch("--discard only applies to semiparam-dpe")
        combine = {
            "sample-avg": sample_average,
            "consensus-indep": consensus_independent,
            "consensus-cov": consensus_covariance,
        }[args.method]
        combined = combine(bundle)
    write_samples(args.out, combined)
    return EXIT_OK


def _parse_bandwidths(text):
    if text is None:
        return None
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise DimensionMismatch(f"--bandw must be comma-separated reals, got {text!r}")


def run_metric(args):
    """Print per-parameter relative L2 distances between two sample files."""
    full = read_samples(args.full)
    combined = read_samples(args.combined)
    if full.shape[0] != combined.shape[0]:
        raise DimensionMismatch(
            f"parameter count mismatch: full has {full.shape[0]}, "
            f"combined has {combined.shape[0]}"
        )
    print("parameter,relative_l2")
    for i in range(full.shape[0]):
        distance = relative_l2_distance(full[i], combined[i])
        print(f"{i + 1},{distance:.6f}")
        if args.density_out:
            _write_density_pair(args.density_out, i, full[i], combined[i])
    return EXIT_OK


def _write_density_pair(stem, index, full_samples, combined_samples):
    """One CSV of (grid, p_full, p_combined) triples per parameter."""
    est_full, est_comb = density_pair(full_samples, combined_samples)
    stem = Path(stem)
    path = stem.with_name(f"{stem.stem}.p{index + 1}{stem.suffix or '.csv'}")
    table = np.column_stack([est_full.grid, est_full.values, est_comb.values])
    np.savetxt(path, table, fmt=FLOAT_FORMAT, delimiter=",")


def run_harness(args):
    """Simulate, shard, sample shards and the full data, write everything."""
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.model == "logistic":
        problem = simulate_logistic_data(args.n, LOGISTIC_BETA, seed=args.seed)
        rows = problem.data_matrix()

        def sample(shard_rows, seed):
            x, y = split_logistic_rows(shard_rows)
            cfg = MhConfig(iterations=args.iters, burnin=args.burnin,
                           seed=seed, thin=args.thin)
            return sample_logistic_posterior(x, y, cfg)

        extra = {"beta_true": list(problem.beta_true)}
    else:
        problem = simulate_gamma_data(args.n, args.alpha, args.beta, seed=args.seed)
        rows = problem.y[:, None]

        def sample(shard_rows, seed):
            cfg = MhConfig(iterations=args.iters, burnin=args.burnin,
                           seed=seed, thin=args.thin)
            return sample_gamma_posterior(shard_rows[:, 0], cfg)

        extra = {"alpha_true": problem.alpha_true, "beta_true": problem.beta_true}

    shards = partition_rows(rows, args.shards, seed=args.seed + 1)
    chains = [sample(shard, args.seed + 2 + m) for m, shard in enumerate(shards)]
    bundle = validate_bundle(np.stack(chains, axis=2))
    manifest_path = out_dir / "bundle.json"
    write_bundle(bundle, manifest_path, seed=args.seed)

    full_chain = sample(rows, args.seed + 2 + args.shards)
    full_path = out_dir / "full_chain.csv"
    write_samples(full_path, CombinedSamples(full_chain))

    run_record = {
        "created_by": f"chaincombine {__version__}",
        "model": args.model,
        "n": args.n,
        "shards": args.shards,
        "iters": args.iters,
        "burnin": args.burnin,
        "thin": args.thin,
        "seed": args.seed,
        "bundle_manifest": manifest_path.name,
        "full_chain": full_path.name,
        **extra,
    }
    with open(out_dir / "run.json", "w") as handle:
        json.dump(run_record, handle, indent=2)
        handle.write("\n")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ChainCombineError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

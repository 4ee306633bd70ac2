"""Command-line front end: trial runs, scaling studies, model checks.

Subcommands:

* ``minfind-run``   -- Monte Carlo trials of one algorithm, CSV out.
* ``scaling``       -- query-scaling regression across list sizes.
* ``hypothesis``    -- end-to-end hypothesis-selection trials.
* ``verify-grover`` -- analytic model against the statevector reference.
* ``accept``        -- the full acceptance suite (exits nonzero on failure).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import acceptance, harness, scheffe
from .comparator import STRATEGIES
from .grover import GroverParams, statevector_reference, success_probability
from .harness import ExperimentConfig
from .instance import GENERATOR_KINDS


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robustqmf")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("minfind-run", help="Monte Carlo trials of one algorithm")
    run.add_argument("--algo", choices=harness.ALGORITHMS, required=True)
    run.add_argument("--n", type=int, default=1024)
    run.add_argument("--delta", type=int, default=0, help="target density parameter")
    run.add_argument("--kind", choices=GENERATOR_KINDS, default=None,
                     help="instance generator (default: uniform-spread for delta 0, else clustered)")
    run.add_argument("--adversary", choices=STRATEGIES, default="exact")
    run.add_argument("--delta-prob", type=float, default=0.1)
    run.add_argument("--trials", type=int, default=100)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--out", default=None, help="CSV path (default: stdout)")
    run.add_argument("--config", default=None, help="key=value config file overriding the flags")
    run.set_defaults(func=cmd_minfind_run)

    scaling = sub.add_parser("scaling", help="log-log slope of quantum queries vs n")
    scaling.add_argument("--algo", choices=harness.ALGORITHMS, default="robust")
    scaling.add_argument("--sizes", default="256,512,1024,2048,4096,8192,16384",
                         help="comma-separated list sizes (>= 4 distinct)")
    scaling.add_argument("--delta", type=int, default=0)
    scaling.add_argument("--adversary", choices=STRATEGIES, default="exact")
    scaling.add_argument("--delta-prob", type=float, default=0.1)
    scaling.add_argument("--trials", type=int, default=200, help="trials per size")
    scaling.add_argument("--seed", type=int, default=0)
    scaling.add_argument("--jobs", type=int, default=1)
    scaling.add_argument("--metric", choices=("quantum", "classical"), default="quantum")
    scaling.add_argument("--out", default=None)
    scaling.set_defaults(func=cmd_scaling)

    hyp = sub.add_parser("hypothesis", help="hypothesis-selection trials")
    hyp.add_argument("--file", default=None, help="hypothesis file (header, pmfs, q: line)")
    hyp.add_argument("--generate", choices=("gridded", "mixture"), default="gridded")
    hyp.add_argument("--n", type=int, default=256)
    hyp.add_argument("--domain", type=int, default=64)
    hyp.add_argument("--epsilon", type=float, default=None,
                     help="accuracy target (default: 0.8 * generator level gap)")
    hyp.add_argument("--delta-prob", type=float, default=0.1)
    hyp.add_argument("--trials", type=int, default=100)
    hyp.add_argument("--seed", type=int, default=0)
    hyp.add_argument("--out", default=None)
    hyp.set_defaults(func=cmd_hypothesis)

    verify = sub.add_parser("verify-grover", help="analytic vs statevector check")
    verify.add_argument("--max-size", type=int, default=32)
    verify.add_argument("--max-iters", type=int, default=12)
    verify.add_argument("--tolerance", type=float, default=1e-10)
    verify.add_argument("--out", default=None, help="CSV of per-point deviations")
    verify.set_defaults(func=cmd_verify_grover)

    accept = sub.add_parser("accept", help="run the acceptance suite")
    accept.add_argument("--only", default=None,
                        help="comma-separated criterion numbers (default: all)")
    accept.add_argument("--summary", default=None,
                        help="write a JSON summary of the results to this path")
    accept.set_defaults(func=cmd_accept)
    return parser


def cmd_minfind_run(args) -> int:
    if args.config:
        with open(args.config) as fh:
            config = ExperimentConfig.from_text(fh.read())
    else:
        kind = args.kind or ("uniform-spread" if args.delta == 0 else "clustered")
        config = ExperimentConfig(algorithm=args.algo, kind=kind, n=args.n,
                                  target_delta=args.delta, adversary=args.adversary,
                                  delta_prob=args.delta_prob, trials=args.trials,
                                  base_seed=args.seed)
    records = harness.run_trials(config, jobs=args.jobs)
    csv_text = harness.records_to_csv(records)
    _emit(csv_text, args.out)
    if records:
        print(f"# rank-success {harness.success_frequency(records):.4f} "
              f"distance-success {harness.success_frequency(records, True):.4f}",
              file=sys.stderr)
    return 0


def cmd_scaling(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    result = harness.scaling_study(args.algo, sizes, args.delta, args.adversary,
                                   args.trials, args.seed, args.delta_prob,
                                   jobs=args.jobs, metric=args.metric)
    lines = ["n,mean_quantum_queries"]
    lines += [f"{n},{m!r}" for n, m in zip(result.sizes, result.mean_quantum)]
    lines.append(f"# slope={result.slope!r} degenerate={int(result.degenerate)}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_hypothesis(args) -> int:
    if args.file:
        base = scheffe.load_hypotheses(args.file, sample_count=1)
        hypotheses, target = base.hypotheses, base.target
        epsilon = args.epsilon if args.epsilon is not None else 0.5
    elif args.generate == "gridded":
        family = scheffe.gridded_hypotheses(args.n, args.domain, seed=args.seed)
        hypotheses, target = family.hypotheses, family.target
        epsilon = args.epsilon if args.epsilon is not None else 0.8 * family.min_level_gap()
    else:
        family = scheffe.mixture_hypotheses(args.n, args.domain, seed=args.seed)
        hypotheses, target = family.hypotheses, family.target
        epsilon = args.epsilon if args.epsilon is not None else 0.5
    records = harness.hypothesis_trials(hypotheses, target, epsilon,
                                        args.delta_prob, args.trials, args.seed)
    _emit(harness.hypothesis_records_to_csv(records), args.out)
    freq = sum(r.success for r in records) / len(records) if records else float("nan")
    print(f"# success {freq:.4f} (epsilon {epsilon:.4f})", file=sys.stderr)
    return 0


def cmd_verify_grover(args) -> int:
    lines = ["size,t,g,analytic,reference,abs_error"]
    worst = 0.0
    size = 4
    while size <= args.max_size:
        for t in range(size + 1):
            marked = list(range(t))
            for g in range(args.max_iters + 1):
                probs = statevector_reference(size, marked, g)
                analytic = success_probability(GroverParams(size, t, g))
                reference = float(probs[:t].sum())
                err = abs(reference - analytic)
                worst = max(worst, err)
                lines.append(f"{size},{t},{g},{analytic!r},{reference!r},{err!r}")
        size *= 2
    _emit("\n".join(lines) + "\n", args.out)
    if worst > args.tolerance:
        print(f"# FAIL max deviation {worst:.3e} > {args.tolerance:.3e}", file=sys.stderr)
        return 1
    print(f"# OK max deviation {worst:.3e} <= {args.tolerance:.3e}", file=sys.stderr)
    return 0


def cmd_accept(args) -> int:
    numbers = None
    if args.only:
        numbers = {int(x) for x in args.only.split(",")}
    results = acceptance.run_all(numbers)
    failed = [r for r in results if not r.passed]
    summary = json.dumps([{"number": r.number, "name": r.name, "passed": r.passed,
                           "detail": r.detail, "runtime_s": round(r.runtime_s, 2)}
                          for r in results], indent=2)
    if args.summary:
        with open(args.summary, "w") as fh:
            fh.write(summary + "\n")
    else:
        print(summary)
    print(f"# {len(results) - len(failed)}/{len(results)} criteria passed", file=sys.stderr)
    return 1 if failed else 0


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    sys.exit(main())

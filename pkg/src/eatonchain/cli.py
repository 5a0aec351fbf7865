"""
Command-line front end.

Exit codes: 0 when every version of R is nu-irreducible (or, for ``chain``,
the chain is phi-irreducible), 3 when a reducible version exists, 1 on any
error.  ``kernel``, ``simulate`` and ``example`` exit 0 on success.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .chains import FiniteChain, find_closed_sets, is_phi_irreducible
from .finite_model import (STOCHASTIC_TOL, Custom, ModelError, PointMass,
                           UniformOverPositivePrior, build_fpd)
from .kernel import build_eaton_kernel
from .partition import find_partition_witness
from .recurrence import (CAVEAT, ReturnTimeConfig, local_recurrence_report,
                         simulate_return_walk)
from .report import (CrossCheckError, closed_sets_text, irreducibility_text,
                     run_pipeline, witness_report)
from .worked_examples import (DiscretizationSpec, ZeroVariant, ex1_discretize,
                              ex2_discretize)

EXIT_IRREDUCIBLE = 0
EXIT_ERROR = 1
EXIT_REDUCIBLE = 3

TAU_WARNING = ("warning: support threshold tau = {tau:g} > 0 treats small "
               "probabilities as zero; verdicts depend on tau")


def parse_policy(spec: str, model):
    if spec == "uniform":
        return UniformOverPositivePrior()
    kind, _, arg = spec.partition(":")
    if kind == "pointmass" and arg:
        try:
            return PointMass(model.theta_space.index(arg))
        except KeyError:
            raise ModelError(f"--policy: unknown parameter label {arg!r}") from None
    if kind == "custom" and arg:
        return Custom(tuple(io.load_distribution(arg, model.theta_labels)))
    raise ModelError(
        f"--policy must be uniform, pointmass:<label> or custom:<file>, got {spec!r}")


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n",
                             encoding="utf-8")


def _warn_tau(tau):
    if tau > 0:
        print(TAU_WARNING.format(tau=tau), file=sys.stderr)


def cmd_check(args) -> int:
    model = io.load_model(args.model)
    _warn_tau(args.tau)
    w = find_partition_witness(model, args.tau)
    if args.machine:
        lines = ["#verdict", f"reducible_version_exists {int(w is not None)}"]
        if w is not None:
            lines += ["#witness_C"] + [model.theta_labels[i] for i in sorted(w.C)]
            lines += ["#witness_A"] + [model.x_labels[j] for j in sorted(w.A)]
        _emit("\n".join(lines), args.out)
    else:
        _emit(witness_report(model, w, args.tau), args.out)
    return EXIT_IRREDUCIBLE if w is None else EXIT_REDUCIBLE


def cmd_kernel(args) -> int:
    model = io.load_model(args.model)
    policy = parse_policy(args.policy, model)
    Q = build_fpd(model, policy)
    R = build_eaton_kernel(model, Q, args.tol)
    _emit(io.dumps_kernel(R, model.theta_space,
                          comment=f"Eaton kernel, posterior version {Q.policy_tag}"),
          args.out)
    return 0


def cmd_chain(args) -> int:
    kernel, phi = io.load_kernel(args.kernel)
    chain = FiniteChain(kernel, phi)
    closed = find_closed_sets(chain, args.tau)
    verdict = is_phi_irreducible(chain, args.tau)
    if args.machine:
        labels = kernel.state_labels
        lines = ["#verdict", f"irreducible {int(verdict.irreducible)}", "#closed"]
        lines += [" ".join(labels[i] for i in sorted(cs.C))
                  for cs in closed.closed_sets]
        if verdict.witness is not None:
            lines += ["#witness_y", labels[verdict.witness.y], "#witness_A"]
            lines += [labels[i] for i in sorted(verdict.witness.A)]
        _emit("\n".join(lines), args.out)
    else:
        _emit(closed_sets_text(chain, closed) + "\n"
              + irreducibility_text(chain, verdict), args.out)
    return EXIT_IRREDUCIBLE if verdict.irreducible else EXIT_REDUCIBLE


def cmd_verify(args) -> int:
    model = io.load_model(args.model)
    _warn_tau(args.tau)
    policy = parse_policy(args.policy, model)
    try:
        dossier = run_pipeline(model, policy, tau=args.tau, tol=args.tol)
    except CrossCheckError as exc:
        print(exc.dump, file=sys.stderr)
        print(f"error: internal cross-check failed: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _emit(dossier.machine() if args.machine else dossier.text(), args.out)
    return dossier.exit_code


def cmd_simulate(args) -> int:
    if args.walk:
        if args.interval is None:
            raise ModelError("--walk needs --interval LO HI")
        cfg = ReturnTimeConfig(float(args.start), tuple(args.interval),
                               args.horizon, args.reps, args.seed)
        est = simulate_return_walk(cfg)
        if args.machine:
            text = f"{args.start}, {est.p_hat!r}, {est.ci_halfwidth!r}, {est.censored_count}"
        else:
            text = (f"start {args.start}  B = [{args.interval[0]}, {args.interval[1]}]  "
                    f"N = {args.horizon}  R = {args.reps}\n"
                    f"p_hat = {est.p_hat:.4f} +/- {est.ci_halfwidth:.4f}  "
                    f"censored = {est.censored_count}\n{CAVEAT}")
        _emit(text, args.out)
        return 0
    if args.model is None:
        raise ModelError("simulate needs a model file or --walk")
    model = io.load_model(args.model)
    policy = parse_policy(args.policy, model)
    R = build_eaton_kernel(model, build_fpd(model, policy), args.tol)
    chain = FiniteChain(R, model.theta_space)
    if not args.target:
        raise ModelError("simulate needs --target labels")
    index = model.theta_space.index
    try:
        B = [index(lab) for lab in args.target]
        starts = ([index(lab) for lab in args.starts] if args.starts
                  else [b for b in B if model.nu[b] > 0])
    except KeyError as exc:
        raise ModelError(str(exc)) from None
    cfg = ReturnTimeConfig(0, B, args.horizon, args.reps, args.seed)
    report = local_recurrence_report(chain, B, starts, cfg)
    _emit("\n".join(report.machine_lines()) if args.machine else report.table(),
          args.out)
    return 0


def cmd_example(args) -> int:
    if args.name == "ex1":
        lo, hi = args.range if args.range else (-4.0, 4.0)
        h = args.h if args.h is not None else 0.25
        disc = ex1_discretize(DiscretizationSpec(lo, hi, h))
        comment = (f"location-uniform model, h = {h!r}, range [{lo!r}, {hi!r}]; "
                   "prior weights h (Lebesgue)")
    else:
        h = args.h if args.h is not None else 0.1
        upper = args.upper if args.upper is not None else 10.0
        variant = ZeroVariant(args.variant)
        disc = ex2_discretize(args.n, DiscretizationSpec(0.0, upper, h, True), variant)
        comment = (f"scale-uniform model, n = {args.n}, h = {h!r}, upper = {upper!r}, "
                   f"theta = 0 variant {variant.value}; sample point = max(x_i)")
    flagged = [disc.model.theta_labels[i] for i in np.flatnonzero(disc.boundary_rows)]
    if flagged:
        comment += f"\nboundary rows (truncated, renormalized): {len(flagged)}"
    _emit(io.dumps_model(disc.model, comment), args.out)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="eatonchain",
        description="Irreducibility analysis for Eaton's Markov chain on "
                    "discretized model/prior pairs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, tau=True, tol=False, policy=False):
        if tau:
            sp.add_argument("--tau", type=float, default=0.0,
                            help="support threshold (default 0: exact zeros)")
        if tol:
            sp.add_argument("--tol", type=float, default=STOCHASTIC_TOL)
        if policy:
            sp.add_argument("--policy", default="uniform",
                            help="uniform | pointmass:<label> | custom:<file>")
        sp.add_argument("--machine", action="store_true",
                        help="emit sectioned machine-readable output")
        sp.add_argument("--out", help="write output to this path")

    sp = sub.add_parser("check", help="decide whether a nu-reducible version exists")
    sp.add_argument("model")
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("kernel", help="write Eaton's kernel for one posterior version")
    sp.add_argument("model")
    common(sp, tau=False, tol=True, policy=True)
    sp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("chain", help="closed sets and irreducibility of a kernel file")
    sp.add_argument("kernel")
    common(sp)
    sp.set_defaults(func=cmd_chain)

    sp = sub.add_parser("verify", help="full dossier with cross-checked verdicts")
    sp.add_argument("model")
    common(sp, tol=True, policy=True)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("simulate", help="Monte Carlo return probabilities")
    sp.add_argument("model", nargs="?")
    sp.add_argument("--walk", action="store_true",
                    help="simulate the triangular-increment random walk")
    sp.add_argument("--start", default="0", help="start point (--walk)")
    sp.add_argument("--interval", type=float, nargs=2, metavar=("LO", "HI"))
    sp.add_argument("--target", nargs="+", help="target set B (parameter labels)")
    sp.add_argument("--starts", nargs="+", help="start labels inside B "
                    "(default: nu-positive points of B)")
    sp.add_argument("--horizon", type=int, default=1000)
    sp.add_argument("--reps", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    common(sp, tau=False, tol=True, policy=True)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("example", help="write a discretized worked example")
    sp.add_argument("name", choices=["ex1", "ex2"])
    sp.add_argument("--h", type=float)
    sp.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"),
                    help="grid range (ex1)")
    sp.add_argument("--upper", type=float, help="grid upper bound (ex2)")
    sp.add_argument("--n", type=int, default=1, help="sample size (ex2)")
    sp.add_argument("--variant", choices=["pointmass", "exponential"],
                    default="pointmass", help="model at theta = 0 (ex2)")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_example)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ModelError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Full analysis of one model, with text and sectioned machine output."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import io
from .chains import (ClosedSetReport, FiniteChain, IrreducibilityVerdict,
                     find_closed_sets, is_closed, is_phi_irreducible)
from .finite_model import (STOCHASTIC_TOL, FiniteModel, FPDReport, ModelError,
                           PosteriorKernel, WeightedMeasure, build_fpd,
                           marginal, verify_fpd)
from .kernel import (ReversibilityReport, TransitionKernel,
                     build_eaton_kernel, check_reversibility)
from .partition import (PartitionWitness, build_reducible_version,
                        find_partition_witness, validate_witness,
                        witness_from_closed_set)

MAX_PRINTED_STATES = 12


class CrossCheckError(RuntimeError):
    """The closed-set route and the support-partition route disagree."""

    def __init__(self, problems, dump):
        self.problems = problems
        self.dump = dump
        super().__init__("; ".join(problems))


def _names(labels, indices, limit: int = 12):
    names = [labels[i] for i in sorted(indices)]
    if len(names) > limit:
        names = names[:limit - 2] + [f"... ({len(names) - limit + 1} more)", names[-1]]
    return "{" + ", ".join(names) + "}"


def witness_report(model: FiniteModel, w: Optional[PartitionWitness],
                   tau: float = 0.0) -> str:
    if w is None:
        lines = ["verdict: every version of R is nu-irreducible",
                 "  no nonempty C with nu(C^c) > 0 and A with P(A^c|theta) = 0 "
                 "on C and P(A|theta) = 0 for nu-a.e. theta in C^c exists"]
        if tau > 0:
            lines.append(f"  (support threshold tau = {tau:g}: verdict depends on tau)")
        return "\n".join(lines)
    nt, nx = model.shape
    M = marginal(model).weights
    C = sorted(w.C)
    Cc = [i for i in range(nt) if i not in w.C]
    A = sorted(w.A)
    Ac = [j for j in range(nx) if j not in w.A]
    check = validate_witness(model, w, tau)
    th, xl = model.theta_labels, model.x_labels
    ok = lambda b: "holds" if b else "FAILS"
    lines = [
        "verdict: a nu-reducible version of R exists",
        f"  C    = {_names(th, C)}  nu(C) = {model.nu[C].sum():.6g}",
        f"  C^c  = {_names(th, Cc)}  nu(C^c) = {model.nu[Cc].sum():.6g}",
        f"  A    = {_names(xl, A)}  M(A) = {M[A].sum():.6g}",
        f"  A^c  = {_names(xl, Ac)}  M(A^c) = {M[Ac].sum():.6g}",
        f"  C nonempty with nu(C^c) > 0: "
        f"{ok(check.nonempty_with_null_free_complement)}",
        f"  P(A^c|theta) = 0 for every theta in C: {ok(check.C_inside_A)}",
        f"  P(A|theta) = 0 for nu-a.e. theta in C^c: {ok(check.complement_avoids_A)}",
    ]
    if tau > 0:
        lines.append(f"  (support threshold tau = {tau:g}: verdict depends on tau)")
    return "\n".join(lines)


def closed_sets_text(chain: FiniteChain, report: ClosedSetReport) -> str:
    labels = chain.kernel.state_labels
    lines = [f"minimal closed sets: {len(report.closed_sets)}"]
    total = chain.phi.weights.sum()
    for cs in report.closed_sets:
        mass = chain.phi.mass(cs.C)
        lines.append(f"  {_names(labels, cs.C)}  phi(C) = {mass:.6g}  "
                     f"phi(C^c) = {total - mass:.6g}")
    return "\n".join(lines)


def irreducibility_text(chain: FiniteChain, verdict: IrreducibilityVerdict) -> str:
    if verdict.irreducible:
        return "accessibility: phi-irreducible (every phi-positive state is " \
               "reached from every state)"
    w = verdict.witness
    labels = chain.kernel.state_labels
    return (f"accessibility: phi-reducible; from {labels[w.y]} the set "
            f"{_names(labels, w.A)} (phi = {chain.phi.mass(w.A):.6g}) is "
            "never reached")


@dataclass
class Dossier:
    model: FiniteModel
    tau: float
    tol: float
    M: WeightedMeasure
    Q: PosteriorKernel
    fpd: FPDReport
    R: TransitionKernel
    reversibility: ReversibilityReport
    closed: ClosedSetReport
    accessibility: IrreducibilityVerdict
    witness: Optional[PartitionWitness]
    reducible_version: Optional[PosteriorKernel] = None
    reducible_version_closed: Optional[ClosedSetReport] = None
    recovered_witness: Optional[PartitionWitness] = None
    problems: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def chain(self) -> FiniteChain:
        return FiniteChain(self.R, self.model.theta_space)

    @property
    def exit_code(self) -> int:
        return 3 if self.witness is not None else 0

    def text(self) -> str:
        th = self.model.theta_labels
        out = [f"model: {self.model.shape[0]} parameter points x "
               f"{self.model.shape[1]} sample points",
               "marginal M:"]
        for lab, m in zip(self.M.labels, self.M.weights):
            out.append(f"  {lab:>12}  {m:.6g}")
        out.append(f"posterior version: {self.Q.policy_tag}; M-null columns: "
                   f"{_names(self.model.x_labels, self.Q.null_columns)}")
        out.append(f"FPD identity: max violation {self.fpd.max_identity_violation:.3g}, "
                   f"column deviation {self.fpd.max_column_deviation:.3g} -> "
                   f"{'pass' if self.fpd.passed else 'FAIL'} at {self.tol:g}")
        if len(self.R) <= MAX_PRINTED_STATES:
            out.append("kernel R:")
            width = max(len(s) for s in th)
            for lab, row in zip(th, self.R.S):
                out.append(f"  {lab:>{width}}  " +
                           " ".join(f"{v:8.4f}" for v in row))
        else:
            out.append(f"kernel R: {len(self.R)} x {len(self.R)} "
                       "(use --machine for the full matrix)")
        out.append(f"reversibility: max |nu_i R_ik - nu_k R_ki| = "
                   f"{self.reversibility.max_residual:.3g} -> "
                   f"{'pass' if self.reversibility.passed else 'FAIL'}")
        out.append(closed_sets_text(self.chain, self.closed))
        out.append(irreducibility_text(self.chain, self.accessibility))
        out.append(f"closed-set route: this version is "
                   f"{'nu-reducible' if self.closed.reducible else 'nu-irreducible'}")
        out.append("support-partition route:")
        out.append(witness_report(self.model, self.witness, self.tau))
        if self.reducible_version_closed is not None:
            out.append("reducible version built from the witness: "
                       + ("nu-reducible, C closed"
                          if self.reducible_version_closed.reducible
                          else "NOT reducible"))
        for w in self.warnings:
            out.append(f"warning: {w}")
        out.append("cross-check: " + ("routes agree" if not self.problems
                                      else "DISAGREE: " + "; ".join(self.problems)))
        return "\n".join(out)

    def machine(self) -> str:
        parts = [io.dumps_measure_section("marginal", self.M),
                 io.dumps_matrix_section("Q", self.Q.Q),
                 io.dumps_kernel(self.R, self.model.theta_space)]
        th, xl = self.model.theta_labels, self.model.x_labels
        lines = ["#verdict",
                 f"fpd_violation {self.fpd.max_identity_violation!r}",
                 f"reversibility_residual {self.reversibility.max_residual!r}",
                 f"version_reducible {int(self.closed.reducible)}",
                 f"accessibility_irreducible {int(self.accessibility.irreducible)}",
                 f"reducible_version_exists {int(self.witness is not None)}",
                 f"cross_check {'ok' if not self.problems else 'fail'}",
                 "#closed"]
        for cs in self.closed.closed_sets:
            lines.append(" ".join(th[i] for i in sorted(cs.C)))
        if self.witness is not None:
            lines.append("#witness_C")
            lines.extend(th[i] for i in sorted(self.witness.C))
            lines.append("#witness_A")
            lines.extend(xl[j] for j in sorted(self.witness.A))
        return "".join(parts) + "\n".join(lines) + "\n"


def run_pipeline(model: FiniteModel, policy=None, tau: float = 0.0,
                 tol: float = STOCHASTIC_TOL, strict: bool = True) -> Dossier:
    """Analyse one model by both routes and cross-check them.

    The closed-set route asks whether the chosen version of R is reducible;
    the support-partition route asks whether *some* version is.  They must
    satisfy: no witness implies this version is irreducible; a reducible
    version implies a witness, recoverable from its closed set; and a
    witness always yields a reducible version.  With ``strict`` a violation
    raises :class:`CrossCheckError`.  Checks tied to the exact support are
    downgraded to warnings when ``tau > 0``.
    """
    M = marginal(model)
    Q = build_fpd(model, policy)
    fpd = verify_fpd(Q, model, tol)
    R = build_eaton_kernel(model, Q, tol)
    rev = check_reversibility(R, model.theta_space, tol)
    chain = FiniteChain(R, model.theta_space)
    closed = find_closed_sets(chain)
    access = is_phi_irreducible(chain)
    witness = find_partition_witness(model, tau)
    d = Dossier(model, tau, tol, M, Q, fpd, R, rev, closed, access, witness)

    problems = []
    support_problems = []
    if not fpd.passed:
        problems.append("formal posterior identity fails")
    if not rev.passed:
        problems.append("detailed balance fails")
    if access.irreducible == closed.reducible:
        problems.append("accessibility and closed-set verdicts differ")
    if witness is None and closed.reducible:
        support_problems.append("no witness, yet this version is reducible")
    if closed.reducible:
        nu_pos = model.nu > 0
        for cs in closed.closed_sets:
            if nu_pos.sum() > nu_pos[sorted(cs.C)].sum():
                d.recovered_witness = witness_from_closed_set(model, Q, cs)
                if not validate_witness(model, d.recovered_witness):
                    problems.append("witness recovered from closed set is invalid")
                break
    if witness is not None:
        try:
            Qt = build_reducible_version(model, Q, witness, tau=tau)
        except ModelError as exc:
            support_problems.append(f"cannot build reducible version: {exc}")
        else:
            Rt = build_eaton_kernel(model, Qt, tol)
            d.reducible_version = Qt
            d.reducible_version_closed = find_closed_sets(
                FiniteChain(Rt, model.theta_space))
            if not (is_closed(Rt, witness.C)
                    and d.reducible_version_closed.reducible):
                support_problems.append(
                    "witness does not yield a reducible version")
    if tau > 0:
        d.warnings.extend(support_problems)
    else:
        problems.extend(support_problems)
    d.problems = problems
    if problems and strict:
        raise CrossCheckError(problems, d.text())
    return d

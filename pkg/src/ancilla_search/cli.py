"""Command-line front end.

Exit codes: 0 all checked invariants hold, 1 an invariant failed, 2 usage or
domain error, 3 capacity error.
"""
from __future__ import annotations

import argparse
import math
import shlex
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .adversary import AdversaryConfig, adversarial_search, ancilla_advantage_report
from .bound import DEFAULT_UNIFORMITY_EPS, query_count_estimate, query_count_real, uniform_overlap_bound
from .circuit import parse_circuit, run_circuit
from .errors import CapacityError, SimulationError
from .grover import closed_form_success, optimal_iterations, success_curve
from .refutation import (
    ancilla_reveal_probability,
    apply_copy_round,
    apply_round,
    branch_amplitudes,
    correlation_rank,
    identification_probability,
    is_degenerate,
    parse_rounds,
    prepare_marked_superposition,
)
from .report import ExperimentReport, Table, emit_report
from .statevector import RegisterLayout, StateVector, check_capacity

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3

GROVER_COLUMNS = ("t", "success_probability", "closed_form", "queries")
REFUTE_COLUMNS = ("d", "reveal_probability", "reveal_bound", "degenerate")
BOUND_COLUMNS = ("p", "estimate", "estimate_real", "ratio_to_sqrt_N")
ADVERSARY_COLUMNS = ("trial", "d", "success", "mark_averaged", "queries")
COMPARE_COLUMNS = (
    "trial",
    "success_without",
    "success_with",
    "mark_averaged_without",
    "mark_averaged_with",
)
RUN_COLUMNS = ("index", "bits", "probability")

SIM_TOL = 1e-10
BOUND_TOL = 1e-12
BRANCH_TOL = 1e-15


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _iterations(text: str) -> int | str:
    if text == "auto":
        return text
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a non-negative integer or 'auto'") from None
    if value < 0:
        raise argparse.ArgumentTypeError("expected a non-negative integer or 'auto'")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--csv", type=Path, metavar="PATH", help="also write the result table as CSV")

    parser = _Parser(prog="ancilla-search", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("grover", parents=[common], help="simulate Grover search")
    p.add_argument("--n", type=int, required=True, help="index register width")
    p.add_argument("--d", type=int, required=True, help="marked index")
    p.add_argument("--t", type=_iterations, default="auto", help="iterations or 'auto'")
    p.add_argument("--oracle", choices=("phase", "flip"), default="phase")

    p = sub.add_parser("refute", parents=[common], help="run the ancilla-copy scheme")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--M", type=int, default=1, help="number of ancilla registers (>= 1)")
    p.add_argument("--rounds", default="", help="comma list of identity, hadamard, random:<k>")

    p = sub.add_parser("bound", parents=[common], help="query-count estimate with auxiliary qubits")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", type=float, default=None, help="overlap exponent (default m)")
    p.add_argument("--random-states", type=int, default=0, metavar="K",
                   help="also check the uniform bound on K seeded random states")
    p.add_argument("--eps", type=float, default=DEFAULT_UNIFORMITY_EPS, help="uniformity tolerance")

    p = sub.add_parser("adversary", parents=[common], help="random query algorithms vs the ceiling")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m-extra", type=int, default=0)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--compare", action="store_true",
                   help="pair m_extra=0 against --m-extra (default 2) under matched seeds")

    p = sub.add_parser("run", parents=[common], help="run a circuit file ('-' for stdin)")
    p.add_argument("circuit", help="path to a circuit file")
    return parser


def _grover(args, report: ExperimentReport) -> None:
    if args.n < 1:
        raise SimulationError("--n must be >= 1")
    check_capacity(args.n + (args.oracle == "flip"))
    N = 1 << args.n
    t_opt = optimal_iterations(N)
    t = t_opt if args.t == "auto" else args.t
    report.parameters.update(n=args.n, d=args.d, t=t, t_requested=str(args.t), oracle=args.oracle)
    curve = success_curve(args.n, args.d, t, args.oracle)
    per_iter = 1 if args.oracle == "phase" else 2
    table = Table(GROVER_COLUMNS)
    worst = 0.0
    for o in curve:
        cf = closed_form_success(N, o.t)
        worst = max(worst, abs(o.success_probability - cf))
        table.add(o.t, o.success_probability, cf, o.queries)
    final = curve[-1]
    report.results.update(
        N=N,
        success_probability=final.success_probability,
        closed_form=closed_form_success(N, t),
        queries=final.queries,
        t_optimal=t_opt,
        max_deviation=worst,
    )
    report.verdicts["matches_closed_form"] = worst < SIM_TOL
    report.verdicts["queries_counted"] = final.queries == per_iter * t
    if t == t_opt and N >= 4:
        report.verdicts["optimum_at_least_1_minus_1_over_N"] = final.success_probability >= 1 - 1 / N - SIM_TOL
    report.table = table


def _refute(args, report: ExperimentReport) -> None:
    if args.M < 1:
        raise SimulationError("--M must be >= 1")
    if args.n < 1:
        raise SimulationError("--n must be >= 1")
    check_capacity(RegisterLayout(args.n, args.M).total_qubits)
    rounds = parse_rounds(args.rounds, args.seed)
    report.parameters.update(n=args.n, d=args.d, M=args.M, rounds=args.rounds, num_rounds=len(rounds))
    N = 1 << args.n

    def pipeline(d: int) -> tuple[StateVector, object, int, int, float]:
        state, layout, ledger = prepare_marked_superposition(args.n, d, args.M)
        frozen = branch_amplitudes(state, layout, 0)
        apply_copy_round(state, layout)
        rank = correlation_rank(state, layout)
        for spec in rounds:
            apply_round(state, layout, spec)
        drift = float(np.max(np.abs(branch_amplitudes(state, layout, 0) - frozen)))
        return state, layout, ledger.queries, rank, drift

    if not 0 <= args.d < N:
        raise SimulationError(f"marked index {args.d} out of range for n={args.n}")
    states, table = [], Table(REFUTE_COLUMNS)
    worst_drift, layout, reveal_ok, queries_ok = 0.0, None, True, True
    rank_d = None
    for d in range(N):
        state, layout, queries, rank, drift = pipeline(d)
        states.append(state)
        worst_drift = max(worst_drift, drift)
        queries_ok &= queries == 1
        reveal = ancilla_reveal_probability(state, layout, d)
        if not is_degenerate(d):
            reveal_ok &= reveal <= 1 / N + BOUND_TOL
        if d == args.d:
            rank_d = rank
            chosen_reveal = reveal
        table.add(d, reveal, 1 / N, is_degenerate(d))

    ident = identification_probability(states, layout)
    ident_no_index = identification_probability(states, layout, include_index=False)
    t_opt = optimal_iterations(N)
    report.results.update(
        N=N,
        queries=1,
        reveal_probability=chosen_reveal,
        reveal_bound=1 / N,
        degenerate=is_degenerate(args.d),
        identification_probability=ident,
        identification_without_index=ident_no_index,
        identification_bound=2 / N,
        post_copy_schmidt_rank=rank_d,
        flag0_branch_drift=worst_drift,
        grover_t_optimal=t_opt,
        grover_success_at_optimum=closed_form_success(N, t_opt),
    )
    if is_degenerate(args.d):
        report.warnings.append(
            "d=0: the copied pattern equals the blank ancilla pattern; the reveal "
            "probability is 1 and conveys nothing. Use identification_probability."
        )
    report.verdicts["reveal_within_1_over_N"] = reveal_ok
    report.verdicts["identification_within_2_over_N"] = ident <= 2 / N + BOUND_TOL
    report.verdicts["unflagged_branch_invariant"] = worst_drift <= BRANCH_TOL
    report.verdicts["queries_counted"] = queries_ok
    if not is_degenerate(args.d):
        report.verdicts["post_copy_not_product"] = rank_d >= 2
    report.table = table


def _bound(args, report: ExperimentReport) -> None:
    p = float(args.m) if args.p is None else args.p
    report.parameters.update(n=args.n, m=args.m, p=p, random_states=args.random_states, eps=args.eps)
    if args.n + args.m > 1024:
        raise CapacityError("n + m too large for a floating-point estimate")
    sqrt_n = 2.0 ** (args.n / 2)
    est, real = query_count_estimate(args.n, args.m, p), query_count_real(args.n, args.m, p)
    report.results.update(
        estimate=est, estimate_real=real, sqrt_N=sqrt_n, ratio_to_sqrt_N=real / sqrt_n
    )
    table = Table(BOUND_COLUMNS)
    prev = math.inf
    monotone = True
    for pi in range(args.n + args.m + 1):
        r = query_count_real(args.n, args.m, pi)
        monotone &= r <= prev
        prev = r
        table.add(pi, query_count_estimate(args.n, args.m, pi), r, r / sqrt_n)
    report.verdicts["monotone_in_p"] = monotone
    report.table = table
    if args.random_states > 0:
        if args.n + args.m > 20:
            raise CapacityError("--random-states supports n + m <= 20")
        rng = np.random.default_rng(args.seed)
        q = args.n + args.m
        uniform, violations = 0, 0
        for _ in range(args.random_states):
            amps = rng.standard_normal(1 << q) + 1j * rng.standard_normal(1 << q)
            psi = StateVector(q, amps / np.linalg.norm(amps))
            tau = int(rng.integers(1 << args.n))
            size = int(rng.integers(1, (1 << args.m) + 1))
            omega = sorted(int(w) for w in rng.choice(1 << args.m, size=size, replace=False))
            pr, rhs, is_uniform = uniform_overlap_bound(psi, args.n, tau, omega, args.eps)
            if is_uniform:
                uniform += 1
                violations += pr > rhs + BOUND_TOL
        report.results.update(random_uniform_instances=uniform, random_bound_violations=violations)
        report.verdicts["uniform_bound_holds"] = violations == 0


def _adversary(args, report: ExperimentReport) -> None:
    if args.compare:
        m_extra = args.m_extra or 2
        report.parameters.update(n=args.n, m_extra=m_extra, t=args.t, trials=args.trials, compare=True)
        if args.depth is not None:
            raise SimulationError("--depth is not supported with --compare")
        cmp = ancilla_advantage_report(args.n, args.t, args.trials, args.seed, m_extra)
        a, b = cmp.without_ancillas, cmp.with_ancillas
        report.results.update(
            closed_form=cmp.closed_form,
            ceiling=cmp.bound,
            max_success_without=a.max_success,
            max_success_with=b.max_success,
            mean_success_without=a.mean_success,
            mean_success_with=b.mean_success,
            max_mark_averaged_without=a.max_mark_averaged,
            max_mark_averaged_with=b.max_mark_averaged,
            difference=cmp.difference,
        )
        report.verdicts["within_ceiling"] = cmp.within_ceiling
        report.verdicts["queries_counted"] = a.queries_ok and b.queries_ok
        table = Table(COMPARE_COLUMNS)
        for ra, rb in zip(a.trials, b.trials):
            table.add(ra.trial, ra.success, rb.success, ra.mark_averaged, rb.mark_averaged)
        report.table = table
        return
    config = AdversaryConfig(args.n, args.m_extra, args.t, args.trials, args.seed, depth=args.depth)
    report.parameters.update(
        n=args.n, m_extra=args.m_extra, t=args.t, trials=args.trials, depth=config.layer_depth
    )
    rep = adversarial_search(config)
    report.results.update(
        closed_form=rep.closed_form,
        ceiling=rep.bound,
        max_success=rep.max_success,
        mean_success=rep.mean_success,
        max_mark_averaged=rep.max_mark_averaged,
        violations=rep.violations,
        closed_form_exceedances=rep.closed_form_exceedances,
        queries=args.t,
    )
    report.verdicts["within_ceiling"] = rep.violations == 0
    report.verdicts["queries_counted"] = rep.queries_ok
    table = Table(ADVERSARY_COLUMNS)
    for r in rep.trials:
        table.add(r.trial, r.d, r.success, r.mark_averaged, r.queries)
    report.table = table


def _run(args, report: ExperimentReport) -> None:
    source = sys.stdin.read() if args.circuit == "-" else Path(args.circuit).read_text()
    circuit = parse_circuit(source)
    report.parameters.update(circuit=args.circuit, num_qubits=circuit.num_qubits, ops=len(circuit.ops))
    state, ledger = run_circuit(circuit)
    norm = state.norm_squared()
    report.results.update(queries=ledger.queries, norm_squared=norm)
    report.verdicts["norm_preserved"] = abs(norm - 1.0) < SIM_TOL
    table = Table(RUN_COLUMNS)
    for i, p in enumerate(state.probabilities()):
        if p > 1e-15:
            table.add(i, format(i, f"0{circuit.num_qubits}b"), float(p))
    report.table = table


_HANDLERS = {"grover": _grover, "refute": _refute, "bound": _bound, "adversary": _adversary, "run": _run}


@dataclass
class CommandResult:
    exit_code: int
    report: ExperimentReport | None = None
    message: str = ""
    csv_path: Path | None = None


def run_command(argv: Sequence[str]) -> CommandResult:
    """Execute one invocation without touching stdout."""
    argv = list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        return CommandResult(EXIT_USAGE, message=f"{parser.format_usage()}{exc}")
    report = ExperimentReport(
        command=shlex.join(["ancilla-search", *argv]), seed=args.seed, version=__version__
    )
    try:
        _HANDLERS[args.command](args, report)
    except CapacityError as exc:
        return CommandResult(EXIT_CAPACITY, message=f"capacity error: {exc}")
    except (SimulationError, OSError) as exc:
        return CommandResult(EXIT_USAGE, message=f"error: {exc}")
    code = EXIT_OK if report.ok else EXIT_INVARIANT
    return CommandResult(code, report, csv_path=args.csv)


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        result = run_command(argv)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if result.message:
        print(result.message, file=sys.stderr)
    report = result.report
    if report is None:
        return result.exit_code
    if result.csv_path is not None and report.table is not None:
        try:
            result.csv_path.write_bytes(emit_report(report, "csv"))
        except OSError as exc:
            print(f"error: cannot write {result.csv_path}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    sys.stdout.buffer.write(emit_report(report, "json"))
    sys.stdout.flush()
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())

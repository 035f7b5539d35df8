"""Command-line front end.

Subcommands: gen-dict, extent, witness, exp {concentration, product,
add-phi, optimality}. Numeric output is JSON on stdout (complex numbers as
[re, im] pairs, schemas carrying a schema_version); diagnostics go to
stderr. Exit codes: 0 success, 1 domain/data errors, 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import experiments, report, stab, witness as witness_mod
from .dictionary import Dictionary
from .errors import ExtentError
from .extent import SUPPORT_TOL, extent, fidelity
from .socp import SolverOptions

SCHEMA_VERSION = report.SCHEMA_VERSION


def _complex_pairs(v: np.ndarray) -> list[list[float]]:
    return [[float(a.real), float(a.imag)] for a in np.asarray(v, dtype=complex)]


def load_state(path) -> np.ndarray:
    """State file: JSON {"amps": [[re, im], ...]}."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "amps" not in data:
        raise ExtentError(f"{path}: state file must be a JSON object with an 'amps' field")
    try:
        return np.array([complex(re, im) for re, im in data["amps"]])
    except (TypeError, ValueError) as exc:
        raise ExtentError(f"{path}: malformed 'amps' entries: {exc}") from None


def save_state(psi: np.ndarray, path) -> None:
    with open(path, "w") as fh:
        json.dump({"amps": _complex_pairs(psi)}, fh)
        fh.write("\n")


def _load_dictionary(args) -> Dictionary:
    if getattr(args, "stab", None) is not None:
        return stab.enumerate_stabilizer_states(args.stab)
    return Dictionary.load(args.dict)


def _solver_options(args) -> SolverOptions:
    return SolverOptions(gap_tol=args.gap_tol, verbose=args.verbose_solver)


def _emit(doc: dict) -> None:
    print(json.dumps(doc, indent=2))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_gen_dict(args) -> int:
    d = stab.enumerate_stabilizer_states(args.qubits)
    d.save(args.out)
    print(f"wrote {len(d)} words of dimension {d.dim} to {args.out}", file=sys.stderr)
    return 0


def cmd_extent(args) -> int:
    d = _load_dictionary(args)
    psi = load_state(args.state)
    sol = extent(d, psi, opts=_solver_options(args), support_tol=args.support_tol)
    F, f_idx = fidelity(d, psi)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "xi": sol.xi,
        "sqrt_xi": sol.sqrt_xi,
        "fidelity": F,
        "fidelity_argmax": f_idx,
        "status": sol.status,
        "gap": sol.gap,
        "support": sol.support.tolist(),
        "coefficients": _complex_pairs(sol.coefficients),
        "witness": _complex_pairs(sol.witness),
    }
    if args.verbose_solver:
        doc["solver"] = {
            "iterations": sol.iterations,
            "primal_residual": sol.primal_residual,
            "dual_residual": sol.dual_residual,
            "dual_objective": sol.dual_objective,
            "history": sol.history,
        }
    _emit(doc)
    return 0


def cmd_witness(args) -> int:
    d = _load_dictionary(args)
    psi = load_state(args.state)
    sol = extent(d, psi, opts=_solver_options(args), support_tol=args.support_tol)
    act = witness_mod.active_set(d, sol.witness, activity_tol=args.activity_tol)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "xi": sol.xi,
        "witness": _complex_pairs(sol.witness),
        "witness_norm_sq": float(np.linalg.norm(sol.witness) ** 2),
        "active_indices": act.indices.tolist(),
        "active_phases": act.phases.tolist(),
        "extreme_point": witness_mod.is_extreme_point(
            d, sol.witness, activity_tol=args.activity_tol
        ),
        "uniqueness": witness_mod.witness_is_unique(d, sol),
    }
    if args.check_slackness:
        rep = witness_mod.check_complementary_slackness(
            d, sol.coefficients, sol.witness,
            support_tol=args.support_tol, activity_tol=args.activity_tol,
        )
        doc["slackness"] = {
            "max_alignment_violation": rep.max_alignment_violation,
            "max_leakage": rep.max_leakage,
        }
    _emit(doc)
    return 0


def cmd_exp(args) -> int:
    if args.experiment == "concentration":
        result = experiments.concentration_experiment(
            args.qubits, args.epsilon, args.trials, args.seed
        )
    elif args.experiment == "product":
        d1 = stab.enumerate_stabilizer_states(args.qubits)
        result = experiments.product_multiplicativity_experiment(
            d1, d1, args.trials, args.seed
        )
    elif args.experiment == "add-phi":
        result = experiments.add_phi_experiment(
            args.qubits, args.trials, args.seed,
            synthetic=args.synthetic, allow_big=args.big,
        )
    else:
        result = experiments.optimality_condition_check(args.qubits, args.trials, args.seed)

    paths = report.save_result(
        result, args.out, figures=not args.no_figures, csv_mirror=args.csv
    )
    for kind, p in sorted(paths.items()):
        print(f"{kind}: {p}", file=sys.stderr)
    _emit({
        "schema_version": SCHEMA_VERSION,
        "experiment": result.experiment,
        "master_seed": result.master_seed,
        "summary": report._jsonable(result.summary),
        "artifacts": paths,
    })
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _add_dict_source(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--dict", metavar="PATH", help="dictionary JSON file")
    g.add_argument("--stab", type=int, metavar="N", help="use STAB_N")


def _add_tolerances(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gap-tol", type=float, default=1e-7)
    p.add_argument("--activity-tol", type=float, default=witness_mod.ACTIVITY_TOL)
    p.add_argument("--support-tol", type=float, default=SUPPORT_TOL)
    p.add_argument("--verbose-solver", action="store_true",
                   help="include iteration history in the output")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="extentlab")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-dict", help="enumerate STAB_N into a dictionary file")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gen_dict)

    p = sub.add_parser("extent", help="extent of a state over a dictionary")
    _add_dict_source(p)
    p.add_argument("--state", required=True, metavar="PATH")
    p.add_argument("--json", action="store_true", help="JSON output (the default)")
    _add_tolerances(p)
    p.set_defaults(fn=cmd_extent)

    p = sub.add_parser("witness", help="dual witness analysis for a state")
    _add_dict_source(p)
    p.add_argument("--state", required=True, metavar="PATH")
    p.add_argument("--check-slackness", action="store_true")
    p.add_argument("--json", action="store_true", help="JSON output (the default)")
    _add_tolerances(p)
    p.set_defaults(fn=cmd_witness)

    p = sub.add_parser("exp", help="seeded experiments")
    p.add_argument("experiment",
                   choices=["concentration", "product", "add-phi", "optimality"])
    p.add_argument("--qubits", type=int, default=1)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".", metavar="DIR",
                   help="directory for JSON-lines, summary, and figures")
    p.add_argument("--synthetic", action="store_true",
                   help="add-phi: constructed always-triggering instance")
    p.add_argument("--big", action="store_true",
                   help="allow large enumerations (add-phi n=3)")
    p.add_argument("--csv", action="store_true", help="also write a CSV mirror")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(fn=cmd_exp)

    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "trials", 1) < 1:
        print("error: --trials must be >= 1", file=sys.stderr)
        return 2
    for tol in ("gap_tol", "activity_tol", "support_tol"):
        if getattr(args, tol, 1.0) <= 0:
            print(f"error: --{tol.replace('_', '-')} must be positive", file=sys.stderr)
            return 2
    try:
        return args.fn(args)
    except (ExtentError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

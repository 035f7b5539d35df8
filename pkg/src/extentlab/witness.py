"""Geometry of optimal dual witnesses.

The dual feasible region {y : |<s, y>| <= 1 for all words s} is a bounded
convex body; its extreme points are exactly the y whose active words span
C^d, and each extreme point carries a normal cone of primal states for
which it is the optimal witness. The routines here classify points of that
geometry from certified extent solutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dictionary import Dictionary
from .errors import DimensionMismatchError, FeasibilityError, NormalizationError
from .extent import ExtentSolution, extent

ACTIVITY_TOL = 1e-6
#: singular values above rank_tol * sigma_max count toward the rank
RANK_TOL = 1e-7
SLACK_TOL = 1e-6
CONE_TOL = 1e-6
WITNESS_MATCH_TOL = 1e-5


@dataclass(frozen=True)
class ActiveSet:
    """Words with |<s, y>| at (or within tolerance of) the unit bound."""

    indices: np.ndarray
    phases: np.ndarray  # e^{i phase} <s, y> is real positive, in (-pi, pi]


@dataclass(frozen=True)
class SlacknessReport:
    """Per-word complementary-slackness violations.

    alignment: on the support, the complementarity residual
    |c_s| - Re(conj(c_s) <s,y>), zero exactly when a nonzero coefficient has
    its overlap at the unit bound and on its phase; the residuals sum to the
    absolute duality gap, so each is bounded by it.
    leakage: complementarity mass |c_s| (1 - |<s,y>|) on words strictly
    inside the unit bound, likewise gap-bounded at an optimum.
    """

    alignment: np.ndarray
    leakage: np.ndarray

    @property
    def max_alignment_violation(self) -> float:
        return float(np.max(self.alignment, initial=0.0))

    @property
    def max_leakage(self) -> float:
        return float(np.max(self.leakage, initial=0.0))

    @property
    def max_violation(self) -> float:
        return max(self.max_alignment_violation, self.max_leakage)


def _overlaps(d: Dictionary, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=complex)
    if y.shape != (d.dim,):
        raise DimensionMismatchError(f"vector of shape {y.shape} over C^{d.dim}")
    return d.matrix.conj().T @ y


def _require_feasible(ov: np.ndarray, tol: float) -> None:
    worst = float(np.max(np.abs(ov)))
    if worst > 1.0 + tol:
        raise FeasibilityError(f"max overlap {worst} exceeds 1 + {tol}")


def active_set(d: Dictionary, y: np.ndarray, activity_tol: float = ACTIVITY_TOL) -> ActiveSet:
    ov = _overlaps(d, y)
    _require_feasible(ov, activity_tol)
    mask = np.abs(ov) >= 1.0 - activity_tol
    idx = np.flatnonzero(mask)
    phases = -np.angle(ov[idx])
    phases[phases <= -np.pi] += 2 * np.pi
    return ActiveSet(indices=idx, phases=phases)


def is_extreme_point(
    d: Dictionary,
    y: np.ndarray,
    activity_tol: float = ACTIVITY_TOL,
    rank_tol: float = RANK_TOL,
) -> bool:
    """Extreme point of the dual body iff the active words span C^d."""
    act = active_set(d, y, activity_tol)
    if act.indices.size < d.dim:
        return False
    sv = np.linalg.svd(d.matrix[:, act.indices], compute_uv=False)
    return bool(np.sum(sv > rank_tol * sv[0]) == d.dim)


def check_complementary_slackness(
    d: Dictionary,
    c: np.ndarray,
    y: np.ndarray,
    support_tol: float = 1e-7,
    activity_tol: float = ACTIVITY_TOL,
) -> SlacknessReport:
    c = np.asarray(c, dtype=complex)
    if c.shape != (len(d),):
        raise DimensionMismatchError(f"{c.shape[0]} coefficients for {len(d)} words")
    ov = _overlaps(d, y)
    _require_feasible(ov, activity_tol)
    mags = np.abs(c)
    alignment = np.zeros(len(d))
    on = mags > support_tol
    alignment[on] = np.abs(mags[on] - np.real(np.conj(c[on]) * ov[on]))
    absov = np.abs(ov)
    leakage = np.where(absov < 1.0 - activity_tol, mags * (1.0 - absov), 0.0)
    return SlacknessReport(alignment=alignment, leakage=leakage)


def witness_is_unique(d: Dictionary, solution: ExtentSolution, rank_tol: float = RANK_TOL) -> str:
    """'unique' when the support words span C^d, else 'unknown'.

    Spanning support pins the witness through the aligned linear system;
    a non-spanning support is inconclusive, never a claim of non-uniqueness.
    """
    idx = solution.support
    if idx.size < d.dim:
        return "unknown"
    sv = np.linalg.svd(d.matrix[:, idx], compute_uv=False)
    return "unique" if np.sum(sv > rank_tol * sv[0]) == d.dim else "unknown"


def in_normal_cone(d: Dictionary, y: np.ndarray, x: np.ndarray, tol: float = CONE_TOL) -> bool:
    """Whether y is an optimal witness for x: Re<x, y> reaches sqrt(xi(x))."""
    sol = extent(d, x)
    attained = float(np.real(np.vdot(x, y)))
    return attained >= sol.sqrt_xi - tol


def in_interior(
    d: Dictionary,
    y: np.ndarray,
    x: np.ndarray,
    tol: float = CONE_TOL,
    match_tol: float = WITNESS_MATCH_TOL,
    details: bool = False,
):
    """Interior of the normal cone of y: y is the unique witness of x.

    Near the cone boundary the verdict is ill-posed at floating point; such
    cases return False and, with ``details``, a boundary_suspect diagnostic.
    """
    sol = extent(d, x)
    attained = float(np.real(np.vdot(x, y)))
    in_cone = attained >= sol.sqrt_xi - tol
    unique = witness_is_unique(d, sol) == "unique"
    matches = float(np.linalg.norm(sol.witness - y)) <= match_tol
    verdict = in_cone and unique and matches
    if not details:
        return verdict
    boundary_suspect = (not verdict) and (
        abs(attained - sol.sqrt_xi) <= 10 * tol or (in_cone and not unique)
    )
    return verdict, {
        "in_cone": in_cone,
        "unique_witness": unique,
        "witness_matches": matches,
        "overlap_deficit": sol.sqrt_xi - attained,
        "boundary_suspect": boundary_suspect,
    }


def word_addition_strictly_decreases(
    d: Dictionary,
    solution: ExtentSolution,
    w: np.ndarray,
    slack_tol: float = SLACK_TOL,
) -> bool:
    """Whether appending unit vector w must strictly lower the extent of psi.

    True iff psi lies in the interior of the witness's normal cone (the
    certified solution's witness is unique) and |<w, y>| > 1: the witness
    becomes dually infeasible for the enlarged dictionary. Callers may
    confirm by re-solving on the enlarged dictionary.
    """
    w = np.asarray(w, dtype=complex)
    if w.shape != (d.dim,):
        raise DimensionMismatchError(f"word of shape {w.shape} over C^{d.dim}")
    if abs(np.linalg.norm(w) - 1.0) > 1e-9:
        raise NormalizationError("candidate word must be unit norm")
    if witness_is_unique(d, solution) != "unique":
        return False
    return bool(abs(np.vdot(w, solution.witness)) > 1.0 + slack_tol)

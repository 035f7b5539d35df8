"""User-facing extent and fidelity computations."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import socp, stab
from .dictionary import Dictionary
from .errors import DimensionMismatchError

#: absolute threshold on |c_s| for membership in the support set,
#: one decade above the solver gap so supports are stable
SUPPORT_TOL = 1e-7


@dataclass
class ExtentSolution:
    """Certified extent value with primal coefficients and dual witness."""

    xi: float
    coefficients: np.ndarray
    witness: np.ndarray
    gap: float
    support: np.ndarray
    psi: np.ndarray
    status: str
    dual_objective: float = 0.0
    primal_residual: float = 0.0
    dual_residual: float = 0.0
    iterations: int = 0
    history: list = field(default_factory=list, repr=False)

    @property
    def sqrt_xi(self) -> float:
        return float(np.sqrt(self.xi))


def extent(
    d: Dictionary,
    psi: np.ndarray,
    opts: socp.SolverOptions | None = None,
    support_tol: float = SUPPORT_TOL,
) -> ExtentSolution:
    """Extent of psi over d: squared minimal l1 norm of a decomposition.

    xi is reported as the squared l1 norm of the certified primal point; the
    duality gap bounds its distance to the true optimum.
    """
    problem = socp.build_extent_socp(d, psi)
    sol = socp.solve(problem, opts)
    l1 = float(np.sum(np.abs(sol.c)))
    return ExtentSolution(
        xi=l1 * l1,
        coefficients=sol.c,
        witness=sol.y,
        gap=sol.gap,
        support=np.flatnonzero(np.abs(sol.c) > support_tol),
        psi=np.asarray(psi, dtype=complex),
        status=sol.status,
        dual_objective=sol.dual_objective,
        primal_residual=sol.primal_residual,
        dual_residual=sol.dual_residual,
        iterations=sol.iterations,
        history=sol.history,
    )


def fidelity(d: Dictionary, psi: np.ndarray) -> tuple[float, int]:
    """Max squared overlap with a dictionary word; ties break to lowest index."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (d.dim,):
        raise DimensionMismatchError(f"state of shape {psi.shape} over C^{d.dim}")
    overlaps = np.abs(d.matrix.conj().T @ psi) ** 2
    best = int(np.argmax(overlaps))  # argmax returns the first maximizer
    return float(overlaps[best]), best


def stabilizer_fidelity_stream(n: int, states: np.ndarray) -> np.ndarray:
    """Max squared stabilizer overlap for each column of ``states``.

    Streams STAB_n from the enumerator without materializing amplitude
    vectors, so n=5 (2.4M words) stays tractable.
    """
    states = np.atleast_2d(np.asarray(states, dtype=complex))
    if states.shape[0] != (1 << n):
        states = states.T
    if states.shape[0] != (1 << n):
        raise DimensionMismatchError(f"states of dim {states.shape[0]} for n={n}")
    best = np.zeros(states.shape[1])
    for idx, amps in stab.iter_stabilizer_groups(n):
        sub = states[idx, :]
        ov = np.abs(amps.conj() @ sub) ** 2
        np.maximum(best, ov.max(axis=0), out=best)
    return best


def magic_t_state() -> np.ndarray:
    """(cos b, e^{i pi/4} sin b) with b = arccos(1/sqrt(3)) / 2."""
    beta = 0.5 * np.arccos(1.0 / np.sqrt(3.0))
    return np.array([np.cos(beta), np.exp(1j * np.pi / 4) * np.sin(beta)])

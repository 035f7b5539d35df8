"""n-qubit stabilizer states: Pauli operators, affine-form amplitudes,
enumeration of the full state set, and partition into orthonormal bases.

A stabilizer state on n qubits is parametrized by an affine subspace
A = {h + t.B : t in F_2^k} of F_2^n together with phase data, its amplitude
vector being 2^{-k/2} * sum_x i^{l(x)} (-1)^{q(x)} e_x over x in A.
Enumerating subspace bases in reduced row echelon form with coset offsets
supported off the pivot columns yields each state exactly once, already in
canonical phase (the lexicographically first support point has amplitude
+2^{-k/2}).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterator

import numpy as np

from .dictionary import Dictionary, Word, make_dictionary
from .errors import CapacityError, DimensionMismatchError, StructureError

I4 = np.array([1.0, 1.0j, -1.0, -1.0j])

#: largest qubit count materialized without the explicit big flag
DEFAULT_MAX_QUBITS = 4
MAX_QUBITS = 5

ORTHO_TOL = 1e-8
#: dictionaries larger than this are not partitioned (dense Gram matrix)
PARTITION_CAP = 4096


# ---------------------------------------------------------------------------
# Pauli operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PauliOperator:
    """Symplectic representation of i^phase X^x Z^z on n qubits."""

    x_bits: tuple[int, ...]
    z_bits: tuple[int, ...]
    phase: int = 0

    def __post_init__(self):
        if len(self.x_bits) != len(self.z_bits):
            raise DimensionMismatchError("x and z bit strings differ in length")
        if len(self.x_bits) < 1:
            raise DimensionMismatchError("need at least one qubit")
        if any(b not in (0, 1) for b in self.x_bits + self.z_bits):
            raise ValueError("bit strings must be 0/1")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_label(cls, label: str, phase: int = 0) -> "PauliOperator":
        table = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
        try:
            pairs = [table[ch] for ch in label]
        except KeyError as exc:
            raise ValueError(f"unknown Pauli letter in {label!r}") from exc
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), phase)

    @property
    def n(self) -> int:
        return len(self.x_bits)


def pauli_commutes(p: PauliOperator, q: PauliOperator) -> bool:
    """Symplectic-form commutation test: x_p.z_q + x_q.z_p = 0 over F_2."""
    if p.n != q.n:
        raise DimensionMismatchError(f"qubit counts differ: {p.n} vs {q.n}")
    form = sum(a * b for a, b in zip(p.x_bits, q.z_bits))
    form += sum(a * b for a, b in zip(q.x_bits, p.z_bits))
    return form % 2 == 0


# ---------------------------------------------------------------------------
# Affine forms and amplitudes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineForm:
    """Affine-subspace parametrization of a stabilizer state.

    basis: k x n bit matrix whose rows are independent over F_2
    offset: length-n bit vector
    linear: length-n coefficients in Z_4, evaluated at support points
    quadratic: upper-triangular k x k bit matrix on the subspace coordinates
    """

    basis: np.ndarray
    offset: np.ndarray
    linear: np.ndarray
    quadratic: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "basis", np.atleast_2d(np.asarray(self.basis, dtype=np.uint8)))
        object.__setattr__(self, "offset", np.asarray(self.offset, dtype=np.uint8))
        object.__setattr__(self, "linear", np.asarray(self.linear, dtype=np.int64) % 4)
        object.__setattr__(self, "quadratic", np.atleast_2d(np.asarray(self.quadratic, dtype=np.uint8)))

    @property
    def k(self) -> int:
        return 0 if self.basis.size == 0 else self.basis.shape[0]


def _validate_form(form: AffineForm, n: int) -> int:
    k = form.k
    if form.offset.shape != (n,):
        raise StructureError(f"offset length {form.offset.shape}, expected {n}")
    if form.linear.shape != (n,):
        raise StructureError(f"linear coefficient length {form.linear.shape}, expected {n}")
    if k > 0:
        if form.basis.shape != (k, n):
            raise StructureError(f"basis shape {form.basis.shape} invalid for n={n}")
        if _gf2_rank(form.basis) != k:
            raise StructureError("basis rows are dependent over F_2")
        if form.quadratic.shape != (k, k):
            raise StructureError(f"quadratic shape {form.quadratic.shape}, expected {k}x{k}")
        if np.any(np.tril(form.quadratic, -1)):
            raise StructureError("quadratic matrix must be upper triangular")
    return k


def _gf2_rank(rows: np.ndarray) -> int:
    m = [int("".join(map(str, r)), 2) for r in rows] if rows.size else []
    pivots: list[int] = []
    for v in m:
        for p in pivots:
            v = min(v, v ^ p)
        if v:
            pivots.append(v)
    return len(pivots)


def _t_matrix(k: int) -> np.ndarray:
    """All t in F_2^k as rows, t index counting in big-endian bit order."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.uint8)
    t = np.arange(1 << k, dtype=np.int64)
    return ((t[:, None] >> np.arange(k - 1, -1, -1)[None, :]) & 1).astype(np.uint8)


def stabilizer_amplitudes(form: AffineForm, n: int) -> np.ndarray:
    """Amplitude vector 2^{-k/2} sum_t i^{l(x)} (-1)^{q(t)} e_{x(t)}."""
    k = _validate_form(form, n)
    T = _t_matrix(k)
    if k:
        X = (T @ form.basis + form.offset[None, :]) % 2
    else:
        X = form.offset[None, :].copy()
    idx = X.astype(np.int64) @ (1 << np.arange(n - 1, -1, -1))
    if len(set(idx.tolist())) != len(idx):
        raise StructureError("affine support points collide; basis not independent")
    lin = (X.astype(np.int64) @ form.linear) % 4
    if k:
        quad = np.einsum("ti,ij,tj->t", T.astype(np.int64), form.quadratic.astype(np.int64), T.astype(np.int64)) % 2
    else:
        quad = np.zeros(1, dtype=np.int64)
    phases = (lin + 2 * quad) % 4
    psi = np.zeros(1 << n, dtype=complex)
    psi[idx] = I4[phases] * 2.0 ** (-k / 2)
    return psi


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def stabilizer_state_count(n: int) -> int:
    """2^n * prod_{k=1..n} (2^k + 1)."""
    count = 1 << n
    for k in range(1, n + 1):
        count *= (1 << k) + 1
    return count


def _rref_bases(n: int, k: int) -> Iterator[tuple[np.ndarray, tuple[int, ...]]]:
    """All k-dim subspaces of F_2^n via reduced-row-echelon bases."""
    if k == 0:
        yield np.zeros((0, n), dtype=np.uint8), ()
        return
    for pivots in combinations(range(n), k):
        free: list[tuple[int, int]] = []
        for i, p in enumerate(pivots):
            for j in range(p + 1, n):
                if j not in pivots:
                    free.append((i, j))
        nfree = len(free)
        for bits in range(1 << nfree):
            B = np.zeros((k, n), dtype=np.uint8)
            for i, p in enumerate(pivots):
                B[i, p] = 1
            for f, (i, j) in enumerate(free):
                B[i, j] = (bits >> (nfree - 1 - f)) & 1
            yield B, pivots


def _offsets(n: int, pivots: tuple[int, ...]) -> Iterator[np.ndarray]:
    """Coset representatives: bit vectors supported off the pivot columns."""
    nonpivot = [j for j in range(n) if j not in pivots]
    for bits in range(1 << len(nonpivot)):
        h = np.zeros(n, dtype=np.uint8)
        for f, j in enumerate(nonpivot):
            h[j] = (bits >> (len(nonpivot) - 1 - f)) & 1
        yield h


@lru_cache(maxsize=8)
def _phase_rows(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Linear (Z_4) and strict-upper quadratic phase rows for dimension k.

    Returns (C, Q): C is (4^k, k) base-4 digits, Q is (2^{k(k-1)/2}, npairs)
    bits, both in counting order.
    """
    c = np.arange(4**k, dtype=np.int64)
    C = (c[:, None] // 4 ** np.arange(k - 1, -1, -1)[None, :]) % 4 if k else c[:, None][:, :0]
    npairs = k * (k - 1) // 2
    q = np.arange(1 << npairs, dtype=np.int64)
    Q = ((q[:, None] >> np.arange(npairs - 1, -1, -1)[None, :]) & 1) if npairs else q[:, None][:, :0]
    return C, Q


def phase_block_count(k: int) -> int:
    return 4**k * (1 << (k * (k - 1) // 2))


def iter_phase_blocks(k: int, chunk_rows: int = 1 << 16) -> Iterator[np.ndarray]:
    """Amplitude rows (states x 2^k) for all phase choices at subspace dim k.

    Row order: quadratic index major, linear index minor. Shared by every
    (subspace, offset) pair with the same k; offsets only permute support.
    """
    T = _t_matrix(k).astype(np.int64)
    C, Q = _phase_rows(k)
    P4 = (C @ T.T) % 4  # (4^k, 2^k)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    TP = np.stack([T[:, i] * T[:, j] for i, j in pairs], axis=1) if pairs else np.zeros((T.shape[0], 0), dtype=np.int64)
    qv = (Q @ TP.T) % 2  # (nq, 2^k)
    scale = 2.0 ** (-k / 2)
    nlin = P4.shape[0]
    q_per_chunk = max(1, chunk_rows // nlin)
    for q0 in range(0, qv.shape[0], q_per_chunk):
        qc = qv[q0 : q0 + q_per_chunk]
        phases = (qc[:, None, :] * 2 + P4[None, :, :]) % 4
        yield I4[phases.reshape(-1, T.shape[0])] * scale


def iter_stabilizer_groups(
    n: int, chunk_rows: int = 1 << 16
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Stream all STAB_n states as (support indices, amplitude rows) blocks.

    Within a block every state has the same support ``idx`` (a 2^k index
    array); the full state is row scattered onto those indices. States are
    produced in a fixed deterministic order and without repetition.
    """
    if not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"qubit count {n} outside supported range 1..{MAX_QUBITS}")
    weights = (1 << np.arange(n - 1, -1, -1)).astype(np.int64)
    for k in range(n + 1):
        T = _t_matrix(k)
        for B, pivots in _rref_bases(n, k):
            X0 = (T @ B) % 2 if k else np.zeros((1, n), dtype=np.uint8)
            for h in _offsets(n, pivots):
                idx = ((X0 ^ h[None, :]).astype(np.int64)) @ weights
                for amps in iter_phase_blocks(k, chunk_rows):
                    yield idx, amps


def enumerate_stabilizer_states(n: int, allow_big: bool = False) -> Dictionary:
    """Dictionary of all distinct n-qubit stabilizer rays, phase-canonical.

    n=5 (2.4M words) is gated behind ``allow_big``. Up to n=4 the enumerated
    vectors additionally pass through ray-level dedupe as a safety net; the
    final count is always checked against the closed-form formula.
    """
    if not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"qubit count {n} outside supported range 1..{MAX_QUBITS}")
    if n > DEFAULT_MAX_QUBITS and not allow_big:
        raise CapacityError(
            f"materializing STAB_{n} ({stabilizer_state_count(n)} words) requires allow_big=True"
        )
    dim = 1 << n
    expected = stabilizer_state_count(n)
    vectors = []
    for idx, amps in iter_stabilizer_groups(n):
        block = np.zeros((amps.shape[0], dim), dtype=complex)
        block[:, idx] = amps
        vectors.extend(block)
    if n <= DEFAULT_MAX_QUBITS:
        d = make_dictionary(vectors)
    else:
        d = Dictionary([Word(v) for v in vectors])
    if len(d) != expected:
        raise StructureError(f"enumerated {len(d)} states, expected {expected}")
    return d


# ---------------------------------------------------------------------------
# Orthonormal basis partition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StabilizerBasisPartition:
    """Disjoint index groups, each an orthonormal basis of the space."""

    groups: tuple[tuple[int, ...], ...]
    word_count: int = field(default=0)

    def basis_of(self, word_index: int) -> int:
        for g, members in enumerate(self.groups):
            if word_index in members:
                return g
        raise KeyError(word_index)

    def basis_index_array(self) -> np.ndarray:
        out = np.full(self.word_count, -1, dtype=np.int64)
        for g, members in enumerate(self.groups):
            out[list(members)] = g
        return out


def group_into_bases(d: Dictionary) -> StabilizerBasisPartition:
    """Partition a dictionary into orthonormal bases of size dim.

    Deterministic greedy clique search on the pairwise-orthogonality graph,
    with backtracking so a valid partition is found whenever one exists.
    """
    m, dim = len(d), d.dim
    if m > PARTITION_CAP:
        raise CapacityError(f"partitioning {m} words exceeds cap {PARTITION_CAP}")
    if m % dim != 0:
        raise StructureError(f"{m} words cannot split into bases of size {dim}")
    S = d.matrix
    adj = np.abs(S.conj().T @ S) < ORTHO_TOL

    def cliques(members: list[int], cands: list[int]) -> Iterator[list[int]]:
        if len(members) == dim:
            yield members
            return
        for pos, c in enumerate(cands):
            if len(members) + len(cands) - pos < dim:
                return
            yield from cliques(members + [c], [x for x in cands[pos + 1 :] if adj[c, x]])

    def solve(remaining: list[int]) -> list[list[int]] | None:
        if not remaining:
            return []
        first = remaining[0]
        rest = remaining[1:]
        for clique in cliques([first], [x for x in rest if adj[first, x]]):
            taken = set(clique)
            sub = solve([x for x in rest if x not in taken])
            if sub is not None:
                return [clique] + sub
        return None

    groups = solve(list(range(m)))
    if groups is None:
        raise StructureError("dictionary is not a disjoint union of orthonormal bases")
    return StabilizerBasisPartition(tuple(tuple(g) for g in groups), word_count=m)

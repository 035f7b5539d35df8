"""Finite dictionaries of unit-norm words in C^d.

Words are stored one representative per ray: the defining constraint
|<s, y>| <= 1 and the l1 objective are phase invariant, so identifying
vectors up to a global phase loses nothing for extent computations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyDictionaryError,
    FormatVersionError,
    NormalizationError,
    ParseError,
)

FILE_VERSION = 1

NORM_TOL = 1e-9
#: quantization grid for ray hashing; confirmed by exact comparison afterwards
RAY_GRID = 1e-9


def canonical_phase(v: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Rotate a vector so its first nonzero entry is real positive."""
    v = np.asarray(v, dtype=complex)
    nz = np.flatnonzero(np.abs(v) > tol)
    if nz.size == 0:
        return v.copy()
    a = v[nz[0]]
    return v * (np.conj(a) / abs(a))


def ray_key(v: np.ndarray, grid: float = RAY_GRID) -> tuple:
    """Hashable key identifying the ray of a phase-canonical vector."""
    q = np.round(np.asarray(v) / grid)
    return tuple(q.real.astype(np.int64)) + tuple(q.imag.astype(np.int64))


@dataclass(frozen=True)
class Word:
    """A unit-norm, phase-canonical dictionary element."""

    amplitudes: np.ndarray
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", np.asarray(self.amplitudes, dtype=complex))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


class Dictionary:
    """Ordered, ray-deduplicated collection of words spanning (a subset of) C^d.

    Immutable after construction; mutating operations return new dictionaries.
    """

    def __init__(self, words: Sequence[Word]):
        if not words:
            raise EmptyDictionaryError("dictionary needs at least one word")
        self._words = tuple(words)
        self._dim = self._words[0].dim
        for w in self._words:
            if w.dim != self._dim:
                raise DimensionMismatchError("words of mixed dimension")
        self._matrix: np.ndarray | None = None
        self._keys: dict[tuple, int] | None = None
        self._spans: bool | None = None

    # -- basic container protocol ------------------------------------------

    def __len__(self) -> int:
        return len(self._words)

    def __iter__(self):
        return iter(self._words)

    def __getitem__(self, i: int) -> Word:
        return self._words[i]

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def words(self) -> tuple[Word, ...]:
        return self._words

    @property
    def matrix(self) -> np.ndarray:
        """Words as columns of a d x m complex matrix."""
        if self._matrix is None:
            self._matrix = np.column_stack([w.amplitudes for w in self._words])
        return self._matrix

    def _key_index(self) -> dict[tuple, int]:
        if self._keys is None:
            self._keys = {ray_key(w.amplitudes): i for i, w in enumerate(self._words)}
        return self._keys

    def index_of_ray(self, v: np.ndarray) -> int | None:
        """Index of the word equal to ``v`` as a ray, or None."""
        c = canonical_phase(v)
        i = self._key_index().get(ray_key(c))
        if i is not None and np.max(np.abs(self._words[i].amplitudes - c)) <= 10 * RAY_GRID:
            return i
        return None

    def contains_ray(self, v: np.ndarray) -> bool:
        return self.index_of_ray(v) is not None

    def spans(self) -> bool:
        """Whether the words span C^d (checked lazily, required by solvers)."""
        if self._spans is None:
            s = np.linalg.svd(self.matrix, compute_uv=False)
            self._spans = bool(s.size >= self._dim and s[self._dim - 1] > 1e-10 * s[0])
        return self._spans

    # -- construction ------------------------------------------------------

    def tensor(self, other: "Dictionary") -> "Dictionary":
        """All pairwise tensor products, canonicalized and deduped."""
        vecs = []
        labels = []
        for w1 in self._words:
            for w2 in other._words:
                vecs.append(np.kron(w1.amplitudes, w2.amplitudes))
                if w1.label and w2.label:
                    labels.append(f"{w1.label}(x){w2.label}")
                else:
                    labels.append(None)
        return make_dictionary(vecs, labels)

    def conjugate(self) -> "Dictionary":
        """Entrywise complex conjugation of every word, re-canonicalized."""
        return make_dictionary(
            [np.conj(w.amplitudes) for w in self._words],
            [w.label for w in self._words],
        )

    def is_conjugation_closed(self) -> bool:
        return all(self.contains_ray(np.conj(w.amplitudes)) for w in self._words)

    def add_word(self, v: np.ndarray) -> "Dictionary":
        """Append a unit vector as a new word; no-op if its ray is present."""
        v = np.asarray(v, dtype=complex)
        if v.shape != (self._dim,):
            raise DimensionMismatchError(f"word of dim {v.shape} in C^{self._dim}")
        nrm = np.linalg.norm(v)
        if abs(nrm - 1.0) > NORM_TOL:
            raise NormalizationError(f"word has norm {nrm!r}, expected 1")
        if self.contains_ray(v):
            return self
        return Dictionary(self._words + (Word(canonical_phase(v)),))

    # -- persistence -------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "version": FILE_VERSION,
            "dim": self._dim,
            "words": [
                {
                    **({"label": w.label} if w.label is not None else {}),
                    "amps": [[float(a.real), float(a.imag)] for a in w.amplitudes],
                }
                for w in self._words
            ],
        }

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Dictionary":
        with open(path, "rb") as fh:
            raw = fh.read()
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"not valid JSON: {exc.msg}", offset=exc.pos) from exc
        if not isinstance(data, dict) or "version" not in data:
            raise ParseError("missing version header")
        if data["version"] != FILE_VERSION:
            raise FormatVersionError(f"unsupported dictionary file version {data['version']!r}")
        try:
            dim = int(data["dim"])
            words = []
            for entry in data["words"]:
                amps = np.array([complex(re, im) for re, im in entry["amps"]])
                if amps.shape != (dim,):
                    raise ParseError(f"word of length {amps.shape[0]}, expected {dim}")
                words.append(Word(amps, entry.get("label")))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed dictionary file: {exc}") from exc
        return cls(words)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dictionary):
            return NotImplemented
        return self._dim == other._dim and len(self) == len(other) and all(
            other.contains_ray(w.amplitudes) for w in self._words
        )


def make_dictionary(
    vectors: Iterable[np.ndarray], labels: Sequence[str | None] | None = None
) -> Dictionary:
    """Build a dictionary from unit vectors, canonicalizing and deduping rays.

    Non-unit input is rejected rather than rescaled: extent values depend on
    the normalization, and silent rescaling would hide caller bugs.
    """
    vectors = list(vectors)
    if not vectors:
        raise EmptyDictionaryError("empty vector list")
    if labels is None:
        labels = [None] * len(vectors)
    seen: dict[tuple, np.ndarray] = {}
    words: list[Word] = []
    for v, label in zip(vectors, labels):
        v = np.asarray(v, dtype=complex)
        nrm = np.linalg.norm(v)
        if abs(nrm - 1.0) > NORM_TOL:
            raise NormalizationError(f"word has norm {nrm!r}, expected 1 within {NORM_TOL}")
        c = canonical_phase(v)
        key = ray_key(c)
        prev = seen.get(key)
        if prev is not None and np.max(np.abs(prev - c)) <= 10 * RAY_GRID:
            continue
        seen[key] = c
        words.append(Word(c, label))
    return Dictionary(words)


def maximally_entangled(d0: int, n: int, max_dim: int = 1 << 22) -> np.ndarray:
    """The state d0^{-n/2} sum_k e_k (x) e_k in C^{d0^(2n)}."""
    if d0 < 2 or n < 1:
        raise ValueError("need d0 >= 2 and n >= 1")
    local = d0**n
    if local * local > max_dim:
        from .errors import CapacityError

        raise CapacityError(f"dimension {local * local} exceeds capacity {max_dim}")
    phi = np.zeros(local * local, dtype=complex)
    phi[np.arange(local) * (local + 1)] = 1.0 / np.sqrt(local)
    return phi

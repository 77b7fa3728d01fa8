"""Finite discrete measure spaces, partition sub-sigma-algebras and norms.

Functions on a space with ``N`` atoms are plain 1-D numpy arrays of length
``N``; atoms are indexed from 0.  Supports are returned as ``frozenset`` of
atom indices so that set identities read naturally in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DimensionError, UnsupportedExponentError

SUPPORT_TOL = 1e-12


def conjugate_exponent(p: float) -> float:
    """Return ``p'`` with ``1/p + 1/p' = 1`` (``inf`` for ``p = 1``)."""
    if not p >= 1:
        raise UnsupportedExponentError(f"exponent must be >= 1, got {p!r}")
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True)
class FiniteMeasureSpace:
    """Atoms ``0..N-1`` carrying strictly positive masses."""

    masses: np.ndarray

    def __post_init__(self):
        m = np.array(self.masses, dtype=float).ravel()
        if m.size < 1:
            raise ValueError("a measure space needs at least one atom")
        if not np.all(np.isfinite(m)) or np.any(m <= 0):
            raise ValueError("atom masses must be finite and strictly positive")
        m.setflags(write=False)
        object.__setattr__(self, "masses", m)

    @property
    def n(self) -> int:
        return self.masses.size

    def check(self, f) -> np.ndarray:
        """Coerce ``f`` to an array on this space or raise :class:`DimensionError`."""
        arr = np.asarray(f)
        if arr.ndim != 1 or arr.size != self.n:
            raise DimensionError(f"expected a function on {self.n} atoms, got shape {arr.shape}")
        return arr

    def integral(self, f) -> complex:
        return complex(np.sum(self.masses * self.check(f)))

    def inner(self, f, g) -> complex:
        """Weighted L2 inner product ``sum mu_i f_i conj(g_i)``."""
        return complex(np.sum(self.masses * self.check(f) * np.conj(self.check(g))))


@dataclass(frozen=True)
class SigmaSubalgebra:
    """Sub-sigma-algebra generated by a partition of the atom indices."""

    blocks: tuple
    n: int
    labels: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        blocks = tuple(tuple(int(i) for i in b) for b in self.blocks)
        seen = np.full(self.n, -1, dtype=int)
        for k, b in enumerate(blocks):
            if not b:
                raise ValueError(f"block {k} is empty")
            for i in b:
                if not 0 <= i < self.n:
                    raise ValueError(f"block {k} holds index {i} outside 0..{self.n - 1}")
                if seen[i] >= 0:
                    raise ValueError(f"atom {i} appears in blocks {seen[i]} and {k}")
                seen[i] = k
        missing = np.flatnonzero(seen < 0)
        if missing.size:
            raise ValueError(f"atoms {missing.tolist()} are not covered by any block")
        seen.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "labels", seen)

    @classmethod
    def discrete(cls, n: int) -> "SigmaSubalgebra":
        return cls(tuple((i,) for i in range(n)), n)

    @classmethod
    def trivial(cls, n: int) -> "SigmaSubalgebra":
        return cls((tuple(range(n)),), n)

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "SigmaSubalgebra":
        labels = list(labels)
        order: dict[int, list[int]] = {}
        for i, lab in enumerate(labels):
            order.setdefault(lab, []).append(i)
        return cls(tuple(tuple(v) for v in order.values()), len(labels))

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def block_masses(self, space: FiniteMeasureSpace) -> np.ndarray:
        return np.bincount(self.labels, weights=space.masses, minlength=self.num_blocks)


def lp_norm(f, space: FiniteMeasureSpace, p: float) -> float:
    """L^p(mu) norm; ``p = inf`` gives the max modulus (every atom has mass)."""
    a = np.abs(space.check(f))
    if math.isinf(p):
        return float(a.max())
    if not p >= 1:
        raise UnsupportedExponentError(f"exponent must be >= 1, got {p!r}")
    scale = a.max()
    if scale == 0:
        return 0.0
    # rescale before powering to stay clear of overflow for large p
    return float(scale * np.sum(space.masses * (a / scale) ** p) ** (1.0 / p))


def support(f, tol: float = SUPPORT_TOL) -> frozenset:
    """Indices where ``|f_i| > tol``."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return frozenset(np.flatnonzero(np.abs(np.asarray(f)) > tol).tolist())


def indicator(indices: Iterable[int], n: int) -> np.ndarray:
    out = np.zeros(n)
    out[list(indices)] = 1.0
    return out


def is_measurable(f, algebra: SigmaSubalgebra, tol: float = SUPPORT_TOL) -> bool:
    """True iff ``f`` is constant (within ``tol``) on every block."""
    f = np.asarray(f)
    if f.size != algebra.n:
        raise DimensionError(f"expected {algebra.n} values, got {f.size}")
    for b in algebra.blocks:
        vals = f[list(b)]
        if np.max(np.abs(vals - vals[0])) > tol:
            return False
    return True


def smallest_measurable_superset(s: Iterable[int], algebra: SigmaSubalgebra) -> frozenset:
    """Union of the blocks that meet ``s``."""
    s = set(s)
    out: set[int] = set()
    for b in algebra.blocks:
        if s.intersection(b):
            out.update(b)
    return frozenset(out)


# names used for these predicates in the operator-theory literature
is_A_measurable = is_measurable
smallest_A_set_containing = smallest_measurable_superset

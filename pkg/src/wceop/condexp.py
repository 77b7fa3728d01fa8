"""Conditional expectation onto a partition sub-sigma-algebra."""

from __future__ import annotations

import numpy as np

from .measure import FiniteMeasureSpace, SigmaSubalgebra


def _block_sums(values: np.ndarray, algebra: SigmaSubalgebra) -> np.ndarray:
    k = algebra.num_blocks
    if np.iscomplexobj(values):
        re = np.bincount(algebra.labels, weights=values.real, minlength=k)
        im = np.bincount(algebra.labels, weights=values.imag, minlength=k)
        return re + 1j * im
    return np.bincount(algebra.labels, weights=values, minlength=k)


def cond_exp(f, algebra: SigmaSubalgebra, space: FiniteMeasureSpace) -> np.ndarray:
    """Blockwise mu-weighted average of ``f``, broadcast back to the atoms.

    Real input gives real output.
    """
    f = space.check(f)
    if algebra.n != space.n:
        raise ValueError("sub-algebra and space disagree on the number of atoms")
    if not np.iscomplexobj(f):
        f = f.astype(float)
    avg = _block_sums(space.masses * f, algebra) / algebra.block_masses(space)
    return avg[algebra.labels]


def cond_exp_matrix(algebra: SigmaSubalgebra, space: FiniteMeasureSpace) -> np.ndarray:
    """Matrix ``P`` with ``P[i, j] = mu_j / mu(B)`` when ``i, j`` share block ``B``."""
    same = algebra.labels[:, None] == algebra.labels[None, :]
    bm = algebra.block_masses(space)[algebra.labels]
    return np.where(same, space.masses[None, :] / bm[:, None], 0.0)

"""Weighted conditional expectation operators ``f -> w * E(u * f)``.

Every closed form here runs through the cached multiplier ``euw = E(u w)``:
powers are ``T^n = M_{euw^(n-1)} T``, Cesaro means and the weighted means
``B_n`` reduce to pointwise weights on ``T``, and the Aluthge transform and
adjoint are again operators of the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .condexp import cond_exp
from .exceptions import NotInvertibleError, UnsupportedExponentError
from .measure import (
    SUPPORT_TOL,
    FiniteMeasureSpace,
    SigmaSubalgebra,
    conjugate_exponent,
    support,
)

# E(uw) entries this close to zero, relative to E(|uw|), are pure cancellation
# round-off and are stored as exact zeros.
_CANCELLATION_TOL = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class CesaroWeights:
    """Multipliers ``v_n`` (Cesaro means) and ``w_n`` (the means ``B_n``)."""

    n: int
    v_n: np.ndarray
    w_n: np.ndarray


def _powers(a: np.ndarray, count: int) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        return a[..., None] ** np.arange(count)


def geometric_weight(a: np.ndarray, n: int) -> np.ndarray:
    """``sum_{i=0}^{n-2} a**i`` pointwise (zero for ``n = 1``)."""
    if n < 2:
        return np.zeros(np.shape(a), dtype=complex)
    return _powers(a, n - 1).sum(axis=-1)


def ramp_weight(a: np.ndarray, n: int) -> np.ndarray:
    """``sum_{i=1}^{n-2} (n - i - 1) a**(i-1)`` pointwise (zero for ``n <= 2``)."""
    if n < 3:
        return np.zeros(np.shape(a), dtype=complex)
    coeff = n - 2 - np.arange(n - 2)
    return (_powers(a, n - 2) * coeff).sum(axis=-1)


@dataclass(frozen=True)
class WceOperator:
    """The operator ``T = M_w E M_u`` on ``L^p(mu)``."""

    space: FiniteMeasureSpace
    algebra: SigmaSubalgebra
    u: np.ndarray
    w: np.ndarray
    p: float = 2.0
    euw: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.algebra.n != self.space.n:
            raise ValueError("sub-algebra and space disagree on the number of atoms")
        u = np.array(self.space.check(self.u), dtype=complex)
        w = np.array(self.space.check(self.w), dtype=complex)
        p = float(self.p)
        if not p >= 1:
            raise UnsupportedExponentError(f"exponent must be >= 1, got {self.p!r}")
        raw = cond_exp(u * w, self.algebra, self.space)
        scale = cond_exp(np.abs(u * w), self.algebra, self.space)
        euw = np.where(np.abs(raw) <= _CANCELLATION_TOL * scale, 0.0, raw).astype(complex)
        for arr in (u, w, euw):
            arr.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "euw", euw)

    @property
    def n(self) -> int:
        return self.space.n

    def E(self, f) -> np.ndarray:
        return cond_exp(f, self.algebra, self.space)

    def replace(self, *, u=None, w=None, p=None) -> "WceOperator":
        return WceOperator(
            self.space,
            self.algebra,
            self.u if u is None else u,
            self.w if w is None else w,
            self.p if p is None else p,
        )

    def apply(self, f) -> np.ndarray:
        f = self.space.check(f)
        return self.w * self.E(self.u * f)

    __call__ = apply

    def bound_functional(self) -> np.ndarray:
        """Pointwise function whose sup-norm bounds ``||T||`` on ``L^p``.

        For ``1 < p < inf`` this is ``E(|u|^p')^(1/p') * E(|w|^p)^(1/p)``;
        for ``p = 1`` it is ``|u| * E(|w|)``.
        """
        p = self.p
        if math.isinf(p):
            raise UnsupportedExponentError("no boundedness criterion for p = inf")
        if p == 1:
            return np.abs(self.u) * self.E(np.abs(self.w))
        q = conjugate_exponent(p)
        return self.E(np.abs(self.u) ** q) ** (1.0 / q) * self.E(np.abs(self.w) ** p) ** (1.0 / p)

    def bound_constant(self) -> float:
        return float(np.max(self.bound_functional()))

    def power(self, n: int) -> "WceOperator":
        """``T^n`` as the operator with outer weight ``euw^(n-1) w``."""
        if n < 1:
            raise ValueError("power must be a positive integer")
        if n == 1:
            return self
        return self.replace(w=self.euw ** (n - 1) * self.w)

    def cesaro_weights(self, n: int) -> CesaroWeights:
        if n < 1:
            raise ValueError("n must be a positive integer")
        return CesaroWeights(n, geometric_weight(self.euw, n), ramp_weight(self.euw, n))

    def cesaro_mean_apply(self, n: int, f) -> np.ndarray:
        """``A_n(T) f = n^-1 (f + v_n T f)``."""
        f = self.space.check(f)
        if n < 1:
            raise ValueError("n must be a positive integer")
        if n == 1:
            return np.array(f, dtype=complex)
        return (f + geometric_weight(self.euw, n) * self.apply(f)) / n

    def b_n_apply(self, n: int, f) -> np.ndarray:
        """``B_n(T) f = n^-1 (w_n T f + (n - 1) f)``."""
        f = self.space.check(f)
        if n < 2:
            raise ValueError("B_n is defined for n >= 2")
        return (ramp_weight(self.euw, n) * self.apply(f) + (n - 1) * f) / n

    def adjoint(self) -> "WceOperator":
        """Hilbert adjoint in ``L^2(mu)``: ``M_conj(u) E M_conj(w)``."""
        if self.p != 2:
            raise UnsupportedExponentError("the adjoint is only formed on L^2")
        return self.replace(u=np.conj(self.w), w=np.conj(self.u))

    def aluthge(self) -> "WceOperator":
        """Aluthge transform, again of the form ``M_v E M_u``."""
        if self.p != 2:
            raise UnsupportedExponentError("the Aluthge transform is only formed on L^2")
        eu2 = self.E(np.abs(self.u) ** 2)
        s = np.abs(eu2) > SUPPORT_TOL
        safe = np.where(s, eu2, 1.0)
        v = np.where(s, self.euw * np.conj(self.u) / safe, 0.0)
        return self.replace(w=v)

    def spectral_radius(self) -> float:
        """``||E(uw)||_inf``."""
        return float(np.max(np.abs(self.euw)))

    def neumann_inverse_apply(self, f) -> np.ndarray:
        """``(I - T)^-1 f = f + (1 - euw)^-1 T f`` for spectral radius below one."""
        f = self.space.check(f)
        rho = self.spectral_radius()
        if not rho < 1:
            raise NotInvertibleError(f"spectral radius {rho:.6g} >= 1; Neumann series diverges")
        return f + self.apply(f) / (1.0 - self.euw)

    def support_of_bound(self, tol: float = SUPPORT_TOL) -> frozenset:
        return support(self.bound_functional(), tol)

    def is_zero(self, tol: float = 0.0) -> bool:
        """True when ``T`` vanishes, i.e. ``w E(|u|) = 0`` everywhere."""
        return bool(np.all(np.abs(self.w) * self.E(np.abs(self.u)) <= tol))


# Functional spellings of the methods above.

def apply(T: WceOperator, f) -> np.ndarray:
    return T.apply(f)


def bound_functional(T: WceOperator) -> np.ndarray:
    return T.bound_functional()


def power_closed_form(T: WceOperator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Weights ``(g, u)`` with ``T^n f = g E(u f)``."""
    Tn = T.power(n)
    return Tn.w, Tn.u


def cesaro_mean_apply(T: WceOperator, n: int, f) -> np.ndarray:
    return T.cesaro_mean_apply(n, f)


def b_n_apply(T: WceOperator, n: int, f) -> np.ndarray:
    return T.b_n_apply(n, f)


def adjoint(T: WceOperator) -> WceOperator:
    return T.adjoint()


def aluthge(T: WceOperator) -> WceOperator:
    return T.aluthge()


def spectral_radius_formula(T: WceOperator) -> float:
    return T.spectral_radius()


def neumann_inverse_apply(T: WceOperator, f) -> np.ndarray:
    return T.neumann_inverse_apply(f)

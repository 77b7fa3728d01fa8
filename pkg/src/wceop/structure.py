"""Ascent, descent, boundedness and decomposition verdicts for WCE operators.

Set identities between null spaces and ranges become rank statements about
realized matrices, decided by :func:`wceop.oracle.rank_and_bases` at a fixed
relative tolerance that is carried in every report.

When a closed-form criterion and its empirical counterpart disagree, the
analysis records a :class:`Discrepancy` instead of deciding which is right.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import UnsupportedExponentError
from .measure import SUPPORT_TOL, support
from .operator import WceOperator, geometric_weight, ramp_weight
from .oracle import (
    RANK_TOL,
    invert,
    matrix_power,
    rank_and_bases,
    realize,
    subspace_dim,
    two_norm,
    weighted_adjoint,
)
from .rng import XorShiftRng

K_MAX = 6
DESCENT_C = 1e-6
POWER_HORIZON = 256
CESARO_HORIZON = 64
GELFAND_POWER = 64
# below this distance from 1 the Neumann series is not resolved in double precision
NEUMANN_MARGIN = 1e-8
# moduli of E(uw) this close to 1 count as unimodular (a unit phase rescaling
# can land on 1 - 2**-52)
UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Discrepancy:
    check: str
    formula: object
    empirical: object
    note: str = ""

    def as_dict(self) -> dict:
        return {"check": self.check, "formula": self.formula,
                "empirical": self.empirical, "note": self.note}


@dataclass(frozen=True)
class ChainReport:
    null_dims: tuple
    range_dims: tuple
    ascent: int | None
    descent: int | None
    tol: float

    def as_dict(self) -> dict:
        return {"null_dims": list(self.null_dims), "range_dims": list(self.range_dims),
                "ascent": self.ascent, "descent": self.descent, "tol": self.tol}


def _first_repeat(dims) -> int | None:
    for k in range(len(dims) - 1):
        if dims[k] == dims[k + 1]:
            return k
    return None


def chain_from_matrices(mats, tol: float = RANK_TOL) -> ChainReport:
    """Chain report from the matrices ``M^0, M^1, ..., M^k_max``."""
    n = mats[0].shape[0]
    ranks = [rank_and_bases(M, tol).rank for M in mats]
    null_dims = tuple(n - r for r in ranks)
    range_dims = tuple(ranks)
    return ChainReport(null_dims, range_dims, _first_repeat(null_dims),
                       _first_repeat(range_dims), tol)


def power_matrix(T: WceOperator, k: int) -> np.ndarray:
    """Realized ``T^k`` through the closed form (``k = 0`` is the identity)."""
    if k == 0:
        return np.eye(T.n, dtype=complex)
    return realize(T.power(k))


def chain_report(T: WceOperator, k_max: int = K_MAX, tol: float = RANK_TOL) -> ChainReport:
    if k_max < 3:
        raise ValueError("k_max must be at least 3")
    return chain_from_matrices([power_matrix(T, k) for k in range(k_max + 1)], tol)


def null_square_by_support(T: WceOperator, tol: float = RANK_TOL) -> tuple[int, bool]:
    """Dimension of ``{f : T f vanishes on S(E(uw))}`` and whether the computed
    basis of ``N(T^2)`` satisfies that predicate."""
    M = realize(T)
    s = sorted(support(T.euw, SUPPORT_TOL))
    dim = T.n - (rank_and_bases(M[s, :], tol).rank if s else 0)
    basis = rank_and_bases(power_matrix(T, 2), tol).null_basis
    scale = max(float(np.max(np.abs(M))), 1e-300) * np.sqrt(T.n)
    members = all(np.max(np.abs((M @ f)[s]), initial=0.0) <= 1e-9 * scale for f in basis.T)
    return dim, members


def verify_ascent_theorem(T: WceOperator, k_max: int = K_MAX, tol: float = RANK_TOL) -> bool:
    """Ascent at most 2, ``N(T^2) = N(T^k)`` up to ``k_max``, and the support
    description of ``N(T^2)``."""
    ch = chain_report(T, k_max, tol)
    stable = all(ch.null_dims[2] == d for d in ch.null_dims[2:])
    dim, members = null_square_by_support(T, tol)
    return (ch.ascent is not None and ch.ascent <= 2 and stable
            and dim == ch.null_dims[2] and members)


def bounded_away_from_zero(T: WceOperator, C: float = DESCENT_C) -> bool:
    return bool(np.min(np.abs(T.euw)) >= C)


def verify_descent_theorem(T: WceOperator, C: float = DESCENT_C, k_max: int = K_MAX,
                           tol: float = RANK_TOL):
    """``R(T^2) = R(T^k)`` for ``k`` up to ``k_max``.

    Returns ``None`` (inapplicable) unless ``min |E(uw)| >= C``; the condition
    is read through moduli since ``E(uw)`` is complex.
    """
    if not bounded_away_from_zero(T, C):
        return None
    ch = chain_report(T, k_max, tol)
    return all(ch.range_dims[2] == d for d in ch.range_dims[2:])


def verify_corollary_sums(T: WceOperator, n_max: int = 3, tol: float = RANK_TOL):
    """``R(T^2) & N(T^(n+2)) = 0`` and, when ``E(uw)`` has no zeros,
    ``R(T^(n+2)) + N(T^2)`` is everything, for ``n = 1..n_max``.

    The second entry is ``None`` when inapplicable.
    """
    sq = rank_and_bases(power_matrix(T, 2), tol)
    higher = [rank_and_bases(power_matrix(T, n + 2), tol) for n in range(1, n_max + 1)]
    trivial = all(
        subspace_dim(sq.range_basis, h.null_basis, tol=tol)
        == sq.range_basis.shape[1] + h.null_basis.shape[1]
        for h in higher
    )
    if np.min(np.abs(T.euw)) == 0:
        return trivial, None
    full = all(subspace_dim(h.range_basis, sq.null_basis, tol=tol) == T.n for h in higher)
    return trivial, full


def complementary(M: np.ndarray, tol: float = RANK_TOL, masses=None) -> bool:
    """``R(M) & N(M) = 0`` and ``dim R(M) + dim N(M) = N`` (so the sum is everything)."""
    rr = rank_and_bases(M, tol, masses)
    n = M.shape[0]
    k_range, k_null = rr.range_basis.shape[1], rr.null_basis.shape[1]
    return k_range + k_null == n and subspace_dim(rr.range_basis, rr.null_basis, tol=tol) == n


def quasi_complement_check(T: WceOperator, tol: float = RANK_TOL) -> bool:
    """``R(T^2)`` and ``N(T^2)`` meet trivially and span the space."""
    return complementary(power_matrix(T, 2), tol)


def decomposition_theorem_check(T: WceOperator, tol: float = RANK_TOL) -> bool:
    """Range/null direct sum for ``M_{E(uw)} T``."""
    S = T.euw[:, None] * realize(T)
    return complementary(S, tol)


def _tail_ratio(norms: np.ndarray, start: int) -> float:
    """Largest ``norms[k] / norms[k-1]`` for ``k >= start`` (``0/0`` counts as 0)."""
    worst = 0.0
    for k in range(max(start, 1), len(norms)):
        prev, cur = norms[k - 1], norms[k]
        if prev == 0:
            ratio = 0.0 if cur == 0 else np.inf
        else:
            ratio = cur / prev
        worst = max(worst, float(ratio))
    return worst


def power_norms(T: WceOperator, horizon: int) -> np.ndarray:
    """``||T^n||`` in ``L^2(mu)`` for ``n = 1..horizon`` via the closed-form powers."""
    stack = np.stack([realize(T.power(n)) for n in range(1, horizon + 1)])
    return np.asarray(two_norm(stack, T.space.masses), dtype=float)


@dataclass(frozen=True)
class PowerBoundedness:
    power_bounded_paper: bool  # strict closed-form criterion
    power_bounded_empirical: bool
    sup_norm_estimate: float
    horizon: int
    max_tail_ratio: float
    euw_sup: float
    euw_powers_bounded: bool
    discrepancies: tuple = ()

    def as_dict(self) -> dict:
        return {
            "power_bounded_paper": self.power_bounded_paper,
            "power_bounded_empirical": self.power_bounded_empirical,
            "sup_norm_estimate": self.sup_norm_estimate,
            "horizon": self.horizon,
            "max_tail_ratio": self.max_tail_ratio,
            "euw_sup": self.euw_sup,
            "euw_powers_bounded": self.euw_powers_bounded,
        }


def strict_power_criterion(T: WceOperator) -> bool:
    """``|E(uw)| < 1`` on the support of the bound functional, with moduli
    within ``UNIT_TOL`` of 1 treated as equal to 1."""
    idx = sorted(T.support_of_bound())
    return bool(np.all(np.abs(T.euw[idx]) < 1 - UNIT_TOL)) if idx else True


def power_bounded_analysis(T: WceOperator, horizon: int = POWER_HORIZON) -> PowerBoundedness:
    """Strict criterion against the sampled norm sequence ``||T^n||``.

    The empirical verdict is true when successive norm ratios over the second
    half of the horizon never exceed ``1 + 1e-9``.
    """
    if horizon < 16:
        raise ValueError("horizon must be at least 16")
    strict = strict_power_criterion(T)
    norms = power_norms(T, horizon)
    ratio = _tail_ratio(norms, horizon // 2)
    empirical = ratio <= 1 + 1e-9
    euw_sup = T.spectral_radius()
    # sup_n ||euw^n|| is bounded exactly when ||euw|| <= 1; checked on the sampled powers
    euw_pows = np.array([euw_sup ** n for n in range(1, horizon + 1)])
    scalar = euw_sup <= 1
    disc = []
    if scalar != bool(_tail_ratio(euw_pows, horizon // 2) <= 1 + 1e-9):
        disc.append(Discrepancy("euw_powers_bounded", scalar, not scalar,
                                "sampled sup ||E(uw)^n|| disagrees with ||E(uw)|| <= 1"))
    if strict != empirical:
        disc.append(Discrepancy(
            "power_bounded_analysis", strict, empirical,
            f"strict |E(uw)| < 1 criterion vs norm growth over horizon {horizon}; "
            f"max tail ratio {ratio:.12g}, ||E(uw)||_inf = {euw_sup:.12g}"))
    return PowerBoundedness(strict, bool(empirical), float(norms.max()), horizon, ratio,
                            euw_sup, scalar, tuple(disc))


def cesaro_matrix(T: WceOperator, n: int, M: np.ndarray | None = None) -> np.ndarray:
    """Realized ``A_n(T) = n^-1 (I + M_{v_n} T)``."""
    M = realize(T) if M is None else M
    if n == 1:
        return np.eye(T.n, dtype=complex)
    return (np.eye(T.n) + geometric_weight(T.euw, n)[:, None] * M) / n


def b_n_matrix(T: WceOperator, n: int, M: np.ndarray | None = None) -> np.ndarray:
    """Realized ``B_n(T) = n^-1 (M_{w_n} T + (n - 1) I)``."""
    M = realize(T) if M is None else M
    return (ramp_weight(T.euw, n)[:, None] * M + (n - 1) * np.eye(T.n)) / n


def _bounded_on(a: np.ndarray, idx) -> bool:
    idx = sorted(idx)
    return bool(np.all(np.abs(a[idx]) <= 1 + UNIT_TOL)) if idx else True


@dataclass(frozen=True)
class CesaroBoundedness:
    cesaro_bounded: bool
    cesaro_bounded_empirical: bool
    cesaro_sup: float
    horizon: int
    aluthge_cesaro_bounded: bool
    vn_sequence_bounded: bool
    vn_weighted_bounded_w: bool
    vn_weighted_bounded_u: bool
    vn_sup: float
    discrepancies: tuple = ()

    def as_dict(self) -> dict:
        return {
            "cesaro_bounded": self.cesaro_bounded,
            "cesaro_bounded_empirical": self.cesaro_bounded_empirical,
            "cesaro_sup": self.cesaro_sup,
            "horizon": self.horizon,
            "conditions": {
                "a_T": self.cesaro_bounded,
                "b_aluthge": self.aluthge_cesaro_bounded,
                "c_vn": self.vn_sequence_bounded,
                "d_vn_Ew2": self.vn_weighted_bounded_w,
                "d_vn_Eu2_Ew2": self.vn_weighted_bounded_u,
            },
            "vn_sup": self.vn_sup,
        }


def _cesaro_formula(T: WceOperator) -> bool:
    # n^-1 |v_n(a)| stays bounded iff |a| <= 1; only atoms where T has a nonzero row matter
    live = support(np.abs(T.w) * T.E(np.abs(T.u)), SUPPORT_TOL)
    return _bounded_on(T.euw, live)


def cesaro_norms(T: WceOperator, horizon: int) -> np.ndarray:
    M = realize(T)
    stack = np.stack([cesaro_matrix(T, n, M) for n in range(1, horizon + 1)])
    return np.asarray(two_norm(stack, T.space.masses), dtype=float)


def cesaro_bounded_analysis(T: WceOperator, horizon: int = CESARO_HORIZON) -> CesaroBoundedness:
    """Per-atom Cesaro classification against the sampled ``||A_n(T)||``.

    Reports the four equivalent conditions: ``T`` and its Aluthge transform
    Cesaro bounded, ``n^-1 ||v_n||`` bounded, and the weighted ``v_n``
    sequence (read both with ``E(|w|^2)`` twice and with ``E(|u|^2) E(|w|^2)``).
    """
    a = T.euw
    formula = _cesaro_formula(T)
    hat = T.replace(p=2.0).aluthge()
    hat_formula = _cesaro_formula(hat)
    all_atoms = range(T.n)
    ew2 = T.E(np.abs(T.w) ** 2)
    eu2 = T.E(np.abs(T.u) ** 2)
    c_cond = _bounded_on(a, all_atoms)
    d_w = _bounded_on(a, support(ew2, SUPPORT_TOL))
    d_u = _bounded_on(a, support(np.sqrt(eu2 * ew2), SUPPORT_TOL))
    norms = cesaro_norms(T, horizon)
    # bounded Cesaro sequences of these operators never leave max(1, ||T||):
    # ||A_n|| <= (1 + (n - 1) ||T||) / n once |E(uw)| <= 1 on the live rows
    envelope = max(1.0, float(two_norm(realize(T), T.space.masses)))
    empirical = bool(norms.max() <= envelope * (1 + 1e-9))
    vn_sup = max(float(np.max(np.abs(geometric_weight(a, n)))) / n for n in range(1, horizon + 1))
    disc = ()
    if formula != empirical:
        disc = (Discrepancy("cesaro_bounded_analysis", formula, empirical,
                            f"per-atom |E(uw)| <= 1 vs ||A_n|| <= max(1, ||T||) = {envelope:.12g} "
                            f"up to n = {horizon}"),)
    return CesaroBoundedness(formula, empirical, float(norms.max()), horizon, hat_formula,
                             c_cond, d_w, d_u, vn_sup, disc)


def gelfand_estimate(T: WceOperator, n: int = GELFAND_POWER) -> float:
    """``||T^n||^(1/n)`` from plain matrix powers of the realized operator."""
    Mn = matrix_power(realize(T), n)
    return float(two_norm(Mn, T.space.masses)) ** (1.0 / n)


def _ascent(M: np.ndarray, k_max: int, tol: float) -> int | None:
    return chain_from_matrices([matrix_power(M, k) for k in range(k_max + 1)], tol).ascent


@dataclass(frozen=True)
class IMinusTReport:
    hypothesis_holds: bool
    ascent_i_minus_t: int | None
    ascent_i_minus_t_adjoint: int | None
    direct_sum: bool
    spectral_radius: float
    b_n_identity_error: float | None = None
    b_n_errors: dict = field(default_factory=dict)
    b_n_error_matches_law: bool | None = None
    neumann_matches_oracle: bool | None = None
    cesaro_limit_norm: float | None = None

    def as_dict(self) -> dict:
        return {
            "hypothesis_holds": self.hypothesis_holds,
            "ascent_i_minus_t": self.ascent_i_minus_t,
            "ascent_i_minus_t_adjoint": self.ascent_i_minus_t_adjoint,
            "direct_sum": self.direct_sum,
            "spectral_radius": self.spectral_radius,
            "b_n_identity_error": self.b_n_identity_error,
            "b_n_errors": {str(k): v for k, v in self.b_n_errors.items()},
            "b_n_error_matches_law": self.b_n_error_matches_law,
            "neumann_matches_oracle": self.neumann_matches_oracle,
            "cesaro_limit_norm": self.cesaro_limit_norm,
        }


def _rel(x, ref) -> float:
    return float(np.max(np.abs(x - ref)) / max(float(np.max(np.abs(ref))), 1e-300))


def i_minus_t_analysis(T: WceOperator, k_max: int = K_MAX, tol: float = RANK_TOL,
                       seed: int = 0, n_limit: int = 10 ** 4) -> IMinusTReport:
    """Ascent of ``I - T`` and ``I - T*``, the range/null direct sum of ``I - T``,
    and, for spectral radius below ``1 - NEUMANN_MARGIN``, the behaviour of ``B_n(T) f``.

    ``B_n f - (I - T)^-1 f = -(I - T)^-1 A_n(T) f`` holds exactly, so the
    convergence is first order in ``1/n``; the report records the error at
    ``n = 10^2, 10^3, n_limit`` and whether it equals that expression.
    """
    M = realize(T)
    mu = T.space.masses
    K = np.eye(T.n) - M
    asc = _ascent(K, k_max, tol)
    asc_adj = _ascent(weighted_adjoint(K, mu), k_max, tol)
    direct = complementary(K, tol)
    rho = T.spectral_radius()
    report = dict(hypothesis_holds=strict_power_criterion(T), ascent_i_minus_t=asc,
                  ascent_i_minus_t_adjoint=asc_adj, direct_sum=direct, spectral_radius=rho)
    if rho < 1 - NEUMANN_MARGIN:
        rng = XorShiftRng(seed)
        f = rng.complex_vector(T.n, 1.0)
        Rf = T.neumann_inverse_apply(f)
        oracle = invert(K) @ f
        identity_err = 0.0
        errors = {}
        law = True
        for n in sorted({100, 1000, n_limit}):
            bn = T.b_n_apply(n, f)
            lhs = bn - T.apply(bn)
            rhs = ((n - 1) * f - geometric_weight(T.euw, n) * T.apply(f)) / n
            identity_err = max(identity_err, _rel(lhs, rhs))
            err = bn - Rf
            predicted = -T.neumann_inverse_apply(T.cesaro_mean_apply(n, f))
            law = law and _rel(err, predicted) <= 1e-6
            errors[n] = float(np.linalg.norm(err) / np.linalg.norm(Rf))
        report.update(
            b_n_identity_error=identity_err,
            b_n_errors=errors,
            b_n_error_matches_law=law,
            neumann_matches_oracle=_rel(Rf, oracle) <= 1e-8,
            cesaro_limit_norm=float(np.linalg.norm(T.cesaro_mean_apply(n_limit, f))),
        )
    return IMinusTReport(**report)


def lemma_norm_check(T: WceOperator, lam: float, rtol: float = 1e-8) -> bool:
    """``||lam I + T*T|| = lam + ||T||^2`` and, for ``u = conj(w)``,
    ``||lam I + T|| = lam + ||T||``."""
    if T.p != 2:
        raise UnsupportedExponentError("the norm lemma is a Hilbert space statement")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    mu = T.space.masses
    M = realize(T)
    gram = weighted_adjoint(M, mu) @ M
    nT = float(two_norm(M, mu))
    lhs = float(two_norm(lam * np.eye(T.n) + gram, mu))
    rhs = lam + nT ** 2
    ok = abs(lhs - rhs) <= rtol * max(1.0, rhs)
    if np.allclose(T.u, np.conj(T.w), rtol=0, atol=1e-14):
        lhs2 = float(two_norm(lam * np.eye(T.n) + M, mu))
        ok = ok and abs(lhs2 - (lam + nT)) <= rtol * max(1.0, lam + nT)
    return bool(ok)

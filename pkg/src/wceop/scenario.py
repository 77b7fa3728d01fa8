"""Scenario files and seeded random operator generation.

A scenario is a JSON object::

    {"name": "running-example",
     "masses": [1, 1, 2, 1],
     "partition": [[0, 1], [2, 3]],
     "u": [[1, 0], [2, 0], [1, 0], [0, 0]],
     "w": [[1, 0], [1, 0], [3, 0], [1, 0]],
     "p": 2}

Atom indices in ``partition`` start at 0, complex numbers are ``[re, im]``
pairs and ``p`` is a number ``>= 1`` or the string ``"inf"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .condexp import cond_exp
from .measure import FiniteMeasureSpace, SigmaSubalgebra
from .operator import WceOperator
from .rng import XorShiftRng, instance_seed

REGIMES = ("free", "nilpotent", "contractive", "unimodular", "expanding")
SHAPES = ("complex", "nonnegative", "positive")

# diagnostic codes for load_scenario
E_JSON = "E_JSON"
E_FIELD = "E_FIELD"
E_MASS = "E_MASS"
E_PARTITION = "E_PARTITION"
E_LENGTH = "E_LENGTH"
E_EXPONENT = "E_EXPONENT"
E_VALUE = "E_VALUE"


class ScenarioError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


def _complex_list(values, field: str) -> np.ndarray:
    if not isinstance(values, list):
        raise ScenarioError(E_VALUE, f"'{field}' must be a list of [re, im] pairs")
    out = np.empty(len(values), dtype=complex)
    for i, v in enumerate(values):
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            out[i] = float(v)
            continue
        if (not isinstance(v, list) or len(v) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)):
            raise ScenarioError(E_VALUE, f"'{field}[{i}]' must be a [re, im] pair, got {v!r}")
        out[i] = complex(float(v[0]), float(v[1]))
    if not np.all(np.isfinite(out)):
        raise ScenarioError(E_VALUE, f"'{field}' holds non-finite values")
    return out


def operator_from_dict(data: dict) -> WceOperator:
    if not isinstance(data, dict):
        raise ScenarioError(E_FIELD, "scenario must be a JSON object")
    for key in ("masses", "partition", "u", "w", "p"):
        if key not in data:
            raise ScenarioError(E_FIELD, f"missing field '{key}'")
    masses = data["masses"]
    if not isinstance(masses, list) or not masses:
        raise ScenarioError(E_MASS, "'masses' must be a nonempty list of numbers")
    for i, m in enumerate(masses):
        if isinstance(m, bool) or not isinstance(m, (int, float)):
            raise ScenarioError(E_MASS, f"'masses[{i}]' is not a number: {m!r}")
        if not (math.isfinite(m) and m > 0):
            raise ScenarioError(E_MASS, f"'masses[{i}]' = {m!r} is not strictly positive")
    n = len(masses)
    u = _complex_list(data["u"], "u")
    w = _complex_list(data["w"], "w")
    for name, arr in (("u", u), ("w", w)):
        if arr.size != n:
            raise ScenarioError(E_LENGTH, f"'{name}' has {arr.size} entries but there are {n} atoms")
    part = data["partition"]
    if not isinstance(part, list) or not all(isinstance(b, list) for b in part):
        raise ScenarioError(E_PARTITION, "'partition' must be a list of index lists")
    for k, b in enumerate(part):
        for i in b:
            if isinstance(i, bool) or not isinstance(i, int):
                raise ScenarioError(E_PARTITION, f"'partition[{k}]' holds non-integer {i!r}")
    try:
        algebra = SigmaSubalgebra(tuple(tuple(b) for b in part), n)
    except ValueError as exc:
        raise ScenarioError(E_PARTITION, str(exc)) from None
    p = data["p"]
    if p == "inf":
        p = math.inf
    if isinstance(p, bool) or not isinstance(p, (int, float)) or not p >= 1:
        raise ScenarioError(E_EXPONENT, f"'p' must be a number >= 1 or \"inf\", got {data['p']!r}")
    space = FiniteMeasureSpace(np.array(masses, dtype=float))
    return WceOperator(space, algebra, u, w, float(p))


def parse_scenario(text: str) -> WceOperator:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(E_JSON, f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return operator_from_dict(data)


def load_scenario(path) -> WceOperator:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


def scenario_dict(T: WceOperator, name: str | None = None) -> dict:
    out = {
        "masses": [float(m) for m in T.space.masses],
        "partition": [list(b) for b in T.algebra.blocks],
        "u": [[float(z.real), float(z.imag)] for z in T.u],
        "w": [[float(z.real), float(z.imag)] for z in T.w],
        "p": "inf" if math.isinf(T.p) else T.p,
    }
    if name is not None:
        out = {"name": name, **out}
    return out


def dump_scenario(T: WceOperator, name: str | None = None) -> str:
    return json.dumps(scenario_dict(T, name), indent=2) + "\n"


def save_scenario(T: WceOperator, path, name: str | None = None) -> None:
    Path(path).write_text(dump_scenario(T, name), encoding="utf-8")


@dataclass(frozen=True)
class GeneratorConfig:
    """Settings for :func:`generate`.

    ``shape`` picks the weight family: complex entries, nonnegative reals, or
    the positive-operator case ``u = conj(w)``.
    """

    seed: int = 0
    max_points: int = 12
    regime: str = "free"
    sparsity: float = 0.2
    p: float = 2.0
    shape: str = "complex"

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}; choose from {REGIMES}")
        if self.shape not in SHAPES:
            raise ValueError(f"unknown shape {self.shape!r}; choose from {SHAPES}")
        if self.max_points < 1:
            raise ValueError("max_points must be >= 1")


# Blocks whose |E(uw)| falls below this fraction of E(|uw|) are redrawn, and
# live blocks must reach this fraction of the largest |E(uw)|.  Both keep the
# numerical ranks of T^k (k <= 6) far from the elimination threshold.
_CANCEL_FLOOR = 0.2
_BLOCK_FLOOR = 0.2
_MAX_TRIES = 200


def _draw_entry(rng: XorShiftRng, sparsity: float, shape: str) -> complex:
    if rng.random() < sparsity:
        return 0.0
    r = rng.uniform(0.5, 2.0)
    if shape == "nonnegative":
        return complex(r)
    phi = rng.uniform(0.0, 2.0 * math.pi)
    return complex(r * math.cos(phi), r * math.sin(phi))


def _random_partition(rng: XorShiftRng, n: int) -> list[list[int]]:
    atoms = list(range(n))
    rng.shuffle(atoms)
    m = rng.integers(1, n)
    cuts = list(range(1, n))
    rng.shuffle(cuts)
    bounds = [0] + sorted(cuts[: m - 1]) + [n]
    return [sorted(atoms[a:b]) for a, b in zip(bounds[:-1], bounds[1:])]


def _block_euw(mu, u, w, block):
    idx = list(block)
    prod = mu[idx] * u[idx] * w[idx]
    mass = mu[idx].sum()
    return prod.sum() / mass, np.abs(prod).sum() / mass


def _draw_block(rng, mu, block, sparsity, shape, u, w):
    for _ in range(_MAX_TRIES):
        for j in block:
            w[j] = _draw_entry(rng, sparsity, shape)
            u[j] = np.conj(w[j]) if shape == "positive" else _draw_entry(rng, sparsity, shape)
        euw, mag = _block_euw(mu, u, w, block)
        if mag == 0 or abs(euw) >= _CANCEL_FLOOR * mag:
            return
    # align phases so the block average cannot cancel
    for j in block:
        w[j] = abs(w[j]) * np.exp(-1j * np.angle(u[j])) if u[j] != 0 else w[j]


def _force_zero_block(mu, u, w, block, shape):
    """Adjust one w entry so that E(uw) vanishes on ``block``."""
    if shape != "complex":
        # sign-definite products cannot cancel; switch the block off instead
        for j in block:
            w[j] = 0.0
            if shape == "positive":
                u[j] = 0.0
        return
    nz = [j for j in block if u[j] != 0]
    if not nz:
        return
    j0 = nz[-1]
    rest = sum(mu[j] * u[j] * w[j] for j in block if j != j0)
    w[j0] = -rest / (mu[j0] * u[j0])


def _draw(rng: XorShiftRng, cfg: GeneratorConfig):
    n = rng.integers(1, cfg.max_points)
    mu = np.array([rng.uniform(0.1, 10.0) for _ in range(n)])
    blocks = _random_partition(rng, n)
    u = np.zeros(n, dtype=complex)
    w = np.zeros(n, dtype=complex)
    for b in blocks:
        _draw_block(rng, mu, b, cfg.sparsity, cfg.shape, u, w)
    if cfg.regime == "nilpotent":
        order = list(range(len(blocks)))
        rng.shuffle(order)
        for k in order[: rng.integers(1, len(blocks))]:
            _force_zero_block(mu, u, w, blocks[k], cfg.shape)
    vals = []
    for b in blocks:
        euw, mag = _block_euw(mu, u, w, b)
        vals.append(0.0 if abs(euw) <= 64 * np.finfo(float).eps * mag else abs(euw))
    top = max(vals)
    for b, v in zip(blocks, vals):
        if 0 < v < _BLOCK_FLOOR * top:
            return None
    return mu, blocks, u, w, top


def _target(rng: XorShiftRng, regime: str) -> float | None:
    if regime == "contractive":
        return rng.uniform(0.1, 0.9)
    if regime == "unimodular":
        return 1.0
    if regime == "expanding":
        return rng.uniform(1.2, 2.0)
    return None


def regime_holds(T: WceOperator, regime: str, tol: float = 1e-12) -> bool:
    rho = T.spectral_radius()
    if regime == "nilpotent":
        return any(np.all(T.euw[list(b)] == 0) for b in T.algebra.blocks)
    if regime == "contractive":
        return rho <= 0.9 + tol
    if regime == "unimodular":
        return abs(rho - 1.0) <= tol
    if regime == "expanding":
        return rho >= 1.2 - tol
    return True


def generate(config: GeneratorConfig) -> WceOperator:
    """Deterministic random operator for ``config.seed`` in ``config.regime``."""
    rng = XorShiftRng(config.seed)
    while True:
        drawn = _draw(rng, config)
        if drawn is None:
            continue
        mu, blocks, u, w, top = drawn
        target = _target(rng, config.regime)
        if target is not None:
            if top == 0:
                if config.regime == "contractive":
                    target = None
                else:
                    continue
            if target is not None:
                if config.shape == "positive":
                    s = math.sqrt(target / top)
                    u, w = u * s, w * s
                else:
                    w = w * (target / top)
        space = FiniteMeasureSpace(mu)
        algebra = SigmaSubalgebra(tuple(tuple(b) for b in blocks), len(mu))
        T = WceOperator(space, algebra, u, w, config.p)
        if regime_holds(T, config.regime):
            return T


def generate_instance(root_seed: int, index: int, regime: str = "free", p: float = 2.0,
                      max_points: int = 12, sparsity: float = 0.2,
                      shape: str = "complex") -> WceOperator:
    """The ``index``-th operator of the stream rooted at ``root_seed``."""
    cfg = GeneratorConfig(instance_seed(root_seed, index), max_points, regime, sparsity, p, shape)
    return generate(cfg)


def recompute_euw(T: WceOperator) -> np.ndarray:
    return cond_exp(T.u * T.w, T.algebra, T.space)

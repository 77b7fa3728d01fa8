"""Command line entry point: ``wceop analyze | verify | power | generate``.

Exit codes: ``analyze`` returns 0 when every theorem check holds and no
discrepancy is recorded, 2 when a discrepancy record is emitted (a failed
theorem check is reported as one), and 1 on input errors.  ``verify``
returns 0 iff every check passes on every instance and 1 otherwise.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .exceptions import WceError
from .oracle import RANK_TOL, polar_aluthge, realize, two_norm
from .rng import instance_seed
from .scenario import (
    REGIMES,
    SHAPES,
    GeneratorConfig,
    ScenarioError,
    dump_scenario,
    generate,
    load_scenario,
)
from .structure import (
    CESARO_HORIZON,
    DESCENT_C,
    GELFAND_POWER,
    K_MAX,
    POWER_HORIZON,
    Discrepancy,
    cesaro_bounded_analysis,
    chain_report,
    decomposition_theorem_check,
    gelfand_estimate,
    i_minus_t_analysis,
    lemma_norm_check,
    power_bounded_analysis,
    quasi_complement_check,
    verify_ascent_theorem,
    verify_corollary_sums,
    verify_descent_theorem,
)
from .suites import CHECKS, LEMMA_LAMBDAS, TOLERANCES, SuiteConfig, run_instance


def jsonable(x):
    """Plain JSON values: complex numbers become ``[re, im]``, infinities strings."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [jsonable(float(x.real)), jsonable(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def _parse_p(text: str) -> float:
    if text == "inf":
        return math.inf
    p = float(text)
    if not p >= 1:
        raise argparse.ArgumentTypeError(f"p must be >= 1 or 'inf', got {text}")
    return p


def _format_p(p: float) -> str:
    return "inf" if math.isinf(p) else repr(p)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _text_lines(report: dict, indent: int = 0) -> list[str]:
    lines = []
    pad = "  " * indent
    for key, value in report.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(_text_lines(value, indent + 1))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{pad}{key}:")
            for item in value:
                lines.append(f"{pad}  - " + ", ".join(f"{k}={v}" for k, v in item.items()))
        else:
            lines.append(f"{pad}{key}: {value}")
    return lines


def _render(report: dict, fmt: str) -> str:
    report = jsonable(report)
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    return "\n".join(_text_lines(report)) + "\n"


# -- analyze -------------------------------------------------------------------

def analyze_report(T, *, horizon: int = POWER_HORIZON, tol_rank: float = RANK_TOL,
                   k_max: int = K_MAX, seed: int = 0, name: str | None = None) -> dict:
    """Every analysis applicable to the operator's exponent, keyed by operation name."""
    disc: list[Discrepancy] = []
    finite_p = not math.isinf(T.p)
    rep: dict = {
        "command": "analyze",
        "scenario": name,
        "atoms": T.n,
        "p": T.p,
        "tolerances": {"rank": tol_rank, "descent_C": DESCENT_C, **TOLERANCES},
        "euw": T.euw,
    }
    if finite_p:
        bf = T.bound_functional()
        rep["bound_functional"] = {"values": bf, "norm_bound": float(np.max(bf))}
    else:
        rep["bound_functional"] = {"unsupported": "no boundedness criterion for p = inf"}
    rho = T.spectral_radius()
    est = gelfand_estimate(T, GELFAND_POWER)
    rep["spectral_radius_formula"] = rho
    rep["gelfand_estimate"] = {"n": GELFAND_POWER, "value": est}
    if abs(est - rho) > TOLERANCES["gelfand"] * max(1.0, rho):
        disc.append(Discrepancy("spectral_radius_formula", rho, est,
                                f"Gelfand estimate at n = {GELFAND_POWER}"))
    rep["chain_report"] = chain_report(T, k_max, tol_rank).as_dict()

    def theorem(key, value, note):
        rep[key] = value
        if value is False:
            disc.append(Discrepancy(key, True, False, note))

    theorem("verify_ascent_theorem", verify_ascent_theorem(T, k_max, tol_rank),
            "ascent above 2 or null chain not stable")
    descent = verify_descent_theorem(T, DESCENT_C, k_max, tol_rank)
    rep["verify_descent_theorem"] = {
        "applicable": descent is not None,
        "holds": descent,
        "C": DESCENT_C,
        "note": ("hypothesis read as min |E(uw)| >= C (moduli, since E(uw) is complex)"
                 + ("" if descent is not None else "; not satisfied, theorem inapplicable")),
    }
    if descent is False:
        disc.append(Discrepancy("verify_descent_theorem", True, False, "range chain not stable"))
    trivial, full = verify_corollary_sums(T, tol=tol_rank)
    rep["verify_corollary_sums"] = {"intersection_trivial": trivial, "full_sum": full}
    if not trivial or full is False:
        disc.append(Discrepancy("verify_corollary_sums", True, False, "corollary sums fail"))
    theorem("quasi_complement_check", quasi_complement_check(T, tol_rank),
            "R(T^2) and N(T^2) not complementary")
    theorem("decomposition_theorem_check", decomposition_theorem_check(T, tol_rank),
            "R(M_E(uw) T) and N(M_E(uw) T) not complementary")
    if finite_p:
        pb = power_bounded_analysis(T, horizon)
        rep["power_bounded_analysis"] = pb.as_dict()
        disc.extend(pb.discrepancies)
    else:
        rep["power_bounded_analysis"] = {"unsupported": "no boundedness criterion for p = inf"}
    cb = cesaro_bounded_analysis(T, CESARO_HORIZON)
    rep["cesaro_bounded_analysis"] = cb.as_dict()
    disc.extend(cb.discrepancies)
    rep["i_minus_t_analysis"] = i_minus_t_analysis(T, k_max, tol_rank, seed=seed).as_dict()
    if T.p == 2:
        rep["lemma_norm_check"] = {str(lam): lemma_norm_check(T, lam) for lam in LEMMA_LAMBDAS}
        for lam, ok in rep["lemma_norm_check"].items():
            if not ok:
                disc.append(Discrepancy("lemma_norm_check", True, False, f"lambda = {lam}"))
        hat = T.aluthge()
        Mhat = realize(hat)
        oracle = polar_aluthge(realize(T), T.space.masses)
        err = float(np.max(np.abs(Mhat - oracle))) / max(1.0, float(np.max(np.abs(oracle))))
        rep["aluthge"] = {
            "outer_weight": hat.w,
            "norm": float(two_norm(Mhat, T.space.masses)),
            "polar_oracle_error": err,
        }
        if err > TOLERANCES["aluthge"]:
            disc.append(Discrepancy("aluthge", "closed form", "polar oracle",
                                    f"relative difference {err:.3g}"))
    else:
        reason = "Hilbert space statement (p = 2 only)"
        rep["lemma_norm_check"] = {"unsupported": reason}
        rep["aluthge"] = {"unsupported": reason}
    rep["discrepancies"] = [d.as_dict() for d in disc]
    return rep


def cmd_analyze(args) -> int:
    try:
        T = load_scenario(args.scenario)
    except (OSError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        with open(args.scenario, encoding="utf-8") as fh:
            name = json.load(fh).get("name")
    except (OSError, ValueError, AttributeError):
        name = None
    rep = analyze_report(T, horizon=args.horizon, tol_rank=args.tol_rank, k_max=args.k_max,
                         seed=args.seed, name=name)
    _emit(_render(rep, args.format), args.out)
    return 2 if rep["discrepancies"] else 0


# -- verify --------------------------------------------------------------------

def _verify_one(job):
    root, index, regime, p, shape, max_points, config = job
    seed = instance_seed(root, index)
    T = generate(GeneratorConfig(seed, max_points, regime, 0.2, p, shape))
    return run_instance(T, index, seed, regime, config)


def _repro(args, index: int) -> str:
    return (f"wceop generate --seed {args.seed} --index {index} --regime {args.regime} "
            f"--p {_format_p(args.p)} --shape {args.shape} --max-points {args.max_points} "
            f"--out instance-{index}.json && wceop analyze instance-{index}.json")


def verify_report(args) -> dict:
    config = SuiteConfig(horizon=args.horizon, k_max=args.k_max, tol_rank=args.tol_rank)
    jobs = [(args.seed, i, args.regime, args.p, args.shape, args.max_points, config)
            for i in range(args.instances)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_verify_one, jobs))
    else:
        outcomes = [_verify_one(j) for j in jobs]
    counts = {name: {"pass": 0, "fail": 0, "skip": 0} for name in CHECKS}
    failures, discrepancies = [], []
    for o in outcomes:  # pool.map keeps instance order
        for name, res in o.results.items():
            counts[name][res.status] += 1
            if res.status == "fail":
                failures.append({"index": o.index, "seed": o.seed, "check": name,
                                 "detail": res.detail, "reproduce": _repro(args, o.index)})
        for d in o.discrepancies:
            discrepancies.append({"index": o.index, "seed": o.seed, **d})
    return {
        "command": "verify",
        "seed": args.seed,
        "instances": args.instances,
        "regime": args.regime,
        "p": args.p,
        "shape": args.shape,
        "max_points": args.max_points,
        "config": {"horizon": config.horizon, "cesaro_horizon": config.cesaro_horizon,
                   "k_max": config.k_max, "tol_rank": config.tol_rank},
        "tolerances": TOLERANCES,
        "checks": counts,
        "failures": failures,
        "discrepancies": discrepancies,
        "all_pass": not failures,
    }


def _verify_text(rep: dict) -> str:
    lines = [f"verify: seed {rep['seed']}, {rep['instances']} instances, regime {rep['regime']}, "
             f"p = {rep['p']}, shape {rep['shape']}",
             f"{'check':<30}{'pass':>6}{'fail':>6}{'skip':>6}"]
    for name, c in rep["checks"].items():
        lines.append(f"{name:<30}{c['pass']:>6}{c['fail']:>6}{c['skip']:>6}")
    for f in rep["failures"]:
        lines.append(f"FAIL instance {f['index']} {f['check']}: {f['detail']}")
        lines.append(f"  reproduce: {f['reproduce']}")
    for d in rep["discrepancies"]:
        lines.append(f"DISCREPANCY instance {d['index']} (seed {d['seed']}) {d['check']}: "
                     f"formula {d['formula']}, empirical {d['empirical']}; {d['note']}")
    lines.append("all checks passed" if rep["all_pass"] else
                 f"{len(rep['failures'])} check failure(s)")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    if args.instances < 1:
        print("error: --instances must be at least 1", file=sys.stderr)
        return 1
    rep = verify_report(args)
    text = _render(rep, "json") if args.format == "json" else _verify_text(jsonable(rep))
    _emit(text, args.out)
    return 0 if rep["all_pass"] else 1


# -- power / generate ----------------------------------------------------------

def cmd_power(args) -> int:
    try:
        T = load_scenario(args.scenario)
        Tn = T.power(args.n)
    except (OSError, ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    rep = {"command": "power", "n": args.n, "outer_weight": Tn.w, "inner_weight": Tn.u,
           "euw": T.euw}
    _emit(_render(rep, args.format), args.out)
    return 0


def cmd_generate(args) -> int:
    seed = args.seed if args.index is None else instance_seed(args.seed, args.index)
    try:
        cfg = GeneratorConfig(seed, args.max_points, args.regime, args.sparsity, args.p, args.shape)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    name = args.name or (f"{args.regime}-seed{args.seed}"
                         + ("" if args.index is None else f"-index{args.index}"))
    _emit(dump_scenario(generate(cfg), name), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wceop",
        description="Analyze and verify weighted conditional expectation operators.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_analysis=True):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out", help="write the report here instead of stdout")
        if with_analysis:
            p.add_argument("--horizon", type=int, default=POWER_HORIZON,
                           help="largest power sampled for power boundedness (>= 16)")
            p.add_argument("--tol-rank", type=float, default=RANK_TOL,
                           help="relative pivot tolerance for rank decisions")
            p.add_argument("--k-max", type=int, default=K_MAX,
                           help="longest power in null/range chains (>= 3)")

    a = sub.add_parser("analyze", help="full report for one scenario file")
    a.add_argument("scenario")
    a.add_argument("--seed", type=int, default=0, help="seed for random test vectors")
    common(a)
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="run every invariant suite on seeded random instances")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--instances", type=int, default=100)
    v.add_argument("--regime", choices=REGIMES, default="free")
    v.add_argument("--p", type=_parse_p, default=2.0)
    v.add_argument("--shape", choices=SHAPES, default="complex")
    v.add_argument("--max-points", type=int, default=12)
    v.add_argument("--jobs", type=int, default=1, help="worker processes")
    common(v)
    v.set_defaults(func=cmd_verify)

    pw = sub.add_parser("power", help="weights of T^n = M_g E M_u")
    pw.add_argument("scenario")
    pw.add_argument("--n", type=int, required=True)
    common(pw, with_analysis=False)
    pw.set_defaults(func=cmd_power)

    g = sub.add_parser("generate", help="emit a seeded random scenario file")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--index", type=int, help="take the index-th instance of the seed's stream")
    g.add_argument("--regime", choices=REGIMES, default="free")
    g.add_argument("--p", type=_parse_p, default=2.0)
    g.add_argument("--shape", choices=SHAPES, default="complex")
    g.add_argument("--max-points", type=int, default=12)
    g.add_argument("--sparsity", type=float, default=0.2)
    g.add_argument("--name")
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for flag in ("horizon", "k_max"):
        if getattr(args, flag, None) is not None:
            minimum = 16 if flag == "horizon" else 3
            if getattr(args, flag) < minimum:
                print(f"error: --{flag.replace('_', '-')} must be at least {minimum}",
                      file=sys.stderr)
                return 1
    try:
        return args.func(args)
    except WceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

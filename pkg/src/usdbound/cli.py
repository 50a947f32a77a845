"""``usd`` command line: bound, solve, schmidt, closed-form, examples.

Exit status: 0 on success, 1 when a tolerance check fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .closed_forms import applicable_forms
from .corpus import run_corpus
from .phase_bound import MinimizerConfig, minimize_bound
from .report import FORMATS, emit_report
from .schmidt import (
    check_phase_shift_equivalence,
    conversion_probability,
    eta_family,
    schmidt_spectrum,
    vidal_probability,
)
from .solver import SolverConfig, brute_force_oracle, solve_optimal
from .statesets import InstanceError, load_stateset

EXIT_OK, EXIT_TOLERANCE, EXIT_INPUT = 0, 1, 2


def _vec(x) -> list[float]:
    return [float(v) for v in np.asarray(x).ravel()]


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif args.format == "csv":
        keys = sorted(k for k, v in payload.items() if not isinstance(v, (list, dict)))
        print(",".join(keys))
        print(",".join(str(payload[k]) for k in keys))
    else:
        print("\n".join(lines))


def _fmt(xs) -> str:
    return "(" + ", ".join(f"{v:.4f}" for v in xs) + ")"


def _minimizer_cfg(args) -> MinimizerConfig:
    kw = {"seed": args.seed}
    if getattr(args, "starts", None) is not None:
        kw["n_starts"] = args.starts
    if args.tol is not None and args.command in ("bound", "schmidt", "closed-form"):
        kw["tol"] = args.tol
    return MinimizerConfig(**kw)


def cmd_bound(args) -> int:
    states = load_stateset(args.instance, normalize=args.normalize)
    res = minimize_bound(states, _minimizer_cfg(args))
    payload = {
        "value": res.value,
        "argmin": _vec(res.argmin),
        "starts_used": res.starts_used,
        "best_gradient_norm": res.best_gradient_norm,
        "converged": res.converged,
    }
    _emit(args, payload, [
        f"bound        {res.value:.4f}",
        f"argmin theta {_fmt(res.argmin)}",
        f"starts       {res.starts_used}",
        f"|grad|       {res.best_gradient_norm:.2e}",
        f"converged    {res.converged}",
    ])
    return EXIT_OK if res.converged else EXIT_TOLERANCE


def cmd_solve(args) -> int:
    states = load_stateset(args.instance, normalize=args.normalize)
    cfg = SolverConfig(minimizer=_minimizer_cfg(args))
    if args.tol is not None:
        cfg = SolverConfig(t_final=args.tol, minimizer=cfg.minimizer)
    res = solve_optimal(states, cfg)
    povm = res.povm
    payload = {
        "gamma_opt": _vec(res.gamma_opt.gamma),
        "sigma_min": res.gamma_opt.sigma_min,
        "p_opt": res.p_opt,
        "class": str(res.solution_class.label),
        "eigen_gap": res.solution_class.gap,
        "bound": res.bound,
        "bound_gap": res.bound_gap,
        "povm_valid": res.povm_valid,
        "povm_success_residual": povm.success_residual,
        "povm_inconclusive_min_eig": povm.inconclusive_min_eig,
        "converged": res.converged,
    }
    lines = [
        f"gamma_opt  {_fmt(res.gamma_opt.gamma)}",
        f"P_opt      {res.p_opt:.4f}",
        f"class      {res.solution_class.label}",
        f"bound      {res.bound:.4f}",
        f"bound gap  {res.bound_gap:.4f}",
        f"POVM       {'valid' if res.povm_valid else 'INVALID'}"
        f" (success residual {povm.success_residual:.1e}, inconclusive min eig {povm.inconclusive_min_eig:.1e})",
    ]
    status = EXIT_OK if (res.converged and res.povm_valid) else EXIT_TOLERANCE
    if args.oracle or args.grid is not None:
        oracle = brute_force_oracle(states, args.grid)
        payload["oracle"] = oracle
        lines.append(f"grid oracle {oracle:.4f}")
        if oracle > res.p_opt + 1e-9:
            status = EXIT_TOLERANCE
    _emit(args, payload, lines)
    return status


def cmd_schmidt(args) -> int:
    states = load_stateset(args.instance, normalize=args.normalize)
    n = states.n_states
    if args.theta:
        rest = [float(t) for t in args.theta.split(",")]
        if len(rest) != n - 1:
            raise InstanceError(f"--theta needs {n - 1} comma-separated values")
        theta = np.array([0.0, *rest])
    else:
        theta = minimize_bound(states, _minimizer_cfg(args)).argmin
    fam = eta_family(states, theta)
    spec = schmidt_spectrum(states, theta)
    vidal = vidal_probability(spec)
    conv = conversion_probability(states, theta)
    residuals = [check_phase_shift_equivalence(states, k, theta).residual for k in range(1, n + 1)]
    payload = {
        "theta": _vec(theta),
        "eta_norms_sq": _vec(fam.norms_sq),
        "spectrum": _vec(spec.coeffs),
        "vidal_probability": vidal,
        "conversion_probability": conv,
        "phase_shift_residuals": residuals,
    }
    _emit(args, payload, [
        f"theta            {_fmt(theta)}",
        f"||eta_k||^2      {_fmt(fam.norms_sq)}",
        f"spectrum         {_fmt(spec.coeffs)}",
        f"Vidal prob.      {vidal:.4f}",
        f"min ||eta_k||^2  {conv:.4f}",
        "shift residuals  " + ", ".join(f"{r:.1e}" for r in residuals),
    ])
    return EXIT_OK if max(residuals) < 1e-12 and abs(vidal - conv) < 1e-12 else EXIT_TOLERANCE


def cmd_closed_form(args) -> int:
    states = load_stateset(args.instance, normalize=args.normalize)
    forms = applicable_forms(states)
    bound = minimize_bound(states, _minimizer_cfg(args)).value
    payload = {"bound": bound, "forms": {f.formula_id: f.value for f in forms}}
    lines = [f"numerical bound  {bound:.4f}"]
    if not forms:
        lines.append("no closed form applies")
    lines += [f"{f.formula_id:<30} {f.value:.4f}" for f in forms]
    _emit(args, payload, lines)
    return EXIT_OK if all(abs(f.value - bound) <= 2e-6 for f in forms) else EXIT_TOLERANCE


def cmd_examples(args) -> int:
    try:
        results = run_corpus(args.filter, seed=args.seed, tol=args.tol)
    except ValueError as exc:
        raise InstanceError(str(exc)) from exc
    sys.stdout.write(emit_report(results, args.format))
    return EXIT_OK if all(r.passed for r in results) else EXIT_TOLERANCE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="seed for the random starts")
    common.add_argument("--tol", type=float, default=None, help="convergence tolerance")
    common.add_argument("--format", choices=FORMATS, default="text")
    common.add_argument("--normalize", action="store_true", help="rescale states and priors")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="usd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", parents=[common], help="minimize the phase bound")
    p.add_argument("instance")
    p.add_argument("--starts", type=int, default=None, help="number of random starts")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("solve", parents=[common], help="exact optimum over the feasible set")
    p.add_argument("instance")
    p.add_argument("--oracle", action="store_true", help="also run the grid oracle")
    p.add_argument("--grid", type=int, default=None, help="grid oracle resolution")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("schmidt", parents=[common], help="eta norms, spectrum and Vidal probability")
    p.add_argument("instance")
    p.add_argument("--theta", default=None, help="theta_2,...,theta_N (default: bound argmin)")
    p.set_defaults(func=cmd_schmidt)

    p = sub.add_parser("closed-form", parents=[common], help="applicable analytic bounds")
    p.add_argument("instance")
    p.set_defaults(func=cmd_closed_form)

    p = sub.add_parser("examples", parents=[common], help="run the built-in corpus")
    p.add_argument("--filter", default=None, help="regular expression on case names")
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (InstanceError, OSError) as exc:
        print(f"usd: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Four subcommands: certify (rank certificates), solve (fixed points and
closed-loop data), verify (batch residual checks), generate (random
certified systems).  Reports go to stdout, diagnostics and timing to
stderr.  Exit codes: 0 success, 1 usage/parse error, 2 uncertified system,
3 no convergence, 4 residual or certificate failure, 5 generation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .dare import solve_fixed_point
from .errors import NoConvergence, RiccatiLabError, UncertifiedSystem
from .matrices import spectral_radius
from .sysfile import load_system, save_system
from .systems import certify, random_system
from .verification import analysis_report

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the contract here is 1
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _print_matrix(label: str, M) -> None:
    print(f"{label}:")
    for row in np.asarray(M):
        print("  " + "  ".join(_fmt(v) for v in row))


def _load(path):
    try:
        return load_system(path)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None


def cmd_certify(args) -> int:
    loaded = _load(args.path)
    if loaded is None:
        return 1
    system, meta = loaded
    cert = certify(system)
    r = system.dim
    name = meta.get("name", "")
    print(f"system: {args.path}" + (f" ({name})" if name else ""))
    print(f"dim: {r}")
    print(
        f"controllability rank: {cert.ctrl_rank}/{r} "
        f"[{'PASS' if cert.controllable else 'FAIL'}]"
    )
    print(
        f"observability rank: {cert.obs_rank}/{r} "
        f"[{'PASS' if cert.observable else 'FAIL'}]"
    )
    print(f"lambda_min(AA' + R): {_fmt(cert.reach_pd_min_eig)}")
    print(f"certified: {'PASS' if cert.certified else 'FAIL'}")
    return 0 if cert.certified else 2


def cmd_solve(args) -> int:
    loaded = _load(args.path)
    if loaded is None:
        return 1
    system, _ = loaded
    if not certify(system).certified:
        print("error: system fails the rank certificates; not solving",
              file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    try:
        fp = solve_fixed_point(system, tol=args.tol, max_iter=args.max_iter)
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except RiccatiLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    elapsed = time.perf_counter() - t0
    print(f"solve time: {elapsed:.3f}s", file=sys.stderr)

    if args.json:
        report = {
            "dim": fp.dim,
            "iterations": fp.iterations,
            "residual": fp.residual,
            "rho_E": fp.rho_E,
            "rho_Ehat": fp.rho_Ehat,
            "Pinf": fp.Pinf.values.tolist(),
            "Phat_inf": fp.Phat_inf.values.tolist(),
            "E": fp.E.tolist(),
            "Ehat": fp.Ehat.tolist(),
            "F": fp.F.values.tolist(),
            "H": fp.H.values.tolist(),
        }
        print(json.dumps(report, indent=2))
        return 0
    print(f"dim: {fp.dim}")
    print(f"iterations: {fp.iterations}")
    print(f"residual: {_fmt(fp.residual)}")
    print(f"rho(E): {_fmt(fp.rho_E)}")
    print(f"rho(Ehat): {_fmt(fp.rho_Ehat)}")
    for label, M in (
        ("Pinf", fp.Pinf.values),
        ("Phat_inf", fp.Phat_inf.values),
        ("E", fp.E),
        ("Ehat", fp.Ehat),
        ("F", fp.F.values),
        ("H", fp.H.values),
    ):
        _print_matrix(label, M)
    return 0


def cmd_verify(args) -> int:
    loaded = _load(args.path)
    if loaded is None:
        return 1
    system, meta = loaded
    r = system.dim
    if not certify(system).certified:
        print("error: system fails the rank certificates; not verifying",
              file=sys.stderr)
        return 2
    if args.n is not None and args.n < r:
        print(f"error: --n must be >= r = {r} (factorization horizons below "
              "the dimension are not certified)", file=sys.stderr)
        return 1
    if args.trials < 1:
        print("error: --trials must be >= 1", file=sys.stderr)
        return 1
    if not 0.0 <= args.epsilon < 1.0:
        print("error: --epsilon must be in [0, 1)", file=sys.stderr)
        return 1
    try:
        report = analysis_report(
            system,
            name=meta.get("name", ""),
            n=args.n,
            trials=args.trials,
            seed=args.seed,
            epsilon=args.epsilon,
            parallel=args.parallel,
        )
    except RiccatiLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    print(f"verify time: {report.elapsed:.3f}s", file=sys.stderr)

    if args.json:
        print(json.dumps(report.to_json_dict(), indent=2))
    else:
        print(f"system: {args.path}" + (f" ({report.name})" if report.name else ""))
        print(f"dim: {report.dim}  n: {report.n}  trials: {report.trials}  "
              f"seed: {report.seed}  epsilon: {_fmt(report.epsilon)}")
        c = report.certificate
        print(f"ranks: ctrl {c['ctrl_rank']}/{report.dim}, "
              f"obs {c['obs_rank']}/{report.dim}; "
              f"rho(E) = {_fmt(c['rho_E'])}, rho(Ehat) = {_fmt(c['rho_Ehat'])}")
        f = report.fixed_point
        print(f"fixed point: iterations {f['iterations']}, "
              f"residual {_fmt(f['residual'])}")
        print(f"iota bound: {_fmt(report.floquet['iota'])}")
        b = report.bounds
        print(f"bounds: n_epsilon = {b['n_epsilon']} "
              f"(persists: {b['persists']}), "
              f"lower margin {_fmt(b['min_lower_margin'])}, "
              f"upper margin {_fmt(b['min_upper_margin'])}")
        print("checks:")
        for chk in report.checks:
            status = "PASS" if chk.ok else "FAIL"
            print(f"  {chk.name:<20} worst {chk.worst: .3e}  "
                  f"budget {chk.budget:.1e}  [{status}]")
        print(f"result: {'PASS' if report.ok else 'FAIL'}")
    if not report.ok:
        print(f"first failing check: {report.first_failure}", file=sys.stderr)
        return 4
    return 0


def cmd_generate(args) -> int:
    if args.dim < 1:
        print("error: --dim must be >= 1", file=sys.stderr)
        return 1
    try:
        system = random_system(
            args.dim,
            rng=args.seed,
            spectral_radius_target=args.spectral_radius,
            rank_r=args.rank_r,
            rank_s=args.rank_s,
            max_attempts=1000,
        )
    except UncertifiedSystem as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    cert = certify(system)
    metadata = {
        "name": args.name or f"random-r{args.dim}-seed{args.seed}",
        "seed": args.seed,
        "certified": True,
        "ctrl_rank": cert.ctrl_rank,
        "obs_rank": cert.obs_rank,
        "spectral_radius_A": spectral_radius(system.A),
    }
    save_system(args.out, system, metadata)
    print(f"wrote certified system (dim {args.dim}, seed {args.seed}) to {args.out}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="riccati-lab",
        description="Riccati difference equation workbench: fixed points, "
        "factorization certificates, and uniform bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="check the rank certificates")
    p.add_argument("path", help="system JSON file")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("solve", help="compute fixed points and closed-loop data")
    p.add_argument("path", help="system JSON file")
    p.add_argument("--tol", type=float, default=None,
                   help="fixed-point stopping tolerance (default 1e-12, "
                   "or RICCATI_LAB_TOL)")
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="run the residual check battery")
    p.add_argument("path", help="system JSON file")
    p.add_argument("--n", type=int, default=None,
                   help="horizon for the factorization checks (default r)")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--parallel", action="store_true",
                   help="evaluate trials on a thread pool")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="write a random certified system")
    p.add_argument("out", help="output path")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--spectral-radius", type=float, default=None,
                   help="rescale A to this spectral radius")
    p.add_argument("--rank-r", type=int, default=None,
                   help="inner rank of R (default dim)")
    p.add_argument("--rank-s", type=int, default=None,
                   help="inner rank of S (default dim)")
    p.add_argument("--name", default=None, help="metadata name")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Subcommands:

    verify <suite>          run a named verification suite
    ansatz solve|ckem|plot  interval profiles: solve, constant-curvature, SVG
    blowup catalog|verify|search   critical slopes on the blow-up polygon
    futaki eval             weighted average and character at a given potential

A config file (``--config path``) holds ``key = value`` lines mirroring the
long flags (``seed = 3``, ``p = 0.95``); explicit command-line flags win.
Exit status is 0 exactly when every executed check passed, 1 on a domain or
arithmetic error, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import ansatz
from .catalog import (catalog_csv, catalog_entries, critical_search,
                      search_vanishing_offset, verify_vanishing)
from .invariants import WeightedFutakiEvaluator
from .plotting import plot_profile
from .polytope import AffineHamiltonian, QuadratureRule, make_blowup_polytope
from .report import emit
from .suites import SUITES, SuiteConfig, run_suite


def _load_config_tokens(path: str) -> list[str]:
    tokens = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                key, _, val = line.partition("=")
            else:
                key, _, val = line.partition(" ")
            key, val = key.strip(), val.strip()
            if not key or not val:
                raise ValueError(f"malformed config line {line!r} in {path}")
            tokens.extend([f"--{key}", val])
    return tokens


def _inject_config(argv: list[str]) -> list[str]:
    """Splice config-file tokens in before explicit flags so the flags win."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ValueError("--config requires a file path")
    tokens = _load_config_tokens(argv[i + 1])
    rest = argv[:i] + argv[i + 2:]
    j = 0
    while j < len(rest) and not rest[j].startswith("-"):
        j += 1
    return rest[:j] + tokens + rest[j:]


def _print_reports(reports) -> bool:
    ok = True
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.check_id}  residual={r.residual:.3e}  "
              f"tolerance={r.tolerance:.3e}  [{r.provenance}]")
        ok &= r.passed
    print(f"{sum(r.passed for r in reports)}/{len(reports)} checks passed")
    return ok


def _cmd_verify(args) -> int:
    config = SuiteConfig(seed=args.seed, tol_scale=args.tol)
    reports = run_suite(args.suite, config)
    ok = _print_reports(reports)
    if args.out:
        emit(reports, args.format, args.out)
        print(f"wrote {args.format} to {args.out}")
    return 0 if ok else 1


def _write_profile(profile, args) -> None:
    if not args.out:
        return
    if args.format == "json":
        with open(args.out, "w") as fh:
            fh.write(ansatz.profile_to_json(profile))
    else:
        ansatz.profile_csv(profile, args.out)
    print(f"wrote {args.format} to {args.out}")


def _describe_profile(profile) -> None:
    cert = ansatz.positivity_certificate(profile)
    print(f"m={profile.m} interval=[{profile.t_min:g}, {profile.t_max:g}]")
    print(f"A={profile.coef_A:.12g} B={profile.coef_B:.12g} "
          f"c={profile.base_scalar:.12g} d={profile.lin_d:.12g} "
          f"e={profile.const_e:.12g}")
    print(f"positivity: {cert.kind} (min {cert.min_value:.6g} "
          f"at t={cert.min_location:.6g})")


def _cmd_ansatz_solve(args) -> int:
    profile = ansatz.solve_boundary_value(args.m, args.a, args.b, args.B)
    _describe_profile(profile)
    _write_profile(profile, args)
    return 0


def _cmd_ansatz_ckem(args) -> int:
    result = ansatz.find_ckem(args.m, args.a, args.b)
    print(f"constant-curvature member at B*={result.coef_B_star:.12g}, "
          f"feasible={result.feasible}")
    _describe_profile(result.profile)
    _write_profile(result.profile, args)
    return 0


def _cmd_ansatz_plot(args) -> int:
    profile = ansatz.solve_boundary_value(args.m, args.a, args.b, args.B)
    out = args.out or "profile.svg"
    plot_profile(profile, what=args.what, path=out)
    print(f"wrote svg to {out}")
    return 0


def _cmd_blowup_catalog(args) -> int:
    entries = catalog_entries(args.p, family_b=args.B)
    for e in entries:
        if e.valid:
            print(f"case {e.case_id}: a={e.slope_a:+.12g}  b={e.slope_b:+.12g}")
        else:
            print(f"case {e.case_id}: invalid ({e.reason})")
    if args.out:
        if args.format == "csv":
            rows = [{"case_id": e.case_id, "p": e.p, "a": e.slope_a,
                     "b": e.slope_b, "valid": e.valid} for e in entries]
            catalog_csv(rows, args.out)
        else:
            with open(args.out, "w") as fh:
                json.dump([{"case_id": e.case_id, "p": e.p, "a": e.slope_a,
                            "b": e.slope_b, "valid": e.valid,
                            "reason": e.reason} for e in entries], fh, indent=2)
        print(f"wrote {args.format} to {args.out}")
    return 0


def _cmd_blowup_verify(args) -> int:
    entries = catalog_entries(args.p, family_b=args.B)
    if args.case is not None:
        entries = [e for e in entries if e.case_id == args.case]
        if not entries:
            print(f"error: no case {args.case}", file=sys.stderr)
            return 2
    reports = []
    rows = []
    skipped = 0
    for entry in entries:
        if not entry.valid:
            if args.case is not None:
                print(f"error: case {entry.case_id} invalid at p={args.p:g}: "
                      f"{entry.reason}", file=sys.stderr)
                return 1
            skipped += 1
            continue
        rep = verify_vanishing(entry, m=args.m, rule=QuadratureRule(),
                               tol=args.tol)
        reports.append(rep)
        rows.append({"case_id": entry.case_id, "p": entry.p,
                     "a": entry.slope_a, "b": entry.slope_b, "valid": True,
                     "c_star": rep.computed["c_star"],
                     "residual": rep.computed["residual_norm"],
                     "pass": rep.passed})
    if skipped:
        print(f"(skipped {skipped} invalid cases)")
    ok = _print_reports(reports)
    if args.out:
        if args.format == "csv":
            catalog_csv(rows, args.out)
        else:
            emit(reports, "json", args.out)
        print(f"wrote {args.format} to {args.out}")
    return 0 if ok else 1


def _cmd_blowup_search(args) -> int:
    roots = critical_search(args.p, solver_tol=args.tol)
    print(f"found {len(roots)} critical slopes at offset 1, p={args.p:g}:")
    for a, b in roots:
        print(f"  a={a:+.12g}  b={b:+.12g}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump([{"a": a, "b": b} for a, b in roots], fh, indent=2)
        print(f"wrote json to {args.out}")
    return 0


def _cmd_futaki_eval(args) -> int:
    if args.c is not None:
        evaluator = WeightedFutakiEvaluator(make_blowup_polytope(args.p), args.m)
        f = AffineHamiltonian(args.a, args.b, args.c)
        directions = (AffineHamiltonian(1.0, 0.0, 0.0),
                      AffineHamiltonian(0.0, 1.0, 0.0))
        cbar, fut = evaluator.average_and_futaki(f, directions)
        print(f"potential ({args.a:g})*mu1 + ({args.b:g})*mu2 + ({args.c:g})"
              f" on blow-up p={args.p:g}, m={args.m}")
        print(f"cbar = {cbar:.12g}")
        print(f"Fut(mu1) = {fut[0]:.6e}   Fut(mu2) = {fut[1]:.6e}   "
              f"norm = {float(abs(fut[0]) ** 2 + abs(fut[1]) ** 2) ** 0.5:.6e}")
        return 0
    res = search_vanishing_offset(args.p, args.a, args.b, args.m)
    print(f"offset sweep for slope ({args.a:g}, {args.b:g}) on blow-up "
          f"p={args.p:g}, m={args.m}")
    print(f"feasible window: {res.feasible}")
    if res.feasible:
        print(f"best offset c* = {res.c_star:.12g}")
        print(f"residual = {res.residual:.6e}  scale = {res.scale:.6e}  "
              f"ratio = {res.residual / res.scale:.6e}")
        print(f"offsets with a sign change: {len(res.c_roots)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ckemlab",
        description="verification toolkit for weighted extremal toric geometry")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *names):
        if "p" in names:
            p.add_argument("--p", type=float, required=True,
                           help="blow-up size parameter in (0,1)")
        if "m" in names:
            p.add_argument("--m", type=int, default=2, help="dimension parameter")
        if "ab" in names:
            p.add_argument("--a", type=float, required=True)
            p.add_argument("--b", type=float, required=True)
        if "out" in names:
            p.add_argument("--out", default=None, help="output file path")
            p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--config", default=None, help=argparse.SUPPRESS)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("suite", choices=sorted(SUITES))
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--tol", type=float, default=1.0,
                          help="multiplier applied to every stated tolerance")
    common(p_verify, "out")
    p_verify.set_defaults(func=_cmd_verify)

    p_ansatz = sub.add_parser("ansatz", help="interval profile commands")
    asub = p_ansatz.add_subparsers(dest="subcommand", required=True)
    p_solve = asub.add_parser("solve", help="solve the boundary-value problem")
    common(p_solve, "m", "ab", "out")
    p_solve.add_argument("--B", type=float, default=0.0,
                         help="free leading coefficient of the family")
    p_solve.set_defaults(func=_cmd_ansatz_solve)
    p_ckem = asub.add_parser("ckem", help="constant-curvature member")
    common(p_ckem, "m", "ab", "out")
    p_ckem.set_defaults(func=_cmd_ansatz_ckem)
    p_plot = asub.add_parser("plot", help="render the profile as SVG")
    common(p_plot, "m", "ab", "out")
    p_plot.add_argument("--B", type=float, default=0.0)
    p_plot.add_argument("--what", choices=("psi", "s_tilde", "both"),
                        default="both")
    p_plot.set_defaults(func=_cmd_ansatz_plot)

    p_blowup = sub.add_parser("blowup", help="blow-up polygon commands")
    bsub = p_blowup.add_subparsers(dest="subcommand", required=True)
    p_cat = bsub.add_parser("catalog", help="print the seven slope families")
    common(p_cat, "p", "out")
    p_cat.add_argument("--B", type=float, default=None,
                       help="family parameter for the two-parameter cases")
    p_cat.set_defaults(func=_cmd_blowup_catalog)
    p_bver = bsub.add_parser("verify", help="certify the vanishing obstruction")
    common(p_bver, "p", "m", "out")
    p_bver.add_argument("--B", type=float, default=None,
                        help="family parameter for the two-parameter cases")
    p_bver.add_argument("--case", type=int, default=None,
                        help="restrict to one case id (1..7)")
    p_bver.add_argument("--tol", type=float, default=1e-4,
                        help="certification threshold relative to scale")
    p_bver.set_defaults(func=_cmd_blowup_verify)
    p_bsearch = bsub.add_parser("search", help="rediscover critical slopes")
    common(p_bsearch, "p", "out")
    p_bsearch.add_argument("--tol", type=float, default=1e-8,
                           help="solver convergence tolerance")
    p_bsearch.set_defaults(func=_cmd_blowup_search)

    p_fut = sub.add_parser("futaki", help="weighted character evaluation")
    fsub = p_fut.add_subparsers(dest="subcommand", required=True)
    p_eval = fsub.add_parser("eval", help="evaluate at a slope, or sweep offsets")
    common(p_eval, "p", "m")
    p_eval.add_argument("--a", type=float, required=True,
                        help="first slope component of the potential")
    p_eval.add_argument("--b", type=float, required=True,
                        help="second slope component of the potential")
    p_eval.add_argument("--c", type=float, default=None,
                        help="offset; omit to sweep for a vanishing offset")
    p_eval.set_defaults(func=_cmd_futaki_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _inject_config(argv)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

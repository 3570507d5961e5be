"""Command-line surface: validate, norm, operator, construct, verify.

Exit codes are a stable contract: 0 success, 1 domain-level failure
(invalid metric, failed verification, solver trouble), 2 input error
(unreadable file, malformed JSON, bad arguments).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import constructions as con
from .errors import FreeLipError, InputError
from .molecule import Molecule, canonicalize
from .norms import norm as norm_dispatch
from .norms import norm_dual_lp, norm_flow, norm_line
from .numbers import REL_TOL
from .operators import (
    bilip_constants,
    check_nonreturning,
    check_support_preservation,
    embedding_modulus,
    linearize,
)
from .serialize import (
    load_map,
    load_molecule,
    load_space,
    save_map,
    save_molecule,
    save_space,
    write_json,
)
from .space import distance_set_measure
from .verify import FIXTURES, SUITE_NAMES, RunConfig, run_verification

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_INPUT = 2


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2, sort_keys=True, default=str)
    sys.stdout.write("\n")


def _num_out(value) -> dict:
    out = {"value": float(value)}
    if isinstance(value, Fraction):
        out["exact"] = str(value)
    return out


def cmd_validate(args) -> int:
    try:
        space = load_space(args.path)
    except InputError as exc:
        _emit({"valid": False, "error": str(exc), "kind": "input"})
        return EXIT_INPUT
    except FreeLipError as exc:
        _emit({"valid": False, "error": str(exc),
               "kind": type(exc).__name__})
        return EXIT_DOMAIN
    _emit({"valid": True, "name": space.name, "points": len(space),
           "mode": space.mode})
    return EXIT_OK


def cmd_norm(args) -> int:
    space = load_space(args.space)
    mu = load_molecule(args.molecule, space)
    result = norm_dispatch(mu, method=args.method,
                           rational=True if args.rational else None,
                           tol=args.tol)
    payload = {"norm": float(result["norm"]), "method": args.method}
    if isinstance(result["norm"], Fraction):
        payload["norm_exact"] = str(result["norm"])
    if "gap" in result:
        payload["gap"] = result["gap"]
    for key in ("lp", "flow", "line"):
        if key in result:
            payload[key] = float(result[key])
    _emit(payload)
    return EXIT_OK


def cmd_operator(args) -> int:
    domain = load_space(args.domain)
    codomain = load_space(args.codomain)
    pmap = load_map(args.map, domain, codomain)
    op = linearize(pmap)
    checks = args.check or ["rank"]
    payload: dict = {"domain": domain.name, "codomain": codomain.name}
    if "rank" in checks or "all" in checks:
        kernel = op.kernel_basis()
        payload["rank"] = op.rank()
        payload["injective"] = op.is_injective
        payload["kernel"] = [sorted((lab, str(c)) for lab, c in k.terms.items())
                             for k in kernel]
    if "bilip" in checks or "all" in checks:
        bl = bilip_constants(pmap)
        payload["bilip"] = {"lower": _num_out(bl.lower),
                            "upper": _num_out(bl.upper),
                            "min_pair": bl.min_pair, "max_pair": bl.max_pair}
    if ("support" in checks or "all" in checks) and args.molecule:
        mu = load_molecule(args.molecule, domain)
        rep = check_support_preservation(pmap, mu)
        payload["support"] = {"lhs": sorted(rep.lhs), "rhs": sorted(rep.rhs),
                              "inclusion": rep.inclusion_holds,
                              "equality": rep.equality_holds}
    if ("nonreturning" in checks or "all" in checks) and args.point:
        if args.radius is None:
            raise InputError("--radius is required for the nonreturning sweep")
        rep = check_nonreturning(pmap, args.point, Fraction(args.radius),
                                 Fraction(args.rho) if args.rho else None)
        payload["nonreturning"] = {
            "rho_sup": (None if rep.rho_sup == float("inf")
                        else float(rep.rho_sup)),
            "satisfied": rep.satisfied,
            "witness": rep.witness and [rep.witness[0], float(rep.witness[1])],
        }
    if "modulus" in checks or "all" in checks:
        bracket = embedding_modulus(op)
        payload["embedding_modulus"] = {
            "lower": None if bracket.lower is None else _num_out(bracket.lower),
            "upper": _num_out(bracket.upper),
            "method": bracket.method,
        }
    _emit(payload)
    return EXIT_OK


CSV_COLUMNS = ("stage", "norm_mu_exact", "norm_mu_lp", "norm_image_exact",
               "norm_image_lp", "ratio", "duality_gap")


def _witness_row(inst: "con.WitnessInstance", tol: float):
    """One CSV row plus the artifacts for an instance with a witness molecule."""
    mu = inst.molecule
    image = linearize(inst.pmap).apply(mu)
    lp_mu, _ = norm_dual_lp(mu)
    flow_mu, _ = norm_flow(mu)
    lp_img, _ = norm_dual_lp(image)
    gap = abs(float(lp_mu) - float(flow_mu)) / max(1.0, abs(float(lp_mu)))
    exact_mu = ""
    if inst.domain_positions is not None:
        line_mu, _ = norm_line(mu, inst.domain_positions)
        exact_mu = str(line_mu)
    exact_img = ""
    if inst.codomain_positions is not None:
        line_img, _ = norm_line(image, inst.codomain_positions)
        exact_img = str(line_img)
    num = float(Fraction(exact_img) if exact_img else lp_img)
    den = float(Fraction(exact_mu) if exact_mu else lp_mu)
    row = {"stage": inst.stage, "norm_mu_exact": exact_mu,
           "norm_mu_lp": repr(float(lp_mu)),
           "norm_image_exact": exact_img,
           "norm_image_lp": repr(float(lp_img)),
           "ratio": repr(num / den) if den else "",
           "duality_gap": repr(gap)}
    return row, image, gap <= tol


def _construct_rows(args):
    family = args.family
    if family == "svc":
        return [con.svc_witness(k) for k in range(1, args.stage + 1)]
    if family == "snowflake":
        alpha = Fraction(args.alpha)
        return [con.snowflake_witness(alpha, n)
                for n in range(1, args.stages + 1)]
    if family == "discrete":
        return [con.discrete_witness(args.variant, k)
                for k in range(1, args.stage + 1)]
    if family == "rtree":
        return [con.rtree_example(args.n)]
    if family == "xsquared":
        return [con.xsquared_grid(args.n)]
    raise InputError(f"unknown family {family!r}")


def cmd_construct(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.family == "dust":
        p = 1 if args.p == "1" else "inf"
        dust = con.cantor_dust(args.stage, p)
        eps = Fraction(args.eps) if args.eps else Fraction(1, 1000)
        measure = distance_set_measure(dust, dust.base, eps)
        corner = max(dust.labels, key=lambda lab: float(dust.d(dust.base, lab)))
        mu = canonicalize(dust, {corner: 1})
        lp, _ = norm_dual_lp(mu)
        flow, _ = norm_flow(mu)
        gap = abs(float(lp) - float(flow)) / max(1.0, abs(float(lp)))
        rows = [{"stage": args.stage,
                 "norm_mu_exact": str(lp) if isinstance(lp, Fraction) else "",
                 "norm_mu_lp": repr(float(lp)), "norm_image_exact": "",
                 "norm_image_lp": "", "ratio": "", "duality_gap": repr(gap)}]
        if len(dust) <= 1100:
            save_space(out_dir / "space-dust.json", dust)
        diagnostics = {"family": "dust", "stage": args.stage, "p": args.p,
                       "eps": float(eps),
                       "distance_set_measure": float(measure),
                       "points": len(dust)}
        write_json(out_dir / "diagnostics.json", diagnostics)
    else:
        instances = _construct_rows(args)
        rows = []
        diagnostics = {"family": args.family, "rows": []}
        ok = True
        for inst in instances:
            row, image, gap_ok = _witness_row(inst, args.tol)
            ok &= gap_ok
            rows.append(row)
            tag = f"{inst.family}-{inst.stage}"
            save_space(out_dir / f"space-domain-{tag}.json", inst.domain)
            save_space(out_dir / f"space-codomain-{tag}.json", inst.codomain)
            save_map(out_dir / f"map-{tag}.json", inst.pmap)
            save_molecule(out_dir / f"molecule-{tag}.json", inst.molecule)
            save_molecule(out_dir / f"molecule-image-{tag}.json", image)
            entry = {"stage": inst.stage,
                     "expected": {k: str(v) for k, v in inst.expected.items()},
                     "row": row}
            op = linearize(inst.pmap)
            if inst.family == "rtree":
                entry["rank"] = op.rank()
                entry["rank_deficiency"] = len(inst.codomain) - 1 - op.rank()
            if inst.family == "xsquared":
                bl = bilip_constants(inst.pmap)
                entry["bilip"] = {"lower": str(bl.lower), "upper": str(bl.upper)}
                entry["rank"] = op.rank()
            diagnostics["rows"].append(entry)
        diagnostics["duality_within_tol"] = ok
        write_json(out_dir / "diagnostics.json", diagnostics)
        if not ok:
            sys.stderr.write("duality gap exceeded tolerance\n")
            return EXIT_DOMAIN
    with open(out_dir / "report.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    _emit({"out": str(out_dir), "rows": len(rows)})
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = RunConfig(seed=args.seed, tolerance=args.tol,
                    suites=tuple(args.suite) if args.suite else SUITE_NAMES,
                    fixture=args.fixture, samples=args.samples)
    report = run_verification(cfg)
    if args.out:
        write_json(args.out, report)
    _emit({"passed": report["passed"], "failures": report["failures"],
           "suites": {name: sum(not c["passed"] for c in checks)
                      for name, checks in report["suites"].items()}})
    return EXIT_OK if report["passed"] else EXIT_DOMAIN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freelip",
        description="Transportation-cost norms and Lipschitz operator "
                    "diagnostics over finite pointed metric spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a space JSON file")
    p.add_argument("path")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("norm", help="norm of a molecule over a space")
    p.add_argument("--space", required=True)
    p.add_argument("--molecule", required=True)
    p.add_argument("--method", default="all",
                   choices=["lp", "flow", "line", "all"])
    p.add_argument("--rational", action="store_true",
                   help="force exact arithmetic in the solvers")
    p.add_argument("--tol", type=float, default=REL_TOL)
    p.set_defaults(fn=cmd_norm)

    p = sub.add_parser("operator", help="diagnostics for a linearized map")
    p.add_argument("--domain", required=True)
    p.add_argument("--codomain", required=True)
    p.add_argument("--map", required=True)
    p.add_argument("--check", action="append",
                   choices=["rank", "bilip", "support", "nonreturning",
                            "modulus", "all"])
    p.add_argument("--molecule", help="molecule file for the support check")
    p.add_argument("--point", help="domain point for the nonreturning sweep")
    p.add_argument("--radius", help="domain radius r (rational)")
    p.add_argument("--rho", help="requested codomain radius (rational)")
    p.set_defaults(fn=cmd_operator)

    p = sub.add_parser("construct",
                       help="emit a counterexample family with its CSV report")
    p.add_argument("family", choices=["svc", "snowflake", "discrete", "dust",
                                      "rtree", "xsquared"])
    p.add_argument("--stage", type=int, default=3,
                   help="final stage (svc, discrete, dust)")
    p.add_argument("--stages", type=int, default=3,
                   help="number of stages (snowflake)")
    p.add_argument("--alpha", default="1/2", help="snowflake exponent")
    p.add_argument("--variant", default="bounded",
                   choices=["bounded", "unbounded"])
    p.add_argument("--n", type=int, default=10, help="size (rtree, xsquared)")
    p.add_argument("--p", default="inf", choices=["1", "inf"],
                   help="dust product metric")
    p.add_argument("--eps", help="dust distance-set fattening (rational)")
    p.add_argument("--tol", type=float, default=REL_TOL)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_construct)

    p = sub.add_parser("verify", help="run the property suites")
    p.add_argument("--seed", type=int, default=12345)
    p.add_argument("--tol", type=float, default=REL_TOL)
    p.add_argument("--samples", type=int, default=30)
    p.add_argument("--suite", action="append", choices=list(SUITE_NAMES))
    p.add_argument("--fixture", choices=list(FIXTURES),
                   help="negative control: inject a broken instance")
    p.add_argument("--out", help="write the full JSON report here")
    p.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InputError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except FreeLipError as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())

"""Batch front end: parse a job spec, run a pipeline, emit a report.

Reports are JSON with every exact quantity rendered as a rational string and
floats printed with 17 significant digits; byte-identical runs are guaranteed
once the timestamp is suppressed with --no-meta. Exit codes: 0 success (and
agreement, when an oracle ran), 1 failed check, 2 bad input.
"""
from __future__ import annotations

import argparse
import datetime
import json
import sys
from fractions import Fraction

from .futaki import AmplenessError, futaki_cross_check, futaki_closed_form, volume_w, average_scalar
from .mabuchi import (
    GradedQuadratureSpec,
    SymplecticPotential,
    el_residual,
    interior_grid,
    mabuchi_eval,
    scalar_curvature,
    _resolve_a,
)
from .pick import DEFAULT_KS, pick_check
from .polynomial import format_fraction
from .polytope import GeometryError
from .rootsystem import QN1_PFG_RATIO, RootSystemError, build_classical, build_from_cartan, dimension
from .specio import SCHEMA, SpecError, load_jobspec

CONVENTIONS = {
    "schema": SCHEMA,
    "qn1_pfg_ratio": format_fraction(QN1_PFG_RATIO),
    "scalar_divergence_factor": "1/2",
    "weight_sign": "R-f",
    "dh_constant_C": "1",
}


def _fmt_float(x: float) -> str:
    return "%.17g" % float(x)


def _write_report(report: dict, out_path: str | None, no_meta: bool) -> None:
    report = dict(report)
    report["convention"] = CONVENTIONS
    if not no_meta:
        report["meta"] = {
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat()
        }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _quad_spec(args) -> GradedQuadratureSpec:
    return GradedQuadratureSpec(
        depth=args.quad_depth,
        ratio=Fraction(args.quad_ratio),
        nodes=args.quad_nodes,
        tol=args.tol,
    )


def _cmd_futaki(args) -> int:
    spec = load_jobspec(args.spec)
    if spec.pl_function is None:
        raise SpecError("spec.pl_function: required by the futaki command")
    R = Fraction(args.R) if args.R is not None else (spec.R if spec.R is not None else None)
    report: dict = {"command": "futaki"}
    if args.oracle:
        if R is None:
            raise SpecError("spec.R: required when the oracle runs")
        res = futaki_cross_check(
            spec.root_system,
            spec.polytope,
            spec.pl_function,
            R,
            kmax=args.kmax,
            threads=args.threads,
        )
        report.update(res.to_json_dict())
        _write_report(report, args.out, args.no_meta)
        print("F1_closed = %s" % format_fraction(res.F1_closed))
        print("F1_oracle = %s" % format_fraction(res.F1_oracle))
        print("agreement = %s" % res.agreement)
        return 0 if res.agreement else 1
    f1 = futaki_closed_form(spec.root_system, spec.polytope, spec.pl_function)
    report.update(
        {
            "vol_W": format_fraction(volume_w(spec.root_system, spec.polytope)),
            "a": format_fraction(average_scalar(spec.root_system, spec.polytope)),
            "F1_closed": format_fraction(f1),
            "F1_oracle": None,
            "oracle_details": None,
            "agreement": None,
        }
    )
    _write_report(report, args.out, args.no_meta)
    print("F1_closed = %s" % format_fraction(f1))
    return 0


def _cmd_pick(args) -> int:
    spec = load_jobspec(args.spec)
    ks = tuple(int(k) for k in args.kset.split(",")) if args.kset else DEFAULT_KS
    if "pick_h" in spec.options:
        from .specio import parse_polynomial

        h = parse_polynomial(spec.options["pick_h"], "spec.options.pick_h")
    else:
        # default test function: the sum of squares, strictly convex anywhere
        from .polynomial import MultivariatePolynomial as Poly

        n = spec.polytope.dim
        h = sum(
            (Poly.variable(n, i) * Poly.variable(n, i) for i in range(n)),
            Poly.zero(n),
        )
    passed, fit = pick_check(spec.polytope, h, ks=ks)
    report = {"command": "pick", "passed": passed, "fit": fit.to_json_dict()}
    _write_report(report, args.out, args.no_meta)
    print("pick check: %s" % ("PASS" if passed else "FAIL"))
    return 0 if passed else 1


def _build_potential(spec, potential_path: str | None) -> SymplecticPotential:
    perturbation = spec.potential_perturbation
    canonical = spec.potential_canonical
    if potential_path:
        import json as _json

        from .specio import parse_polynomial

        try:
            with open(potential_path, "r", encoding="utf-8") as fh:
                data = _json.load(fh)
        except (OSError, _json.JSONDecodeError) as exc:
            raise SpecError("cannot read potential file %s: %s" % (potential_path, exc))
        canonical = bool(data.get("canonical", True))
        perturbation = (
            parse_polynomial(data["perturbation"], "potential.perturbation")
            if "perturbation" in data
            else None
        )
    return SymplecticPotential(
        spec.polytope, perturbation=perturbation, canonical=canonical
    )


def _cmd_mabuchi(args) -> int:
    spec = load_jobspec(args.spec)
    u = _build_potential(spec, args.potential)
    qspec = _quad_spec(args)
    res = mabuchi_eval(spec.root_system, u, args.A, qspec)
    report = {
        "command": "mabuchi",
        "A_preset": args.A,
        "value": _fmt_float(res.value),
        "error_estimate": _fmt_float(res.error),
        "flagged": res.flagged,
        "terms": {k: _fmt_float(v) for k, v in res.terms.items()},
    }
    _write_report(report, args.out, args.no_meta)
    if args.residuals:
        a_fn = _resolve_a(spec.root_system, spec.polytope, args.A) or (lambda x: 0.0)
        grid = interior_grid(spec.polytope, args.grid)
        with open(args.residuals, "w", encoding="utf-8") as fh:
            header = ",".join("x%d" % (i + 1) for i in range(spec.polytope.dim))
            fh.write(header + ",residual\n")
            for pt in grid:
                r = el_residual(spec.root_system, u, a_fn, pt)
                fh.write(
                    ",".join(_fmt_float(c) for c in pt) + "," + _fmt_float(r) + "\n"
                )
    print("F_A = %s  (error estimate %s)" % (_fmt_float(res.value), _fmt_float(res.error)))
    return 1 if res.flagged else 0


def _cmd_scalar(args) -> int:
    spec = load_jobspec(args.spec)
    u = _build_potential(spec, args.potential)
    grid = interior_grid(spec.polytope, args.grid)
    values = [scalar_curvature(spec.root_system, u, pt) for pt in grid]
    from .quadrature import graded_integral
    from .rootsystem import dh_weight

    p = dh_weight(spec.root_system)
    qspec = _quad_spec(args)
    integral, err = graded_integral(
        lambda x: scalar_curvature(spec.root_system, u, x)
        * p.evaluate_float(list(x)),
        spec.polytope,
        qspec,
    )
    a = average_scalar(spec.root_system, spec.polytope)
    vol = volume_w(spec.root_system, spec.polytope)
    expected = float(a * vol)
    ok = abs(integral - expected) <= max(args.tol, 10 * err)
    report = {
        "command": "scalar",
        "grid_size": len(grid),
        "S_min": _fmt_float(min(values)),
        "S_max": _fmt_float(max(values)),
        "integral_SW": _fmt_float(integral),
        "a_times_vol": format_fraction(a * vol),
        "average_identity_ok": ok,
    }
    _write_report(report, args.out, args.no_meta)
    print("int S W = %s, a Vol_W = %s" % (_fmt_float(integral), format_fraction(a * vol)))
    return 0 if ok else 1


def _cmd_dims(args) -> int:
    if args.cartan:
        rs = build_from_cartan(json.loads(args.cartan))
    else:
        if not args.series:
            raise SpecError("dims: need --series/--rank or --cartan")
        rs = build_classical(args.series, args.rank)
    lam = [int(x) for x in args.lam.split(",")]
    value = dimension(rs, lam)
    print(value.numerator if value.denominator == 1 else format_fraction(value))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kstab",
        description="Stability invariants of toric fibrations from polytope and root data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, quad: bool = False):
        p.add_argument("--out", help="write the JSON report to this path")
        p.add_argument("--no-meta", action="store_true", help="omit the timestamp")
        p.add_argument("--threads", type=int, default=1, help="worker cap for lattice walks")
        if quad:
            p.add_argument("--quad-depth", type=int, default=12)
            p.add_argument("--quad-ratio", default="1/2")
            p.add_argument("--quad-nodes", type=int, default=10)
            p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("futaki", help="closed-form Futaki invariant, optional lattice oracle")
    p.add_argument("--spec", required=True)
    p.add_argument("--oracle", action="store_true", help="cross-check with lattice counts")
    p.add_argument("--kmax", type=int, default=None, help="largest oracle dilation")
    p.add_argument("--R", default=None, help="headroom constant (overrides the spec)")
    add_common(p)
    p.set_defaults(func=_cmd_futaki)

    p = sub.add_parser("pick", help="two-term lattice-sum asymptotics check")
    p.add_argument("--spec", required=True)
    p.add_argument("--kset", default=None, help="comma-separated dilations, default 4,8,16,32,64")
    add_common(p)
    p.set_defaults(func=_cmd_pick)

    p = sub.add_parser("mabuchi", help="evaluate the energy functional")
    p.add_argument("--spec", required=True)
    p.add_argument("--potential", help="JSON potential file overriding the spec")
    p.add_argument("--A", default="zero", help="zero | paper | csc")
    p.add_argument("--residuals", help="write a CSV of critical-equation residuals")
    p.add_argument("--grid", type=int, default=100)
    add_common(p, quad=True)
    p.set_defaults(func=_cmd_mabuchi)

    p = sub.add_parser("scalar", help="scalar curvature on a grid plus the average identity")
    p.add_argument("--spec", required=True)
    p.add_argument("--potential", help="JSON potential file overriding the spec")
    p.add_argument("--grid", type=int, default=100)
    add_common(p, quad=True)
    p.set_defaults(func=_cmd_scalar)

    p = sub.add_parser("dims", help="Weyl dimension of a highest-weight representation")
    p.add_argument("--series")
    p.add_argument("--rank", type=int, default=0)
    p.add_argument("--cartan", help="JSON Cartan matrix")
    p.add_argument("--lambda", dest="lam", required=True, help="comma-separated weight")
    p.set_defaults(func=_cmd_dims)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, RootSystemError, GeometryError, AmplenessError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

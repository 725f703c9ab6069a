"""Job spec files: parsing, validation and lossless serialization.

A job spec is a single JSON document describing the root system, the moment
polytope and the optional degeneration / potential data. Every rational is a
'p/q' string or an integer; floats are rejected so the exact pipeline never
sees a rounded input.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .polynomial import MultivariatePolynomial, format_fraction
from .polytope import PiecewiseAffine, RationalPolytope
from .rootsystem import RootSystem, build_classical, build_from_cartan

SCHEMA = "kstab/1"


class SpecError(ValueError):
    """Malformed job spec; the message names the offending field."""


def parse_rational(value, where: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise SpecError("%s: rationals must be integers or 'p/q' strings" % where)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise SpecError("%s: cannot parse rational %r" % (where, value)) from None
    raise SpecError("%s: unsupported rational %r" % (where, value))


def parse_root_system(data, where: str = "root_system") -> RootSystem:
    if not isinstance(data, dict):
        raise SpecError("%s: expected an object" % where)
    if "m_vectors" in data:
        try:
            return RootSystem.from_m_vectors(data["m_vectors"])
        except (ValueError, TypeError) as exc:
            raise SpecError("%s.m_vectors: %s" % (where, exc)) from None
    if "cartan" in data:
        rows = data["cartan"]
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise SpecError("%s.cartan: expected a matrix" % where)
        try:
            return build_from_cartan(rows)
        except ValueError as exc:
            raise SpecError("%s.cartan: %s" % (where, exc)) from None
    if "series" in data:
        try:
            return build_classical(str(data["series"]), int(data.get("rank", 0)))
        except ValueError as exc:
            raise SpecError("%s: %s" % (where, exc)) from None
    raise SpecError("%s: need either 'series'/'rank' or 'cartan'" % where)


def parse_polytope(data, where: str = "polytope") -> RationalPolytope:
    if not isinstance(data, dict):
        raise SpecError("%s: expected an object" % where)
    try:
        if "vertices" in data:
            pts = [
                [parse_rational(x, "%s.vertices[%d][%d]" % (where, i, j)) for j, x in enumerate(p)]
                for i, p in enumerate(data["vertices"])
            ]
            return RationalPolytope.from_vertices(pts)
        if "halfspaces" in data:
            hs = []
            for i, item in enumerate(data["halfspaces"]):
                normal = [
                    parse_rational(x, "%s.halfspaces[%d].normal[%d]" % (where, i, j))
                    for j, x in enumerate(item["normal"])
                ]
                offset = parse_rational(item["offset"], "%s.halfspaces[%d].offset" % (where, i))
                hs.append((normal, offset))
            return RationalPolytope.from_halfspaces(hs)
    except SpecError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise SpecError("%s: %s" % (where, exc)) from None
    raise SpecError("%s: need either 'vertices' or 'halfspaces'" % where)


def parse_pl_function(data, where: str = "pl_function") -> PiecewiseAffine:
    if not isinstance(data, dict) or "pieces" not in data:
        raise SpecError("%s: expected an object with 'pieces'" % where)
    pieces = []
    for i, item in enumerate(data["pieces"]):
        try:
            a = [
                parse_rational(x, "%s.pieces[%d].a[%d]" % (where, i, j))
                for j, x in enumerate(item["a"])
            ]
            b = parse_rational(item["b"], "%s.pieces[%d].b" % (where, i))
        except (KeyError, TypeError) as exc:
            raise SpecError("%s.pieces[%d]: %s" % (where, i, exc)) from None
        pieces.append((a, b))
    try:
        return PiecewiseAffine.from_pieces(pieces)
    except ValueError as exc:
        raise SpecError("%s: %s" % (where, exc)) from None


def parse_polynomial(data, where: str) -> MultivariatePolynomial:
    if not isinstance(data, dict):
        raise SpecError("%s: expected an object" % where)
    try:
        nvars = int(data["nvars"])
        terms = {}
        for i, item in enumerate(data.get("terms", [])):
            exp = tuple(int(e) for e in item["exp"])
            terms[exp] = parse_rational(item["coef"], "%s.terms[%d].coef" % (where, i))
        return MultivariatePolynomial(nvars, terms)
    except SpecError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError("%s: %s" % (where, exc)) from None


@dataclass(frozen=True)
class JobSpec:
    """Validated job input for the command-line pipelines."""

    root_system: RootSystem
    polytope: RationalPolytope
    pl_function: PiecewiseAffine | None = None
    R: Fraction | None = None
    potential_perturbation: MultivariatePolynomial | None = None
    potential_canonical: bool = True
    options: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out: dict[str, Any] = {
            "schema": SCHEMA,
            "root_system": self.root_system.to_json_dict(),
            "polytope": self.polytope.to_json_dict(),
        }
        if self.pl_function is not None:
            out["pl_function"] = self.pl_function.to_json_dict()
        if self.R is not None:
            out["R"] = format_fraction(self.R)
        if self.potential_perturbation is not None or not self.potential_canonical:
            pot: dict[str, Any] = {"canonical": self.potential_canonical}
            if self.potential_perturbation is not None:
                pot["perturbation"] = self.potential_perturbation.to_json_dict()
            out["potential"] = pot
        if self.options:
            out["options"] = dict(sorted(self.options.items()))
        return out


def parse_jobspec(data) -> JobSpec:
    if not isinstance(data, dict):
        raise SpecError("spec: expected a JSON object")
    schema = data.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise SpecError("spec.schema: unsupported schema %r (want %r)" % (schema, SCHEMA))
    if "root_system" not in data:
        raise SpecError("spec.root_system: missing")
    if "polytope" not in data:
        raise SpecError("spec.polytope: missing")
    rs = parse_root_system(data["root_system"])
    P = parse_polytope(data["polytope"])
    f = parse_pl_function(data["pl_function"]) if "pl_function" in data else None
    R = parse_rational(data["R"], "spec.R") if "R" in data else None
    perturbation = None
    canonical = True
    if "potential" in data:
        pot = data["potential"]
        if not isinstance(pot, dict):
            raise SpecError("spec.potential: expected an object")
        canonical = bool(pot.get("canonical", True))
        if "perturbation" in pot:
            perturbation = parse_polynomial(pot["perturbation"], "spec.potential.perturbation")
    options = data.get("options", {})
    if not isinstance(options, dict):
        raise SpecError("spec.options: expected an object")
    if rs.rank != P.dim:
        raise SpecError(
            "spec: root system rank %d does not match polytope dimension %d"
            % (rs.rank, P.dim)
        )
    if f is not None and f.nvars != P.dim:
        raise SpecError("spec.pl_function: dimension mismatch with the polytope")
    return JobSpec(
        root_system=rs,
        polytope=P,
        pl_function=f,
        R=R,
        potential_perturbation=perturbation,
        potential_canonical=canonical,
        options=dict(options),
    )


def load_jobspec(path: str) -> JobSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise SpecError("cannot read spec file %s: %s" % (path, exc)) from None
    except json.JSONDecodeError as exc:
        raise SpecError("spec file %s: line %d: %s" % (path, exc.lineno, exc.msg)) from None
    return parse_jobspec(data)

"""Exact sparse multivariate polynomials over the rationals.

These are the universal value carriers for every closed-form computation in
the package: weight polynomials, their homogeneous parts, pulled-back
integrands. Coefficients are ``fractions.Fraction`` throughout; floats are
rejected at construction so no rounding can sneak into an exact pipeline.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

Exponent = tuple[int, ...]


def as_fraction(x) -> Fraction:
    """Convert ints, Fractions and 'p/q' strings; refuse floats."""
    if isinstance(x, float):
        raise TypeError("refusing to convert float %r to an exact rational" % (x,))
    return Fraction(x)


def format_fraction(x: Fraction) -> str:
    """Render a rational as 'p' or 'p/q' (lossless, parseable)."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


class MultivariatePolynomial:
    """Sparse polynomial in a fixed number of variables.

    Terms map exponent tuples to nonzero rational coefficients. Zero
    coefficients are never stored, so equality is structural. Instances are
    immutable and hashable.
    """

    __slots__ = ("nvars", "_terms", "_canonical")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Fraction] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be >= 0")
        object.__setattr__(self, "nvars", int(nvars))
        clean: dict[Exponent, Fraction] = {}
        if terms:
            for exp, coef in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != nvars or any(e < 0 for e in exp):
                    raise ValueError("bad exponent %r for %d variables" % (exp, nvars))
                c = as_fraction(coef)
                if c != 0:
                    c = clean.get(exp, Fraction(0)) + c
                    if c:
                        clean[exp] = c
                    else:
                        clean.pop(exp, None)
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_canonical", None)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("MultivariatePolynomial is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "MultivariatePolynomial":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c) -> "MultivariatePolynomial":
        return cls(nvars, {(0,) * nvars: as_fraction(c)})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MultivariatePolynomial":
        if not 0 <= i < nvars:
            raise ValueError("variable index out of range")
        exp = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(nvars, {exp: Fraction(1)})

    @classmethod
    def affine(cls, coeffs: Sequence, const=0) -> "MultivariatePolynomial":
        """The polynomial sum_j coeffs[j] * x_j + const."""
        n = len(coeffs)
        terms: dict[Exponent, Fraction] = {}
        for j, c in enumerate(coeffs):
            c = as_fraction(c)
            if c:
                terms[tuple(1 if i == j else 0 for i in range(n))] = c
        c0 = as_fraction(const)
        if c0:
            terms[(0,) * n] = c0
        return cls(n, terms)

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        """Canonical term order: graded, then lexicographic (cached)."""
        if self._canonical is None:
            ordered = sorted(self._terms.items(), key=lambda t: (sum(t[0]), t[0]))
            object.__setattr__(self, "_canonical", tuple(ordered))
        return list(self._canonical)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def coefficient(self, exp: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(int(e) for e in exp), Fraction(0))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultivariatePolynomial)
            and self.nvars == other.nvars
            and self._terms == other._terms
        )

    def __hash__(self) -> int:
        return hash((self.nvars, tuple(self.sorted_terms())))

    def __repr__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for exp, coef in self.sorted_terms():
            mono = "*".join(
                "x%d" % i if e == 1 else "x%d^%d" % (i, e)
                for i, e in enumerate(exp)
                if e
            )
            c = format_fraction(coef)
            parts.append(c if not mono else ("%s*%s" % (c, mono) if coef != 1 else mono))
        return " + ".join(parts)

    # -- arithmetic ---------------------------------------------------------

    def _check_same(self, other: "MultivariatePolynomial") -> None:
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultivariatePolynomial.constant(self.nvars, other)
        self._check_same(other)
        terms = dict(self._terms)
        for exp, coef in other._terms.items():
            c = terms.get(exp, Fraction(0)) + coef
            if c:
                terms[exp] = c
            else:
                terms.pop(exp, None)
        return MultivariatePolynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultivariatePolynomial(
            self.nvars, {e: -c for e, c in self._terms.items()}
        )

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultivariatePolynomial.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = as_fraction(other)
            return MultivariatePolynomial(
                self.nvars, {e: c * v for e, v in self._terms.items()}
            )
        self._check_same(other)
        terms: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                c = terms.get(exp, Fraction(0)) + c1 * c2
                if c:
                    terms[exp] = c
                else:
                    terms.pop(exp, None)
        return MultivariatePolynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MultivariatePolynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- calculus and structure --------------------------------------------

    def partial(self, i: int) -> "MultivariatePolynomial":
        """Exact partial derivative with respect to variable i."""
        if not 0 <= i < self.nvars:
            raise ValueError("variable index out of range")
        terms: dict[Exponent, Fraction] = {}
        for exp, coef in self._terms.items():
            if exp[i] == 0:
                continue
            new = list(exp)
            new[i] -= 1
            terms[tuple(new)] = coef * exp[i]
        return MultivariatePolynomial(self.nvars, terms)

    def gradient(self) -> list["MultivariatePolynomial"]:
        return [self.partial(i) for i in range(self.nvars)]

    def homogeneous_part(self, d: int) -> "MultivariatePolynomial":
        return MultivariatePolynomial(
            self.nvars, {e: c for e, c in self._terms.items() if sum(e) == d}
        )

    def evaluate(self, point: Sequence) -> Fraction:
        """Exact evaluation at a rational point."""
        pt = [as_fraction(x) for x in point]
        if len(pt) != self.nvars:
            raise ValueError("point dimension mismatch")
        total = Fraction(0)
        for exp, coef in self._terms.items():
            v = coef
            for x, e in zip(pt, exp):
                if e:
                    v *= x**e
            total += v
        return total

    def evaluate_float(self, point: Sequence[float]) -> float:
        if len(point) != self.nvars:
            raise ValueError("point dimension mismatch")
        if self._canonical is None:
            self.sorted_terms()
        total = 0.0
        for exp, coef in self._canonical:
            v = float(coef)
            for x, e in zip(point, exp):
                if e:
                    v *= float(x) ** e
            total += v
        return total

    def substitute_affine(self, matrix: Sequence[Sequence], shift: Sequence) -> "MultivariatePolynomial":
        """Substitute x_i = shift[i] + sum_j matrix[i][j] * y_j, exactly.

        ``matrix`` has one row per old variable; the result lives in
        ``len(matrix[0])`` variables (0 columns give a constant).
        """
        if len(matrix) != self.nvars or len(shift) != self.nvars:
            raise ValueError("substitution shape mismatch")
        m = len(matrix[0]) if self.nvars else 0
        for row in matrix:
            if len(row) != m:
                raise ValueError("ragged substitution matrix")
        lines = [
            MultivariatePolynomial.affine([as_fraction(a) for a in row], as_fraction(s))
            for row, s in zip(matrix, shift)
        ]
        # Cache powers of each substituted coordinate line.
        powers: list[list[MultivariatePolynomial]] = [
            [MultivariatePolynomial.constant(m, 1)] for _ in range(self.nvars)
        ]

        def power(i: int, e: int) -> MultivariatePolynomial:
            cache = powers[i]
            while len(cache) <= e:
                cache.append(cache[-1] * lines[i])
            return cache[e]

        result = MultivariatePolynomial.zero(m)
        for exp, coef in self._terms.items():
            term = MultivariatePolynomial.constant(m, coef)
            for i, e in enumerate(exp):
                if e:
                    term = term * power(i, e)
            result = result + term
        return result

    def scale_vars(self, factors) -> "MultivariatePolynomial":
        """Substitute x_i -> factors[i] * x_i without expansion.

        Accepts a single rational (applied to all variables) or a sequence.
        """
        if not isinstance(factors, (list, tuple)):
            factors = [factors] * self.nvars
        fs = [as_fraction(f) for f in factors]
        if len(fs) != self.nvars:
            raise ValueError("factor count mismatch")
        terms: dict[Exponent, Fraction] = {}
        for exp, coef in self._terms.items():
            c = coef
            for f, e in zip(fs, exp):
                if e:
                    c *= f**e
            if c:
                terms[exp] = c
        return MultivariatePolynomial(self.nvars, terms)

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [
                {"exp": list(e), "coef": format_fraction(c)}
                for e, c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "MultivariatePolynomial":
        nvars = int(data["nvars"])
        terms: dict[Exponent, Fraction] = {}
        for item in data.get("terms", []):
            terms[tuple(int(e) for e in item["exp"])] = as_fraction(item["coef"])
        return cls(nvars, terms)


# Short alias used heavily inside the package.
Poly = MultivariatePolynomial

"""Graded multivariate polynomial arithmetic over Z.

A polynomial is stored sparsely as a map from exponent tuples to nonzero
integer coefficients, together with the number of variables.  Monomials are
ordered lexicographically on exponent tuples (descending) and that order is
used everywhere something gets serialized, so output is deterministic.
"""

from __future__ import annotations

from itertools import combinations
from math import comb

from .errors import DimensionError, InexactDivision
from . import intlinalg


class IntPolynomial:
    """Sparse integer polynomial in a fixed number of variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for mono, coeff in terms.items():
                if coeff == 0:
                    continue
                if len(mono) != nvars:
                    raise DimensionError("exponent tuple of wrong length")
                clean[tuple(mono)] = clean.get(tuple(mono), 0) + coeff
        self.terms = {m: c for m, c in clean.items() if c != 0}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def constant(cls, nvars, c):
        if c == 0:
            return cls(nvars)
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars, index):
        mono = tuple(int(i == index) for i in range(nvars))
        return cls(nvars, {mono: 1})

    @classmethod
    def linear_form(cls, coeffs):
        """The degree-1 polynomial with the given coefficient vector."""
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            if c:
                terms[tuple(int(j == i) for j in range(n))] = c
        return cls(n, terms)

    # -- basic queries -----------------------------------------------------

    def is_zero(self):
        return not self.terms

    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def is_homogeneous(self):
        degs = {sum(m) for m in self.terms}
        return len(degs) <= 1

    def homogeneous_component(self, d):
        return IntPolynomial(
            self.nvars, {m: c for m, c in self.terms.items() if sum(m) == d}
        )

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, 0)

    def linear_coeffs(self):
        """Coefficient vector of the degree-1 part."""
        out = [0] * self.nvars
        for m, c in self.terms.items():
            if sum(m) == 1:
                out[m.index(1)] = c
        return tuple(out)

    def coefficient(self, mono):
        return self.terms.get(tuple(mono), 0)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, IntPolynomial):
            if other.nvars != self.nvars:
                raise DimensionError("variable tables differ")
            return other
        if isinstance(other, int):
            return IntPolynomial.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return IntPolynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return IntPolynomial(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolynomial(
                self.nvars, {m: other * c for m, c in self.terms.items()}
            )
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = tuple(a + b for a, b in zip(ma, mb))
                terms[m] = terms.get(m, 0) + ca * cb
        return IntPolynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = IntPolynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            return self.terms == IntPolynomial.constant(self.nvars, other).terms
        return (
            isinstance(other, IntPolynomial)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"IntPolynomial({self.nvars}, {self.to_string()!r})"

    # -- substitution ------------------------------------------------------

    def substitute(self, images):
        """Substitute variable i by images[i] (IntPolynomial or int)."""
        if len(images) != self.nvars:
            raise DimensionError("need one image per variable")
        target = None
        for img in images:
            if isinstance(img, IntPolynomial):
                target = img.nvars
                break
        if target is None:
            raise DimensionError("at least one image must be a polynomial")
        imgs = [
            img
            if isinstance(img, IntPolynomial)
            else IntPolynomial.constant(target, img)
            for img in images
        ]
        out = IntPolynomial.zero(target)
        for mono, coeff in sorted(self.terms.items()):
            term = IntPolynomial.constant(target, coeff)
            for i, e in enumerate(mono):
                if e:
                    term = term * imgs[i] ** e
            out = out + term
        return out

    def evaluate(self, point):
        if len(point) != self.nvars:
            raise DimensionError("need one value per variable")
        total = 0
        for mono, coeff in self.terms.items():
            v = coeff
            for x, e in zip(point, mono):
                v *= x**e
            total += v
        return total

    # -- printing ----------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: t[0], reverse=True)

    def to_string(self, varnames=None):
        if not self.terms:
            return "0"
        if varnames is None:
            varnames = default_varnames(self.nvars)
        pieces = []
        for mono, coeff in self.sorted_terms():
            factors = []
            for name, e in zip(varnames, mono):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            body = "*".join(factors)
            if not body:
                text = str(abs(coeff))
            elif abs(coeff) == 1:
                text = body
            else:
                text = f"{abs(coeff)}*{body}"
            sign = "-" if coeff < 0 else "+"
            pieces.append((sign, text))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, text in pieces[1:]:
            out += f" {sign} {text}"
        return out


def default_varnames(nvars):
    return [f"t{i + 1}" for i in range(nvars)]


def coords_varnames(n, with_residual):
    """e1..en for H^*(BT^n), plus the residual x when requested."""
    names = [f"e{i + 1}" for i in range(n)]
    if with_residual:
        names.append("x")
    return names


def poly_mul(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    return a * b


def graded_piece_basis(nvars: int, degree: int):
    """All exponent tuples of the given total degree, lex-descending.

    The count is C(nvars + degree - 1, degree).
    """
    if nvars < 0 or degree < 0:
        raise ValueError("nvars and degree must be nonnegative")
    if nvars == 0:
        return [()] if degree == 0 else []
    out = []
    # stars and bars, generated directly in descending lex order
    for bars in combinations(range(degree + nvars - 1), nvars - 1):
        prev = -1
        mono = []
        for b in bars:
            mono.append(b - prev - 1)
            prev = b
        mono.append(degree + nvars - 2 - prev)
        out.append(tuple(mono))
    out.sort(reverse=True)
    assert len(out) == comb(nvars + degree - 1, degree)
    return out


def divide_exact_by_linear(poly: IntPolynomial, coeffs):
    """Exact quotient poly / <linear form>, or None when not divisible.

    A unimodular change of coordinates sends the (primitive part of the)
    linear form to the first variable, where divisibility is a per-monomial
    check, and the quotient is mapped back.
    """
    n = poly.nvars
    if len(coeffs) != n:
        raise DimensionError("linear form has the wrong arity")
    if all(c == 0 for c in coeffs):
        raise ValueError("division by the zero form")
    if poly.is_zero():
        return IntPolynomial.zero(n)
    column = [[c] for c in coeffs]
    h, u = intlinalg.hermite_normal_form(column, transform=True)
    content = h[0][0]
    # substitution t_j = sum_i u[i][j] s_i turns the form into content * s_1
    fwd = [
        IntPolynomial.linear_form([u[i][j] for i in range(n)]) for j in range(n)
    ]
    transformed = poly.substitute(fwd)
    quotient_terms = {}
    for mono, coeff in transformed.terms.items():
        if mono[0] == 0:
            return None
        if coeff % content != 0:
            return None
        quotient_terms[(mono[0] - 1,) + mono[1:]] = coeff // content
    quotient = IntPolynomial(n, quotient_terms)
    uinv = intlinalg.unimodular_inverse(u)
    back = [
        IntPolynomial.linear_form([uinv[i][j] for i in range(n)])
        for j in range(n)
    ]
    return quotient.substitute(back)


def divide_exact(poly: IntPolynomial, linear_factors):
    """Divide by a product of linear forms, raising when not exact."""
    out = poly
    for coeffs in linear_factors:
        nxt = divide_exact_by_linear(out, coeffs)
        if nxt is None:
            raise InexactDivision(
                f"{poly.to_string()} is not divisible by the linear form {coeffs}"
            )
        out = nxt
    return out

"""Exact sparse multivariate polynomials over the rationals.

Polynomials are stored as a map from exponent tuples to :class:`fractions.Fraction`
coefficients. :class:`Poly` is the general ring element (needed inside
resultant computations); :class:`HomogeneousPolynomial` is the form type the
rest of the package works with and carries an explicit degree tag, so the zero
form still knows its degree.

Text format::

    x0*x2 - x1^2
    3/4*x0^3 + (x1 - x2)^2*x0

Variables are ``x0 .. x{k}``; literals are integers or ``p/q``; operators
``+ - * ^`` and parentheses. The canonical printer lists terms in
graded-lexicographic order (highest first) with an explicit ``*``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, NotHomogeneous, PolySyntaxError, ZeroPolynomial

Monomial = tuple[int, ...]

__all__ = [
    "Poly",
    "HomogeneousPolynomial",
    "parse",
    "parse_poly",
    "gradient",
    "euler_identity_check",
    "evaluate",
    "resultant",
    "sylvester_matrix",
    "bareiss_det",
    "squarefree_part",
    "irreducible_factors",
    "to_sympy",
    "from_sympy",
]


def _grlex_key(m: Monomial) -> tuple:
    return (sum(m), m)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"exact coefficient required, got {type(c).__name__}")


class Poly:
    """Sparse polynomial in ``nvars`` variables with rational coefficients."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None, nvars: int):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        clean: dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != nvars:
                raise DimensionMismatch(f"monomial {mono} has length {len(mono)}, expected {nvars}")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            c = _as_fraction(c)
            if c:
                clean[mono] = clean.get(mono, Fraction(0)) + c
                if not clean[mono]:
                    del clean[mono]
        self.nvars = nvars
        self.terms: dict[Monomial, Fraction] = clean
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def _raw(cls, terms: dict[Monomial, Fraction], nvars: int) -> "Poly":
        # trusted path: no validation, no zero coefficients
        p = Poly.__new__(Poly)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls._raw({}, nvars)

    @classmethod
    def constant(cls, c, nvars: int) -> "Poly":
        c = _as_fraction(c)
        return cls._raw({(0,) * nvars: c} if c else {}, nvars)

    @classmethod
    def var(cls, i: int, nvars: int) -> "Poly":
        mono = [0] * nvars
        mono[i] = 1
        return cls._raw({tuple(mono): Fraction(1)}, nvars)

    # -- basic queries ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def degree_in(self, var: int) -> int:
        return max((m[var] for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def leading(self) -> tuple[Monomial, Fraction]:
        """Leading term in graded-lex order."""
        if not self.terms:
            raise ZeroPolynomial("zero polynomial has no leading term")
        m = max(self.terms, key=_grlex_key)
        return m, self.terms[m]

    def as_homogeneous(self, degree: int | None = None) -> "HomogeneousPolynomial":
        return HomogeneousPolynomial(self.terms, self.nvars, degree)

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise DimensionMismatch(f"nvars {self.nvars} vs {other.nvars}")
            return other
        return Poly.constant(other, self.nvars)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return _promote(out, self, other, "add")

    __radd__ = __add__

    def __neg__(self):
        return _promote({m: -c for m, c in self.terms.items()}, self, self, "neg")

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            try:
                c = _as_fraction(other)
            except TypeError:
                return NotImplemented
            if not c:
                return _promote({}, self, self, "neg")
            return _promote({m: v * c for m, v in self.terms.items()}, self, self, "neg")
        other = self._coerce(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return _promote(out, self, other, "mul")

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = _as_fraction(other)
        if not c:
            raise ZeroDivisionError("division by zero scalar")
        return self * (1 / c)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("non-negative integer exponent required")
        result = _promote({(0,) * self.nvars: Fraction(1)}, self, self, "one")
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            return self.terms == Poly.constant(other, self.nvars).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # -- calculus / structure ---------------------------------------------
    def diff(self, i: int) -> "Poly":
        out: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                out[tuple(mm)] = c * m[i]
        return _promote(out, self, self, "diff")

    def coefficients_in(self, var: int) -> list["Poly"]:
        """Coefficients of ``x_var^k`` for k = 0..deg, as polynomials free of ``x_var``."""
        deg = self.degree_in(var)
        parts: list[dict[Monomial, Fraction]] = [{} for _ in range(max(deg + 1, 0))]
        for m, c in self.terms.items():
            k = m[var]
            mm = list(m)
            mm[var] = 0
            parts[k][tuple(mm)] = c
        return [Poly._raw(p, self.nvars) for p in parts]

    def substitute(self, var: int, value: "Poly") -> "Poly":
        """Replace ``x_var`` by the polynomial ``value``."""
        value = self._coerce(value)
        coeffs = self.coefficients_in(var)
        result = Poly.zero(self.nvars)
        for c in reversed(coeffs):
            result = result * value + c
        return result

    def exact_div(self, other: "Poly") -> "Poly":
        """Quotient of an exact division; raises ArithmeticError if a remainder appears."""
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if len(other.terms) == 1:
            (dm, dc), = other.terms.items()
            out = {}
            for m, c in self.terms.items():
                q = tuple(a - b for a, b in zip(m, dm))
                if min(q, default=0) < 0:
                    raise ArithmeticError("inexact polynomial division")
                out[q] = c / dc
            return Poly._raw(out, self.nvars)
        dm = max(other.terms)  # lex-leading monomial
        dc = other.terms[dm]
        rem = dict(self.terms)
        quot: dict[Monomial, Fraction] = {}
        while rem:
            rm = max(rem)
            q = tuple(a - b for a, b in zip(rm, dm))
            if min(q) < 0:
                raise ArithmeticError("inexact polynomial division")
            qc = rem[rm] / dc
            quot[q] = qc
            for m, c in other.terms.items():
                mm = tuple(a + b for a, b in zip(m, q))
                v = rem.get(mm, 0) - qc * c
                if v:
                    rem[mm] = v
                else:
                    rem.pop(mm, None)
        return Poly._raw(quot, self.nvars)

    def content(self) -> Fraction:
        """Positive rational c with self / c having coprime integer coefficients."""
        from math import gcd, lcm

        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> "Poly":
        """Integer-coefficient, content-1 representative with positive leading coefficient."""
        if not self.terms:
            return self
        c = self.content()
        if self.leading()[1] < 0:
            c = -c
        return self / c

    def evaluate(self, point: Sequence):
        return evaluate(self, point)

    # -- printing ---------------------------------------------------------
    def to_text(self, var: str = "x") -> str:
        if not self.terms:
            return "0"
        pieces = []
        for m in sorted(self.terms, key=_grlex_key, reverse=True):
            c = self.terms[m]
            factors = [f"{var}{i}" if e == 1 else f"{var}{i}^{e}" for i, e in enumerate(m) if e]
            mono = "*".join(factors)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not pieces:
                pieces.append(body if c > 0 else f"-{body}")
            else:
                pieces.append(("+ " if c > 0 else "- ") + body)
        return " ".join(pieces)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"{type(self).__name__}({self.to_text()!r}, nvars={self.nvars})"


class HomogeneousPolynomial(Poly):
    """A form: every monomial has total degree ``degree``.

    The zero form keeps its degree tag, so ``f - f`` is still "degree p".
    """

    __slots__ = ("degree",)

    def __init__(self, terms: Mapping[Monomial, object] | None, nvars: int, degree: int | None = None):
        if nvars < 1:
            raise ValueError("a form needs at least one variable")
        super().__init__(terms, nvars)
        degrees = {sum(m) for m in self.terms}
        if len(degrees) > 1:
            raise NotHomogeneous(f"mixed term degrees {sorted(degrees)}")
        if degrees:
            (d,) = degrees
            if degree is not None and degree != d:
                raise NotHomogeneous(f"terms have degree {d}, tag says {degree}")
            degree = d
        if degree is None:
            degree = 0
        if degree < 0:
            raise ValueError("degree must be non-negative")
        self.degree = degree

    @classmethod
    def _raw_form(cls, terms: dict[Monomial, Fraction], nvars: int, degree: int) -> "HomogeneousPolynomial":
        p = HomogeneousPolynomial.__new__(HomogeneousPolynomial)
        p.nvars = nvars
        p.terms = terms
        p.degree = degree
        p._hash = None
        return p

    def __eq__(self, other):
        if isinstance(other, HomogeneousPolynomial) and not self.terms and not other.terms:
            return self.nvars == other.nvars and self.degree == other.degree
        return super().__eq__(other)

    __hash__ = Poly.__hash__


def _promote(terms: dict[Monomial, Fraction], a: Poly, b: Poly, op: str) -> Poly:
    """Build an arithmetic result, keeping the form type when the operation preserves it."""
    ha = isinstance(a, HomogeneousPolynomial)
    hb = isinstance(b, HomogeneousPolynomial)
    n = a.nvars
    if op in ("add",) and ha and hb and a.degree == b.degree:
        return HomogeneousPolynomial._raw_form(terms, n, a.degree)
    if op == "add" and ha and not hb and not b.terms:
        return HomogeneousPolynomial._raw_form(terms, n, a.degree)
    if op == "add" and hb and not ha and not a.terms:
        return HomogeneousPolynomial._raw_form(terms, n, b.degree)
    if op == "neg" and ha:
        return HomogeneousPolynomial._raw_form(terms, n, a.degree)
    if op == "mul" and ha and hb:
        return HomogeneousPolynomial._raw_form(terms, n, a.degree + b.degree)
    if op == "one" and ha:
        return HomogeneousPolynomial._raw_form(terms, n, 0)
    if op == "diff" and ha:
        return HomogeneousPolynomial._raw_form(terms, n, max(a.degree - 1, 0))
    return Poly._raw(terms, n)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|(x\d+)|(\^)|([+\-*()]))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolySyntaxError(f"unexpected character at position {pos}: {text[pos:pos + 10]!r}")
        num, var, caret, op = m.groups()
        if num is not None:
            tokens.append(("num", num))
        elif var is not None:
            tokens.append(("var", var))
        elif caret is not None:
            tokens.append(("op", "^"))
        else:
            tokens.append(("op", op))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return tokens


class _Parser:
    def __init__(self, tokens, nvars):
        self.tokens = tokens
        self.i = 0
        self.nvars = nvars

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value):
        kind, v = self.take()
        if v != value:
            raise PolySyntaxError(f"expected {value!r}, got {v!r}")

    def expr(self) -> Poly:
        result = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self) -> Poly:
        result = self.unary()
        while self.peek()[1] == "*":
            self.take()
            result = result * self.unary()
        return result

    def unary(self) -> Poly:
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, v = self.take()
            if kind != "num" or "/" in v:
                raise PolySyntaxError("exponent must be a non-negative integer literal")
            return base ** int(v)
        return base

    def atom(self) -> Poly:
        kind, v = self.take()
        if kind == "num":
            return Poly.constant(Fraction(v), self.nvars)
        if kind == "var":
            idx = int(v[1:])
            if idx >= self.nvars:
                raise PolySyntaxError(f"variable {v} out of range for nvars={self.nvars}")
            return Poly.var(idx, self.nvars)
        if v == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise PolySyntaxError(f"unexpected token {v!r}")


def parse_poly(text: str, nvars: int | None = None) -> Poly:
    """Parse text into a general :class:`Poly`."""
    tokens = _tokenize(text)
    if not tokens:
        raise PolySyntaxError("empty polynomial text")
    if nvars is None:
        idx = [int(v[1:]) for k, v in tokens if k == "var"]
        nvars = max(idx, default=0) + 1
    parser = _Parser(tokens, nvars)
    p = parser.expr()
    if parser.i != len(tokens):
        raise PolySyntaxError(f"trailing input starting at token {tokens[parser.i][1]!r}")
    return p


def parse(text: str, nvars: int | None = None) -> HomogeneousPolynomial:
    """Parse a homogeneous form; mixed term degrees raise :class:`NotHomogeneous`."""
    p = parse_poly(text, nvars)
    return HomogeneousPolynomial(p.terms, p.nvars)


# ---------------------------------------------------------------------------
# operations on forms

def gradient(f: HomogeneousPolynomial) -> list[HomogeneousPolynomial]:
    if f.is_zero():
        raise ZeroPolynomial("gradient of the zero form")
    return [f.diff(i) for i in range(f.nvars)]


def euler_identity_check(f: HomogeneousPolynomial) -> bool:
    """Check sum_i x_i df/dx_i == deg(f) * f exactly."""
    if f.is_zero():
        raise ZeroPolynomial("Euler identity of the zero form")
    n = f.nvars
    lhs = Poly.zero(n)
    for i, g in enumerate(gradient(f)):
        lhs = lhs + Poly.var(i, n) * g
    return lhs == f * f.degree


def evaluate(f: Poly, point: Sequence):
    """Evaluate at ``point``; exact for rational entries, complex otherwise."""
    if len(point) != f.nvars:
        raise DimensionMismatch(f"point has length {len(point)}, polynomial has {f.nvars} variables")
    exact = all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in point)
    if exact:
        pt = [Fraction(v) for v in point]
        total = Fraction(0)
        for m, c in f.terms.items():
            term = c
            for v, e in zip(pt, m):
                if e:
                    term *= v ** e
            total += term
        return total
    pt = [complex(v) for v in point]
    total = 0j
    for m, c in f.terms.items():
        term = complex(c)
        for v, e in zip(pt, m):
            if e:
                term *= v ** e
        total += term
    return total


def term_arrays(f: Poly) -> tuple[np.ndarray, np.ndarray]:
    """Exponent matrix and complex coefficient vector for numeric kernels."""
    monos = sorted(f.terms, key=_grlex_key, reverse=True)
    exps = np.array(monos, dtype=np.int64).reshape(len(monos), f.nvars)
    coeffs = np.array([complex(f.terms[m]) for m in monos], dtype=np.complex128)
    return exps, coeffs


# ---------------------------------------------------------------------------
# resultants

def sylvester_matrix(f: Poly, g: Poly, var: int,
                     deg_f: int | None = None, deg_g: int | None = None) -> list[list[Poly]]:
    """Sylvester matrix of f and g viewed as polynomials in ``x_var``.

    ``deg_f``/``deg_g`` override the actual degrees (formal degrees), which is
    how resultants of binary forms are taken after dehomogenizing.
    """
    m = f.degree_in(var) if deg_f is None else deg_f
    l = g.degree_in(var) if deg_g is None else deg_g
    if m < f.degree_in(var) or l < g.degree_in(var):
        raise ValueError("formal degree smaller than actual degree")
    zero = Poly.zero(f.nvars)
    fc = f.coefficients_in(var) + [zero] * (m + 1)
    gc = g.coefficients_in(var) + [zero] * (l + 1)
    size = m + l
    rows: list[list[Poly]] = []
    for i in range(l):
        row = [zero] * size
        for k in range(m + 1):
            row[i + k] = fc[m - k]
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k in range(l + 1):
            row[i + k] = gc[l - k]
        rows.append(row)
    return rows


def bareiss_det(matrix: list[list[Poly]]) -> Poly:
    """Fraction-free determinant of a square matrix of polynomials."""
    size = len(matrix)
    if size == 0:
        raise ValueError("empty matrix")
    nvars = matrix[0][0].nvars
    a = [list(row) for row in matrix]
    sign = 1
    prev = Poly.constant(1, nvars)
    for k in range(size - 1):
        if a[k][k].is_zero():
            swap = next((r for r in range(k + 1, size) if not a[r][k].is_zero()), None)
            if swap is None:
                return Poly.zero(nvars)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                num = a[i][j] * pivot - a[i][k] * a[k][j]
                a[i][j] = num.exact_div(prev) if k else num
        prev = pivot
    det = a[-1][-1]
    return -det if sign < 0 else det


def resultant(f: Poly, g: Poly, var: int,
              deg_f: int | None = None, deg_g: int | None = None) -> Poly:
    """Resultant of f and g with respect to ``x_var`` (Sylvester determinant)."""
    if f.is_zero() or g.is_zero():
        raise ZeroPolynomial("resultant with a zero polynomial")
    if f.nvars != g.nvars:
        raise DimensionMismatch("operands live in different rings")
    m = f.degree_in(var) if deg_f is None else deg_f
    l = g.degree_in(var) if deg_g is None else deg_g
    if m == 0 and l == 0:
        return Poly.constant(1, f.nvars)
    res = bareiss_det(sylvester_matrix(f, g, var, deg_f, deg_g))
    return Poly._raw(res.terms, res.nvars)


# ---------------------------------------------------------------------------
# sympy bridge: squarefree part and factorization only

def to_sympy(f: Poly):
    import sympy

    gens = sympy.symbols(f"x0:{f.nvars}")
    expr = sympy.Add(*[sympy.Rational(c.numerator, c.denominator)
                       * sympy.Mul(*[g ** e for g, e in zip(gens, m)])
                       for m, c in f.terms.items()])
    return sympy.Poly(expr, *gens, domain="QQ")


def from_sympy(p, nvars: int) -> Poly:
    terms = {}
    for mono, c in p.terms():
        terms[tuple(mono)] = Fraction(int(c.numerator), int(c.denominator))
    return Poly(terms, nvars)


def irreducible_factors(f: Poly) -> list[tuple[Poly, int]]:
    """Irreducible factors over Q with multiplicities, each made primitive."""
    if f.is_zero():
        raise ZeroPolynomial("factoring the zero polynomial")
    if f.total_degree() == 0:
        return []
    _, facs = to_sympy(f).factor_list()
    out = []
    for p, mult in facs:
        q = from_sympy(p, f.nvars).primitive()
        if q.is_homogeneous():
            q = q.as_homogeneous()
        out.append((q, int(mult)))
    out.sort(key=lambda t: (t[0].total_degree(), t[0].to_text()))
    return out


def squarefree_part(f: Poly) -> Poly:
    """Product of the distinct irreducible factors, made primitive."""
    result = Poly.constant(1, f.nvars)
    if isinstance(f, HomogeneousPolynomial):
        result = HomogeneousPolynomial._raw_form(result.terms, f.nvars, 0)
    for p, _ in irreducible_factors(f):
        result = result * p
    return result.primitive()


def monomials_of_degree(nvars: int, degree: int) -> Iterable[Monomial]:
    """All exponent vectors of the given total degree, in graded-lex order."""
    if nvars == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in monomials_of_degree(nvars - 1, degree - first):
            yield (first,) + rest

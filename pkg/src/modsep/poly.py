"""Sparse multivariate polynomials over a finite field.

A polynomial is a map from exponent tuples to nonzero coefficients. Variables
are printed as ``x1 .. xn`` (1-based) while the API uses 0-based indices.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping, Sequence, Union

from .field import FieldElement, FiniteField, parse_element

Monomial = tuple[int, ...]
Scalar = Union[FieldElement, int]

ABSENT = "absent"  # exponent = 0
PRESENT = "present"  # exponent >= 1


class PolynomialError(ValueError):
    pass


def grevlex_key(mono: Monomial) -> tuple:
    """Sort key; larger key means larger monomial in graded reverse lex."""
    return (sum(mono), tuple(-e for e in reversed(mono)))


class Polynomial:
    __slots__ = ("field", "nvars", "_terms", "_hash")

    def __init__(self, field: FiniteField, nvars: int,
                 terms: Mapping[Monomial, Scalar] | None = None):
        self.field = field
        self.nvars = nvars
        raw: dict[Monomial, int] = {}
        for mono, c in (terms or {}).items():
            mono = tuple(mono)
            if len(mono) != nvars or any(e < 0 for e in mono):
                raise PolynomialError(f"bad monomial {mono} for {nvars} variables")
            idx = field(c).index
            if idx:
                raw[mono] = field._add(raw.get(mono, 0), idx)
        self._terms = {m: c for m, c in raw.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, field: FiniteField, nvars: int, terms: dict[Monomial, int]) -> Polynomial:
        obj = cls.__new__(cls)
        obj.field = field
        obj.nvars = nvars
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, field: FiniteField, nvars: int) -> Polynomial:
        return cls._raw(field, nvars, {})

    @classmethod
    def constant(cls, field: FiniteField, nvars: int, c: Scalar) -> Polynomial:
        idx = field(c).index
        return cls._raw(field, nvars, {(0,) * nvars: idx} if idx else {})

    @classmethod
    def var(cls, field: FiniteField, nvars: int, i: int) -> Polynomial:
        if not 0 <= i < nvars:
            raise PolynomialError(f"variable index {i} out of range")
        mono = [0] * nvars
        mono[i] = 1
        return cls._raw(field, nvars, {tuple(mono): 1})

    @classmethod
    def monomial(cls, field: FiniteField, mono: Sequence[int], c: Scalar = 1) -> Polynomial:
        return cls(field, len(mono), {tuple(mono): c})

    @classmethod
    def gens(cls, field: FiniteField, nvars: int) -> list[Polynomial]:
        return [cls.var(field, nvars, i) for i in range(nvars)]

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> dict[Monomial, FieldElement]:
        return {m: FieldElement(self.field, self._terms[m]) for m in self.monomials()}

    def monomials(self) -> list[Monomial]:
        return sorted(self._terms, key=grevlex_key, reverse=True)

    def coefficient(self, mono: Sequence[int]) -> FieldElement:
        return FieldElement(self.field, self._terms.get(tuple(mono), 0))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Polynomial):
            return (self.field == other.field and self.nvars == other.nvars
                    and self._terms == other._terms)
        if isinstance(other, (int, FieldElement)):
            return self == Polynomial.constant(self.field, self.nvars, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # -- arithmetic ---------------------------------------------------------

    def _lift(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.field != self.field or other.nvars != self.nvars:
                raise PolynomialError("polynomials live in different rings")
            return other
        if isinstance(other, (int, FieldElement)):
            return Polynomial.constant(self.field, self.nvars, other)
        raise TypeError(f"unsupported operand {type(other).__name__}")

    def __add__(self, other) -> Polynomial:
        other = self._lift(other)
        add = self.field._add
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = add(out.get(m, 0), c)
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial._raw(self.field, self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        neg = self.field._neg
        return Polynomial._raw(self.field, self.nvars, {m: neg(c) for m, c in self._terms.items()})

    def __sub__(self, other) -> Polynomial:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> Polynomial:
        return self._lift(other) - self

    def scale(self, c: Scalar) -> Polynomial:
        idx = self.field(c).index
        if not idx:
            return Polynomial.zero(self.field, self.nvars)
        mul = self.field._mul
        return Polynomial._raw(self.field, self.nvars, {m: mul(v, idx) for m, v in self._terms.items()})

    def __mul__(self, other) -> Polynomial:
        if isinstance(other, (int, FieldElement)):
            return self.scale(other)
        other = self._lift(other)
        add, mul = self.field._add, self.field._mul
        out: dict[Monomial, int] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                c = mul(c1, c2)
                prev = out.get(m)
                out[m] = c if prev is None else add(prev, c)
        return Polynomial._raw(self.field, self.nvars, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int) -> Polynomial:
        if not isinstance(e, int) or e < 0:
            raise PolynomialError("exponent must be a non-negative integer")
        result = Polynomial.constant(self.field, self.nvars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- evaluation and transformations --------------------------------------

    def evaluate(self, point: Sequence[Scalar]) -> FieldElement:
        if len(point) != self.nvars:
            raise PolynomialError(f"point has {len(point)} coordinates, ring has {self.nvars}")
        F = self.field
        vals = [F(v).index for v in point]
        add, mul, pw = F._add, F._mul, F._pow
        acc = 0
        for mono, c in self._terms.items():
            t = c
            for v, e in zip(vals, mono):
                if e:
                    t = mul(t, pw(v, e))
                    if not t:
                        break
            acc = add(acc, t)
        return FieldElement(F, acc)

    __call__ = evaluate

    def substitute_linear(self, L: Sequence[Sequence[Scalar]]) -> Polynomial:
        return substitute_linear(self, L)

    def filter_terms(self, constraints: Iterable[tuple[int, str]]) -> Polynomial:
        return filter_terms(self, constraints)

    def remap(self, positions: Sequence[int], nvars: int) -> Polynomial:
        """Send variable i to variable ``positions[i]`` of a ring with ``nvars`` variables."""
        if len(positions) != self.nvars:
            raise PolynomialError("position table does not match the variable count")
        out = {}
        for mono, c in self._terms.items():
            new = [0] * nvars
            for i, e in enumerate(mono):
                if e:
                    new[positions[i]] += e
            out[tuple(new)] = c
        return Polynomial._raw(self.field, nvars, out)

    def set_zero_and_drop(self, i: int) -> Polynomial:
        """Substitute x_i = 0 and delete that variable from the ring."""
        out = {m[:i] + m[i + 1:]: c for m, c in self._terms.items() if m[i] == 0}
        return Polynomial._raw(self.field, self.nvars - 1, out)

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({self}, {self.field.name}, nvars={self.nvars})"


def substitute_linear(f: Polynomial, L: Sequence[Sequence[Scalar]]) -> Polynomial:
    """Replace every x_i by the linear form sum_j L[i][j] x_j and expand."""
    n = f.nvars
    if len(L) != n or any(len(row) != n for row in L):
        raise PolynomialError(f"substitution matrix must be {n}x{n}")
    F = f.field
    rows = [[F(c).index for c in row] for row in L]
    forms = []
    for row in rows:
        terms = {}
        for j, c in enumerate(row):
            if c:
                mono = [0] * n
                mono[j] = 1
                terms[tuple(mono)] = c
        forms.append(Polynomial._raw(F, n, terms))
    powers: dict[tuple[int, int], Polynomial] = {}

    def power(i: int, e: int) -> Polynomial:
        key = (i, e)
        if key not in powers:
            powers[key] = forms[i] if e == 1 else power(i, e - 1) * forms[i]
        return powers[key]

    out = Polynomial.zero(F, n)
    for mono, c in f._terms.items():
        term = Polynomial._raw(F, n, {(0,) * n: c})
        for i, e in enumerate(mono):
            if e:
                term = term * power(i, e)
        out = out + term
    return out


def filter_terms(f: Polynomial, constraints: Iterable[tuple[int, str]]) -> Polynomial:
    """Keep the terms whose monomials satisfy every (variable, ABSENT|PRESENT) predicate."""
    constraints = list(constraints)
    for i, pred in constraints:
        if not 0 <= i < f.nvars:
            raise PolynomialError(f"variable index {i} out of range")
        if pred not in (ABSENT, PRESENT):
            raise PolynomialError(f"unknown predicate {pred!r}")

    def keep(mono: Monomial) -> bool:
        return all((mono[i] == 0) == (pred == ABSENT) for i, pred in constraints)

    return Polynomial._raw(f.field, f.nvars, {m: c for m, c in f._terms.items() if keep(m)})


# -- text format -------------------------------------------------------------

def _coeff_text(c: FieldElement) -> str:
    s = str(c)
    return f"({s})" if "+" in s else s


def format_polynomial(f: Polynomial) -> str:
    if f.is_zero():
        return "0"
    parts = []
    for mono in f.monomials():
        c = f.coefficient(mono)
        factors = [f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(mono) if e]
        if not factors:
            parts.append(_coeff_text(c))
        elif c == 1:
            parts.append("*".join(factors))
        else:
            parts.append("*".join([_coeff_text(c)] + factors))
    return " + ".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+)|(x)(\d+)|(t)|([-+*^()]))")


class _Parser:
    def __init__(self, text: str, field: FiniteField, nvars: int):
        self.field, self.nvars = field, nvars
        self.tokens = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise PolynomialError(f"unexpected character at {pos} in {text!r}")
            num, _, var, t, op = m.groups()
            if num is not None:
                self.tokens.append(("num", int(num)))
            elif var is not None:
                self.tokens.append(("var", int(var)))
            elif t is not None:
                self.tokens.append(("t", None))
            else:
                self.tokens.append(("op", op))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, op=None):
        tok = self.peek()
        if op is not None and tok != ("op", op):
            raise PolynomialError(f"expected {op!r}, got {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        out = self.expr()
        if self.i != len(self.tokens):
            raise PolynomialError(f"trailing input near token {self.i}")
        return out

    def expr(self) -> Polynomial:
        neg = False
        if self.peek() == ("op", "-"):
            self.take()
            neg = True
        acc = self.term()
        if neg:
            acc = -acc
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> Polynomial:
        acc = self.power()
        while self.peek() == ("op", "*"):
            self.take()
            acc = acc * self.power()
        return acc

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, e = self.take()
            if kind != "num":
                raise PolynomialError("exponent must be an integer")
            base = base**e
        return base

    def atom(self) -> Polynomial:
        kind, val = self.take()
        F, n = self.field, self.nvars
        if kind == "num":
            return Polynomial.constant(F, n, val)
        if kind == "t":
            return Polynomial.constant(F, n, parse_element("t", F))
        if kind == "var":
            if not 1 <= val <= n:
                raise PolynomialError(f"variable x{val} outside x1..x{n}")
            return Polynomial.var(F, n, val - 1)
        if (kind, val) == ("op", "("):
            inner = self.expr()
            self.take(")")
            return inner
        raise PolynomialError(f"unexpected token {val!r}")


def parse_polynomial(text: str, field: FiniteField, nvars: int) -> Polynomial:
    """Inverse of :func:`format_polynomial` (also accepts any +,-,*,^ expression)."""
    return _Parser(text, field, nvars).parse()

"""Exact arithmetic in finite fields F_{p^k}.

Elements are reduced coefficient vectors with respect to the power basis of a
fixed monic irreducible modulus. Internally each element is also identified
with the integer ``sum(c_i * p**i)``; that integer is the element's position
in :meth:`FiniteField.elements` and is what the lookup tables are keyed on.
"""

from __future__ import annotations

import functools
import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

MAX_ORDER = 1 << 16


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- dense polynomials over F_p, coefficient lists low degree first ----------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _poly_rem(a: Sequence[int], mod: Sequence[int], p: int) -> list[int]:
    """Remainder of ``a`` by a monic ``mod``."""
    a = list(a)
    d = len(mod) - 1
    for i in range(len(a) - 1, d - 1, -1):
        c = a[i]
        if c:
            for j in range(d + 1):
                a[i - d + j] = (a[i - d + j] - c * mod[j]) % p
    return _trim(a[:d] if len(a) > d else a)


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree at most deg/2."""
    k = len(modulus) - 1
    for d in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_rem(modulus, list(low) + [1], p):
                return False
    return True


def least_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree k (c_0 compared first)."""
    for low in itertools.product(range(p), repeat=k):
        cand = tuple(low) + (1,)
        if is_irreducible(cand, p):
            return cand
    raise FieldError(f"no irreducible polynomial of degree {k} over F_{p}")  # pragma: no cover


# -- the field ---------------------------------------------------------------

class FiniteField:
    """The field F_p[t]/(modulus) with q = p**k elements.

    Use :func:`make_field` rather than calling this directly; it validates the
    arguments and returns a cached instance.
    """

    def __init__(self, p: int, k: int, modulus: Sequence[int]):
        self.p = p
        self.k = k
        self.modulus = tuple(modulus)
        self.order = p**k
        self._build_tables()

    # table construction works on coefficient vectors, everything after on ints
    def _digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.k):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def _undigits(self, coeffs: Sequence[int]) -> int:
        a = 0
        for c in reversed(coeffs):
            a = a * self.p + c
        return a

    def _slow_mul(self, a: int, b: int) -> int:
        prod = _poly_mul(_trim(self._digits(a)), _trim(self._digits(b)), self.p)
        return self._undigits(_poly_rem(prod, self.modulus, self.p) + [0] * self.k)

    def _build_tables(self) -> None:
        q, p = self.order, self.p
        if p == 2:
            self._add = int.__xor__
        elif self.k == 1:
            self._add = lambda a, b: (a + b) % p
        else:
            table = [[self._undigits([(x + y) % p for x, y in zip(self._digits(a), self._digits(b))])
                      for b in range(q)] for a in range(q)] if q <= 729 else None
            if table is not None:
                self._add = lambda a, b: table[a][b]
            else:
                self._add = lambda a, b: self._undigits(
                    [(x + y) % p for x, y in zip(self._digits(a), self._digits(b))])
        self._neg_table = [self._undigits([(-c) % p for c in self._digits(a)]) for a in range(q)]

        # discrete log tables from the first generator of the multiplicative group
        n = q - 1
        factors = prime_factors(n)
        gen = None
        for g in range(1, q):
            if all(self._slow_pow(g, n // r) != 1 for r in factors):
                gen = g
                break
        assert gen is not None
        self.primitive_element_index = gen
        exp = [1] * n
        for i in range(1, n):
            exp[i] = self._slow_mul(exp[i - 1], gen)
        log = [0] * q
        for i, v in enumerate(exp):
            log[v] = i
        self._exp = exp
        self._log = log

    def _slow_pow(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._slow_mul(result, base)
            base = self._slow_mul(base, base)
            e >>= 1
        return result

    # integer-level operations (used by the polynomial and verification layers)
    def _sub(self, a: int, b: int) -> int:
        return self._add(a, self._neg_table[b])

    def _neg(self, a: int) -> int:
        return self._neg_table[a]

    def _mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]

    def _inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + self.name)
        return self._exp[(-self._log[a]) % (self.order - 1)]

    def _pow(self, a: int, e: int) -> int:
        if e < 0:
            return self._pow(self._inv(a), -e)
        if a == 0:
            return 0 if e else 1
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    def _from_int(self, n: int) -> int:
        return n % self.p

    # public surface
    @property
    def name(self) -> str:
        return f"{self.p}^{self.k}"

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    @property
    def gen(self) -> FieldElement:
        """The class of t (equal to 0 for prime fields, whose modulus is t)."""
        if self.k == 1:
            return self.zero
        return FieldElement(self, self.p)

    def element(self, index: int) -> FieldElement:
        if not 0 <= index < self.order:
            raise FieldError(f"index {index} out of range for {self.name}")
        return FieldElement(self, index)

    def from_coeffs(self, coeffs: Sequence[int]) -> FieldElement:
        if len(coeffs) > self.k:
            raise FieldError(f"expected at most {self.k} coefficients")
        return FieldElement(self, self._undigits([c % self.p for c in coeffs]))

    def __call__(self, x: Union[int, str, FieldElement]) -> FieldElement:
        if isinstance(x, FieldElement):
            if x.field is not self:
                raise FieldError(f"element of {x.field.name} used in {self.name}")
            return x
        if isinstance(x, int):
            return FieldElement(self, self._from_int(x))
        if isinstance(x, str):
            return parse_element(x, self)
        raise TypeError(f"cannot convert {type(x).__name__} to a field element")

    def elements(self) -> list[FieldElement]:
        return [FieldElement(self, i) for i in range(self.order)]

    def __iter__(self) -> Iterator[FieldElement]:
        return iter(self.elements())

    def __len__(self) -> int:
        return self.order

    def __contains__(self, x: object) -> bool:
        return isinstance(x, FieldElement) and x.field is self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteField):
            return NotImplemented
        return (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus))

    def __repr__(self) -> str:
        return f"GF({self.name})"

    def modulus_str(self) -> str:
        return _format_coeffs(self.modulus)


@functools.lru_cache(maxsize=None)
def _cached_field(p: int, k: int) -> FiniteField:
    return FiniteField(p, k, least_irreducible(p, k))


def make_field(p: int, k: int = 1, max_order: int = MAX_ORDER) -> FiniteField:
    """Return F_{p^k} with the lexicographically least monic irreducible modulus."""
    if not isinstance(p, int) or not is_prime(p):
        raise FieldError(f"characteristic must be prime, got {p!r}")
    if not isinstance(k, int) or k < 1:
        raise FieldError(f"extension degree must be a positive integer, got {k!r}")
    if p**k > max_order:
        raise FieldError(f"field of order {p}^{k} exceeds the limit {max_order}")
    return _cached_field(p, k)


def parse_field(text: str) -> FiniteField:
    """Parse ``"p^k"`` or ``"p"``."""
    m = re.fullmatch(r"\s*(\d+)\s*(?:\^\s*(\d+)\s*)?", text)
    if not m:
        raise FieldError(f"bad field {text!r}, expected p^k")
    return make_field(int(m.group(1)), int(m.group(2) or 1))


@dataclass(frozen=True, eq=False)
class FieldElement:
    field: FiniteField
    index: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(self.field._digits(self.index))

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError(f"mismatched fields {self.field.name} and {other.field.name}")
            return other.index
        if isinstance(other, int):
            return self.field._from_int(other)
        raise TypeError(f"unsupported operand {type(other).__name__}")

    def _new(self, index: int) -> FieldElement:
        return FieldElement(self.field, index)

    def __add__(self, other):
        return self._new(self.field._add(self.index, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return self._new(self.field._sub(self.index, self._coerce(other)))

    def __rsub__(self, other):
        return self._new(self.field._sub(self._coerce(other), self.index))

    def __neg__(self):
        return self._new(self.field._neg(self.index))

    def __mul__(self, other):
        if not isinstance(other, (FieldElement, int)):
            return NotImplemented
        return self._new(self.field._mul(self.index, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._new(self.field._mul(self.index, self.field._inv(self._coerce(other))))

    def __rtruediv__(self, other):
        return self._new(self.field._mul(self._coerce(other), self.field._inv(self.index)))

    def __pow__(self, e: int):
        return self._new(self.field._pow(self.index, e))

    def inverse(self) -> FieldElement:
        return self._new(self.field._inv(self.index))

    def multiplicative_order(self) -> int:
        if self.index == 0:
            raise FieldError("zero has no multiplicative order")
        n = self.field.order - 1
        return n // math.gcd(self.field._log[self.index], n)

    def __bool__(self) -> bool:
        return self.index != 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.index == other.index
        if isinstance(other, int) and not isinstance(other, bool):
            return self.index == self.field._from_int(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.p, self.field.k, self.index))

    def __str__(self) -> str:
        return _format_coeffs(self.coeffs)

    def __repr__(self) -> str:
        return f"FieldElement({self}, {self.field.name})"


def _format_coeffs(coeffs: Sequence[int]) -> str:
    parts = []
    for d in range(len(coeffs) - 1, -1, -1):
        c = coeffs[d]
        if not c:
            continue
        if d == 0:
            parts.append(str(c))
            continue
        power = "t" if d == 1 else f"t^{d}"
        parts.append(power if c == 1 else f"{c}*{power}")
    return "+".join(parts) or "0"


_TERM = re.compile(r"(?:(\d+)\*?)?(t)(?:\^(\d+))?|(\d+)")


def parse_element(text: str, field: FiniteField) -> FieldElement:
    """Parse ``"2*t^2+t+1"``-style literals; exponents reduce by the modulus."""
    s = text.replace(" ", "")
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    if not s:
        raise FieldError("empty field element")
    acc = field.zero
    for term in s.split("+"):
        m = _TERM.fullmatch(term)
        if not m:
            raise FieldError(f"bad field element {text!r}")
        if m.group(4) is not None:
            acc = acc + int(m.group(4))
            continue
        coeff = int(m.group(1)) if m.group(1) else 1
        exp = int(m.group(3)) if m.group(3) else 1
        t = FieldElement(field, field.p) if field.k > 1 else field.zero
        acc = acc + t**exp * coeff
    return acc


def primitive_root_of_unity(field: FiniteField, m: int) -> FieldElement:
    """First element in enumeration order of multiplicative order exactly m."""
    if m < 1:
        raise FieldError("m must be positive")
    if (field.order - 1) % m:
        raise FieldError(f"{m} does not divide {field.order - 1}; enlarge the field {field.name}")
    for a in field.elements()[1:]:
        if a.multiplicative_order() == m:
            return a
    raise FieldError("unreachable")  # pragma: no cover


def enumerate_field(field: FiniteField) -> list[FieldElement]:
    return field.elements()

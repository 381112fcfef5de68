"""Indecomposable Klein four and cyclic modules, their surjections and submodules."""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass
from typing import Sequence

from .action import GroupAction, Matrix, as_matrix, identity_matrix, mat_mul, mat_pow
from .field import FieldElement, FiniteField, make_field, parse_element, primitive_root_of_unity
from .poly import Polynomial

KLEIN_II = "klein-ii"
KLEIN_III = "klein-iii"
KLEIN_IV = "klein-iv"
KLEIN_V = "klein-v"
KLEIN_REGULAR = "klein-regular"
CYCLIC = "cyclic"

KLEIN_VARIANTS = (KLEIN_II, KLEIN_III, KLEIN_IV, KLEIN_V, KLEIN_REGULAR)
VARIANTS = KLEIN_VARIANTS + (CYCLIC,)

KLEIN_LABELS = ("e", "s1", "s2", "s3")


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class ModuleSpec:
    variant: str
    field: FiniteField
    n: int | None = None
    lam: FieldElement | None = None
    p: int | None = None
    m: int | None = None

    def __post_init__(self):
        v, F = self.variant, self.field
        if v not in VARIANTS:
            raise SpecError(f"unknown module type {v!r}")
        if v in KLEIN_VARIANTS:
            if F.p != 2:
                raise SpecError("Klein four modules need characteristic 2")
            if v != KLEIN_REGULAR and (self.n is None or self.n < 2):
                raise SpecError(f"{v} needs n >= 2")
            if v == KLEIN_II:
                if self.lam is None:
                    raise SpecError("klein-ii needs lambda")
                if self.lam.field != F:
                    raise SpecError(f"lambda={self.lam} is not an element of {F.name}")
            elif self.lam is not None:
                raise SpecError(f"{v} takes no lambda")
        else:
            p, m, n = self.p, self.m, self.n
            if p is None or m is None or n is None:
                raise SpecError("cyclic needs p, m and n")
            if F.p != p:
                raise SpecError(f"cyclic group of order {p}*{m} needs characteristic {p}")
            if m < 1 or math.gcd(p, m) != 1:
                raise SpecError("need m >= 1 and gcd(p, m) = 1")
            if not 1 <= n <= p:
                raise SpecError(f"need 1 <= n <= p, got n={n}")
            if (F.order - 1) % m:
                raise SpecError(f"{m} does not divide {F.order - 1}; use a larger extension of F_{p}")

    @property
    def dim(self) -> int:
        v = self.variant
        if v in (KLEIN_II, KLEIN_III):
            return 2 * self.n
        if v in (KLEIN_IV, KLEIN_V):
            return 2 * self.n - 1
        if v == KLEIN_REGULAR:
            return 4
        return self.n

    @property
    def group_order(self) -> int:
        return self.p * self.m if self.variant == CYCLIC else 4

    def with_n(self, n: int) -> ModuleSpec:
        return ModuleSpec(self.variant, self.field, n, self.lam, self.p, self.m)

    def __str__(self) -> str:
        v = self.variant
        if v == KLEIN_REGULAR:
            return v
        if v == KLEIN_II:
            return f"{v}:n={self.n},lambda={self.lam}"
        if v == CYCLIC:
            return f"{v}:p={self.p},m={self.m},n={self.n}"
        return f"{v}:n={self.n}"


def least_cyclic_degree(p: int, m: int) -> int:
    """Least k with m | p^k - 1."""
    if math.gcd(p, m) != 1:
        raise SpecError("need gcd(p, m) = 1")
    k = 1
    while (p**k - 1) % m:
        k += 1
    return k


def parse_spec(text: str, field: FiniteField | None = None) -> ModuleSpec:
    """Parse ``"klein-ii:n=3,lambda=t"``, ``"cyclic:p=3,m=4,n=3"``, ``"klein-regular"``."""
    text = text.strip()
    variant, _, rest = text.partition(":")
    variant = variant.strip()
    params: dict[str, str] = {}
    if rest.strip():
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq:
                raise SpecError(f"bad parameter {item!r} in {text!r}")
            params[key.strip()] = val.strip()
    allowed = {KLEIN_II: {"n", "lambda"}, CYCLIC: {"p", "m", "n"}, KLEIN_REGULAR: set()}
    if variant not in VARIANTS:
        raise SpecError(f"unknown module type {variant!r}")
    extra = set(params) - allowed.get(variant, {"n"})
    if extra:
        raise SpecError(f"unexpected parameters {sorted(extra)} for {variant}")

    def integer(key: str) -> int:
        if key not in params:
            raise SpecError(f"{variant} needs {key}=")
        if not re.fullmatch(r"\d+", params[key]):
            raise SpecError(f"{key} must be a non-negative integer")
        return int(params[key])

    if variant == CYCLIC:
        p, m, n = integer("p"), integer("m"), integer("n")
        if field is None:
            try:
                field = make_field(p, least_cyclic_degree(p, m))
            except ValueError as exc:
                raise SpecError(str(exc)) from exc
        return ModuleSpec(CYCLIC, field, n=n, p=p, m=m)
    if field is None:
        raise SpecError(f"{variant} needs a field")
    if variant == KLEIN_REGULAR:
        return ModuleSpec(variant, field)
    n = integer("n")
    if variant == KLEIN_II:
        if "lambda" not in params:
            raise SpecError("klein-ii needs lambda=")
        lam = parse_element(params["lambda"], field)
        if str(lam) != params["lambda"].replace(" ", "") or (field.k == 1 and "t" in params["lambda"]):
            raise SpecError(f"lambda={params['lambda']} is not a reduced element of {field.name}")
        return ModuleSpec(variant, field, n=n, lam=lam)
    return ModuleSpec(variant, field, n=n)


# -- builders -----------------------------------------------------------------

def _klein_action(spec: ModuleSpec, s1: Matrix, s3: Matrix) -> GroupAction:
    s2 = mat_mul(s1, s3)
    F = spec.field
    duals = (identity_matrix(F, len(s1)), s1, s2, s3)
    G = GroupAction(F, len(s1), duals, KLEIN_LABELS, generators=(1, 3),
                    subgroups={"H1": (0, 1), "H2": (0, 2), "H3": (0, 3)},
                    order=4, name=str(spec))
    I = duals[0]
    for g in (1, 2, 3):
        assert mat_mul(duals[g], duals[g]) == I, "Klein generators must be involutions"
    return G


def _klein_ii_matrices(F: FiniteField, n: int, lam: FieldElement) -> tuple[Matrix, Matrix]:
    """Dual matrices of s1 and s3 on x_1..x_2n (0-based rows)."""
    s1 = [[0] * (2 * n) for _ in range(2 * n)]
    s3 = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(2 * n):
        s1[i][i] = 1
        s3[i][i] = 1
    for i in range(n):
        s1[i][n + i] = 1
        s3[i][n + i] = lam
        if i + 1 < n:
            s3[i][n + i + 1] = 1
    return as_matrix(F, s1), as_matrix(F, s3)


def _delete_index(A: Matrix, k: int) -> Matrix:
    return tuple(tuple(x for j, x in enumerate(row) if j != k) for i, row in enumerate(A) if i != k)


def _klein_v_matrices(F: FiniteField, n: int) -> tuple[Matrix, Matrix]:
    """s1 and s2 on x_1..x_{n-1}, x_{n+1}..x_{2n}, renumbered 0..2n-2."""
    d = 2 * n - 1
    s1 = [[int(i == j) for j in range(d)] for i in range(d)]
    s2 = [[int(i == j) for j in range(d)] for i in range(d)]
    for i in range(n - 1):
        s1[i][n + i - 1] = 1  # x_{n+i}
        s2[i][n + i] = 1  # x_{n+i+1}
    return as_matrix(F, s1), as_matrix(F, s2)


@functools.lru_cache(maxsize=None)
def build(spec: ModuleSpec) -> GroupAction:
    F, v, n = spec.field, spec.variant, spec.n
    if v == KLEIN_II:
        return _klein_action(spec, *_klein_ii_matrices(F, n, spec.lam))
    if v == KLEIN_III:
        s1, s3 = _klein_ii_matrices(F, n, F.zero)
        return _klein_action(spec, s3, s1)
    if v == KLEIN_IV:
        s1, s3 = _klein_ii_matrices(F, n, F.one)
        return _klein_action(spec, _delete_index(s1, n), _delete_index(s3, n))
    if v == KLEIN_V:
        s1, s2 = _klein_v_matrices(F, n)
        return _klein_action(spec, s1, mat_mul(s1, s2))
    if v == KLEIN_REGULAR:
        # elements of Z2 x Z2 as bit pairs: e=0, s1=(1,0), s2=(1,1), s3=(0,1)
        bits = {0: 0b00, 1: 0b01, 2: 0b11, 3: 0b10}
        index = {b: i for i, b in bits.items()}

        def perm(g: int) -> Matrix:
            return as_matrix(F, [[int(j == index[bits[g] ^ bits[i]]) for j in range(4)] for i in range(4)])

        return _klein_action(spec, perm(1), perm(3))
    return _cyclic_action(spec)


def cyclic_lambda(spec: ModuleSpec) -> FieldElement:
    return primitive_root_of_unity(spec.field, spec.m)


def _cyclic_action(spec: ModuleSpec) -> GroupAction:
    F, p, m, n = spec.field, spec.p, spec.m, spec.n
    lam_inv = cyclic_lambda(spec).inverse()
    sigma = as_matrix(F, [[int(i == j or j == i - 1) for j in range(n)] for i in range(n)])
    alpha = tuple(tuple(lam_inv if i == j else F.zero for j in range(n)) for i in range(n))
    I = identity_matrix(F, n)
    assert mat_pow(sigma, p) == I and (n == 1 or sigma != I)
    assert all(mat_pow(alpha, b) != I for b in range(1, m)) and mat_pow(alpha, m) == I
    a_pows = [mat_pow(alpha, b) for b in range(m)]
    if n == 1:
        # sigma acts trivially on V_1; only the powers of alpha are distinct
        return GroupAction(F, n, a_pows, [f"a^{b}" for b in range(m)],
                           generators=(1,) if m > 1 else (),
                           subgroups={"H": (0,), "M": tuple(range(m))}, name=str(spec))
    s_pows = [mat_pow(sigma, a) for a in range(p)]
    duals, labels = [], []
    for a in range(p):
        for b in range(m):
            duals.append(mat_mul(s_pows[a], a_pows[b]))
            labels.append(f"s^{a}*a^{b}")
    gens = (m, 1) if m > 1 else (m,)
    return GroupAction(F, n, duals, labels, generators=gens,
                       subgroups={"H": tuple(a * m for a in range(p)), "M": tuple(range(m))},
                       order=p * m, name=str(spec))


# -- surjections and the type (iv) submodule ------------------------------------

@dataclass(frozen=True)
class Surjection:
    """Coordinate projection V -> W; target coordinate t is source coordinate ``keep[t]``."""

    source: ModuleSpec
    target: ModuleSpec
    keep: tuple[int, ...]

    def apply(self, point: Sequence) -> tuple:
        return tuple(point[k] for k in self.keep)

    __call__ = apply

    def pullback(self, f: Polynomial) -> Polynomial:
        if f.nvars != self.target.dim:
            raise SpecError("polynomial does not live on the target module")
        return f.remap(self.keep, self.source.dim)

    @property
    def dropped(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.source.dim) if i not in self.keep)

    def index_map(self) -> dict:
        return {"kind": "pullback", "source": str(self.source), "target": str(self.target),
                "target_to_source": [k + 1 for k in self.keep]}


def has_surjection(spec: ModuleSpec) -> bool:
    if spec.variant in (KLEIN_II, KLEIN_III, KLEIN_V):
        return spec.n >= 3
    if spec.variant == CYCLIC:
        return spec.n >= 2
    return False


def surjection(spec: ModuleSpec) -> Surjection:
    if not has_surjection(spec):
        raise SpecError(f"{spec} is a base case and has no smaller sibling")
    n = spec.n
    if spec.variant in (KLEIN_II, KLEIN_III):
        drop = {0, n}
    elif spec.variant == KLEIN_V:
        drop = {0, n - 1}
    else:
        drop = {n - 1}
    keep = tuple(i for i in range(spec.dim) if i not in drop)
    return Surjection(spec, spec.with_n(n - 1), keep)


def restrict_to_submodule(f: Polynomial, spec: ModuleSpec) -> Polynomial:
    """Restrict from klein-ii (lambda=1) to the submodule a_{n+1} = 0, i.e. klein-iv."""
    if spec.variant != KLEIN_II or spec.lam != 1:
        raise SpecError("restriction is defined for klein-ii with lambda=1")
    if f.nvars != spec.dim:
        raise SpecError("polynomial does not live on the module")
    return f.set_zero_and_drop(spec.n)


def submodule_inclusion(spec: ModuleSpec, point: Sequence) -> tuple:
    """Embed a klein-iv point (for the same n) into klein-ii by inserting a_{n+1} = 0."""
    n = spec.n
    return tuple(point[:n]) + (spec.field.zero,) + tuple(point[n:])


def iv_parent(spec: ModuleSpec) -> ModuleSpec:
    return ModuleSpec(KLEIN_II, spec.field, n=spec.n, lam=spec.field.one)

"""Finite abelian groups acting linearly on F[V] and on V.

Each group element is stored through its *dual matrix* D, the action on the
variables: ``g . x_i = sum_j D[i][j] x_j``. With ``sigma(f) = f o sigma^-1``
this forces the point action ``g . v = D^-1 v``, which is what
:func:`act_point` computes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .field import FieldElement, FiniteField
from .poly import Monomial, Polynomial, substitute_linear

Matrix = tuple[tuple[FieldElement, ...], ...]


class ActionError(ValueError):
    pass


# -- matrices over a finite field ---------------------------------------------

def identity_matrix(F: FiniteField, n: int) -> Matrix:
    return tuple(tuple(F.one if i == j else F.zero for j in range(n)) for i in range(n))


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    n, m = len(A), len(B[0])
    zero = A[0][0] * 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = zero
            for k, a in enumerate(A[i]):
                if a:
                    acc = acc + a * B[k][j]
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def mat_pow(A: Matrix, e: int) -> Matrix:
    F = A[0][0].field
    out = identity_matrix(F, len(A))
    for _ in range(e):
        out = mat_mul(out, A)
    return out


def mat_inv(A: Matrix) -> Matrix:
    """Gauss-Jordan inverse; raises ActionError when A is singular."""
    n = len(A)
    F = A[0][0].field
    aug = [list(A[i]) + list(identity_matrix(F, n)[i]) for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col]), None)
        if pivot is None:
            raise ActionError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                c = aug[r][col]
                aug[r] = [x - c * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def as_matrix(F: FiniteField, rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(F(c) for c in row) for row in rows)


def mat_vec(A: Matrix, v: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
    zero = A[0][0] * 0
    out = []
    for row in A:
        acc = zero
        for a, x in zip(row, v):
            if a:
                acc = acc + a * x
        out.append(acc)
    return tuple(out)


# -- groups ---------------------------------------------------------------------

@dataclass(frozen=True)
class SubgroupSpec:
    elements: tuple[int, ...]
    name: str = ""

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)


class GroupAction:
    """A fully enumerated finite group with a linear action of dimension ``dim``.

    ``duals[g]`` is the dual matrix of element g, ``labels[g]`` a word in the
    generators, ``generators`` the element indices that generate the group and
    ``subgroups`` named SubgroupSpecs (e.g. ``"H2"`` or ``"M"``).
    """

    def __init__(self, field: FiniteField, dim: int, duals: Sequence[Matrix],
                 labels: Sequence[str], generators: Sequence[int],
                 subgroups: Mapping[str, Sequence[int]] | None = None,
                 order: int | None = None, name: str = ""):
        self.field = field
        self.dim = dim
        self.duals = tuple(duals)
        self.labels = tuple(labels)
        self.generators = tuple(generators)
        self.name = name
        if order is not None and len(self.duals) != order:
            raise ActionError(f"expected {order} elements, got {len(self.duals)}")
        if any(len(D) != dim or any(len(r) != dim for r in D) for D in self.duals):
            raise ActionError("dual matrices must be dim x dim")
        if len(set(self.duals)) != len(self.duals):
            raise ActionError("group elements must have distinct matrices")
        self.identity = self.duals.index(identity_matrix(field, dim))
        self.points = tuple(mat_inv(D) for D in self.duals)
        lookup = {D: i for i, D in enumerate(self.duals)}
        table = []
        for A in self.duals:
            row = []
            for B in self.duals:
                prod = lookup.get(mat_mul(A, B))
                if prod is None:
                    raise ActionError("element set is not closed under composition")
                row.append(prod)
            table.append(tuple(row))
        self._table = tuple(table)
        self._inverse = tuple(row.index(self.identity) for row in self._table)
        self.subgroups = {k: make_subgroup(self, v, k) for k, v in (subgroups or {}).items()}

    @property
    def order(self) -> int:
        return len(self.duals)

    def __len__(self) -> int:
        return self.order

    def __iter__(self):
        return iter(range(self.order))

    def compose(self, g: int, h: int) -> int:
        """Index of the element whose dual matrix is D_g D_h."""
        return self._table[g][h]

    def inverse(self, g: int) -> int:
        return self._inverse[g]

    def element(self, label: str) -> int:
        return self.labels.index(label)

    def subgroup(self, name: str) -> SubgroupSpec:
        return self.subgroups[name]

    @property
    def whole(self) -> SubgroupSpec:
        return SubgroupSpec(tuple(range(self.order)), "G")

    def dual(self, g: int) -> Matrix:
        return self.duals[g]

    def point_matrix(self, g: int) -> Matrix:
        return self.points[g]

    def __repr__(self) -> str:
        return f"GroupAction({self.name or '?'}, order={self.order}, dim={self.dim}, {self.field!r})"


def make_subgroup(G: GroupAction, elements: Sequence[int], name: str = "") -> SubgroupSpec:
    elems = tuple(sorted(set(elements)))
    if G.identity not in elems:
        raise ActionError(f"subgroup {name} does not contain the identity")
    s = set(elems)
    if any(G.compose(a, b) not in s for a in elems for b in elems):
        raise ActionError(f"subgroup {name} is not closed")
    return SubgroupSpec(elems, name)


def coset_representatives(G: GroupAction, M: SubgroupSpec) -> list[int]:
    """Least-index representative of each coset gM, in increasing order."""
    covered: set[int] = set()
    reps = []
    for g in G:
        if g not in covered:
            reps.append(g)
            covered.update(G.compose(g, h) for h in M)
    return reps


def _check_ring(G: GroupAction, f: Polynomial) -> None:
    if f.nvars != G.dim:
        raise ActionError(f"polynomial in {f.nvars} variables, action has dimension {G.dim}")
    if f.field != G.field:
        raise ActionError("polynomial and action over different fields")


def act_poly(G: GroupAction, g: int, f: Polynomial) -> Polynomial:
    _check_ring(G, f)
    if g == G.identity:
        return f
    return substitute_linear(f, G.duals[g])


def act_point(G: GroupAction, g: int, v: Sequence) -> tuple[FieldElement, ...]:
    if len(v) != G.dim:
        raise ActionError(f"point has {len(v)} coordinates, action has dimension {G.dim}")
    return mat_vec(G.points[g], [G.field(x) for x in v])


def orbit(G: GroupAction, v: Sequence) -> set[tuple[FieldElement, ...]]:
    return {act_point(G, g, v) for g in G}


def transfer_full(G: GroupAction, f: Polynomial) -> Polynomial:
    out = Polynomial.zero(G.field, G.dim)
    for g in G:
        out = out + act_poly(G, g, f)
    return out


def transfer_relative(G: GroupAction, M: SubgroupSpec, f: Polynomial,
                      representatives: Sequence[int] | None = None) -> Polynomial:
    """Sum of g.f over one representative g per coset of M (f must be M-invariant)."""
    if not is_invariant(G, f, M):
        raise ActionError(f"polynomial is not invariant under subgroup {M.name or M.elements}")
    reps = list(representatives) if representatives is not None else coset_representatives(G, M)
    cosets = [frozenset(G.compose(g, h) for h in M) for g in reps]
    if len(set(cosets)) != len(cosets) or len(cosets) * len(M) != G.order:
        raise ActionError("representatives do not form a transversal")
    out = Polynomial.zero(G.field, G.dim)
    for g in reps:
        out = out + act_poly(G, g, f)
    return out


def norm(G: GroupAction, H: SubgroupSpec | None, f: Polynomial) -> Polynomial:
    """Product of h.f over all h in H (the whole group when H is None)."""
    H = H if H is not None else G.whole
    out = Polynomial.constant(G.field, G.dim, 1)
    for h in H:
        out = out * act_poly(G, h, f)
    return out


def _distinct_images(G: GroupAction, mono: Monomial) -> list[Polynomial]:
    f = Polynomial.monomial(G.field, mono)
    _check_ring(G, f)
    images = []
    for g in G:
        img = act_poly(G, g, f)
        if img not in images:
            images.append(img)
    return images


def orbit_length(G: GroupAction, mono: Monomial) -> int:
    return len(_distinct_images(G, mono))


def orbit_sum(G: GroupAction, mono: Monomial) -> Polynomial:
    """Sum of the distinct images g.mono (each taken once)."""
    out = Polynomial.zero(G.field, G.dim)
    for img in _distinct_images(G, mono):
        out = out + img
    return out


def orbit_product(G: GroupAction, mono: Monomial) -> Polynomial:
    """Product of the distinct images g.mono; invariant because G permutes them."""
    out = Polynomial.constant(G.field, G.dim, 1)
    for img in _distinct_images(G, mono):
        out = out * img
    return out


def is_invariant(G: GroupAction, f: Polynomial, subgroup: SubgroupSpec | None = None) -> bool:
    """g.f == f for every generator of G, or every element of ``subgroup``."""
    _check_ring(G, f)
    elems = G.generators if subgroup is None else subgroup.elements
    return all(act_poly(G, g, f) == f for g in elems)

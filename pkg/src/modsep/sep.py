"""Recursive constructions of separating sets and the generic brute-force search.

Every recursive family glues the pulled-back set of a smaller module to a
short list of new invariants on the larger one. The new invariants for one
step are exposed separately (:func:`recursion_step`) so the fiber condition
can be checked level by level.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field as dc_field, replace
from typing import Iterable, Sequence

from .action import (GroupAction, is_invariant, norm, orbit_length, orbit_product, orbit_sum,
                     transfer_full, transfer_relative)
from .poly import Polynomial, parse_polynomial
from .reps import (CYCLIC, KLEIN_II, KLEIN_III, KLEIN_IV, KLEIN_REGULAR, KLEIN_V, ModuleSpec,
                   Surjection, build, has_surjection, iv_parent, parse_spec, restrict_to_submodule,
                   surjection)
from .field import parse_field

PROVENANCES = ("variable", "norm", "relative-norm", "transfer", "relative-transfer",
               "pullback", "explicit", "search")

SEARCH_DEGREE = 4


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class Element:
    poly: Polynomial
    provenance: str
    label: str
    origin: str  # module on which the element was first written down

    def to_json(self) -> dict:
        return {"poly": str(self.poly), "provenance": self.provenance,
                "degree": self.poly.degree, "label": self.label, "origin": self.origin}


@dataclass
class SeparatingSet:
    spec: ModuleSpec
    elements: list[Element]
    index_maps: list[dict] = dc_field(default_factory=list)

    @property
    def polys(self) -> list[Polynomial]:
        return [e.poly for e in self.elements]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def without(self, index: int) -> SeparatingSet:
        return SeparatingSet(self.spec, self.elements[:index] + self.elements[index + 1:],
                             list(self.index_maps))

    def to_json(self) -> dict:
        return {"schema": 1, "spec": str(self.spec), "field": self.spec.field.name,
                "dim": self.spec.dim, "elements": [e.to_json() for e in self.elements],
                "index_maps": self.index_maps}

    @classmethod
    def from_json(cls, data: dict) -> SeparatingSet:
        if data.get("schema") != 1:
            raise ConstructionError("unsupported schema version")
        spec = parse_spec(data["spec"], parse_field(data["field"]))
        elems = [Element(parse_polynomial(e["poly"], spec.field, spec.dim), e["provenance"],
                         e.get("label", ""), e.get("origin", str(spec)))
                 for e in data["elements"]]
        return cls(spec, elems, list(data.get("index_maps", [])))


def _name(i: int) -> str:
    return f"x{i + 1}"


def glue(S: SeparatingSet, T: Sequence[Element | Polynomial], phi: Surjection) -> SeparatingSet:
    """Pull S back along phi and append T (which must be invariant on the source)."""
    if str(S.spec) != str(phi.target) or S.spec.field != phi.target.field:
        raise ConstructionError(f"set for {S.spec} does not match the target {phi.target}")
    G = build(phi.source)
    src = str(phi.source)
    new = []
    for t in T:
        if isinstance(t, Polynomial):
            t = Element(t, "explicit", str(t), src)
        if not is_invariant(G, t.poly):
            raise ConstructionError(f"{t.label} is not invariant on {src}")
        new.append(t)
    pulled = [Element(phi.pullback(e.poly), "pullback", e.label, e.origin) for e in S.elements]
    return SeparatingSet(phi.source, pulled + new, [phi.index_map()] + S.index_maps)


# -- minimal exponents for the cyclic family ------------------------------------

def find_k(spec: ModuleSpec) -> int:
    """Least k >= 0 making x_n x_{i+1}^{p-1} x_i^k invariant under M (same k for every i)."""
    if spec.variant != CYCLIC or spec.n < 3:
        raise ConstructionError("find_k needs a cyclic module with n >= 3")
    G = build(spec)
    M = G.subgroup("M")
    X = Polynomial.gens(spec.field, spec.n)
    found = []
    for i in range(1, spec.n - 1):
        base = X[spec.n - 1] * X[i] ** (spec.p - 1)
        k = 0
        while not is_invariant(G, base * X[i - 1] ** k, M):
            k += 1
        found.append(k)
    assert len(set(found)) == 1, found
    return found[0]


def find_l(spec: ModuleSpec) -> int:
    """Least l >= 0 making N_H(x_n) N_H(x_{n-1})^l invariant under G."""
    if spec.variant != CYCLIC or spec.n < 2:
        raise ConstructionError("find_l needs a cyclic module with n >= 2")
    G = build(spec)
    H = G.subgroup("H")
    X = Polynomial.gens(spec.field, spec.n)
    top, below = norm(G, H, X[-1]), norm(G, H, X[-2])
    l, f = 0, top
    while not is_invariant(G, f):
        l += 1
        f = f * below
    return l


# -- one recursion step per family ----------------------------------------------

def _klein_ii_step(spec: ModuleSpec, G: GroupAction) -> list[Element]:
    F, n, lam = spec.field, spec.n, spec.lam
    X = Polynomial.gens(F, 2 * n)
    x = lambda i: X[i - 1]  # noqa: E731
    src = str(spec)
    out = [Element(x(n + 1), "variable", _name(n), src),
           Element(norm(G, None, x(1)), "norm", "N_G(x1)", src)]
    if lam != 0 and lam != 1:
        out.append(Element(transfer_full(G, x(1) * x(2) ** 3), "transfer", "Tr_G(x1*x2^3)", src))
    else:
        h = x(1) * x(n + 2) + x(2) * x(n + 1)
        out.append(Element(norm(G, G.subgroup("H2"), h), "relative-norm",
                           f"N_H2(x1*x{n + 2} + x2*x{n + 1})", src))
    for i in range(2, n):
        out.append(Element(transfer_full(G, x(1) * x(i) * x(i + 1)), "transfer",
                           f"Tr_G(x1*x{i}*x{i + 1})", src))
    return out


def _klein_v_step(spec: ModuleSpec, G: GroupAction) -> list[Element]:
    F, n = spec.field, spec.n
    X = Polynomial.gens(F, 2 * n - 1)
    pos = lambda i: i - 1 if i < n else i - 2  # noqa: E731
    x = lambda i: X[pos(i)]  # noqa: E731
    nm = lambda i: _name(pos(i))  # noqa: E731
    src = str(spec)
    h = x(1) * x(n + 2) + x(2) * x(n + 1)
    out = [Element(x(n + 1), "variable", nm(n + 1), src),
           Element(norm(G, None, x(1)), "norm", "N_G(x1)", src),
           Element(norm(G, G.subgroup("H2"), h), "relative-norm",
                   f"N_H2(x1*{nm(n + 2)} + x2*{nm(n + 1)})", src),
           Element(transfer_full(G, x(1) * x(2) * x(n - 1)), "transfer",
                   f"Tr_G(x1*x2*{nm(n - 1)})", src)]
    for i in range(2, n - 1):
        out.append(Element(transfer_full(G, x(1) * x(i) * x(i + 1)), "transfer",
                           f"Tr_G(x1*{nm(i)}*{nm(i + 1)})", src))
    for i in range(2, n):
        out.append(Element(transfer_full(G, x(1) * x(i) ** 3), "transfer",
                           f"Tr_G(x1*{nm(i)}^3)", src))
    return out


def _cyclic_step(spec: ModuleSpec, G: GroupAction) -> list[Element]:
    F, p, n = spec.field, spec.p, spec.n
    X = Polynomial.gens(F, n)
    H, M = G.subgroup("H"), G.subgroup("M")
    src = str(spec)
    l = find_l(spec)
    out = [Element(norm(G, H, X[n - 1]) * norm(G, H, X[n - 2]) ** l, "relative-norm",
                   f"N_H(x{n})*N_H(x{n - 1})^{l}", src),
           Element(norm(G, None, X[n - 1]), "norm", f"N_G(x{n})", src)]
    if n >= 3:
        k = find_k(spec)
        for i in range(1, n - 1):
            f = X[n - 1] * X[i] ** (p - 1) * X[i - 1] ** k
            out.append(Element(transfer_relative(G, M, f), "relative-transfer",
                               f"Tr_G/M(x{n}*x{i + 1}^{p - 1}*x{i}^{k})", src))
    return out


def _ii_view(spec: ModuleSpec) -> ModuleSpec:
    """klein-iii uses the klein-ii (lambda=0) invariants; the group is the same set of matrices."""
    if spec.variant == KLEIN_III:
        return ModuleSpec(KLEIN_II, spec.field, n=spec.n, lam=spec.field.zero)
    return spec


def recursion_step(spec: ModuleSpec) -> tuple[Surjection, list[Element]]:
    """The surjection to the smaller sibling and the new invariants T for this level."""
    if not has_surjection(spec):
        raise ConstructionError(f"{spec} is a base case")
    G = build(spec)
    if spec.variant in (KLEIN_II, KLEIN_III):
        T = _klein_ii_step(_ii_view(spec), G)
    elif spec.variant == KLEIN_V:
        T = _klein_v_step(spec, G)
    else:
        T = _cyclic_step(spec, G)
    return surjection(spec), [replace(t, origin=str(spec)) for t in T]


def recursion_levels(spec: ModuleSpec) -> list[tuple[ModuleSpec, Surjection, list[Element]]]:
    out = []
    while has_surjection(spec):
        phi, T = recursion_step(spec)
        out.append((spec, phi, T))
        spec = phi.target
    return out


# -- base cases -------------------------------------------------------------------

def _klein_ii_base(spec: ModuleSpec) -> SeparatingSet:
    G = build(spec)
    F, lam = spec.field, spec.lam
    x1, x2, x3, x4 = Polynomial.gens(F, 4)
    src = str(spec)
    if lam == 0 or lam == 1:
        found = generic_search(spec, SEARCH_DEGREE)
        return found
    c = (lam * (lam + 1)).inverse()
    f1 = x1 * x4 + x2 ** 2 * c + x2 * (x3 + x4 * c)
    elems = [Element(f1, "explicit", "x1*x4 + c*x2^2 + x2*(x3 + c*x4), c = 1/(lambda*(lambda+1))", src),
             Element(norm(G, None, x1), "norm", "N_G(x1)", src),
             Element(norm(G, None, x2), "norm", "N_G(x2)", src),
             Element(x3, "variable", "x3", src),
             Element(x4, "variable", "x4", src)]
    for e in elems:
        if not is_invariant(G, e.poly):
            raise ConstructionError(f"{e.label} is not invariant")
    return SeparatingSet(spec, elems)


def _klein_v_base(spec: ModuleSpec) -> SeparatingSet:
    G = build(spec)
    x1, x3, x4 = Polynomial.gens(spec.field, 3)
    src = str(spec)
    return SeparatingSet(spec, [Element(norm(G, None, x1), "norm", "N_G(x1)", src),
                                Element(x3, "variable", "x2", src),
                                Element(x4, "variable", "x3", src)])


def _cyclic_base(spec: ModuleSpec) -> SeparatingSet:
    x1 = Polynomial.var(spec.field, 1, 0)
    return SeparatingSet(spec, [Element(x1 ** spec.m, "norm", f"N_M(x1) ~ x1^{spec.m}", str(spec))])


def _retag(S: SeparatingSet, spec: ModuleSpec) -> SeparatingSet:
    """Same polynomials, presented as a set for ``spec`` (klein-iii from klein-ii, lambda=0)."""
    old, new = str(S.spec), str(spec)
    maps = [{**m, "source": m["source"].replace("klein-ii:", "klein-iii:").replace(",lambda=0", ""),
             "target": m["target"].replace("klein-ii:", "klein-iii:").replace(",lambda=0", "")}
            for m in S.index_maps]
    elems = []
    for e in S.elements:
        origin = e.origin.replace("klein-ii:", "klein-iii:").replace(",lambda=0", "")
        elems.append(Element(e.poly, e.provenance, e.label, origin))
    assert old.replace("klein-ii:", "klein-iii:").replace(",lambda=0", "") == new
    return SeparatingSet(spec, elems, maps)


@functools.lru_cache(maxsize=None)
def _separating_set(spec: ModuleSpec) -> SeparatingSet:
    v = spec.variant
    if v == KLEIN_III:
        return _retag(_separating_set(_ii_view(spec)), spec)
    if v == KLEIN_IV:
        parent = iv_parent(spec)
        S = _separating_set(parent)
        elems, seen = [], set()
        for e in S.elements:
            r = restrict_to_submodule(e.poly, parent)
            if r.is_zero() or r in seen:
                continue
            seen.add(r)
            elems.append(Element(r, e.provenance, e.label, e.origin))
        restriction = {"kind": "restriction", "source": str(parent), "target": str(spec),
                       "target_to_source": [i + 1 for i in range(parent.dim) if i != spec.n]}
        return SeparatingSet(spec, elems, [restriction] + S.index_maps)
    if v == KLEIN_REGULAR:
        return generic_search(spec, SEARCH_DEGREE)
    if has_surjection(spec):
        phi, T = recursion_step(spec)
        return glue(_separating_set(phi.target), T, phi)
    if v == KLEIN_II:
        return _klein_ii_base(spec)
    if v == KLEIN_V:
        return _klein_v_base(spec)
    return _cyclic_base(spec)


def separating_set(spec: ModuleSpec) -> SeparatingSet:
    """The recursive separating set for ``spec``, fully expanded."""
    S = _separating_set(spec)
    return SeparatingSet(S.spec, list(S.elements), list(S.index_maps))


# -- generic search ------------------------------------------------------------------

def monomials_up_to(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """All monomials of degree 1..degree, by degree, then lexicographically decreasing."""
    out = []
    for d in range(1, degree + 1):
        layer = [m for m in itertools.product(range(d + 1), repeat=nvars) if sum(m) == d]
        out.extend(sorted(layer, reverse=True))
    return out


def search_pool(G: GroupAction, degree: int) -> list[tuple[Polynomial, str]]:
    """Orbit sums and orbit products of monomials, all of degree <= ``degree``.

    Sorted by degree (stable, sums before products of the same degree), with
    zeros and repeats removed. Orbit sums alone lie in the image of the
    transfer for non-permutation modules and cannot separate there.
    """
    candidates = []
    monos = monomials_up_to(G.dim, degree)
    for mono in monos:
        candidates.append((orbit_sum(G, mono), "orbit sum of " + _mono_name(mono)))
    for mono in monos:
        if sum(mono) * orbit_length(G, mono) <= degree:
            candidates.append((orbit_product(G, mono), "orbit product of " + _mono_name(mono)))
    candidates.sort(key=lambda c: c[0].degree)
    pool, seen = [], set()
    for f, label in candidates:
        if f.is_zero() or f in seen:
            continue
        seen.add(f)
        pool.append((f, label))
    return pool


def _mono_name(mono) -> str:
    return "*".join(_name(i) if e == 1 else f"{_name(i)}^{e}" for i, e in enumerate(mono) if e)


def generic_search(spec: ModuleSpec, degree_bound: int, limit: int | None = None) -> SeparatingSet:
    """Search-pool invariants of degree <= degree_bound, pruned greedily from the top.

    Candidates are dropped in reverse pool order (highest degree first);
    a drop is kept only if the rest still separates every F_q-point orbit.
    """
    from .verify import all_points, orbit_ids, separates, value_matrix

    if degree_bound < 1:
        raise ConstructionError("degree bound must be positive")
    G = build(spec)
    pool = search_pool(G, degree_bound)
    points = all_points(spec.field, spec.dim, limit)
    orbits = orbit_ids(G, points)
    values = value_matrix(spec.field, [f for f, _ in pool], points)
    keep = list(range(len(pool)))
    if not separates(orbits, values):
        raise ConstructionError(f"orbit sums of degree <= {degree_bound} do not separate {spec} "
                                f"over F_{spec.field.name}; raise the bound")
    for i in reversed(range(len(pool))):
        trial = [j for j in keep if j != i]
        if separates(orbits, values[:, trial]):
            keep = trial
    src = str(spec)
    elems = [Element(pool[j][0], "search", pool[j][1], src) for j in keep]
    return SeparatingSet(spec, elems)


def iter_invariance_failures(S: SeparatingSet) -> Iterable[Element]:
    G = build(S.spec)
    return (e for e in S.elements if not is_invariant(G, e.poly))

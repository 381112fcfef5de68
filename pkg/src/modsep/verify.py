"""Exhaustive separation checks over F_q-points and symbolic checks of the congruences.

All points of F_q^dim are enumerated as an integer array of field-element
indices (lexicographic product order, first coordinate most significant), so
point number ``i`` is the base-q expansion of ``i``. Orbit ids are the least
point number in the orbit; fingerprints are rows of the evaluation matrix.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .action import GroupAction, act_poly, norm, transfer_full, transfer_relative
from .field import FieldElement, FiniteField
from .poly import ABSENT, PRESENT, Polynomial, filter_terms
from .reps import CYCLIC, KLEIN_II, KLEIN_V, ModuleSpec, Surjection, build

DEFAULT_POINT_LIMIT = 1 << 24


class LimitExceeded(ValueError):
    pass


def point_limit(limit: int | None = None) -> int:
    if limit is not None:
        return limit
    env = os.environ.get("MODSEP_POINT_LIMIT")
    return int(env) if env else DEFAULT_POINT_LIMIT


# -- vectorized field arithmetic ------------------------------------------------

class VectorField:
    """Elementwise arithmetic on numpy arrays of field-element indices."""

    def __init__(self, F: FiniteField):
        self.F = F
        self.q = F.order
        self._exp = np.array(F._exp, dtype=np.int64)
        self._log = np.array(F._log, dtype=np.int64)
        self._scale: dict[int, np.ndarray] = {}

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        F = self.F
        if F.p == 2:
            return a ^ b
        if F.k == 1:
            return (a + b) % F.p
        out = np.zeros_like(a)
        place = 1
        for _ in range(F.k):
            out += ((a // place % F.p + b // place % F.p) % F.p) * place
            place *= F.p
        return out

    def scale(self, c: int, a: np.ndarray) -> np.ndarray:
        if c not in self._scale:
            self._scale[c] = np.array([self.F._mul(c, x) for x in range(self.q)], dtype=np.int64)
        return self._scale[c][a]

    def evaluate(self, f: Polynomial, points: np.ndarray) -> np.ndarray:
        """Values of f at every row of ``points``, computed in the log domain."""
        n = points.shape[0]
        out = np.zeros(n, dtype=np.int64)
        if f.is_zero():
            return out
        order = self.q - 1
        logs = self._log[points]
        zero = points == 0
        for mono, c in f._terms.items():
            acc = np.full(n, self.F._log[c], dtype=np.int64)
            dead = np.zeros(n, dtype=bool)
            for j, e in enumerate(mono):
                if e:
                    acc += e * logs[:, j]
                    dead |= zero[:, j]
            vals = self._exp[acc % order]
            vals[dead] = 0
            out = self.add(out, vals)
        return out

    def apply_matrix(self, A, points: np.ndarray) -> np.ndarray:
        out = np.zeros_like(points)
        for r, row in enumerate(A):
            acc = np.zeros(points.shape[0], dtype=np.int64)
            for j, a in enumerate(row):
                if a:
                    acc = self.add(acc, self.scale(a.index, points[:, j]))
            out[:, r] = acc
        return out


def all_points(F: FiniteField, dim: int, limit: int | None = None,
               start: int = 0, stop: int | None = None) -> np.ndarray:
    total = F.order**dim
    if total > point_limit(limit):
        raise LimitExceeded(f"{F.order}^{dim} = {total} points exceeds the limit "
                            f"{point_limit(limit)}; use a smaller field or n")
    stop = total if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)
    pts = np.empty((idx.size, dim), dtype=np.int64)
    for j in range(dim - 1, -1, -1):
        pts[:, j] = idx % F.order
        idx = idx // F.order
    return pts


def point_codes(F: FiniteField, points: np.ndarray) -> np.ndarray:
    codes = np.zeros(points.shape[0], dtype=np.int64)
    for j in range(points.shape[1]):
        codes = codes * F.order + points[:, j]
    return codes


def orbit_ids(G: GroupAction, points: np.ndarray) -> np.ndarray:
    vf = VectorField(G.field)
    ids = point_codes(G.field, points)
    for g in G:
        if g != G.identity:
            ids = np.minimum(ids, point_codes(G.field, vf.apply_matrix(G.point_matrix(g), points)))
    return ids


def value_matrix(F: FiniteField, polys: Sequence[Polynomial], points: np.ndarray) -> np.ndarray:
    vf = VectorField(F)
    out = np.zeros((points.shape[0], len(polys)), dtype=np.int64)
    for k, f in enumerate(polys):
        out[:, k] = vf.evaluate(f, points)
    return out


def _chunks(total: int, threads: int) -> list[tuple[int, int]]:
    threads = max(1, threads)
    step = -(-total // threads)
    return [(a, min(a + step, total)) for a in range(0, total, step)]


def _scan(G: GroupAction, polys: Sequence[Polynomial], limit: int | None, threads: int,
          extra_keep: Sequence[int] = ()) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orbit ids, values and kept coordinates for every point, optionally in parallel."""
    F, dim = G.field, G.dim
    total = F.order**dim
    if total > point_limit(limit):
        raise LimitExceeded(f"{F.order}^{dim} = {total} points exceeds the limit "
                            f"{point_limit(limit)}; use a smaller field or n")

    def work(rng):
        pts = all_points(F, dim, limit, *rng)
        return orbit_ids(G, pts), value_matrix(F, polys, pts), pts[:, list(extra_keep)]

    ranges = _chunks(total, threads)
    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, ranges))
    else:
        parts = [work(r) for r in ranges]
    return tuple(np.concatenate([p[i] for p in parts]) for i in range(3))


def _classes(rows: np.ndarray) -> np.ndarray:
    if rows.shape[1] == 0:
        return np.zeros(rows.shape[0], dtype=np.int64)
    _, inverse = np.unique(rows, axis=0, return_inverse=True)
    return inverse.reshape(-1)


def _decode(F: FiniteField, code: int, dim: int) -> tuple[FieldElement, ...]:
    out = []
    for _ in range(dim):
        code, r = divmod(int(code), F.order)
        out.append(FieldElement(F, r))
    return tuple(reversed(out))


def _first_bad_pair(F: FiniteField, dim: int, cls: np.ndarray, orbits: np.ndarray):
    """Least point in a class holding two orbits, and the least point of another orbit in it."""
    order = np.lexsort((orbits, cls))
    c_sorted, o_sorted = cls[order], orbits[order]
    same_class = c_sorted[1:] == c_sorted[:-1]
    differ = o_sorted[1:] != o_sorted[:-1]
    bad = np.flatnonzero(same_class & differ)
    if bad.size == 0:
        return None
    bad_classes = np.unique(c_sorted[bad])
    first = int(np.flatnonzero(np.isin(cls, bad_classes)).min())
    c = cls[first]
    members = np.flatnonzero((cls == c) & (orbits != orbits[first]))
    return _decode(F, first, dim), _decode(F, int(members.min()), dim)


@dataclass
class VerificationReport:
    spec: str
    field: str
    kind: str
    point_count: int
    orbit_count: int
    fingerprint_class_count: int
    set_size: int
    ok: bool
    counterexample: tuple | None = None
    elapsed: float = 0.0
    extra: dict = dc_field(default_factory=dict)

    def to_json(self, timing: bool = False) -> dict:
        d = {
            "schema": 1,
            "kind": self.kind,
            "spec": self.spec,
            "field": self.field,
            "point_count": self.point_count,
            "orbit_count": self.orbit_count,
            "fingerprint_class_count": self.fingerprint_class_count,
            "set_size": self.set_size,
            "ok": self.ok,
            "counterexample": None if self.counterexample is None
            else [[str(x) for x in v] for v in self.counterexample],
        }
        d.update(self.extra)
        if timing:
            d["elapsed"] = round(self.elapsed, 6)
        return d

    def summary(self) -> str:
        status = "ok" if self.ok else "FAILED"
        line = (f"{self.kind} {self.spec} over F_{self.field}: {status}; {self.point_count} points, "
                f"{self.orbit_count} orbits, {self.fingerprint_class_count} classes, "
                f"{self.set_size} invariants")
        if self.counterexample is not None:
            a, b = ([str(x) for x in v] for v in self.counterexample)
            line += f"\n  counterexample: ({', '.join(a)}) vs ({', '.join(b)})"
        return line


def _polys(S) -> list[Polynomial]:
    return list(S.polys) if hasattr(S, "polys") else list(S)


def _spec_name(G: GroupAction, S) -> str:
    spec = getattr(S, "spec", None)
    return str(spec) if spec is not None else G.name


def separates(orbits: np.ndarray, values: np.ndarray) -> bool:
    """True iff the fingerprint partition equals the orbit partition."""
    fp = _classes(values)
    pairs = np.unique(np.stack([fp, orbits], axis=1), axis=0).shape[0]
    return pairs == np.unique(orbits).size == np.unique(fp).size


def check_separating(G: GroupAction, S, limit: int | None = None,
                     threads: int = 1) -> VerificationReport:
    """Check that the fingerprints of S distinguish exactly the G-orbits of F_q^dim."""
    t0 = time.perf_counter()
    polys = _polys(S)
    orbits, values, _ = _scan(G, polys, limit, threads)
    fp = _classes(values)
    n_orbits = int(np.unique(orbits).size)
    n_classes = int(np.unique(fp).size)
    n_pairs = int(np.unique(np.stack([fp, orbits], axis=1), axis=0).shape[0])
    ok = n_pairs == n_orbits == n_classes
    cex = None if ok else _first_bad_pair(G.field, G.dim, fp, orbits)
    if cex is None and not ok:
        # an orbit split across classes: S is not invariant
        cex = _first_bad_pair(G.field, G.dim, orbits, fp)
    return VerificationReport(_spec_name(G, S), G.field.name, "separating", int(orbits.size),
                              n_orbits, n_classes, len(polys), ok, cex,
                              time.perf_counter() - t0)


def check_fiber_condition(G: GroupAction, phi: Surjection, T, limit: int | None = None,
                          threads: int = 1) -> VerificationReport:
    """Within every fiber of phi, points in different orbits must be separated by T.

    Classes are (image, T-fingerprint) pairs and orbits are (image, orbit)
    pairs; the condition holds iff both partitions coincide.
    """
    t0 = time.perf_counter()
    polys = _polys(T)
    orbits, values, images = _scan(G, polys, limit, threads, phi.keep)
    cls = _classes(np.concatenate([images, values], axis=1))
    img = _classes(images)
    orb = _classes(np.stack([img, orbits], axis=1))
    n_orb = int(np.unique(orb).size)
    n_cls = int(np.unique(cls).size)
    n_pairs = int(np.unique(np.stack([cls, orb], axis=1), axis=0).shape[0])
    ok = n_pairs == n_orb == n_cls
    cex = None if ok else _first_bad_pair(G.field, G.dim, cls, orbits)
    return VerificationReport(str(phi.source), G.field.name, "fiber", int(orbits.size),
                              n_orb, n_cls, len(polys), ok, cex, time.perf_counter() - t0,
                              {"target": str(phi.target)})


def witness(G: GroupAction, S, v1: Sequence, v2: Sequence) -> list[tuple[int, FieldElement, FieldElement]]:
    """Every element of S (by index) taking different values at v1 and v2."""
    if len(v1) != len(v2):
        raise ValueError("points of different dimension")
    out = []
    for i, f in enumerate(_polys(S)):
        a, b = f.evaluate(v1), f.evaluate(v2)
        if a != b:
            out.append((i, a, b))
    return out


def power_sum(p: int, a: int) -> int:
    """sum_{l=0}^{p-1} l^a mod p, for a >= 1."""
    if a < 1:
        raise ValueError("exponent must be a positive integer")
    return sum(pow(l, a, p) for l in range(p)) % p


def power_sum_rule(p: int, a: int) -> int:
    return p - 1 if a % (p - 1) == 0 else 0


# -- symbolic congruence oracles ------------------------------------------------

@dataclass
class OracleResult:
    lemma: str
    params: dict
    ok: bool
    difference: Polynomial | None = None

    def to_json(self) -> dict:
        return {"lemma": self.lemma, "params": self.params, "ok": self.ok,
                "difference": None if self.difference is None else str(self.difference)}


def _result(lemma: str, params: dict, lhs: Polynomial, rhs: Polynomial) -> OracleResult:
    diff = lhs - rhs
    return OracleResult(lemma, params, diff.is_zero(), None if diff.is_zero() else diff)


def _klein_ii_oracles(spec: ModuleSpec) -> list[OracleResult]:
    G = build(spec)
    F, n = spec.field, spec.n
    X = Polynomial.gens(F, 2 * n)

    def x(i: int) -> Polynomial:
        # 1-based, with the convention x_{2n+1} = 0
        return X[i - 1] if i <= 2 * n else Polynomial.zero(F, 2 * n)

    has_x1 = [(0, PRESENT)]
    out = []
    for i in range(2, n):
        for j in range(2, n):
            lhs = filter_terms(transfer_full(G, x(1) * x(i) * x(j)), has_x1)
            rhs = x(1) * (x(n + i) * x(n + j + 1) + x(n + i + 1) * x(n + j))
            out.append(_result("ii-a*", {"n": n, "lambda": str(spec.lam), "i": i, "j": j}, lhs, rhs))
    lhs = filter_terms(transfer_full(G, x(1) * x(n - 1) * x(n)), has_x1)
    out.append(_result("ii-b", {"n": n, "lambda": str(spec.lam)}, lhs, x(1) * x(2 * n)**2))
    if n >= 3:
        lam = spec.lam
        lhs = filter_terms(transfer_full(G, x(1) * x(2)**3), has_x1 + [(n + 2, ABSENT)])
        rhs = x(1) * x(n + 2)**3 * (lam * (lam + 1))
        out.append(_result("ii-lambda", {"n": n, "lambda": str(lam)}, lhs, rhs))
        h = x(1) * x(n + 2) + x(2) * x(n + 1)
        lhs = filter_terms(norm(G, G.subgroup("H2"), h), has_x1)
        rhs = x(1)**2 * x(n + 2)**2 + x(1) * x(n + 2) * (x(n + 2)**2 + x(n + 1) * x(n + 3))
        out.append(_result("ii-N", {"n": n, "lambda": str(lam)}, lhs, rhs))
    return out


def _klein_v_oracles(spec: ModuleSpec) -> list[OracleResult]:
    G = build(spec)
    F, n = spec.field, spec.n
    X = Polynomial.gens(F, 2 * n - 1)

    def x(i: int) -> Polynomial:
        assert i != n
        if i > 2 * n:
            return Polynomial.zero(F, 2 * n - 1)
        return X[i - 1] if i < n else X[i - 2]

    has_x1 = [(0, PRESENT)]
    out = []
    for i in range(2, n):
        lhs = filter_terms(transfer_full(G, x(1) * x(i)**3), has_x1)
        rhs = x(1) * x(n + i) * x(n + i + 1) * (x(n + i) + x(n + i + 1))
        out.append(_result("v-cube", {"n": n, "i": i}, lhs, rhs))
    for i in range(2, n):
        for j in range(2, n):
            lhs = filter_terms(transfer_full(G, x(1) * x(i) * x(j)), has_x1)
            rhs = x(1) * (x(n + i) * x(n + j + 1) + x(n + i + 1) * x(n + j))
            out.append(_result("v-a*", {"n": n, "i": i, "j": j}, lhs, rhs))
    if n >= 3:
        h = x(1) * x(n + 2) + x(2) * x(n + 1)
        lhs = filter_terms(norm(G, G.subgroup("H2"), h), has_x1)
        rhs = x(1)**2 * x(n + 2)**2 + x(1) * x(n + 2) * (x(n + 2)**2 + x(n + 1) * x(n + 3))
        out.append(_result("v-N", {"n": n}, lhs, rhs))
    return out


def _cyclic_oracles(spec: ModuleSpec) -> list[OracleResult]:
    from .sep import find_k

    G = build(spec)
    F, p, n = spec.field, spec.p, spec.n
    if n < 3:
        return []
    X = Polynomial.gens(F, n)
    k = find_k(spec)
    M = G.subgroup("M")
    out = []
    for i in range(1, n - 1):
        f = X[n - 1] * X[i]**(p - 1) * X[i - 1]**k
        tr = transfer_relative(G, M, f)
        lhs = filter_terms(tr, [(n - 1, PRESENT)] + [(j, ABSENT) for j in range(i - 1)])
        rhs = -(X[n - 1] * X[i - 1]**(p + k - 1))
        out.append(_result("cyc-tr", {"p": p, "m": spec.m, "n": n, "i": i, "k": k}, lhs, rhs))
    return out


def lemma_oracles(spec: ModuleSpec) -> list[OracleResult]:
    """Every congruence applicable to this module, each checked by exact filtering."""
    if spec.variant == KLEIN_II:
        return _klein_ii_oracles(spec)
    if spec.variant == KLEIN_V:
        return _klein_v_oracles(spec)
    if spec.variant == CYCLIC:
        return _cyclic_oracles(spec)
    return []

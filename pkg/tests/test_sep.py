import json

import pytest

from modsep import (Polynomial, build, check_separating, find_k, find_l, generic_search, glue,
                    is_invariant, make_field, parse_spec, primitive_root_of_unity, separating_set,
                    surjection)
from modsep.reps import Surjection
from modsep.sep import ConstructionError, SeparatingSet, recursion_levels, search_pool

F2 = make_field(2)
F4 = make_field(2, 2)


def brute_k(p, m):
    """Least k with lambda^(p+k) = 1: alpha scales a degree-d monomial by lambda^-d."""
    F = make_field(p, _degree(p, m))
    lam = primitive_root_of_unity(F, m)
    k = 0
    while lam ** (p + k) != 1:
        k += 1
    return k


def brute_l(p, m):
    """Least l with lambda^(p(l+1)) = 1 (each N_H(x_j) has degree p)."""
    F = make_field(p, _degree(p, m))
    lam = primitive_root_of_unity(F, m)
    l = 0
    while lam ** (p * (l + 1)) != 1:
        l += 1
    return l


def _degree(p, m):
    k = 1
    while (p ** k - 1) % m:
        k += 1
    return k


def test_type_v_base_case(F2):
    S = separating_set(parse_spec("klein-v:n=2", F2))
    x1, x2, x3 = Polynomial.gens(F2, 3)
    G = build(S.spec)
    assert len(S) == 3
    assert S.polys[1:] == [x2, x3]
    assert S.polys[0].degree == 4 and is_invariant(G, S.polys[0])


def test_type_ii_base_case(F4):
    S = separating_set(parse_spec("klein-ii:n=2,lambda=t", F4))
    assert len(S) == 5
    assert [e.provenance for e in S] == ["explicit", "norm", "norm", "variable", "variable"]


@pytest.mark.parametrize("n,size", [(2, 5), (3, 9), (4, 14), (5, 20)])
def test_type_ii_sizes(n, size):
    assert len(separating_set(parse_spec(f"klein-ii:n={n},lambda=t", F4))) == size


@pytest.mark.parametrize("n,size", [(1, 1), (2, 3), (3, 6)])
def test_cyclic_sizes(n, size):
    assert len(separating_set(parse_spec(f"cyclic:p=3,m=2,n={n}"))) == size


def test_cyclic_base_case():
    S = separating_set(parse_spec("cyclic:p=3,m=4,n=1"))
    x1 = Polynomial.var(S.spec.field, 1, 0)
    assert S.polys == [x1 ** 4]


@pytest.mark.parametrize("p,m,k", [(3, 2, 1), (3, 4, 1), (5, 2, 1)])
def test_find_k_examples(p, m, k):
    assert find_k(parse_spec(f"cyclic:p={p},m={m},n=3")) == k == brute_k(p, m)


@pytest.mark.parametrize("p,m,l", [(3, 2, 1), (3, 4, 3), (2, 3, 2)])
def test_find_l_examples(p, m, l):
    assert find_l(parse_spec(f"cyclic:p={p},m={m},n=2")) == l == brute_l(p, m)


def test_find_k_needs_three_variables():
    with pytest.raises(ConstructionError):
        find_k(parse_spec("cyclic:p=3,m=2,n=2"))


def test_glue_identity_like():
    spec = parse_spec("klein-ii:n=2,lambda=t", F4)
    S = separating_set(spec)
    phi = Surjection(spec, spec, tuple(range(4)))
    glued = glue(S, [], phi)
    assert glued.polys == S.polys
    assert all(e.provenance == "pullback" for e in glued)


def test_glue_pullback_and_size():
    spec = parse_spec("klein-ii:n=3,lambda=t", F4)
    phi = surjection(spec)
    S = separating_set(phi.target)
    X = Polynomial.gens(F4, 6)
    glued = glue(S, [X[3], X[4]], phi)
    assert len(glued) == len(S) + 2
    # target x3 is the source's x5
    assert S.polys[3] == Polynomial.var(F4, 4, 2)
    assert glued.polys[3] == X[4]
    with pytest.raises(ConstructionError):
        glue(S, [X[0]], phi)


@pytest.mark.parametrize("text,field", [("klein-regular", F2), ("klein-regular", F4),
                                        ("klein-ii:n=2,lambda=0", F2),
                                        ("klein-ii:n=2,lambda=1", F4)])
def test_generic_search(text, field):
    spec = parse_spec(text, field)
    S = generic_search(spec, 4)
    G = build(spec)
    assert all(e.provenance == "search" and e.poly.degree <= 4 for e in S)
    assert all(is_invariant(G, f) for f in S.polys)
    assert check_separating(G, S).ok


def test_regular_pool_is_orbit_sums(F2):
    G = build(parse_spec("klein-regular", F2))
    for f, label in search_pool(G, 4):
        if label.startswith("orbit product"):
            # a permutation module: the product of a monomial's images is itself a monomial orbit sum
            assert len(f.terms) == 1


def test_generic_search_rejects_bad_bound(F2):
    with pytest.raises(ConstructionError):
        generic_search(parse_spec("klein-regular", F2), 0)


def test_generic_search_reports_insufficient_bound(F4):
    with pytest.raises(ConstructionError):
        generic_search(parse_spec("klein-ii:n=2,lambda=0", F4), 1)


@pytest.mark.parametrize("text", ["klein-ii:n=3,lambda=t", "klein-v:n=4", "cyclic:p=5,m=2,n=4"])
def test_recursion_levels(text):
    spec = parse_spec(text, F4 if text.startswith("klein") else None)
    levels = recursion_levels(spec)
    assert [lvl.n for lvl, _, _ in levels] == list(range(spec.n, 1 if text.startswith("cyclic") else 2, -1))
    for lvl, phi, T in levels:
        G = build(lvl)
        assert phi.source == lvl and all(is_invariant(G, e.poly) for e in T)


def test_construction_is_deterministic():
    spec = parse_spec("klein-v:n=4", F4)
    a = json.dumps(separating_set(spec).to_json(), sort_keys=True)
    b = json.dumps(separating_set(spec).to_json(), sort_keys=True)
    assert a == b


@pytest.mark.parametrize("text", ["klein-ii:n=3,lambda=t+1", "klein-iv:n=3", "klein-iii:n=3",
                                  "cyclic:p=3,m=4,n=3"])
def test_json_round_trip(text):
    spec = parse_spec(text, F4 if text.startswith("klein") else None)
    S = separating_set(spec)
    back = SeparatingSet.from_json(json.loads(json.dumps(S.to_json())))
    assert str(back.spec) == str(spec)
    assert back.polys == S.polys
    assert [e.provenance for e in back] == [e.provenance for e in S]


def test_separating_set_returns_a_copy():
    spec = parse_spec("klein-v:n=3", F4)
    S = separating_set(spec)
    S.elements.clear()
    assert len(separating_set(spec)) == 8


def test_type_iii_uses_type_ii_polynomials():
    ii = separating_set(parse_spec("klein-ii:n=3,lambda=0", F4))
    iii = separating_set(parse_spec("klein-iii:n=3", F4))
    assert iii.polys == ii.polys
    assert all(e.origin.startswith("klein-iii") for e in iii)


def test_type_iv_drops_zeros_and_duplicates():
    S = separating_set(parse_spec("klein-iv:n=3", F4))
    assert all(not f.is_zero() for f in S.polys)
    assert len(set(S.polys)) == len(S)
    assert S.index_maps[0]["kind"] == "restriction"

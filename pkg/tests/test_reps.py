import itertools

import pytest

from modsep import Polynomial, act_point, act_poly, build, is_invariant, make_field, norm, \
    parse_spec, primitive_root_of_unity, surjection
from modsep.action import as_matrix
from modsep.reps import ModuleSpec, SpecError, restrict_to_submodule, submodule_inclusion

F2 = make_field(2)
F4 = make_field(2, 2)
t = F4.gen


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def block(top_left, top_right, bottom_right):
    """Upper block-triangular matrix from three blocks given as lists of rows."""
    a, b = len(top_left), len(bottom_right)
    rows = [list(top_left[i]) + list(top_right[i]) for i in range(a)]
    rows += [[0] * a + list(bottom_right[i]) for i in range(b)]
    return rows


def all_points(F, dim):
    return itertools.product(F.elements(), repeat=dim)


@pytest.mark.parametrize("text,dim", [("klein-ii:n=3,lambda=t", 6), ("klein-iii:n=3", 6),
                                      ("klein-iv:n=3", 5), ("klein-v:n=4", 7),
                                      ("klein-regular", 4)])
def test_dimensions(text, dim):
    spec = parse_spec(text, F4)
    assert spec.dim == dim and build(spec).dim == dim and build(spec).order == 4


def test_cyclic_dimension_and_order():
    spec = parse_spec("cyclic:p=3,m=4,n=3")
    assert spec.field.name == "3^2"
    assert spec.dim == 3 and build(spec).order == 12


def test_type_ii_sigma3_dual_action():
    for lam in F4.elements():
        G = build(ModuleSpec("klein-ii", F4, n=2, lam=lam))
        x1, x2, x3, x4 = Polynomial.gens(F4, 4)
        s3 = G.element("s3")
        assert act_poly(G, s3, x1) == x1 + x3 * lam + x4
        assert act_poly(G, s3, x2) == x2 + x4 * lam
        assert act_poly(G, s3, x3) == x3 and act_poly(G, s3, x4) == x4


@pytest.mark.parametrize("n", [2, 3, 4])
def test_type_ii_point_matrices_are_the_block_representation(n):
    lam = t
    G = build(parse_spec(f"klein-ii:n={n},lambda=t", F4))
    J = [[lam if i == j else (1 if j == i + 1 else 0) for j in range(n)] for i in range(n)]
    assert G.point_matrix(G.element("s1")) == as_matrix(F4, block(identity(n), identity(n), identity(n)))
    assert G.point_matrix(G.element("s3")) == as_matrix(F4, block(identity(n), J, identity(n)))


@pytest.mark.parametrize("F", [F2, F4], ids=["F2", "F4"])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_type_iii_swaps_the_type_ii_generators(F, n):
    ii = build(ModuleSpec("klein-ii", F, n=n, lam=F.zero))
    iii = build(ModuleSpec("klein-iii", F, n=n))
    assert iii.dual(iii.element("s1")) == ii.dual(ii.element("s3"))
    assert iii.dual(iii.element("s3")) == ii.dual(ii.element("s1"))
    assert iii.dual(iii.element("s2")) == ii.dual(ii.element("s2"))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_type_iv_matches_block_matrices(n):
    G = build(ModuleSpec("klein-iv", F4, n=n))
    zero_row = [[0] * (n - 1)]
    s1 = block(identity(n), zero_row + identity(n - 1), identity(n - 1))
    s2 = block(identity(n), identity(n - 1) + zero_row, identity(n - 1))
    assert G.point_matrix(G.element("s1")) == as_matrix(F4, s1)
    assert G.point_matrix(G.element("s2")) == as_matrix(F4, s2)


@pytest.mark.parametrize("n", [2, 3])
def test_type_iv_is_a_submodule_of_type_ii(n):
    iv = ModuleSpec("klein-iv", F4, n=n)
    ii = ModuleSpec("klein-ii", F4, n=n, lam=F4.one)
    Giv, Gii = build(iv), build(ii)
    for v in all_points(F4, iv.dim):
        for g in range(4):
            assert submodule_inclusion(iv, act_point(Giv, g, v)) == \
                act_point(Gii, g, submodule_inclusion(iv, v))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_type_v_matches_block_matrices(n):
    G = build(ModuleSpec("klein-v", F4, n=n))
    m = n - 1
    s1 = block(identity(m), [identity(m)[i] + [0] for i in range(m)], identity(n))
    s2 = block(identity(m), [[0] + identity(m)[i] for i in range(m)], identity(n))
    assert G.point_matrix(G.element("s1")) == as_matrix(F4, s1)
    assert G.point_matrix(G.element("s2")) == as_matrix(F4, s2)


def test_type_v_sigma2_example():
    G = build(ModuleSpec("klein-v", F4, n=3))
    X = Polynomial.gens(F4, 5)
    assert act_poly(G, G.element("s2"), X[0]) == X[0] + X[3]


def test_cyclic_example():
    spec = parse_spec("cyclic:p=3,m=2,n=3")
    G = build(spec)
    x1, x2, x3 = Polynomial.gens(spec.field, 3)
    sigma, alpha = G.element("s^1*a^0"), G.element("s^0*a^1")
    assert act_poly(G, sigma, x3) == x3 + x2
    for x in (x1, x2, x3):
        assert act_poly(G, alpha, x) == x * 2


@pytest.mark.parametrize("text", ["cyclic:p=3,m=2,n=3", "cyclic:p=3,m=4,n=3", "cyclic:p=5,m=2,n=5",
                                  "cyclic:p=2,m=3,n=2"])
def test_cyclic_point_action(text):
    spec = parse_spec(text)
    G = build(spec)
    F, n, p = spec.field, spec.n, spec.p
    lam = primitive_root_of_unity(F, spec.m)
    sigma_inv = as_matrix(F, [[int(i == j or i == j + 1) for j in range(n)] for i in range(n)])
    assert G.point_matrix(G.element(f"s^{p - 1}*a^0")) == sigma_inv
    assert G.point_matrix(G.element("s^0*a^1")) == tuple(
        tuple(lam if i == j else F.zero for j in range(n)) for i in range(n))


def test_klein_generators_are_commuting_involutions():
    for text in ["klein-ii:n=3,lambda=t", "klein-iii:n=2", "klein-iv:n=3", "klein-v:n=3", "klein-regular"]:
        G = build(parse_spec(text, F4))
        for g in range(4):
            assert G.compose(g, g) == G.identity
        assert G.compose(1, 3) == G.compose(3, 1) == 2


@pytest.mark.parametrize("text,err", [
    ("klein-ii:n=2,lambda=1", "need characteristic"),
    ("klein-ii:n=1,lambda=1", "n >= 2"),
    ("cyclic:p=3,m=2,n=4", "n <= p"),
    ("cyclic:p=3,m=3,n=2", "gcd"),
    ("klein-vi:n=2", "unknown"),
    ("klein-ii:n=2", "lambda"),
    ("klein-v:n=2,lambda=1", "unexpected"),
])
def test_spec_errors(text, err):
    field = make_field(3) if "char" in err else F4
    with pytest.raises(SpecError, match=err):
        parse_spec(text, None if text.startswith("cyclic") else field)


def test_lambda_must_be_reduced_and_in_field():
    with pytest.raises(SpecError):
        parse_spec("klein-ii:n=2,lambda=t", F2)
    with pytest.raises(SpecError):
        parse_spec("klein-ii:n=2,lambda=t^2", F4)
    with pytest.raises(SpecError):
        ModuleSpec("klein-ii", F4, n=2, lam=make_field(2, 3).gen)


def test_cyclic_field_must_contain_roots():
    with pytest.raises(SpecError):
        parse_spec("cyclic:p=3,m=4,n=2", make_field(3))


def test_spec_strings_round_trip():
    for text in ["klein-ii:n=3,lambda=t+1", "klein-iii:n=2", "klein-iv:n=4", "klein-v:n=5",
                 "klein-regular"]:
        assert str(parse_spec(text, F4)) == text
    assert str(parse_spec("cyclic:p=3, m=4, n=3")) == "cyclic:p=3,m=4,n=3"


def test_surjection_examples():
    phi = surjection(parse_spec("klein-ii:n=3,lambda=t", F4))
    assert phi.dropped == (0, 3)
    assert str(phi.target) == "klein-ii:n=2,lambda=t"
    phi = surjection(parse_spec("cyclic:p=3,m=2,n=3"))
    assert phi.dropped == (2,) and phi.target.n == 2
    phi = surjection(parse_spec("klein-v:n=3", F4))
    assert phi.dropped == (0, 2)
    with pytest.raises(SpecError):
        surjection(parse_spec("klein-ii:n=2,lambda=t", F4))
    with pytest.raises(SpecError):
        surjection(parse_spec("cyclic:p=3,m=2,n=1"))


def test_pullback_reindexes():
    phi = surjection(parse_spec("klein-ii:n=3,lambda=t", F4))
    x3_target = Polynomial.var(F4, 4, 2)
    assert phi.pullback(x3_target) == Polynomial.var(F4, 6, 4)


def _target_element(G_src, G_tgt, g):
    label = G_src.labels[g]
    if label in G_tgt.labels:
        return G_tgt.element(label)
    return G_tgt.element(label.split("*")[1])  # cyclic n=1 keeps only the alpha part


@pytest.mark.parametrize("text,field", [
    ("klein-ii:n=3,lambda=t", F4), ("klein-ii:n=4,lambda=1", F2), ("klein-iii:n=3", F4),
    ("klein-v:n=3", F4), ("klein-v:n=5", F2), ("cyclic:p=3,m=2,n=3", None),
    ("cyclic:p=3,m=4,n=2", None), ("cyclic:p=5,m=2,n=4", None), ("cyclic:p=2,m=3,n=2", None)])
def test_surjections_are_equivariant(text, field):
    spec = parse_spec(text, field)
    phi = surjection(spec)
    Gs, Gt = build(spec), build(phi.target)
    for v in all_points(spec.field, spec.dim):
        for g in Gs:
            assert phi(act_point(Gs, g, v)) == act_point(Gt, _target_element(Gs, Gt, g), phi(v))


def test_pullback_of_invariant_is_invariant():
    spec = parse_spec("klein-v:n=4", F4)
    phi = surjection(spec)
    Gt = build(phi.target)
    f = norm(Gt, None, Polynomial.var(F4, phi.target.dim, 0))
    assert is_invariant(build(spec), phi.pullback(f))


def test_restriction_examples():
    spec = ModuleSpec("klein-ii", F4, n=2, lam=F4.one)
    X = Polynomial.gens(F4, 4)
    Y = Polynomial.gens(F4, 3)
    assert restrict_to_submodule(X[2], spec).is_zero()
    assert restrict_to_submodule(X[3], spec) == Y[2]
    G = build(spec)
    assert restrict_to_submodule(norm(G, None, X[0]), spec) == Y[0] ** 2 * (Y[0] + Y[2]) ** 2
    with pytest.raises(SpecError):
        restrict_to_submodule(X[0], ModuleSpec("klein-ii", F4, n=2, lam=t))


def test_restriction_preserves_invariance():
    spec = ModuleSpec("klein-ii", F4, n=3, lam=F4.one)
    G, Giv = build(spec), build(ModuleSpec("klein-iv", F4, n=3))
    X = Polynomial.gens(F4, 6)
    for f in (norm(G, None, X[0]), norm(G, None, X[1] + X[0]), X[4]):
        assert is_invariant(Giv, restrict_to_submodule(f, spec))

import random
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import coordinate_algebra, heis3, random_cochain, random_connection
from lira.cochain import Cochain, Connection, curvature, is_cocycle, lr_differential
from lira.errors import NotACocycle, WrongCurvatureType
from lira.extension import build_extension, extend_connection, extension_equivalence, shear_map
from lira.lierinehart import bracket
from lira.workspace import load_fixture


@pytest.fixture(scope="module")
def weyl2():
    return load_fixture("weyl2")


def test_split_extension(weyl2):
    ext = build_extension(weyl2.algebra, Cochain.zero(weyl2.algebra, 2))
    assert ext.valid
    z = ext.z()
    for i in range(ext.algebra.rank):
        assert not bracket(ext.algebra, z, ext.algebra.basis(i))


def test_torus_extension_valid():
    ws = load_fixture("torus2")
    ext = build_extension(ws.algebra, ws.twist("one"))
    assert ext.valid
    assert ext.algebra.rank == 3


def test_non_cocycle_extension_fails_on_the_triple():
    ws = load_fixture("ab3z")
    f = ws.cochain("z")
    ext = build_extension(ws.algebra, f)
    assert not ext.valid
    d2 = is_cocycle(ws.algebra, f).value
    assert d2 == 1
    # the Jacobiator's z-component is -d2 f on the triple
    assert ext.jacobi_failures() == [((1, 2, 3), -d2)]


def test_bracket_formula(weyl2):
    lr = weyl2.algebra
    x, y = weyl2.ring.gens()
    f = weyl2.twist("one")
    ext = build_extension(lr, f)
    u = ext.lift(lr.basis(0), y)
    v = ext.lift(lr.basis(1).scale(x), x * x)
    # [(az + X), (bz + Y)] = (X(b) - Y(a) + f(X, Y)) z + [X, Y]
    X, Y = lr.basis(0), lr.basis(1).scale(x)
    a, b = y, x * x
    expect_z = lr.anchor_of(X)(b) - lr.anchor_of(Y)(a) + f.evaluate(X, Y)[0]
    got = bracket(ext.algebra, u, v)
    assert ext.split(got)[0] == expect_z
    assert ext.split(got)[1] == bracket(lr, X, Y)


@given(st.sampled_from([3, 4]), st.booleans(), st.integers(0, 10**6))
def test_extension_dichotomy(n, make_cocycle, seed):
    lr = _coord(n)
    rng = random.Random(seed)
    if make_cocycle:
        f = lr_differential(Connection.trivial(lr), random_cochain(rng, lr, 1)) + _constant_form(rng, lr)
    else:
        f = random_cochain(rng, lr, 2, maxdeg=1)
    ext = build_extension(lr, f)
    assert ext.valid == bool(is_cocycle(lr, f))


def test_extension_dichotomy_nonabelian():
    lr = heis3()
    for f, ok in [(Cochain(lr, 2, {(0, 2): 1}), True), (Cochain(lr, 2, {(0, 1): 1}), True)]:
        assert build_extension(lr, f).valid == ok == bool(is_cocycle(lr, f))


_coords = {}


def _coord(n):
    if n not in _coords:
        _coords[n] = coordinate_algebra(n)
    return _coords[n]


def _constant_form(rng, lr):
    return Cochain(lr, 2, {ij: rng.randint(-2, 2) for ij in combinations(range(lr.rank), 2)})


def test_equivalence_identity(weyl2):
    f = weyl2.twist("one")
    res = extension_equivalence(weyl2.algebra, f, f, 1)
    assert res.found and not res.rho and res.verified


def test_equivalence_weyl2(weyl2):
    lr = weyl2.algebra
    res = extension_equivalence(lr, weyl2.twist("one"), weyl2.twist("zero"), 1)
    assert res.found and res.verified
    assert res.rho.scalar((1,)) == weyl2.ring.var("x")
    phi = res.map()
    z = res.source.z()
    assert phi(z) == res.target.z()


def test_equivalence_torus():
    ws = load_fixture("torus2")
    for D in (1, 2, 3):
        assert not extension_equivalence(ws.algebra, ws.twist("one"), ws.twist("zero"), D).found


def test_equivalence_requires_cocycles():
    ws = load_fixture("ab3z")
    with pytest.raises(NotACocycle):
        extension_equivalence(ws.algebra, ws.cochain("z"), Cochain.zero(ws.algebra, 2), 1)


@given(st.integers(0, 10**6))
def test_shear_round_trip(seed):
    lr = _coord(3)
    rng = random.Random(seed)
    g = _constant_form(rng, lr)
    rho = random_cochain(rng, lr, 1)
    f = g + lr_differential(Connection.trivial(lr), rho)
    src, dst = build_extension(lr, f), build_extension(lr, g)
    there = shear_map(src, dst, rho)
    back = shear_map(dst, src, -rho)
    for _ in range(3):
        w = src.lift(lr.elem([rng.randint(-2, 2) * lr.ring.gens()[rng.randrange(3)] for _ in range(3)]), rng.randint(-3, 3))
        assert back(there(w)) == w
    basis = [src.algebra.basis(i) for i in range(4)]
    for i in range(4):
        for j in range(i + 1, 4):
            assert there(bracket(src.algebra, basis[i], basis[j])) == bracket(dst.algebra, there(basis[i]), there(basis[j]))


def test_extend_connection(weyl2):
    conn = weyl2.connection("typeone")
    ext_conn = extend_connection(conn, weyl2.twist("one"))
    assert curvature(ext_conn).is_zero()
    assert ext_conn.gamma[0] == ((weyl2.ring.one,),)
    assert ext_conn.apply(0, (weyl2.ring.var("y"),)) == (weyl2.ring.var("y"),)


def test_extend_flat_connection_restricts(weyl2):
    lr = weyl2.algebra
    conn = weyl2.connection("flat")
    ext_conn = extend_connection(conn, Cochain.zero(lr, 2))
    assert curvature(ext_conn).is_zero()
    assert list(ext_conn.gamma[1:]) == list(conn.gamma)


def test_extend_connection_wrong_type(weyl2):
    with pytest.raises(WrongCurvatureType):
        extend_connection(Connection.trivial(weyl2.algebra), weyl2.twist("one"))


@given(st.integers(0, 10**6))
def test_extend_connection_random_type(seed):
    # a rank-1 connection is of curvature type R
    lr = _coord(3)
    rng = random.Random(seed)
    conn = random_connection(rng, lr, 1)
    f = curvature(conn).trace()
    assert curvature(extend_connection(conn, f)).is_zero()

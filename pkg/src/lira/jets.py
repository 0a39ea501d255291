"""The (B,B)-module Bz + L, first-order jets J = E + L (x)_Q E with their
splittings, and the Cartan-Eilenberg boundary on Λ_Q L (x)_Q E.

Tensor products here are over Q, so elements are stored in the Q-basis
given by monomials: ``(i, m)`` is m*e_i in L and ``(j, m)`` is m*eps_j in E.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .cochain import Connection, curvature
from .errors import AlgebraMismatch, DomainError, NotFieldCase, NotFlat
from .lierinehart import LElem, LieRinehart, bracket
from .linalg import QMatrix, qsolve


def _acc(out, key, c):
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def _qbasis(vec):
    """Q-basis expansion of a tuple of Polys: (slot, monomial) -> coefficient."""
    out = {}
    for s, p in enumerate(vec):
        for m, c in p.terms.items():
            out[(s, m)] = c
    return out


# -- Bz + L -----------------------------------------------------------------------

class LTilde:
    """Bz + L with left action a(bz + x) = abz + ax and right action
    (bz + x)a = (ba + x(a))z + ax.  Elements are (b, LElem)."""

    def __init__(self, lr: LieRinehart):
        self.lr = lr

    def elem(self, b, x: LElem):
        return (self.lr.ring.coerce(b), x)

    def left(self, a, w):
        b, x = w
        return (a * b, x.scale(a))

    def right(self, w, a):
        b, x = w
        return (b * a + self.lr.anchor_of(x)(a), x.scale(a))


# -- L (x)_Q E ---------------------------------------------------------------------

class Tensor:
    """Element of L (x)_Q E: (i, j, m1, m2) -> coefficient, meaning
    c * (m1 e_i) (x) (m2 eps_j)."""

    __slots__ = ("lr", "r", "terms")

    def __init__(self, lr, r, terms=None):
        self.lr = lr
        self.r = r
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def simple(cls, lr, r, x: LElem, f):
        """x (x) f for x in L and f in E = B^r."""
        f = tuple(lr.ring.coerce(c) for c in f)
        out = {}
        for (i, m1), c1 in _qbasis(x.coords).items():
            for (j, m2), c2 in _qbasis(f).items():
                _acc(out, (i, j, m1, m2), c1 * c2)
        return cls(lr, r, out)

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            _acc(out, k, v)
        return Tensor(self.lr, self.r, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return Tensor(self.lr, self.r, {k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, Tensor) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def pieces(self):
        """Iterate (c, i, m1, j, m2)."""
        for (i, j, m1, m2), c in sorted(self.terms.items()):
            yield c, i, m1, j, m2

    def left(self, a):
        ring = self.lr.ring
        out = Tensor(self.lr, self.r)
        for c, i, m1, j, m2 in self.pieces():
            x = ring.monomial(m1, c) * a
            out = out + Tensor.simple(self.lr, self.r, _unit_elem(self.lr, i, x), _unit_vec(ring, self.r, j, ring.monomial(m2)))
        return out

    def right(self, a):
        ring = self.lr.ring
        out = Tensor(self.lr, self.r)
        for c, i, m1, j, m2 in self.pieces():
            f = ring.monomial(m2, c) * a
            out = out + Tensor.simple(self.lr, self.r, _unit_elem(self.lr, i, ring.monomial(m1)), _unit_vec(ring, self.r, j, f))
        return out


def _unit_elem(lr, i, b):
    return LElem(lr, [b if k == i else lr.ring.zero for k in range(lr.rank)])


def _unit_vec(ring, r, j, b):
    return tuple(b if k == j else ring.zero for k in range(r))


# -- jets ----------------------------------------------------------------------------

class JetModule:
    """J = E + L (x)_Q E; elements are (e, t) with e in B^r and t a Tensor."""

    def __init__(self, lr: LieRinehart, r: int):
        self.lr = lr
        self.r = r

    def zero(self):
        ring = self.lr.ring
        return (tuple(ring.zero for _ in range(self.r)), Tensor(self.lr, self.r))

    def add(self, u, v):
        return (tuple(a + b for a, b in zip(u[0], v[0])), u[1] + v[1])

    def sub(self, u, v):
        return (tuple(a - b for a, b in zip(u[0], v[0])), u[1] - v[1])

    def left(self, a, u):
        return (tuple(a * c for c in u[0]), u[1].left(a))

    def right(self, u, a):
        """(e, x (x) f) a = (ea + x(a) f, x (x) fa)."""
        ring = self.lr.ring
        e = [c * a for c in u[0]]
        for c, i, m1, j, m2 in u[1].pieces():
            xa = ring.monomial(m1, c) * self.lr.anchor[i](a)
            if xa:
                e[j] = e[j] + xa * ring.monomial(m2)
        return (tuple(e), u[1].right(a))

    def include(self, e):
        return (tuple(self.lr.ring.coerce(c) for c in e), Tensor(self.lr, self.r))

    def project(self, u):
        return u[1]

    def equal(self, u, v):
        return u[0] == v[0] and u[1] == v[1]


def connection_operator(conn: Connection, t: Tensor):
    """D(x (x) f) = grad(x)(f), extended Q-linearly."""
    ring = conn.algebra.ring
    r = conn.rank
    out = [ring.zero] * r
    for c, i, m1, j, m2 in t.pieces():
        v = conn.apply(i, _unit_vec(ring, r, j, ring.monomial(m2)))
        b = ring.monomial(m1, c)
        out = [o + b * w for o, w in zip(out, v)]
    return tuple(out)


@dataclass
class JetSplitting:
    """s(t) = (D(t), t) for a Q-linear D : L (x)_Q E -> E."""

    jet: JetModule
    D: object

    def __call__(self, t: Tensor):
        return (self.D(t), t)


def jet_split(conn: Connection) -> JetSplitting:
    jet = JetModule(conn.algebra, conn.rank)
    return JetSplitting(jet, lambda t: connection_operator(conn, t))


def jet_unsplit(s: JetSplitting) -> Connection:
    """Gamma_i[:, j] = E-part of s(e_i (x) eps_j)."""
    lr = s.jet.lr
    ring = lr.ring
    r = s.jet.r
    gamma = []
    for i in range(lr.rank):
        cols = []
        for j in range(r):
            t = Tensor.simple(lr, r, lr.basis(i), _unit_vec(ring, r, j, ring.one))
            cols.append(s(t)[0])
        gamma.append(tuple(tuple(cols[j][k] for j in range(r)) for k in range(r)))
    return Connection(lr, gamma, r)


@dataclass
class SplitCheck:
    left_linear: bool
    right_linear: bool
    section: bool
    round_trip: bool

    @property
    def passed(self):
        return self.left_linear and self.right_linear and self.section and self.round_trip

    def lines(self):
        yn = lambda b: "PASS" if b else "FAIL"  # noqa: E731
        return [
            f"s(a t) = a s(t):   {yn(self.left_linear)}",
            f"s(t a) = s(t) a:   {yn(self.right_linear)}",
            f"j o s = id:        {yn(self.section)}",
            f"unsplit(split) = conn: {yn(self.round_trip)}",
        ]


def jet_check(conn: Connection, samples) -> SplitCheck:
    """Check (B,B)-linearity and j o s = id on sample pairs (t, a)."""
    s = jet_split(conn)
    jet = s.jet
    left = right = section = True
    for t, a in samples:
        st = s(t)
        if not jet.equal(s(t.left(a)), jet.left(a, st)):
            left = False
        if not jet.equal(s(t.right(a)), jet.right(st, a)):
            right = False
        if jet.project(st) != t:
            section = False
    return SplitCheck(left, right, section, jet_unsplit(s) == conn)


def standard_samples(conn: Connection):
    """Deterministic (t, a): basis tensors b e_i (x) c eps_j against small a."""
    lr = conn.algebra
    ring = lr.ring
    r = conn.rank
    coeffs = [ring.one] + ring.gens()
    out = []
    for i in range(lr.rank):
        for j in range(r):
            for b in coeffs:
                for c in coeffs:
                    t = Tensor.simple(lr, r, lr.basis(i).scale(b), _unit_vec(ring, r, j, c))
                    for a in coeffs:
                        out.append((t, a * a + a + 2))
    return out


# -- Cartan-Eilenberg chains ---------------------------------------------------------

class CEChain:
    """Q-linear combination of (x_1 ^ ... ^ x_p) (x) e, x_k and e Q-basis elements.

    Keys are (xs, (j, m)) with xs a strictly increasing tuple of (i, m) pairs.
    """

    __slots__ = ("lr", "r", "degree", "terms")

    def __init__(self, lr, r, degree, terms=None):
        self.lr = lr
        self.r = r
        self.degree = degree
        out = {}
        for (xs, e), c in (terms or {}).items():
            if len(xs) != degree:
                raise DomainError("chain term of wrong degree")
            sign, key = _sort_sign(xs)
            if sign:
                _acc(out, (key, e), Fraction(c) * sign)
        self.terms = out

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            _acc(out, k, v)
        return CEChain._raw(self.lr, self.r, self.degree, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return CEChain._raw(self.lr, self.r, self.degree, {k: v * c for k, v in self.terms.items() if v * c})

    @classmethod
    def _raw(cls, lr, r, degree, terms):
        ch = cls.__new__(cls)
        ch.lr, ch.r, ch.degree, ch.terms = lr, r, degree, terms
        return ch

    def __eq__(self, other):
        return isinstance(other, CEChain) and self.degree == other.degree and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"CEChain(p={self.degree}, {len(self.terms)} terms)"


def _sort_sign(xs):
    xs = list(xs)
    if len(set(xs)) != len(xs):
        return 0, None
    sign = 1
    for a in range(1, len(xs)):
        b = a
        while b > 0 and xs[b - 1] > xs[b]:
            xs[b - 1], xs[b] = xs[b], xs[b - 1]
            sign = -sign
            b -= 1
    return sign, tuple(xs)


def _elem_of(lr, x):
    i, m = x
    return _unit_elem(lr, i, lr.ring.monomial(m))


def _vec_of(ring, r, e):
    j, m = e
    return _unit_vec(ring, r, j, ring.monomial(m))


def _add_chain_terms(out, rest, new_xs, vec, coeff):
    """out += coeff * (new_xs ^ rest) (x) vec, expanding Q-linearly."""
    for e, c in _qbasis(vec).items():
        sign, key = _sort_sign(tuple(new_xs) + tuple(rest))
        if sign:
            _acc(out, (key, e), coeff * c * sign)


def ce_boundary(conn: Connection, chain: CEChain) -> CEChain:
    """d(x_1..x_p (x) e) = sum_i (-1)^(i+1) (..x_i^..) (x) D(x_i (x) e)
                         + sum_{i<j} (-1)^(i+j+1) [x_i, x_j] ^ (..x_i^..x_j^..) (x) e

    With these signs d_1 = D and d_1 d_2 = -K_D."""
    lr = conn.algebra
    ring = lr.ring
    r = conn.rank
    p = chain.degree
    if p < 1:
        raise DomainError("boundary needs degree >= 1")
    out = {}
    for (xs, e), c in chain.terms.items():
        ev = _vec_of(ring, r, e)
        for k in range(p):
            sign = 1 if k % 2 == 0 else -1
            d = conn.apply_elem(_elem_of(lr, xs[k]), ev)
            rest = xs[:k] + xs[k + 1:]
            _add_chain_terms(out, rest, (), d, c * sign)
        for a in range(p):
            for b in range(a + 1, p):
                # 1-based (a+1)+(b+1)+1
                sign = 1 if (a + b + 3) % 2 == 0 else -1
                br = bracket(lr, _elem_of(lr, xs[a]), _elem_of(lr, xs[b]))
                rest = xs[:a] + xs[a + 1:b] + xs[b + 1:]
                for x, cx in _qbasis(br.coords).items():
                    sg, key = _sort_sign((x,) + tuple(rest))
                    if sg:
                        _acc(out, (key, e), c * cx * sign * sg)
    return CEChain._raw(lr, r, p - 1, out)


def curvature_operator(conn: Connection, x: LElem, y: LElem, w):
    """K_D(x ^ y (x) w) = D(x D(y w)) - D(y D(x w)) - D([x,y] w)."""
    a = conn.apply_elem(x, conn.apply_elem(y, w))
    b = conn.apply_elem(y, conn.apply_elem(x, w))
    c = conn.apply_elem(bracket(conn.algebra, x, y), w)
    return tuple(p - q - s for p, q, s in zip(a, b, c))


def curvature_insertion(conn: Connection, chain: CEChain) -> CEChain:
    """sum_{i<j} (-1)^(i+j) (..x_i^..x_j^..) (x) K_D(x_i ^ x_j (x) e), the value of d d."""
    lr = conn.algebra
    ring = lr.ring
    r = conn.rank
    p = chain.degree
    out = {}
    for (xs, e), c in chain.terms.items():
        ev = _vec_of(ring, r, e)
        for a in range(p):
            for b in range(a + 1, p):
                sign = 1 if (a + b) % 2 == 0 else -1
                K = curvature_operator(conn, _elem_of(lr, xs[a]), _elem_of(lr, xs[b]), ev)
                rest = xs[:a] + xs[a + 1:b] + xs[b + 1:]
                _add_chain_terms(out, rest, (), K, c * sign)
    return CEChain._raw(lr, r, p - 2, out)


def field_case_homology(conn: Connection):
    """dim H_p(L, E) for p = 0..l when B = Q and the connection is flat."""
    lr = conn.algebra
    if not lr.ring.is_field:
        raise NotFieldCase(f"homology dimensions need B = Q, got {lr.ring}")
    if not curvature(conn).is_zero():
        raise NotFlat("connection is not flat")
    l, r = lr.rank, conn.rank
    unit = ()

    def basis(p):
        return [(tuple((i, unit) for i in I), (j, unit)) for I in combinations(range(l), p) for j in range(r)]

    ranks = {}
    for p in range(1, l + 1):
        src, dst = basis(p), basis(p - 1)
        row_of = {k: n for n, k in enumerate(dst)}
        mat = QMatrix(len(dst), len(src))
        for col, key in enumerate(src):
            d = ce_boundary(conn, CEChain(lr, r, p, {key: 1}))
            for k, v in d.terms.items():
                mat[row_of[k], col] = v
        ranks[p] = qsolve(mat).rank
    dims = []
    for p in range(l + 1):
        dims.append(len(basis(p)) - ranks.get(p, 0) - ranks.get(p + 1, 0))
    return dims


def chain_from(lr, r, items):
    """Build a chain from ((LElem, ...), e-vector, coefficient) items, expanding over Q."""
    ring = lr.ring
    out = {}
    for xs, e, c in items:
        e = tuple(ring.coerce(v) for v in e)
        parts = [{(): Fraction(c)}]
        for x in xs:
            if x.algebra is not lr:
                raise AlgebraMismatch("chain entry from another algebra")
            nxt = {}
            for key, cc in parts[0].items():
                for q, cq in _qbasis(x.coords).items():
                    _acc(nxt, key + (q,), cc * cq)
            parts = [nxt]
        for key, cc in parts[0].items():
            for ee, ce in _qbasis(e).items():
                sign, sk = _sort_sign(key)
                if sign:
                    _acc(out, (sk, ee), cc * ce * sign)
    return CEChain._raw(lr, r, len(items[0][0]) if items else 0, out)

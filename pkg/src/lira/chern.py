"""Shuffle powers, the exponential of 2-cochains and Chern characters.

Even-degree cochains are multiplied with the divided-power product

    (a * b) = p! q! / (p+q)!  *  (a wedge b)      (a of degree 2p, b of degree 2q)

where the wedge sums over (2p, 2q)-shuffles.  With this normalisation the
k-th power of a 2-cochain is the sum over perfect matchings of its
arguments (the shuffle power), the product is associative and commutative,
and exp(f) = sum f^k / k! turns sums into products.
"""

from __future__ import annotations

from itertools import combinations, permutations
from math import factorial

from . import matrix as M
from .cochain import Cochain, Connection, CurvatureForm, curvature, require_cocycle
from .errors import AlgebraMismatch, DomainError


def _matchings(idx):
    """Perfect matchings of an increasing tuple, with the sign of the
    permutation listing each pair (pairs kept increasing, in order of their
    first element)."""
    if not idx:
        yield 1, ()
        return
    first = idx[0]
    for t in range(1, len(idx)):
        rest = idx[1:t] + idx[t + 1:]
        sign = -1 if (t - 1) % 2 else 1
        for s, m in _matchings(rest):
            yield sign * s, ((first, idx[t]),) + m


def shuffle_power(lr, f: Cochain, k: int) -> Cochain:
    """f^k(x_1..x_2k) = sum over perfect matchings of signed products of f."""
    if f.degree != 2 or f.rank != 1:
        raise DomainError("shuffle_power expects a B-valued 2-cochain")
    if f.algebra is not lr:
        raise AlgebraMismatch("cochain on a different algebra")
    ring = lr.ring
    if k < 0:
        raise DomainError("power must be nonnegative")
    if k == 0:
        return Cochain(lr, 0, {(): ring.one})
    if k == 1:
        return f
    vals = {}
    for idx in combinations(range(lr.rank), 2 * k):
        acc = ring.zero
        for sign, m in _matchings(idx):
            p = ring.one
            for pair in m:
                p = p * f.scalar(pair)
                if not p:
                    break
            if p:
                acc = acc + p if sign > 0 else acc - p
        if acc:
            vals[idx] = acc
    return Cochain(lr, 2 * k, vals)


def wedge(a: Cochain, b: Cochain) -> Cochain:
    """(a wedge b)(x_1..x_{p+q}) = sum over (p,q)-shuffles of sgn * a(..) b(..)."""
    if a.algebra is not b.algebra or a.rank != 1 or b.rank != 1:
        raise DomainError("wedge of B-valued cochains on one algebra")
    lr = a.algebra
    ring = lr.ring
    p, q = a.degree, b.degree
    vals = {}
    base = p * (p - 1) // 2
    for idx in combinations(range(lr.rank), p + q):
        acc = ring.zero
        for S in combinations(range(p + q), p):
            sign = -1 if (sum(S) - base) % 2 else 1
            left = tuple(idx[s] for s in S)
            right = tuple(idx[s] for s in range(p + q) if s not in S)
            x = a.scalar(left)
            if x:
                y = b.scalar(right)
                if y:
                    acc = acc + x * y if sign > 0 else acc - x * y
        if acc:
            vals[idx] = acc
    return Cochain(lr, p + q, vals)


def star(a: Cochain, b: Cochain) -> Cochain:
    """Divided-power product of even cochains."""
    if a.degree % 2 or b.degree % 2:
        raise DomainError("the divided-power product needs even degrees")
    p, q = a.degree // 2, b.degree // 2
    w = wedge(a, b)
    c = a.algebra.ring.const(1) * factorial(p) * factorial(q) / factorial(p + q)
    return w.scale(c)


class GradedClass:
    """Sum of even cochains (degree 2k for k <= kmax) representing a class in H^{2*}(L, B)."""

    def __init__(self, algebra, components=None, kmax=None):
        self.algebra = algebra
        if kmax is None:
            kmax = algebra.rank // 2
        self.kmax = kmax
        comps = {}
        for d, c in (components or {}).items():
            if d % 2 or d < 0:
                raise DomainError(f"graded class component of odd or negative degree {d}")
            if d // 2 > kmax:
                continue
            if c.degree != d or c.rank != 1 or c.algebra is not algebra:
                raise DomainError(f"bad component in degree {d}")
            if c:
                comps[d] = c
        self.components = comps

    def component(self, d) -> Cochain:
        return self.components.get(d) or Cochain.zero(self.algebra, d)

    def rank_term(self):
        return self.component(0).scalar(())

    def __add__(self, other):
        self._check(other)
        degs = set(self.components) | set(other.components)
        return GradedClass(self.algebra, {d: self.component(d) + other.component(d) for d in degs}, min(self.kmax, other.kmax))

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return GradedClass(self.algebra, {d: v.scale(c) for d, v in self.components.items()}, self.kmax)

    def __mul__(self, other):
        self._check(other)
        kmax = min(self.kmax, other.kmax)
        out = {}
        for d1, a in self.components.items():
            for d2, b in other.components.items():
                if (d1 + d2) // 2 > kmax or d1 + d2 > self.algebra.rank:
                    continue
                t = star(a, b)
                out[d1 + d2] = out[d1 + d2] + t if d1 + d2 in out else t
        return GradedClass(self.algebra, out, kmax)

    def _check(self, other):
        if not isinstance(other, GradedClass) or other.algebra is not self.algebra:
            raise AlgebraMismatch("graded classes on different algebras")

    def __eq__(self, other):
        return (
            isinstance(other, GradedClass)
            and other.algebra is self.algebra
            and self.components == other.components
        )

    def lines(self):
        out = []
        for d in range(0, 2 * self.kmax + 1, 2):
            c = self.component(d)
            if d == 0:
                out.append(f"degree 0: {c.scalar(())}")
                continue
            if not c:
                out.append(f"degree {d}: 0")
                continue
            body = "; ".join("(" + ",".join(f"e{i + 1}" for i in k) + "): " + str(v[0]) for k, v in c.items())
            out.append(f"degree {d}: {body}")
        return out

    def __repr__(self):
        return "GradedClass(" + " | ".join(self.lines()) + ")"


def exp_class(lr, f: Cochain, kmax=None) -> GradedClass:
    """exp(f) = sum_k f^k / k!, truncated at degree 2*kmax."""
    require_cocycle(lr, f)
    if kmax is None:
        kmax = lr.rank // 2
    comps = {}
    for k in range(kmax + 1):
        comps[2 * k] = shuffle_power(lr, f, k).scale(lr.ring.const(1) / factorial(k))
    return GradedClass(lr, comps, kmax)


def curvature_power_trace(R: CurvatureForm, k: int) -> Cochain:
    """tr(R^k): (1/k!) * sum over ordered (2,..,2)-shuffles of signed matrix products."""
    lr = R.algebra
    ring = lr.ring
    if k == 0:
        return Cochain(lr, 0, {(): ring.const(R.rank)})
    vals = {}
    for idx in combinations(range(lr.rank), 2 * k):
        total = M.zeros(ring, R.rank)
        for sign, m in _matchings(idx):
            for order in permutations(m):
                prod = M.identity(ring, R.rank)
                for pair in order:
                    prod = M.mul(prod, R.at(*pair))
                total = M.add(total, prod) if sign > 0 else M.sub(total, prod)
        tr = M.trace(total) * (ring.const(1) / factorial(k))
        if tr:
            vals[idx] = tr
    return Cochain(lr, 2 * k, vals)


def trace_curvature_powers(conn: Connection, kmax=None) -> GradedClass:
    lr = conn.algebra
    if kmax is None:
        kmax = lr.rank // 2
    R = curvature(conn)
    return GradedClass(lr, {2 * k: curvature_power_trace(R, k) for k in range(kmax + 1)}, kmax)


def chern_character(conn: Connection, kmax=None) -> GradedClass:
    """Ch = sum_k tr(R^k) / k!; the degree-0 term is the rank."""
    t = trace_curvature_powers(conn, kmax)
    comps = {d: c.scale(t.algebra.ring.const(1) / factorial(d // 2)) for d, c in t.components.items()}
    return GradedClass(t.algebra, comps, t.kmax)


def first_chern_form(conn: Connection) -> Cochain:
    """tr R, a representative of c_1."""
    return curvature(conn).trace()


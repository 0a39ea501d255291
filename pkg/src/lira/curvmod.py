"""Connections of prescribed curvature, idempotent-presented modules, tensor
products of connections and the truncated modules V^{k,i}."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from . import matrix as M
from .cochain import Cochain, Connection, curvature
from .enveloping import EnvElem, TwistedAlgebra
from .errors import AlgebraMismatch, DomainError, NotIdempotent
from .ring import Derivation


@dataclass
class CurvatureTypeCheck:
    ok: bool
    pair: tuple | None = None  # 1-based
    difference: tuple | None = None  # R - f*Id at the pair

    def __bool__(self):
        return self.ok

    def describe(self):
        if self.ok:
            return "curvature type holds"
        return f"R - f*Id at pair {self.pair} = {M.fmt(self.difference)}"


def has_curvature_type(conn: Connection, f: Cochain) -> CurvatureTypeCheck:
    """R(e_i, e_j) == f(e_i, e_j) * Id for all i < j."""
    lr = conn.algebra
    if f.algebra is not lr:
        raise AlgebraMismatch("cochain and connection live on different algebras")
    R = curvature(conn)
    ident = M.identity(lr.ring, conn.rank)
    for (i, j), Rij in sorted(R.values.items()):
        diff = M.sub(Rij, M.scale(f.scalar((i, j)), ident))
        if not M.is_zero(diff):
            return CurvatureTypeCheck(False, (i + 1, j + 1), diff)
    return CurvatureTypeCheck(True)


def tensor_connection(c1: Connection, c2: Connection) -> Connection:
    """Gamma_i = Gamma1_i (x) Id + Id (x) Gamma2_i on the rank r1*r2 module."""
    if c1.algebra is not c2.algebra:
        raise AlgebraMismatch("tensor product of connections over different algebras")
    ring = c1.algebra.ring
    i1 = M.identity(ring, c1.rank)
    i2 = M.identity(ring, c2.rank)
    gamma = [M.add(M.kron(g1, i2), M.kron(i1, g2)) for g1, g2 in zip(c1.gamma, c2.gamma)]
    return Connection(c1.algebra, gamma, c1.rank * c2.rank)


# -- idempotents -----------------------------------------------------------------

class IdempotentModule:
    """E = im(phi) inside B^m, with connection grad_X(w) = phi * X(w)."""

    def __init__(self, ring, phi, name=None):
        phi = M.mat(ring, phi)
        m = len(phi)
        if any(len(row) != m for row in phi):
            raise DomainError("idempotent must be square")
        if M.mul(phi, phi) != phi:
            raise NotIdempotent("phi^2 != phi")
        self.ring = ring
        self.phi = phi
        self.m = m
        self.name = name

    def grad(self, X: Derivation, w):
        return M.matvec(self.phi, [X(c) for c in w])


@dataclass
class IdempotentReport:
    passed: bool
    curvature: tuple  # R o phi, columns are R(phi e_k)
    commutator: tuple  # [X(phi), Y(phi)] o phi

    def lines(self):
        out = [
            "R(X,Y) o phi       = " + M.fmt(self.curvature),
            "[X(phi),Y(phi)] o phi = " + M.fmt(self.commutator),
            "PASS" if self.passed else "FAIL",
        ]
        return out


def idempotent_curvature_check(im: IdempotentModule, x: Derivation, y: Derivation) -> IdempotentReport:
    """Compare the curvature of phi o d with [x(phi), y(phi)] on im(phi)."""
    ring = im.ring
    if x.ring != ring or y.ring != ring:
        raise DomainError("derivations over a different ring")
    phi = im.phi
    xy = x.commutator(y)
    cols = []
    for k in range(im.m):
        w = [row[k] for row in phi]
        a = im.grad(x, im.grad(y, w))
        b = im.grad(y, im.grad(x, w))
        c = im.grad(xy, w)
        cols.append([p - q - s for p, q, s in zip(a, b, c)])
    R = M.transpose(M.mat(ring, cols))
    xphi = M.apply_entrywise(x, phi)
    yphi = M.apply_entrywise(y, phi)
    C = M.mul(M.commutator(xphi, yphi), phi)
    return IdempotentReport(R == C, R, C)


# -- V^{k,i} -----------------------------------------------------------------------

def vmodule_rank(l, k, i):
    return comb(l + k + i - 1, l) - comb(l + k - 1, l)


@dataclass
class VModule:
    algebra: TwistedAlgebra
    k: int
    i: int
    basis: list  # PBW exponents, degree ascending then descending lex
    action: list  # l matrices r x r: column c = coordinates of e_j * basis[c] after truncation

    @property
    def rank(self):
        return len(self.basis)

    def coords(self, u: EnvElem):
        """Coordinates of the truncation of u in the basis."""
        ring = self.algebra.ring
        idx = {P: n for n, P in enumerate(self.basis)}
        out = [ring.zero] * self.rank
        for P, b in u.terms.items():
            if P in idx:
                out[idx[P]] = b
        return out

    def element(self, coords) -> EnvElem:
        return self.algebra.elem({P: c for P, c in zip(self.basis, coords)})

    def act(self, j, w):
        """Truncated left action of e_j on a coordinate vector."""
        ta = self.algebra
        u = ta.gen(j) * self.element(w)
        return self.coords(u.truncate(self.k, self.k + self.i))

    def connection(self) -> Connection:
        return Connection(self.algebra.lr, self.action, self.rank)


def vmodule_build(ta: TwistedAlgebra, k: int, i: int) -> VModule:
    if k < 1 or i < 1:
        raise DomainError("V^{k,i} needs k, i >= 1")
    basis = []
    for d in range(k, k + i):
        basis.extend(ta.monomials(d))
    l = ta.lr.rank
    if len(basis) != vmodule_rank(l, k, i):
        raise ArithmeticError("basis count disagrees with the rank formula")
    v = VModule(ta, k, i, basis, [])
    ring = ta.ring
    action = []
    for j in range(l):
        cols = []
        for P in basis:
            u = ta.gen(j) * ta.monomial(P)
            cols.append(v.coords(u.truncate(k, k + i)))
        action.append(M.transpose(M.mat(ring, cols)) if cols else ())
    v.action = action
    return v


@dataclass
class VAuditReport:
    rank: int
    law_passed: bool
    defects: list = field(default_factory=list)  # ((j, i) 1-based, matrix LHS - RHS)
    semilinear_passed: bool = True
    curvature_type: CurvatureTypeCheck | None = None
    trace: Cochain | None = None
    target: Cochain | None = None  # cochain the trace is compared with
    trace_matches: bool | None = None

    @property
    def passed(self):
        return self.law_passed and self.semilinear_passed and bool(self.curvature_type)

    def lines(self):
        out = [f"rank {self.rank}"]
        if self.law_passed:
            out.append("(a) module relations: PASS")
        else:
            out.append("(a) module relations: FAIL")
            for pair, d in self.defects:
                out.append(f"    pair {pair}: e_j e_i - e_i e_j - [e_j,e_i] - f(e_j,e_i) = {M.fmt(d)}")
        if not self.semilinear_passed:
            out.append("(a) semilinearity: FAIL")
        if self.curvature_type is not None:
            ok = "PASS" if self.curvature_type else "FAIL (" + self.curvature_type.describe() + ")"
            out.append(f"(b) curvature type f: {ok}")
            out.append(f"(b) tr R = {self.trace!r}")
            if self.target is not None:
                out.append(f"(b) tr R == f: {'yes' if self.trace_matches else 'no'}")
        return out


def _vmatrix(v, fn):
    """Matrix whose column c is fn(unit vector c)."""
    ring = v.algebra.ring
    cols = []
    for c in range(v.rank):
        w = [ring.one if t == c else ring.zero for t in range(v.rank)]
        cols.append(fn(w))
    return M.transpose(M.mat(ring, cols)) if cols else ()


def vmodule_audit(v: VModule, target: Cochain | None = None) -> VAuditReport:
    """Module-law audit of the truncated action, then curvature of the induced
    connection.  ``target`` (if given) is compared against tr R."""
    ta = v.algebra
    lr = ta.lr
    ring = ta.ring
    l = lr.rank
    report = VAuditReport(v.rank, True)
    for j in range(l):
        for i in range(j):
            lhs = _vmatrix(v, lambda w: [a - b for a, b in zip(v.act(j, v.act(i, w)), v.act(i, v.act(j, w)))])

            def rhs_fn(w, i=i, j=j):
                acc = [ring.zero] * v.rank
                for m, c in enumerate(lr.basis_bracket(j, i)):
                    if c:
                        acc = [a + c * b for a, b in zip(acc, v.act(m, w))]
                fji = ta.f.scalar((j, i))
                return [a + fji * b for a, b in zip(acc, w)]

            rhs = _vmatrix(v, rhs_fn)
            if v.rank and lhs != rhs:
                report.law_passed = False
                report.defects.append(((j + 1, i + 1), M.sub(lhs, rhs)))
    # e_j (b w) = b e_j w + alpha_j(b) w on basis vectors, b a ring variable
    for j in range(l):
        for b in ring.gens():
            for c in range(v.rank):
                w = [ring.one if t == c else ring.zero for t in range(v.rank)]
                lhs = v.act(j, [b * x for x in w])
                rhs = [b * x + lr.anchor[j](b) * y for x, y in zip(v.act(j, w), w)]
                if lhs != rhs:
                    report.semilinear_passed = False
    if report.law_passed and report.semilinear_passed:
        conn = v.connection()
        report.curvature_type = has_curvature_type(conn, ta.f)
        report.trace = curvature(conn).trace()
        if target is not None:
            report.target = target
            report.trace_matches = report.trace == target
    return report


def vmodule_scaled(ta: TwistedAlgebra, k: int, i: int) -> tuple[VModule, Cochain]:
    """V^{k,i} over U(B, L, f/r) with r the rank; returns the module and f."""
    r = vmodule_rank(ta.lr.rank, k, i)
    F = ta.f.scale(ta.ring.const(1) / r)
    scaled = TwistedAlgebra(ta.lr, F, check=False)
    return vmodule_build(scaled, k, i), ta.f

"""The extension L(f) = Bz + L of a Lie-Rinehart algebra by a 2-cochain f."""

from __future__ import annotations

from dataclasses import dataclass

from . import matrix as M
from .cochain import Cochain, CoboundaryResult, Connection, coboundary_solve, curvature, require_cocycle
from .errors import AlgebraMismatch, DomainError, WrongCurvatureType
from .lierinehart import LElem, LieRinehart, ValidationReport, bracket, lr_validate
from .ring import Derivation
from .solve import TruncationWindow


@dataclass
class ExtensionLR:
    """L(f) with basis (z, e_1, ..., e_l); z sits at index 0."""

    base: LieRinehart
    f: Cochain
    algebra: LieRinehart
    report: ValidationReport

    @property
    def valid(self):
        return self.report.passed

    def z(self) -> LElem:
        return self.algebra.basis(0)

    def lift(self, u: LElem, a=0) -> LElem:
        """The element a*z + u of L(f)."""
        if u.algebra is not self.base:
            raise AlgebraMismatch("element is not in the base algebra")
        return LElem(self.algebra, (self.base.ring.coerce(a),) + u.coords)

    def split(self, w: LElem):
        """(a, x) with w = a*z + x."""
        return w.coords[0], LElem(self.base, w.coords[1:])

    def jacobi_failures(self):
        """Failing Jacobi triples, 1-based in the base algebra's numbering, with the z-component."""
        out = []
        for kind, idx, val in self.report.failures:
            if kind == "jacobi" and 1 not in idx:
                out.append((tuple(i - 1 for i in idx), val.coords[0]))
        return out


def build_extension(lr: LieRinehart, f: Cochain) -> ExtensionLR:
    """Build L(f) and validate it; validation passes iff f is a cocycle."""
    if f.algebra is not lr or f.degree != 2 or f.rank != 1:
        raise DomainError("extension needs a B-valued 2-cochain on the same algebra")
    ring = lr.ring
    l = lr.rank
    structure = {}
    for i in range(l):
        for j in range(i + 1, l):
            coords = (f.scalar((i, j)),) + tuple(lr.basis_bracket(i, j))
            structure[(i + 1, j + 1)] = coords
    anchor = [Derivation.zero(ring)] + list(lr.anchor)
    name = f"{lr.name}(f)" if lr.name else None
    ext = LieRinehart(ring, l + 1, anchor, structure, name=name)
    return ExtensionLR(lr, f, ext, lr_validate(ext))


def shear_map(ext_src: ExtensionLR, ext_dst: ExtensionLR, rho: Cochain):
    """az + x  |->  (a + rho(x))z + x, as a function on elements of L(src)."""

    def phi(w: LElem) -> LElem:
        if w.algebra is not ext_src.algebra:
            raise AlgebraMismatch("element is not in the source extension")
        a, x = ext_src.split(w)
        return ext_dst.lift(x, a + rho.evaluate(x)[0])

    return phi


def shear_preserves_bracket(ext_src, ext_dst, rho) -> bool:
    phi = shear_map(ext_src, ext_dst, rho)
    n = ext_src.algebra.rank
    basis = [ext_src.algebra.basis(i) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            lhs = phi(bracket(ext_src.algebra, basis[i], basis[j]))
            rhs = bracket(ext_dst.algebra, phi(basis[i]), phi(basis[j]))
            if lhs != rhs:
                return False
    return True


@dataclass
class EquivalenceResult:
    solve: CoboundaryResult
    source: ExtensionLR
    target: ExtensionLR
    verified: bool = False

    @property
    def rho(self):
        return self.solve.rho

    @property
    def found(self):
        return self.solve.found

    def map(self):
        if self.rho is None:
            raise DomainError("no equivalence in the window")
        return shear_map(self.source, self.target, self.rho)


def extension_equivalence(lr: LieRinehart, f: Cochain, g: Cochain, window) -> EquivalenceResult:
    """Search for a shear equivalence L(f) -> L(g), i.e. rho with d1 rho = f - g."""
    if isinstance(window, int):
        window = TruncationWindow(window)
    require_cocycle(lr, f, "f")
    require_cocycle(lr, g, "g")
    res = coboundary_solve(lr, f - g, window)
    src, dst = build_extension(lr, f), build_extension(lr, g)
    out = EquivalenceResult(res, src, dst)
    if res.found:
        out.verified = shear_preserves_bracket(src, dst, res.rho)
        if not out.verified:
            raise ArithmeticError("shear map does not preserve brackets")
    return out


def extend_connection(conn: Connection, f: Cochain, ext: ExtensionLR | None = None) -> Connection:
    """The flat L(f)-connection az + x |-> a*Id + conn(x)."""
    from .curvmod import has_curvature_type

    chk = has_curvature_type(conn, f)
    if not chk:
        raise WrongCurvatureType(f"connection is not of curvature type f: {chk.describe()}")
    if ext is None:
        ext = build_extension(conn.algebra, f)
    ring = conn.algebra.ring
    gamma = [M.identity(ring, conn.rank)] + list(conn.gamma)
    out = Connection(ext.algebra, gamma, conn.rank)
    if not curvature(out).is_zero():
        raise ArithmeticError("extended connection is not flat")
    return out

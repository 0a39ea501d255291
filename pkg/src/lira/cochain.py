"""Connections, curvature and the Lie-Rinehart complex C^p(L, W) for free W."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from . import matrix as M
from .errors import DomainError, NotACocycle, NotFieldCase, NotFlat, RankMismatch
from .lierinehart import LElem, LieRinehart
from .linalg import QMatrix, qsolve
from .solve import LinearSystem, TruncationWindow, truncated_solve


def sort_with_sign(idx):
    """Sort an index tuple, returning (sign, sorted) or (0, None) on repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    # insertion sort counting transpositions
    for a in range(1, len(idx)):
        b = a
        while b > 0 and idx[b - 1] > idx[b]:
            idx[b - 1], idx[b] = idx[b], idx[b - 1]
            sign = -sign
            b -= 1
    return sign, tuple(idx)


class Cochain:
    """Alternating B-multilinear map from Λ^p L to W = B^r, stored on increasing tuples."""

    __slots__ = ("algebra", "degree", "rank", "values")

    def __init__(self, algebra: LieRinehart, degree: int, values=None, rank: int = 1):
        ring = algebra.ring
        self.algebra = algebra
        self.degree = degree
        self.rank = rank
        vals = {}
        for key, v in (values or {}).items():
            key = (key,) if isinstance(key, int) else tuple(key)
            if len(key) != degree:
                raise DomainError(f"cochain key {key} does not have degree {degree}")
            if any(not (0 <= k < algebra.rank) for k in key):
                raise DomainError(f"cochain key {key} out of range")
            if not isinstance(v, (tuple, list)):
                v = (v,)
            v = tuple(ring.coerce(x) for x in v)
            if len(v) != rank:
                raise RankMismatch(f"cochain value needs {rank} components")
            sign, skey = sort_with_sign(key)
            if sign == 0:
                if any(v):
                    raise DomainError(f"alternating cochain cannot be nonzero on repeated key {key}")
                continue
            if skey in vals:
                raise DomainError(f"duplicate cochain key {skey}")
            if any(v):
                vals[skey] = v if sign > 0 else tuple(-x for x in v)
        self.values = vals

    @classmethod
    def zero(cls, algebra, degree, rank=1):
        return cls(algebra, degree, {}, rank)

    @classmethod
    def constant(cls, algebra, w):
        """A 0-cochain, i.e. an element of W."""
        w = tuple(w) if isinstance(w, (tuple, list)) else (w,)
        return cls(algebra, 0, {(): w}, len(w))

    def _zero_value(self):
        return tuple(self.algebra.ring.zero for _ in range(self.rank))

    def value(self, idx):
        sign, key = sort_with_sign(idx)
        if sign == 0:
            return self._zero_value()
        v = self.values.get(key)
        if v is None:
            return self._zero_value()
        return v if sign > 0 else tuple(-x for x in v)

    def scalar(self, idx):
        """Value of a B-valued (rank 1) cochain."""
        return self.value(idx)[0]

    def evaluate(self, *elems: LElem):
        """Multilinear alternating extension to arbitrary elements of L."""
        if len(elems) != self.degree:
            raise DomainError(f"cochain of degree {self.degree} needs {self.degree} arguments")
        ring = self.algebra.ring
        acc = [ring.zero] * self.rank
        for idx in product(range(self.algebra.rank), repeat=self.degree):
            coeff = ring.one
            for e, i in zip(elems, idx):
                coeff = coeff * e.coords[i]
                if not coeff:
                    break
            if not coeff:
                continue
            v = self.value(idx)
            for s in range(self.rank):
                if v[s]:
                    acc[s] = acc[s] + coeff * v[s]
        return tuple(acc)

    def _compatible(self, other):
        if other.algebra is not self.algebra or other.degree != self.degree or other.rank != self.rank:
            raise RankMismatch("cochains differ in algebra, degree or rank")

    def __add__(self, other):
        self._compatible(other)
        keys = set(self.values) | set(other.values)
        return Cochain(
            self.algebra,
            self.degree,
            {k: tuple(a + b for a, b in zip(self.value(k), other.value(k))) for k in keys},
            self.rank,
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Cochain(self.algebra, self.degree, {k: tuple(-x for x in v) for k, v in self.values.items()}, self.rank)

    def scale(self, b):
        b = self.algebra.ring.coerce(b)
        return Cochain(self.algebra, self.degree, {k: tuple(b * x for x in v) for k, v in self.values.items()}, self.rank)

    def __eq__(self, other):
        return (
            isinstance(other, Cochain)
            and other.algebra is self.algebra
            and other.degree == self.degree
            and other.rank == self.rank
            and other.values == self.values
        )

    def __bool__(self):
        return bool(self.values)

    def items(self):
        return sorted(self.values.items())

    def __repr__(self):
        if not self.values:
            return f"Cochain(p={self.degree}, 0)"
        parts = []
        for k, v in self.items():
            name = "(" + ",".join(f"e{i + 1}" for i in k) + ")"
            val = str(v[0]) if self.rank == 1 else "(" + ", ".join(str(x) for x in v) + ")"
            parts.append(f"{name}: {val}")
        return f"Cochain(p={self.degree}, " + "; ".join(parts) + ")"


class Connection:
    """∇(e_i)(w) = α(e_i)(w) entrywise + Γ_i·w on the free module W = B^r."""

    def __init__(self, algebra: LieRinehart, gamma, rank=None, name=None):
        ring = algebra.ring
        gamma = list(gamma)
        if len(gamma) != algebra.rank:
            raise RankMismatch(f"connection needs {algebra.rank} Christoffel matrices")
        if rank is None:
            rank = len(gamma[0]) if gamma else 1
        mats = []
        for g in gamma:
            g = M.mat(ring, g)
            if len(g) != rank or any(len(row) != rank for row in g):
                raise RankMismatch(f"Christoffel matrix must be {rank}x{rank}")
            mats.append(g)
        self.algebra = algebra
        self.rank = rank
        self.gamma = tuple(mats)
        self.name = name

    @classmethod
    def trivial(cls, algebra, rank=1):
        """The anchor action of L on B^r (all Christoffel matrices zero)."""
        return cls(algebra, [M.zeros(algebra.ring, rank)] * algebra.rank, rank)

    def apply(self, i, w):
        a = self.algebra.anchor[i]
        g = self.gamma[i]
        out = []
        for row, wk in zip(g, w):
            acc = a(wk)
            for x, y in zip(row, w):
                if x and y:
                    acc = acc + x * y
            out.append(acc)
        return tuple(out)

    def apply_elem(self, u: LElem, w):
        ring = self.algebra.ring
        acc = [ring.zero] * self.rank
        for i, a in enumerate(u.coords):
            if a:
                t = self.apply(i, w)
                acc = [x + a * y for x, y in zip(acc, t)]
        return tuple(acc)

    def gamma_of(self, coords):
        out = M.zeros(self.algebra.ring, self.rank)
        for a, g in zip(coords, self.gamma):
            if a:
                out = M.add(out, M.scale(a, g))
        return out

    def __eq__(self, other):
        return isinstance(other, Connection) and other.algebra is self.algebra and other.gamma == self.gamma

    def __repr__(self):
        return f"Connection(rank={self.rank}, gamma={[M.fmt(g) for g in self.gamma]})"


class CurvatureForm:
    def __init__(self, algebra, rank, values):
        self.algebra = algebra
        self.rank = rank
        self.values = values  # (i, j) with i < j -> r x r matrix

    def at(self, i, j):
        ring = self.algebra.ring
        if i == j:
            return M.zeros(ring, self.rank)
        if i < j:
            return self.values[(i, j)]
        return M.scale(-1, self.values[(j, i)])

    def evaluate(self, u: LElem, v: LElem):
        out = M.zeros(self.algebra.ring, self.rank)
        for i, a in enumerate(u.coords):
            for j, b in enumerate(v.coords):
                if a and b and i != j:
                    out = M.add(out, M.scale(a * b, self.at(i, j)))
        return out

    def is_zero(self):
        return all(M.is_zero(m) for m in self.values.values())

    def trace(self) -> Cochain:
        return Cochain(self.algebra, 2, {k: M.trace(m) for k, m in self.values.items()})


def lr_differential(conn: Connection, phi: Cochain) -> Cochain:
    lr = conn.algebra
    if phi.algebra is not lr:
        raise RankMismatch("cochain and connection live on different algebras")
    if phi.rank != conn.rank:
        raise RankMismatch(f"cochain rank {phi.rank} vs connection rank {conn.rank}")
    ring = lr.ring
    r = conn.rank
    p = phi.degree
    out = {}
    for idx in combinations(range(lr.rank), p + 1):
        acc = [ring.zero] * r
        for k, ik in enumerate(idx):
            v = phi.value(idx[:k] + idx[k + 1:])
            if any(v):
                t = conn.apply(ik, v)
                if k % 2:
                    acc = [x - y for x, y in zip(acc, t)]
                else:
                    acc = [x + y for x, y in zip(acc, t)]
        for a in range(p + 1):
            for b in range(a + 1, p + 1):
                c = lr.basis_bracket(idx[a], idx[b])
                rest = idx[:a] + idx[a + 1:b] + idx[b + 1:]
                sign = -1 if (a + b) % 2 else 1
                for m, cm in enumerate(c):
                    if cm:
                        v = phi.value((m,) + rest)
                        if any(v):
                            acc = [x + sign * cm * y for x, y in zip(acc, v)]
        if any(acc):
            out[idx] = tuple(acc)
    return Cochain(lr, p + 1, out, r)


def curvature(conn: Connection) -> CurvatureForm:
    lr = conn.algebra
    vals = {}
    for i, j in combinations(range(lr.rank), 2):
        gi, gj = conn.gamma[i], conn.gamma[j]
        R = M.sub(M.apply_entrywise(lr.anchor[i], gj), M.apply_entrywise(lr.anchor[j], gi))
        R = M.add(R, M.commutator(gi, gj))
        R = M.sub(R, conn.gamma_of(lr.basis_bracket(i, j)))
        vals[(i, j)] = R
    return CurvatureForm(lr, conn.rank, vals)


@dataclass
class CocycleCheck:
    ok: bool
    triple: tuple | None = None  # 1-based
    value: object = None

    def __bool__(self):
        return self.ok


def is_cocycle(lr: LieRinehart, f: Cochain) -> CocycleCheck:
    if f.degree != 2 or f.rank != 1:
        raise DomainError("is_cocycle expects a B-valued 2-cochain")
    df = lr_differential(Connection.trivial(lr), f)
    for key, v in df.items():
        return CocycleCheck(False, tuple(i + 1 for i in key), v[0])
    return CocycleCheck(True)


def require_cocycle(lr, f, what="f"):
    chk = is_cocycle(lr, f)
    if not chk:
        raise NotACocycle(f"{what} is not a cocycle: d2 {what} on {chk.triple} = {chk.value}", chk.triple, chk.value)


@dataclass
class CoboundaryResult:
    rho: Cochain | None
    window: TruncationWindow

    @property
    def found(self):
        return self.rho is not None

    def describe(self):
        if self.rho is None:
            return f"NoSolutionInWindow: no primitive with exponents within degree {self.window.degree}"
        return f"rho = {self.rho!r}"


def _d1_system(lr, target: Cochain):
    ring = lr.ring
    conn = Connection.trivial(lr)
    pairs = list(combinations(range(lr.rank), 2))

    def apply(unknowns):
        rho = Cochain(lr, 1, {(i,): u for i, u in enumerate(unknowns)})
        d = lr_differential(conn, rho)
        return [d.scalar(pq) for pq in pairs]

    rhs = [target.scalar(pq) for pq in pairs]
    return LinearSystem(ring, lr.rank, apply, rhs)


def coboundary_solve(lr: LieRinehart, f: Cochain, window) -> CoboundaryResult:
    """Search for rho in C^1(L, B) with d1 rho = f, unknowns supported on the window."""
    if isinstance(window, int):
        window = TruncationWindow(window)
    require_cocycle(lr, f)
    sol = truncated_solve(_d1_system(lr, f), window)
    if not sol.found:
        return CoboundaryResult(None, window)
    rho = Cochain(lr, 1, {(i,): u for i, u in enumerate(sol.witness)})
    if lr_differential(Connection.trivial(lr), rho) != f:
        raise ArithmeticError("coboundary witness failed verification")
    return CoboundaryResult(rho, window)


def classes_equal(lr, f, g, window) -> CoboundaryResult:
    """Window-relative test of [f] = [g] in H^2(L, B)."""
    return coboundary_solve(lr, f - g, window)


def _basis_index(lr, p, r):
    return [(I, s) for I in combinations(range(lr.rank), p) for s in range(r)]


def differential_matrix(conn: Connection, p: int) -> QMatrix:
    """Matrix of d^p : C^p -> C^{p+1} in the standard bases (field case only)."""
    lr = conn.algebra
    ring = lr.ring
    r = conn.rank
    src = _basis_index(lr, p, r)
    dst = _basis_index(lr, p + 1, r)
    row_of = {k: i for i, k in enumerate(dst)}
    mat = QMatrix(len(dst), len(src))
    for j, (I, s) in enumerate(src):
        unit = tuple(ring.one if t == s else ring.zero for t in range(r))
        d = lr_differential(conn, Cochain(lr, p, {I: unit}, r))
        for J, v in d.values.items():
            for t, x in enumerate(v):
                if x:
                    if not x.is_constant():
                        raise NotFieldCase("differential has non-constant entries")
                    mat[row_of[(J, t)], j] = x.constant_coefficient()
    return mat


def _require_field_flat(conn):
    lr = conn.algebra
    if not lr.ring.is_field:
        raise NotFieldCase(f"cohomology dimensions need B = Q, got {lr.ring}")
    if not curvature(conn).is_zero():
        raise NotFlat("connection is not flat")


def field_case_cohomology(conn: Connection):
    """dim H^p(L, W) for p = 0..l when B = Q and the connection is flat."""
    _require_field_flat(conn)
    lr = conn.algebra
    l, r = lr.rank, conn.rank
    ranks = [qsolve(differential_matrix(conn, p)).rank if p < l else 0 for p in range(l + 1)]
    dims = []
    for p in range(l + 1):
        dim_c = len(_basis_index(lr, p, r))
        dims.append(dim_c - ranks[p] - (ranks[p - 1] if p > 0 else 0))
    return dims


@dataclass
class Z1Result:
    field_case: bool
    basis: list  # list of Cochain(1): exact basis (field case) or window-supported kernel basis
    window: TruncationWindow | None = None

    @property
    def dimension(self):
        return len(self.basis)


def is_in_z1(lr: LieRinehart, h: Cochain) -> bool:
    return not lr_differential(Connection.trivial(lr), h)


def z1_solve(lr: LieRinehart, window=None) -> Z1Result:
    if lr.ring.is_field:
        conn = Connection.trivial(lr)
        sol = qsolve(differential_matrix(conn, 1))
        basis = []
        for v in sol.kernel:
            basis.append(Cochain(lr, 1, {(i,): lr.ring.const(x) for i, x in enumerate(v)}))
        return Z1Result(True, basis)
    if window is None:
        raise DomainError("Z1 over a polynomial ring needs a truncation window")
    if isinstance(window, int):
        window = TruncationWindow(window)
    sol = truncated_solve(_d1_system(lr, Cochain.zero(lr, 2)), window)
    basis = [Cochain(lr, 1, {(i,): u for i, u in enumerate(vec)}) for vec in sol.kernel]
    return Z1Result(False, basis, window)

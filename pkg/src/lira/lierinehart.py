"""Lie-Rinehart algebras on a free B-module with a chosen basis e_1..e_l."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import AlgebraMismatch, DomainError
from .ring import BaseRing, Derivation


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)
    failures: list = field(default_factory=list)  # (kind, indices, value) for programmatic use

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def lines(self):
        out = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            out.append(f"{status}  {c.name}" + (f"  {c.detail}" if c.detail else ""))
        return out


class LieRinehart:
    """Rank-l free B-module L with anchor and bracket structure constants.

    ``structure`` maps 0-based pairs (i, j), i < j, to the coordinates of
    [e_i, e_j]; missing pairs are zero.  Indices are 0-based internally and
    1-based in every report.
    """

    def __init__(self, ring: BaseRing, rank: int, anchor, structure=None, name=None):
        self.ring = ring
        self.rank = rank
        self.name = name
        anchor = list(anchor)
        if len(anchor) != rank:
            raise DomainError(f"anchor needs {rank} derivations, got {len(anchor)}")
        self.anchor = tuple(a if isinstance(a, Derivation) else Derivation(ring, a) for a in anchor)
        for a in self.anchor:
            if a.ring != ring:
                raise DomainError("anchor derivation over a different ring")
        zero = tuple(ring.zero for _ in range(rank))
        self._bracket = {}
        for (i, j), coords in (structure or {}).items():
            if not (0 <= i < j < rank):
                raise DomainError(f"bracket key ({i + 1}, {j + 1}) must satisfy i < j")
            coords = tuple(ring.coerce(c) for c in coords)
            if len(coords) != rank:
                raise DomainError(f"bracket [e{i + 1}, e{j + 1}] needs {rank} coordinates")
            if any(coords):
                self._bracket[(i, j)] = coords
        self._zero = zero

    def __repr__(self):
        return f"LieRinehart(rank={self.rank}, ring={self.ring})"

    def basis_bracket(self, i, j):
        """Coordinates of [e_i, e_j] for any 0-based i, j."""
        if i == j:
            return self._zero
        if i < j:
            return self._bracket.get((i, j), self._zero)
        c = self._bracket.get((j, i))
        if c is None:
            return self._zero
        return tuple(-x for x in c)

    def structure_items(self):
        return sorted(self._bracket.items())

    def elem(self, coords):
        return LElem(self, coords)

    def basis(self, i):
        return LElem(self, [self.ring.one if k == i else self.ring.zero for k in range(self.rank)])

    def zero_elem(self):
        return LElem(self, self._zero)

    def anchor_of(self, u: "LElem") -> Derivation:
        acc = Derivation.zero(self.ring)
        for a, d in zip(u.coords, self.anchor):
            if a:
                acc = acc + d.scale(a)
        return acc


class LElem:
    __slots__ = ("algebra", "coords")

    def __init__(self, algebra: LieRinehart, coords):
        coords = tuple(algebra.ring.coerce(c) for c in coords)
        if len(coords) != algebra.rank:
            raise DomainError(f"element needs {algebra.rank} coordinates")
        self.algebra = algebra
        self.coords = coords

    def _check(self, other):
        if not isinstance(other, LElem) or other.algebra is not self.algebra:
            raise AlgebraMismatch("elements of different Lie-Rinehart algebras")

    def __add__(self, other):
        self._check(other)
        return LElem(self.algebra, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        self._check(other)
        return LElem(self.algebra, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self):
        return LElem(self.algebra, [-a for a in self.coords])

    def scale(self, b):
        b = self.algebra.ring.coerce(b)
        return LElem(self.algebra, [b * a for a in self.coords])

    def __eq__(self, other):
        return isinstance(other, LElem) and other.algebra is self.algebra and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __bool__(self):
        return any(self.coords)

    def __repr__(self):
        parts = [f"({c})*e{i + 1}" for i, c in enumerate(self.coords) if c]
        return " + ".join(parts) or "0"


def bracket(lr: LieRinehart, u: LElem, v: LElem) -> LElem:
    """Leibniz-extended bracket of arbitrary elements."""
    if u.algebra is not lr or v.algebra is not lr:
        raise AlgebraMismatch("bracket of elements from a different algebra")
    ring = lr.ring
    out = [ring.zero] * lr.rank
    for i, a in enumerate(u.coords):
        if not a:
            continue
        for j, b in enumerate(v.coords):
            if not b or i == j:
                continue
            ab = a * b
            for k, c in enumerate(lr.basis_bracket(i, j)):
                if c:
                    out[k] = out[k] + ab * c
    du = lr.anchor_of(u)
    dv = lr.anchor_of(v)
    for j, b in enumerate(v.coords):
        if b:
            out[j] = out[j] + du(b)
    for i, a in enumerate(u.coords):
        if a:
            out[i] = out[i] - dv(a)
    return LElem(lr, out)


def jacobiator(lr: LieRinehart, u: LElem, v: LElem, w: LElem) -> LElem:
    return (
        bracket(lr, bracket(lr, u, v), w)
        + bracket(lr, bracket(lr, v, w), u)
        + bracket(lr, bracket(lr, w, u), v)
    )


def lr_validate(lr: LieRinehart) -> ValidationReport:
    report = ValidationReport()
    l = lr.rank

    bad = [i + 1 for i, a in enumerate(lr.anchor) if not a.is_admissible()]
    for i in bad:
        report.failures.append(("admissible", (i,), None))
    report.checks.append(
        Check(
            "anchor derivations preserve the relation",
            not bad,
            "" if not bad else "fails for " + ", ".join(f"e{i}" for i in bad),
        )
    )

    anchor_fail = None
    for i in range(l):
        for j in range(i + 1, l):
            lhs = lr.anchor_of(LElem(lr, lr.basis_bracket(i, j)))
            rhs = lr.anchor[i].commutator(lr.anchor[j])
            if lhs != rhs:
                diff = lhs - rhs
                report.failures.append(("anchor", (i + 1, j + 1), diff))
                if anchor_fail is None:
                    anchor_fail = (i + 1, j + 1, diff)
    report.checks.append(
        Check(
            "anchor is a Lie morphism",
            anchor_fail is None,
            "" if anchor_fail is None else f"pair ({anchor_fail[0]},{anchor_fail[1]}): defect {anchor_fail[2]!r}",
        )
    )

    jac_fail = None
    basis = [lr.basis(i) for i in range(l)]
    for i in range(l):
        for j in range(i + 1, l):
            for k in range(j + 1, l):
                J = jacobiator(lr, basis[i], basis[j], basis[k])
                if J:
                    report.failures.append(("jacobi", (i + 1, j + 1, k + 1), J))
                    if jac_fail is None:
                        jac_fail = (i + 1, j + 1, k + 1, J)
    report.checks.append(
        Check(
            "Jacobi identity on basis triples",
            jac_fail is None,
            "" if jac_fail is None else f"triple ({jac_fail[0]},{jac_fail[1]},{jac_fail[2]}): {jac_fail[3]!r}",
        )
    )
    return report

"""Linear problems over B made finite by a degree window on the unknowns."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import DimensionMismatch
from .linalg import QMatrix, qsolve
from .ring import BaseRing, Poly, grlex_key


@dataclass(frozen=True)
class TruncationWindow:
    """Exponent box [0, D] per variable, [-D, D] for Laurent variables."""

    degree: int

    def __post_init__(self):
        if not isinstance(self.degree, int) or self.degree < 0:
            raise ValueError("window degree must be a nonnegative integer")

    def monomials(self, ring: BaseRing):
        return ring.window_monomials(self.degree)


@dataclass
class LinearSystem:
    """``apply(unknowns) == rhs`` where ``apply`` is Q-linear in the unknowns.

    ``apply`` takes a list of ``n_unknowns`` Polys and returns a list of
    ``len(rhs)`` Polys.  Derivations and multiplications by fixed ring
    elements are all fine; only Q-linearity is assumed.
    """

    ring: BaseRing
    n_unknowns: int
    apply: Callable[[Sequence[Poly]], Sequence[Poly]]
    rhs: Sequence[Poly]


@dataclass
class TruncatedSolution:
    witness: list | None  # list of Polys, or None for NoSolutionInWindow
    kernel: list = field(default_factory=list)  # window-supported homogeneous solutions
    window: TruncationWindow | None = None
    rank: int = 0

    @property
    def found(self):
        return self.witness is not None


def truncated_solve(system: LinearSystem, window: TruncationWindow) -> TruncatedSolution:
    ring = system.ring
    m = system.n_unknowns
    rhs = [ring.coerce(r) for r in system.rhs]
    mons = window.monomials(ring)
    zero = [ring.zero] * m

    # later unknowns get earlier columns, so pivots (and particular solutions)
    # prefer them; within an unknown, low-degree monomials come first
    order = [(u, e) for u in reversed(range(m)) for e in mons]
    columns = []
    for u, e in order:
        arg = list(zero)
        arg[u] = ring.monomial(e)
        out = list(system.apply(arg))
        if len(out) != len(rhs):
            raise DimensionMismatch(f"system produced {len(out)} equations, rhs has {len(rhs)}")
        columns.append(out)
    base = list(system.apply(zero))
    if any(base):
        raise ValueError("system map is not linear: apply(0) != 0")

    # row index: (equation, monomial) pairs that occur anywhere
    row_keys = set()
    for out in columns:
        for q, p in enumerate(out):
            for e in p.terms:
                row_keys.add((q, e))
    for q, p in enumerate(rhs):
        for e in p.terms:
            row_keys.add((q, e))
    row_keys = sorted(row_keys, key=lambda k: (k[0], grlex_key(k[1])))
    row_of = {k: i for i, k in enumerate(row_keys)}

    mat = QMatrix(len(row_keys), len(columns))
    for j, out in enumerate(columns):
        for q, p in enumerate(out):
            for e, c in p.terms.items():
                mat.data[row_of[(q, e)]][j] = c
    b = [0] * len(row_keys)
    for q, p in enumerate(rhs):
        for e, c in p.terms.items():
            b[row_of[(q, e)]] = c
    sol = qsolve(mat, [b])

    def unpack(vec):
        terms = [dict() for _ in range(m)]
        for (u, e), c in zip(order, vec):
            if c:
                terms[u][e] = c
        return [Poly(ring, t) for t in terms]

    kernel = [unpack(v) for v in sol.kernel]
    x = sol.particular[0]
    if x is None:
        return TruncatedSolution(None, kernel, window, sol.rank)
    witness = unpack(x)
    check = list(system.apply(witness))
    if check != rhs:
        raise ArithmeticError("truncated_solve witness failed substitution check")
    return TruncatedSolution(witness, kernel, window, sol.rank)

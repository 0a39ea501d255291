"""Exact (Laurent) polynomial rings over Q with at most one defining relation.

Elements are sparse maps ``exponent vector -> Fraction``.  Terms are kept in
normal form with respect to the relation (if any), reduced by single-divisor
division under graded-lex order, which makes equality of ring elements plain
equality of term dictionaries.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import product as _cartesian

from .errors import DomainError, LiraSyntaxError, RingMismatch
from .expr import GENERATOR_RE, evaluate, parse_expr

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def grlex_key(exp):
    return (sum(exp), exp)


def format_rational(c: Fraction) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _add_into(acc, key, c):
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


class BaseRing:
    """Q[x_1..x_n], optionally Laurent in some variables, modulo at most one relation."""

    def __init__(self, names=(), laurent=(), relation=None):
        names = tuple(names)
        for nm in names:
            if not _NAME_RE.match(nm):
                raise DomainError(f"invalid variable name {nm!r}")
            if GENERATOR_RE.match(nm):
                raise DomainError(f"variable name {nm!r} clashes with generator syntax")
        if len(set(names)) != len(names):
            raise DomainError("variable names must be distinct")
        self.names = names
        self.n = len(names)
        flags = tuple(laurent)
        if flags and all(isinstance(f, bool) for f in flags):
            if len(flags) != self.n:
                raise DomainError("laurent flag count does not match variable count")
        else:
            for nm in flags:
                if nm not in names:
                    raise DomainError(f"laurent variable {nm!r} is not a ring variable")
            flags = tuple(nm in flags for nm in names)
        self.laurent = flags or (False,) * self.n
        self._index = {nm: i for i, nm in enumerate(names)}
        self.relation = None
        self._lead = None
        self._free = None
        if relation is not None:
            self._set_relation(relation)
        rel_key = None if self.relation is None else tuple(sorted(self.relation.terms.items()))
        self._key = (self.names, self.laurent, rel_key)
        self._hash = hash(self._key)

    def _set_relation(self, relation):
        free = self._free = BaseRing(self.names, self.laurent)
        if isinstance(relation, str):
            g = free.parse(relation)
        elif isinstance(relation, Poly):
            g = free.coerce(relation)
        else:
            g = Poly(free, relation)
        if not g:
            raise DomainError("defining relation must be nonzero")
        lead = max(g.terms, key=grlex_key)
        if all(k == 0 for k in lead):
            raise DomainError("defining relation is a nonzero constant")
        for i, k in enumerate(lead):
            if k != 0 and self.laurent[i]:
                raise DomainError("leading monomial of the relation involves a Laurent variable")
        if any(self.laurent):
            # division terminates only if every tail term drops the polynomial degree
            def pdeg(e):
                return sum(k for k, lf in zip(e, self.laurent) if not lf)
            for e in g.terms:
                if e != lead and pdeg(e) >= pdeg(lead):
                    raise DomainError("relation tail must have lower degree in the non-Laurent variables")
        lc = g.terms[lead]
        g = g * (1 / lc)
        self.relation = g
        self._lead = lead
        self._tail = {e: c for e, c in g.terms.items() if e != lead}

    # -- identity -------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, BaseRing) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        parts = []
        for nm, lf in zip(self.names, self.laurent):
            parts.append(nm + ("^±" if lf else ""))
        s = "Q[" + ", ".join(parts) + "]"
        if self.relation is not None:
            s += f"/({self.relation})"
        return s

    @property
    def is_field(self):
        """True when B = Q (no variables)."""
        return self.n == 0

    def free(self):
        if self.relation is None:
            return self
        if self._free is None:
            self._free = BaseRing(self.names, self.laurent)
        return self._free

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise DomainError(f"unknown variable {name!r}") from None

    # -- element construction --------------------------------------------
    @property
    def zero(self):
        return Poly._raw(self, {})

    @property
    def one(self):
        return Poly._raw(self, {(0,) * self.n: Fraction(1)})

    def const(self, c):
        c = Fraction(c)
        return Poly._raw(self, {(0,) * self.n: c} if c else {})

    def var(self, which):
        i = self.index(which) if isinstance(which, str) else which
        e = [0] * self.n
        e[i] = 1
        return self.monomial(tuple(e))

    def gens(self):
        return [self.var(i) for i in range(self.n)]

    def monomial(self, exp, coeff=1):
        return Poly(self, {tuple(exp): Fraction(coeff)})

    def coerce(self, x):
        if isinstance(x, Poly):
            if x.ring == self:
                return x
            if x.ring.names == self.names and x.ring.laurent == self.laurent:
                return Poly(self, x.terms)
            raise RingMismatch(f"cannot coerce element of {x.ring} into {self}")
        if isinstance(x, (int, Fraction)):
            return self.const(x)
        if isinstance(x, str):
            return self.parse(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into a ring element")

    __call__ = coerce

    def parse(self, text: str):
        return evaluate(parse_expr(text), _PolyContext(self))

    # -- normal forms ----------------------------------------------------
    def is_standard(self, exp):
        """True if the monomial is not divisible by the relation's leading monomial."""
        if self._lead is None:
            return True
        return any(k < lk for k, lk in zip(exp, self._lead) if lk)

    def reduce_terms(self, terms):
        if self._lead is None:
            return terms
        lead, tail = self._lead, self._tail
        terms = dict(terms)
        while True:
            reducible = [e for e in terms if not self.is_standard(e)]
            if not reducible:
                return terms
            e = max(reducible, key=grlex_key)
            c = terms.pop(e)
            shift = tuple(a - b for a, b in zip(e, lead))
            for t, tc in tail.items():
                _add_into(terms, tuple(a + b for a, b in zip(shift, t)), -c * tc)

    def window_monomials(self, degree):
        """Standard monomials with each exponent in [0, D] (or [-D, D] if Laurent)."""
        ranges = [range(-degree, degree + 1) if lf else range(degree + 1) for lf in self.laurent]
        mons = [e for e in _cartesian(*ranges) if self.is_standard(e)]
        mons.sort(key=grlex_key)
        return mons


class _PolyContext:
    def __init__(self, ring):
        self.ring = ring

    def num(self, c):
        return self.ring.const(c)

    def var(self, name, col):
        if name not in self.ring._index:
            raise DomainError(f"unknown variable {name!r} at col {col}")
        return self.ring.var(name)

    def gen(self, index, col):
        raise DomainError(f"generator e{index} is not allowed in a ring expression (col {col})")

    def neg(self, a):
        return -a

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def pow(self, node, base, k, col):
        if k < 0:
            if node[0] != "var" or not self.ring.laurent[self.ring.index(node[1])]:
                raise DomainError(f"negative exponent on a non-Laurent factor (col {col})")
            i = self.ring.index(node[1])
            e = [0] * self.ring.n
            e[i] = k
            return self.ring.monomial(tuple(e))
        return base ** k


class Poly:
    """An element of a BaseRing.  Treat instances as immutable."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: BaseRing, terms=None):
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != ring.n:
                raise DomainError(f"exponent vector {e} has wrong length for {ring}")
            for k, lf in zip(e, ring.laurent):
                if k < 0 and not lf:
                    raise DomainError(f"negative exponent in {e} on a non-Laurent variable")
            c = Fraction(c)
            if c:
                _add_into(clean, e, c)
        self.ring = ring
        self.terms = ring.reduce_terms(clean)
        self._hash = None

    @classmethod
    def _raw(cls, ring, terms):
        p = cls.__new__(cls)
        p.ring = ring
        p.terms = terms
        p._hash = None
        return p

    # -- coercion helpers --------------------------------------------------
    def _other(self, other):
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            _add_into(out, e, c)
        return Poly._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            _add_into(out, e, -c)
        return Poly._raw(self.ring, out)

    def __rsub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return self.ring.zero
            return Poly._raw(self.ring, {e: c * other for e, c in self.terms.items()})
        other = self._other(other)
        if other is NotImplemented:
            return other
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                _add_into(out, tuple(a + b for a, b in zip(e1, e2)), c1 * c2)
        return Poly._raw(self.ring, self.ring.reduce_terms(out))

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if len(self.terms) == 1:
                (e, c), = self.terms.items()
                if all(lf or x == 0 for x, lf in zip(e, self.ring.laurent)):
                    inv = Poly._raw(self.ring, {tuple(-x for x in e): 1 / c})
                    return inv ** (-k)
            raise DomainError("only Laurent monomials can be raised to negative powers")
        result = self.ring.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    # -- comparison ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # -- inspection ----------------------------------------------------------
    def sorted_terms(self):
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_term(self):
        if not self.terms:
            return None
        e = max(self.terms, key=grlex_key)
        return e, self.terms[e]

    def degree(self):
        if not self.terms:
            return None
        return max(sum(e) for e in self.terms)

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_coefficient(self):
        return self.terms.get((0,) * self.ring.n, Fraction(0))

    def coefficient(self, exp):
        return self.terms.get(tuple(exp), Fraction(0))

    def diff(self, i):
        """Partial derivative in variable i (normal forms stay normal)."""
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * k
        return Poly._raw(self.ring, out)

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for idx, (e, c) in enumerate(self.sorted_terms()):
            mono = "*".join(nm if k == 1 else f"{nm}^{k}" for nm, k in zip(self.ring.names, e) if k)
            a = abs(c)
            if not mono:
                body = format_rational(a)
            elif a == 1:
                body = mono
            else:
                body = f"{format_rational(a)}*{mono}"
            if idx == 0:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out)


class Derivation:
    """Sum_i coeffs[i] * d/dx_i acting on a BaseRing."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: BaseRing, coeffs):
        coeffs = tuple(ring.coerce(c) for c in coeffs)
        if len(coeffs) != ring.n:
            raise DomainError(f"derivation needs {ring.n} coefficients, got {len(coeffs)}")
        self.ring = ring
        self.coeffs = coeffs

    @classmethod
    def zero(cls, ring):
        return cls(ring, [ring.zero] * ring.n)

    @classmethod
    def partial(cls, ring, i):
        return cls(ring, [ring.one if j == i else ring.zero for j in range(ring.n)])

    def __call__(self, b):
        return derivation_apply(self, b)

    def is_admissible(self):
        """True if the derivation maps the defining ideal into itself."""
        g = self.ring.relation
        if g is None:
            return True
        acc = self.ring.zero
        for i, c in enumerate(self.coeffs):
            acc = acc + c * self.ring.coerce(g.diff(i))
        return not acc

    def __add__(self, other):
        return Derivation(self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        return Derivation(self.ring, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return Derivation(self.ring, [-a for a in self.coeffs])

    def scale(self, b):
        b = self.ring.coerce(b)
        return Derivation(self.ring, [b * a for a in self.coeffs])

    def commutator(self, other):
        """[self, other] = self∘other − other∘self, again a derivation."""
        return Derivation(
            self.ring,
            [self(b) - other(a) for a, b in zip(self.coeffs, other.coeffs)],
        )

    def __eq__(self, other):
        return isinstance(other, Derivation) and self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring, self.coeffs))

    def __repr__(self):
        parts = [f"({c})*d/d{nm}" for c, nm in zip(self.coeffs, self.ring.names) if c]
        return "Derivation(" + (" + ".join(parts) or "0") + ")"


def poly_parse(ring: BaseRing, text: str) -> Poly:
    return ring.parse(text)


def derivation_apply(d: Derivation, b: Poly) -> Poly:
    if isinstance(b, (int, Fraction)):
        return d.ring.zero
    if b.ring != d.ring:
        raise RingMismatch(f"{d.ring} vs {b.ring}")
    acc = {}
    for i, c in enumerate(d.coeffs):
        if not c:
            continue
        db = b.diff(i)
        if not db:
            continue
        for e1, c1 in c.terms.items():
            for e2, c2 in db.terms.items():
                _add_into(acc, tuple(x + y for x, y in zip(e1, e2)), c1 * c2)
    return Poly._raw(d.ring, d.ring.reduce_terms(acc))


__all__ = [
    "BaseRing",
    "Poly",
    "Derivation",
    "poly_parse",
    "derivation_apply",
    "format_rational",
    "grlex_key",
    "LiraSyntaxError",
]

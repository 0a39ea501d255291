"""Shared builders, random instance generators and independent oracles for the tests."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from hypothesis import strategies as st

from lira import matrix as M
from lira.cochain import Cochain, Connection
from lira.lierinehart import LieRinehart
from lira.ring import BaseRing, Derivation, Poly


def coordinate_algebra(n):
    """Q[x1..xn] with the coordinate vector fields as an abelian basis."""
    names = ["x", "y", "z", "w"][:n] if n <= 4 else [f"x{i + 1}" for i in range(n)]
    ring = BaseRing(names)
    return LieRinehart(ring, n, [Derivation.partial(ring, i) for i in range(n)])


def affine_line_algebra():
    """Q[x] with e1 = d/dx, e2 = x d/dx, [e1, e2] = e1."""
    ring = BaseRing(["x"])
    x = ring.var("x")
    return LieRinehart(ring, 2, [Derivation(ring, [1]), Derivation(ring, [x])], {(0, 1): (1, 0)})


def field_algebra(rank, structure=None):
    q = BaseRing([])
    return LieRinehart(q, rank, [Derivation.zero(q)] * rank, structure or {})


def heis3():
    return field_algebra(3, {(0, 1): (0, 0, 1)})


def sl2():
    return field_algebra(3, {(0, 1): (0, 2, 0), (0, 2): (0, 0, -2), (1, 2): (1, 0, 0)})


# -- random instances --------------------------------------------------------------

def random_poly(rng: random.Random, ring: BaseRing, maxdeg=2, nterms=3, coeff=3):
    terms = {}
    for _ in range(rng.randint(0, nterms)):
        if ring.n:
            e = [0] * ring.n
            d = rng.randint(0, maxdeg)
            for _ in range(d):
                e[rng.randrange(ring.n)] += 1
            if any(ring.laurent):
                e = [k - rng.randint(0, 1) if lf else k for k, lf in zip(e, ring.laurent)]
        else:
            e = []
        c = Fraction(rng.randint(-coeff, coeff), rng.randint(1, 2))
        terms[tuple(e)] = terms.get(tuple(e), 0) + c
    return Poly(ring, terms)


def random_matrix(rng, ring, r, maxdeg=2):
    return [[random_poly(rng, ring, maxdeg) for _ in range(r)] for _ in range(r)]


def random_connection(rng, lr, r, maxdeg=2):
    return Connection(lr, [random_matrix(rng, lr.ring, r, maxdeg) for _ in range(lr.rank)], r)


def random_cochain(rng, lr, p, r=1, maxdeg=2):
    vals = {}
    for idx in combinations(range(lr.rank), p):
        vals[idx] = tuple(random_poly(rng, lr.ring, maxdeg) for _ in range(r))
    return Cochain(lr, p, vals, r)


def random_vector(rng, ring, r, maxdeg=2):
    return tuple(random_poly(rng, ring, maxdeg) for _ in range(r))


def poly_strategy(ring, maxdeg=3, max_terms=4):
    """Hypothesis strategy for Polys of a ring (Laurent exponents allowed where flagged)."""
    lo = [-maxdeg if lf else 0 for lf in ring.laurent]
    exps = st.tuples(*[st.integers(min_value=a, max_value=maxdeg) for a in lo])
    coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(lambda t: Poly(ring, t))


# -- independent oracles -------------------------------------------------------------

def dense_rank(rows):
    """Rank over Q of a dense list-of-lists matrix (plain Gaussian elimination)."""
    a = [[Fraction(x) for x in r] for r in rows]
    if not a:
        return 0
    rank = 0
    ncols = len(a[0])
    for c in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(len(a)):
            if i != rank and a[i][c] != 0:
                f = a[i][c] / a[rank][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def ce_cohomology_oracle(structure, n):
    """Chevalley-Eilenberg cohomology dims with trivial coefficients, built from the
    dual picture: d(e^k) = -sum_{i<j} c_ij^k e^i ^ e^j extended as a derivation."""
    def c(i, j, k):
        if i < j:
            return Fraction(structure.get((i, j), (0,) * n)[k])
        if i > j:
            return -Fraction(structure.get((j, i), (0,) * n)[k])
        return Fraction(0)

    def d_form(I):
        """d of the basis form e^I (I increasing) as dict J -> coeff."""
        out = {}
        for pos, k in enumerate(I):
            rest = I[:pos] + I[pos + 1:]
            for i in range(n):
                for j in range(i + 1, n):
                    coef = -c(i, j, k)
                    if not coef:
                        continue
                    # e^I = (-1)^pos e^k ^ e^rest, replace e^k by coef e^i^e^j
                    word = (i, j) + rest
                    if len(set(word)) != len(word):
                        continue
                    sign = perm_sign(word)
                    J = tuple(sorted(word))
                    out[J] = out.get(J, 0) + (-1) ** pos * coef * sign
        return out

    ranks = []
    for p in range(n + 1):
        src = list(combinations(range(n), p))
        dst = list(combinations(range(n), p + 1))
        rows = [[0] * len(src) for _ in dst]
        for col, I in enumerate(src):
            for J, v in d_form(I).items():
                rows[dst.index(J)][col] += v
        ranks.append(dense_rank(rows) if dst and src else 0)
    from math import comb

    return [comb(n, p) - ranks[p] - (ranks[p - 1] if p else 0) for p in range(n + 1)]


def perm_sign(seq):
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def apply_operator_word(word, poly, ops):
    """Apply a word of letters right to left; ops maps generator index -> function on Polys,
    coefficient letters multiply."""
    out = poly
    for letter in reversed(word):
        if isinstance(letter, int):
            out = ops[letter](out)
        else:
            out = letter * out
    return out


def apply_env(u, poly, ops):
    """Evaluate an EnvElem as a differential operator via a representation of the generators."""
    ring = poly.ring
    total = ring.zero
    for P, b in u.terms.items():
        v = poly
        seq = []
        for i, k in enumerate(P):
            seq.extend([i] * k)
        for i in reversed(seq):
            v = ops[i](v)
        total = total + b * v
    return total


def mat_eq(a, b):
    return M.sub(a, b) == M.zeros(a[0][0].ring, len(a)) if a else a == b

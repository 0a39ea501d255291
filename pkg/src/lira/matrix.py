"""Square and rectangular matrices of ring elements as tuples of tuples."""

from __future__ import annotations


def mat(ring, rows):
    return tuple(tuple(ring.coerce(x) for x in row) for row in rows)


def zeros(ring, r, c=None):
    c = r if c is None else c
    z = ring.zero
    return tuple(tuple(z for _ in range(c)) for _ in range(r))


def identity(ring, r):
    return tuple(tuple(ring.one if i == j else ring.zero for j in range(r)) for i in range(r))


def add(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def sub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def scale(c, a):
    return tuple(tuple(c * x for x in row) for row in a)


def mul(a, b):
    if not a:
        return ()
    cols = len(b[0]) if b else 0
    ring_zero = a[0][0].ring.zero if a[0] else None
    out = []
    for row in a:
        new = []
        for j in range(cols):
            acc = ring_zero
            for k, x in enumerate(row):
                if x:
                    y = b[k][j]
                    if y:
                        acc = acc + x * y
            new.append(acc)
        out.append(tuple(new))
    return tuple(out)


def commutator(a, b):
    return sub(mul(a, b), mul(b, a))


def matvec(a, v):
    out = []
    for row in a:
        acc = None
        for x, y in zip(row, v):
            t = x * y
            acc = t if acc is None else acc + t
        out.append(acc)
    return tuple(out)


def trace(a):
    acc = None
    for i, row in enumerate(a):
        acc = row[i] if acc is None else acc + row[i]
    return acc


def apply_entrywise(fn, a):
    return tuple(tuple(fn(x) for x in row) for row in a)


def kron(a, b):
    """Kronecker product, row index (i, k) -> i*len(b) + k."""
    out = []
    for ra in a:
        for rb in b:
            out.append(tuple(x * y for x in ra for y in rb))
    return tuple(out)


def is_zero(a):
    return all(not x for row in a for x in row)


def transpose(a):
    return tuple(zip(*a)) if a else ()


def fmt(a):
    return "[" + ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in a) + "]"

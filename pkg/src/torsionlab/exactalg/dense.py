# Dense coefficient-list helpers (lowest degree first), generic over any
# coefficient type supporting + - * and exact division.  FieldPoly and the
# number-field element arithmetic are both built on these.

from __future__ import annotations

from fractions import Fraction


def trim(p: list) -> list:
    while p and not p[-1]:
        p.pop()
    return p


def add(a, b) -> list:
    if len(a) < len(b):
        a, b = b, a
    r = list(a)
    for i, c in enumerate(b):
        r[i] = r[i] + c
    return trim(r)


def sub(a, b) -> list:
    r = list(a) + [0] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        r[i] = r[i] - c
    return trim(r)


def neg(a) -> list:
    return [-c for c in a]


def scale(a, c) -> list:
    if not c:
        return []
    return trim([x * c for x in a])


def mul(a, b) -> list:
    if not a or not b:
        return []
    r = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            r[i + j] = r[i + j] + x * y
    return trim(r)


def divrem(a, b) -> tuple[list, list]:
    """Long division; ``b`` must be nonzero (trimmed)."""
    r = list(a)
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], trim(r)
    q = [0] * (len(r) - db)
    inv_lc = inverse(b[-1])
    for k in range(len(r) - 1 - db, -1, -1):
        c = r[k + db]
        if not c:
            continue
        c = c * inv_lc
        q[k] = c
        for j in range(db + 1):
            r[k + j] = r[k + j] - c * b[j]
    del r[db:]
    return trim(q), trim(r)


def inverse(c):
    if hasattr(c, "inverse"):
        return c.inverse()
    if isinstance(c, int):
        return Fraction(1, c)
    return 1 / c


def evaluate(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def derivative(a) -> list:
    return trim([a[i] * i for i in range(1, len(a))])

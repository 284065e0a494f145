"""Polynomial Pell equations X^2 - D Y^2 = 1 via continued fractions of sqrt(D).

The expansion runs exactly over the coefficient field.  For discriminants
over QQ, coefficient heights grow quadratically with the step count, so once
coefficients pass ``exact_bit_cap`` bits the run hands off to a multi-modular
tail that certifies "Q_i is not constant" step by step without carrying the
exact values (see :func:`_modular_tail`).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    BudgetExceeded,
    InternalCheckFailed,
    NotSquarefree,
    PellUnsolvable,
    RhoOnCurveBranch,
)
from .exactalg import QQ, FieldPoly, NFElem, is_squarefree, poly_sqrt_floor
from .exactalg.fields import RationalField

log = logging.getLogger(__name__)

DEFAULT_MAX_STEPS = 512
DEFAULT_BIT_CAP = 2**20
DEFAULT_EXACT_BIT_CAP = 2**14
N_MODULAR_PRIMES = 6


@dataclass(frozen=True)
class CFExpansion:
    D: FieldPoly
    partial_quotients: tuple
    pq_track: tuple
    periodic: bool
    period_start: int | None
    period_length: int | None
    steps_used: int
    exact_steps: int
    certificate: dict = field(default_factory=dict)

    @property
    def inconclusive(self) -> bool:
        return not self.periodic

    def trace(self) -> dict:
        """JSON-friendly summary: partial-quotient and Q degrees per exact step."""
        return {
            "D": str(self.D),
            "periodic": self.periodic,
            "period_start": self.period_start,
            "period_length": self.period_length,
            "steps_used": self.steps_used,
            "exact_steps": self.exact_steps,
            "a_degrees": [a.degree for a in self.partial_quotients],
            "Q_degrees": [q.degree for _, q in self.pq_track],
            "certificate": self.certificate,
        }


@dataclass(frozen=True)
class PellSolution:
    X: FieldPoly
    Y: FieldPoly

    def check(self, D: FieldPoly) -> bool:
        return self.X * self.X - D * self.Y * self.Y == FieldPoly([1], D.field, D.var)

    def to_dict(self) -> dict:
        return {"X": str(self.X), "Y": str(self.Y)}


def _validate(D: FieldPoly) -> FieldPoly:
    A = poly_sqrt_floor(D)  # raises OddDegree / NonSquareLeadingCoeff
    if not is_squarefree(D):
        raise NotSquarefree("discriminant has a repeated factor", D=D)
    return A


def cf_expand(
    D: FieldPoly,
    max_steps: int = DEFAULT_MAX_STEPS,
    *,
    bit_cap: int = DEFAULT_BIT_CAP,
    exact_bit_cap: int = DEFAULT_EXACT_BIT_CAP,
    modular_tail: bool = True,
) -> CFExpansion:
    """Continued-fraction expansion of sqrt(D), halted at the first constant Q_i.

    Returns ``periodic=True`` with ``period_length`` = index of that Q_i, or
    ``periodic=False`` once ``max_steps`` steps are certified non-constant
    (an inconclusive verdict: the period may simply exceed the budget).
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    A = _validate(D)
    K = D.field
    P = FieldPoly([], K, D.var)
    Q = FieldPoly([1], K, D.var)
    quotients, track = [], [(P, Q)]
    tail_ok = modular_tail and isinstance(K, RationalField)
    soft_cap = exact_bit_cap if tail_ok else bit_cap
    for i in range(max_steps):
        a = (A + P) // Q
        P_next = a * Q - P
        Q_next, r = divmod(D - P_next * P_next, Q)
        if r:
            raise InternalCheckFailed("Q_i does not divide D - P_{i+1}^2", step=i)
        quotients.append(a)
        track.append((P_next, Q_next))
        P, Q = P_next, Q_next
        if Q.is_constant():
            return CFExpansion(D, tuple(quotients), tuple(track), True, 1, i + 1, i + 1, i + 1,
                               {"method": "exact"})
        bits = max(P.max_bits(), Q.max_bits())
        if bits > soft_cap and i + 1 < max_steps:
            if not tail_ok:
                raise BudgetExceeded("coefficient bit size exceeded", step=i + 1, bits=bits, cap=bit_cap)
            return _finish_modular(D, A, quotients, track, max_steps, bit_cap)
    return CFExpansion(D, tuple(quotients), tuple(track), False, None, None, max_steps, max_steps,
                       {"method": "exact"})


def _finish_modular(D, A, quotients, track, max_steps, bit_cap) -> CFExpansion:
    start = len(quotients)
    P, Q = track[-1]
    tail = _modular_tail(D, A, P, Q, start, max_steps)
    if tail["consensus_constant_at"] is not None:
        # every prime saw a constant Q at the same step: confirm exactly
        target = tail["consensus_constant_at"]
        log.info("modular tail suggests periodicity at step %d; confirming exactly", target)
        full = cf_expand(D, target, bit_cap=bit_cap, exact_bit_cap=bit_cap, modular_tail=False)
        if full.periodic:
            return full
    steps = tail["certified_through"]
    cert = {
        "method": "exact+modular",
        "exact_steps": start,
        "primes": tail["primes"],
        "certified_through": steps,
        "rigorous": D.degree == 4,
    }
    return CFExpansion(D, tuple(quotients), tuple(track), False, None, None, steps, start, cert)


def _large_primes(count: int, avoid) -> list[int]:
    import sympy

    out, p = [], 2**61
    while len(out) < count:
        p = sympy.prevprime(p)
        if all(x % p for x in avoid):
            out.append(p)
    return out


def _modp(c: Fraction, p: int) -> int:
    return c.numerator % p * pow(c.denominator, -1, p) % p


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    r = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            r[i + j] = (r[i + j] + x * y) % p
    return _trim(r)


def _psub(a, b, p):
    r = list(a) + [0] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        r[i] = (r[i] - c) % p
    return _trim(r)


def _padd(a, b, p):
    r = list(a) + [0] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        r[i] = (r[i] + c) % p
    return _trim(r)


def _pdivrem(a, b, p):
    r = list(a)
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], _trim(r)
    inv = pow(b[-1], -1, p)
    q = [0] * (len(r) - db)
    for k in range(len(r) - 1 - db, -1, -1):
        c = r[k + db] * inv % p
        q[k] = c
        if c:
            for j in range(db + 1):
                r[k + j] = (r[k + j] - c * b[j]) % p
    del r[db:]
    return _trim(q), _trim(r)


def _modular_tail(D, A, P, Q, start: int, max_steps: int) -> dict:
    """Continue the expansion modulo several large primes.

    While a prime's run divides only by units it equals the reduction of the
    exact run, so a non-constant Q_i modulo a still-valid prime proves Q_i is
    not constant over QQ.  A prime whose Q_i drops below the consensus degree
    (or becomes constant) has met a bad reduction and is retired.
    """
    dens = [c.denominator for poly in (D, P, Q) for c in poly.coeffs]
    dens += [c.numerator for c in Q.coeffs[-1:]]
    primes = _large_primes(N_MODULAR_PRIMES, dens)
    states = {}
    for p in primes:
        states[p] = (
            [_modp(c, p) for c in D.coeffs],
            [_modp(c, p) for c in A.coeffs],
            [_modp(c, p) for c in P.coeffs],
            [_modp(c, p) for c in Q.coeffs],
        )
    certified = start
    consensus_constant = None
    for i in range(start, max_steps):
        degs = {}
        for p, (Dp, Ap, Pp, Qp) in list(states.items()):
            a, _ = _pdivrem(_padd(Ap, Pp, p), Qp, p)
            P2 = _psub(_pmul(a, Qp, p), Pp, p)
            Q2, r = _pdivrem(_psub(Dp, _pmul(P2, P2, p), p), Qp, p)
            if r or not Q2:
                del states[p]
                continue
            states[p] = (Dp, Ap, P2, Q2)
            degs[p] = len(Q2) - 1
        if not degs:
            break
        top = max(degs.values())
        for p, d in degs.items():
            if d < top:
                del states[p]
        if top == 0:
            if len(degs) == len(primes) or all(d == 0 for d in degs.values()):
                consensus_constant = i + 1
            break
        certified = i + 1
    return {
        "primes": [str(p) for p in primes],
        "certified_through": certified,
        "active_primes": len(states),
        "consensus_constant_at": consensus_constant,
    }


def _convergents(quotients, upto: int):
    """p_{upto-1}, q_{upto-1} of the expansion."""
    K = quotients[0].field
    var = quotients[0].var
    p_prev, q_prev = FieldPoly([1], K, var), FieldPoly([], K, var)
    p, q = quotients[0], FieldPoly([1], K, var)
    for k in range(1, upto):
        a = quotients[k]
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
    return p, q


def _canonical_sign(x) -> int:
    if isinstance(x, NFElem):
        first = next((c for c in x.coords if c), Fraction(0))
        return 1 if first >= 0 else -1
    return 1 if x >= 0 else -1


def pell_fundamental(D: FieldPoly, max_steps: int = DEFAULT_MAX_STEPS, **kwargs) -> PellSolution | None:
    """Fundamental solution of X^2 - D Y^2 = 1, or None if the expansion is inconclusive.

    At the first constant Q_k = c the convergent (p, q) has p^2 - D q^2 = e
    with e = (-1)^k c.  If e is a square the pair is rescaled by sqrt(e);
    otherwise the squared unit (p + q sqrt D)^2 / e is taken, which is what
    continuing to the next constant Q would produce.
    """
    cf = cf_expand(D, max_steps, **kwargs)
    if not cf.periodic:
        return None
    k = cf.period_length
    p, q = _convergents(cf.partial_quotients, k)
    e_poly = p * p - D * q * q
    if not e_poly.is_constant() or e_poly.is_zero():
        raise InternalCheckFailed("convergent norm is not a nonzero constant", norm=e_poly)
    e = e_poly[0]
    K = D.field
    root = K.sqrt(e)
    if root is not None:
        inv = 1 / root if not isinstance(root, NFElem) else root.inverse()
        X, Y = p * inv, q * inv
    else:
        inv = 1 / e if not isinstance(e, NFElem) else e.inverse()
        X, Y = (p * p + D * q * q) * inv, (p * q) * (2 * inv)
    if _canonical_sign(X.lc()) < 0:
        X, Y = -X, -Y
    sol = PellSolution(X, Y)
    if not sol.check(D):
        raise InternalCheckFailed("assembled pair violates X^2 - D Y^2 = 1", X=X, Y=Y)
    return sol


def pell_mul(s: PellSolution, t: PellSolution, D: FieldPoly) -> PellSolution:
    return PellSolution(s.X * t.X + D * s.Y * t.Y, s.X * t.Y + s.Y * t.X)


def pell_power(sol: PellSolution, D: FieldPoly, n: int) -> PellSolution:
    """(X_n, Y_n) with X_n + Y_n sqrt(D) = (X + Y sqrt(D))^n; negative n inverts."""
    if n < 0:
        sol, n = PellSolution(sol.X, -sol.Y), -n
    one = PellSolution(FieldPoly([1], D.field, D.var), FieldPoly([], D.field, D.var))
    result, base = one, sol
    while n:
        if n & 1:
            result = pell_mul(result, base, D)
        n >>= 1
        if n:
            base = pell_mul(base, base, D)
    if not result.check(D):
        raise InternalCheckFailed("power violates the Pell identity", n=n)
    return result


def pell_values_at(sol: PellSolution, D: FieldPoly, rho, n_max: int):
    """Yield (n, X_n(rho), Y_n(rho)) for n = 1..n_max using the pointwise recurrence."""
    x1, y1, d = sol.X(rho), sol.Y(rho), D(rho)
    x, y = x1, y1
    for n in range(1, n_max + 1):
        yield n, x, y
        x, y = x * x1 + d * y * y1, x * y1 + y * x1


def pell_square_factor(
    rho, Q: FieldPoly, n_max: int, max_steps: int = DEFAULT_MAX_STEPS, solution: PellSolution | None = None
) -> int | None:
    """Least n <= n_max with Y_n(rho) = 0, i.e. X^2 - (x - rho)^2 Q Y^2 = 1 is solvable.

    ``rho`` must lie in the coefficient field of Q; evaluation is exact.
    """
    rho = Q.field(rho)
    if not Q(rho):
        raise RhoOnCurveBranch("rho is a root of Q", rho=rho)
    sol = solution or pell_fundamental(Q, max_steps)
    if sol is None:
        raise PellUnsolvable("no fundamental solution within budget", Q=Q, max_steps=max_steps)
    for n, _x, y in pell_values_at(sol, Q, rho, n_max):
        if not y:
            return n
    return None


def squared_factor_solution(rho, Q: FieldPoly, n: int, sol: PellSolution) -> PellSolution:
    """Turn a hit Y_n(rho) = 0 into a solution of X^2 - (x-rho)^2 Q Y^2 = 1."""
    Xn, Yn = pell_power(sol, Q, n).X, pell_power(sol, Q, n).Y
    lin = FieldPoly([-Q.field(rho), 1], Q.field, Q.var)
    Yr, r = divmod(Yn, lin)
    if r:
        raise InternalCheckFailed("Y_n(rho) != 0", n=n)
    D2 = lin * lin * Q
    out = PellSolution(Xn, Yr)
    if not out.check(D2):
        raise InternalCheckFailed("squared-factor solution fails identity")
    return out

"""Exact lattice-point counts inside the ellipse f(u,v) <= x.

Implements the congruence-count family for a form f and squarefree modulus l:

    A        = {(u,v) : f(u,v) <= x}                       (origin included)
    A_l      = {(u,v) in A : f(u,v) = 0 mod l}
    A_l(d)   = {(u,v) in A_l : gcd(v, l) = d}
    B_l      = {(u,v) in A : gcd(v, l) = 1, f(u,v) = 0 mod l}
    B_l(m)   = {(u,v) in A : gcd(v, l) = 1, u = mv mod l}

together with the root set M(l) of a m^2 + b m + c mod l, the local density
g(l) = prod_{p | l} (1 + chi(p) - chi(p)/p)/p, and the square-root average
sum_{w <= W} sqrt(W^2 - w^2) whose main term is pi W^2/4 - W/2.

Membership tests are exact: (2au + bv)^2 + D v^2 <= 4ax with the threshold
held as a rational, so a real x gets floor semantics with no floating point
in the inner loop.  Counting is O(V) in the window height V = sqrt(4ax/D).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import divisors, factorize, kronecker, mult_functions
from .forms import Form, is_primitive

__all__ = [
    "EllipseWindow",
    "CongruenceCount",
    "RootSet",
    "SqrtAverage",
    "LocalDensityReport",
    "r_f",
    "count_A",
    "count_A_ell",
    "count_B_ell",
    "count_congruence",
    "root_set",
    "sqrt_average",
    "local_density_g",
    "local_density_report",
    "value_bitmap",
]


@dataclass(frozen=True)
class EllipseWindow:
    """The region f(u,v) <= x; V = sqrt(4ax/D) is the height of the ellipse."""

    f: Form
    x: Fraction
    V: float

    @classmethod
    def of(cls, f: Form, x) -> "EllipseWindow":
        xq = x if isinstance(x, Fraction) else Fraction(x)
        V = math.sqrt(max(4 * f.a * xq / f.D, 0)) if xq > 0 else 0.0
        return cls(f=f, x=xq, V=V)


def _ceil_div(p: int, q: int) -> int:
    return -((-p) // q)


def _u_bounds(a: int, b: int, v: int, s: int) -> tuple[int, int]:
    # integers u with |2au + bv| <= s
    return _ceil_div(-s - b * v, 2 * a), (s - b * v) // (2 * a)


def _count_in(lo: int, hi: int, r: int, mod: int) -> int:
    # integers u in [lo, hi] with u = r (mod mod)
    if hi < lo:
        return 0
    return (hi - r) // mod - (lo - 1 - r) // mod


def _window_rows(window: EllipseWindow):
    """Yield (v, lo, hi) with [lo, hi] the exact u-range at height v."""
    f, x = window.f, window.x
    a, b = f.a, f.b
    T = 4 * a * x  # rational threshold: (2au+bv)^2 + Dv^2 <= T
    if T < 0:
        return
    vmax = math.isqrt(int(T / f.D)) if T >= f.D else 0
    for v in range(-vmax, vmax + 1):
        S = int(T - f.D * v * v)  # floor; exact since the lhs is an integer
        if S < 0:
            continue
        s = math.isqrt(S)
        lo, hi = _u_bounds(a, b, v, s)
        if hi >= lo:
            yield v, lo, hi


def r_f(f: Form, n: int) -> int:
    """Number of representations n = f(u,v), exact."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 1  # origin only, by positive definiteness
    a, b, D = f.a, f.b, f.D
    T = 4 * a * n
    count = 0
    for v in range(-math.isqrt(T // D), math.isqrt(T // D) + 1):
        # solve a u^2 + (bv) u + (c v^2 - n) = 0: discriminant 4an - Dv^2
        S = T - D * v * v
        if S < 0:
            continue
        s = math.isqrt(S)
        if s * s != S:
            continue
        for sign in ((s, -s) if s else (0,)):
            num = sign - b * v
            if num % (2 * a) == 0:
                count += 1
    return count


def count_A(window: EllipseWindow) -> int:
    """|A| = #{(u,v) : f(u,v) <= x}, origin included."""
    return sum(hi - lo + 1 for _, lo, hi in _window_rows(window))


def _require_squarefree(ell: int) -> None:
    if ell < 1:
        raise ValueError("modulus must be >= 1")
    if not mult_functions(ell).squarefree:
        raise ValueError(f"modulus {ell} is not squarefree")


def _u_root_table(f: Form, ell: int) -> list[list[int]]:
    # table[v mod l] = residues u mod l with f(u, v) = 0 mod l
    table: list[list[int]] = [[] for _ in range(ell)]
    a, b, c = f.a % ell, f.b % ell, f.c % ell
    for vbar in range(ell):
        row = table[vbar]
        for ubar in range(ell):
            if (a * ubar * ubar + b * ubar * vbar + c * vbar * vbar) % ell == 0:
                row.append(ubar)
    return table


def count_A_ell(window: EllipseWindow, ell: int) -> int:
    """|A_l| alone (cheaper than the full decomposition)."""
    _require_squarefree(ell)
    if ell == 1:
        return count_A(window)
    table = _u_root_table(window.f, ell)
    total = 0
    for v, lo, hi in _window_rows(window):
        for ubar in table[v % ell]:
            total += _count_in(lo, hi, ubar, ell)
    return total


def count_B_ell(window: EllipseWindow, ell: int) -> int:
    """|B_l| = #{(u,v) in A : gcd(v,l) = 1, f(u,v) = 0 mod l}."""
    _require_squarefree(ell)
    if ell == 1:
        return count_A(window)
    table = _u_root_table(window.f, ell)
    total = 0
    for v, lo, hi in _window_rows(window):
        if math.gcd(v, ell) != 1:
            continue
        for ubar in table[v % ell]:
            total += _count_in(lo, hi, ubar, ell)
    return total


@dataclass(frozen=True)
class RootSet:
    """Solutions of a m^2 + b m + c = 0 mod l, glued over prime factors by CRT."""

    f: Form
    ell: int
    roots: tuple[int, ...]

    @property
    def M(self) -> int:
        return len(self.roots)


def root_set(f: Form, ell: int) -> RootSet:
    """Roots found by an O(p) scan per prime factor, combined by CRT."""
    _require_squarefree(ell)
    if ell == 1:
        return RootSet(f=f, ell=1, roots=(0,))
    factors = [p for p, _ in factorize(ell).factors]
    roots = [0]
    mod = 1
    for p in factors:
        a, b, c = f.a % p, f.b % p, f.c % p
        p_roots = [m for m in range(p) if (a * m * m + b * m + c) % p == 0]
        new_roots = []
        # CRT: x = r (mod), x = rp (p); gcd(mod, p) = 1 as l is squarefree
        inv = pow(mod, -1, p)
        for r in roots:
            for rp in p_roots:
                t = ((rp - r) * inv) % p
                new_roots.append(r + mod * t)
        roots = new_roots
        mod *= p
    return RootSet(f=f, ell=ell, roots=tuple(sorted(roots)))


@dataclass(frozen=True)
class CongruenceCount:
    """Exact cardinalities of A_l, every A_l(d), B_l and every B_l(m)."""

    window: EllipseWindow
    ell: int
    a_ell: int
    a_ell_by_d: dict[int, int]
    b_ell: int
    b_ell_by_m: dict[int, int]
    roots: RootSet

    @property
    def counts(self) -> dict[str, int]:
        out = {"A_ell": self.a_ell, "B_ell": self.b_ell}
        for d, n in sorted(self.a_ell_by_d.items()):
            out[f"A_ell({d})"] = n
        for m, n in sorted(self.b_ell_by_m.items()):
            out[f"B_ell({m})"] = n
        return out


def count_congruence(window: EllipseWindow, ell: int) -> CongruenceCount:
    """All congruence counts for squarefree l in one pass over the window.

    A_l and B_l go through the residue root table; each B_l(m) is counted
    directly from the linear congruence u = mv, so the disjoint-union
    identities relating them are genuine cross-checks, not tautologies.
    """
    _require_squarefree(ell)
    f = window.f
    rset = root_set(f, ell)
    table = _u_root_table(f, ell)
    a_ell = 0
    a_by_d = {d: 0 for d in divisors(ell)}
    b_ell = 0
    b_by_m = {m: 0 for m in rset.roots}
    for v, lo, hi in _window_rows(window):
        g = math.gcd(v, ell)
        row = 0
        for ubar in table[v % ell]:
            row += _count_in(lo, hi, ubar, ell)
        a_ell += row
        a_by_d[g] += row
        if g == 1:
            b_ell += row
            for m in rset.roots:
                b_by_m[m] += _count_in(lo, hi, (m * v) % ell, ell)
    return CongruenceCount(window=window, ell=ell, a_ell=a_ell, a_ell_by_d=a_by_d,
                           b_ell=b_ell, b_ell_by_m=b_by_m, roots=rset)


@dataclass(frozen=True)
class SqrtAverage:
    W: float
    sum: float
    main_term: float
    error: float


def sqrt_average(W) -> SqrtAverage:
    """sum_{1 <= w <= W} sqrt(W^2 - w^2) against its main term pi W^2/4 - W/2."""
    if W < 1:
        raise ValueError("W must be >= 1")
    w = np.arange(1, math.floor(W) + 1, dtype=np.float64)
    total = float(np.sum(np.sqrt(W * W - w * w)))
    main = math.pi * W * W / 4 - W / 2
    return SqrtAverage(W=float(W), sum=total, main_term=main, error=total - main)


def local_density_g(f: Form, ell: int) -> Fraction:
    """g(l) = prod_{p|l} (1 + chi(p) - chi(p)/p)/p as an exact rational."""
    if not is_primitive(f):
        raise ValueError("local density is defined for primitive forms")
    _require_squarefree(ell)
    g = Fraction(1)
    for p, _ in factorize(ell).factors:
        chi = kronecker(-f.D, p)
        g *= Fraction(p + chi * p - chi, p * p)
    return g


@dataclass(frozen=True)
class LocalDensityReport:
    """|A_l| against its predicted main term and error envelope."""

    exact: int
    main: float
    residual: float
    envelope: float

    @property
    def ratio(self) -> float:
        return abs(self.residual) / self.envelope


def local_density_report(window: EllipseWindow, ell: int,
                         exact: int | None = None) -> LocalDensityReport:
    """Measure |A_l| - g(l) (pi sqrt(D)/2a) V^2 against the envelope

    tau_3(l) V + l^(1/2) tau(l) tau_3(l) (sqrt(D)/a) V^(1/2) + 1.

    Pass `exact` to reuse an already-computed |A_l|.
    """
    f = window.f
    if exact is None:
        exact = count_A_ell(window, ell)
    V = window.V
    main = float(local_density_g(f, ell)) * math.pi * math.sqrt(f.D) / (2 * f.a) * V * V
    mv = mult_functions(ell)
    envelope = (mv.tau3 * V
                + math.sqrt(ell) * mv.tau * mv.tau3 * math.sqrt(f.D) / f.a * math.sqrt(V)
                + 1.0)
    return LocalDensityReport(exact=exact, main=main, residual=exact - main,
                              envelope=envelope)


def value_bitmap(f: Form, x) -> np.ndarray:
    """Boolean array marking which n in [0, floor(x)] are represented by f.

    Uses the v >= 0 half of the window only (values are symmetric under
    (u,v) -> (-u,-v)) and vectorizes the u-scan per row.
    """
    X = math.floor(x)
    if X < 0:
        return np.zeros(0, dtype=bool)
    rep = np.zeros(X + 1, dtype=bool)
    a, b, c, D = f.a, f.b, f.c, f.D
    T = 4 * a * X
    vmax = math.isqrt(T // D)
    for v in range(0, vmax + 1):
        S = T - D * v * v
        if S < 0:
            continue
        s = math.isqrt(S)
        lo, hi = _u_bounds(a, b, v, s)
        if hi < lo:
            continue
        u = np.arange(lo, hi + 1, dtype=np.int64)
        vals = (a * u + b * v) * u + c * v * v
        rep[vals] = True
    return rep

"""Selberg upper-bound sieve for primes represented by a form, theorem-bound
evaluators, exact prime counts pi_f, and almost-prime counts.

The sifting density is g(p) = (1 + chi(p) - chi(p)/p)/p; the Selberg system
uses h(l) = prod_{p|l} g(p)/(1 - g(p)) over squarefree l | P(z), l < z, with
J = sum h(l) and optimal weights

    lambda_d = mu(d) (h(d)/g(d)) J_d / J,
    J_d = sum_{m < z/d, m | P(z), (m,d)=1} h(m),

computed exactly as rationals (so the minimized quadratic form equals 1/J
identically and |lambda_d| <= 1 is asserted, which is what makes the final
bound an honest inequality between computed numbers).  Remainders r_l come
from exact lattice counts, never from the error envelope.

The sifting parameter z = (a/(Dx))^(1/4) y^(1/2) (log y)^(-7) + 1; at desk
scale the (log y)^7 factor keeps z barely above 1, so the system is usually
the degenerate l = 1 one and the bound reduces to 2 pi y / sqrt(D) plus the
exact remainder.  The machinery is exercised at larger z by the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import mult_functions, shared_prime_table
from .characters import L_values, sum_local_densities
from .forms import Form, delta_f, enumerate_class_set, is_primitive, is_reduced
from .lattice import EllipseWindow, count_A_ell, local_density_g, value_bitmap

__all__ = [
    "SieveParams",
    "SieveReport",
    "TheoremBounds",
    "pi_f",
    "pi_f_interval",
    "sifted_interval_count",
    "selberg_upper_bound",
    "selberg_system",
    "theorem_rhs",
    "count_almost_primes",
    "prime_count_upto",
]

_prime_mask: np.ndarray | None = None


def _prime_mask_upto(limit: int) -> np.ndarray:
    """Cached boolean array: mask[n] iff n prime, n <= limit."""
    global _prime_mask
    if limit > 2 * 10**8:
        raise ValueError("prime mask limited to 2e8; use a smaller x")
    if _prime_mask is None or len(_prime_mask) <= limit:
        n = max(limit, 1 << 16)
        mask = np.ones(n + 1, dtype=bool)
        mask[:2] = False
        for p in range(2, math.isqrt(n) + 1):
            if mask[p]:
                mask[p * p :: p] = False
        _prime_mask = mask
    return _prime_mask


def prime_count_upto(z: float) -> int:
    """pi(z), exact."""
    n = math.floor(z)
    if n < 2:
        return 0
    mask = _prime_mask_upto(n)
    return int(np.count_nonzero(mask[: n + 1]))


def pi_f(f: Form, x) -> int:
    """Number of primes p <= x represented by f, by exhaustive enumeration."""
    if not is_primitive(f):
        raise ValueError("pi_f expects a primitive form")
    X = math.floor(x)
    if X < 2:
        return 0
    rep = value_bitmap(f, X)
    mask = _prime_mask_upto(X)
    return int(np.count_nonzero(rep & mask[: X + 1]))


def pi_f_interval(f: Form, x, y) -> int:
    """pi_f(x) - pi_f(x - y)."""
    return pi_f(f, x) - pi_f(f, x - y) if x - y >= 2 else pi_f(f, x)


def sifted_interval_count(f: Form, x, y, z) -> int:
    """sum of r_f(n) over x - y < n <= x with n coprime to all primes <= z."""
    if y < 0 or y > x:
        raise ValueError("need 0 <= y <= x")
    if y == 0:
        return 0
    X = math.floor(x)
    lo_val = math.floor(x - y) + 1
    small_primes = [p for p in shared_prime_table(max(math.floor(z), 2)).primes
                    if p <= z]
    a, b, c, D = f.a, f.b, f.c, f.D
    T = 4 * a * X
    if T < 0:
        return 0
    vmax = math.isqrt(T // D)
    total = 0
    for v in range(-vmax, vmax + 1):
        S = T - D * v * v
        if S < 0:
            continue
        s = math.isqrt(S)
        lo = -((s + b * v) // (2 * a))
        hi = (s - b * v) // (2 * a)
        if hi < lo:
            continue
        u = np.arange(lo, hi + 1, dtype=np.int64)
        vals = (a * u + b * v) * u + c * v * v
        keep = vals >= lo_val
        for p in small_primes:
            keep &= vals % p != 0
        total += int(np.count_nonzero(keep))
    return total


@dataclass(frozen=True)
class SelbergSystem:
    """Exact-rational Selberg weight system at sifting parameter z."""

    z: float
    primes: tuple[int, ...]
    support: tuple[int, ...]            # squarefree d | P(z), d < z
    h: dict[int, Fraction]
    J: Fraction
    lambdas: dict[int, Fraction]
    remainder_moduli: tuple[int, ...]   # squarefree l | P(z), l < z^2
    cross_coeff: dict[int, Fraction]    # sum_{[d1,d2]=l} lambda_d1 lambda_d2


def _squarefree_products(primes: list[int], limit: float) -> list[int]:
    out = [1]
    for p in primes:
        out.extend(v * p for v in list(out) if v * p < limit)
    return sorted(v for v in out if v < limit)


@lru_cache(maxsize=128)
def _system_cached(a: int, b: int, c: int, z: float) -> SelbergSystem:
    return _build_system(Form(a, b, c), z)


def selberg_system(f: Form, z: float) -> SelbergSystem:
    return _system_cached(f.a, f.b, f.c, float(z))


def _build_system(f: Form, z: float) -> SelbergSystem:
    primes = [p for p in shared_prime_table(max(math.floor(z), 2)).primes if p <= z]
    gp = {p: local_density_g(f, p) for p in primes}
    support = _squarefree_products(primes, z)
    h: dict[int, Fraction] = {}
    for d in support:
        val = Fraction(1)
        for p in primes:
            if d % p == 0:
                val *= gp[p] / (1 - gp[p])
        h[d] = val
    J = sum(h.values(), Fraction(0))
    lambdas: dict[int, Fraction] = {}
    for d in support:
        g_d = Fraction(1)
        mu = 1
        for p in primes:
            if d % p == 0:
                g_d *= gp[p]
                mu = -mu
        J_d = sum(h[m] for m in support if m * d < z and math.gcd(m, d) == 1)
        lam = mu * (h[d] / g_d) * J_d / J
        assert abs(lam) <= 1, "Selberg weight escaped [-1, 1]"
        lambdas[d] = lam
    moduli = _squarefree_products(primes, z * z)
    cross: dict[int, Fraction] = {l: Fraction(0) for l in moduli}
    for d1 in support:
        l1 = lambdas[d1]
        for d2 in support:
            l = d1 * d2 // math.gcd(d1, d2)
            cross[l] += l1 * lambdas[d2]
    return SelbergSystem(z=z, primes=tuple(primes), support=tuple(support), h=h,
                         J=J, lambdas=lambdas, remainder_moduli=tuple(moduli),
                         cross_coeff=cross)


@dataclass(frozen=True)
class SieveParams:
    """Run parameters; z is pinned to (a/(Dx))^(1/4) y^(1/2) (log y)^(-7) + 1."""

    f: Form
    x: float
    y: float
    phi_mode: float
    epsilon: float
    z: float
    R: float

    @classmethod
    def of(cls, f: Form, x, y, phi_mode: float = 0.25,
           epsilon: float = 0.2) -> "SieveParams":
        if phi_mode not in (0, 0.25):
            raise ValueError("phi_mode must be 0 or 0.25")
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 1 < y <= x:
            raise ValueError("need 1 < y <= x")
        z = (f.a / (f.D * x)) ** 0.25 * math.sqrt(y) * math.log(y) ** -7 + 1
        return cls(f=f, x=float(x), y=float(y), phi_mode=phi_mode,
                   epsilon=epsilon, z=z, R=z * z)


@dataclass(frozen=True)
class TheoremBounds:
    theta: float
    theta_prime: float
    rhs_full: float
    rhs_interval: float
    range_ok_full: bool
    range_ok_interval: bool
    range_ok: bool
    conditional: bool   # phi = 0 rows assume GRH for chi_{-D}


@lru_cache(maxsize=4096)
def _class_data(D: int) -> tuple[int, int]:
    cs = enumerate_class_set(D)
    return cs.h, cs.w


def theorem_rhs(f: Form, x, y, phi_mode: float, epsilon: float) -> TheoremBounds:
    """theta, theta', and the two Brun-Titchmarsh right-hand sides.

    rhs_full = 4/(1-theta) delta_f x / (h(-D) log x) for the full range,
    rhs_interval = 2/(1-theta') delta_f y / (h(-D) log y) for the short interval;
    a vacuous bound (theta >= 1) is reported as nan.
    """
    if not is_reduced(f) or not is_primitive(f):
        raise ValueError("theorem_rhs expects a reduced primitive form")
    if phi_mode not in (0, 0.25):
        raise ValueError("phi_mode must be 0 or 0.25")
    if not 1 < y <= x:
        raise ValueError("need 1 < y <= x")
    D, a = f.D, f.a
    lx, ly, lD, la = math.log(x), math.log(y), math.log(D), math.log(a)
    phi = phi_mode
    theta = (1 + 2 * phi + epsilon / 2) * lD / lx - la / lx
    theta_p = lx / (2 * ly) + (0.5 + phi + epsilon / 4) * lD / ly - la / (2 * ly)
    h, _ = _class_data(D)
    delta = delta_f(f)
    rhs_f = 4 / (1 - theta) * delta * x / (h * lx) if theta < 1 else math.nan
    rhs_i = 2 / (1 - theta_p) * delta * y / (h * ly) if theta_p < 1 else math.nan
    x_threshold = (D ** (1 + 4 * phi) / a) ** (1 + epsilon)
    y_threshold = (D ** (1 + 4 * phi) / a) ** (0.5 + epsilon) * x ** (0.5 + epsilon)
    ok_full = x >= x_threshold
    ok_interval = y_threshold <= y <= x
    return TheoremBounds(theta=theta, theta_prime=theta_p,
                         rhs_full=rhs_f, rhs_interval=rhs_i,
                         range_ok_full=ok_full, range_ok_interval=ok_interval,
                         range_ok=ok_full or ok_interval, conditional=(phi == 0))


@dataclass(frozen=True)
class SieveReport:
    params: SieveParams
    J: float
    script_J: float
    main_term: float
    remainder_majorized: float
    remainder_signed: float
    upper_bound: float
    sifted_count: int
    exact_interval_count: int
    theta: float
    theta_prime: float
    rhs_theorem: float
    degenerate_L_branch: bool
    bounds: TheoremBounds


def selberg_upper_bound(params: SieveParams) -> SieveReport:
    """Run the sieve at the pinned z with exact remainders.

    upper_bound = (2 pi y / sqrt(D)) / J + sum_{l | P(z), l < z^2} tau_3(l) |r_l|
    with r_l = |A_l(x)| - |A_l(x-y)| - g(l) 2 pi y / sqrt(D) from exact lattice
    counts, so upper_bound >= sifted_count is an inequality between computed
    numbers, not an asymptotic claim.
    """
    f, x, y = params.f, params.x, params.y
    if not is_reduced(f) or not is_primitive(f):
        raise ValueError("selberg sieve expects a reduced primitive form")
    if x < f.D / f.a:
        raise ValueError("need x >= D/a")
    if not math.sqrt(f.a * x) <= y <= x:
        raise ValueError("need (ax)^(1/2) <= y <= x")
    sys = selberg_system(f, params.z)
    main_density = 2 * math.pi * y / math.sqrt(f.D)
    J = float(sys.J)
    main = main_density / J
    win_hi = EllipseWindow.of(f, x)
    win_lo = EllipseWindow.of(f, x - y)
    rem_maj = 0.0
    rem_signed = 0.0
    for ell in sys.remainder_moduli:
        interval = count_A_ell(win_hi, ell) - count_A_ell(win_lo, ell)
        r_ell = interval - float(local_density_g(f, ell)) * main_density
        rem_maj += mult_functions(ell).tau3 * abs(r_ell)
        rem_signed += float(sys.cross_coeff[ell]) * r_ell
    lv = L_values(f.D)
    ly = math.log(y)
    degenerate = lv.L1 < ly**-2
    if degenerate:
        script_J = ly**2
    else:
        script_J = sum_local_densities(f, params.z).sum / lv.L1
    sifted = sifted_interval_count(f, x, y, params.z)
    exact_primes = pi_f_interval(f, x, y)
    tb = theorem_rhs(f, x, y, params.phi_mode, params.epsilon)
    rhs = tb.rhs_interval if y < x else tb.rhs_full
    return SieveReport(params=params, J=J, script_J=script_J, main_term=main,
                       remainder_majorized=rem_maj, remainder_signed=rem_signed,
                       upper_bound=main + rem_maj, sifted_count=sifted,
                       exact_interval_count=exact_primes, theta=tb.theta,
                       theta_prime=tb.theta_prime, rhs_theorem=rhs,
                       degenerate_L_branch=degenerate, bounds=tb)


_omega_cache: dict[int, np.ndarray] = {}


def _big_omega_upto(limit: int) -> np.ndarray:
    """Omega(n) (prime factors with multiplicity) for n = 0..limit."""
    for lim, tab in _omega_cache.items():
        if lim >= limit:
            return tab
    omega = np.zeros(limit + 1, dtype=np.uint8)
    for p in shared_prime_table(max(limit, 2)).primes:
        if p > limit:
            break
        pk = p
        while pk <= limit:
            omega[pk::pk] += 1
            pk *= p
    _omega_cache.clear()
    _omega_cache[limit] = omega
    return omega


def count_almost_primes(f: Form, x, k: int) -> int:
    """Distinct 1 <= n <= x represented by f with Omega(n) <= k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    X = math.floor(x)
    if X < 1:
        return 0
    rep = value_bitmap(f, X)
    rep[0] = False
    omega = _big_omega_upto(X)
    return int(np.count_nonzero(rep & (omega[: X + 1] <= k)))

"""Character sums, L(1,chi) and L'(1,chi), and the minimized error functionals.

For a discriminant -D the Kronecker symbol chi(n) = (-D/n) is a quadratic
Dirichlet character mod D whose prefix sum S(t) = sum_{n<=t} chi(n) is
periodic with period D (the full-period sum vanishes).  Everything here
exploits that periodicity:

  * L(1,chi)  = sum_{d<=y} chi(d)/d - S(y)/y + int_y^inf S(t)/t^2 dt, and the
    tail integral of a D-periodic step function has the closed form
    (1/D) sum_s S(y+s) [psi((y+s+1)/D) - psi((y+s)/D)]  (psi = digamma),
    so L(1,chi) is evaluated to float precision with O(D) work.
  * -L'(1,chi) = sum_{d<=y} chi(d) log d / d - S(y) log y / y
                 + int_y^inf S(t)(log t - 1)/t^2 dt; the log factor is split
    as log y + log(t/y), leaving the same digamma tail plus a mean term
    mu/y and a fluctuation certificate r/y^2 carried into the reported
    error bound.
  * E0(x) = min_y (y^2/x + |S(y)| + x int_y^inf |S|/t^2 dt) and its log
    variant E1(x) are evaluated on a geometric y-grid (ratio 1.1); the E1
    tail certificate is added so reported values are upper bounds.

The analytic class number identity h(-D) = w sqrt(D) L(1,chi) / (2 pi) ties
this module to the reduced-form enumeration and is the main cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma

from .arith import kronecker, shared_prime_table
from .forms import Form, is_discriminant, unit_count
from .lattice import local_density_g

__all__ = [
    "CharacterProfile",
    "LValues",
    "ErrorFunctionals",
    "DiscriminantFamily",
    "WeightedSums",
    "LocalDensitySum",
    "ExceptionalReport",
    "char_profile",
    "char_prefix_sums",
    "L_values",
    "weighted_dirichlet_sums",
    "error_functionals",
    "sum_local_densities",
    "family",
    "average_exceptional_report",
    "class_number_estimate",
    "EULER_GAMMA",
]

EULER_GAMMA = 0.5772156649015329  # Euler-Mascheroni, hard-coded


def _chi_period(D: int) -> np.ndarray:
    """chi(n) for n = 0..D as int8, filled multiplicatively over prime powers."""
    chi = np.ones(D + 1, dtype=np.int8)
    chi[0] = 0
    for p in shared_prime_table(max(D, 2)).primes:
        if p > D:
            break
        cp = kronecker(-D, p)
        if cp == 1:
            continue
        if cp == 0:
            chi[p::p] = 0
            continue
        pk = p
        while pk <= D:
            chi[pk::pk] *= np.int8(-1)
            pk *= p
    return chi


class CharacterProfile:
    """Period-level data for chi_{-D}: values, prefix sums, and the exact
    period statistics (max, mean, cumulative deviation) that certify every
    tail truncation."""

    def __init__(self, D: int):
        if not is_discriminant(D):
            raise ValueError(f"-{D} is not a discriminant (D = 0, 3 mod 4, D >= 3)")
        self.D = D
        self.chi = _chi_period(D)
        csum = np.cumsum(self.chi[1:], dtype=np.int64)
        if csum[-1] != 0:
            raise AssertionError(f"chi_(-{D}) is not mean-zero over its period")
        # S(n) for n = r (mod D); S(D) = 0 lands in slot 0
        self.S_mod = np.empty(D, dtype=np.int64)
        self.S_mod[1:] = csum[:-1]
        self.S_mod[0] = 0
        self.s_max = int(np.max(np.abs(self.S_mod)))
        self._mu_S = float(np.sum(self.S_mod)) / D
        self._mu_absS = float(np.sum(np.abs(self.S_mod))) / D
        self._r_dev_S = self._max_cum_deviation(self.S_mod, self._mu_S)
        self._r_dev_absS = self._max_cum_deviation(np.abs(self.S_mod), self._mu_absS)
        self._lvals: LValues | None = None

    @staticmethod
    def _max_cum_deviation(vals: np.ndarray, mu: float) -> float:
        # max |sum over any window of (vals - mu)|, windows up to one period
        dev = np.concatenate([[0.0], np.cumsum(np.concatenate([vals, vals]) - mu)])
        return float(np.max(dev) - np.min(dev))

    def S(self, t: int) -> int:
        """Prefix sum S(t) for any t >= 0, via periodicity."""
        if t < 0:
            raise ValueError("t must be >= 0")
        return int(self.S_mod[t % self.D])

    def chi_at(self, n: int) -> int:
        return int(self.chi[n % self.D])

    def tail_quadratic(self, y) -> "np.ndarray | float":
        """int_y^inf S(t)/t^2 dt = sum_{n>=y} S(n)/(n(n+1)), exactly."""
        return self._tail(self.S_mod, y)

    def tail_quadratic_abs(self, y) -> "np.ndarray | float":
        """Same closed form with |S|."""
        return self._tail(np.abs(self.S_mod), y)

    def _tail(self, vals: np.ndarray, y):
        ys = np.atleast_1d(np.asarray(y, dtype=np.int64))
        D = self.D
        s = np.arange(D, dtype=np.int64)
        A = ys[:, None] + s[None, :]
        diff = digamma((A + 1) / D) - digamma(A / D)
        out = (vals[A % D] * diff).sum(axis=1) / D
        return out if np.ndim(y) else float(out[0])


_profile_cache: dict[int, CharacterProfile] = {}


def char_profile(D: int) -> CharacterProfile:
    prof = _profile_cache.get(D)
    if prof is None:
        prof = CharacterProfile(D)
        if len(_profile_cache) > 64:
            _profile_cache.clear()
        _profile_cache[D] = prof
    return prof


@dataclass(frozen=True)
class PrefixSums:
    """S(t) for t <= T, materialized (plus the profile for t beyond T)."""

    D: int
    T: int
    S: np.ndarray
    profile: CharacterProfile


def char_prefix_sums(D: int, T: int) -> PrefixSums:
    """Exact integer prefix sums of chi_{-D}(n) for n <= T."""
    if T < 1:
        raise ValueError("T must be >= 1")
    prof = char_profile(D)
    reps = -(-T // D)
    chi_run = np.tile(prof.chi[1:], reps)[:T]
    S = np.concatenate([[0], np.cumsum(chi_run, dtype=np.int64)])
    return PrefixSums(D=D, T=T, S=S, profile=prof)


@dataclass(frozen=True)
class LValues:
    L1: float
    L1_prime: float
    error_bound: float


def L_values(D: int, precision_limit: int = 10**7) -> LValues:
    """L(1,chi) and L'(1,chi) for chi = chi_{-D}.

    L1 comes out exact to float precision (closed-form tail); L1_prime
    carries the fluctuation certificate r/y^2 as error_bound, with the
    partial-sum length grown until that certificate is below 1e-7 or the
    precision_limit is hit.
    """
    prof = char_profile(D)
    cached = prof._lvals
    if cached is not None:
        return cached
    D_ = prof.D
    K = max(64, -(-int(math.sqrt(max(prof._r_dev_S, 1.0) / 1e-7)) // D_))
    y = min(K * D_, max(precision_limit // D_, 1) * D_)
    reps = y // D_
    chi_run = np.tile(prof.chi[1:], reps).astype(np.float64)
    d = np.arange(1, y + 1, dtype=np.float64)
    inv = chi_run / d
    sum_inv = float(np.sum(inv))
    sum_log = float(np.dot(inv, np.log(d)))
    # y is a full period so S(y) = 0 and the boundary terms drop
    tail0 = prof.tail_quadratic(y)
    L1 = sum_inv + tail0
    log_tail = (math.log(y) - 1.0) * tail0 + prof._mu_S / y
    cert = prof._r_dev_S / (y * y)
    L1p = -(sum_log + log_tail)
    vals = LValues(L1=L1, L1_prime=L1p, error_bound=cert)
    prof._lvals = vals
    return vals


def class_number_estimate(D: int) -> tuple[int, float]:
    """(round(w sqrt(D) L1 / 2pi), pre-rounding residual)."""
    L1 = L_values(D).L1
    val = unit_count(D) * math.sqrt(D) * L1 / (2 * math.pi)
    return round(val), abs(val - round(val))


def dirichlet_convolution_table(D: int, N: int) -> np.ndarray:
    """(1 * chi)(n) for n = 0..N, exact integers."""
    prof = char_profile(D)
    conv = np.zeros(N + 1, dtype=np.int64)
    chi = prof.chi
    for d in range(1, N + 1):
        cd = chi[d % D]
        if cd:
            conv[d::d] += cd
    return conv


@dataclass(frozen=True)
class WeightedSums:
    Sigma0: float
    Sigma1: float
    main0: float
    main1: float


def weighted_dirichlet_sums(D: int, x) -> WeightedSums:
    """sum_{n<=x} (1*chi)(n)(1-n/x) and its 1/n-weighted variant, with the
    predicted main terms (x/2) L1 and L1 (log x + gamma - 1) + L1'."""
    if x < 3:
        raise ValueError("x must be >= 3")
    N = math.floor(x)
    conv = dirichlet_convolution_table(D, N).astype(np.float64)[1:]
    n = np.arange(1, N + 1, dtype=np.float64)
    weight = 1.0 - n / x
    lv = L_values(D)
    return WeightedSums(
        Sigma0=float(np.dot(conv, weight)),
        Sigma1=float(np.dot(conv / n, weight)),
        main0=x / 2 * lv.L1,
        main1=lv.L1 * (math.log(x) + EULER_GAMMA - 1) + lv.L1_prime,
    )


@dataclass(frozen=True)
class ErrorFunctionals:
    x: float
    E0: float
    E1: float
    argmin_y0: float
    argmin_y1: float


def _y_grid(limit: float, ratio: float = 1.1) -> np.ndarray:
    ys = set()
    y = 1.0
    while y <= limit:
        ys.add(int(round(y)))
        y *= ratio
    ys.add(max(int(limit), 1))
    return np.array(sorted(v for v in ys if 1 <= v <= limit), dtype=np.int64)


def _functional_minima(prof: CharacterProfile, x: float, ys: np.ndarray,
                       tails: np.ndarray) -> ErrorFunctionals:
    absS = np.abs(prof.S_mod)
    e0 = ys.astype(np.float64) ** 2 / x + absS[ys % prof.D] + x * tails
    logx = math.log(max(x, 1.0))
    e1 = (ys / x
          + logx * (np.log(ys) * tails + prof._mu_absS / ys
                    + prof._r_dev_absS / ys.astype(np.float64) ** 2))
    i0 = int(np.argmin(e0))
    i1 = int(np.argmin(e1))
    return ErrorFunctionals(x=float(x), E0=float(e0[i0]), E1=float(e1[i1]),
                            argmin_y0=float(ys[i0]), argmin_y1=float(ys[i1]))


def error_functionals(D: int, x, ratio: float = 1.1) -> ErrorFunctionals:
    """Grid minima of the two error functionals attached to chi_{-D}.

    E0 terms are evaluated exactly (closed-form tail); the E1 tail carries
    its truncation certificate, so both reported values are upper bounds for
    the true grid minima.  A finer grid ratio never increases them.
    """
    if x < 1:
        raise ValueError("x must be >= 1")
    prof = char_profile(D)
    ys = _y_grid(float(x), ratio)
    tails = np.asarray(prof.tail_quadratic_abs(ys))
    return _functional_minima(prof, float(x), ys, tails)


@dataclass(frozen=True)
class LocalDensitySum:
    sum: float
    main: float
    residual: float


def sum_local_densities(f: Form, z: float) -> LocalDensitySum:
    """sum_{l < z} g(l) with g treated as completely multiplicative, against
    the predicted L1 log z + L1'."""
    if z < 1:
        raise ValueError("z must be >= 1")
    D = f.D
    N = math.ceil(z) - 1 if math.ceil(z) == z else math.floor(z)
    total = 0.0
    if N >= 1:
        g = np.zeros(N + 1, dtype=np.float64)
        g[1] = 1.0
        if N >= 2:
            table = shared_prime_table(N)
            gp = {p: float(local_density_g(f, p)) for p in table.primes if p <= N}
            spf = _smallest_prime_factor(N)
            for n in range(2, N + 1):
                p = spf[n]
                g[n] = g[n // p] * gp[p]
        total = float(np.sum(g))
    lv = L_values(D)
    main = lv.L1 * math.log(z) + lv.L1_prime if z > 1 else lv.L1_prime
    return LocalDensitySum(sum=total, main=main, residual=total - main)


_spf_cache: dict[int, np.ndarray] = {}


def _smallest_prime_factor(N: int) -> np.ndarray:
    for lim, tab in _spf_cache.items():
        if lim >= N:
            return tab
    spf = np.arange(N + 1, dtype=np.int64)
    for p in range(2, math.isqrt(N) + 1):
        if spf[p] == p:
            sl = spf[p * p :: p]
            sl[sl == np.arange(p * p, N + 1, p)] = p
    _spf_cache.clear()
    _spf_cache[N] = spf
    return spf


@dataclass(frozen=True)
class DiscriminantFamily:
    Q: int
    members: tuple[int, ...]


def family(Q: int) -> DiscriminantFamily:
    """All D with 3 <= D <= Q and -D = 0, 1 (mod 4)."""
    if Q < 3:
        raise ValueError("Q must be >= 3")
    members = tuple(D for D in range(3, Q + 1) if D % 4 in (0, 3))
    return DiscriminantFamily(Q=Q, members=members)


@dataclass(frozen=True)
class ExceptionalReport:
    Q: int
    epsilon: float
    total: int
    violators_E: int
    violators_L: int
    fraction_E: float
    fraction_L: float


def _x_grid(lo: float, hi: float, per_decade: int = 4) -> list[float]:
    if hi < lo:
        hi = lo
    n = max(int(math.ceil(math.log10(hi / lo) * per_decade)), 1)
    return [lo * (hi / lo) ** (k / n) for k in range(n + 1)]


def scan_discriminant(D: int, epsilon: float, x_cap: float = 1e7) -> tuple[bool, bool]:
    """(violates_E, violates_L) for one discriminant.

    Tests E0 <= x^(7/8+eps) and E1 <= x^(-1/8+eps) on a log grid over
    [D^eps, D^(2+eps)] (capped), and -L'/L <= 10 log log D.
    """
    prof = char_profile(D)
    x_lo = float(D) ** epsilon
    x_hi = min(float(D) ** (2 + epsilon), x_cap)
    xs = _x_grid(x_lo, x_hi)
    ys = _y_grid(xs[-1])
    tails = np.asarray(prof.tail_quadratic_abs(ys))
    viol_E = False
    for x in xs:
        sel = ys <= x
        if not np.any(sel):
            sel = ys <= ys[0]
        ef = _functional_minima(prof, x, ys[sel], tails[sel])
        if ef.E0 > x ** (7 / 8 + epsilon) or ef.E1 > x ** (-1 / 8 + epsilon):
            viol_E = True
            break
    lv = L_values(D)
    viol_L = (-lv.L1_prime / lv.L1) > 10 * math.log(math.log(D))
    return viol_E, viol_L


def average_exceptional_report(Q: int, epsilon: float, x_cap: float = 1e7,
                               jobs: int = 1) -> ExceptionalReport:
    """Count family members violating the average character-sum envelopes."""
    if Q < 100:
        raise ValueError("Q must be >= 100")
    if not 0 < epsilon < 0.125:
        raise ValueError("epsilon must lie in (0, 1/8)")
    members = family(Q).members
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            flags = list(pool.map(_scan_job, ((D, epsilon, x_cap) for D in members),
                                  chunksize=32))
    else:
        flags = [scan_discriminant(D, epsilon, x_cap) for D in members]
    ve = sum(1 for e, _ in flags if e)
    vl = sum(1 for _, l in flags if l)
    total = len(members)
    return ExceptionalReport(Q=Q, epsilon=epsilon, total=total,
                             violators_E=ve, violators_L=vl,
                             fraction_E=ve / total, fraction_L=vl / total)


def _scan_job(args: tuple[int, float, float]) -> tuple[bool, bool]:
    return scan_discriminant(*args)

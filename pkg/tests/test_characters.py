import math

import pytest

from bqfsieve.arith import kronecker
from bqfsieve.characters import (EULER_GAMMA, L_values, average_exceptional_report,
                                 char_prefix_sums, char_profile,
                                 class_number_estimate,
                                 dirichlet_convolution_table, error_functionals,
                                 family, sum_local_densities,
                                 weighted_dirichlet_sums)
from bqfsieve.forms import Form, enumerate_class_set, fundamental_part


def test_char_prefix_sums_examples():
    ps4 = char_prefix_sums(4, 4)
    assert ps4.S.tolist() == [0, 1, 1, 0, 0]
    ps3 = char_prefix_sums(3, 6)
    assert ps3.S[6] == 0
    assert ps3.S[0] == 0


def test_char_prefix_sums_rejects():
    with pytest.raises(ValueError):
        char_prefix_sums(5, 10)


def test_profile_matches_kronecker():
    for D in (3, 4, 12, 23, 40, 163):
        prof = char_profile(D)
        for n in range(1, 2 * D + 1):
            assert prof.chi_at(n) == kronecker(-D, n), (D, n)


def test_prefix_sum_step_invariant():
    for D in (3, 8, 23, 100):
        prof = char_profile(D)
        vals = [prof.S(t) for t in range(3 * D)]
        assert all(abs(vals[t + 1] - vals[t]) <= 1 for t in range(len(vals) - 1))


def test_polya_vinogradov_envelope_measured():
    for D in range(3, 501):
        if D % 4 not in (0, 3):
            continue
        prof = char_profile(D)
        assert prof.s_max <= math.sqrt(D) * (2 + math.log(D)), D


def test_tail_quadratic_against_truncated_sum():
    prof = char_profile(23)
    for y in (7, 23, 100):
        # truncated brute sum + exact mean tail correction bounds the value
        N = 10**6
        brute = sum(prof.S(n) / (n * (n + 1)) for n in range(y, N))
        exact = prof.tail_quadratic(y)
        assert abs(brute - exact) < 5e-6  # remaining tail is mu_S/N-sized


def test_L_values_classical():
    lv4 = L_values(4)
    assert abs(lv4.L1 - math.pi / 4) < 1e-6
    lv3 = L_values(3)
    assert abs(lv3.L1 - math.pi / (3 * math.sqrt(3))) < 1e-6
    # round(w sqrt(D) L1 / 2pi) recovers h(-23) = 3
    h, resid = class_number_estimate(23)
    assert h == 3 and resid < 0.5


def test_L_values_rejects_non_discriminant():
    with pytest.raises(ValueError):
        L_values(7**2 - 48)  # 1 is not a discriminant


def test_L1_positive_at_desk_scale():
    for D in range(3, 500):
        if D % 4 in (0, 3):
            assert L_values(D).L1 > 0, D


def test_class_number_formula_subset():
    for D in range(3, 300):
        if D % 4 not in (0, 3):
            continue
        h_formula, resid = class_number_estimate(D)
        assert resid < 0.5, D
        assert h_formula == enumerate_class_set(D).h, D


def test_weighted_dirichlet_sums_hand_value():
    ws = weighted_dirichlet_sums(3, 3)
    assert abs(ws.Sigma0 - 2 / 3) < 1e-12


def test_weighted_dirichlet_sums_rejects_small_x():
    with pytest.raises(ValueError):
        weighted_dirichlet_sums(3, 2)


def conv_direct(D, N):
    prof = char_profile(D)
    out = [0] * (N + 1)
    for n in range(1, N + 1):
        out[n] = sum(prof.chi_at(d) for d in range(1, n + 1) if n % d == 0)
    return out


def test_convolution_two_paths():
    for D in (3, 4, 23, 40):
        table = dirichlet_convolution_table(D, 1000)
        assert table.tolist() == conv_direct(D, 1000), D


def test_weighted_sums_against_error_functional():
    for D in (3, 4, 23):
        for x in (100, 1000, 10**4):
            ws = weighted_dirichlet_sums(D, x)
            ef = error_functionals(D, x)
            assert abs(ws.Sigma0 - ws.main0) <= 2 * ef.E0, (D, x)
            assert abs(ws.Sigma1 - ws.main1) <= 2 * ef.E1, (D, x)


def test_weighted_sums_ratio_converges():
    ratios = []
    for k in range(2, 7):
        ws = weighted_dirichlet_sums(4, 10**k)
        ratios.append(abs(ws.Sigma0 / ws.main0 - 1))
    assert all(r2 < r1 for r1, r2 in zip(ratios, ratios[1:]))
    assert ratios[-1] < 1e-5


def test_error_functionals_basic():
    ef = error_functionals(3, 100)
    assert ef.E0 >= 0 and ef.E1 >= 0
    assert math.isfinite(ef.E0) and math.isfinite(ef.E1)
    assert 1 <= ef.argmin_y0 <= 100 and 1 <= ef.argmin_y1 <= 100


def test_error_functionals_envelopes_at_typical_point():
    ef = error_functionals(4, 10**4)
    assert ef.E0 <= (10**4) ** (7 / 8 + 0.1)
    assert ef.E1 <= (10**4) ** (-1 / 8 + 0.1)


def test_error_functionals_monotone_under_refinement():
    # grid at ratio r^2 is a subset of the grid at ratio r, so the reported
    # minima cannot increase under refinement
    for D in (3, 23, 40):
        for x in (50, 1000, 10**5):
            coarse = error_functionals(D, x, ratio=1.1)
            fine = error_functionals(D, x, ratio=math.sqrt(1.1))
            assert fine.E0 <= coarse.E0 + 1e-12
            assert fine.E1 <= coarse.E1 + 1e-12


def test_error_functional_reported_values_are_upper_bounds():
    # brute-force the defining expressions at the argmin (long truncated sums)
    D, x = 23, 1000
    prof = char_profile(D)
    ef = error_functionals(D, x)
    y0, y1 = int(ef.argmin_y0), int(ef.argmin_y1)
    N = 2 * 10**6
    tail0 = sum(abs(prof.S(n)) / (n * (n + 1)) for n in range(y0, N))
    brute0 = y0**2 / x + abs(prof.S(y0)) + x * tail0
    assert brute0 <= ef.E0 + x * (prof.s_max / N) + 1e-9
    tail1 = sum(abs(prof.S(n)) * (math.log(n) / n - math.log(n + 1) / (n + 1))
                for n in range(y1, N))
    brute1 = y1 / x + math.log(x) * tail1
    assert brute1 <= ef.E1 + math.log(x) * prof.s_max * (1 + math.log(N)) / N + 1e-9


def test_sum_local_densities_edges():
    f = Form(1, 0, 1)
    assert sum_local_densities(f, 1).sum == 0.0
    assert sum_local_densities(f, 2).sum == 1.0


def test_sum_local_densities_residual():
    for f, z in ((Form(1, 0, 1), 1000), (Form(1, 1, 1), 1000),
                 (Form(2, 1, 3), 500), (Form(1, 0, 6), 2000)):
        sl = sum_local_densities(f, z)
        lv = L_values(f.D)
        ef = error_functionals(f.D, z)
        assert abs(sl.residual) <= 5 * (lv.L1 + ef.E1 + ef.E0 / z), (f, z)


def test_family():
    assert family(8).members == (3, 4, 7, 8)
    assert family(3).members == (3,)
    assert len(family(20).members) == 10
    with pytest.raises(ValueError):
        family(2)


def test_chi_factorization_through_fundamental_part():
    # chi_{-D}(n) = chi_Delta(n) * [gcd(n, k) = 1] for -D = Delta k^2
    import random

    rng = random.Random(3)
    nonfund = [D for D in range(3, 2000)
               if D % 4 in (0, 3) and fundamental_part(D)[1] > 1]
    for D in rng.sample(nonfund, 100):
        delta_abs, k = fundamental_part(D)
        prof = char_profile(D)
        prof_f = char_profile(delta_abs)
        for n in range(1, 1001):
            expect = prof_f.chi_at(n) if math.gcd(n, k) == 1 else 0
            assert prof.chi_at(n) == expect, (D, n)


def test_average_exceptional_report_runs():
    rep = average_exceptional_report(100, 0.1)
    assert rep.total == len(family(100).members)
    assert 0 <= rep.fraction_E <= 1 and 0 <= rep.fraction_L <= 1
    assert rep.violators_L <= rep.total


def test_average_exceptional_report_rejects():
    with pytest.raises(ValueError):
        average_exceptional_report(50, 0.1)
    with pytest.raises(ValueError):
        average_exceptional_report(100, 0.2)
    with pytest.raises(ValueError):
        average_exceptional_report(100, 0.0)


def test_euler_gamma_constant():
    assert abs(EULER_GAMMA - 0.57721566490153286) < 1e-15

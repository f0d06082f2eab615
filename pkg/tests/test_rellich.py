import numpy as np
import pytest
from fractions import Fraction
from scipy.integrate import quad

from hardyrellich import manifolds as mf
from hardyrellich import rellich
from hardyrellich.errors import DomainError, RangeError, SupportError
from hardyrellich.radial import (
    RadialFunction,
    bilaplacian_form,
    bump,
    grid_covering,
    seeded_bumps,
    weighted_l2,
)


def test_mode_eigenvalues():
    assert rellich.mode_eigenvalue(0, 7) == 0
    assert rellich.mode_eigenvalue(1, 5) == 4
    assert rellich.mode_eigenvalue(2, 5) == 10


def test_mode_multiplicities():
    assert rellich.mode_multiplicity(0, 7) == 1
    assert rellich.mode_multiplicity(1, 7) == 7
    assert rellich.mode_multiplicity(2, 5) == 14  # C(6,2) - C(4,0)


def test_coefficients_exact_values():
    assert rellich.sinh4_coefficient(0, 5) == 1
    assert rellich.sinh2_coefficient(0, 5) == 12
    assert rellich.sinh4_coefficient(1, 5) == 27
    with pytest.raises(DomainError):
        rellich.sinh4_coefficient(0, 4)


def test_coefficient_minima_exact_rational():
    for N in range(5, 13):
        tab = rellich.mode_table(N, 50)
        a_min = min(t.sinh4_coeff for t in tab)
        b_min = min(t.sinh2_coeff for t in tab)
        assert a_min == rellich.min_sinh4_closed_form(N)
        assert b_min == rellich.min_sinh2_closed_form(N)
        # both minima attained at n = 0
        assert tab[0].sinh4_coeff == a_min and tab[0].sinh2_coeff == b_min
        assert all(t.sinh4_coeff > 0 and t.sinh2_coeff > 0 for t in tab)


def test_euclidean_rellich_split():
    holds, in_range = rellich.verify_euclidean_rellich_split(5)
    assert holds and in_range
    assert 9 + 16 == 25  # N = 5 numerics of the same statement
    holds, in_range = rellich.verify_euclidean_rellich_split(4)
    assert holds and not in_range  # algebraic identity outside the hypothesis
    assert all(rellich.verify_euclidean_rellich_split(N)[0] for N in range(5, 51))
    assert rellich.verify_euclidean_rellich_split(6)[0]
    assert 9 + 15 * 9 == 144 == 36 * 4


def test_joint_sharpness_sum():
    for N in range(5, 13):
        assert Fraction(9, 16) + rellich.min_sinh4_closed_form(N) == Fraction(
            N * N * (N - 4) ** 2, 16
        )


def test_sinh_hardy_1d_margins():
    rep = rellich.check_sinh_hardy_1d(bump(1.0, 3.0))
    assert rep.margin > 0
    zero = RadialFunction(
        lambda r: np.zeros_like(np.asarray(r, float)),
        lambda r: np.zeros_like(np.asarray(r, float)),
        lambda r: np.zeros_like(np.asarray(r, float)),
        support=(1.0, 3.0),
    )
    assert rellich.check_sinh_hardy_1d(zero).margin == 0.0


def test_sinh_hardy_1d_proof_substitution():
    # u = sinh(r) * w, the substitution used to prove the bound, stays valid
    w = bump(1.0, 3.0)

    def value(r):
        return np.sinh(r) * w(r)

    def d1(r):
        return np.cosh(r) * w(r) + np.sinh(r) * w.d1(r)

    def d2(r):
        return np.sinh(r) * w(r) + 2 * np.cosh(r) * w.d1(r) + np.sinh(r) * w.d2(r)

    u = RadialFunction(value, d1, d2, support=w.support, label="sinh*bump")
    assert rellich.check_sinh_hardy_1d(u).margin >= 0


def test_reduced_form_matches_bilaplacian():
    worst = 0.0
    for N in (5, 6, 7, 8):
        man = mf.hyperbolic(N)
        for u in seeded_bumps(100 + N, 5, 0.4, 5.0):
            grid = grid_covering(u.support, 4096)
            bf = bilaplacian_form(u, man, grid)
            rf = rellich.radial_reduced_form(
                rellich.reduced_from_radial(u, N), N, 0, grid
            )
            worst = max(worst, abs(bf - rf) / bf)
    assert worst <= 1e-5


def test_reduced_form_zero_and_support_guard():
    zero = RadialFunction(
        lambda r: np.zeros_like(np.asarray(r, float)),
        lambda r: np.zeros_like(np.asarray(r, float)),
        lambda r: np.zeros_like(np.asarray(r, float)),
        support=(1.0, 2.0),
    )
    grid = grid_covering((1.0, 2.0), 256)
    assert rellich.radial_reduced_form(zero, 5, 0, grid) == 0.0
    wide = RadialFunction(zero.value, zero.d1, zero.d2, support=(0.0, np.inf))
    with pytest.raises(SupportError):
        rellich.radial_reduced_form(wide, 5, 0, grid)


def test_reduced_form_mode_difference_oracle():
    # the n = 1 form differs from n = 0 by the lambda_1 cross terms
    u = bump(0.8, 2.5)
    d = rellich.reduced_from_radial(u, 5)
    grid = grid_covering(u.support, 4096)
    r, w = grid.nodes, grid.quad_weights
    f0 = rellich.radial_reduced_form(d, 5, 0, grid)
    f1 = rellich.radial_reduced_form(d, 5, 1, grid)
    lam1 = rellich.mode_eigenvalue(1, 5)
    s2 = rellich._inv_sinh_sq(r)
    base = d.d2(r) - (2.0 / np.tanh(r) ** 2 + 2.0) * d(r)
    extra = float(np.dot(w, -2 * lam1 * s2 * d(r) * base + lam1**2 * s2**2 * d(r) ** 2))
    assert (f1 - f0) == pytest.approx(extra, rel=1e-10)


def test_mode_chain_margins():
    for n in range(6):
        d = rellich.reduced_from_radial(bump(0.8, 2.5), 5)
        rep = rellich.mode_chain_margin(d, 5, n)
        assert rep.margin > 0


def test_poincare_rellich_margins():
    for support in ((1.0, 2.0), (10.0, 11.0)):
        rep = rellich.check_poincare_rellich(bump(*support), 5)
        assert rep.margin > 0
    with pytest.raises(DomainError):
        rellich.check_poincare_rellich(bump(1.0, 2.0), 4)


def test_poincare_rellich_small_ball_euclidean_weight():
    # near the pole the right side approaches the euclidean Rellich weight
    u = bump(0.01, 0.02)
    rep = rellich.check_poincare_rellich(u, 5)
    assert rep.margin > 0
    man = mf.hyperbolic(5)
    g = grid_covering(u.support, 4096)
    euclid_weight = 25.0 / 16.0 * weighted_l2(u, lambda rr: 1.0 / rr**4, man, g)
    assert rep.rhs == pytest.approx(euclid_weight, rel=5e-3)


def test_poincare_rellich_seeded_margins():
    worst = np.inf
    for N in (5, 6, 8, 10):
        for u in seeded_bumps(31 + N, 10, 0.3, 6.0):
            rep = rellich.check_poincare_rellich(u, N, nodes=2048)
            worst = min(worst, rep.margin / abs(rep.lhs))
    assert worst >= -1e-8


def test_estimate_sharp_rellich_r2():
    vals = []
    for rmax in (1e4, 1e5, 1e6):
        est = rellich.estimate_sharp_rellich_r2(5, r_max=rmax, M=4096)
        vals.append(est.value)
        assert est.value >= 2.0 - 1e-2
    assert vals[2] <= vals[1] <= vals[0]
    assert 2.0 - 1e-2 <= vals[2] <= 2.6
    est6 = rellich.estimate_sharp_rellich_r2(6, M=4096)
    assert est6.value >= 25.0 / 8.0 - 1e-2


def test_one_d_anchors():
    h = rellich.one_d_hardy_constant(M=4096)
    assert abs(h.value - 0.25) <= 1e-2
    # halving r_min widens the log window: the estimate cannot increase
    h_wide = rellich.one_d_hardy_constant(r_min=1e-12, M=4096)
    assert h_wide.value <= h.value
    r = rellich.one_d_rellich_constant(M=4096)
    assert abs(r.value - 9.0 / 16.0) <= 1e-2
    e = rellich.euclidean_rellich_constant(5, M=4096)
    assert abs(e.value - 25.0 / 16.0) <= 5e-2


def test_asymptotic_constants_exact():
    c = rellich.asymptotic_constants(5)
    assert c.c1 == pytest.approx((1.0 / 12.0) ** (1.0 / 3.0), rel=1e-15)
    assert c.c2_over_c1 == Fraction(8, 9)
    assert c.k1_exact == Fraction(-8, 9)
    assert c.k1_exact - 2 * c.c2_over_c1 == Fraction(-8, 3)
    for N in range(5, 13):
        assert rellich.asymptotic_constants(N).consistency_exact


def test_s_of_r_small_radius_against_quad_oracle():
    # independent oracle: the substituted integral int_0^{e^-r} y^3 (1-y^2)^-4 dy
    N = 5
    cov = rellich.change_of_variable(N)
    r0 = 1e-3
    I = quad(lambda y: y ** (N - 2) * (1 - y * y) ** (-(N - 1)),
             0.0, np.exp(-r0), limit=200)[0]
    s_oracle = cov.prefactor * I ** (-1.0 / (N - 2))
    assert cov.s_of_r(r0) == pytest.approx(s_oracle, rel=1e-6)
    assert cov.s_of_r(r0) / r0 == pytest.approx(1.0, abs=1e-3)


def test_s_of_r_growth_and_monotonicity():
    cov = rellich.change_of_variable(5)
    c = rellich.asymptotic_constants(5)
    dev = abs(cov.s_of_r(10.0) / (c.c1 * np.exp(40.0 / 3.0)) - 1.0)
    assert dev < 1e-8  # deviation is O(e^{-2r})
    r = np.geomspace(1e-3, 39.0, 128)
    assert np.all(np.diff(cov.s_of_r(r)) > 0)
    s_big = cov.s_of_r(50.0)  # series branch beyond the table
    assert s_big == pytest.approx(c.c1 * np.exp(50.0 * 4.0 / 3.0), rel=1e-8)


def test_r_of_s_roundtrip_and_range():
    cov = rellich.change_of_variable(5)
    r = np.array([0.5, 1.5, 3.0, 20.0])
    s = cov.s_of_r(r)
    assert np.max(np.abs(cov.r_of_s(s) - r) / r) < 1e-10
    with pytest.raises(RangeError):
        cov.r_of_s(1e30)


def test_two_term_expansion_ratio_precise():
    errs = rellich.two_term_expansion_error_precise(5, [8.0, 12.0])
    assert errs[1] < 0.5 * errs[0]
    # float table agrees with the precise series while above the noise floor
    for r in (3.0, 4.0, 5.0):
        a = float(rellich.two_term_expansion_error(5, r))
        b = rellich.two_term_expansion_error_precise(5, [r])[0]
        assert a == pytest.approx(b, rel=1e-3)


def test_density_correction_fit():
    fits = rellich.density_correction_fit(5, np.array([8.0, 10.0, 12.0]))
    k1 = rellich.asymptotic_constants(5).k1
    assert np.max(np.abs(fits / k1 - 1.0)) <= 0.05


def test_mapped_rellich_margin_and_equivalence():
    rep = rellich.check_mapped_rellich(bump(2.0, 5.0), 5)
    assert rep.margin > 0
    zero = RadialFunction(
        lambda s: np.zeros_like(np.asarray(s, float)),
        lambda s: np.zeros_like(np.asarray(s, float)),
        lambda s: np.zeros_like(np.asarray(s, float)),
        support=(2.0, 5.0),
    )
    assert rellich.check_mapped_rellich(zero, 5).margin == 0.0
    u = bump(1.0, 2.0)
    m_rad = rellich.principal_rellich_margin(u, 5, nodes=8192)
    m_map = rellich.check_mapped_rellich(
        rellich.mapped_from_radial(u, 5), 5, nodes=8192
    ).margin
    assert abs(m_rad - m_map) / abs(m_rad) <= 1e-4

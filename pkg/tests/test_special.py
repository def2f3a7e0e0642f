"""Gamma machinery and the oscillatory kernel J_{a,j}.

The heavy oracles are mpmath (log-gamma) and the exact identities the
kernel satisfies: the duplication-formula rewrite tying G_j to Q, the
contour-independence of the integral, the parameter-free main term,
and the derivative relation.  Between them every code path of the
quadrature is pinned by something it cannot have been tuned against.
"""

import numpy as np
import pytest
import mpmath as mp

from gl3lab.coeffs import CuspFormSpec
from gl3lab.errors import (
    BelowThreshold,
    ContourViolation,
    NonConvergent,
    Pole,
    RangeViolation,
)
from gl3lab.special import (
    ContourSpec,
    check_derivative_relation,
    check_perron_meijer,
    default_contour,
    g_factor,
    gamma_quotient_Q,
    log_gamma,
    meijer_asymptotic,
    meijer_contour,
)

ZERO = CuspFormSpec(alpha=0.0, beta=0.0, gamma=0.0, theta=0.0,
                    label="zero", source_kind="synthetic")
_R = 9.53369526135356
SYM2ISH = CuspFormSpec(alpha=2j * _R, beta=0.0, gamma=-2j * _R, theta=0.0,
                       label="sym2ish", source_kind="sym2_maass")


# -- log_gamma ---------------------------------------------------------------

def test_log_gamma_classical_values():
    assert abs(log_gamma(1.0)) < 1e-14
    assert abs(log_gamma(0.5) - np.log(np.sqrt(np.pi))) < 1e-14
    # negative axis resolves as the limit from above: Gamma(-1/2) = -2 sqrt(pi)
    want = complex(np.log(2 * np.sqrt(np.pi)), -np.pi)
    assert abs(log_gamma(-0.5) - want) < 1e-13


def test_log_gamma_matches_reference_everywhere():
    rng = np.random.default_rng(11)
    re = rng.uniform(-8, 10, 700)
    im = rng.uniform(-50, 50, 700)
    im = np.where(np.abs(im) < 1e-2, 1.0, im)  # stay off the cut
    zs = re + 1j * im
    with mp.workdps(30):
        for z in zs:
            ref = complex(mp.loggamma(complex(z)))
            got = log_gamma(complex(z))
            assert abs(got - ref) <= 5e-14 * max(1.0, abs(ref))


def test_log_gamma_matches_reference_positive_reals():
    rng = np.random.default_rng(12)
    xs = np.concatenate([rng.uniform(0.02, 1.0, 150),
                         rng.uniform(1.0, 40.0, 150)])
    with mp.workdps(30):
        for x in xs:
            ref = complex(mp.loggamma(float(x)))
            got = log_gamma(float(x))
            assert abs(got - ref) <= 5e-14 * max(1.0, abs(ref))
            assert abs(got.imag) < 1e-15


def test_log_gamma_recurrence():
    rng = np.random.default_rng(13)
    # exact (no branch slip) on the right half plane
    zs = rng.uniform(0.1, 6, 40) + 1j * rng.uniform(-20, 20, 40)
    for z in zs:
        z = complex(z)
        res = log_gamma(z + 1) - log_gamma(z) - np.log(z)
        assert abs(res) < 1e-12


def test_log_gamma_recurrence_branch_lattice():
    rng = np.random.default_rng(14)
    zs = rng.uniform(-6, 0.4, 60) + 1j * rng.uniform(-20, 20, 60)
    zs = zs[np.abs(zs.imag) > 1e-2]
    for z in zs:
        z = complex(z)
        res = log_gamma(z + 1) - log_gamma(z) - np.log(z)
        k = round(res.imag / (2 * np.pi))
        assert abs(res - 2j * np.pi * k) < 1e-11


def test_log_gamma_pole():
    for z in (0.0, -1.0, -7.0, 0j, complex(-3, 0)):
        with pytest.raises(Pole):
            log_gamma(z)
    with pytest.raises(Pole):
        log_gamma(np.array([1.0 + 0j, -2.0 + 0j]))


def test_log_gamma_vector_matches_scalar():
    rng = np.random.default_rng(15)
    zs = rng.uniform(-4, 4, 25) + 1j * rng.uniform(-9, 9, 25)
    zs = zs[np.abs(zs.imag) > 1e-2]
    vec = log_gamma(zs)
    for i, z in enumerate(zs):
        assert vec[i] == log_gamma(complex(z))


# -- gamma quotients ----------------------------------------------------------

def test_q_real_on_real_axis_for_real_parameters():
    for a in (1, 2, 3):
        for s in (-0.31, -0.13, 0.11, 0.22):
            v = gamma_quotient_Q(s, a, 0, ZERO)
            assert abs(v.imag) < 1e-13 * max(1.0, abs(v))


def test_q_conjugate_reflection():
    rng = np.random.default_rng(16)
    for _ in range(12):
        s = complex(rng.uniform(-1, 1), rng.uniform(0.2, 8))
        v = gamma_quotient_Q(s, 2, 0, ZERO)
        w = gamma_quotient_Q(np.conj(s), 2, 0, ZERO)
        assert abs(w - np.conj(v)) < 1e-12 * max(1.0, abs(v))


def test_q_stirling_decay_exponent():
    # |Q(sigma + it)| ~ |t|^(1/2 - a - 6 sigma): the ten Stirling
    # exponentials cancel, leaving a pure power law
    for a in (1, 2, 3):
        sigma = 0.25 - a / 6 + 0.6
        expo = 0.5 - a - 6 * sigma
        for t in (40.0, 80.0):
            r = abs(gamma_quotient_Q(complex(sigma, 2 * t), a, 0, ZERO)
                    / gamma_quotient_Q(complex(sigma, t), a, 0, ZERO))
            assert abs(np.log2(r) - expo) < 0.08


def test_q_zero_at_denominator_pole():
    # s = -2 makes the three Gamma(s + ...) legs singular for the zero
    # spec while every numerator argument stays regular
    assert gamma_quotient_Q(-2.0, 1, 0, ZERO) == 0.0


def test_q_numerator_pole_names_factor():
    with pytest.raises(Pole, match="factor 4"):
        gamma_quotient_Q(-1.0, 2, 0, ZERO)


def test_g_factor_symmetry_point_and_frozen_value():
    assert abs(g_factor(0.5, 0, ZERO) - 1.0) < 1e-13
    assert abs(g_factor(0.0, 1, ZERO) - np.pi ** -1.5) < 1e-15


def test_g_factor_parity_zero_table():
    # with beta = 0 the factor vanishes identically at the residue
    # points of matching parity; this is what silences half the
    # L-value ladder downstream
    for spec in (ZERO, SYM2ISH):
        for nu in (0, 2, 4):
            assert g_factor(-nu, 0, spec) == 0.0
        for nu in (1, 3):
            assert g_factor(-nu, 0, spec) != 0.0
            assert g_factor(-nu, 1, spec) == 0.0
        for nu in (0, 2, 4):
            assert g_factor(-nu, 1, spec) != 0.0


def test_g_factor_real_on_real_axis():
    for s in (-0.4, 0.2, 0.45):
        v = g_factor(s, 0, ZERO)
        assert abs(v.imag) < 1e-13 * max(1.0, abs(v))


def test_kernel_rewrite_matches_g_factor():
    # G_j(s+j) / (s (s+1) ... (s+a)) == (-1/2)^(a+1) Q(s/2): the
    # duplication + reflection collapse behind the Perron identity
    rng = np.random.default_rng(7)
    for _ in range(20):
        s = complex(rng.uniform(-1.5, 1.5), rng.uniform(0.3, 12))
        for a in (1, 2, 3):
            for j in (0, 1):
                for spec in (ZERO, SYM2ISH):
                    kern = np.prod([s + i for i in range(a + 1)])
                    lhs = g_factor(s, j, spec) / kern
                    rhs = (-0.5) ** (a + 1) * gamma_quotient_Q(s / 2, a, j,
                                                               spec)
                    assert abs(lhs - rhs) < 1e-11 * max(abs(rhs), 1e-30)


# -- contours -----------------------------------------------------------------

def test_contour_validation_rejects_each_violation():
    good = default_contour(2, 0, 1e4, ZERO)
    good.validate(2, ZERO)
    bad = ContourSpec(sigma0=0.25 - 2 / 6, sigma1=good.sigma1,
                      Lambda=good.Lambda, t_max=good.t_max, step=good.step)
    with pytest.raises(ContourViolation, match="sigma0"):
        bad.validate(2, ZERO)
    bad = ContourSpec(sigma0=good.sigma0, sigma1=-1.0, Lambda=good.Lambda,
                      t_max=good.t_max, step=good.step)
    with pytest.raises(ContourViolation, match="sigma1"):
        bad.validate(2, ZERO)
    bad = ContourSpec(sigma0=good.sigma0, sigma1=good.sigma1, Lambda=5.0,
                      t_max=40.0, step=good.step)
    with pytest.raises(ContourViolation, match="Lambda"):
        bad.validate(2, SYM2ISH)
    bad = ContourSpec(sigma0=good.sigma0, sigma1=good.sigma1,
                      Lambda=good.Lambda, t_max=good.Lambda - 0.1,
                      step=good.step)
    with pytest.raises(ContourViolation, match="t_max"):
        bad.validate(2, ZERO)
    bad = ContourSpec(sigma0=good.sigma0, sigma1=good.sigma1,
                      Lambda=good.Lambda, t_max=good.t_max, step=0.0)
    with pytest.raises(ContourViolation, match="step"):
        bad.validate(2, ZERO)


def test_meijer_rejects_bad_inputs():
    with pytest.raises(RangeViolation):
        meijer_contour(0, 0, 1e4, ZERO)
    with pytest.raises(RangeViolation):
        meijer_contour(2, 2, 1e4, ZERO)
    with pytest.raises(RangeViolation):
        meijer_contour(2, 0, 0.0, ZERO)
    with pytest.raises(RangeViolation):
        meijer_asymptotic(1, 3, 1e4)


def test_contour_independence():
    # Cauchy: any two admissible contours agree
    base = meijer_contour(2, 0, 1e4, ZERO)
    alt = ContourSpec(sigma0=0.72, sigma1=-1.9, Lambda=2.75, t_max=640.0,
                      step=0.11)
    other = meijer_contour(2, 0, 1e4, ZERO, contour=alt)
    assert abs(base.value - other.value) <= base.est_error + other.est_error
    assert abs(base.value - other.value) < 1e-8 * abs(base.value)


def test_contour_independence_large_parameters():
    base = meijer_contour(2, 1, 1e5, SYM2ISH)
    cs = default_contour(2, 1, 1e5, SYM2ISH)
    alt = ContourSpec(sigma0=cs.sigma0 + 0.15, sigma1=cs.sigma1 - 0.6,
                      Lambda=cs.Lambda + 1.3, t_max=cs.t_max * 1.4,
                      step=cs.step * 0.8)
    other = meijer_contour(2, 1, 1e5, SYM2ISH, contour=alt)
    assert abs(base.value - other.value) < 1e-7 * abs(base.value)


def test_meijer_real_for_real_parameters():
    for a, j, y in ((1, 0, 1e3), (2, 1, 1e5), (3, 0, 1e6)):
        v = meijer_contour(a, j, y, ZERO).value
        assert abs(v.imag) <= 1e-9 * abs(v)


def test_meijer_main_term_pin():
    # frozen: J_{1,0}(1e6) and its parameter-free main term
    # -(3 pi)^(-1/2) cos(60 + pi/2)
    got = meijer_contour(1, 0, 1e6, ZERO).value
    assert abs(got - (-0.1180275893)) < 1e-8
    main = -(3 * np.pi) ** -0.5 * np.cos(6 * 1e6 ** (1 / 6) + np.pi / 2)
    assert abs(meijer_asymptotic(1, 0, 1e6).value - main) < 1e-15
    assert abs(got - main) <= 1.0 * 1e6 ** (-1 / 6)


def test_meijer_asymptotic_agreement_far_out():
    # the first omitted correction carries a constant below 1 for these
    # parameters, so the gap sits under y^(-a/6) in absolute terms while
    # the relative gap at y = 1e8 is still a few percent; percent-level
    # relative agreement only arrives around y ~ 1e12
    mv = meijer_contour(3, 1, 1e8, ZERO)
    asy = meijer_asymptotic(3, 1, 1e8)
    gap = abs(mv.value - asy.value)
    assert gap < 1.5 * 1e8 ** (-3 / 6)
    assert gap < 0.12 * abs(mv.value)

    far = meijer_contour(3, 1, 1e12, ZERO)
    far_asy = meijer_asymptotic(3, 1, 1e12)
    assert abs(far.value - far_asy.value) < 1e-2 * abs(far.value)


def test_asymptotic_ratio_converges():
    # deviation of contour/main from 1 shrinks like y^(-1/6) at points
    # where the cosine is safely away from its zeros; the constant
    # absorbs 1/|cos| because the main term itself carries the cosine
    for a in (1, 2, 3):
        for y in (1e4, 1e6, 1e8):
            phase = 6 * y ** (1 / 6) + np.pi * a / 2
            cosv = abs(np.cos(phase))
            if cosv < 0.1:
                continue
            main = meijer_asymptotic(a, 0, y).value
            got = meijer_contour(a, 0, y, ZERO).value
            assert abs(got / main - 1) <= 4.0 * y ** (-1 / 6) / cosv


def test_asymptotic_amplitude_and_parity():
    y = 4.1e5
    phase = 6 * y ** (1 / 6)
    a1 = meijer_asymptotic(1, 0, y).value / np.cos(phase + np.pi / 2)
    a2 = meijer_asymptotic(2, 0, y).value / np.cos(phase + np.pi)
    assert abs(a2 / a1 - y ** (-1 / 6)) < 1e-12
    j0 = meijer_asymptotic(2, 0, y).value
    amp = -(3 * np.pi) ** -0.5 * y ** (-1 / 6)
    assert abs(j0 - amp * np.cos(phase + np.pi)) < 1e-15
    j1 = meijer_asymptotic(2, 1, y).value
    assert abs(j1 - amp * np.cos(phase + 1.5 * np.pi)) < 1e-15


def test_asymptotic_below_threshold():
    with pytest.raises(BelowThreshold):
        meijer_asymptotic(2, 0, 50.0)
    assert meijer_asymptotic(2, 0, 50.0, threshold=10.0).method == "asymptotic"


def test_meijer_nonconvergent_on_tiny_truncation():
    cs = ContourSpec(sigma0=0.25 - 2 / 6 + 0.6, sigma1=-1.5, Lambda=1.5,
                     t_max=2.5, step=0.2)
    with pytest.raises(NonConvergent):
        meijer_contour(2, 0, 1e4, ZERO, contour=cs)


# -- the two kernel identities ------------------------------------------------

def test_perron_identity_spec_point():
    res = check_perron_meijer(2, 0, 1e2, ZERO)
    rhs = abs(meijer_contour(2, 0, 1e4, ZERO).value)
    assert res < 1e-6 * rhs


def test_perron_identity_random_arguments():
    rng = np.random.default_rng(21)
    for j in (0, 1):
        for _ in range(5):
            y = float(np.exp(rng.uniform(np.log(30), np.log(3e3))))
            res = check_perron_meijer(1, j, y, ZERO)
            rhs = abs(meijer_contour(1, j, y * y, ZERO).value)
            assert res < 1e-8 * max(rhs, 1e-12)


def test_perron_identity_large_parameters():
    res = check_perron_meijer(2, 0, 1e3, SYM2ISH)
    rhs = abs(meijer_contour(2, 0, 1e6, SYM2ISH).value)
    assert res < 1e-8 * rhs


def test_perron_residual_improves_with_step():
    # force the quadrature into its under-resolved regime: the refined
    # step stays closer to the identity than the coarse one
    base = default_contour(1, 0, 1e4, ZERO)
    coarse = ContourSpec(sigma0=base.sigma0, sigma1=base.sigma1,
                         Lambda=base.Lambda, t_max=base.t_max, step=12.0)
    fine = ContourSpec(sigma0=base.sigma0, sigma1=base.sigma1,
                       Lambda=base.Lambda, t_max=base.t_max, step=6.0)
    res_coarse = check_perron_meijer(1, 0, 1e2, ZERO, contour=coarse)
    res_fine = check_perron_meijer(1, 0, 1e2, ZERO, contour=fine)
    assert res_fine <= res_coarse * 1.05 + 1e-12


def test_derivative_relation_spec_point():
    res = check_derivative_relation(1, 0, 1e3, eta=1.0)
    rhs = abs(2 * 1e3 * meijer_contour(1, 0, 1e6, ZERO).value)
    assert res < 1e-4 * rhs


def test_derivative_relation_richardson_order():
    r1 = check_derivative_relation(1, 0, 1e3, eta=2.0)
    r2 = check_derivative_relation(1, 0, 1e3, eta=1.0)
    assert 2.8 < r1 / r2 < 5.5


def test_derivative_relation_j1_auto_step():
    res = check_derivative_relation(2, 1, 1e3, spec=ZERO)
    rhs = abs(2 * 1e3 ** 2 * meijer_contour(2, 1, 1e6, ZERO).value)
    assert res < 1e-5 * rhs


def test_full_contour_matches_symmetric_path():
    # white box: the conjugate-symmetry shortcut must agree with the
    # plain six-segment sweep
    from gl3lab import special as sp

    params = (0j, 0j, 0j)
    cs = default_contour(2, 0, 1e4, ZERO)
    ln_y = np.log(1e4)

    def log_f(s):
        num, den = sp._q_args(s, 2, 0, params)
        logq, zeros = sp._log_quotient(num, den, "Q")
        out = logq + s * ln_y
        return np.where(zeros, -np.inf, out) if zeros.any() else out

    half = sp._contour_pass(log_f, cs, 2, symmetric=True)
    full = sp._contour_pass(log_f, cs, 2, symmetric=False)
    assert abs(half - full) < 1e-10 * abs(full)

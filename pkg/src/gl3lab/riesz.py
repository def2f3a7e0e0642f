"""Direct-side Riesz objects: sharp sums, weighted sums, twisted L-values.

Everything here lives on the "sum over m <= x" side of the summation
formula.  The raw weighted sums are piecewise polynomials in x between
integers, so a single bank of prefix moments

    C_r[n] = sum_{m <= n} A(m,1) ph(m) m^r

evaluates any order in O(1) per point and integrates exactly: the
antiderivative of the order-a raw sum is the order-(a+1) raw sum, and
the residue polynomials integrate in closed form.  No quadrature is
used anywhere in this module.

L-values at non-positive integer arguments come from the functional
equation; the dual series converges absolutely for order nu >= 1 and is
summed with an explicit tail bound, while the borderline nu = 0 series
is evaluated with a smoothed (Cesaro-type) cutoff and an empirical
error estimate from the last two smoothing levels.

Prefix moments use a compensated cumulative sum (vectorized TwoSum
correction), and all reductions run in fixed ascending-m order, so
results are bit-identical regardless of how callers parallelize.
"""

from dataclasses import dataclass
from math import comb, factorial, gcd

import numpy as np

from .coeffs import dual_coefficient_row
from .errors import GammaPole, OutOfRange, Pole, RangeViolation, SlowConvergence
from .numtheory import Twist, kloosterman_row
from .special import g_factor

__all__ = [
    "RieszSum",
    "TwistedLValue",
    "sharp_sum",
    "riesz_raw",
    "twisted_L_value",
    "residue_polynomial",
    "a_tilde",
    "integrate_a_tilde",
    "h_average_residual",
    "interval_coefficients",
]

_A_CAP = 12  # sanity cap on Riesz order; nothing here needs more


@dataclass(frozen=True)
class TwistedLValue:
    """L_j(-nu+j, h/k) with the series-tail error estimate that produced it."""

    nu: int
    j: int
    twist: Twist
    value: complex
    est_error: float

    def __post_init__(self):
        if self.est_error < 0:
            raise RangeViolation("est_error must be nonnegative")


@dataclass(frozen=True)
class RieszSum:
    """One evaluated Riesz-weighted sum with its raw/residue breakdown.

    j is 0 or 1 for a fixed symmetrization parity, or "averaged" for the
    parity mean.  value is always raw - residue, bit-exactly.
    """

    a: int
    j: object
    x: float
    twist: Twist
    value: complex
    raw: complex
    residue: complex


# -- shared validation -------------------------------------------------------

def _check_a(a):
    a = int(a)
    if not 0 <= a <= _A_CAP:
        raise RangeViolation(f"Riesz order must be in 0..{_A_CAP}, got {a}")
    return a


def _check_j(j):
    if j not in (0, 1):
        raise RangeViolation(f"parity must be 0 or 1, got {j!r}")
    return int(j)


def _check_x(table, x, name="x"):
    x = float(x)
    if not np.isfinite(x) or x < 0:
        raise OutOfRange(f"{name}={x} must be a finite nonnegative real")
    if int(np.floor(x)) > table.M:
        raise OutOfRange(
            f"{name}={x} needs coefficients past table size {table.M}")
    return x


# -- compensated prefix sums -------------------------------------------------

def _compensated_cumsum(x):
    """Cumulative sum with a vectorized TwoSum correction pass.

    np.cumsum computes s[n] = fl(s[n-1] + x[n]) in fixed order; the
    rounding error of each of those additions is recovered exactly by
    the TwoSum identities, and a second cumsum of the recovered errors
    restores the compensated prefix values.  Error drops from O(n eps)
    to O(eps + n eps^2) with no Python loop.
    """
    if np.iscomplexobj(x):
        return _compensated_cumsum(x.real) + 1j * _compensated_cumsum(x.imag)
    s = np.cumsum(x)
    prev = np.empty_like(s)
    prev[0] = 0.0
    prev[1:] = s[:-1]
    z = s - prev
    err = (prev - (s - z)) + (x - z)
    err[0] = 0.0
    return s + np.cumsum(err)


class _SumEngine:
    """Prefix moments of A(m,1) under one phase mode, up to order a_max.

    mode "plus" weights by e(mh/k); "j0" and "j1" use the symmetrized
    phase e(mh/k) + (-1)^j e(-mh/k).  C has shape (a_max+1, M+1) with
    C[r, n] the compensated prefix sum of A(m,1) ph(m) m^r over m <= n.
    jump[n] is the single-term discontinuity used for primed halving.
    """

    def __init__(self, table, twist, mode, a_max):
        M = table.M
        k = twist.k
        idx = np.arange(M + 1)
        plus = np.exp((2j * np.pi / k) * ((idx * twist.h) % k))
        if mode == "plus":
            ph = plus
        elif mode == "j0":
            ph = plus + np.conj(plus)
        elif mode == "j1":
            ph = plus - np.conj(plus)
        else:
            raise RangeViolation(f"unknown phase mode {mode!r}")
        base = table.a_m1 * ph
        base[0] = 0.0
        mfl = idx.astype(np.float64)
        self.C = np.vstack([
            _compensated_cumsum(base * mfl ** r) for r in range(a_max + 1)])
        self.jump = base
        self.a_max = a_max
        self.M = M

    def raw(self, a, x):
        # (1/a!) sum'_{m<=x} A(m,1) ph(m) (x-m)^a via binomial expansion
        n = int(np.floor(x))
        acc = 0j
        for r in range(a + 1):
            acc += comb(a, r) * (-1) ** r * x ** (a - r) * self.C[r, n]
        if a == 0 and x == n and n >= 1:
            acc -= 0.5 * self.jump[n]
        return acc / factorial(a)


def _engine(table, twist, mode, a_need):
    key = ("riesz_engine", twist.h, twist.k, mode)
    eng = table._caches.get(key)
    if eng is None or eng.a_max < a_need:
        eng = _SumEngine(table, twist, mode, max(int(a_need), 3))
        table._caches[key] = eng
    return eng


# -- direct-side sums --------------------------------------------------------

def sharp_sum(x, twist, table):
    """Sum of A(m,1) e(mh/k) over m <= x with the last term halved at
    integer x."""
    x = _check_x(table, x)
    return complex(_engine(table, twist, "plus", 0).raw(0, x))


def riesz_raw(a, j, x, twist, table):
    """(1/a!) sum'_{m<=x} A(m,1) (e(mh/k) + (-1)^j e(-mh/k)) (x-m)^a."""
    a = _check_a(a)
    j = _check_j(j)
    x = _check_x(table, x)
    return complex(_engine(table, twist, f"j{j}", a).raw(a, x))


# -- twisted L-values via the functional equation ----------------------------

def _divisors(n):
    out = [d for d in range(1, int(n) + 1) if n % d == 0]
    return out


def _dual_series(nu, j, twist, table, tol):
    """Value and error estimate of the dual Dirichlet series.

    Terms are A(d,m) d^(-1-2nu) m^(-1-nu) (S(hbar,m;k/d) +
    (-1)^j S(hbar,-m;k/d)) summed over d | k and m.  For nu >= 1 the
    tail is estimated by partial summation against the measured prefix
    of the weighted coefficients, extrapolated at square-root growth
    with the constant read off the table (data with no cancellation
    inflates the constant and is penalized honestly); the truncation
    point is the first one whose estimate meets tol, and failure within
    the table raises SlowConvergence.  For nu = 0 the sum sits at the
    edge of convergence and is evaluated with a smoothstep cutoff over
    the full table, with est_error taken from the last two smoothing
    levels.
    """
    k, hb = twist.k, twist.h_bar
    M = table.M
    sgn = -1.0 if j else 1.0
    idx = np.arange(M + 1)
    mfl = idx[1:].astype(np.float64)

    term_cum = np.zeros(M, dtype=np.complex128)
    growth_c = 0.0
    for d in _divisors(k):
        c = k // d
        row = dual_coefficient_row(table, d, M)
        srow = kloosterman_row(hb, c)
        w = srow[idx % c] + sgn * srow[(-idx) % c]
        weighted = (row[1:] * w[1:]) * d ** (-(1.0 + 2 * nu))
        prefix = _compensated_cumsum(weighted)
        term_cum += _compensated_cumsum(weighted * mfl ** (-(1.0 + nu)))
        growth_c += 1.25 * np.max(np.abs(prefix) / np.sqrt(mfl))

    if nu >= 1:
        # |sum_{m>T}| <= C T^(-nu-1/2) (1 + (1+nu)/(nu+1/2)) given
        # |prefix(t)| <= C sqrt(t) beyond the table
        coeff = growth_c * (1.0 + (1.0 + nu) / (nu + 0.5))
        T_need = int(np.ceil((coeff / tol) ** (1.0 / (nu + 0.5))))
        if T_need > M:
            raise SlowConvergence(
                f"dual series tail estimate {coeff * M ** (-(nu + 0.5)):.3e} "
                f"at table size {M} exceeds tolerance {tol:.3e}")
        T = min(max(T_need, 32), M)
        value = complex(term_cum[T - 1])
        est = coeff * T ** (-(nu + 0.5))
        est = max(est, abs(term_cum[T - 1] - term_cum[T // 2 - 1]))
        return value, est

    # nu = 0: smoothed cutoff; the raw partial sums oscillate but the
    # smoothed tail gains decay from the cancellation in both A(d,m)
    # and the Kloosterman weight
    deltas = np.empty(M, dtype=np.complex128)
    deltas[0] = term_cum[0]
    deltas[1:] = term_cum[1:] - term_cum[:-1]

    def smoothed(T):
        u = mfl[:T] / T
        ramp = np.clip(2.0 * (1.0 - u), 0.0, 1.0)
        wgt = ramp * ramp * (3.0 - 2.0 * ramp)
        return complex(np.sum(deltas[:T] * wgt))

    v_full = smoothed(M)
    v_half = smoothed(M // 2)
    est = abs(v_full - v_half)
    if est > tol:
        raise SlowConvergence(
            f"smoothed borderline series moved by {est:.3e} between the last "
            f"two cutoffs at table size {M}, above tolerance {tol:.3e}")
    return v_full, est


def twisted_L_value(nu, j, twist, table, tol=1e-8):
    """L_j(-nu+j, h/k) through the functional equation.

    tol is an absolute tolerance on the returned value; the dual-series
    truncation is chosen to meet it and SlowConvergence is raised when
    the available table cannot.  A parity zero of the gamma factor
    short-circuits to an exact 0 (the dual value is finite for cuspidal
    data, so the product vanishes).  Results are memoized on the table.
    """
    nu = int(nu)
    if nu < 0:
        raise RangeViolation(f"order nu must be nonnegative, got {nu}")
    j = _check_j(j)
    tol = float(tol)
    if tol <= 0:
        raise RangeViolation(f"tolerance must be positive, got {tol}")
    key = ("lvalue", nu, j, twist.h, twist.k, tol)
    cached = table._caches.get(key)
    if cached is not None:
        return cached
    try:
        G = g_factor(-nu, j, table.spec)
    except Pole as exc:
        raise GammaPole(
            f"gamma factor degenerates at order {nu}, parity {j}: {exc}"
        ) from None
    if G == 0:
        out = TwistedLValue(nu, j, twist, 0j, 0.0)
    else:
        wave = complex(
            (-1j if j else 1.0)
            * twist.k ** (3 * nu + 1)
            * np.pi ** (-3 * nu - 1.5)
            * G)
        series, est = _dual_series(nu, j, twist, table, tol / abs(wave))
        out = TwistedLValue(nu, j, twist, wave * series, abs(wave) * est)
    table._caches[key] = out
    return out


def _l_value(nu, j, twist, table, tol, lvalues):
    if lvalues is not None:
        return complex(lvalues[(nu, j)])
    return twisted_L_value(nu, j, twist, table, tol).value


def _l_mix(nu, variant, twist, table, tol, lvalues):
    if variant == "averaged":
        return 0.5 * (_l_value(nu, 0, twist, table, tol, lvalues)
                      + _l_value(nu, 1, twist, table, tol, lvalues))
    return _l_value(nu, variant, twist, table, tol, lvalues)


def _check_variant(variant):
    if variant not in (0, 1, "averaged"):
        raise RangeViolation(
            f"variant must be 0, 1, or 'averaged', got {variant!r}")
    return variant


def _mode(variant):
    return "plus" if variant == "averaged" else f"j{variant}"


# -- residue polynomials and assembled sums ----------------------------------

def residue_polynomial(a, j, x, twist, table, tol=1e-8, *, lvalues=None):
    """sum_{nu=0}^{a} (-1)^nu x^(a-nu) / (nu! (a-nu)!) L_j(-nu+j, h/k).

    lvalues, when given, maps (nu, j) to a value used in place of
    twisted_L_value; the exactness of the integral identities does not
    depend on which consistent values are supplied.
    """
    a = _check_a(a)
    variant = _check_variant(j)
    x = float(x)
    tot = 0j
    for nu in range(a + 1):
        L = _l_mix(nu, variant, twist, table, tol, lvalues)
        if L != 0:
            tot += (-1) ** nu * x ** (a - nu) \
                / (factorial(nu) * factorial(a - nu)) * L
    return tot


def a_tilde(a, variant, x, twist, table, tol=1e-8, *, lvalues=None):
    """Riesz-weighted sum minus its residue polynomial, as a RieszSum.

    variant 0 or 1 selects a symmetrization parity; "averaged" is the
    parity mean, whose raw part collapses to the plain e(mh/k) phase.
    """
    a = _check_a(a)
    variant = _check_variant(variant)
    x = _check_x(table, x)
    raw = complex(_engine(table, twist, _mode(variant), a).raw(a, x))
    res = residue_polynomial(a, variant, x, twist, table, tol, lvalues=lvalues)
    return RieszSum(a=a, j=variant, x=x, twist=twist,
                    value=raw - res, raw=raw, residue=res)


def integrate_a_tilde(a, variant, x, t, twist, table, tol=1e-8, *,
                      lvalues=None):
    """Exact integral of the order-a sum over [x, t].

    The raw part integrates through the order-(a+1) prefix moments (its
    antiderivative is the order-(a+1) raw sum) and the residue
    polynomial through closed-form monomial antiderivatives, so the
    identity with the order-(a+1) difference holds to rounding.
    """
    a = _check_a(a)
    variant = _check_variant(variant)
    x = _check_x(table, x)
    t = _check_x(table, t, "t")
    if t < x:
        raise OutOfRange(f"integration range reversed: x={x} > t={t}")
    eng = _engine(table, twist, _mode(variant), a + 1)
    raw_int = eng.raw(a + 1, t) - eng.raw(a + 1, x)
    res_int = 0j
    for nu in range(a + 1):
        L = _l_mix(nu, variant, twist, table, tol, lvalues)
        if L != 0:
            res_int += (-1) ** nu * (t ** (a + 1 - nu) - x ** (a + 1 - nu)) \
                / (factorial(nu) * factorial(a + 1 - nu)) * L
    return complex(raw_int - res_int)


def h_average_residual(a, x, H, twist, table, tol=1e-8, *, lvalues=None):
    """Absolute residual of the window-averaging identity.

    Both sides of

        A~_{a+1}(x) = (1/H) int_x^{x+H} (A~_{a+1}(t)
                                         - int_x^t A~_a(u) du) dt

    are evaluated for the parity-averaged sums by exact piecewise
    integration (prefix moments two orders up, closed-form polynomial
    antiderivatives); the returned number is rounding-level when the
    implementation is consistent.
    """
    a = _check_a(a)
    x = _check_x(table, x)
    H = float(H)
    if H <= 0:
        raise OutOfRange(f"window length H must be positive, got {H}")
    xh = _check_x(table, x + H, "x+H")

    lhs = a_tilde(a + 1, "averaged", x, twist, table, tol,
                  lvalues=lvalues).value
    eng = _engine(table, twist, "plus", a + 2)
    Lmix = [_l_mix(nu, "averaged", twist, table, tol, lvalues)
            for nu in range(a + 2)]

    # (1/H) int of A~_{a+1} over the window
    hi = eng.raw(a + 2, xh)
    lo = eng.raw(a + 2, x)
    term1 = (hi - lo) / H
    for nu in range(a + 2):
        if Lmix[nu] != 0:
            term1 -= (-1) ** nu * (xh ** (a + 2 - nu) - x ** (a + 2 - nu)) \
                / (factorial(nu) * factorial(a + 1 - nu) * (a + 2 - nu)) \
                * Lmix[nu] / H

    # (1/H) double integral of A~_a
    term2 = (hi - lo - H * eng.raw(a + 1, x)) / H
    for nu in range(a + 1):
        if Lmix[nu] != 0:
            inner = (xh ** (a + 2 - nu) - x ** (a + 2 - nu)) / (a + 2 - nu) \
                - H * x ** (a + 1 - nu)
            term2 -= (-1) ** nu * inner \
                / (factorial(nu) * factorial(a + 1 - nu)) * Lmix[nu] / H

    return float(abs(lhs - (term1 - term2)))


# -- per-interval polynomial coefficients ------------------------------------

def interval_coefficients(a, variant, n_lo, n_hi, twist, table, tol=1e-8, *,
                          lvalues=None):
    """Polynomial coefficients of the order-a sum on unit intervals.

    Returns a complex array of shape (a+1, n_hi - n_lo): column t holds
    the coefficients c_i of A~_a(n + xi) = sum_i c_i xi^i on the
    interval [n, n+1) with n = n_lo + t.  Mean-square integrals over
    x-ranges reduce to exact Gram combinations of these columns.
    """
    a = _check_a(a)
    variant = _check_variant(variant)
    n_lo, n_hi = int(n_lo), int(n_hi)
    if not 0 <= n_lo < n_hi:
        raise OutOfRange(f"need 0 <= n_lo < n_hi, got {n_lo}, {n_hi}")
    if n_hi > table.M:
        raise OutOfRange(
            f"intervals up to {n_hi} need coefficients past table size "
            f"{table.M}")
    eng = _engine(table, twist, _mode(variant), a)
    ns = np.arange(n_lo, n_hi)
    nf = ns.astype(np.float64)

    # shifted-basis raw moments D_i[n] = sum_{m<=n} A ph (n-m)^i
    D = np.empty((a + 1, ns.size), dtype=np.complex128)
    for i in range(a + 1):
        acc = np.zeros(ns.size, dtype=np.complex128)
        for r in range(i + 1):
            acc += comb(i, r) * (-1) ** r * nf ** (i - r) * eng.C[r, ns]
        D[i] = acc

    out = np.empty((a + 1, ns.size), dtype=np.complex128)
    fa = factorial(a)
    Lmix = [_l_mix(nu, variant, twist, table, tol, lvalues)
            for nu in range(a + 1)]
    gam = [(-1) ** nu / (factorial(nu) * factorial(a - nu)) * Lmix[nu]
           for nu in range(a + 1)]
    for i in range(a + 1):
        ci = comb(a, i) / fa * D[a - i]
        for nu in range(a - i + 1):
            if gam[nu] != 0:
                ci = ci - gam[nu] * comb(a - nu, i) * nf ** (a - nu - i)
        out[i] = ci
    return out

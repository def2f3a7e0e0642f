"""Log-gamma, gamma quotients, and the oscillatory kernel J_{a,j}(y).

J_{a,j}(y) is the contour integral (1/2pi i) int_C Q(s) y^s ds over a
polygonal contour C(sigma0, sigma1, Lambda) whose middle section bulges
left so that every pole of the numerator gamma factors stays to the
right of the path.  Along the vertical legs the integrand decays like
|t|^(1/2 - a - 6 sigma0) (the Stirling exponentials of the ten gamma
factors cancel exactly), which is also why sigma0 > 1/4 - a/6 is the
integrability threshold.

Everything is evaluated in the log domain and exponentiated once per
node: individual gamma factors overflow float64 long before the
quotient leaves [1e-300, 1e300], and 2 pi i branch slips in the logs
are invisible after exp.

Two structural facts keep the quadrature affordable.  The parameter
triples in use are closed under conjugation, so the integrand obeys
f(conj s) = conj(f(s)) and only the upper half of the contour is ever
evaluated.  And the integrand's phase t log y - 6 t log t is stationary
at t = y^(1/6), beyond which integration by parts converts the
truncation tail into |f(t_max)| / |log y - 6 log t_max|, much smaller
than the absolute-value bound once t_max clears the stationary point.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    BelowThreshold,
    ContourViolation,
    NonConvergent,
    Pole,
    RangeViolation,
)

__all__ = [
    "ContourSpec",
    "MeijerValue",
    "check_derivative_relation",
    "check_perron_meijer",
    "default_contour",
    "g_factor",
    "gamma_quotient_Q",
    "log_gamma",
    "meijer_asymptotic",
    "meijer_contour",
]

# Lanczos, g = 607/128, 15 terms: relative error ~ 1e-15 on Re z >= 1/2
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])
_HALF_LOG_2PI = 0.91893853320467274178


def _nonpositive_integer_mask(z, tol=1e-12):
    z = np.asarray(z)
    near = np.rint(z.real)
    return ((np.abs(z.imag) < tol)
            & (near < 0.5)
            & (np.abs(z.real - near) < tol))


def _lanczos_region(z):
    # valid for Re z >= 0.5; principal branch there
    base = z + _LANCZOS_G - 0.5
    series = np.full_like(z, _LANCZOS_C[0])
    for k in range(1, 15):
        series = series + _LANCZOS_C[k] / (z - 1.0 + k)
    return (_HALF_LOG_2PI + (z - 0.5) * np.log(base) - base
            + np.log(series))


def log_gamma(z):
    """Analytic log Gamma (log Gamma(1) = 0 branch), scalar or array.

    Re z >= 1/2 is handled by the Lanczos sum directly; smaller real
    parts are shifted up with log Gamma(z) = log Gamma(z+1) - log z,
    which preserves the branch on either open half plane.  Inputs on
    the negative real axis resolve as the limit from above.  Raises
    Pole at non-positive integers.
    """
    scalar = np.isscalar(z) or np.asarray(z).ndim == 0
    w = np.atleast_1d(np.asarray(z, dtype=np.complex128)).copy()
    pole = _nonpositive_integer_mask(w)
    if pole.any():
        raise Pole(f"log_gamma pole at z = {w[pole].ravel()[0]}")
    out = _log_gamma_unchecked(w)
    return complex(out.ravel()[0]) if scalar else out


def _log_gamma_unchecked(w):
    w = w.copy()
    neg = w.imag < 0.0
    w[neg] = np.conj(w[neg])
    shift = np.zeros_like(w)
    guard = 0
    while True:
        need = w.real < 0.5
        if not need.any():
            break
        shift[need] += np.log(w[need])
        w[need] += 1.0
        guard += 1
        if guard > 10000:
            raise RangeViolation("log_gamma shift did not terminate")
    out = _lanczos_region(w) - shift
    out[neg] = np.conj(out[neg])
    return out


def _as_params(spec):
    return (complex(spec.alpha), complex(spec.beta), complex(spec.gamma))


def _conj_closed(params):
    mirrored = sorted((round(p.real, 12), round(-p.imag, 12)) for p in params)
    straight = sorted((round(p.real, 12), round(p.imag, 12)) for p in params)
    return mirrored == straight


def _q_args(s, a, j, params):
    """Numerator and denominator gamma arguments of Q(s), as two lists."""
    al, be, ga = params
    num = [(1 + j + al) / 2 - s,
           (1 + j + be) / 2 - s,
           (1 + j + ga) / 2 - s,
           -a / 2 - s,
           0.5 - a / 2 - s]
    den = [s + (j - al) / 2,
           s + (j - be) / 2,
           s + (j - ga) / 2,
           1 - s,
           0.5 - s]
    return num, den


def _log_quotient(num, den, label):
    """sum log Gamma(num) - sum log Gamma(den) with pole bookkeeping.

    A numerator argument at a pole raises Pole (the quotient diverges);
    a denominator pole alone marks a zero of the quotient, reported
    through the returned mask so callers can exponentiate to exact 0.
    """
    shape = np.broadcast(*num, *den).shape
    stack = np.empty((len(num) + len(den),) + shape, dtype=np.complex128)
    for i, arg in enumerate(num):
        stack[i] = arg
    for i, arg in enumerate(den):
        stack[len(num) + i] = arg
    num_pole = _nonpositive_integer_mask(stack[:len(num)])
    if num_pole.any():
        i, flat = divmod(int(np.argmax(num_pole)), int(np.prod(shape) or 1))
        raise Pole(
            f"{label}: numerator factor {i + 1} hits a pole at argument "
            f"{stack[:len(num)].reshape(len(num), -1)[i, flat]}")
    zero_mask = _nonpositive_integer_mask(stack[len(num):])
    stack[len(num):][zero_mask] = 1.0  # placeholder; entry zeroed via mask
    logs = _log_gamma_unchecked(stack)
    total = logs[:len(num)].sum(axis=0) - logs[len(num):].sum(axis=0)
    return total, zero_mask.any(axis=0)


def _check_aj(a, j):
    if int(a) != a or a < 1:
        raise RangeViolation(f"order a must be an integer >= 1, got {a}")
    if j not in (0, 1):
        raise RangeViolation(f"parity j must be 0 or 1, got {j}")


def gamma_quotient_Q(s, a, j, spec):
    """The 5-over-5 gamma quotient Q(s) for order a, parity j.

    Zeros from denominator poles come back as exact 0.0; numerator
    poles raise Pole naming the factor.
    """
    _check_aj(a, j)
    num, den = _q_args(np.asarray(s, dtype=np.complex128), a, j,
                       _as_params(spec))
    logq, zeros = _log_quotient(num, den, "Q")
    val = np.where(zeros, 0.0, np.exp(logq))
    return complex(val) if np.isscalar(s) else val


def g_factor(s, j, spec):
    """The 3-over-3 gamma factor G_j(s+j) from the functional equation."""
    if j not in (0, 1):
        raise RangeViolation(f"parity j must be 0 or 1, got {j}")
    al, be, ga = _as_params(spec)
    sa = np.asarray(s, dtype=np.complex128)
    num = [(1 - sa + j + p) / 2 for p in (al, be, ga)]
    den = [(sa + j - p) / 2 for p in (al, be, ga)]
    logg, zeros = _log_quotient(num, den, "G_j")
    val = np.where(zeros, 0.0, np.exp(logg))
    return complex(val) if np.isscalar(s) else val


# -- contours -----------------------------------------------------------------

@dataclass(frozen=True)
class ContourSpec:
    """Polygonal contour sigma0 -i inf -> sigma0 -i Lambda -> sigma1 -i Lambda
    -> sigma1 +i Lambda -> sigma0 +i Lambda -> sigma0 +i inf, with the
    infinite legs truncated at |t| = t_max and resolved at the given
    quadrature step (panel length)."""

    sigma0: float
    sigma1: float
    Lambda: float
    t_max: float
    step: float

    def validate(self, a, spec):
        if self.sigma0 <= 0.25 - a / 6 + 1e-12:
            raise ContourViolation(
                f"sigma0={self.sigma0} must exceed 1/4 - a/6 = {0.25 - a / 6}")
        if self.sigma1 >= -a / 2 - 1e-12:
            raise ContourViolation(
                f"sigma1={self.sigma1} must lie below -a/2 = {-a / 2}")
        if self.Lambda <= 0:
            raise ContourViolation("Lambda must be positive")
        lim = max(abs(p.imag) / 2 for p in _as_params(spec))
        if self.Lambda <= lim + 1e-12:
            raise ContourViolation(
                f"Lambda={self.Lambda} must exceed max |Im parameter|/2 = {lim}")
        if self.t_max <= self.Lambda:
            raise ContourViolation(
                f"t_max={self.t_max} must exceed Lambda={self.Lambda}")
        if self.step <= 0:
            raise ContourViolation("step must be positive")


def _solve_t_max(a, y, sigma0, Lambda):
    """Smallest truncation height whose estimated tail sits below 1e-10
    of the expected |J| = y^((1-a)/6) / sqrt(3 pi)."""
    q = a + 6 * sigma0 - 0.5
    ln_y = np.log(y)
    target = 1e-10 * 0.23 * y ** ((1 - a) / 6)
    t = max(Lambda + 6.0, 1.5 * y ** (1 / 6) + 10.0, 25.0)
    while t < 2e5:
        slope = abs(ln_y - 6 * np.log(t))
        credit = min(t / (q - 1), 2.0 / max(slope, 1e-9))
        if t ** -q * y ** sigma0 * credit / np.pi <= target:
            break
        t *= 1.3
    return 1.15 * t


def default_contour(a, j, y, spec):
    """Contour tuned for the argument y: sigma0 = 1/4 - a/6 + 0.6 keeps
    the cancellation ratio near y^(2/3)-scale while the vertical tail
    decays like |t|^(-(a + 6 sigma0 - 1/2)); t_max is sized so the
    estimated (oscillation-credited) tail sits below 1e-10 of the value."""
    del j  # decay bookkeeping is parity-independent
    if y <= 0:
        raise RangeViolation(f"argument y must be positive, got {y}")
    sigma0 = 0.25 - a / 6 + 0.6
    sigma1 = -a / 2 - 0.5
    lim = max(abs(p.imag) / 2 for p in _as_params(spec))
    Lambda = max(1.5, 1.05 * lim + 0.5)
    t_max = _solve_t_max(a, y, sigma0, Lambda)
    # total phase is t log y - 6 t log t + O(log t): the step must
    # resolve the fastest local frequency on the truncated legs
    freq = max(2.0, abs(np.log(y)), abs(np.log(y) - 6 * np.log(t_max)))
    step = min(0.35, 2 * np.pi / (3.0 * freq))
    return ContourSpec(sigma0=sigma0, sigma1=sigma1, Lambda=Lambda,
                       t_max=float(t_max), step=float(step))


@dataclass(frozen=True)
class MeijerValue:
    value: complex
    est_error: float
    method: str

    def __post_init__(self):
        if self.est_error < 0:
            raise RangeViolation("est_error must be nonnegative")


@lru_cache(maxsize=8)
def _gl_rule(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _segment_sum(log_f, z0, z1, n_panels, order=8):
    x, w = _gl_rule(order)
    edges = np.linspace(0.0, 1.0, n_panels + 1)
    mid = (edges[:-1] + edges[1:]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    t = mid[:, None] + half[:, None] * x[None, :]
    nodes = (z0 + (z1 - z0) * t).ravel()
    weights = ((z1 - z0) * (half[:, None] * w[None, :])).ravel()
    return (np.exp(log_f(nodes)) * weights).sum()


def _upper_segments(cs):
    return [(complex(cs.sigma1, 0.0), complex(cs.sigma1, cs.Lambda)),
            (complex(cs.sigma1, cs.Lambda), complex(cs.sigma0, cs.Lambda)),
            (complex(cs.sigma0, cs.Lambda), complex(cs.sigma0, cs.t_max))]


def _full_segments(cs):
    pts = [complex(cs.sigma0, -cs.t_max),
           complex(cs.sigma0, -cs.Lambda),
           complex(cs.sigma1, -cs.Lambda),
           complex(cs.sigma1, cs.Lambda),
           complex(cs.sigma0, cs.Lambda),
           complex(cs.sigma0, cs.t_max)]
    return list(zip(pts[:-1], pts[1:]))


def _contour_pass(log_f, cs, refine, symmetric):
    """One quadrature sweep.  When the integrand satisfies
    f(conj s) = conj(f(s)) the mirror of an upper segment contributes
    -conj(segment sum), so the whole integral is sum Im(S_seg) / pi."""
    if symmetric:
        total = 0.0
        for z0, z1 in _upper_segments(cs):
            n = max(2, int(np.ceil(abs(z1 - z0) / cs.step))) * refine
            total += _segment_sum(log_f, z0, z1, n).imag
        return complex(total / np.pi, 0.0)
    total = 0.0 + 0.0j
    for z0, z1 in _full_segments(cs):
        n = max(2, int(np.ceil(abs(z1 - z0) / cs.step))) * refine
        if n % 2:
            n += 1  # keep t = 0 a panel boundary on the sigma1 leg
        total += _segment_sum(log_f, z0, z1, n)
    return total / (2j * np.pi)


def _contour_quadrature(log_f, cs, decay_q, phase_slope, symmetric):
    """Adaptive composite Gauss-Legendre along the truncated contour.

    Returns (value, est_error, tail_estimate).  The tail of each
    truncated leg is |f(t_max)| times the smaller of the absolute bound
    t_max/(decay_q - 1) and the integration-by-parts credit
    2/|phase'(t_max)|.
    """
    if decay_q <= 1.0 + 1e-9:
        raise ContourViolation(
            f"vertical-leg decay exponent {decay_q:.3f} is not integrable; "
            "raise sigma0")
    prev = _contour_pass(log_f, cs, 1, symmetric)
    refine = 2
    cur, diff = prev, np.inf
    for _ in range(3):
        cur = _contour_pass(log_f, cs, refine, symmetric)
        diff = abs(cur - prev)
        if diff <= 1e-8 * max(abs(cur), 1e-300):
            break
        prev, refine = cur, refine * 2
    ends = np.array([complex(cs.sigma0, cs.t_max),
                     complex(cs.sigma0, -cs.t_max)])
    mags = np.abs(np.exp(log_f(ends)))
    credit = min(cs.t_max / (decay_q - 1.0),
                 2.0 / max(abs(phase_slope(cs.t_max)), 1e-9))
    tail = (mags[0] + mags[1]) * credit / (2 * np.pi)
    return cur, float(diff + tail), float(tail)


def meijer_contour(a, j, y, spec, contour=None):
    """J_{a,j}(y) by contour quadrature; NonConvergent when the truncated
    tail exceeds 1e-3 of the value."""
    _check_aj(a, j)
    y = float(y)
    if y <= 0:
        raise RangeViolation(f"argument y must be positive, got {y}")
    return _meijer_contour_cached(int(a), int(j), y, _as_params(spec),
                                  contour)


@lru_cache(maxsize=4096)
def _meijer_contour_cached(a, j, y, params, contour):
    spec = _ParamSpec(params)
    cs = contour if contour is not None else default_contour(a, j, y, spec)
    cs.validate(a, spec)
    ln_y = np.log(y)

    def log_f(s):
        num, den = _q_args(s, a, j, params)
        logq, zeros = _log_quotient(num, den, "Q")
        out = logq + s * ln_y
        if zeros.any():
            out = np.where(zeros, -np.inf, out)
        return out

    decay_q = a + 6 * cs.sigma0 - 0.5
    val, est, tail = _contour_quadrature(
        log_f, cs, decay_q,
        lambda t: ln_y - 6 * np.log(t),
        symmetric=_conj_closed(params))
    if tail > 1e-3 * max(abs(val), 1e-300):
        raise NonConvergent(
            f"contour tail {tail:.2e} exceeds 1e-3 of |value| = {abs(val):.2e}"
            f" at y={y:g}; raise t_max")
    return MeijerValue(value=complex(val), est_error=est, method="contour")


class _ParamSpec:
    """Internal shim: meijer caching keys on the bare parameter triple."""

    __slots__ = ("alpha", "beta", "gamma")

    def __init__(self, params):
        self.alpha, self.beta, self.gamma = params


def meijer_asymptotic(a, j, y, threshold=1e2, error_constant=1.0):
    """Leading oscillatory term -(3 pi)^(-1/2) y^((1-a)/6)
    cos(6 y^(1/6) + pi (a+j)/2), with est_error = C y^(-a/6)."""
    _check_aj(a, j)
    y = float(y)
    if y < threshold:
        raise BelowThreshold(
            f"asymptotic main term needs y >= {threshold:g}, got {y:g}")
    amp = -((3 * np.pi) ** -0.5) * y ** ((1 - a) / 6)
    phase = 6 * y ** (1 / 6) + np.pi * (a + j) / 2
    return MeijerValue(value=complex(amp * np.cos(phase)),
                       est_error=float(error_constant * y ** (-a / 6)),
                       method="asymptotic")


def check_perron_meijer(a, j, y, spec, contour=None):
    """Residual of the kernel identity: the integral of
    G_j(s+j) y^s / (s (s+1) ... (s+a)) over C(2 sigma0, 2 sigma1,
    2 Lambda) must equal -(-2)^(-a) J_{a,j}(y^2).

    Both sides are evaluated by independent quadratures (different
    integrand, different contour).  Returns |LHS - RHS|.
    """
    _check_aj(a, j)
    y = float(y)
    if y <= 0:
        raise RangeViolation(f"argument y must be positive, got {y}")
    base = contour if contour is not None else default_contour(a, j, y * y,
                                                               spec)
    base.validate(a, spec)
    doubled = ContourSpec(sigma0=2 * base.sigma0, sigma1=2 * base.sigma1,
                          Lambda=2 * base.Lambda, t_max=2 * base.t_max,
                          step=base.step)
    params = _as_params(spec)
    ln_y = np.log(y)

    def log_f(s):
        num = [(1 - s + j + p) / 2 for p in params]
        den = [(s + j - p) / 2 for p in params]
        logg, zeros = _log_quotient(num, den, "G_j")
        kernel = np.zeros_like(s)
        for i in range(a + 1):
            kernel = kernel + np.log(s + i)
        out = logg - kernel + s * ln_y
        if zeros.any():
            out = np.where(zeros, -np.inf, out)
        return out

    # along Re s = 2 sigma0 the integrand decays like
    # |t|^(3(1 - 2 sigma0)/2 - (a+1)), same exponent as the Q contour
    decay_q = a + 6 * base.sigma0 - 0.5
    lhs, _, tail = _contour_quadrature(
        log_f, doubled, decay_q,
        lambda t: ln_y - 3 * np.log(t / 2),
        symmetric=_conj_closed(params))
    if tail > 1e-3 * max(abs(lhs), 1e-300):
        raise NonConvergent(
            f"kernel-side tail {tail:.2e} too large at y={y:g}")
    rhs = -((-2.0) ** -a) * meijer_contour(a, j, y * y, spec).value
    return float(abs(lhs - rhs))


def check_derivative_relation(a, j, y, spec=None, eta="auto"):
    """Residual of d/dy [ y^(a+1) J_{a+1,j}(y^2) ] = -2 y^a J_{a,j}(y^2),
    with the left side as a central difference of contour values.

    eta="auto" picks 3e-3 y^(2/3), matched to the y^(1/3)-scale phase
    so the O(eta^2) truncation stays below quadrature noise; a float
    eta is used as given.
    """
    _check_aj(a, j)
    y = float(y)
    if y <= 0:
        raise RangeViolation(f"argument y must be positive, got {y}")
    if spec is None:
        spec = _ParamSpec((0j, 0j, 0j))
    h = 3e-3 * y ** (2 / 3) if eta == "auto" else float(eta)
    if not 0 < h < y:
        raise RangeViolation(f"step eta={h:g} outside (0, y)")

    def f(u):
        return u ** (a + 1) * meijer_contour(a + 1, j, u * u, spec).value

    lhs = (f(y + h) - f(y - h)) / (2 * h)
    rhs = -2.0 * y ** a * meijer_contour(a, j, y * y, spec).value
    return float(abs(lhs - rhs))

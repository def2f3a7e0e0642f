"""Exact modular arithmetic and Kloosterman machinery.

Everything in this module is integer combinatorics dressed in float64:
Kloosterman sums are accumulated as complex cosine sums with an
imaginary-part guard, their discrete Fourier transforms ride on np.fft,
and the prime-modulus correlation identities are evaluated through the
Ramanujan-sum closed form

    sum_{a in Z_k^x} S(a,m;k) S(a,n;k) = k c_k(m-n) - c_k(m) c_k(n),

which collapses to five integer cases.  Conventions at the degenerate
modulus: Z_1^x = {0}, S(.,.;1) = 1, and the inverse of anything mod 1
is 0.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from .errors import ImaginaryResidue, NonInvertible, NotPrime, RangeViolation

__all__ = [
    "ArithTables",
    "Twist",
    "is_prime",
    "kloosterman",
    "kloosterman_correlation",
    "kloosterman_dft",
    "kloosterman_first_moment",
    "kloosterman_row",
    "mod_inverse",
    "unit_residues",
]


def mod_inverse(a, k):
    """Inverse of a modulo k, as the canonical representative in [0, k).

    Extended Euclid; raises NonInvertible when gcd(a, k) != 1.  The
    modulus 1 is allowed and returns 0, the unique residue.
    """
    k = int(k)
    if k < 1:
        raise RangeViolation(f"modulus must be positive, got {k}")
    if k == 1:
        return 0
    a = int(a) % k
    if gcd(a, k) != 1:
        raise NonInvertible(f"{a} is not invertible mod {k}")
    # iterative egcd, tracking only the coefficient of a
    old_r, r = a, k
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    return old_s % k


def is_prime(n):
    """Trial-division primality; adequate for desk-scale moduli."""
    n = int(n)
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@lru_cache(maxsize=512)
def _units_and_inverses(c):
    """Units of Z_c and their inverses, int64 arrays, computed once per c."""
    c = int(c)
    xs = np.array([x for x in range(1, c + 1) if gcd(x, c) == 1],
                  dtype=np.int64)
    inv = np.array([mod_inverse(int(x), c) for x in xs], dtype=np.int64)
    return xs, inv


def unit_residues(k):
    """Canonical unit residues mod k; [0] for k = 1."""
    if int(k) == 1:
        return [0]
    xs, _ = _units_and_inverses(int(k))
    return [int(x) for x in xs]


def _guard_real(z, c, nunits):
    if abs(z.imag) > 1e-9 * max(nunits, 1):
        raise ImaginaryResidue(
            f"Kloosterman sum mod {c}: imaginary part {z.imag:.3e}")
    return float(z.real)


def kloosterman(a, b, c):
    """S(a,b;c) = sum_{x mod c, (x,c)=1} e((a x + b x^-1)/c), a real number.

    The full complex sum is accumulated; the imaginary part must vanish
    up to 1e-9 * phi(c) or ImaginaryResidue is raised, since a nonzero
    residue can only mean broken inverse bookkeeping.
    """
    c = int(c)
    if c < 1:
        raise RangeViolation(f"modulus must be positive, got {c}")
    if c == 1:
        return 1.0
    xs, inv = _units_and_inverses(c)
    ph = ((int(a) % c) * xs + (int(b) % c) * inv) % c
    z = np.exp((2j * np.pi / c) * ph).sum()
    return _guard_real(z, c, xs.size)


def kloosterman_row(a, k):
    """S(a, m; k) for every residue m = 0..k-1, as one float array.

    One k x phi(k) phase table; the per-entry imaginary guard matches
    kloosterman().  Dual-sum evaluations index this row by m mod k
    instead of recomputing the unit sum per term.
    """
    k = int(k)
    if k < 1:
        raise RangeViolation(f"modulus must be positive, got {k}")
    if k == 1:
        return np.ones(1)
    xs, inv = _units_and_inverses(k)
    base = np.exp((2j * np.pi / k) * (((int(a) % k) * xs) % k))
    roots = np.exp((2j * np.pi / k) * np.arange(k))
    idx = (np.arange(k)[:, None] * inv[None, :]) % k
    z = (base[None, :] * roots[idx]).sum(axis=1)
    bad = np.abs(z.imag).max()
    if bad > 1e-9 * xs.size:
        raise ImaginaryResidue(
            f"Kloosterman row mod {k}: imaginary part {bad:.3e}")
    return z.real.copy()


def kloosterman_dft(h, k):
    """Normalized DFT of the Kloosterman sum in its second argument.

    Returns the complex array hat-S(h, xi; k) for xi = 1..k, where

        hat-S(h, xi; k) = (1/k) sum_{l=1..k} S(h, l; k) e(-l xi / k).

    The transform is genuinely complex (it reduces to e(h xi^-1 / k) on
    unit xi and 0 elsewhere), so the dtype is complex128; the inverse
    transform sum_xi hat-S e(m xi / k) reconstructs S(h, m; k).
    """
    k = int(k)
    if k < 1:
        raise RangeViolation(f"modulus must be positive, got {k}")
    if gcd(int(h) % k if k > 1 else 1, k) != 1 and k > 1:
        raise NonInvertible(f"h = {h} shares a factor with k = {k}")
    if k == 1:
        return np.ones(1, dtype=np.complex128)
    row = kloosterman_row(h, k)
    # s[j] = S(h, j+1; k); fft gives F[xi] = sum_j s[j] e(-j xi / k),
    # so the l = j+1 indexing contributes one extra root per xi.
    s = np.concatenate([row[1:], row[:1]]).astype(np.complex128)
    F = np.fft.fft(s)
    xi = np.arange(1, k + 1)
    return np.exp(-2j * np.pi * xi / k) * F[xi % k] / k


def _require_prime(k):
    k = int(k)
    if not is_prime(k):
        raise NotPrime(f"modulus {k} is not prime")
    return k


def _ramanujan_prime(m, k):
    # c_k(m) for prime k: phi(k) on the zero class, -1 off it
    return k - 1 if m % k == 0 else -1


def kloosterman_first_moment(m, k):
    """sum_{a in Z_k^x} S(a, m; k) for prime k, in closed form.

    Equals 1 when m is a unit class and -k + 1 when k | m: opening the
    Kloosterman sum and summing the geometric progression over a leaves
    a single Ramanujan sum.
    """
    k = _require_prime(k)
    return 1 if m % k else 1 - k


def kloosterman_correlation(m, n, k):
    """sum_{a in Z_k^x} S(a,m;k) S(a,n;k) for prime k, in closed form.

    The identity k c_k(m-n) - c_k(m) c_k(n) splits into five integer
    cases by the vanishing pattern of m, n, m-n mod k:

        m = n = 0        -> k - 1
        m = n != 0       -> k^2 - k - 1
        exactly one = 0  -> -1
        m, n != 0, m != n -> -k - 1
    """
    k = _require_prime(k)
    return k * _ramanujan_prime(m - n, k) - (
        _ramanujan_prime(m, k) * _ramanujan_prime(n, k))


@dataclass(frozen=True)
class Twist:
    """A reduced rational twist h/k with the inverse h_bar precomputed.

    h is canonicalized into [0, k); h_bar satisfies h * h_bar = 1 mod k.
    Construction with gcd(h, k) > 1 raises NonInvertible.
    """

    h: int
    k: int
    h_bar: int = -1  # filled during construction

    def __post_init__(self):
        k = int(self.k)
        if k < 1:
            raise RangeViolation(f"twist denominator must be positive, got {k}")
        h = int(self.h) % k
        if gcd(h, k) != 1 and k > 1:
            raise NonInvertible(f"twist {self.h}/{k} is not reduced")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "h_bar", mod_inverse(h, k))

    def __str__(self):
        return f"{self.h}/{self.k}"


@dataclass(frozen=True)
class ArithTables:
    """Sieved arithmetic tables up to n_max, index-aligned: arr[n] is f(n).

    divisor_count is d(n), mobius is mu(n), totient is phi(n), and d3 is
    the triple divisor function sum_{abc = n} 1 = sum_{d | n} d(d).
    Entry 0 is zero-filled padding.
    """

    n_max: int
    divisor_count: np.ndarray
    mobius: np.ndarray
    totient: np.ndarray
    d3: np.ndarray

    @classmethod
    def build(cls, n_max):
        n_max = int(n_max)
        if n_max < 1:
            raise RangeViolation(f"n_max must be positive, got {n_max}")
        N = n_max + 1
        dc = np.zeros(N, dtype=np.int64)
        for d in range(1, N):
            dc[d::d] += 1
        phi = np.arange(N, dtype=np.int64)
        mu = np.ones(N, dtype=np.int64)
        for p in range(2, N):
            if phi[p] == p:  # p prime: untouched so far
                phi[p::p] -= phi[p::p] // p
                mu[p::p] *= -1
                if p * p < N:
                    mu[p * p::p * p] = 0
        mu[0] = 0
        d3 = np.zeros(N, dtype=np.int64)
        for d in range(1, N):
            d3[d::d] += dc[d]
        for arr in (dc, phi, mu, d3):
            arr.setflags(write=False)
        return cls(n_max=n_max, divisor_count=dc, mobius=mu,
                   totient=phi, d3=d3)

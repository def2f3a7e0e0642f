"""Fourier-coefficient providers for the degree-3 sums.

Three sources share one table type:

  * a Hecke-recursion engine seeded with per-prime pairs (A(p,1), A(1,p)),
    used for the symmetric-square lift of a GL(2) Maass form,
  * a triple-divisor sieve (structural tests only; no A(m,d) for d > 1),
  * a seeded synthetic provider for identities that hold for arbitrary
    bounded multiplicative input.

Tables are immutable; derived A(m,d) values come from the Moebius
inversion A(m,d) = sum_{l | (d,m)} mu(l) A(1,d/l) A(m/l,1).
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np

from .errors import (
    InsufficientData,
    MissingParameter,
    MissingSeed,
    OutOfRange,
    ParseError,
    RangeViolation,
    UnsupportedSource,
)
from .numtheory import is_prime

__all__ = [
    "CoefficientTable",
    "CuspFormSpec",
    "GrowthReport",
    "THETA_PROVED",
    "cache_load",
    "cache_save",
    "coefficient",
    "d3_sieve",
    "dual_coefficient_row",
    "hecke_extend",
    "load_gl2_eigenvalues",
    "rankin_selberg_check",
    "sym2_table",
    "synthetic_table",
]

# best currently proved bound toward Ramanujan for GL(3)
THETA_PROVED = 5.0 / 14.0

_SOURCE_KINDS = ("sym2_maass", "d3", "synthetic")


@dataclass(frozen=True)
class CuspFormSpec:
    """Archimedean data of the form: Langlands parameters and growth exponent.

    alpha + beta + gamma must vanish, real parts stay within [-1/2, 1/2],
    and theta lies in [0, 5/14].  theta = 0 is the conjectural value used
    to normalize experiments; THETA_PROVED feeds the proved-bound checks.
    """

    alpha: complex
    beta: complex
    gamma: complex
    theta: float
    label: str
    source_kind: str

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        object.__setattr__(self, "gamma", complex(self.gamma))
        s = self.alpha + self.beta + self.gamma
        if abs(s) > 1e-12:
            raise RangeViolation(
                f"Langlands parameters must sum to zero, got {s}")
        worst = max(abs(self.alpha.real), abs(self.beta.real),
                    abs(self.gamma.real))
        if worst > 0.5 + 1e-12:
            raise RangeViolation(
                f"|Re| of a Langlands parameter is {worst}, exceeds 1/2")
        if not 0.0 <= self.theta <= THETA_PROVED + 1e-12:
            raise RangeViolation(f"theta={self.theta} outside [0, 5/14]")
        if self.source_kind not in _SOURCE_KINDS:
            raise RangeViolation(
                f"unknown source kind {self.source_kind!r}")

    @property
    def parameters(self):
        return (self.alpha, self.beta, self.gamma)


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """A(m,1) and A(1,m) for m <= M, index-aligned (entry 0 is padding).

    The arrays are read-only; _caches is scratch space for memoized
    derived objects (summation engines, L-values) keyed by consumers.
    """

    M: int
    a_m1: np.ndarray
    a_1m: np.ndarray
    spec: CuspFormSpec
    _caches: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.a_m1.shape != (self.M + 1,) or self.a_1m.shape != (self.M + 1,):
            raise RangeViolation("coefficient arrays must have length M+1")
        for arr in (self.a_m1, self.a_1m):
            arr.setflags(write=False)

    def is_self_dual(self):
        return bool(np.abs(self.a_1m - np.conj(self.a_m1)).max() < 1e-9)


def _smallest_prime_factor(M):
    spf = np.zeros(M + 1, dtype=np.int64)
    for p in range(2, M + 1):
        if spf[p] == 0:
            sl = spf[p::p]
            sl[sl == 0] = p
    return spf


def _euler_series(u, v, e_max):
    # coefficients of (1 - u t + v t^2 - t^3)^{-1} up to t^e_max
    c = np.zeros(e_max + 1, dtype=np.complex128)
    c[0] = 1.0
    for e in range(1, e_max + 1):
        val = u * c[e - 1]
        if e >= 2:
            val -= v * c[e - 2]
        if e >= 3:
            val += c[e - 3]
        c[e] = val
    return c


def hecke_extend(seeds, M, spec=None):
    """Extend per-prime seed pairs to a full table of A(m,1), A(1,m).

    seeds maps each prime p <= M to (A(p,1), A(1,p)).  Prime powers come
    from the degree-3 Euler factor (1 - A(p,1) t + A(1,p) t^2 - t^3)^{-1},
    the dual row from the same series with the seeds swapped, and
    composites from coprime multiplicativity.
    """
    M = int(M)
    if M < 1:
        raise RangeViolation(f"table size must be positive, got {M}")
    spf = _smallest_prime_factor(M)
    primes = [p for p in range(2, M + 1) if spf[p] == p]
    missing = [p for p in primes if p not in seeds]
    if missing:
        raise MissingSeed(
            f"no seed for prime {missing[0]} "
            f"({len(missing)} primes <= {M} uncovered)")
    a = np.zeros(M + 1, dtype=np.complex128)
    b = np.zeros(M + 1, dtype=np.complex128)
    a[1] = b[1] = 1.0
    for p in primes:
        u, v = seeds[p]
        u, v = complex(u), complex(v)
        e_max, q = 0, 1
        while q <= M // p:
            q *= p
            e_max += 1
        up = _euler_series(u, v, e_max)
        dn = _euler_series(v, u, e_max)
        q = 1
        for e in range(1, e_max + 1):
            q *= p
            a[q] = up[e]
            b[q] = dn[e]
    for m in range(2, M + 1):
        p = spf[m]
        q, rest = p, m // p
        while rest % p == 0:
            q *= p
            rest //= p
        if rest > 1:
            a[m] = a[q] * a[rest]
            b[m] = b[q] * b[rest]
    if spec is None:
        spec = CuspFormSpec(0j, 0j, 0j, THETA_PROVED,
                            "hecke-seeds", "synthetic")
    return CoefficientTable(M=M, a_m1=a, a_1m=b, spec=spec)


@lru_cache(maxsize=4096)
def _mobius_one(n):
    if n == 1:
        return 1
    out, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            out = -out
        p += 1
    return -out if m > 1 else out


@lru_cache(maxsize=1024)
def _divisors(n):
    return tuple(d for d in range(1, n + 1) if n % d == 0)


def _check_range(table, value, name):
    if not 1 <= value <= table.M:
        raise OutOfRange(f"{name}={value} outside table range 1..{table.M}")


def coefficient(table, m, d):
    """A(m,d) by Moebius inversion over l | gcd(d,m); d=1 is the stored row."""
    m, d = int(m), int(d)
    _check_range(table, m, "m")
    _check_range(table, d, "d")
    if d == 1:
        return complex(table.a_m1[m])
    if table.spec.source_kind == "d3":
        raise UnsupportedSource(
            "triple-divisor tables define no A(m,d) for d > 1")
    total = 0j
    for ell in _divisors(gcd(m, d)):
        mu = _mobius_one(ell)
        if mu:
            total += mu * table.a_1m[d // ell] * table.a_m1[m // ell]
    return total


def dual_coefficient_row(table, d, m_max):
    """A(d,m) for m = 0..m_max as one array (entry 0 zero), fixed small d.

    Same Moebius formula as coefficient() with the index roles swapped,
    vectorized per divisor of d since dual-series consumers need the
    whole row at once.
    """
    d, m_max = int(d), int(m_max)
    _check_range(table, d, "d")
    _check_range(table, m_max, "m_max")
    if d == 1:
        out = table.a_1m[:m_max + 1].copy()
        out[0] = 0.0
        return out
    if table.spec.source_kind == "d3":
        raise UnsupportedSource(
            "triple-divisor tables define no A(d,m) for d > 1")
    out = np.zeros(m_max + 1, dtype=np.complex128)
    for ell in _divisors(d):
        mu = _mobius_one(ell)
        if mu:
            w = mu * table.a_m1[d // ell]
            out[ell::ell] += w * table.a_1m[1:m_max // ell + 1]
    return out


def load_gl2_eigenvalues(path):
    """Parse a GL(2) eigenvalue file: 'r <dec>' then '<prime> <dec>' lines.

    '#' starts a comment; blank lines are skipped.  Returns the spectral
    parameter and a prime -> lambda(p) map.  Malformed lines raise
    ParseError with the line number; a missing r line raises
    MissingParameter.
    """
    r = None
    lam = {}
    with open(path) as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"expected two fields, got {len(parts)}",
                                 path=str(path), line_number=ln)
            if r is None:
                if parts[0] != "r":
                    raise ParseError(
                        "first data line must be 'r <value>'",
                        path=str(path), line_number=ln)
                try:
                    r = float(parts[1])
                except ValueError:
                    raise ParseError(f"bad spectral parameter {parts[1]!r}",
                                     path=str(path), line_number=ln)
                continue
            if parts[0] == "r":
                raise ParseError("duplicate spectral-parameter line",
                                 path=str(path), line_number=ln)
            try:
                p = int(parts[0])
                v = float(parts[1])
            except ValueError:
                raise ParseError(f"bad eigenvalue line {line!r}",
                                 path=str(path), line_number=ln)
            if not is_prime(p):
                raise ParseError(f"index {p} is not prime",
                                 path=str(path), line_number=ln)
            if p in lam:
                raise ParseError(f"duplicate eigenvalue for prime {p}",
                                 path=str(path), line_number=ln)
            lam[p] = v
    if r is None:
        raise MissingParameter(
            f"{path}: spectral parameter r not found")
    return r, lam


def sym2_table(path, M, theta=0.0):
    """Symmetric-square table from a GL(2) eigenvalue file.

    Seeds are A(p,1) = A(1,p) = lambda(p)^2 - 1; Langlands parameters
    (2ir, 0, -2ir).  Primes beyond the file's coverage raise MissingSeed
    rather than filling zeros, since silent zeros would quietly corrupt
    every dual-series comparison downstream.
    """
    r, lam = load_gl2_eigenvalues(path)
    seeds = {p: (v * v - 1.0, v * v - 1.0) for p, v in lam.items()}
    spec = CuspFormSpec(2j * r, 0j, -2j * r, theta,
                        f"sym2-r{r:.9f}", "sym2_maass")
    return hecke_extend(seeds, M, spec=spec)


def d3_sieve(M):
    """Table with A(m,1) = d3(m), the ordered-triple divisor count.

    Two sieve passes: d(n), then d3(n) = sum_{d|n} d(d).  Restricted by
    construction: no A(m,d) for d > 1 (callers get UnsupportedSource).
    """
    M = int(M)
    if M < 1:
        raise RangeViolation(f"table size must be positive, got {M}")
    dc = np.zeros(M + 1, dtype=np.int64)
    for d in range(1, M + 1):
        dc[d::d] += 1
    d3 = np.zeros(M + 1, dtype=np.int64)
    for d in range(1, M + 1):
        d3[d::d] += dc[d]
    vals = d3.astype(np.complex128)
    spec = CuspFormSpec(0j, 0j, 0j, 0.0, f"d3-{M}", "d3")
    return CoefficientTable(M=M, a_m1=vals, a_1m=vals.copy(), spec=spec)


def synthetic_table(M, seed=0, bound=2.0, self_dual=False):
    """Random bounded multiplicative table for structure-only tests.

    Prime seeds are drawn uniformly from the centered square of side
    2*bound (complex); self_dual=True ties A(1,p) = conj(A(p,1)).
    """
    rng = np.random.default_rng(seed)
    spf = _smallest_prime_factor(int(M))
    seeds = {}
    for p in range(2, int(M) + 1):
        if spf[p] == p:
            u = complex(rng.uniform(-bound, bound), rng.uniform(-bound, bound))
            if self_dual:
                v = u.conjugate()
            else:
                v = complex(rng.uniform(-bound, bound),
                            rng.uniform(-bound, bound))
            seeds[p] = (u, v)
    spec = CuspFormSpec(0j, 0j, 0j, THETA_PROVED,
                        f"synthetic-{seed}", "synthetic")
    return hecke_extend(seeds, M, spec=spec)


@dataclass(frozen=True)
class GrowthReport:
    d: int
    x_grid: np.ndarray
    first_sums: np.ndarray
    second_sums: np.ndarray
    first_slope: float
    second_slope: float


def rankin_selberg_check(table, d=1):
    """Fit growth of sum_{m<=x} |A(d,m)| and |A(d,m)|^2 against x.

    Both log-log slopes should sit near 1 (linear mean growth).  Needs
    M >= 100 to have a usable grid.
    """
    if table.M < 100:
        raise InsufficientData(
            f"growth check needs M >= 100, table has {table.M}")
    row = dual_coefficient_row(table, d, table.M)
    absrow = np.abs(row)
    c1 = np.cumsum(absrow)
    c2 = np.cumsum(absrow * absrow)
    grid = np.unique(np.geomspace(max(10, table.M ** 0.4),
                                  table.M, 12).astype(np.int64))
    s1 = c1[grid]
    s2 = c2[grid]
    lx = np.log(grid.astype(float))
    slope1 = float(np.polyfit(lx, np.log(s1), 1)[0])
    slope2 = float(np.polyfit(lx, np.log(s2), 1)[0])
    return GrowthReport(d=int(d), x_grid=grid, first_sums=s1,
                        second_sums=s2, first_slope=slope1,
                        second_slope=slope2)


_CACHE_MAGIC = "gl3lab-cache"
_CACHE_VERSION = "v1"


def cache_save(table, path):
    """Write A(m,1) to a versioned text cache (self-dual tables only).

    Format: header 'gl3lab-cache v1 <label> <M>', then one 'm re im'
    line per index; repr-formatted floats round-trip bit-exactly.
    """
    if not table.is_self_dual():
        raise UnsupportedSource(
            "cache format stores A(m,1) only; table is not self-dual")
    label = table.spec.label.replace(" ", "-")
    with open(path, "w") as fh:
        fh.write(f"{_CACHE_MAGIC} {_CACHE_VERSION} {label} {table.M}\n")
        a = table.a_m1
        for m in range(1, table.M + 1):
            fh.write(f"{m} {float(a[m].real)!r} {float(a[m].imag)!r}\n")


def cache_load(path, spec):
    """Read a coefficient cache back into a table under the given spec.

    The dual row is reconstructed as conj(A(m,1)).  Header or body
    mismatches raise ParseError.
    """
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        parts = header.split()
        if len(parts) != 4 or parts[0] != _CACHE_MAGIC or \
                parts[1] != _CACHE_VERSION:
            raise ParseError(f"bad cache header {header!r}",
                             path=str(path), line_number=1)
        try:
            M = int(parts[3])
        except ValueError:
            raise ParseError(f"bad table size {parts[3]!r}",
                             path=str(path), line_number=1)
        if M < 1:
            raise ParseError(f"bad table size {M}",
                             path=str(path), line_number=1)
        a = np.zeros(M + 1, dtype=np.complex128)
        seen = np.zeros(M + 1, dtype=bool)
        for ln, raw in enumerate(fh, start=2):
            fields = raw.split()
            if len(fields) != 3:
                raise ParseError("expected 'm re im'",
                                 path=str(path), line_number=ln)
            try:
                m = int(fields[0])
                re, im = float(fields[1]), float(fields[2])
            except ValueError:
                raise ParseError(f"bad cache line {raw.rstrip()!r}",
                                 path=str(path), line_number=ln)
            if not 1 <= m <= M or seen[m]:
                raise ParseError(f"index {m} out of range or repeated",
                                 path=str(path), line_number=ln)
            seen[m] = True
            a[m] = complex(re, im)
    if not seen[1:].all():
        missing = int(np.flatnonzero(~seen[1:])[0]) + 1
        raise ParseError(f"cache incomplete: no entry for m={missing}",
                         path=str(path))
    return CoefficientTable(M=M, a_m1=a, a_1m=np.conj(a), spec=spec)

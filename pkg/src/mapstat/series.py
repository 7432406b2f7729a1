"""Truncated exponential generating functions for random mappings.

The rooted labelled trees have EGF ``T(x) = sum k**(k-1) x**k / k!``, a
mapping is a set of cycles of trees, so ``1 / (1 - T)`` is the mapping EGF
and ``C = log(1 / (1 - T))`` counts connected mappings.  Marking the pieces
that exceed a size bound gives the distribution functions of the ranked
component and tree sizes:

    P(mu_{n,r} <= m)  = n!/n**n [x**n] exp(C_m) * sum_{j<r} (C - C_m)**j / j!
    P(tau_{n,s} <= m) = n!/n**n [x**n] sum_{j<s} (T - T_m)**j / (1 - T_m)**(j+1)

where ``F_m`` keeps the terms of degree at most ``m``.

Two precision modes are offered.  ``"rational"`` works with exact
:class:`~fractions.Fraction` coefficients.  ``"float"`` stores the degree-k
coefficient multiplied by ``e**-k`` (the series in ``y = e x``), which keeps
every stored value of order one; the factor ``n! e**n / n**n`` is applied in
log space on extraction.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numba
import numpy as np
from scipy.special import gammaln

__all__ = [
    "MODES",
    "ExtrapolationResult",
    "SeriesPoly",
    "SingularFit",
    "TruncationTooShort",
    "component_cdf_table",
    "connected_series",
    "exact_expectation_mu",
    "exact_expectation_tau",
    "expectation_curve",
    "extraction_factor",
    "extrapolate_constant",
    "extrapolate_ps",
    "largest_component_cdf",
    "mapping_series",
    "rth_largest_component_cdf",
    "sth_largest_tree_cdf",
    "tree_cdf_table",
    "tree_series",
]

MODES = ("rational", "float")


class TruncationTooShort(ValueError):
    pass


class SingularFit(ValueError):
    pass


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


@dataclass(frozen=True, eq=False)
class SeriesPoly:
    """Power series truncated after degree ``N``.

    ``coeffs[k]`` is the coefficient of ``x**k``: a Fraction in rational mode,
    ``coefficient * e**-k`` (float64) in float mode.  Arithmetic truncates to
    the smaller order of the operands.
    """

    coeffs: tuple | np.ndarray
    mode: str

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        head = ", ".join(str(c) for c in list(self.coeffs[:6]))
        return f"SeriesPoly(mode={self.mode!r}, N={self.N}, coeffs=[{head}{', ...' if self.N > 5 else ''}])"

    # construction helpers

    @classmethod
    def _wrap(cls, values, mode):
        if mode == "float":
            arr = np.asarray(values, dtype=np.float64)
            arr.setflags(write=False)
            return cls(arr, mode)
        return cls(tuple(values), mode)

    @classmethod
    def constant(cls, value, N: int, mode: str) -> "SeriesPoly":
        zero = _zero(mode)
        return cls._wrap([_num(value, mode)] + [zero] * N, mode)

    def _compatible(self, other):
        if not isinstance(other, SeriesPoly):
            return SeriesPoly.constant(other, self.N, self.mode)
        if other.mode != self.mode:
            raise ValueError("cannot combine series of different modes")
        return other

    # arithmetic

    def __add__(self, other):
        other = self._compatible(other)
        N = min(self.N, other.N)
        return SeriesPoly._wrap([self[k] + other[k] for k in range(N + 1)], self.mode)

    __radd__ = __add__

    def __neg__(self):
        return SeriesPoly._wrap([-c for c in self.coeffs], self.mode)

    def __sub__(self, other):
        return self + (-self._compatible(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, SeriesPoly):
            c = _num(other, self.mode)
            return SeriesPoly._wrap([c * a for a in self.coeffs], self.mode)
        other = self._compatible(other)
        N = min(self.N, other.N)
        if self.mode == "float":
            return SeriesPoly._wrap(np.convolve(self.coeffs[: N + 1], other.coeffs[: N + 1])[: N + 1], "float")
        a, b = self.coeffs, other.coeffs
        lo_a = _valuation(a)
        lo_b = _valuation(b)
        out = [Fraction(0)] * (N + 1)
        for i in range(lo_a, N + 1 - lo_b):
            ai = a[i]
            if ai:
                for j in range(lo_b, N + 1 - i):
                    out[i + j] += ai * b[j]
        return SeriesPoly._wrap(out, "rational")

    __rmul__ = __mul__

    def __pow__(self, j: int):
        result = SeriesPoly.constant(1, self.N, self.mode)
        for _ in range(j):
            result = result * self
        return result

    def truncate(self, m: int) -> "SeriesPoly":
        """Keep degrees ``0..m``; higher coefficients become zero (order unchanged)."""
        zero = _zero(self.mode)
        return SeriesPoly._wrap([c if k <= m else zero for k, c in enumerate(self.coeffs)], self.mode)

    def resize(self, N: int) -> "SeriesPoly":
        if N > self.N:
            raise TruncationTooShort(f"series known to degree {self.N}, need {N}")
        return SeriesPoly._wrap(self.coeffs[: N + 1], self.mode)

    def exp(self) -> "SeriesPoly":
        """``exp(a)`` for ``a[0] == 0``, by ``n F_n = sum k a_k F_{n-k}``."""
        a = self.coeffs
        if a[0] != 0:
            raise ValueError("exp needs a zero constant term")
        N = self.N
        if self.mode == "float":
            ka = np.arange(N + 1) * np.asarray(a)
            f = np.zeros(N + 1)
            f[0] = 1.0
            for n in range(1, N + 1):
                f[n] = ka[1 : n + 1] @ f[n - 1 :: -1] / n
            return SeriesPoly._wrap(f, "float")
        ka = [k * c for k, c in enumerate(a)]
        nz = [k for k in range(1, N + 1) if ka[k]]
        f = [Fraction(1)] + [Fraction(0)] * N
        for n in range(1, N + 1):
            acc = Fraction(0)
            for k in nz:
                if k > n:
                    break
                acc += ka[k] * f[n - k]
            f[n] = acc / n
        return SeriesPoly._wrap(f, "rational")

    def log(self) -> "SeriesPoly":
        """``log(a)`` for ``a[0] == 1``, by ``n L_n = n a_n - sum_{k<n} k L_k a_{n-k}``."""
        a = self.coeffs
        if a[0] != 1:
            raise ValueError("log needs constant term 1")
        N = self.N
        if self.mode == "float":
            a = np.asarray(a)
            out = np.zeros(N + 1)
            kl = np.zeros(N + 1)
            for n in range(1, N + 1):
                kl[n] = n * a[n] - kl[1:n] @ a[n - 1 : 0 : -1]
                out[n] = kl[n] / n
            return SeriesPoly._wrap(out, "float")
        out = [Fraction(0)] * (N + 1)
        for n in range(1, N + 1):
            acc = n * a[n]
            for k in range(1, n):
                acc -= k * out[k] * a[n - k]
            out[n] = acc / n
        return SeriesPoly._wrap(out, "rational")

    def inv_one_minus(self) -> "SeriesPoly":
        """``1 / (1 - a)`` for ``a[0] == 0``, by ``F_n = sum a_k F_{n-k}``."""
        a = self.coeffs
        if a[0] != 0:
            raise ValueError("1/(1-a) needs a zero constant term")
        N = self.N
        if self.mode == "float":
            a = np.asarray(a)
            f = np.zeros(N + 1)
            f[0] = 1.0
            for n in range(1, N + 1):
                f[n] = a[1 : n + 1] @ f[n - 1 :: -1]
            return SeriesPoly._wrap(f, "float")
        nz = [k for k in range(1, N + 1) if a[k]]
        f = [Fraction(1)] + [Fraction(0)] * N
        for n in range(1, N + 1):
            acc = Fraction(0)
            for k in nz:
                if k > n:
                    break
                acc += a[k] * f[n - k]
            f[n] = acc
        return SeriesPoly._wrap(f, "rational")

    def probability(self, n: int):
        """``n!/n**n [x**n]`` of this series (scaling undone in float mode)."""
        if n > self.N:
            raise TruncationTooShort(f"series known to degree {self.N}, need {n}")
        return self.coeffs[n] * extraction_factor(n, self.mode)

    def count(self, n: int):
        """``n! [x**n]``: the number of labelled objects of size n."""
        if self.mode == "float":
            return float(self.coeffs[n] * math.exp(math.lgamma(n + 1) + n))
        return self.coeffs[n] * math.factorial(n)


def _zero(mode):
    return 0.0 if mode == "float" else Fraction(0)


def _num(value, mode):
    return float(value) if mode == "float" else Fraction(value)


def _valuation(c):
    for k, x in enumerate(c):
        if x:
            return k
    return len(c)


def extraction_factor(n: int, mode: str):
    """``n!/n**n`` (rational) or ``n! e**n / n**n`` (float, via log-gamma)."""
    if mode == "float":
        if n == 0:
            return 1.0
        return math.exp(math.lgamma(n + 1) + n - n * math.log(n))
    return Fraction(math.factorial(n), n**n) if n else Fraction(1)


# ---------------------------------------------------------------------------
# base series


@functools.lru_cache(maxsize=None)
def tree_series(N: int, mode: str = "rational") -> SeriesPoly:
    """Rooted labelled trees: degree-k coefficient ``k**(k-1) / k!``."""
    _check_mode(mode)
    if N < 1:
        raise ValueError("N must be at least 1")
    if mode == "float":
        k = np.arange(1, N + 1, dtype=np.float64)
        vals = np.exp((k - 1) * np.log(k) - gammaln(k + 1) - k)
        return SeriesPoly._wrap(np.concatenate(([0.0], vals)), "float")
    return SeriesPoly._wrap([Fraction(0)] + [Fraction(k ** (k - 1), math.factorial(k)) for k in range(1, N + 1)], mode)


@functools.lru_cache(maxsize=None)
def mapping_series(N: int, mode: str = "rational") -> SeriesPoly:
    """All mappings, ``1 / (1 - T)``; ``n! [x**n]`` equals ``n**n``."""
    return tree_series(N, mode).inv_one_minus()


@functools.lru_cache(maxsize=None)
def connected_series(N: int, mode: str = "rational") -> SeriesPoly:
    """Connected mappings, ``C = log(1 / (1 - T))``.

    Evaluated through ``C' = T' / (1 - T)`` so that float mode sums only
    positive terms.
    """
    T = tree_series(N, mode)
    G = mapping_series(N, mode)
    if mode == "float":
        kt = np.arange(N + 1) * np.asarray(T.coeffs)
        dc = np.convolve(kt, np.asarray(G.coeffs))[: N + 1]
        out = np.zeros(N + 1)
        out[1:] = dc[1:] / np.arange(1, N + 1)
        return SeriesPoly._wrap(out, "float")
    kt = SeriesPoly._wrap([k * c for k, c in enumerate(T.coeffs)], mode)
    dc = kt * G
    return SeriesPoly._wrap([Fraction(0)] + [dc[k] / k for k in range(1, N + 1)], mode)


def _order(n, N):
    if n < 0:
        raise ValueError("n must be nonnegative")
    if N is None:
        return max(n, 1)
    if n > N:
        raise TruncationTooShort(f"n={n} exceeds the truncation order N={N}")
    return N


def _check_m(n, m):
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")


def _one(mode):
    return 1.0 if mode == "float" else Fraction(1)


# ---------------------------------------------------------------------------
# distribution functions


def rth_largest_component_cdf(n: int, m: int, r: int = 1, mode: str = "rational", N: int | None = None):
    """``P(mu_{n,r} <= m)``, the r-th largest component having at most m vertices."""
    _check_mode(mode)
    N = _order(n, N)
    _check_m(n, m)
    if r < 1:
        raise ValueError("r must be at least 1")
    if n == 0:
        return _one(mode)
    C = connected_series(N, mode).resize(n)
    Cm = C.truncate(m)
    big = C - Cm
    marked = SeriesPoly.constant(1, n, mode)
    term = marked
    for j in range(1, r):
        term = term * big * _num(Fraction(1, j), mode)
        marked = marked + term
    return (Cm.exp() * marked).probability(n)


def largest_component_cdf(n: int, m: int, mode: str = "rational", N: int | None = None):
    """``P(mu_n <= m) = n!/n**n [x**n] exp(C_m)``."""
    return rth_largest_component_cdf(n, m, 1, mode, N)


def sth_largest_tree_cdf(n: int, m: int, s: int = 1, mode: str = "rational", N: int | None = None):
    """``P(tau_{n,s} <= m)``, fewer than s trees having more than m vertices."""
    _check_mode(mode)
    N = _order(n, N)
    _check_m(n, m)
    if s < 1:
        raise ValueError("s must be at least 1")
    if n == 0:
        return _one(mode)
    T = tree_series(N, mode).resize(n)
    Tm = T.truncate(m)
    A = Tm.inv_one_minus()
    step = (T - Tm) * A
    term = A
    total = A
    for _ in range(1, s):
        term = term * step
        total = total + term
    return total.probability(n)


def component_cdf_table(n: int, r: int = 1, mode: str = "rational") -> list:
    """``[P(mu_{n,r} <= m) for m in 0..n]``."""
    return [rth_largest_component_cdf(n, m, r, mode) for m in range(n + 1)]


def tree_cdf_table(n: int, s: int = 1, mode: str = "rational") -> list:
    """``[P(tau_{n,s} <= m) for m in 0..n]``."""
    return [sth_largest_tree_cdf(n, m, s, mode) for m in range(n + 1)]


# ---------------------------------------------------------------------------
# expectations


def exact_expectation_mu(n: int, mode: str = "rational", N: int | None = None):
    """``E(mu_n) = sum_{m<n} (1 - P(mu_n <= m))``."""
    _check_mode(mode)
    _order(n, N)
    if mode == "float":
        return float(expectation_curve("mu", max(n, 1))[n] * n)
    return sum((1 - largest_component_cdf(n, m, mode)) for m in range(n))


def exact_expectation_tau(n: int, s: int = 1, mode: str = "rational", N: int | None = None):
    """``E(tau_{n,s})`` as the tail sum of :func:`sth_largest_tree_cdf`."""
    _check_mode(mode)
    _order(n, N)
    if s < 1:
        raise ValueError("s must be at least 1")
    if mode == "float":
        return float(expectation_curve(("tau", s), max(n, 1))[n] * n)
    return sum((1 - sth_largest_tree_cdf(n, m, s, mode)) for m in range(n))


@numba.njit(cache=True)
def _mu_tail_sums(c, N):
    """``acc[n] = sum_{m<n} [y**n] exp(C_m)`` for all ``n <= N`` (scaled coefficients)."""
    acc = np.zeros(N + 1)
    kc = np.empty(N + 1)
    for k in range(N + 1):
        kc[k] = k * c[k]
    f = np.empty(N + 1)
    f[0] = 1.0
    # m = 0 contributes nothing above degree 0
    for m in range(1, N):
        for j in range(1, N + 1):
            top = j if j < m else m
            s = 0.0
            for k in range(1, top + 1):
                s += kc[k] * f[j - k]
            f[j] = s / j
            if j > m:
                acc[j] += f[j]
    return acc


@numba.njit(cache=True)
def _tau_tail_sums(t, N, s_max):
    """``acc[s-1, n] = sum_{m<n} [y**n] sum_{j<s} D**j A**(j+1)`` with
    ``A = 1/(1 - T_m)`` and ``D = T - T_m``."""
    acc = np.zeros((s_max, N + 1))
    F = np.zeros((s_max, N + 1))
    H = np.zeros(N + 1)
    for m in range(N):
        # F_0 = A
        F[0, 0] = 1.0
        for j in range(1, N + 1):
            top = j if j < m else m
            s = 0.0
            for k in range(1, top + 1):
                s += t[k] * F[0, j - k]
            F[0, j] = s
        for i in range(1, s_max):
            lo = i * (m + 1)
            if lo > N:
                for j in range(N + 1):
                    F[i, j] = 0.0
                continue
            prev_lo = (i - 1) * (m + 1)
            for j in range(lo):
                F[i, j] = 0.0
            for j in range(lo, N + 1):
                # H_j = sum_{k>m} t_k F_{i-1}[j-k]
                h = 0.0
                for k in range(m + 1, j - prev_lo + 1):
                    h += t[k] * F[i - 1, j - k]
                top = j - lo if j - lo < m else m
                s = 0.0
                for k in range(1, top + 1):
                    s += t[k] * F[i, j - k]
                F[i, j] = h + s
        for j in range(m + 1, N + 1):
            run = 0.0
            for i in range(s_max):
                run += F[i, j]
                acc[i, j] += run
    return acc


# sweeps keyed by (N, s_max); a longer or wider sweep serves shorter requests
_MU_SWEEPS: dict[int, np.ndarray] = {}
_TAU_SWEEPS: dict[tuple[int, int], np.ndarray] = {}


def _per_vertex(acc: np.ndarray, N: int) -> np.ndarray:
    n = np.arange(N + 1, dtype=np.float64)
    logf = np.array([0.0] + [math.lgamma(k + 1) + k - k * math.log(k) for k in range(1, N + 1)])
    expect = n - np.exp(logf) * acc
    out = np.zeros_like(expect)
    out[..., 1:] = expect[..., 1:] / n[1:]
    return out


def expectation_curve(stat, N: int, s_max: int | None = None) -> np.ndarray:
    """``E(stat_n) / n`` for ``n = 0..N`` in float mode (entry 0 is 0).

    `stat` is ``"mu"`` or ``("tau", s)``.  One tree sweep yields every rank
    up to `s_max` (default ``s``) and is cached, so asking for ``s_max=4``
    once makes the lower ranks free.  Cost is O(N**3) scalar operations.
    """
    kind, s = _parse_stat(stat)
    if kind == "mu":
        for n_cached, curve in _MU_SWEEPS.items():
            if n_cached >= N:
                return curve[: N + 1]
        c = np.ascontiguousarray(connected_series(N, "float").coeffs)
        _MU_SWEEPS[N] = _per_vertex(_mu_tail_sums(c, N), N)
        return _MU_SWEEPS[N]
    for (n_cached, sm), curves in _TAU_SWEEPS.items():
        if n_cached >= N and sm >= s:
            return curves[s - 1][: N + 1]
    s_max = max(s, s_max or 0)
    t = np.ascontiguousarray(tree_series(N, "float").coeffs)
    _TAU_SWEEPS[(N, s_max)] = _per_vertex(_tau_tail_sums(t, N, s_max), N)
    return _TAU_SWEEPS[(N, s_max)][s - 1]


def _parse_stat(stat):
    if stat == "mu":
        return "mu", 0
    if isinstance(stat, str) and stat.startswith("tau"):
        return "tau", int(stat[3:] or 1)
    kind, s = stat
    if kind != "tau" or int(s) < 1:
        raise ValueError(f"unknown statistic {stat!r}")
    return "tau", int(s)


# ---------------------------------------------------------------------------
# extrapolation


@dataclass(frozen=True)
class ExtrapolationResult:
    """Least-squares fit of ``a + b n**-1/2 + c n**-1`` to ``E(stat_n)/n``."""

    stat: str
    grid: tuple[int, ...]
    values: tuple[float, ...]
    coefficients: tuple[float, float, float]
    limit_estimate: float
    residual_norm: float

    def to_json(self) -> dict:
        a, b, c = self.coefficients
        return {
            "stat": self.stat,
            "grid": list(self.grid),
            "values": list(self.values),
            "model": "a + b*n^(-1/2) + c*n^(-1)",
            "coefficients": {"a": a, "b": b, "c": c},
            "limit_estimate": self.limit_estimate,
            "residual_norm": self.residual_norm,
        }


def _fit(stat_name, grid, values) -> ExtrapolationResult:
    x = np.asarray(grid, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    design = np.column_stack([np.ones_like(x), x**-0.5, 1.0 / x])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 3:
        raise SingularFit("extrapolation design matrix is rank deficient")
    resid = float(np.linalg.norm(design @ coef - y))
    a, b, c = (float(v) for v in coef)
    if not math.isfinite(a):
        raise SingularFit("non-finite limit estimate")
    return ExtrapolationResult(stat_name, tuple(int(g) for g in grid), tuple(float(v) for v in y), (a, b, c), a, resid)


def _check_grid(grid):
    grid = [int(g) for g in grid]
    if len(set(grid)) < 3:
        raise SingularFit("need at least three distinct grid points")
    if min(grid) < 1:
        raise ValueError("grid points must be positive")
    return sorted(set(grid))


def extrapolate_constant(stat, grid, mode: str = "float", s_max: int | None = None) -> ExtrapolationResult:
    """Estimate ``lim E(stat_n)/n`` from exact finite-n values on `grid`.

    `stat` is ``"mu"`` or ``("tau", s)`` (``"tau1"`` etc. also accepted).
    Rational mode is exact but only practical for grids below ~60.
    """
    _check_mode(mode)
    grid = _check_grid(grid)
    kind, s = _parse_stat(stat)
    name = "mu" if kind == "mu" else f"tau{s}"
    if mode == "float":
        curve = expectation_curve("mu" if kind == "mu" else ("tau", s), max(grid), s_max=s_max)
        values = [curve[g] for g in grid]
    elif kind == "mu":
        values = [float(exact_expectation_mu(g, mode) / g) for g in grid]
    else:
        values = [float(exact_expectation_tau(g, s, mode) / g) for g in grid]
    return _fit(name, grid, values)


def extrapolate_ps(grid, s_values=(1, 2, 3, 4), mode: str = "float"):
    """Limits for ``mu`` and each ``tau_s`` plus ``p_s = lim(tau_s) / lim(mu)``.

    Returns ``(mu_fit, {s: tau_fit}, {s: p_s})``.
    """
    s_values = tuple(s_values)
    mu_fit = extrapolate_constant("mu", grid, mode)
    tau_fits = {s: extrapolate_constant(("tau", s), grid, mode, s_max=max(s_values)) for s in s_values}
    ps = {s: f.limit_estimate / mu_fit.limit_estimate for s, f in tau_fits.items()}
    return mu_fit, tau_fits, ps

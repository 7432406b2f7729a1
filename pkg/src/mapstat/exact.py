"""Exhaustive enumeration of all ``n**n`` mappings of [n] for small n.

Every statistic is aggregated with integer arithmetic and reported as an
exact :class:`fractions.Fraction`, which makes this module the ground truth
against which the series and Monte Carlo routes are checked.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numba
import numpy as np

from .fungraph import _record

__all__ = ["DEFAULT_CAP", "LONG_RUN_CAP", "CapExceeded", "ExactTable", "enumerate_all"]

DEFAULT_CAP = 7
LONG_RUN_CAP = 8


class CapExceeded(ValueError):
    pass


@numba.njit(cache=True)
def _enumerate_block(n, lead, s_max, r_max, mu_counts, tau_counts, flag_counts, tau_flag_sums, pair):
    """Visit every mapping with ``T(1) = lead + 1`` in odometer order.

    Counts are accumulated in place.  ``pair[0]`` collects
    ``tau_1 * tau_2 * [t_1 and t_2 inside m_n]``.
    """
    images = np.zeros(n, np.int64)
    images[0] = lead
    mu = np.zeros(r_max, np.int64)
    tau = np.zeros(s_max, np.int64)
    flag = np.zeros(s_max, np.int64)
    while True:
        _record(images, s_max, r_max, mu, tau, flag)
        for r in range(r_max):
            mu_counts[r, mu[r]] += 1
        for s in range(s_max):
            tau_counts[s, tau[s]] += 1
            flag_counts[s] += flag[s]
            tau_flag_sums[s] += tau[s] * flag[s]
        if s_max >= 2:
            pair[0] += tau[0] * tau[1] * flag[0] * flag[1]
        # odometer increment over positions 1..n-1, last position fastest
        i = n - 1
        while i >= 1:
            images[i] += 1
            if images[i] < n:
                break
            images[i] = 0
            i -= 1
        if i == 0:
            break


def _run_block(args):
    n, lead, s_max, r_max = args
    s_alloc = max(s_max, 2)
    mu_counts = np.zeros((r_max, n + 1), np.int64)
    tau_counts = np.zeros((s_alloc, n + 1), np.int64)
    flag_counts = np.zeros(s_alloc, np.int64)
    tau_flag_sums = np.zeros(s_alloc, np.int64)
    pair = np.zeros(1, np.int64)
    _enumerate_block(n, lead, s_alloc, r_max, mu_counts, tau_counts, flag_counts, tau_flag_sums, pair)
    return mu_counts, tau_counts, flag_counts, tau_flag_sums, pair


def _rat(x: Fraction) -> dict:
    return {"num": str(x.numerator), "den": str(x.denominator)}


@dataclass(frozen=True)
class ExactTable:
    """Exact statistics of the uniform random mapping on [n].

    Distribution lists are indexed by value: ``mu_dist[r - 1][k]`` is
    ``P(mu_{n,r} = k)`` and ``tau_dist[s - 1][k]`` is ``P(tau_{n,s} = k)``.
    ``conditional[s - 1]`` is the probability that a uniform vertex lies in
    the s-th largest tree given that it lies in the largest component.
    """

    n: int
    s_max: int
    r_max: int
    mean_mu: Fraction
    mean_mu_sq: Fraction
    mean_tau: tuple[Fraction, ...]
    mean_tau_in_largest: tuple[Fraction, ...]
    subgraph_prob: tuple[Fraction, ...]
    conditional: tuple[Fraction, ...]
    pair_conditional: Fraction | None
    mu_dist: tuple[tuple[Fraction, ...], ...]
    tau_dist: tuple[tuple[Fraction, ...], ...]
    connected_count: int

    def mu_cdf(self, r: int = 1) -> list[Fraction]:
        """``P(mu_{n,r} <= m)`` for ``m = 0..n``."""
        return _cumulative(self.mu_dist[r - 1])

    def tau_cdf(self, s: int = 1) -> list[Fraction]:
        return _cumulative(self.tau_dist[s - 1])

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "s_max": self.s_max,
            "r_max": self.r_max,
            "mean_mu": _rat(self.mean_mu),
            "mean_mu_sq": _rat(self.mean_mu_sq),
            "mean_tau": [_rat(x) for x in self.mean_tau],
            "mean_tau_in_largest": [_rat(x) for x in self.mean_tau_in_largest],
            "subgraph_prob": [_rat(x) for x in self.subgraph_prob],
            "conditional": [_rat(x) for x in self.conditional],
            "pair_conditional": None if self.pair_conditional is None else _rat(self.pair_conditional),
            "mu_dist": [[_rat(x) for x in row] for row in self.mu_dist],
            "tau_dist": [[_rat(x) for x in row] for row in self.tau_dist],
            "connected_count": self.connected_count,
        }


def _cumulative(dist) -> list[Fraction]:
    out, acc = [], Fraction(0)
    for p in dist:
        acc += p
        out.append(acc)
    return out


def enumerate_all(n: int, s_max: int = 3, r_max: int = 2, cap: int = DEFAULT_CAP, workers: int = 1) -> ExactTable:
    """Aggregate every mapping of [n] into an :class:`ExactTable`.

    The image-tuple space is split by the value of ``T(1)``; blocks can run
    on `workers` processes and are summed in block order, so the result does
    not depend on `workers`.

    Raises
    ------
    CapExceeded
        If ``n > cap``.  Raising `cap` to :data:`LONG_RUN_CAP` allows n = 8
        (about 1.7e7 decompositions).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if s_max < 1 or r_max < 1:
        raise ValueError("s_max and r_max must be at least 1")
    if n > cap:
        raise CapExceeded(f"n={n} exceeds the enumeration cap {cap}")
    jobs = [(n, lead, s_max, r_max) for lead in range(n)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            blocks = list(pool.map(_run_block, jobs))
    else:
        blocks = [_run_block(j) for j in jobs]
    mu_counts, tau_counts, flag_counts, tau_flag_sums, pair = (
        sum((b[i].astype(object) for b in blocks[1:]), blocks[0][i].astype(object)) for i in range(5)
    )

    total = n**n
    values = range(n + 1)
    mu_dist = tuple(tuple(Fraction(int(c), total) for c in row) for row in mu_counts)
    tau_dist = tuple(tuple(Fraction(int(c), total) for c in row) for row in tau_counts[:s_max])
    mean_mu = sum(k * p for k, p in zip(values, mu_dist[0]))
    mean_mu_sq = sum(k * k * p for k, p in zip(values, mu_dist[0]))
    mean_tau = tuple(sum(k * p for k, p in zip(values, row)) for row in tau_dist)
    mean_tau_in = tuple(Fraction(int(x), total) for x in tau_flag_sums[:s_max])

    pair_conditional = None
    if n >= 2:
        # both vertices of a uniform pair land in m_n with weight C(mu, 2);
        # the favourable pairs number tau_1 * tau_2 when t_1, t_2 lie in m_n
        both_in = sum(Fraction(k * (k - 1), 2) * p for k, p in zip(values, mu_dist[0]))
        pair_conditional = Fraction(int(pair[0]), total) / both_in

    return ExactTable(
        n=n,
        s_max=s_max,
        r_max=r_max,
        mean_mu=mean_mu,
        mean_mu_sq=mean_mu_sq,
        mean_tau=mean_tau,
        mean_tau_in_largest=mean_tau_in,
        subgraph_prob=tuple(Fraction(int(c), total) for c in flag_counts[:s_max]),
        conditional=tuple(x / mean_mu for x in mean_tau_in),
        pair_conditional=pair_conditional,
        mu_dist=mu_dist,
        tau_dist=tau_dist,
        connected_count=int(mu_counts[0][n]),
    )

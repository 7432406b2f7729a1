"""Monte Carlo estimates for the largest component and the ranked trees.

Each trial draws a mapping ``T``, then a uniform vertex ``v`` and a uniform
unordered pair ``{u, w}`` from the same stream, decomposes ``T`` once and
stores one integer record.  Every estimator reads the same records, so all
of them share draws (common random numbers).

Trials are cut into chunks of :data:`CHUNK_SIZE`; chunk ``k`` draws from
``rs.child(k)``.  The chunk layout depends only on the trial count, so the
merged records, and everything computed from them, are identical for any
number of worker processes.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist

import numba
import numpy as np

from .fungraph import _record
from .sampling import RandomStream, sample_mapping, sample_vertex, sample_vertex_pair

__all__ = [
    "CHUNK_SIZE",
    "ECDF_GRID",
    "DegenerateCondition",
    "Draws",
    "Estimate",
    "InvalidConfig",
    "InvariantViolation",
    "MomentReport",
    "conditional_ps",
    "draw",
    "ecdf",
    "estimate_conditional_ps",
    "estimate_moments",
    "estimate_pair_conditional",
    "estimate_ratio_ps",
    "estimate_subgraph_prob",
    "gap_report",
    "indicator_ratio_ps",
    "moments",
    "pair_conditional",
    "ratio_gap",
    "ratio_ps",
    "subgraph_prob",
]

CHUNK_SIZE = 256
ECDF_POINTS = 1001
ECDF_GRID = np.linspace(0.0, 1.0, ECDF_POINTS)


class InvalidConfig(ValueError):
    pass


class DegenerateCondition(ArithmeticError):
    """No trial satisfied the conditioning event."""


class InvariantViolation(AssertionError):
    pass


@dataclass(frozen=True)
class Estimate:
    point: float
    std_error: float
    ci_low: float
    ci_high: float
    trials: int
    effective_trials: int
    level: float = 0.99

    @classmethod
    def normal(cls, point, std_error, trials, effective_trials=None, level=0.99) -> "Estimate":
        """Normal-approximation interval ``point -/+ z * std_error``."""
        z = NormalDist().inv_cdf(0.5 + level / 2)
        point, std_error = float(point), float(max(std_error, 0.0))
        return cls(
            point=point,
            std_error=std_error,
            ci_low=point - z * std_error,
            ci_high=point + z * std_error,
            trials=int(trials),
            effective_trials=int(trials if effective_trials is None else effective_trials),
            level=level,
        )

    def to_json(self) -> dict:
        return {
            "point": self.point,
            "std_error": self.std_error,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "level": self.level,
            "trials": self.trials,
            "effective_trials": self.effective_trials,
        }


# ---------------------------------------------------------------------------
# drawing


@numba.njit(cache=True)
def _trial(images0, v, u, w, s_max, r_max, row):
    mu = row[:r_max]
    tau = row[r_max : r_max + s_max]
    flag = row[r_max + s_max : r_max + 2 * s_max]
    root, comp, largest, tree_rank = _record(images0, s_max, r_max, mu, tau, flag)
    for s in range(s_max):
        if tau[s] > mu[0]:
            return False
    base = r_max + 2 * s_max
    row[base] = 1 if comp[v] == largest else 0
    row[base + 1] = tree_rank[root[v]]
    if u < 0:
        row[base + 2] = -1
        row[base + 3] = -1
    else:
        both = comp[u] == largest and comp[w] == largest
        row[base + 2] = 1 if both else 0
        ru = tree_rank[root[u]]
        rw = tree_rank[root[w]]
        row[base + 3] = 1 if both and ((ru == 1 and rw == 2) or (ru == 2 and rw == 1)) else 0
    return True


def _run_chunk(args):
    n, seed, stream_id, path, count, s_max, r_max = args
    rs = RandomStream(seed, stream_id, path)
    out = np.zeros((count, r_max + 2 * s_max + 4), np.int64)
    for i in range(count):
        images0 = sample_mapping(n, rs).zero_based()
        v = sample_vertex(n, rs) - 1
        u, w = sample_vertex_pair(n, rs) if n >= 2 else (0, 0)
        if not _trial(images0, v, u - 1, w - 1, s_max, r_max, out[i]):
            raise InvariantViolation(f"tau exceeded mu for n={n}, chunk {path}, trial {i}")
    return out


@dataclass(frozen=True)
class Draws:
    """Per-trial integer records for one ``n``.

    Columns: ``mu[r]`` for ``r < r_max``, ``tau[s]`` and ``in_largest[s]``
    for ``s < s_max``, then ``v_in_m``, ``v_rank`` (rank of v's tree, 0 when
    above ``s_max``), ``pair_in_m`` and ``pair_split`` (one pair vertex in
    each of t_1 and t_2, both in m_n); the pair columns are -1 when n = 1.
    """

    n: int
    s_max: int
    r_max: int
    records: np.ndarray = field(repr=False)
    rng: dict = field(default_factory=dict)

    @property
    def trials(self) -> int:
        return int(self.records.shape[0])

    @property
    def mu(self) -> np.ndarray:
        return self.records[:, : self.r_max]

    @property
    def tau(self) -> np.ndarray:
        return self.records[:, self.r_max : self.r_max + self.s_max]

    @property
    def in_largest(self) -> np.ndarray:
        return self.records[:, self.r_max + self.s_max : self.r_max + 2 * self.s_max]

    def _col(self, k):
        return self.records[:, self.r_max + 2 * self.s_max + k]

    @property
    def v_in_m(self):
        return self._col(0)

    @property
    def v_rank(self):
        return self._col(1)

    @property
    def pair_in_m(self):
        return self._col(2)

    @property
    def pair_split(self):
        return self._col(3)

    def _check_s(self, s):
        if not 1 <= s <= self.s_max:
            raise InvalidConfig(f"s={s} outside the recorded ranks 1..{self.s_max}")


def draw(n: int, trials: int, rs: RandomStream, s_max: int = 4, r_max: int = 2, workers: int = 1) -> Draws:
    """Simulate `trials` independent two-step experiments on [n]."""
    if n < 1:
        raise InvalidConfig("n must be at least 1")
    if trials < 1:
        raise InvalidConfig("trials must be at least 1")
    if s_max < 1 or r_max < 1:
        raise InvalidConfig("s_max and r_max must be at least 1")
    jobs = [
        (n, rs.seed, rs.stream_id, rs.path + (k,), min(CHUNK_SIZE, trials - start), s_max, max(r_max, 1))
        for k, start in enumerate(range(0, trials, CHUNK_SIZE))
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_run_chunk, jobs))
    else:
        chunks = [_run_chunk(j) for j in jobs]
    rng = rs.metadata() | {"chunk_size": CHUNK_SIZE, "chunks": len(jobs)}
    return Draws(n, s_max, r_max, np.concatenate(chunks), rng)


# ---------------------------------------------------------------------------
# estimators on shared draws


def _mean_estimate(x, level, scale=1.0):
    x = np.asarray(x, dtype=np.float64) / scale
    se = x.std(ddof=1) / math.sqrt(len(x)) if len(x) > 1 else 0.0
    return Estimate.normal(x.mean(), se, len(x), level=level)


def _proportion(hits, total, trials, level):
    if total == 0:
        raise DegenerateCondition("conditioning event never occurred")
    p = hits / total
    return Estimate.normal(p, math.sqrt(p * (1 - p) / total), trials, total, level)


def _ratio(y, x, level):
    """Plug-in ``mean(y) / mean(x)`` with a delta-method standard error."""
    y = np.asarray(y, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    k = len(x)
    if x.sum() == 0:
        raise DegenerateCondition("denominator mean is zero")
    r = y.sum() / x.sum()
    if k > 1:
        cov = np.cov(np.vstack([y, x]), ddof=1)
        var = (cov[0, 0] - 2 * r * cov[0, 1] + r * r * cov[1, 1]) / (k * x.mean() ** 2)
        se = math.sqrt(max(var, 0.0))
    else:
        se = 0.0
    return Estimate.normal(r, se, k, level=level)


def ecdf(values, n: int) -> np.ndarray:
    """Fraction of ``values / n`` at or below each point of :data:`ECDF_GRID`.

    The comparison ``v / n <= k / 1000`` is done in integers.
    """
    v = np.sort(np.asarray(values, dtype=np.int64) * (ECDF_POINTS - 1))
    thresholds = np.arange(ECDF_POINTS, dtype=np.int64) * n
    return np.searchsorted(v, thresholds, side="right") / len(v)


@dataclass(frozen=True)
class MomentReport:
    n: int
    trials: int
    mean_mu_over_n: Estimate
    mean_mu_sq_over_n_sq: Estimate
    mean_tau_over_n: tuple[Estimate, ...]
    ecdf_mu_r: tuple[np.ndarray, ...] = field(repr=False)
    ecdf_tau_s: tuple[np.ndarray, ...] = field(repr=False)
    rng: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "mean_mu_over_n": self.mean_mu_over_n.to_json(),
            "mean_mu_sq_over_n_sq": self.mean_mu_sq_over_n_sq.to_json(),
            "mean_tau_over_n": [e.to_json() for e in self.mean_tau_over_n],
            "ecdf_grid_points": ECDF_POINTS,
            "ecdf_mu_r": [row.tolist() for row in self.ecdf_mu_r],
            "ecdf_tau_s": [row.tolist() for row in self.ecdf_tau_s],
            "rng": self.rng,
        }


def moments(d: Draws, level: float = 0.99) -> MomentReport:
    if d.trials < 2:
        raise InvalidConfig("moment estimates need at least two trials")
    mu = d.mu[:, 0]
    return MomentReport(
        n=d.n,
        trials=d.trials,
        mean_mu_over_n=_mean_estimate(mu, level, d.n),
        mean_mu_sq_over_n_sq=_mean_estimate(mu.astype(np.float64) ** 2, level, float(d.n) ** 2),
        mean_tau_over_n=tuple(_mean_estimate(d.tau[:, s], level, d.n) for s in range(d.s_max)),
        ecdf_mu_r=tuple(ecdf(d.mu[:, r], d.n) for r in range(d.r_max)),
        ecdf_tau_s=tuple(ecdf(d.tau[:, s], d.n) for s in range(d.s_max)),
        rng=d.rng,
    )


def conditional_ps(d: Draws, s: int, level: float = 0.99) -> Estimate:
    """Share of sampled vertices in ``m_n`` that also lie in ``t_{n,s}``."""
    d._check_s(s)
    in_m = d.v_in_m == 1
    hits = int(np.count_nonzero(in_m & (d.v_rank == s)))
    return _proportion(hits, int(np.count_nonzero(in_m)), d.trials, level)


def ratio_ps(d: Draws, s: int, level: float = 0.99) -> Estimate:
    """``mean(tau_{n,s}) / mean(mu_n)``."""
    d._check_s(s)
    return _ratio(d.tau[:, s - 1], d.mu[:, 0], level)


def indicator_ratio_ps(d: Draws, s: int, level: float = 0.99) -> Estimate:
    """``mean(tau_{n,s} [t_{n,s} in m_n]) / mean(mu_n)``, the exact target of
    :func:`conditional_ps` evaluated without the vertex draw."""
    d._check_s(s)
    return _ratio(d.tau[:, s - 1] * d.in_largest[:, s - 1], d.mu[:, 0], level)


def ratio_gap(d: Draws, s: int, level: float = 0.99) -> Estimate:
    """``mean(tau_{n,s} [t_{n,s} not in m_n]) / mean(mu_n)``: ratio form minus indicator form."""
    d._check_s(s)
    return _ratio(d.tau[:, s - 1] * (1 - d.in_largest[:, s - 1]), d.mu[:, 0], level)


def subgraph_prob(d: Draws, s: int, level: float = 0.99) -> Estimate:
    """Fraction of draws with ``t_{n,s}`` inside ``m_n``."""
    d._check_s(s)
    hits = int(d.in_largest[:, s - 1].sum())
    return _proportion(hits, d.trials, d.trials, level)


def pair_conditional(d: Draws, level: float = 0.99) -> tuple[Estimate, Estimate]:
    """Pair estimate and its moment-ratio twin.

    The first is the share of sampled pairs inside ``m_n`` with one vertex in
    each of ``t_{n,1}`` and ``t_{n,2}``; the second is
    ``2 mean(tau_1 tau_2 [t_1, t_2 in m_n]) / mean(mu_n (mu_n - 1))``.
    """
    if d.n < 2:
        raise InvalidConfig("pair sampling needs n >= 2")
    if d.s_max < 2:
        raise InvalidConfig("pair estimate needs s_max >= 2")
    direct = _proportion(int(d.pair_split.sum()), int(d.pair_in_m.sum()), d.trials, level)
    mu = d.mu[:, 0].astype(np.float64)
    flags = d.in_largest[:, 0] * d.in_largest[:, 1]
    num = 2.0 * d.tau[:, 0].astype(np.float64) * d.tau[:, 1] * flags
    return direct, _ratio(num, mu * (mu - 1), level)


# ---------------------------------------------------------------------------
# one-call entry points


def estimate_moments(n, trials, rs, s_max=4, r_max=2, workers=1, level=0.99) -> MomentReport:
    if trials < 2:
        raise InvalidConfig("trials must be at least 2")
    return moments(draw(n, trials, rs, s_max, r_max, workers), level)


def estimate_conditional_ps(n, trials, s, rs, workers=1, level=0.99) -> Estimate:
    return conditional_ps(draw(n, trials, rs, max(s, 2), 1, workers), s, level)


def estimate_ratio_ps(n, trials, s, rs, workers=1, level=0.99) -> Estimate:
    return ratio_ps(draw(n, trials, rs, max(s, 2), 1, workers), s, level)


def estimate_subgraph_prob(n, trials, s, rs, workers=1, level=0.99) -> Estimate:
    return subgraph_prob(draw(n, trials, rs, max(s, 2), 1, workers), s, level)


def estimate_pair_conditional(n, trials, rs, workers=1, level=0.99) -> tuple[Estimate, Estimate]:
    if n < 2:
        raise InvalidConfig("pair sampling needs n >= 2")
    return pair_conditional(draw(n, trials, rs, 2, 1, workers), level)


def gap_report(ns, trials, rs, s=1, workers=1, level=0.99) -> list[dict]:
    """Indicator form against ratio form on shared draws, one row per n.

    Stream ``rs.child(i)`` feeds the i-th entry of `ns`.
    """
    rows = []
    for i, n in enumerate(ns):
        d = draw(n, trials, rs.child(i), max(s, 2), 1, workers)
        ind = indicator_ratio_ps(d, s, level)
        rat = ratio_ps(d, s, level)
        rows.append(
            {
                "n": int(n),
                "s": s,
                "trials": trials,
                "indicator_form": ind.to_json(),
                "ratio_form": rat.to_json(),
                "gap": ratio_gap(d, s, level).to_json(),
                "conditional_vertex": conditional_ps(d, s, level).to_json(),
                "indicator_le_ratio": bool(ind.point <= rat.point),
            }
        )
    return rows

"""Brute-force oracles shared by the test modules.

Nothing here touches the package's kernels: cyclic vertices are found by
walking orbits, and statistics of all n**n mappings are tallied directly.
"""
import itertools
from fractions import Fraction

import pytest


def brute_structure(images):
    """Decompose a 1-indexed image list by following every orbit.

    Returns ``(cyclic, root, comps)`` where ``root[v]`` is the first cyclic
    vertex on v's orbit and ``comps`` maps each cycle (a frozenset) to the
    sorted list of its component's vertices.
    """
    n = len(images)
    T = {v: images[v - 1] for v in range(1, n + 1)}
    cyclic = set()
    for v in T:
        w = T[v]
        for _ in range(n):
            if w == v:
                cyclic.add(v)
                break
            w = T[w]
    root = {}
    for v in T:
        w = v
        while w not in cyclic:
            w = T[w]
        root[v] = w
    cycle_of = {}
    for c in cyclic:
        cyc = {c}
        w = T[c]
        while w != c:
            cyc.add(w)
            w = T[w]
        cycle_of[c] = frozenset(cyc)
    comps = {}
    for v in T:
        comps.setdefault(cycle_of[root[v]], []).append(v)
    return cyclic, root, {k: sorted(vs) for k, vs in comps.items()}


def brute_ranked(images):
    """Ranked (size, min-label) lists of components and trees plus membership."""
    cyclic, root, comps = brute_structure(images)
    comp_list = sorted(comps.values(), key=lambda vs: (-len(vs), vs[0]))
    trees = {}
    for v, r in root.items():
        trees.setdefault(r, []).append(v)
    tree_list = sorted(trees.values(), key=lambda vs: (-len(vs), min(vs)))
    largest = set(comp_list[0])
    return comp_list, tree_list, largest


def brute_table(n, s_max=3):
    """Exact statistics over all n**n mappings, by direct tallying."""
    total = n**n
    acc = {
        "mu": Fraction(0),
        "mu_sq": Fraction(0),
        "tau": [Fraction(0)] * s_max,
        "tau_in": [Fraction(0)] * s_max,
        "q": [Fraction(0)] * s_max,
        "pair_num": Fraction(0),
        "pair_den": Fraction(0),
        "vertex_num": [Fraction(0)] * s_max,
        "vertex_den": Fraction(0),
        "mu_dist": [0] * (n + 1),
        "mu2_dist": [0] * (n + 1),
        "tau_dist": [[0] * (n + 1) for _ in range(s_max)],
        "connected": 0,
    }
    for images in itertools.product(range(1, n + 1), repeat=n):
        comps, trees, largest = brute_ranked(list(images))
        mu = len(comps[0])
        acc["mu"] += mu
        acc["mu_sq"] += mu * mu
        acc["mu_dist"][mu] += 1
        acc["mu2_dist"][len(comps[1]) if len(comps) > 1 else 0] += 1
        acc["connected"] += len(comps) == 1
        for s in range(s_max):
            t = trees[s] if s < len(trees) else []
            inside = bool(t) and set(t) <= largest
            acc["tau"][s] += len(t)
            acc["tau_dist"][s][len(t)] += 1
            acc["tau_in"][s] += len(t) if inside else 0
            acc["q"][s] += inside
        # vertex-level and pair-level events, counted over all choices
        for v in range(1, n + 1):
            if v in largest:
                acc["vertex_den"] += 1
                for s in range(min(s_max, len(trees))):
                    if v in trees[s]:
                        acc["vertex_num"][s] += 1
        for u, w in itertools.combinations(range(1, n + 1), 2):
            if u in largest and w in largest:
                acc["pair_den"] += 1
                if len(trees) > 1 and (
                    (u in trees[0] and w in trees[1]) or (u in trees[1] and w in trees[0])
                ):
                    acc["pair_num"] += 1
    out = {
        "mean_mu": acc["mu"] / total,
        "mean_mu_sq": acc["mu_sq"] / total,
        "mean_tau": [x / total for x in acc["tau"]],
        "mean_tau_in": [x / total for x in acc["tau_in"]],
        "q": [x / total for x in acc["q"]],
        "vertex_conditional": [x / acc["vertex_den"] for x in acc["vertex_num"]],
        "pair_conditional": acc["pair_num"] / acc["pair_den"] if acc["pair_den"] else None,
        "mu_dist": [Fraction(c, total) for c in acc["mu_dist"]],
        "mu2_dist": [Fraction(c, total) for c in acc["mu2_dist"]],
        "tau_dist": [[Fraction(c, total) for c in row] for row in acc["tau_dist"]],
        "connected": acc["connected"],
    }
    return out


@pytest.fixture(scope="session")
def brute_tables():
    return {n: brute_table(n) for n in range(1, 6)}


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

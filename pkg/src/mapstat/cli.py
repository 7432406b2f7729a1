"""Command line front end: ``mapstat <subcommand> [flags]``.

Subcommands
-----------
decompose  read a mapping file, print its decomposition as JSON
simulate   Monte Carlo moments, p_s estimates, q_{n,s}, pair estimate, gap
exact      exhaustive ExactTable for small n
series     CDF tables and exact expectations from the generating functions
constants  extrapolated c, c_s and p_s against the published values

Reports carry a header echoing every result-relevant flag, the generator id
and the package version.  The worker count and output path are left out of
the echo, and the wall-clock time goes to stderr (or into the report with
``--timing``), so a fixed configuration always produces the same bytes.
Exit status: 0 on success, 1 for an unreadable or invalid mapping file,
2 for usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from fractions import Fraction

from . import __version__
from . import exact as exact_mod
from . import montecarlo as mc
from . import series as ser
from .fungraph import MappingError, decompose, extremal_stats, validate_mapping
from .reference import CONDITIONAL_LIMITS, FLAJOLET_ODLYZKO, TREE_CONSTANTS
from .sampling import GENERATOR_ID, RandomStream

log = logging.getLogger("mapstat")

# flags that change scheduling or destination but never the result
_NOT_ECHOED = {"workers", "out", "timing", "func", "file"}


class DataError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _default_seed() -> int:
    raw = os.environ.get("MAPSTAT_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"mapstat: MAPSTAT_SEED must be an integer, got {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mapstat", description="Random mapping statistics.")
    p.add_argument("--version", action="version", version=f"mapstat {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, fmt=("json", "csv")):
        sp.add_argument("--format", choices=fmt, default="json")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--timing", action="store_true", help="embed wall-clock seconds in the report")

    sp = sub.add_parser("decompose", help="decompose a mapping file")
    sp.add_argument("file", help='mapping file: "n" then n images, or JSON {"n":..., "images":[...]}; - for stdin')
    sp.add_argument("--members", action="store_true", help="list tree members")
    common(sp, ("json",))
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("simulate", help="Monte Carlo estimates")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--grid", type=_int_list)
    sp.add_argument("--trials", type=int, default=10000)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--s-max", type=int, default=4)
    sp.add_argument("--r-max", type=int, default=2)
    sp.add_argument("--level", type=float, default=0.99)
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("exact", help="exhaustive enumeration for small n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s-max", type=int, default=3)
    sp.add_argument("--r-max", type=int, default=2)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--cap-override", action="store_true", help=f"allow n up to {exact_mod.LONG_RUN_CAP}")
    common(sp)
    sp.set_defaults(func=cmd_exact)

    sp = sub.add_parser("series", help="exact CDFs and expectations from generating functions")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s-max", type=int, default=3)
    sp.add_argument("--r-max", type=int, default=2)
    sp.add_argument("--mode", choices=ser.MODES, default=None, help="default: rational for n <= 64, else float")
    common(sp)
    sp.set_defaults(func=cmd_series)

    sp = sub.add_parser("constants", help="extrapolate c, c_s and p_s")
    sp.add_argument("--grid", type=_int_list, default=[512, 1024, 2048, 4096])
    sp.add_argument("--s-max", type=int, default=4)
    sp.add_argument("--mode", choices=ser.MODES, default="float")
    common(sp)
    sp.set_defaults(func=cmd_constants)
    return p


# ---------------------------------------------------------------------------
# helpers


def _rat(x) -> dict:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def _cell(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return repr(x) if isinstance(x, float) else str(x)


def _header(args) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED}
    return {"tool": "mapstat", "version": __version__, "generator": GENERATOR_ID, "config": config}


def _emit(args, payload=None, rows=None, columns=None, elapsed=None):
    """Write the report as JSON (`payload`) or CSV (`rows` under `columns`)."""
    header = _header(args)
    if args.timing and elapsed is not None:
        header["wall_clock_seconds"] = elapsed
    if args.format == "csv":
        buf = io.StringIO()
        buf.write(f"# {json.dumps(header, sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c, "")) for c in columns])
        text = buf.getvalue()
    else:
        text = json.dumps(header | {"report": payload}, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def read_mapping(path: str):
    """Parse a mapping file (plain or JSON) into a validated Mapping."""
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as e:
        raise DataError(str(e))
    stripped = text.strip()
    try:
        if stripped.startswith("{"):
            obj = json.loads(stripped)
            n, images = int(obj["n"]), list(obj["images"])
        else:
            tokens = stripped.split()
            if not tokens:
                raise DataError("empty mapping file")
            n, images = int(tokens[0]), [int(t) for t in tokens[1:]]
    except (ValueError, KeyError, TypeError) as e:
        raise DataError(f"cannot parse mapping file: {e}")
    if n != len(images):
        raise DataError(f"header says n={n} but {len(images)} images follow")
    try:
        return validate_mapping(images)
    except MappingError as e:
        raise DataError(str(e))


# ---------------------------------------------------------------------------
# subcommands


def cmd_decompose(args):
    mapping = read_mapping(args.file)
    t0 = time.perf_counter()
    d = decompose(mapping, members=args.members)
    st = extremal_stats(d)
    payload = {
        "n": mapping.n,
        "cyclic_vertex_count": d.cyclic_vertex_count,
        "components": [
            {
                "cycle": list(c.cycle),
                "size": c.size,
                "trees": [
                    {"root": t.root, "size": t.size} | ({"members": list(t.members)} if t.members is not None else {})
                    for t in c.trees
                ],
            }
            for c in d.components
        ],
        "component_sizes_desc": list(st.component_sizes_desc),
        "tree_sizes_desc": list(st.tree_sizes_desc),
        "largest_component_index": st.largest_component_index,
        "tree_rank_component": list(st.tree_rank_component),
        "s_in_largest": list(st.s_in_largest),
    }
    _emit(args, payload, elapsed=time.perf_counter() - t0)


def _simulate_one(n, args, rs):
    d = mc.draw(n, args.trials, rs, args.s_max, args.r_max, args.workers)
    level = args.level
    out = {"n": n}
    if args.trials >= 2:
        out["moments"] = mc.moments(d, level).to_json()

    def guarded(fn, *a):
        try:
            return fn(*a).to_json()
        except mc.DegenerateCondition as e:
            return {"degenerate": True, "reason": str(e)}

    per_s = []
    for s in range(1, args.s_max + 1):
        per_s.append(
            {
                "s": s,
                "conditional": guarded(mc.conditional_ps, d, s, level),
                "ratio": guarded(mc.ratio_ps, d, s, level),
                "indicator_ratio": guarded(mc.indicator_ratio_ps, d, s, level),
                "gap": guarded(mc.ratio_gap, d, s, level),
                "subgraph_prob": guarded(mc.subgraph_prob, d, s, level),
            }
        )
    out["per_s"] = per_s
    if n >= 2 and args.s_max >= 2:
        try:
            direct, moment = mc.pair_conditional(d, level)
            out["pair_conditional"] = {"indicator": direct.to_json(), "moment_ratio": moment.to_json()}
        except mc.DegenerateCondition as e:
            out["pair_conditional"] = {"degenerate": True, "reason": str(e)}
    out["rng"] = d.rng
    return out


def cmd_simulate(args):
    if args.seed is None:
        args.seed = _default_seed()
    ns = [args.n] if args.n is not None else args.grid
    if min(ns) < 1 or args.trials < 1 or args.s_max < 1 or args.r_max < 1 or args.workers < 1:
        raise argparse.ArgumentTypeError("n, trials, s-max, r-max and workers must be positive")
    if not 0 < args.level < 1:
        raise argparse.ArgumentTypeError("--level must lie in (0, 1)")
    t0 = time.perf_counter()
    base = RandomStream(args.seed)
    results = [_simulate_one(n, args, base.child(i)) for i, n in enumerate(ns)]
    elapsed = time.perf_counter() - t0
    log.info("simulate finished in %.2fs", elapsed)
    if args.format == "json":
        _emit(args, {"results": results}, elapsed=elapsed)
        return
    rows = []
    for res in results:
        n = res["n"]
        if "moments" in res:
            m = res["moments"]
            rows.append({"n": n, "statistic": "mean_mu_over_n", "s": ""} | m["mean_mu_over_n"])
            rows.append({"n": n, "statistic": "mean_mu_sq_over_n_sq", "s": ""} | m["mean_mu_sq_over_n_sq"])
            for s, e in enumerate(m["mean_tau_over_n"], start=1):
                rows.append({"n": n, "statistic": "mean_tau_over_n", "s": s} | e)
        for entry in res["per_s"]:
            for key in ("conditional", "ratio", "indicator_ratio", "gap", "subgraph_prob"):
                rows.append({"n": n, "statistic": key, "s": entry["s"]} | entry[key])
        for key, e in res.get("pair_conditional", {}).items():
            if isinstance(e, dict):
                rows.append({"n": n, "statistic": f"pair_{key}", "s": ""} | e)
    _emit(args, rows=rows, columns=SIMULATE_COLUMNS, elapsed=elapsed)


SIMULATE_COLUMNS = ["n", "statistic", "s", "point", "std_error", "ci_low", "ci_high", "level", "trials", "effective_trials", "degenerate"]
EXACT_COLUMNS = ["n", "statistic", "rank", "value", "probability"]
SERIES_COLUMNS = ["kind", "rank", "n", "m", "value"]
CONSTANTS_COLUMNS = ["stat", "limit_estimate", "published", "abs_error", "p_s", "p_s_published", "p_s_abs_error", "residual_norm"]


def cmd_exact(args):
    cap = exact_mod.LONG_RUN_CAP if args.cap_override else exact_mod.DEFAULT_CAP
    t0 = time.perf_counter()
    table = exact_mod.enumerate_all(args.n, args.s_max, args.r_max, cap=cap, workers=args.workers)
    elapsed = time.perf_counter() - t0
    if args.format == "json":
        _emit(args, table.to_json(), elapsed=elapsed)
        return
    n = table.n
    rows = [
        {"n": n, "statistic": "mean_mu", "value": table.mean_mu},
        {"n": n, "statistic": "mean_mu_sq", "value": table.mean_mu_sq},
        {"n": n, "statistic": "connected_count", "value": table.connected_count},
    ]
    if table.pair_conditional is not None:
        rows.append({"n": n, "statistic": "pair_conditional", "value": table.pair_conditional})
    for s in range(1, table.s_max + 1):
        rows.append({"n": n, "statistic": "mean_tau", "rank": s, "value": table.mean_tau[s - 1]})
        rows.append({"n": n, "statistic": "mean_tau_in_largest", "rank": s, "value": table.mean_tau_in_largest[s - 1]})
        rows.append({"n": n, "statistic": "subgraph_prob", "rank": s, "value": table.subgraph_prob[s - 1]})
        rows.append({"n": n, "statistic": "conditional", "rank": s, "value": table.conditional[s - 1]})
    for r in range(1, table.r_max + 1):
        for k, p in enumerate(table.mu_dist[r - 1]):
            rows.append({"n": n, "statistic": "mu_dist", "rank": r, "value": k, "probability": p})
    for s in range(1, table.s_max + 1):
        for k, p in enumerate(table.tau_dist[s - 1]):
            rows.append({"n": n, "statistic": "tau_dist", "rank": s, "value": k, "probability": p})
    _emit(args, rows=rows, columns=EXACT_COLUMNS, elapsed=elapsed)


def cmd_series(args):
    n = args.n
    if n < 1 or args.s_max < 1 or args.r_max < 1:
        raise argparse.ArgumentTypeError("n, s-max and r-max must be positive")
    mode = args.mode or ("rational" if n <= 64 else "float")
    args.mode = mode
    t0 = time.perf_counter()
    rows = []
    for r in range(1, args.r_max + 1):
        for m, p in enumerate(ser.component_cdf_table(n, r, mode)):
            rows.append({"kind": "mu_cdf", "rank": r, "n": n, "m": m, "value": p})
    for s in range(1, args.s_max + 1):
        for m, p in enumerate(ser.tree_cdf_table(n, s, mode)):
            rows.append({"kind": "tau_cdf", "rank": s, "n": n, "m": m, "value": p})
    rows.append({"kind": "mu_mean_over_n", "rank": 1, "n": n, "value": _per_n(ser.exact_expectation_mu(n, mode), n)})
    for s in range(1, args.s_max + 1):
        rows.append({"kind": "tau_mean_over_n", "rank": s, "n": n, "value": _per_n(ser.exact_expectation_tau(n, s, mode), n)})
    elapsed = time.perf_counter() - t0
    if args.format == "csv":
        _emit(args, rows=rows, columns=SERIES_COLUMNS, elapsed=elapsed)
        return

    def val(x):
        return _rat(x) if isinstance(x, Fraction) else x

    payload = {
        "n": n,
        "mode": mode,
        "mu_cdf": {str(r): [val(x["value"]) for x in rows if x["kind"] == "mu_cdf" and x["rank"] == r] for r in range(1, args.r_max + 1)},
        "tau_cdf": {str(s): [val(x["value"]) for x in rows if x["kind"] == "tau_cdf" and x["rank"] == s] for s in range(1, args.s_max + 1)},
        "mu_mean_over_n": val(rows[-args.s_max - 1]["value"]),
        "tau_mean_over_n": {str(s): val(rows[-args.s_max - 1 + s]["value"]) for s in range(1, args.s_max + 1)},
    }
    _emit(args, payload, elapsed=elapsed)


def _per_n(x, n):
    return x / n if isinstance(x, Fraction) else float(x) / n


def cmd_constants(args):
    if args.s_max < 1:
        raise argparse.ArgumentTypeError("--s-max must be positive")
    t0 = time.perf_counter()
    mu_fit, tau_fits, ps = ser.extrapolate_ps(args.grid, range(1, args.s_max + 1), args.mode)
    elapsed = time.perf_counter() - t0
    log.info("constants finished in %.2fs", elapsed)
    rows = [
        {
            "stat": "mu",
            "limit_estimate": mu_fit.limit_estimate,
            "published": FLAJOLET_ODLYZKO,
            "abs_error": abs(mu_fit.limit_estimate - FLAJOLET_ODLYZKO),
            "residual_norm": mu_fit.residual_norm,
        }
    ]
    for s, fit in tau_fits.items():
        c_pub = TREE_CONSTANTS.get(s)
        p_pub = CONDITIONAL_LIMITS.get(s)
        rows.append(
            {
                "stat": f"tau{s}",
                "limit_estimate": fit.limit_estimate,
                "published": "" if c_pub is None else c_pub,
                "abs_error": "" if c_pub is None else abs(fit.limit_estimate - c_pub),
                "p_s": ps[s],
                "p_s_published": "" if p_pub is None else p_pub,
                "p_s_abs_error": "" if p_pub is None else abs(ps[s] - p_pub),
                "residual_norm": fit.residual_norm,
            }
        )
    if args.format == "csv":
        _emit(args, rows=rows, columns=CONSTANTS_COLUMNS, elapsed=elapsed)
        return
    payload = {
        "fits": [mu_fit.to_json()] + [f.to_json() for f in tau_fits.values()],
        "table": rows,
        "p_s_nonincreasing": all(ps[s] >= ps[s + 1] for s in range(1, args.s_max)),
        "p_s_at_most_one": all(p <= 1 for p in ps.values()),
    }
    _emit(args, payload, elapsed=elapsed)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s", stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except DataError as e:
        print(f"mapstat: {e}", file=sys.stderr)
        return 1
    except (argparse.ArgumentTypeError, exact_mod.CapExceeded, ser.TruncationTooShort, ser.SingularFit, mc.InvalidConfig) as e:
        parser.print_usage(sys.stderr)
        print(f"mapstat: error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

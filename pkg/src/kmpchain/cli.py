"""Command-line driver: wires JSON/flag configs to experiments and emits
machine-readable CSV or JSON plus a one-line JSON summary.

Exit codes: 0 all gates pass, 1 a statistical/exact gate failed, 2 config
error, 3 oracle-guard error (exact-solver or enumeration size limits, or a
Monte Carlo event budget overflow).

Determinism: given the same config (including seed) the emitted bytes are
identical across runs on one platform. Floats are rendered with repr(), rows
are generated in sorted key order, JSON objects are sorted by key.

If the environment variable KMPCHAIN_OUTPUT_DIR is set, relative --output
paths are resolved inside it.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from . import combinat, dual, duality, exact, model, stats, variant
from .exact import StateSpaceError
from .params import ModelParams, stream
from .variant import VariantParams

CSV_SCHEMA = "# kmpchain-csv v1"
JSON_SCHEMA = "kmpchain-json v1"

MAX_LEMMA_N = 200

COMMON_KEYS = {"model", "experiment", "seed", "replicas", "t_burn", "t_measure",
               "n_batches", "output", "format", "gate_z", "tol"}
KMP_KEYS = {"L", "A", "B", "a", "b", "beta_minus", "beta_plus", "k_B"}
VARIANT_KEYS = {"N", "T0", "T1", "A", "B", "a", "b"}
EXTRA_KEYS = {
    "profile": set(),
    "duality": {"k", "zeta", "t", "stationary"},
    "regimes": {"a_values", "b_values", "u"},
    "verify-lemma": {"max_n"},
    "verify-marginal": {"max_total"},
    "verify-restriction": {"positions"},
    "hitting": {"x0"},
    "phase-scan": {"L_values", "side"},
}
PARAM_FREE = {"verify-lemma", "verify-marginal"}
KMP_ONLY = {"regimes", "verify-restriction", "phase-scan"}
REGIME_SCAN_KEYS = {"A", "B", "beta_minus", "beta_plus", "k_B"}


class ConfigError(Exception):
    pass


@dataclass
class RunResult:
    experiment: str
    param_cols: list          # [(name, value)] — the run-defining tuple
    columns: list             # varying columns
    rows: list                # list of tuples aligned with columns
    summary: dict
    gates: dict               # gate name -> bool


# ----------------------------------------------------------------------
# config plumbing
# ----------------------------------------------------------------------

def _kmp_params(cfg) -> ModelParams:
    return ModelParams(L=int(cfg.get("L", 10)),
                       A=float(cfg.get("A", 1.0)), B=float(cfg.get("B", 1.0)),
                       a=float(cfg.get("a", 0.0)), b=float(cfg.get("b", 0.0)),
                       beta_minus=float(cfg.get("beta_minus", 1.0)),
                       beta_plus=float(cfg.get("beta_plus", 1.0)),
                       k_B=float(cfg.get("k_B", 1.0)),
                       seed=int(cfg.get("seed", 0)))


def _variant_params(cfg) -> VariantParams:
    return VariantParams(N=int(cfg.get("N", 10)),
                         T0=float(cfg.get("T0", 1.0)), T1=float(cfg.get("T1", 1.0)),
                         A=float(cfg.get("A", 1.0)), B=float(cfg.get("B", 1.0)),
                         a=float(cfg.get("a", 0.0)), b=float(cfg.get("b", 0.0)),
                         seed=int(cfg.get("seed", 0)))


def _kmp_cols(p: ModelParams) -> list:
    return [("model", "kmp"), ("L", p.L), ("A", p.A), ("B", p.B), ("a", p.a),
            ("b", p.b), ("beta_minus", p.beta_minus), ("beta_plus", p.beta_plus),
            ("k_B", p.k_B), ("seed", p.seed)]


def _variant_cols(p: VariantParams) -> list:
    return [("model", "variant"), ("N", p.N), ("T0", p.T0), ("T1", p.T1),
            ("A", p.A), ("B", p.B), ("a", p.a), ("b", p.b), ("seed", p.seed)]


def _parse_k(raw) -> dict:
    if not isinstance(raw, dict) or not raw:
        raise ConfigError("k must be a non-empty object mapping site -> count")
    out = {}
    for key, val in raw.items():
        try:
            site, count = int(key), int(val)
        except (TypeError, ValueError):
            raise ConfigError(f"k entry {key!r}: {val!r} is not integer") from None
        if count < 0:
            raise ConfigError(f"k[{site}] must be nonnegative, got {count}")
        if count:
            out[site] = count
    if not out:
        raise ConfigError("k must place at least one particle")
    return dict(sorted(out.items()))


def _k_descriptor(k: dict) -> str:
    return ";".join(f"{x}:{c}" for x, c in sorted(k.items()))


def _int_list(raw, field) -> list:
    if not isinstance(raw, (list, tuple)) or not raw:
        raise ConfigError(f"{field} must be a non-empty list of integers")
    try:
        return [int(v) for v in raw]
    except (TypeError, ValueError):
        raise ConfigError(f"{field} must contain integers") from None


def _float_list(raw, field) -> list:
    if not isinstance(raw, (list, tuple)) or not raw:
        raise ConfigError(f"{field} must be a non-empty list of numbers")
    try:
        return [float(v) for v in raw]
    except (TypeError, ValueError):
        raise ConfigError(f"{field} must contain numbers") from None


def _zeta_array(raw, n_sites) -> np.ndarray:
    if raw is None:
        raw = 1.0
    if isinstance(raw, (int, float)):
        arr = np.full(n_sites, float(raw))
    else:
        arr = np.asarray(_float_list(raw, "zeta"))
        if arr.size != n_sites:
            raise ConfigError(f"zeta must have length {n_sites}, got {arr.size}")
    if np.any(arr < 0):
        raise ConfigError("zeta entries must be nonnegative")
    return arr


# ----------------------------------------------------------------------
# experiment runners
# ----------------------------------------------------------------------

def run_profile(cfg) -> RunResult:
    gate_z = float(cfg.get("gate_z", 4.0))
    n_batches = int(cfg.get("n_batches", 30))
    if cfg["model"] == "kmp":
        p = _kmp_params(cfg)
        t_burn = float(cfg.get("t_burn", model.default_burn_in(p)))
        t_measure = float(cfg.get("t_measure", model.default_measure_time(p)))
        prof = model.simulate_stationary(p, t_burn, t_measure, n_batches,
                                         rng=stream(p.seed, 0))
        hit = exact.hitting_oracle(p)[1:-1]
        predicted = p.T_minus + hit * (p.T_plus - p.T_minus)
        scale = p.L
        limits = [exact.temperature_profile(p.A, p.B, p.a, p.b, p.T_minus,
                                            p.T_plus, x / scale).value
                  for x in prof.sites]
        param_cols = _kmp_cols(p)
    else:
        p = _variant_params(cfg)
        t_burn = float(cfg.get("t_burn", variant.variant_default_burn_in(p)))
        t_measure = float(cfg.get("t_measure", variant.variant_default_measure_time(p)))
        prof = variant.variant_simulate_stationary(p, t_burn, t_measure, n_batches,
                                                   rng=stream(p.seed, 0))
        hit = variant.variant_hitting_oracle(p)[1:-1]
        predicted = p.T0 + hit * (p.T1 - p.T0)
        scale = p.N
        limits = list(predicted)
        param_cols = _variant_cols(p)
    param_cols += [("t_burn", t_burn), ("t_measure", t_measure),
                   ("n_batches", n_batches)]
    zs = np.abs(prof.means - predicted) / np.maximum(prof.ses, 1e-300)
    fit = stats.fit_profile(prof.sites, prof.means, scale, predicted=predicted)
    rows = [(int(x), x / scale, m, s, pr, li)
            for x, m, s, pr, li in zip(prof.sites, prof.means, prof.ses,
                                       predicted, limits)]
    summary = {"max_abs_z": float(zs.max()), "gate_z": gate_z,
               "fit_slope": fit.slope, "fit_intercept": fit.intercept,
               "fit_residual_norm": fit.residual_norm,
               "fit_max_abs_dev": fit.max_abs_dev}
    gates = {"profile_within_gate": bool(zs.max() <= gate_z)}
    return RunResult("profile", param_cols,
                     ["site", "u", "mean", "se", "predicted", "limit_T"],
                     rows, summary, gates)


def run_duality(cfg) -> RunResult:
    if "k" not in cfg:
        raise ConfigError("duality requires k (site -> particle count)")
    k = _parse_k(cfg["k"])
    gate_z = float(cfg.get("gate_z", 3.0))
    reps = int(cfg.get("replicas", 100000))
    if reps < 2:
        raise ConfigError("replicas must be >= 2")

    if cfg.get("stationary"):
        if cfg["model"] != "kmp":
            raise ConfigError("stationary moment check supports model=kmp only")
        for key in ("zeta", "t"):
            if key in cfg:
                raise ConfigError(f"{key} does not apply to the stationary check")
        p = _kmp_params(cfg)
        n_batches = int(cfg.get("n_batches", 30))
        check = duality.verify_stationary_moment(
            k, p, t_burn=cfg.get("t_burn"), t_measure=cfg.get("t_measure"),
            n_batches=n_batches, rng=stream(p.seed, 0))
        z = abs(check.z)
        rows = [(_k_descriptor(k), check.simulated, check.se, check.predicted,
                 check.z)]
        param_cols = _kmp_cols(p) + [("n_batches", n_batches)]
        summary = {"gate_z": gate_z, "max_abs_z": z}
        gates = {"stationary_moment_within_gate": bool(z <= gate_z)}
        return RunResult("duality", param_cols,
                         ["k", "simulated", "se", "predicted", "z"],
                         rows, summary, gates)

    raw_t = cfg.get("t", 1.0)
    ts = raw_t if isinstance(raw_t, (list, tuple)) else [raw_t]
    ts = sorted(_float_list(ts, "t"))
    if any(t <= 0 for t in ts):
        raise ConfigError("t values must be positive")
    if cfg["model"] == "kmp":
        p = _kmp_params(cfg)
        zeta = _zeta_array(cfg.get("zeta"), p.n_sites)
        param_cols = _kmp_cols(p)
        verify = lambda t, rng: duality.verify_duality(k, zeta, t, reps, p, rng)
        for x in k:
            if not -p.L <= x <= p.L:
                raise ConfigError(f"k site {x} outside [-{p.L}, {p.L}]")
    else:
        p = _variant_params(cfg)
        zeta = _zeta_array(cfg.get("zeta"), p.n_bulk_sites)
        param_cols = _variant_cols(p)
        verify = lambda t, rng: variant.variant_verify_duality(k, zeta, t, reps, p, rng)
        for x in k:
            if not 1 <= x <= p.N - 1:
                raise ConfigError(f"k site {x} outside [1, {p.N - 1}]")
    param_cols += [("replicas", reps)]
    rows = []
    max_z = 0.0
    for i, t in enumerate(ts):
        check = verify(t, stream(p.seed, i))
        rows.append((_k_descriptor(k), t, check.lhs, check.se_lhs,
                     check.rhs, check.se_rhs, check.z))
        max_z = max(max_z, abs(check.z))
    summary = {"gate_z": gate_z, "max_abs_z": max_z,
               "zeta": [float(v) for v in zeta]}
    gates = {"duality_within_gate": bool(max_z <= gate_z)}
    return RunResult("duality", param_cols,
                     ["k", "t", "lhs", "se_lhs", "rhs", "se_rhs", "z"],
                     rows, summary, gates)


def run_regimes(cfg) -> RunResult:
    p = _kmp_params(cfg)
    u = float(cfg.get("u", 0.0))
    if not -1.0 < u < 1.0:
        raise ConfigError(f"u must lie in (-1, 1), got {u}")
    tol = float(cfg.get("tol", 1e-12))
    default_grid = [-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0]
    a_values = sorted(_float_list(cfg.get("a_values", default_grid), "a_values"))
    b_values = sorted(_float_list(cfg.get("b_values", default_grid), "b_values"))
    rows = []
    max_diff = 0.0
    for a in a_values:
        for b in b_values:
            prof = exact.temperature_profile(p.A, p.B, a, b, p.T_minus,
                                             p.T_plus, u)
            diff = abs(prof.coeff_plus - exact.p_limit(p.A, p.B, a, b, u))
            max_diff = max(max_diff, diff)
            rows.append((a, b, prof.tag, prof.coeff_minus, prof.coeff_plus,
                         prof.value, diff))
    param_cols = [("model", "kmp"), ("A", p.A), ("B", p.B),
                  ("beta_minus", p.beta_minus), ("beta_plus", p.beta_plus),
                  ("k_B", p.k_B), ("u", u)]
    summary = {"n_points": len(rows), "max_p_limit_diff": max_diff, "tol": tol}
    gates = {"closed_form_matches_p_limit": bool(max_diff <= tol)}
    return RunResult("regimes", param_cols,
                     ["a", "b", "tag", "coeff_minus", "coeff_plus", "T_u",
                      "p_limit_diff"],
                     rows, summary, gates)


def run_verify_lemma(cfg) -> RunResult:
    max_n = int(cfg.get("max_n", 40))
    if max_n < 0:
        raise ConfigError("max_n must be nonnegative")
    if max_n > MAX_LEMMA_N:
        raise ConfigError(f"max_n must be <= {MAX_LEMMA_N}")
    rows = []
    total = mismatches = 0
    for n in range(max_n + 1):
        for m in range(n + 1):
            bad = 0
            for q in range(m + 1):
                lhs, rhs = combinat.vandermonde_shift(n, m, q)
                bad += lhs != rhs
            total += m + 1
            mismatches += bad
            rows.append((n, m, m + 1, bad))
    summary = {"total_checked": total, "total_mismatches": mismatches}
    gates = {"zero_mismatches": mismatches == 0}
    return RunResult("verify-lemma", [("max_n", max_n)],
                     ["N", "M", "n_checked", "mismatches"], rows, summary, gates)


def run_verify_marginal(cfg) -> RunResult:
    max_total = int(cfg.get("max_total", combinat.ENUMERATION_LIMIT))
    if max_total < 0:
        raise ConfigError("max_total must be nonnegative")
    if max_total > combinat.ENUMERATION_LIMIT:
        raise StateSpaceError(
            f"enumeration limited to pair totals <= {combinat.ENUMERATION_LIMIT}; "
            f"got max_total={max_total}")
    rows = []
    failures = 0
    for n_pair in range(max_total + 1):
        for m in range(n_pair + 1):
            exact_law = combinat.marginal_distribution(n_pair, m)
            enum_law = combinat.enumerate_marginal(n_pair, m)
            uniform = [Fraction(1, m + 1)] * (m + 1)
            ok_exact = int(exact_law == uniform)
            ok_enum = int(enum_law == exact_law)
            failures += (1 - ok_exact) + (1 - ok_enum)
            rows.append((n_pair, m, m + 1, str(Fraction(1, m + 1)),
                         ok_exact, ok_enum))
    summary = {"n_laws": len(rows), "failures": failures}
    gates = {"marginal_uniform": failures == 0}
    return RunResult("verify-marginal", [("max_total", max_total)],
                     ["n_pair", "M", "n_outcomes", "uniform_p",
                      "matches_uniform", "matches_enumeration"],
                     rows, summary, gates)


def run_verify_restriction(cfg) -> RunResult:
    p = _kmp_params(cfg)
    positions = _int_list(cfg.get("positions", [0, 1]), "positions")
    if len(positions) < 2:
        raise ConfigError("positions must list at least 2 walkers")
    tol = float(cfg.get("tol", 1e-10))
    joint = exact.exact_joint_hitting(positions, p)
    rows = []
    worst = 0.0
    for i in range(len(positions)):
        sub = [x for j, x in enumerate(positions) if j != i]
        sub_law = exact.exact_joint_hitting(sub, p)
        marg = joint.sum(axis=i)
        diff = float(np.abs(marg - sub_law).max())
        worst = max(worst, diff)
        rows.append((i, positions[i], diff))
    param_cols = _kmp_cols(p) + [("positions", ";".join(str(x) for x in positions))]
    summary = {"n_walkers": len(positions), "max_abs_diff": worst, "tol": tol}
    gates = {"restriction_consistent": bool(worst <= tol)}
    return RunResult("verify-restriction", param_cols,
                     ["removed_walker", "removed_site", "max_abs_diff"],
                     rows, summary, gates)


def run_hitting(cfg) -> RunResult:
    tol = float(cfg.get("tol", 1e-10))
    gate_z = float(cfg.get("gate_z", 3.0))
    reps = int(cfg.get("replicas", 0))
    if cfg["model"] == "kmp":
        p = _kmp_params(cfg)
        sites = list(range(-p.L, p.L + 1))
        oracle = exact.hitting_oracle(p)[1:-1]
        closed = np.array([exact.hitting_closed_form(p, x) for x in sites])
        scale = p.L
        x0 = int(cfg.get("x0", 0))
        mc = (lambda: dual.hitting_patterns([x0], p, reps, stream(p.seed, 0))[:, 0])
        param_cols = _kmp_cols(p)
    else:
        p = _variant_params(cfg)
        sites = list(range(1, p.N))
        oracle = variant.variant_hitting_oracle(p)[1:-1]
        c, d = p.left_rate, p.right_rate
        denom = (p.N - 2) * c * d + c + d
        closed = np.array([d * (c * (x - 1) + 1.0) / denom for x in sites])
        scale = p.N
        x0 = int(cfg.get("x0", max(1, p.N // 2)))
        mc = (lambda: variant.variant_walker_absorption(x0, p, reps, stream(p.seed, 0)))
        param_cols = _variant_cols(p)
    diffs = np.abs(closed - oracle)
    rows = [(x, x / scale, cf, orc, df)
            for x, cf, orc, df in zip(sites, closed, oracle, diffs)]
    summary = {"max_abs_diff": float(diffs.max()), "tol": tol}
    gates = {"closed_form_matches_oracle": bool(diffs.max() <= tol)}
    param_cols += [("replicas", reps)]
    if reps > 0:
        if x0 not in sites:
            raise ConfigError(f"x0 {x0} is not a bulk site")
        marks = mc()
        phat = float(np.mean(marks == 1))
        se = math.sqrt(max(phat * (1.0 - phat), 1e-300) / reps)
        target = closed[sites.index(x0)]
        z = (phat - target) / se
        summary.update({"x0": x0, "mc_estimate": phat, "mc_se": se,
                        "mc_z": z, "gate_z": gate_z})
        gates["mc_within_gate"] = bool(abs(z) <= gate_z)
    return RunResult("hitting", param_cols,
                     ["site", "u", "closed_form", "oracle", "abs_diff"],
                     rows, summary, gates)


def run_phase_scan(cfg) -> RunResult:
    base = _kmp_params(cfg)
    side = cfg.get("side", "left")
    if side not in ("left", "right"):
        raise ConfigError(f"side must be left or right, got {side!r}")
    L_values = sorted(_int_list(cfg.get("L_values", [20, 40, 80]), "L_values"))
    if len(L_values) < 2:
        raise ConfigError("L_values must list at least 2 sizes")
    n_batches = int(cfg.get("n_batches", 30))
    u_edge = -1.0 if side == "left" else 1.0
    limit = exact.temperature_profile(base.A, base.B, base.a, base.b,
                                      base.T_minus, base.T_plus, u_edge).value
    rows = []
    gaps, ses, budgets = [], [], []
    for i, L in enumerate(L_values):
        p = replace(base, L=L)
        t_burn = float(cfg.get("t_burn", model.default_burn_in(p)))
        t_measure = float(cfg.get("t_measure", model.default_measure_time(p)))
        prof = model.simulate_stationary(p, t_burn, t_measure, n_batches,
                                         rng=stream(p.seed, i))
        idx = 0 if side == "left" else -1
        measured = float(prof.means[idx])
        se = float(prof.ses[idx])
        gap = abs(measured - limit)
        rows.append((L, int(prof.sites[idx]), measured, se, limit, gap))
        gaps.append(gap)
        ses.append(se)
        budgets.append((t_burn, t_measure))
    trend = stats.trend_check(gaps, ses)
    param_cols = [("model", "kmp"), ("A", base.A), ("B", base.B),
                  ("a", base.a), ("b", base.b),
                  ("beta_minus", base.beta_minus), ("beta_plus", base.beta_plus),
                  ("k_B", base.k_B), ("seed", base.seed), ("side", side),
                  ("n_batches", n_batches)]
    summary = {"predicted_limit": limit, "gaps": gaps,
               "trend_diffs": list(trend.diffs),
               "trend_allowances": list(trend.allowances),
               "t_burn": [b[0] for b in budgets],
               "t_measure": [b[1] for b in budgets]}
    gates = {"gap_trend_decreasing": bool(trend.passed)}
    return RunResult("phase-scan", param_cols,
                     ["L", "site", "measured", "se", "predicted_limit", "gap"],
                     rows, summary, gates)


RUNNERS = {
    "profile": run_profile,
    "duality": run_duality,
    "regimes": run_regimes,
    "verify-lemma": run_verify_lemma,
    "verify-marginal": run_verify_marginal,
    "verify-restriction": run_verify_restriction,
    "hitting": run_hitting,
    "phase-scan": run_phase_scan,
}


# ----------------------------------------------------------------------
# emission
# ----------------------------------------------------------------------

def _native(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_native(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_native(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _native(v) for k, v in obj.items()}
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _summary_doc(result: RunResult) -> dict:
    return {"experiment": result.experiment,
            "params": {name: _native(v) for name, v in result.param_cols},
            "gates": dict(result.gates),
            "pass": all(result.gates.values()),
            "estimates": _native(result.summary)}


def _render(result: RunResult, cfg) -> str:
    if cfg["format"] == "csv":
        names = [name for name, _ in result.param_cols] + result.columns
        consts = [_cell(v) for _, v in result.param_cols]
        lines = [CSV_SCHEMA, f"# experiment={result.experiment}", ",".join(names)]
        for row in result.rows:
            lines.append(",".join(consts + [_cell(v) for v in row]))
        return "\n".join(lines) + "\n"
    doc = {"schema": JSON_SCHEMA,
           "experiment": result.experiment,
           "params": {name: _native(v) for name, v in result.param_cols},
           "columns": result.columns,
           "rows": [[_native(v) for v in row] for row in result.rows],
           "gates": dict(result.gates),
           "pass": all(result.gates.values()),
           "estimates": _native(result.summary)}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _emit(result: RunResult, cfg) -> None:
    text = _render(result, cfg)
    summary_line = json.dumps(_summary_doc(result), sort_keys=True)
    output = cfg.get("output")
    if output:
        out_dir = os.environ.get("KMPCHAIN_OUTPUT_DIR")
        if out_dir and not os.path.isabs(output):
            output = os.path.join(out_dir, output)
        with open(output, "w") as fh:
            fh.write(text)
        print(summary_line)
    elif cfg["format"] == "csv":
        sys.stdout.write(text)
        print("# summary " + summary_line)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------

def _json_flag(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"invalid JSON: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run")
    g.add_argument("--config", help="JSON config file; flags override its values")
    g.add_argument("--model", choices=("kmp", "variant"))
    g.add_argument("--seed", type=int)
    g.add_argument("--replicas", type=int)
    g.add_argument("--t-burn", type=float)
    g.add_argument("--t-measure", type=float)
    g.add_argument("--n-batches", type=int)
    g.add_argument("--output", help="write rows here instead of stdout")
    g.add_argument("--format", choices=("csv", "json"))
    g.add_argument("--gate-z", type=float)
    g.add_argument("--tol", type=float)
    g = common.add_argument_group("chain parameters")
    g.add_argument("--L", type=int)
    g.add_argument("--A", type=float)
    g.add_argument("--B", type=float)
    g.add_argument("--a", type=float)
    g.add_argument("--b", type=float)
    g.add_argument("--beta-minus", type=float)
    g.add_argument("--beta-plus", type=float)
    g.add_argument("--k-B", dest="k_B", type=float)
    g.add_argument("--N", type=int)
    g.add_argument("--T0", type=float)
    g.add_argument("--T1", type=float)
    g = common.add_argument_group("experiment")
    g.add_argument("--k", type=_json_flag, help='JSON object, e.g. \'{"0": 2}\'')
    g.add_argument("--zeta", type=_json_flag, help="number or JSON list")
    g.add_argument("--t", type=_json_flag, help="number or JSON list of times")
    g.add_argument("--stationary", action="store_const", const=True)
    g.add_argument("--u", type=float)
    g.add_argument("--a-values", type=_json_flag)
    g.add_argument("--b-values", type=_json_flag)
    g.add_argument("--max-n", type=int)
    g.add_argument("--max-total", type=int)
    g.add_argument("--positions", type=_json_flag)
    g.add_argument("--x0", type=int)
    g.add_argument("--L-values", dest="L_values", type=_json_flag)
    g.add_argument("--side", choices=("left", "right"))

    parser = argparse.ArgumentParser(
        prog="kmpchain",
        description="Experiments on the energy-exchange chain with tunable "
                    "boundary coupling.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in RUNNERS:
        sub.add_parser(name, parents=[common])
    return parser


FLAG_KEYS = ["model", "seed", "replicas", "t_burn", "t_measure", "n_batches",
             "output", "format", "gate_z", "tol",
             "L", "A", "B", "a", "b", "beta_minus", "beta_plus", "k_B",
             "N", "T0", "T1",
             "k", "zeta", "t", "stationary", "u", "a_values", "b_values",
             "max_n", "max_total", "positions", "x0", "L_values", "side"]


def build_config(args) -> dict:
    experiment = args.experiment
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})") from None
        if not isinstance(doc, dict):
            raise ConfigError("config: top level must be a JSON object")
        if "experiment" in doc and doc["experiment"] != experiment:
            raise ConfigError(
                f"experiment: config says {doc['experiment']!r} but the "
                f"{experiment!r} subcommand was invoked")
        cfg.update(doc)
    cfg.pop("experiment", None)
    for key in FLAG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val

    model_name = cfg.get("model", "kmp")
    if model_name not in ("kmp", "variant"):
        raise ConfigError(f"model must be kmp or variant, got {model_name!r}")
    if experiment in KMP_ONLY and model_name != "kmp":
        raise ConfigError(f"{experiment} supports model=kmp only")

    allowed = COMMON_KEYS | EXTRA_KEYS[experiment]
    if experiment == "regimes":
        allowed |= REGIME_SCAN_KEYS
    elif experiment == "phase-scan":
        allowed |= KMP_KEYS - {"L"}
    elif experiment not in PARAM_FREE:
        allowed |= KMP_KEYS if model_name == "kmp" else VARIANT_KEYS
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise ConfigError(
            f"unknown config key(s) for {experiment!r}: {', '.join(unknown)}")

    fmt = cfg.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    cfg["format"] = fmt
    cfg["experiment"] = experiment
    cfg["model"] = model_name
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        result = RUNNERS[cfg["experiment"]](cfg)
        _emit(result, cfg)
    except StateSpaceError as exc:
        print(f"oracle-guard error: {exc}", file=sys.stderr)
        return 3
    except RuntimeError as exc:
        print(f"oracle-guard error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"config error: output: {exc}", file=sys.stderr)
        return 2
    return 0 if all(result.gates.values()) else 1


if __name__ == "__main__":
    sys.exit(main())

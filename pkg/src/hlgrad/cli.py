"""Command-line entry point: seeded sweeps and CSV emission.

Subcommands: adaptive, baseline, resources, threshold, micro, fig4, fig5,
fig6.  Every command is deterministic given its configuration and seed
(default 42) and writes CSV with a provenance header (command, full config,
seed, artifact version) in '#'-prefixed comment lines.  Plot rendering is a
separate downstream tool; this side only guarantees the CSV contract.

Configuration may come from a flat key-value JSON file (--config); explicit
command-line flags override file values.  Validation failures exit with
code 2 and a message naming the offending key (or JSON parse line).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .adaptive import AdaptiveConfig, mse_harness
from .baseline import baseline_mse, baseline_params, baseline_queries, marginal_distribution, median_distribution
from .blockenc import DenseObservable, arccos_scan_max_ratio, lcu_corpus_max_error, subset_fraction
from .probing import GroverRepetition, HamiltonianSim, Ideal
from .resources import (
    C_MAX,
    adaptive_queries,
    grover_threshold,
    qubit_counts,
)

FIG4_HEADER = ["eps_add", "adaptive_qubits", "baseline_qubits"]
FIG5_HEADER = ["method", "eps_add", "delta", "n_med", "t_queries", "t_rescaled", "rmse_worst", "rmse_avg"]
FIG6_HEADER = ["n_qubits", "m_law", "m_value", "q_star"]
ADAPTIVE_HEADER = ["m", "d", "eps", "c", "model", "runs", "seed", "max_mse", "mean_queries", "ci95"]


class ConfigError(Exception):
    pass


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
        cfg = json.loads(text)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}:1: top level must be a flat JSON object")
    return cfg


def _resolve(args: argparse.Namespace, cfg: dict, key: str, default, cast):
    """Flag value if given, else config-file value, else default."""
    flag = getattr(args, key.replace("-", "_"), None)
    if flag is not None:
        return flag
    if key in cfg:
        try:
            return cast(cfg[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config key '{key}': {exc}") from exc
    return default


def _exp_range(text: str) -> list:
    """Parse 'lo:hi' (inclusive) or comma-separated integer exponents."""
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad exponent range {text!r}: {exc}") from exc


def _write_csv(out_path: str | None, command: str, config: dict, header: list, rows: list) -> None:
    buf = io.StringIO()
    buf.write(f"# hlgrad {command} v{__version__}\n")
    buf.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
    buf.write(f"# seed: {config.get('seed', '')}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join("" if v is None else str(v) for v in row) + "\n")
    data = buf.getvalue()
    if out_path is None or out_path == "-":
        sys.stdout.write(data)
    else:
        with open(out_path, "w") as fh:
            fh.write(data)


def _model_from_name(name: str, M: int, d: int):
    if name == "ideal":
        return Ideal()
    if name == "hs":
        return HamiltonianSim()
    if name == "grover":
        return GroverRepetition.for_dimensions(M, d)
    raise ConfigError(f"unknown model {name!r} (expected ideal|hs|grover)")


def _g_set(seed: int, set_index: int, M: int) -> np.ndarray:
    """Random observable values for one sweep set, derived from (seed, index)."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=(int(seed), 7_000_003, set_index)))
    return rng.uniform(-1, 1, M)


def cmd_adaptive(args: argparse.Namespace, cfg: dict) -> int:
    M = _resolve(args, cfg, "M", 8, int)
    d = _resolve(args, cfg, "d", 2, int)
    eps = _resolve(args, cfg, "eps", 2.0**-5, float)
    c = _resolve(args, cfg, "c", C_MAX, float)
    runs = _resolve(args, cfg, "runs", 200, int)
    seed = _resolve(args, cfg, "seed", 42, int)
    model_name = _resolve(args, cfg, "model", "ideal", str)
    g = _g_set(seed, 0, M)
    config = AdaptiveConfig(M=M, d=d, eps=eps, g_true=g, model=_model_from_name(model_name, M, d), c=c, seed=seed)
    out = mse_harness(config, runs)
    j = int(np.argmax(out["per_observable_mse"]))
    row = [M, d, eps, c, model_name, runs, seed, out["max_mse"], out["mean_total_queries"], out["ci95"][j]]
    prov = {"M": M, "d": d, "eps": eps, "c": c, "model": model_name, "runs": runs, "seed": seed}
    _write_csv(args.out, "adaptive", prov, ADAPTIVE_HEADER, [row])
    return 0


def cmd_baseline(args: argparse.Namespace, cfg: dict) -> int:
    M = _resolve(args, cfg, "M", 1, int)
    eps_add = _resolve(args, cfg, "eps_add", 0.25, float)
    delta = _resolve(args, cfg, "delta", 0.5, float)
    c = _resolve(args, cfg, "c", 2.0, float)
    runs = _resolve(args, cfg, "runs", 10_000, int)
    seed = _resolve(args, cfg, "seed", 42, int)
    params = baseline_params(M, eps_add, delta, c)
    g = _g_set(seed, 0, M)
    rmse = math.sqrt(baseline_mse(g, params, n_mc=runs, rng_seed=seed))
    q = baseline_queries(params, overhead=_resolve(args, cfg, "overhead", 10, int))
    header = ["m_order", "eps_add", "delta", "n_med", "r", "n", "t_queries", "t_rescaled", "rmse"]
    row = [params.m, eps_add, delta, params.n_med, params.r, params.n, q["T_NonIter"], q["T_tilde"], rmse]
    prov = {"M": M, "eps_add": eps_add, "delta": delta, "c": c, "runs": runs, "seed": seed}
    _write_csv(args.out, "baseline", prov, header, [row])
    return 0


def cmd_resources(args: argparse.Namespace, cfg: dict) -> int:
    M = _resolve(args, cfg, "M", 30, int)
    d = _resolve(args, cfg, "d", 2, int)
    eps = _resolve(args, cfg, "eps", 2.0**-5, float)
    c = _resolve(args, cfg, "c", C_MAX, float)
    method = _resolve(args, cfg, "method", "HS", str)
    led = adaptive_queries(M, d, eps, c, method=method)
    rows = [[r["q"], r["t"], r["Q"], r["shots"], r["queries"]] for r in led.per_q]
    rows.append(["total", "", "", "", led.total])
    prov = {"M": M, "d": d, "eps": eps, "c": c, "method": method, "seed": ""}
    _write_csv(args.out, "resources", prov, ["q", "t", "Q", "shots", "queries"], rows)
    return 0


def cmd_threshold(args: argparse.Namespace, cfg: dict) -> int:
    M = _resolve(args, cfg, "M", 30, int)
    d = _resolve(args, cfg, "d", 2, int)
    eps = _resolve(args, cfg, "eps", None, float)
    rep = grover_threshold(M, d, eps=eps)
    lo, hi = rep.grover_q_range if rep.grover_q_range else ("", "")
    header = ["M", "d", "delta_p", "sigma_p", "eps_star", "q_star", "q_max", "q_lo", "q_hi"]
    row = [M, d, rep.delta_p, rep.sigma_p, rep.eps_star, rep.q_star, rep.q_max or "", lo, hi]
    prov = {"M": M, "d": d, "eps": eps, "seed": ""}
    _write_csv(args.out, "threshold", prov, header, [row])
    return 0


def cmd_micro(args: argparse.Namespace, cfg: dict) -> int:
    seed = _resolve(args, cfg, "seed", 42, int)
    rows = []
    lcu_err = lcu_corpus_max_error(100, rng_seed=seed)
    rows.append(["lcu_shift_corpus_max_error", lcu_err, 1e-10, "pass" if lcu_err <= 1e-10 else "fail"])
    rng = np.random.default_rng(seed)
    obs = [DenseObservable(np.diag(rng.choice([-1.0, 1.0], size=2))) for _ in range(64)]
    for dp in (0.05, 0.1):
        sig = math.ceil(math.sqrt(2 * 64 * math.log(4 / dp)))
        frac = subset_fraction(obs, 3, 64 / sig, 100_000, dp, rng_seed=seed)
        bound = dp + 3 * math.sqrt(dp * (1 - dp) / 100_000)
        rows.append([f"subset_fraction_delta_{dp}", frac, bound, "pass" if frac <= bound else "fail"])
    ratio = arccos_scan_max_ratio(10_000)
    rows.append(["arccos_gap_to_cubic_bound", ratio, 1.0, "pass" if ratio <= 1.0 else "fail"])
    prov = {"seed": seed}
    _write_csv(args.out, "micro", prov, ["check", "value", "bound", "status"], rows)
    return 0 if all(r[3] == "pass" for r in rows) else 1


def cmd_fig4(args: argparse.Namespace, cfg: dict) -> int:
    M = _resolve(args, cfg, "M", 30, int)
    d = _resolve(args, cfg, "d", 2, int)
    a = _resolve(args, cfg, "a", 1, int)
    exps = _exp_range(_resolve(args, cfg, "eps_add_exps", "-3:13", str))
    adaptive_q = qubit_counts(M, d, a, "HS")
    rows = []
    for e in exps:
        eps_add = 2.0**-e
        rows.append([eps_add, adaptive_q, qubit_counts(M, d, a, "BaselineApprox", eps_add=eps_add)])
    prov = {"M": M, "d": d, "a": a, "eps_add_exps": ",".join(map(str, exps)), "seed": ""}
    _write_csv(args.out, "fig4", prov, FIG4_HEADER, rows)
    return 0


def cmd_fig5(args: argparse.Namespace, cfg: dict) -> int:
    M = _resolve(args, cfg, "M", 30, int)
    d = _resolve(args, cfg, "d", 2, int)
    c_conf = _resolve(args, cfg, "c", C_MAX, float)
    eps_exps = _exp_range(_resolve(args, cfg, "eps_add_exps", "-3:13", str))
    delta_exps = _exp_range(_resolve(args, cfg, "delta_exps", "0:10", str))
    g_sets = _resolve(args, cfg, "g_set_count", 26, int)
    runs = _resolve(args, cfg, "runs", 200, int)
    seed = _resolve(args, cfg, "seed", 42, int)
    overhead = _resolve(args, cfg, "overhead", 10, int)
    rows = []
    # theoretical adaptive line: guaranteed root MSE vs total queries
    for e in [x for x in eps_exps if x >= 1]:
        eps = 2.0**-e
        t_adapt = adaptive_queries(M, d, eps, c_conf).total
        rows.append(["adapt", eps, None, None, t_adapt, t_adapt, eps, eps])
    # baseline sweep: marginals are reused across the delta grid
    for e in eps_exps:
        eps_add = 2.0**-e
        mse_by_delta = {j: [] for j in delta_exps}
        for s in range(g_sets):
            g = _g_set(seed, s, M)
            params0 = baseline_params(M, eps_add, 1.0)
            p1 = marginal_distribution(g, params0, n_mc=runs, rng_seed=(seed, e % 64, s))
            for j in delta_exps:
                params = baseline_params(M, eps_add, 2.0**-j)
                med = median_distribution(p1, params.n_med)
                est = params.scale / params.r * med.register.points
                mse_by_delta[j].append(float(np.sum(med.pmf * (est - g[0]) ** 2)))
        for j in delta_exps:
            params = baseline_params(M, eps_add, 2.0**-j)
            q = baseline_queries(params, overhead=overhead)
            worst = math.sqrt(max(mse_by_delta[j]))
            avg = math.sqrt(float(np.mean(mse_by_delta[j])))
            rows.append(["noniter", eps_add, 2.0**-j, params.n_med, q["T_NonIter"], q["T_tilde"], worst, avg])
    prov = {
        "M": M, "d": d, "c": c_conf, "eps_add_exps": ",".join(map(str, eps_exps)),
        "delta_exps": ",".join(map(str, delta_exps)), "g_set_count": g_sets,
        "runs": runs, "seed": seed, "overhead": overhead,
    }
    _write_csv(args.out, "fig5", prov, FIG5_HEADER, rows)
    return 0


def cmd_fig6(args: argparse.Namespace, cfg: dict) -> int:
    n_exps = _exp_range(_resolve(args, cfg, "n_exps", "1:12", str))
    rows = []
    laws = [("N^2", lambda n: n * n, None), ("N^3", lambda n: n**3, None),
            ("N^4", lambda n: n**4, None), ("2^N", lambda n: 2**n, 64)]
    for law_name, law, n_cap in laws:
        for e in n_exps:
            n = 2**e
            if n_cap is not None and n > n_cap:
                continue
            m_val = law(n)
            rep = grover_threshold(m_val, 2**n)
            rows.append([n, law_name, m_val, rep.q_star])
    for eps in (1e-2, 1e-4, 1e-6):
        rows.append([0, f"qmax(eps={eps:g})", 0, math.ceil(math.log2(1 / eps))])
    prov = {"n_exps": ",".join(map(str, n_exps)), "seed": ""}
    _write_csv(args.out, "fig6", prov, FIG6_HEADER, rows)
    return 0


_COMMANDS = {
    "adaptive": cmd_adaptive,
    "baseline": cmd_baseline,
    "resources": cmd_resources,
    "threshold": cmd_threshold,
    "micro": cmd_micro,
    "fig4": cmd_fig4,
    "fig5": cmd_fig5,
    "fig6": cmd_fig6,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hlgrad", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="flat key-value JSON; flags override")
        p.add_argument("--M", type=int, default=None)
        p.add_argument("--d", type=int, default=None)
        p.add_argument("--a", type=int, default=None, help="ancillas per block-encoded observable")
        p.add_argument("--eps", type=float, default=None)
        p.add_argument("--eps-add", dest="eps_add", type=float, default=None)
        p.add_argument("--delta", type=float, default=None)
        p.add_argument("--c", type=float, default=None)
        p.add_argument("--runs", type=int, default=None)
        p.add_argument("--seed", type=int, default=None, help="default 42")
        p.add_argument("--model", choices=["ideal", "hs", "grover"], default=None)
        p.add_argument("--method", choices=["HS", "Grover"], default=None)
        p.add_argument("--overhead", type=int, default=None, help="oracle-conversion factor, default 10")
        p.add_argument("--out", default=None, help="CSV path; '-' or omitted for stdout")
        p.add_argument("--eps-add-exps", dest="eps_add_exps", default=None, help="'lo:hi' or comma list")
        p.add_argument("--delta-exps", dest="delta_exps", default=None, help="'lo:hi' or comma list")
        p.add_argument("--n-exps", dest="n_exps", default=None, help="'lo:hi' of log2 N")
        p.add_argument("--g-set-count", dest="g_set_count", type=int, default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config) if args.config else {}
        return _COMMANDS[args.command](args, cfg)
    except (ConfigError, ValueError) as exc:
        print(f"hlgrad {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

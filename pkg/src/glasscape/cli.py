"""Command-line front end.

Subcommands map one-to-one onto the library surface: classification,
complexity surfaces, ground-state curves, the pair-complexity profile and
Condition M, phase diagrams, and the Monte Carlo experiments.  Outputs are
plot-ready CSV plus `key value` summaries, all stamped with the tool
version, a configuration hash and the seed.

Exit codes: 0 success, 1 usage, 2 numeric non-convergence, 3 precondition
violation, 4 resource cap.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import complexity as cx
from . import montecarlo as mc
from . import paircomplexity as pc
from . import thermo as th
from .errors import (
    NumericFailureError,
    PreconditionError,
    ResourceCapError,
)
from .hamiltonian import sample_hamiltonian
from .mixture import classify, load_mixture
from .output import config_hash, format_float, write_csv, write_structured

CONFIG_KEYS = (
    "mixture_file", "n", "q", "beta", "replicas", "chains", "sweeps",
    "seed", "mode",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _read_config_file(path: str) -> dict:
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(maxsplit=1)
        if len(parts) != 2 or parts[0] not in CONFIG_KEYS:
            raise PreconditionError(f"config line {lineno}: expected 'key value'")
        cfg[parts[0]] = parts[1].strip()
    return cfg


def _resolve(args, key, cast, default=None):
    """Flag value if given, else config-file value, else default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    cfg = getattr(args, "_config", {})
    if key in cfg:
        return cast(cfg[key])
    return default


def _out_dir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _stamp(args) -> tuple[str, int]:
    pieces = {k: getattr(args, k, None) for k in vars(args) if not k.startswith("_")}
    pieces["version"] = __version__
    seed = getattr(args, "seed", None) or 0
    return config_hash({k: str(v) for k, v in pieces.items()}), seed


def cmd_classify(args) -> int:
    m = load_mixture(args.mixture)
    c = classify(m)
    cfg_hash, seed = _stamp(args)
    pairs = [
        ("kind", c.kind.value),
        ("g_literal", c.g_literal),
        ("g_via_theta", c.g_via_theta),
        ("agree", str(c.agree).lower()),
    ]
    write_structured(_out_dir(args) / "classify.txt", pairs, __version__, cfg_hash, seed)
    print(f"classify: kind={c.kind.value} g_literal={c.g_literal:.6f} "
          f"g_via_theta={c.g_via_theta:.6f}")
    return 0


def cmd_complexity(args) -> int:
    m = load_mixture(args.mixture)
    us = np.linspace(args.u_min, args.u_max, args.u_steps)
    xs = np.linspace(args.x_min, args.x_max, args.x_steps)
    rows = []
    for u in us:
        for x in xs:
            rows.append((args.q, float(u), float(x), cx.theta(m, args.q, float(u), float(x))))
    cfg_hash, seed = _stamp(args)
    path = _out_dir(args) / "theta_surface.csv"
    write_csv(path, ["q", "u", "x", "theta"], rows, __version__, cfg_hash, seed)
    print(f"complexity: wrote {len(rows)} points to {path}")
    return 0


def cmd_e0(args) -> int:
    m = load_mixture(args.mixture)
    sol = cx.ground_state_solution(m, args.q)
    cfg_hash, seed = _stamp(args)
    pairs = [
        ("q", sol.q), ("e0", sol.e0), ("x0", sol.x0),
        ("e_inf", sol.e_inf), ("residual", sol.residual),
    ]
    write_structured(_out_dir(args) / "e0.txt", pairs, __version__, cfg_hash, seed)
    print(f"e0: E0({args.q})={sol.e0:.10f} x0={sol.x0:.10f} E_inf={sol.e_inf:.10f}")
    return 0


def cmd_psi0(args) -> int:
    m = load_mixture(args.mixture)
    rows = []
    for i in range(args.steps):
        r = -1.0 + 2.0 * (i + 0.5) / args.steps
        rows.append((r, pc.psi0(m, r)))
    cfg_hash, seed = _stamp(args)
    path = _out_dir(args) / "psi0.csv"
    write_csv(path, ["r", "psi0"], rows, __version__, cfg_hash, seed)
    print(f"psi0: wrote {len(rows)} points to {path}")
    return 0


def cmd_condm(args) -> int:
    m = load_mixture(args.mixture)
    v = pc.check_condition_m(m, grid_step=args.grid_step)
    cfg_hash, seed = _stamp(args)
    pairs = [
        ("holds", str(v.holds).lower()),
        ("failed_clause", v.failed_clause.value if v.failed_clause else "none"),
        ("psi0_zero", v.psi0_at_zero),
        ("d2_psi0_zero", v.d2_psi0_at_zero),
        ("max_margin", v.max_margin),
        ("endpoint_plus", v.endpoint_plus),
        ("endpoint_minus", v.endpoint_minus),
    ]
    write_structured(_out_dir(args) / "condm.txt", pairs, __version__, cfg_hash, seed)
    if v.holds:
        print(f"condm: holds=true margin={v.max_margin:.3e}")
    else:
        print(f"condm: holds=false clause={v.failed_clause.value}")
    return 0


def cmd_phase(args) -> int:
    m = load_mixture(args.mixture)
    beta = _resolve(args, "beta", float)
    if beta is None:
        raise PreconditionError("phase needs --beta")
    summary = th.phase_summary(m, beta)
    cfg_hash, seed = _stamp(args)
    out = _out_dir(args)
    row = (
        summary.beta, summary.q_c, summary.q_star, summary.q_star_star,
        summary.e_star, summary.f_beta, summary.gap_finite, summary.gap_limit,
    )
    write_csv(
        out / "phase.csv",
        ["beta", "q_c", "q_star", "q_star_star", "e_star", "f_beta",
         "gap_finite", "gap_limit"],
        [row], __version__, cfg_hash, seed,
    )
    pairs = [(k, getattr(summary, k)) for k in (
        "beta", "q_c", "q_star", "q_star_star", "e_star", "f_beta",
        "t_minus", "t_plus", "t_c", "gap_finite", "gap_limit")]
    write_structured(out / "phase.txt", pairs, __version__, cfg_hash, seed)
    print(f"phase: beta={beta} q**={summary.q_star_star:.6f} "
          f"q_c={summary.q_c:.6f} q*={summary.q_star:.6f} F={summary.f_beta:.6f}")
    return 0


def _mc_common(args) -> tuple:
    cfg = getattr(args, "_config", {})
    mixture_path = args.mixture or cfg.get("mixture_file")
    if mixture_path is None:
        raise PreconditionError("a mixture is required (--mixture or config)")
    m = load_mixture(mixture_path)
    n = int(_resolve(args, "n", int, 32))
    seed = int(_resolve(args, "seed", int, 0))
    return m, n, seed


def cmd_simulate_crt(args) -> int:
    m, n, seed = _mc_common(args)
    q = float(_resolve(args, "q", float, 1.0))
    replicas = int(_resolve(args, "replicas", int, 20))
    sol = cx.ground_state_solution(m, q)
    half = args.window_half
    window_b = (-sol.e0 - half, -sol.e0 + half)
    window_d = (-sol.x0 - half, -sol.x0 + half)
    log_mean, theta_sup, counts = mc.crt_count_experiment(
        m, n, q, window_b, window_d, replicas, seed, n_starts=args.n_starts
    )
    cfg_hash, _ = _stamp(args)
    out = _out_dir(args)
    h = sample_hamiltonian(m, n, seed)
    pts = mc.find_q_critical(h, q, n_starts=args.n_starts, seed=seed)
    write_csv(
        out / "critical_points.csv",
        ["energy_per_site", "radial_per_sqrt", "grad_residual", "index"],
        [(p.energy_per_site, p.radial_per_sqrt, p.grad_residual, p.index)
         for p in pts],
        __version__, cfg_hash, seed,
    )
    write_structured(
        out / "crt_summary.txt",
        [("log_mean_count_per_n", log_mean), ("theta_sup", theta_sup),
         ("replicas", replicas), ("mean_count", float(np.mean(counts)))],
        __version__, cfg_hash, seed,
    )
    print(f"simulate_crt: (1/N)log mean count = {log_mean:.4f}  "
          f"sup Theta = {theta_sup:.4f}")
    return 0


def _hist_rows(hist) -> list[tuple]:
    return [
        (float(hist.bin_edges[i]), float(hist.bin_edges[i + 1]), int(hist.counts[i]))
        for i in range(len(hist.counts))
    ]


def cmd_simulate_gibbs(args) -> int:
    m, n, seed = _mc_common(args)
    beta = float(_resolve(args, "beta", float, 6.0))
    chains = int(_resolve(args, "chains", int, 4))
    sweeps = int(_resolve(args, "sweeps", int, 2000))
    h = sample_hamiltonian(m, n, seed)
    res = mc.gibbs_experiment(h, beta, chains, sweeps, seed)
    hist = res.histogram
    cfg_hash, _ = _stamp(args)
    out = _out_dir(args)
    write_csv(out / "overlap_histogram.csv", ["bin_lo", "bin_hi", "count"],
              _hist_rows(hist), __version__, cfg_hash, seed)
    write_structured(
        out / "gibbs_summary.txt",
        [("beta", beta), ("band_mass", res.band_mass),
         ("same_band_mass", res.same_band_mass),
         ("cross_band_mass", res.cross_band_mass),
         ("mass_near_zero", hist.mass_near_zero),
         ("mass_near_plus", hist.mass_near_plus),
         ("mass_near_minus", hist.mass_near_minus),
         ("q_star_sq", hist.target),
         ("acceptance_rate", res.run.diagnostics.acceptance_rate),
         ("mixing_flag", str(res.run.diagnostics.mixing_flag).lower())],
        __version__, cfg_hash, seed,
    )
    print(f"simulate_gibbs: band_mass={res.band_mass:.3f} "
          f"same_band={res.same_band_mass:.3f} cross_band={res.cross_band_mass:.3f}")
    return 0


def cmd_simulate_chaos(args) -> int:
    m, n, seed = _mc_common(args)
    beta1 = args.beta1 if args.beta1 is not None else float(_resolve(args, "beta", float, 6.0))
    beta2 = args.beta2 if args.beta2 is not None else 1.5 * beta1
    chains = int(_resolve(args, "chains", int, 4))
    sweeps = int(_resolve(args, "sweeps", int, 2000))
    h = sample_hamiltonian(m, n, seed)
    hist = mc.chaos_experiment(h, beta1, beta2, chains, sweeps, seed)
    cfg_hash, _ = _stamp(args)
    out = _out_dir(args)
    write_csv(out / "chaos_histogram.csv", ["bin_lo", "bin_hi", "count"],
              _hist_rows(hist), __version__, cfg_hash, seed)
    write_structured(
        out / "chaos_summary.txt",
        [("beta1", beta1), ("beta2", beta2),
         ("mass_near_zero", hist.mass_near_zero),
         ("mass_near_plus", hist.mass_near_plus)],
        __version__, cfg_hash, seed,
    )
    print(f"simulate_chaos: mass(|R|~0)={hist.mass_near_zero:.3f}")
    return 0


def cmd_goe_check(args) -> int:
    seed = int(args.seed or 0)
    mean, om = mc.goe_check(args.n_matrix, args.x, args.replicas, seed)
    cfg_hash, _ = _stamp(args)
    write_structured(
        _out_dir(args) / "goe_check.txt",
        [("x", args.x), ("n_matrix", args.n_matrix),
         ("replicas", args.replicas),
         ("mean_log_det_per_n", mean), ("omega_x", om),
         ("abs_diff", abs(mean - om))],
        __version__, cfg_hash, seed,
    )
    print(f"goe_check: mean={mean:.6f} omega={om:.6f} |diff|={abs(mean - om):.6f}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="glasscape", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, mixture_required=True):
        p.add_argument("--mixture", required=mixture_required,
                       help="mixture file (lines 'p value')")
        p.add_argument("--output-dir", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("classify", help="classify a mixture")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("complexity", help="export a Theta surface CSV")
    common(p)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--u-min", type=float, default=-2.0)
    p.add_argument("--u-max", type=float, default=0.0)
    p.add_argument("--u-steps", type=int, default=41)
    p.add_argument("--x-min", type=float, default=-8.0)
    p.add_argument("--x-max", type=float, default=0.0)
    p.add_argument("--x-steps", type=int, default=41)
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("e0", help="ground-state solution at radius q")
    common(p)
    p.add_argument("--q", type=float, default=1.0)
    p.set_defaults(func=cmd_e0)

    p = sub.add_parser("psi0", help="export the pair-complexity profile")
    common(p)
    p.add_argument("--steps", type=int, default=399)
    p.set_defaults(func=cmd_psi0)

    p = sub.add_parser("condm", help="check Condition M")
    common(p)
    p.add_argument("--grid-step", type=float, default=1e-3)
    p.set_defaults(func=cmd_condm)

    p = sub.add_parser("phase", help="phase summary at one beta")
    common(p)
    p.add_argument("--beta", type=float)
    p.add_argument("--config", dest="config_path")
    p.set_defaults(func=cmd_phase)

    for name, fn in (
        ("simulate_crt", cmd_simulate_crt),
        ("simulate_gibbs", cmd_simulate_gibbs),
        ("simulate_chaos", cmd_simulate_chaos),
    ):
        p = sub.add_parser(name, help=f"{name.replace('_', ' ')} experiment")
        common(p, mixture_required=False)
        p.add_argument("--config", dest="config_path",
                       help="experiment config file ('key value' lines)")
        p.add_argument("--n", type=int)
        p.add_argument("--q", type=float)
        p.add_argument("--beta", type=float)
        p.add_argument("--replicas", type=int)
        p.add_argument("--chains", type=int)
        p.add_argument("--sweeps", type=int)
        if name == "simulate_crt":
            p.add_argument("--window-half", type=float, default=0.05)
            p.add_argument("--n-starts", type=int, default=100)
        if name == "simulate_chaos":
            p.add_argument("--beta1", type=float)
            p.add_argument("--beta2", type=float)
        p.set_defaults(func=fn)

    p = sub.add_parser("goe_check", aliases=["goe-check"],
                       help="GOE log-determinant vs the semicircle potential")
    p.add_argument("--x", type=float, default=3.0)
    p.add_argument("--n-matrix", type=int, default=200)
    p.add_argument("--replicas", type=int, default=100)
    p.add_argument("--output-dir", default=".")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_goe_check)

    return parser


def main(argv=None) -> int:
    threads = os.environ.get("GLASSCAPE_THREADS")
    if threads:
        try:
            import numba

            numba.set_num_threads(max(1, int(threads)))
        except (ImportError, ValueError):
            pass
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config_path", None):
        try:
            args._config = _read_config_file(args.config_path)
        except FileNotFoundError:
            print(f"glasscape: config file not found: {args.config_path}",
                  file=sys.stderr)
            return 1
        except PreconditionError as exc:
            print(f"glasscape: {exc}", file=sys.stderr)
            return 1
    else:
        args._config = {}
    try:
        return args.func(args)
    except NumericFailureError as exc:
        print(f"glasscape: numeric failure: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"glasscape: precondition violated: {exc}", file=sys.stderr)
        return 3
    except ResourceCapError as exc:
        print(f"glasscape: resource cap: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Subcommands: analyze, spectrum, sweep, sharpness, evolve, report-all.
Flags: --config <path>, --out <dir>, --override section.key=value (repeat).
Exit codes: 0 success, 2 config error, 3 numeric failure.

Config grammar (see also README): line-oriented `key = value` under
`[section]` headers; sections run/family/grid/hardy/spectral/sharpness/
evolution; a family block is e.g.

    [family]
    kind = exp_power      # lebesgue | exp_power | power_exp_power |
                          # log_weight | oscillating
    dimension = 3
    b = 1.0
    m = 2.0
    beta = 0.0
    alpha = 0.0

All floats in CSV output are serialized with 17 significant digits, all
file writes are atomic (temp + rename), and identical configs produce
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .config import RunConfig, apply_overrides, load_config, serialize_config
from .errors import ConfigError, HardyKitError
from .hardy import check_hypotheses, compute_profile
from .schemas import EIGVEC, EVOLUTION, PHI_GAMMA, PHI_N, SPECTRUM_LADDER, SWEEP_TRACE
from .spectral import (
    RadialGrid,
    SpectralProblem,
    critical_sweep,
    lambda1,
    phi_gamma_ladder,
    phi_n_gamma_bounds,
    quotient_phi_n,
)
from .evolution import dichotomy_verdict
from .weights import RadialBump


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_json(path: Path, payload) -> None:
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _grid(cfg: RunConfig) -> RadialGrid:
    return RadialGrid(cfg.grid.r_min, cfg.grid.r_max, cfg.grid.n_points)


def _hardy_kwargs(cfg: RunConfig) -> dict:
    h = cfg.hardy
    return dict(
        k_min=h.k_min, k_max=h.k_max, tail_window=h.tail_window,
        h2iv_k_max=h.h2iv_k_max, h2iii_radii=h.h2iii_radii,
        h2iii_r_hi=h.h2iii_r_hi, h2iii_per_decade=h.h2iii_per_decade,
        h3p_j_max=h.h3p_j_max, h3p_threshold=h.h3p_threshold,
        cond1_p=h.cond1_p, cond1_k_min=h.cond1_k_min,
        cond1_k_max=h.cond1_k_max, cond1_tol=h.cond1_tol,
    )


def _ladder_kwargs(cfg: RunConfig) -> dict:
    s = cfg.spectral
    return dict(
        rungs=s.rungs, rmin_shrink=s.rmin_shrink, n_grow=s.n_grow,
        diverge_factor=s.diverge_factor, lambda_floor=s.lambda_floor,
        residual_tol=s.residual_tol,
    )


def run_analyze(cfg: RunConfig, outdir: Path) -> dict:
    family = cfg.family.build()
    report = check_hypotheses(family, **_hardy_kwargs(cfg))
    profile = compute_profile(family, k_min=cfg.hardy.k_min, k_max=cfg.hardy.k_max,
                              tail_window=cfg.hardy.tail_window)
    payload = report.to_json_dict()
    payload["profile"] = profile.to_json_dict()
    _write_json(outdir / "hypotheses.json", payload)
    _atomic_write(outdir / "hypotheses.txt", report.to_table())
    return {"hypotheses.json": str(outdir / "hypotheses.json"),
            "hypotheses.txt": str(outdir / "hypotheses.txt")}


def run_spectrum(cfg: RunConfig, outdir: Path) -> dict:
    family = cfg.family.build()
    res = lambda1(SpectralProblem(family, cfg.spectral.c, _grid(cfg)), **_ladder_kwargs(cfg))
    _write_csv(outdir / "spectrum_ladder.csv", SPECTRUM_LADDER,
               [(cfg.spectral.c, r_min, n, lam, res.verdict) for n, r_min, lam in res.ladder])
    _write_csv(outdir / "eigvec.csv", EIGVEC, zip(res.nodes, res.eigvec))
    _write_json(outdir / "spectrum.json", {
        "family": family.label(),
        "c": cfg.spectral.c,
        "lambda1": res.lambda1,
        "residual": res.residual,
        "verdict": res.verdict,
        "ladder": [{"n_points": n, "r_min": r, "lambda1": lam} for n, r, lam in res.ladder],
    })
    return {k: str(outdir / k) for k in ("spectrum_ladder.csv", "eigvec.csv", "spectrum.json")}


def run_sweep(cfg: RunConfig, outdir: Path) -> dict:
    family = cfg.family.build()
    s = cfg.spectral
    res = critical_sweep(family, s.sweep_c_lo, s.sweep_c_hi, s.sweep_tol,
                         grid=_grid(cfg), **_ladder_kwargs(cfg))
    rows = []
    for entry in res.trace:
        for n, r_min, lam in entry["ladder"]:
            rows.append((entry["c"], r_min, n, lam, entry["verdict"]))
    _write_csv(outdir / "sweep_trace.csv", SWEEP_TRACE, rows)
    profile = compute_profile(family)
    # operational additive constant: -lambda1 at the weighted Hardy coupling
    # (couplings <= 0 are trivially valid and need no constant)
    if profile.c0_mu > 0.0:
        lam_at_c0mu = lambda1(SpectralProblem(family, profile.c0_mu, _grid(cfg)),
                              with_ladder=False).lambda1
        c_mu_op = max(0.0, -lam_at_c0mu)
    else:
        c_mu_op = 0.0
    _write_json(outdir / "sweep.json", {
        "family": family.label(),
        "c_hat": res.c_hat,
        "bracket": [res.c_lo, res.c_hi],
        "c0_N0_expected": profile.c0_N0,
        "consistent": abs(res.c_hat - profile.c0_N0) <= s.sweep_tol + 0.05,
        "C_mu_operational": c_mu_op,
    })
    return {k: str(outdir / k) for k in ("sweep_trace.csv", "sweep.json")}


def run_sharpness(cfg: RunConfig, outdir: Path) -> dict:
    family = cfg.family.build()
    profile = compute_profile(family)
    sh = cfg.sharpness
    c_n = profile.c0_N0 + sh.c_offset
    lo, hi = phi_n_gamma_bounds(c_n, profile.N0)
    gamma = sh.gamma if sh.gamma != 0.0 else 0.75 * lo + 0.25 * hi
    rows_n = []
    for n in sh.n_ladder:
        q = quotient_phi_n(family, c_n, gamma, n, profile=profile)
        rows_n.append((c_n, gamma, n, q.value, q.upper_bound))
    _write_csv(outdir / "phi_n.csv", PHI_N, rows_n)

    c_g = profile.c0_N0
    rows_g = []
    gamma_diverges = None
    if c_g > 0:
        ladder = phi_gamma_ladder(family, c_g, j_max=sh.gamma_j_max, profile=profile)
        rows_g = [(c_g, g, q) for g, q in ladder]
        qs = [q for _, q in ladder]
        gamma_diverges = qs[-1] < -1e2 and qs[-1] < qs[0]
    _write_csv(outdir / "phi_gamma.csv", PHI_GAMMA, rows_g)
    _write_json(outdir / "sharpness.json", {
        "family": family.label(),
        "phi_n": {"c": c_n, "gamma": gamma,
                  "quotients": [r[3] for r in rows_n],
                  "strictly_decreasing": all(b < a for a, b in zip([r[3] for r in rows_n], [r[3] for r in rows_n][1:]))},
        "phi_gamma": {"c": c_g, "diverges": gamma_diverges},
        "constant_attained_hint": None if gamma_diverges is None else (not gamma_diverges),
    })
    return {k: str(outdir / k) for k in ("phi_n.csv", "phi_gamma.csv", "sharpness.json")}


def run_evolve(cfg: RunConfig, outdir: Path) -> dict:
    family = cfg.family.build()
    e = cfg.evolution
    run = dichotomy_verdict(
        family, e.c, caps=e.caps, T=e.T, dt=e.dt,
        grid=RadialGrid(e.r_min, e.r_max, e.n_points),
        u0=RadialBump(e.u0_lo, e.u0_hi), records=e.records,
        t_star_frac=e.t_star_frac, blowup_ratio=e.blowup_ratio,
        omega_rtol=e.omega_rtol, cap_dt_safety=e.cap_dt_safety,
        spectral_grid=_grid(cfg),
    )
    rows = []
    for s in run.series:
        for t, nn in zip(s.times, s.norms):
            rows.append((t, s.cap, nn))
    _write_csv(outdir / "evolution.csv", EVOLUTION, rows)
    _write_json(outdir / "evolution.json", run.to_json_dict())
    return {k: str(outdir / k) for k in ("evolution.csv", "evolution.json")}


def run_report_all(cfg: RunConfig, outdir: Path) -> dict:
    artifacts = {}
    artifacts.update(run_analyze(cfg, outdir))
    artifacts.update(run_sweep(cfg, outdir))
    artifacts.update(run_sharpness(cfg, outdir))
    artifacts.update(run_evolve(cfg, outdir))

    family = cfg.family.build()
    profile = compute_profile(family)
    report = check_hypotheses(family, **_hardy_kwargs(cfg))
    sweep = json.loads((outdir / "sweep.json").read_text())
    sharp = json.loads((outdir / "sharpness.json").read_text())
    evo = json.loads((outdir / "evolution.json").read_text())
    lines = [
        f"# Report: {family.label()}",
        "",
        "| quantity | value |",
        "|---|---|",
        f"| c0(N) | {profile.c0_N:.6g} |",
        f"| c0_mu | {profile.c0_mu:.6g} |",
        f"| N0 | {profile.N0:.6g} |",
        f"| c0(N0) | {profile.c0_N0:.6g} |",
        f"| hypotheses | {report.classification} (H2'={'yes' if report.h2_prime else 'no'}, H3' diverges={'yes' if report.h3p_iii_diverges else 'no'}) |",
        f"| critical sweep c_hat | {sweep['c_hat']:.6g} (expected {sweep['c0_N0_expected']:.6g}; consistent={sweep['consistent']}) |",
        f"| phi_n quotients decreasing | {sharp['phi_n']['strictly_decreasing']} |",
        f"| constant attained (phi_gamma hint) | {sharp['constant_attained_hint']} |",
        f"| evolution verdict (c={evo['c']:g}) | {evo['verdict']} (spectral: {evo['spectral_verdict']}, agrees={evo['agrees_with_spectral']}) |",
        "",
    ]
    _atomic_write(outdir / "summary.md", "\n".join(lines))
    artifacts["summary.md"] = str(outdir / "summary.md")
    _write_json(outdir / "index.json", {"family": family.label(), "artifacts": sorted(artifacts)})
    artifacts["index.json"] = str(outdir / "index.json")
    return artifacts


_RUNNERS = {
    "analyze": run_analyze,
    "spectrum": run_spectrum,
    "sweep": run_sweep,
    "sharpness": run_sharpness,
    "evolve": run_evolve,
    "report-all": run_report_all,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardykit",
        description="Weighted Hardy inequality toolkit: hypothesis audits, "
                    "spectral sweeps, sharpness witnesses, parabolic dichotomy runs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="task", required=True)
    for task in _RUNNERS:
        p = sub.add_parser(task, help=f"run the {task} pipeline")
        p.add_argument("--config", type=Path, default=None,
                       help="config file (defaults used when omitted)")
        p.add_argument("--out", type=Path, default=None,
                       help="output directory (overrides config outdir)")
        p.add_argument("--override", action="append", default=[],
                       metavar="SECTION.KEY=VALUE", help="config override (repeatable)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        cfg = apply_overrides(cfg, args.override)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    outdir = Path(args.out) if args.out else Path(cfg.outdir)
    try:
        artifacts = _RUNNERS[args.task](cfg, outdir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except HardyKitError as exc:
        print(f"numeric failure [{args.task}]: {exc}", file=sys.stderr)
        return 3
    _atomic_write(outdir / "config_used.ini", serialize_config(cfg))
    for name in sorted(artifacts):
        print(artifacts[name])
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command line interface: validate, sample, compare, converge.

Every command reads one config file (plus --set overrides), writes CSV
results and a JSON summary into --out, and renders figures next to them
unless --no-plots is given.  Exit codes: 0 on success (and all checks
passing), 1 when a check fails, 2 on configuration errors.  CSV content is
a pure function of config and seeds; wall times live only in the summary.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, plots
from .config import ExperimentConfig, load_config
from .errors import ConfigError
from .models import GaussianConditionalModel, OraclePredictor, sample_x0
from .samplers import SamplerConfig, _run_generator, run_sampler, sample_batch
from .schedule import coeffs
from .validation import (
    _prior_moments,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    convergence_study,
    expected_kl_start,
    expected_kl_start_mc,
    optimal_gaussian_projection,
    wasserstein1_1d,
)

METRIC_FMT = ".17g"


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), METRIC_FMT)


def _write_csv(path: Path, header: list[str], rows: list[tuple]) -> str:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([cell if isinstance(cell, str) else _fmt(cell) for cell in row])
    return str(path)


def _write_summary(out: Path, command: str, cfg: ExperimentConfig, payload: dict, files: list[str], wall: dict) -> str:
    data = {
        "command": command,
        "version": __version__,
        "config_hash": cfg.hash,
        "config": cfg.resolved,
        "outputs": sorted(Path(f).name for f in files),
        "wall_time_s": wall,
    }
    data.update(payload)
    path = out / "summary.json"
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return str(path)


def _figures_dir(out: Path) -> Path:
    fig_dir = out / "figures"
    fig_dir.mkdir(parents=True, exist_ok=True)
    return fig_dir


def _report_rows(report) -> list[tuple]:
    rows = []
    for name, values in report.series.items():
        for param, value in zip(report.params, values):
            rows.append((report.check_id, name, _fmt(param), value))
    rows.append((report.check_id, "tolerance", "", report.tolerance))
    rows.append((report.check_id, "passed", "", int(report.passed)))
    return rows


def cmd_validate(cfg: ExperimentConfig, out: Path, do_plots: bool) -> int:
    t_start = time.perf_counter()
    s = cfg.build_schedule()
    model = cfg.build_model()
    if not isinstance(model, GaussianConditionalModel):
        raise ConfigError(
            "validate requires model.kind = gaussian; the start-KL and "
            "projection checks need closed-form expectations"
        )
    y = cfg.condition()
    va = cfg.section("validate")
    rng = np.random.default_rng(int(va["seed"]))
    taus = cfg.validate_taus(s)

    wall: dict[str, float] = {}
    t0 = time.perf_counter()
    r1 = check_theorem1(model, s, y, epsilons=tuple(float(e) for e in va["epsilons_t1"]))
    wall["t1"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    r2 = check_theorem2(model, s, y, rng, epsilons=tuple(float(e) for e in va["epsilons_t2"]))
    wall["t2"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    r3 = check_theorem3(model, s, va["ys"], taus, comparator=va["t3_comparator"])
    wall["t3"] = time.perf_counter() - t0

    rows = _report_rows(r1) + _report_rows(r2) + _report_rows(r3)

    # Start-projection optimality: the numerical minimizer must land on the
    # closed-form start parameters.
    t0 = time.perf_counter()
    tau_mid = taus[len(taus) // 2]
    proj = optimal_gaussian_projection(model, s, y, tau_mid)
    cf = coeffs(s, tau_mid)
    mu_star = cf.a * y + cf.b * model.mean0(y)
    res_mean = float(np.max(np.abs(proj.mean - mu_star)))
    res_sigma = float(abs(np.sqrt(proj.variance[0]) - cf.c))
    proj_pass = res_mean <= 1e-8 and res_sigma <= 1e-8
    wall["projection"] = time.perf_counter() - t0
    rows += [
        ("projection", "residual_mean", _fmt(tau_mid), res_mean),
        ("projection", "residual_sigma", _fmt(tau_mid), res_sigma),
        ("projection", "tolerance", "", 1e-8),
        ("projection", "passed", "", int(proj_pass)),
    ]

    verdicts = {
        "T1": r1.passed,
        "T2": r2.passed,
        "T3": r3.passed,
        "projection": proj_pass,
    }

    if int(va["mc_draws"]) > 0:
        t0 = time.perf_counter()
        mc_rng = np.random.default_rng(int(va["seed"]) + 1)
        mc_pass = True
        for kind in ("post", "em"):
            closed = expected_kl_start(model, s, y, tau_mid, kind)
            mc = expected_kl_start_mc(model, s, y, tau_mid, kind, int(va["mc_draws"]), mc_rng)
            rel = abs(mc - closed) / max(abs(closed), 1e-300)
            mc_pass = mc_pass and rel < 0.01
            rows.append(("kl_mc", f"rel_error_{kind}", _fmt(tau_mid), rel))
        rows.append(("kl_mc", "tolerance", "", 0.01))
        rows.append(("kl_mc", "passed", "", int(mc_pass)))
        verdicts["kl_mc"] = mc_pass
        wall["kl_mc"] = time.perf_counter() - t0

    files = [_write_csv(out / "theorem_report.csv", ["check", "metric", "param", "value"], rows)]

    lines = []
    lines.append(f"T1 horizon drift limit: {'PASS' if r1.passed else 'FAIL'} "
                 f"(final error {r1.series['error'][-1]:.3e}, tolerance {r1.tolerance:.3e})")
    lines.append(f"T2 flow drift divergence: {'PASS' if r2.passed else 'FAIL'} "
                 f"(norm growth x{r2.series['drift_norm'][-1] / max(r2.series['drift_norm'][0], 1e-300):.1f})")
    lines.append(f"T3 start optimality: {'PASS' if r3.passed else 'FAIL'} "
                 f"(min KL gap {min(r3.series['gap']):.3e})")
    lines.append(f"projection optimum: {'PASS' if proj_pass else 'FAIL'} "
                 f"(residuals {res_mean:.2e} / {res_sigma:.2e})")
    for r in (r1, r2, r3):
        if r.note:
            lines.append(f"note [{r.check_id}]: {r.note}")
    text_path = out / "validate_summary.txt"
    text_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    files.append(str(text_path))
    print("\n".join(lines))

    if do_plots:
        fig_dir = _figures_dir(out)
        files.append(plots.theorem1_figure(r1.params, r1.series["error"], r1.tolerance,
                                           fig_dir / "theorem1_horizon_limit.png"))
        files.append(plots.theorem2_figure(r2.params, r2.series["drift_norm"],
                                           r2.series["drift_norm_times_c"],
                                           fig_dir / "theorem2_divergence.png"))
        other = f"kl_{va['t3_comparator']}"
        files.append(plots.theorem3_figure(r3.params, r3.series["kl_post"], r3.series[other],
                                           va["t3_comparator"], fig_dir / "theorem3_start_kl.png"))

    wall["total"] = time.perf_counter() - t_start
    files.append(_write_summary(out, "validate", cfg, {"verdicts": verdicts}, files, wall))
    return 0 if all(verdicts.values()) else 1


def cmd_sample(cfg: ExperimentConfig, out: Path, do_plots: bool) -> int:
    t_start = time.perf_counter()
    s = cfg.build_schedule()
    model = cfg.build_model()
    y = cfg.condition()
    sa = cfg.section("sampler")
    grid = cfg.build_grid(s)
    predictor = OraclePredictor(model, s)
    run_cfg = SamplerConfig(
        method=sa["method"], grid=grid, seed=int(sa["seed"]),
        record_trajectory=bool(sa["record_trajectory"]),
    )

    rows, traj_rows = [], []
    outputs = np.empty((int(sa["runs"]), y.size))
    for i in range(int(sa["runs"])):
        run = run_sampler(run_cfg, predictor, y, s, rng=_run_generator(int(sa["seed"]), i))
        outputs[i] = run.x0
        for dim in range(y.size):
            rows.append((i, dim, run.x0[dim], run.nfe))
        if run.trajectory is not None:
            for point, (t, state) in enumerate(run.trajectory):
                for dim in range(y.size):
                    traj_rows.append((i, point, t, dim, state[dim]))

    files = [_write_csv(out / "samples.csv", ["run", "dim", "x0", "nfe"], rows)]
    if traj_rows:
        files.append(_write_csv(out / "trajectories.csv",
                                ["run", "point", "t", "dim", "value"], traj_rows))

    mean, var = outputs.mean(axis=0), outputs.var(axis=0, ddof=1)
    payload = {
        "sample_mean": [float(v) for v in mean],
        "sample_var": [float(v) for v in var],
        "runs": int(sa["runs"]),
        "method": sa["method"],
    }

    if do_plots:
        oracle = sample_x0(model, y, np.random.default_rng([int(sa["seed"]), 2**31 - 1]),
                           size=int(sa["runs"]))
        files.append(plots.samples_figure(outputs, oracle, _figures_dir(out) / "samples_hist.png"))

    wall = {"total": time.perf_counter() - t_start}
    files.append(_write_summary(out, "sample", cfg, payload, files, wall))
    print(f"wrote {int(sa['runs'])} runs of {sa['method']} "
          f"(mean nfe {rows[0][3]}) to {out / 'samples.csv'}")
    return 0


def cmd_compare(cfg: ExperimentConfig, out: Path, do_plots: bool) -> int:
    t_start = time.perf_counter()
    s = cfg.build_schedule()
    model = cfg.build_model()
    y = cfg.condition()
    co = cfg.section("compare")
    runs = int(co["runs"])
    target_mean, target_var = _prior_moments(model, y)

    rows = []
    per_method: dict[str, tuple[list, list, list]] = {}
    wall: dict[str, float] = {}
    for m_idx, method in enumerate(co["methods"]):
        nfes, w1s, var_errs = [], [], []
        for n_idx, n in enumerate(sorted(int(v) for v in co["grid_Ns"])):
            t0 = time.perf_counter()
            grid = cfg.build_grid(s, N=n)
            cell_seed = int(co["seed"]) + 9973 * (m_idx * len(co["grid_Ns"]) + n_idx)
            predictor = OraclePredictor(model, s)
            batch = sample_batch(method, predictor, y, grid, s, cell_seed, runs)
            oracle = sample_x0(model, y, np.random.default_rng([cell_seed, 2**31 - 2]), size=runs)
            mean_err = float(np.linalg.norm(batch.x0.mean(axis=0) - target_mean))
            var_err = float(np.linalg.norm(batch.x0.var(axis=0, ddof=1) - target_var))
            w1 = float(np.mean([wasserstein1_1d(batch.x0[:, k], oracle[:, k])
                                for k in range(y.size)]))
            nfe = int(batch.nfe[0])
            for metric, value in (("mean_error", mean_err), ("var_error", var_err), ("w1", w1)):
                rows.append((method, n, nfe, metric, value))
            nfes.append(nfe)
            w1s.append(w1)
            var_errs.append(var_err)
            wall[f"{method}_N{n}"] = time.perf_counter() - t0
        per_method[method] = (nfes, w1s, var_errs)

    files = [_write_csv(out / "comparison.csv", ["method", "N", "nfe", "metric", "value"], rows)]
    if do_plots:
        files.append(plots.compare_figure(per_method, _figures_dir(out) / "compare_quality.png"))

    wall["total"] = time.perf_counter() - t_start
    files.append(_write_summary(out, "compare", cfg, {"runs": runs}, files, wall))
    print(f"compared {len(per_method)} methods over {len(co['grid_Ns'])} grids "
          f"({runs} runs each) into {out / 'comparison.csv'}")
    return 0


def cmd_converge(cfg: ExperimentConfig, out: Path, do_plots: bool) -> int:
    t_start = time.perf_counter()
    s = cfg.build_schedule()
    model = cfg.build_model()
    y = cfg.condition()
    cv = cfg.section("converge")

    rows, studies = [], []
    wall: dict[str, float] = {}
    for family in cv["families"]:
        t0 = time.perf_counter()
        rng = np.random.default_rng(int(cv["seed"]))
        study = convergence_study(
            family, model, s, y, [int(n) for n in cv["grid_sizes"]],
            int(cv["runs"]), rng, tau=float(cv["tau"]),
        )
        for n, h, err in zip(study.grid_sizes, study.hs, study.errors):
            rows.append((family, n, h, "error", err))
        rows.append((family, 0, 0.0, "fitted_order", study.order))
        studies.append((family, study.hs, study.errors, study.order))
        wall[family] = time.perf_counter() - t0
        print(f"{family}: fitted order {study.order:.3f}")

    files = [_write_csv(out / "convergence.csv", ["family", "n_steps", "h", "metric", "value"], rows)]
    if do_plots:
        files.append(plots.convergence_figure(studies, _figures_dir(out) / "convergence_order.png"))

    wall["total"] = time.perf_counter() - t_start
    orders = {family: order for family, _, _, order in studies}
    files.append(_write_summary(out, "converge", cfg, {"fitted_orders": orders}, files, wall))
    return 0


_COMMANDS = {
    "validate": cmd_validate,
    "sample": cmd_sample,
    "compare": cmd_compare,
    "converge": cmd_converge,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bridgesampler",
        description="Samplers and exact checks for diffusion bridge models with analytic data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("validate", "run the structural checks and write a theorem report"),
        ("sample", "draw sampler outputs and write them as CSV"),
        ("compare", "sweep methods and grids, comparing output quality"),
        ("converge", "measure empirical convergence orders"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the YAML experiment config")
        p.add_argument("--set", action="append", default=[], dest="overrides",
                       metavar="SECTION.KEY=VALUE", help="override a config leaf")
        p.add_argument("--out", default="out", help="output directory (default: ./out)")
        p.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    do_plots = bool(cfg.section("report")["plots"]) and not args.no_plots
    try:
        return _COMMANDS[args.command](cfg, out, do_plots)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Experiment harness and command-line interface.

Subcommands:

* ``run <config> [--override key=value ...]`` executes a seeded batch of
  repeated experiments from a flat key=value config file and writes one CSV
  row per repeat (plus an optional JSON summary and parameter sidecar).
* ``solve <problem> [<variant>] [flags]`` trains one form and writes a
  plottable solution CSV.
* ``bound <problem> [<variant>] [flags]`` additionally trains the deviation
  bound and adds its column to the solution CSV.
* ``list-problems`` prints the registered problems and condition variants.

Relative output paths resolve against $ODEFORMS_OUTDIR when it is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from . import bound as bounding
from . import grids, problems, trial
from .metrics import aggregate, deviation_metrics, estimated_deviation_metrics, residual_metrics
from .train import TrainConfig, train
from .trial import AUGMENTED, BASELINE, RIGID_REDUCED

OUTDIR_ENV = "ODEFORMS_OUTDIR"
_MODES = (AUGMENTED, RIGID_REDUCED, BASELINE)


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    problem: str = ""
    variant: str = ""
    method: str = AUGMENTED
    grid: str = "chebyshev"
    m_tr: int = 0
    n_params: int = 0
    repeats: int = 100
    seed: int = 0
    budget: int = 220000
    restarts: int = 1
    zeta: float = 1.0
    bound: bool = False
    pert_params: int = 0        # 0: default to ~25% of n_params
    bound_budget: int = 0       # 0: default to 25% of budget
    out: str = "results.csv"
    workers: int = 0            # 0: one per core
    summary: bool = True
    save_params: bool = False
    timing: bool = True

    def validated(self) -> "RunConfig":
        if self.problem.lower() not in problems.available():
            raise ValueError(f"unknown problem {self.problem!r}")
        problems.registry(self.problem, self.variant or None)  # validates the variant
        if self.method not in _MODES:
            raise ValueError(f"unknown method {self.method!r}; choose from {_MODES}")
        if self.m_tr < 2 or self.n_params < 3:
            raise ValueError("m_tr and n_params are required (m_tr >= 2, n_params >= 3)")
        if self.n_params > self.m_tr:
            raise ValueError(f"overparameterized scenario rejected: "
                             f"n_params={self.n_params} exceeds m_tr={self.m_tr}")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        return self


_BOOL = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False,
         "on": True, "off": False}


def _coerce(name: str, raw: str):
    for f in fields(RunConfig):
        if f.name == name:
            if f.type == "bool":
                try:
                    return _BOOL[raw.strip().lower()]
                except KeyError:
                    raise ValueError(f"config key {name!r}: cannot parse boolean {raw!r}")
            return {"int": int, "float": float, "str": str}[f.type](raw.strip())
    raise ValueError(f"unknown config key {name!r}")


def parse_config(path: str, overrides=()) -> RunConfig:
    """Flat key=value file plus command-line overrides."""
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, raw = line.split("=", 1)
            values[key.strip()] = _coerce(key.strip(), raw)
    for ov in overrides:
        if "=" not in ov:
            raise ValueError(f"override must look like key=value, got {ov!r}")
        key, raw = ov.split("=", 1)
        values[key.strip()] = _coerce(key.strip(), raw)
    return RunConfig(**values).validated()


def _resolve_out(path: str) -> str:
    base = os.environ.get(OUTDIR_ENV, "")
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


# ---------------------------------------------------------------------------
# Row schema and repeat execution
# ---------------------------------------------------------------------------

_BASE_COLUMNS = (
    "problem", "condition", "method", "n_params", "m_tr", "grid", "seed",
    "mse_train", "mxe_train", "mse_test", "mxe_test",
    "msd_train", "mxd_train", "msd_test", "mxd_test",
    "msed", "mxed", "s2", "delta2", "evals", "wall_time_s", "error",
)


def row_columns(n_components: int) -> tuple:
    """Fixed CSV header; systems append per-component deviation columns."""
    cols = list(_BASE_COLUMNS)
    if n_components > 1:
        for i in range(1, n_components + 1):
            cols += [f"msd_train_c{i}", f"mxd_train_c{i}",
                     f"msd_test_c{i}", f"mxd_test_c{i}",
                     f"msed_c{i}", f"mxed_c{i}"]
    return tuple(cols)


def _fmt(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def default_pert_params(n_params: int, n_components: int) -> int:
    """~25% of the form's parameter count, whole neurons per component."""
    per_comp = max(1, round(n_params / 4 / 3 / n_components))
    return per_comp * 3 * n_components


def run_repeat(task: dict) -> dict:
    """Execute one repeat; failures are captured in the row's error column."""
    t0 = time.perf_counter()
    row = {c: "" for c in row_columns(task["n_components"])}
    row.update(problem=task["problem"], condition=task["variant"], method=task["method"],
               n_params=task["n_params"], m_tr=task["m_tr"], grid=task["grid"],
               seed=task["seed"])
    try:
        p = problems.registry(task["problem"], task["variant"] or None)
        a, b = p.domain
        g_train = grids.make_grid(task["grid"], a, b, task["m_tr"])
        g_test = grids.test_grid(a, b)
        template = trial.build_form(p, task["method"], task["n_params"], np.random.default_rng(0))
        cfg = TrainConfig(budget=task["budget"], restarts=task["restarts"],
                          zeta=task["zeta"], seed=task["seed"])
        tr = train(p, template, g_train, cfg)
        evals = tr.evals

        row["mse_train"], row["mxe_train"] = residual_metrics(p, tr.form, g_train)
        row["mse_test"], row["mxe_test"] = residual_metrics(p, tr.form, g_test)
        if p.exact is not None:
            msd_tr, mxd_tr = deviation_metrics(p, tr.form, g_train)
            msd_ts, mxd_ts = deviation_metrics(p, tr.form, g_test)
            row["msd_train"], row["mxd_train"] = aggregate(msd_tr), aggregate(mxd_tr)
            row["msd_test"], row["mxd_test"] = aggregate(msd_ts), aggregate(mxd_ts)
            if p.is_system:
                for i in range(p.n_components):
                    row[f"msd_train_c{i+1}"] = float(msd_tr[i])
                    row[f"mxd_train_c{i+1}"] = float(mxd_tr[i])
                    row[f"msd_test_c{i+1}"] = float(msd_ts[i])
                    row[f"mxd_test_c{i+1}"] = float(mxd_ts[i])

        if task["bound"] and task["method"] != BASELINE:
            pert = task["pert_params"] or default_pert_params(task["n_params"], p.n_components)
            per_comp_k = (pert // 3) // p.n_components
            br = bounding.estimate_bound(p, tr, per_comp_k, g_train, g_test,
                                         task["bound_budget"] or max(1, task["budget"] // 4),
                                         seed=task["seed"])
            evals += br.evals
            row["s2"], row["delta2"] = br.s2, br.delta2
            if br.valid:
                msed, mxed = estimated_deviation_metrics(br)
                row["msed"], row["mxed"] = aggregate(msed), aggregate(mxed)
                if p.is_system:
                    for i in range(p.n_components):
                        row[f"msed_c{i+1}"] = float(msed[i])
                        row[f"mxed_c{i+1}"] = float(mxed[i])

        row["evals"] = evals
        if task["save_params"]:
            row["_params"] = [float(v) for v in trial.split_params(tr.form)]
    except Exception as exc:  # per-repeat failure: record, keep the run alive
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["wall_time_s"] = time.perf_counter() - t0 if task["timing"] else 0.0
    return row


def _tasks(cfg: RunConfig) -> list:
    p = problems.registry(cfg.problem, cfg.variant or None)
    shared = dict(problem=cfg.problem.lower(), variant=cfg.variant or p.variant,
                  method=cfg.method, grid=cfg.grid, m_tr=cfg.m_tr, n_params=cfg.n_params,
                  budget=cfg.budget, restarts=cfg.restarts, zeta=cfg.zeta,
                  bound=cfg.bound, pert_params=cfg.pert_params, bound_budget=cfg.bound_budget,
                  save_params=cfg.save_params, timing=cfg.timing,
                  n_components=p.n_components)
    return [dict(shared, seed=cfg.seed + i) for i in range(cfg.repeats)]


def execute(cfg: RunConfig, log=print) -> list:
    """Run all repeats (worker pool when workers > 1), in seed order."""
    tasks = _tasks(cfg)
    workers = cfg.workers or os.cpu_count() or 1
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_repeat, tasks))
    else:
        rows = [run_repeat(t) for t in tasks]
    for row in rows:
        tag = row["error"] or f"msd_test={_fmt(row['msd_test'])} mse_train={_fmt(row['mse_train'])}"
        log(f"  seed {row['seed']}: {tag}")
    return rows


def write_rows(rows: list, path: str, n_components: int):
    cols = row_columns(n_components)
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in cols) + "\n")


def write_params_sidecar(rows: list, path: str):
    with open(path, "w") as fh:
        fh.write("seed,n_params,params\n")
        for row in rows:
            flat = row.get("_params")
            if flat:
                fh.write(f"{row['seed']},{len(flat)}," + " ".join(repr(v) for v in flat) + "\n")


def summarize(rows: list) -> dict:
    """min/max/mean/median/std per numeric metric over successful repeats."""
    ok = [r for r in rows if not r["error"]]
    out = {"repeats": len(rows), "failed": len(rows) - len(ok), "schema": "odeforms-summary-v1"}
    metrics = {}
    if ok:
        for col in ok[0]:
            if col.startswith("_") or col in ("problem", "condition", "method", "grid", "error"):
                continue
            vals = [float(r[col]) for r in ok if r[col] != ""]
            if not vals:
                continue
            arr = np.asarray(vals)
            metrics[col] = {"min": float(arr.min()), "max": float(arr.max()),
                            "mean": float(arr.mean()), "median": float(np.median(arr)),
                            "std": float(arr.std())}
    out["metrics"] = metrics
    return out


# ---------------------------------------------------------------------------
# Solution export
# ---------------------------------------------------------------------------

def emit_solution(problem, form, grid, path: str, bound_result=None):
    """Plottable CSV: x, trial value and slope, exact, |deviation|, bound."""
    x = np.asarray(getattr(grid, "points", grid), dtype=float)
    if problem.is_system:
        triples = trial.system_trial_eval(form, x)
        values = [t.value for t in triples]
        slopes = [t.d1 for t in triples]
    else:
        t = trial.trial_eval(form, x)
        values, slopes = [t.value], [t.d1]
    n = len(values)
    suffix = [f"_c{i+1}" for i in range(n)] if n > 1 else [""]
    cols, data = ["x"], [x]
    for i in range(n):
        cols += [f"psi{suffix[i]}", f"dpsi{suffix[i]}"]
        data += [values[i], slopes[i]]
    if problem.exact is not None:
        ex = np.atleast_2d(problem.exact(x))
        for i in range(n):
            cols += [f"exact{suffix[i]}", f"deviation{suffix[i]}"]
            data += [ex[i], np.abs(values[i] - ex[i])]
    if bound_result is not None and bound_result.valid:
        ba = np.atleast_2d(bound_result.bound_abs)
        for i in range(n):
            cols.append(f"bound{suffix[i]}")
            data.append(ba[i])
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for j in range(x.size):
            fh.write(",".join(repr(float(col[j])) for col in data) + "\n")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_run(args) -> int:
    cfg = parse_config(args.config, args.override)
    out = _resolve_out(cfg.out)
    p = problems.registry(cfg.problem, cfg.variant or None)
    print(f"run: {cfg.problem}[{cfg.variant or p.variant}] {cfg.method} "
          f"|params|={cfg.n_params} m_tr={cfg.m_tr} {cfg.grid} "
          f"repeats={cfg.repeats} budget={cfg.budget} seed={cfg.seed}")
    rows = execute(cfg)
    write_rows(rows, out, p.n_components)
    print(f"wrote {out}")
    if cfg.save_params:
        side = out + ".params.csv"
        write_params_sidecar(rows, side)
        print(f"wrote {side}")
    if cfg.summary:
        spath = out + ".summary.json"
        with open(spath, "w") as fh:
            json.dump(summarize(rows), fh, indent=2, sort_keys=True)
        print(f"wrote {spath}")
    failed = sum(1 for r in rows if r["error"])
    return 0 if failed == 0 else 1


def _solve_parts(args):
    p = problems.registry(args.problem, args.variant or None)
    a, b = p.domain
    g_train = grids.make_grid(args.grid, a, b, args.mtr)
    template = trial.build_form(p, args.method, args.params, np.random.default_rng(0))
    cfg = TrainConfig(budget=args.budget, restarts=args.restarts, zeta=args.zeta, seed=args.seed)
    tr = train(p, template, g_train, cfg)
    return p, g_train, tr


def _report(p, g_train, tr):
    g_test = grids.test_grid(*p.domain)
    print(f"{p.name}[{p.variant}] trained: error={tr.error_final:.6e} "
          f"evals={tr.evals} wall={tr.wall_time:.1f}s")
    for tag, g in (("train", g_train), ("test", g_test)):
        mse, mxe = residual_metrics(p, tr.form, g)
        line = f"  {tag}: MSE={mse:.3e} MXE={mxe:.3e}"
        if p.exact is not None:
            msd, mxd = deviation_metrics(p, tr.form, g)
            line += f" MSD={aggregate(msd):.3e} MXD={aggregate(mxd):.3e}"
        print(line)
    return g_test


def _cmd_solve(args) -> int:
    p, g_train, tr = _solve_parts(args)
    g_test = _report(p, g_train, tr)
    if args.out:
        out = _resolve_out(args.out)
        emit_solution(p, tr.form, g_test, out)
        print(f"wrote {out}")
    return 0


def _cmd_bound(args) -> int:
    p, g_train, tr = _solve_parts(args)
    g_test = _report(p, g_train, tr)
    pert = args.pert_params or default_pert_params(args.params, p.n_components)
    per_comp_k = (pert // 3) // p.n_components
    br = bounding.estimate_bound(p, tr, per_comp_k, g_train, g_test,
                                 args.bound_budget or max(1, args.budget // 4), seed=args.seed)
    print(f"  bound: s2={br.s2:.3e} delta2={br.delta2:.3e} ratio={br.ratio:.3f} "
          f"valid={br.valid}" + (" (low confidence)" if br.low_confidence else ""))
    if br.valid:
        msed, mxed = estimated_deviation_metrics(br)
        print(f"  estimated deviation: MSED={aggregate(msed):.3e} MXED={aggregate(mxed):.3e}")
    if args.out:
        out = _resolve_out(args.out)
        emit_solution(p, tr.form, g_test, out, bound_result=br)
        print(f"wrote {out}")
    return 0


def _cmd_list(_args) -> int:
    for name, variants in problems.available().items():
        p = problems.registry(name)
        print(f"{name}: {p.kind}, domain [{p.domain[0]}, {p.domain[1]}], "
              f"variants: {', '.join(variants)}")
    return 0


def _add_solve_flags(sp, bound_flags=False):
    sp.add_argument("problem")
    sp.add_argument("variant", nargs="?", default="")
    sp.add_argument("--method", default=AUGMENTED, choices=_MODES)
    sp.add_argument("--params", type=int, required=True, help="total parameter count (multiple of 3)")
    sp.add_argument("--mtr", type=int, required=True, help="training grid size")
    sp.add_argument("--grid", default="chebyshev")
    sp.add_argument("--budget", type=int, default=220000)
    sp.add_argument("--restarts", type=int, default=1)
    sp.add_argument("--zeta", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default="", help="solution CSV path")
    if bound_flags:
        sp.add_argument("--pert-params", type=int, default=0, dest="pert_params")
        sp.add_argument("--bound-budget", type=int, default=0, dest="bound_budget")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="odeforms",
                                 description="Neural-form ODE solving experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("run", help="execute a repeated experiment batch from a config file")
    sp.add_argument("config")
    sp.add_argument("--override", action="append", default=[], metavar="key=value")
    sp.set_defaults(fn=_cmd_run)

    sp = sub.add_parser("solve", help="train one trial solution and export it")
    _add_solve_flags(sp)
    sp.set_defaults(fn=_cmd_solve)

    sp = sub.add_parser("bound", help="train a solution plus its deviation bound")
    _add_solve_flags(sp, bound_flags=True)
    sp.set_defaults(fn=_cmd_bound)

    sp = sub.add_parser("list-problems", help="show registered problems and variants")
    sp.set_defaults(fn=_cmd_list)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

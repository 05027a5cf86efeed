"""Seeded sweep execution.

A sweep is the Cartesian product of its grids, each point run for every
realization.  Randomness is keyed only by integers:

* noise draws for layer ``l`` of realization ``k`` use
  ``(master_seed, k, l)``, shared by all points so that curves at
  different ``r`` see the same channels;
* student initial parameters use ``(master_seed, point_index, k)``.

Results are sorted by (point, realization, model, layer) before writing, so
the CSV does not depend on worker scheduling.
"""

import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import product
from pathlib import Path
from typing import Optional

import numpy as np

from reinfanneal import __version__
from reinfanneal.errors import NumericalError
from reinfanneal.harness.config import SweepSpec, dump_config
from reinfanneal.harness.records import SCHEMA_VERSION, sort_key, write_csv
from reinfanneal.mathcore import BACKEND
from reinfanneal.student import (
    basis_for_dim,
    default_learn_config,
    evaluate_student_noisy,
    gd_train,
    init_params,
    teacher_target,
)
from reinfanneal.teacher import (
    TeacherConfig,
    build_search_instance,
    make_schedule,
    run_teacher,
    running_time_scale,
)

log = logging.getLogger(__name__)
THREADS_ENV = "REINFANNEAL_THREADS"


@dataclass(frozen=True)
class SweepPoint:
    index: int
    l_t: int
    l_s: Optional[int]
    delta_l: int
    epsilon: float
    r: float


@dataclass
class SweepResult:
    rows: list
    failures: list

    @property
    def partial(self) -> bool:
        return bool(self.failures)


def sweep_points(spec: SweepSpec) -> list:
    """Grid points in a fixed order; ``l_s`` is dropped for teacher-only sweeps."""
    l_s = spec.l_s if spec.model != "teacher" else (None,)
    combos = product(spec.l_t, l_s, spec.delta_l, spec.epsilon, spec.r)
    return [SweepPoint(k, lt, ls, dl, eps, r) for k, (lt, ls, dl, eps, r) in enumerate(combos)]


def point_rng(master_seed: int, point_index: int, realization: int) -> np.random.Generator:
    return np.random.default_rng([int(master_seed), int(point_index), int(realization)])


def learn_config_for(spec: SweepSpec, d: int, seed: int = 0):
    lr = spec.learn
    overrides = {
        "iterations": lr.iterations,
        "fd_step": lr.fd_step,
        "theta_max": lr.theta_max,
        "normalize": lr.normalize,
        "update_order": lr.update_order,
        "seed": seed,
    }
    for name in ("eta", "init_range", "gradient_mode"):
        if getattr(lr, name) is not None:
            overrides[name] = getattr(lr, name)
    return default_learn_config(d, **overrides)


def _base_row(spec, inst, pt, realization):
    return {
        "_point": pt.index,
        "figure_id": spec.figure_id,
        "d": inst.dim,
        "N": inst.n_qubits,
        "L_t": pt.l_t,
        "L_s": pt.l_s,
        "r": pt.r,
        "delta_l": pt.delta_l,
        "epsilon": pt.epsilon,
        "noise": spec.noise,
        "lambda_floor": spec.lambda_floor,
        "master_seed": spec.master_seed,
        "realization": realization,
    }


def _layer_rows(base, model, p, t=None, extra=None):
    rts = running_time_scale(p)
    rows = []
    for l, pl in enumerate(p):
        row = dict(base, model=model, layer=l, p_success=float(pl))
        row["t_l"] = None if t is None else float(t[l])
        row["runtime_scale"] = None if l == 0 else float(rts.scale[l - 1])
        if extra:
            row.update(extra)
        rows.append(row)
    return rows


def run_point(spec: SweepSpec, pt: SweepPoint, realization: int) -> list:
    """All CSV rows for one (point, realization)."""
    inst = build_search_instance(spec.instance, spec.p0, spec.n_qubits)
    sched = make_schedule(spec.schedule, pt.l_t, inst.p0)
    cfg = TeacherConfig(inst, pt.l_t, pt.r, pt.delta_l, pt.epsilon, spec.noise, spec.lambda_floor, spec.master_seed)
    base = _base_row(spec, inst, pt, realization)
    rows = []
    if spec.model in ("teacher", "both"):
        trace = run_teacher(cfg, sched, realization)
        rows += _layer_rows(base, "teacher", trace.p_success, trace.t)
    if spec.model in ("student", "both"):
        target = teacher_target(replace(cfg, epsilon=0.0, noise="none"), sched)
        basis = basis_for_dim(inst.dim)
        lcfg = learn_config_for(spec, inst.dim)
        init = init_params(pt.l_s, basis, lcfg, point_rng(spec.master_seed, pt.index, realization))
        result = gd_train(inst.psi_i, target, basis, lcfg, pt.l_s, init)
        p, _ = evaluate_student_noisy(result.params, basis, inst, spec.noise, pt.epsilon,
                                      spec.master_seed, realization)
        extra = {"eta": lcfg.eta, "iterations": lcfg.iterations, "learn_error": result.final_error}
        rows += _layer_rows(base, "student", p, None, extra)
    return rows


def _task(args):
    spec, pt, realization = args
    try:
        return pt.index, realization, run_point(spec, pt, realization), None
    except (NumericalError, ValueError, ArithmeticError) as exc:
        return pt.index, realization, [], f"{type(exc).__name__}: {exc}"


def resolve_threads(threads=None) -> int:
    if threads is None:
        threads = os.environ.get(THREADS_ENV) or 1
    threads = int(threads)
    if threads < 1:
        raise ValueError(f"thread count must be >= 1, got {threads}")
    return threads


def run_sweep(spec: SweepSpec, threads=None, shuffle_seed=None) -> SweepResult:
    """Execute every (point, realization) task and return sorted rows.

    ``shuffle_seed`` permutes the submission order; it exists to test that
    output does not depend on scheduling.
    """
    tasks = [(spec, pt, k) for pt in sweep_points(spec) for k in range(spec.realizations)]
    if shuffle_seed is not None:
        order = np.random.default_rng(shuffle_seed).permutation(len(tasks))
        tasks = [tasks[i] for i in order]
    threads = resolve_threads(threads)
    if threads == 1 or len(tasks) == 1:
        outputs = [_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outputs = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * threads))))
    rows, failures = [], []
    for idx, realization, point_rows, err in outputs:
        rows.extend(point_rows)
        if err is not None:
            failures.append((idx, realization, err))
    rows.sort(key=sort_key)
    failures.sort()
    return SweepResult(rows, failures)


def output_stem(spec: SweepSpec) -> str:
    return spec.figure_id.replace("/", "_")


def write_outputs(spec: SweepSpec, result: SweepResult, out_dir=None, notes=()) -> Path:
    """Write results CSV, run metadata and (when needed) the errors sidecar."""
    out = Path(out_dir or spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = output_stem(spec)
    csv_path = out / f"{stem}.csv"
    write_csv(csv_path, result.rows)
    sidecar = out / f"{stem}.errors.txt"
    if result.failures:
        with open(sidecar, "w", encoding="utf-8") as fh:
            for idx, realization, err in result.failures:
                fh.write(f"point={idx} realization={realization} error={err}\n")
    elif sidecar.exists():
        sidecar.unlink()
    meta = {
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "eigensolver_backend": BACKEND,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "config": dump_config(spec),
        "seeding": {
            "noise": "default_rng([master_seed, realization, layer])",
            "student_init": "default_rng([master_seed, point_index, realization]), fresh per point",
        },
        "points": len(sweep_points(spec)),
        "rows": len(result.rows),
        "failures": len(result.failures),
        "notes": list(notes),
    }
    with open(out / f"{stem}.meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
    return csv_path


def expected_row_count(spec: SweepSpec) -> int:
    """|grid| x realizations x layers, summed over the models a sweep runs."""
    total = 0
    for pt in sweep_points(spec):
        if spec.model != "student":
            total += pt.l_t
        if spec.model != "teacher":
            total += pt.l_s
    return total * spec.realizations

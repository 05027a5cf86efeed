"""Aggregate a RunRecord CSV over realizations."""

import csv
import math
from collections import defaultdict

import numpy as np

from reinfanneal.harness.records import RUN_FIELDS, SchemaError, format_value, read_csv
from reinfanneal.teacher import running_time_scale

GROUP_FIELDS = tuple(f for f in RUN_FIELDS[:RUN_FIELDS.index("realization")])
SUMMARY_FIELDS = GROUP_FIELDS + (
    "n", "final_p_mean", "final_p_se", "learn_error_mean", "l_star", "p_at_l_star", "best_r",
)


def _number(row, name, path):
    text = row[name]
    try:
        return float(text)
    except ValueError:
        raise SchemaError(f"{path}: column {name!r} has non-numeric value {text!r}") from None


def _curves(rows, path):
    """{group key: {realization: [(layer, p)]}} plus learn errors per group."""
    curves = defaultdict(lambda: defaultdict(list))
    errors = defaultdict(dict)
    for row in rows:
        key = tuple(row[f] for f in GROUP_FIELDS)
        real = int(_number(row, "realization", path))
        layer = int(_number(row, "layer", path))
        curves[key][real].append((layer, _number(row, "p_success", path)))
        if row["learn_error"]:
            errors[key][real] = _number(row, "learn_error", path)
    return curves, errors


def summarize_rows(rows, path="<rows>") -> list:
    curves, errors = _curves(rows, path)
    out = []
    for key, by_real in curves.items():
        mat = []
        for real in sorted(by_real):
            pts = sorted(by_real[real])
            mat.append([p for _, p in pts])
        lengths = {len(m) for m in mat}
        if len(lengths) != 1:
            raise SchemaError(f"{path}: realizations of group {key} have different layer counts")
        mat = np.array(mat)
        final = mat[:, -1]
        n = len(final)
        se = float(np.std(final, ddof=1) / math.sqrt(n)) if n > 1 else None
        mean_curve = mat.mean(axis=0)
        rts = running_time_scale(mean_curve)
        errs = list(errors[key].values())
        rec = dict(zip(GROUP_FIELDS, key))
        rec.update(
            n=n,
            final_p_mean=float(final.mean()),
            final_p_se=se,
            learn_error_mean=float(np.mean(errs)) if errs else None,
            l_star=rts.l_star,
            p_at_l_star=None if rts.l_star is None else float(mean_curve[rts.l_star]),
            best_r=0,
        )
        out.append(rec)
    _flag_best_r(out)
    return out


def _flag_best_r(records) -> None:
    """Mark, within each group that differs only in ``r``, the row with the highest mean."""
    by_rest = defaultdict(list)
    for rec in records:
        by_rest[tuple(rec[f] for f in GROUP_FIELDS if f != "r")].append(rec)
    for group in by_rest.values():
        best = max(group, key=lambda rec: (rec["final_p_mean"], -abs(float(rec["r"]))))
        best["best_r"] = 1


def summarize(path) -> list:
    return summarize_rows(read_csv(path), path)


def write_summary(path, records) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_FIELDS)
        for rec in records:
            writer.writerow([rec[f] if isinstance(rec[f], str) else format_value(rec[f])
                             for f in SUMMARY_FIELDS])

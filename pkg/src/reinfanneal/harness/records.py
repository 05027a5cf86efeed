"""The RunRecord CSV schema: one row per (sweep point, realization, model, layer)."""

import csv
import math

SCHEMA_VERSION = 1
RUN_FIELDS = (
    "figure_id", "model", "d", "N", "L_t", "L_s", "r", "delta_l", "epsilon", "noise",
    "lambda_floor", "eta", "iterations", "master_seed", "realization", "layer", "t_l",
    "p_success", "runtime_scale", "learn_error",
)
_MODEL_ORDER = {"teacher": 0, "student": 1}


class SchemaError(ValueError):
    pass


def format_value(value) -> str:
    """Shortest round-trip text; blank for missing values, ``inf`` for infinities."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float) or hasattr(value, "dtype"):
        x = float(value)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(value)


def sort_key(row: dict):
    return (row["_point"], row["realization"], _MODEL_ORDER[row["model"]], row["layer"])


def write_csv(path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RUN_FIELDS)
        for row in rows:
            writer.writerow([format_value(row.get(name)) for name in RUN_FIELDS])


def read_csv(path) -> list:
    """Read a RunRecord CSV as string-valued dicts, checking the header first."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        for k, expected in enumerate(RUN_FIELDS):
            if k >= len(header) or header[k] != expected:
                got = header[k] if k < len(header) else "<missing>"
                raise SchemaError(f"{path}: column {k + 1} is {got!r}, expected {expected!r}")
        if len(header) > len(RUN_FIELDS):
            raise SchemaError(f"{path}: unexpected extra column {header[len(RUN_FIELDS)]!r}")
        return [dict(zip(RUN_FIELDS, line)) for line in reader]

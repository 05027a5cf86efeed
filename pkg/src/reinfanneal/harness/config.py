"""Sweep configuration: a flat ``key = value`` text file with dotted keys.

Example::

    model = both
    instance = single_qubit
    noise = depolarizing
    grid.r = -1:1:0.1
    grid.delta_l = 0, 1
    grid.epsilon = 0.4
    grid.l_t = 50
    grid.l_s = 5
    learn.eta = 1

Grids are either ``lo:hi:step`` (inclusive) or comma-separated lists.
Unknown and duplicate keys are errors.
"""

import configparser
import re
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

from reinfanneal.mathcore import DEFAULT_LAMBDA_FLOOR
from reinfanneal.student import GRADIENT_MODES, UPDATE_ORDERS
from reinfanneal.teacher import DEFAULT_P0, INSTANCE_KINDS, NOISE_KINDS

MODELS = ("teacher", "student", "both")
_SECTION = "sweep"


class ConfigError(ValueError):
    def __init__(self, message, key=None, line=None):
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.key = key
        self.line = line


@dataclass(frozen=True)
class LearnSpec:
    """Student training overrides; ``None`` falls back to the per-dimension preset."""

    eta: Optional[float] = None
    iterations: int = 100
    init_range: Optional[tuple] = None
    gradient_mode: Optional[str] = None
    fd_step: float = 1e-6
    theta_max: float = 1.0
    normalize: bool = False
    update_order: str = "sequential"


@dataclass(frozen=True)
class SweepSpec:
    model: str = "teacher"
    figure_id: str = "custom"
    instance: str = "single_qubit"
    n_qubits: Optional[int] = None
    p0: float = DEFAULT_P0
    schedule: str = "grover_optimal"
    noise: str = "depolarizing"
    r: tuple = (0.0,)
    delta_l: tuple = (0,)
    epsilon: tuple = (0.0,)
    l_t: tuple = (50,)
    l_s: tuple = (5,)
    realizations: int = 1
    master_seed: int = 0
    lambda_floor: float = DEFAULT_LAMBDA_FLOOR
    learn: LearnSpec = field(default_factory=LearnSpec)
    out_dir: str = "results"

    def __post_init__(self):
        validate(self)

    def to_dict(self) -> dict:
        return asdict(self)


def _float(text):
    text = text.strip()
    m = re.fullmatch(r"([-+]?[\d.]+)\s*\^\s*([-+]?[\d.]+)", text)
    if m:
        return float(m.group(1)) ** float(m.group(2))
    return float(text)


def _int(text):
    value = _float(text)
    if value != int(value):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def parse_grid(text, cast=float) -> tuple:
    """Expand ``lo:hi:step`` (inclusive) or ``a, b, c`` into a tuple."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range grid must be lo:hi:step, got {text!r}")
        lo, hi, step = (_float(p) for p in parts)
        if step <= 0 or hi < lo:
            raise ValueError(f"range grid needs step > 0 and hi >= lo, got {text!r}")
        n = round((hi - lo) / step)
        if abs(lo + n * step - hi) > 1e-9 * max(1.0, abs(hi)):
            raise ValueError(f"step does not divide the range evenly in {text!r}")
        values = [round(lo + k * step, 12) + 0.0 for k in range(n + 1)]
    else:
        values = [_float(p) for p in text.split(",") if p.strip()]
    if not values:
        raise ValueError("empty grid")
    if cast is int:
        if any(v != int(v) for v in values):
            raise ValueError(f"grid {text!r} must contain integers")
        return tuple(int(v) for v in values)
    return tuple(float(v) for v in values)


def _choice(options):
    def parse(text):
        text = text.strip()
        if text not in options:
            raise ValueError(f"expected one of {options}, got {text!r}")
        return text
    return parse


def _opt_int(text):
    return None if not text.strip() else _int(text)


def _init_range(text):
    lo, hi = parse_grid(text)
    return (lo, hi)


# config key -> (dataclass path, parser)
_KEYS = {
    "model": ("model", _choice(MODELS)),
    "figure_id": ("figure_id", str.strip),
    "instance": ("instance", _choice(INSTANCE_KINDS)),
    "n_qubits": ("n_qubits", _opt_int),
    "p0": ("p0", _float),
    "schedule": ("schedule", _choice(("grover_optimal", "linear"))),
    "noise": ("noise", _choice(NOISE_KINDS)),
    "realizations": ("realizations", _int),
    "master_seed": ("master_seed", _int),
    "lambda_floor": ("lambda_floor", _float),
    "grid.r": ("r", parse_grid),
    "grid.delta_l": ("delta_l", lambda t: parse_grid(t, int)),
    "grid.epsilon": ("epsilon", parse_grid),
    "grid.l_t": ("l_t", lambda t: parse_grid(t, int)),
    "grid.l_s": ("l_s", lambda t: parse_grid(t, int)),
    "learn.eta": ("learn.eta", _float),
    "learn.iterations": ("learn.iterations", _int),
    "learn.init_range": ("learn.init_range", _init_range),
    "learn.gradient_mode": ("learn.gradient_mode", _choice(GRADIENT_MODES)),
    "learn.fd_step": ("learn.fd_step", _float),
    "learn.theta_max": ("learn.theta_max", _float),
    "learn.normalize": ("learn.normalize", _bool),
    "learn.update_order": ("learn.update_order", _choice(UPDATE_ORDERS)),
    "output.dir": ("out_dir", str.strip),
}
CONFIG_KEYS = tuple(_KEYS)


def validate(spec: SweepSpec) -> None:
    def bad(msg, key):
        raise ConfigError(msg, key=key)

    if spec.model not in MODELS:
        bad(f"model must be one of {MODELS}", "model")
    if spec.instance not in INSTANCE_KINDS:
        bad(f"instance must be one of {INSTANCE_KINDS}", "instance")
    if spec.instance == "n_qubit" and (spec.n_qubits is None or spec.n_qubits < 1):
        bad("n_qubit instances need n_qubits >= 1", "n_qubits")
    if spec.noise not in NOISE_KINDS:
        bad(f"noise must be one of {NOISE_KINDS}", "noise")
    if spec.noise == "bitflip" and spec.instance == "n_qubit":
        bad("bit-flip noise is defined for single_qubit and two_qubit instances only", "noise")
    if not 0.0 < spec.p0 < 1.0:
        bad("p0 must lie in (0, 1)", "p0")
    if not 0.0 < spec.lambda_floor < 1.0:
        bad("lambda_floor must lie in (0, 1)", "lambda_floor")
    if spec.realizations < 1:
        bad("realizations must be >= 1", "realizations")
    if spec.master_seed < 0:
        bad("master_seed must be non-negative", "master_seed")
    if any(not -1.0 <= r <= 1.0 for r in spec.r):
        bad("r values must lie in [-1, 1]", "grid.r")
    if any(dl < 0 for dl in spec.delta_l):
        bad("delta_l values must be >= 0", "grid.delta_l")
    if any(e < 0 for e in spec.epsilon):
        bad("epsilon values must be >= 0", "grid.epsilon")
    if any(lt < 2 for lt in spec.l_t):
        bad("l_t values must be >= 2", "grid.l_t")
    if any(ls < 1 for ls in spec.l_s):
        bad("l_s values must be >= 1", "grid.l_s")
    if spec.model != "student" and max(spec.epsilon) > min(spec.l_t):
        bad("epsilon / l_t must not exceed 1", "grid.epsilon")
    if spec.model != "teacher" and max(spec.epsilon) > min(spec.l_s):
        bad("epsilon / l_s must not exceed 1", "grid.epsilon")
    if spec.model != "teacher" and spec.instance == "n_qubit":
        bad("student training is implemented for single_qubit and two_qubit instances", "model")
    lr = spec.learn
    if lr.eta is not None and lr.eta < 0:
        bad("learn.eta must be >= 0", "learn.eta")
    if lr.iterations < 1:
        bad("learn.iterations must be >= 1", "learn.iterations")
    if lr.init_range is not None and not lr.init_range[0] < lr.init_range[1]:
        bad("learn.init_range must satisfy lo < hi", "learn.init_range")
    if lr.fd_step <= 0:
        bad("learn.fd_step must be > 0", "learn.fd_step")
    if lr.theta_max <= 0:
        bad("learn.theta_max must be > 0", "learn.theta_max")


def parse_config(text: str, source: str = "<string>") -> SweepSpec:
    parser = configparser.ConfigParser(interpolation=None, strict=True, delimiters=("=",),
                                       comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string(f"[{_SECTION}]\n" + text, source=source)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError("duplicate key", key=exc.option, line=exc.lineno - 1) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError("section headers are not supported; use dotted keys", line=exc.lineno - 1) from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"cannot parse {line.strip()!r}", line=lineno - 1) from None
    if parser.sections() != [_SECTION]:
        raise ConfigError("section headers are not supported; use dotted keys")

    top, learn = {}, {}
    for key, raw in parser.items(_SECTION):
        if key not in _KEYS:
            raise ConfigError(f"unknown key; valid keys are {', '.join(CONFIG_KEYS)}", key=key)
        target, parse = _KEYS[key]
        try:
            value = parse(raw)
        except ValueError as exc:
            raise ConfigError(str(exc), key=key) from None
        if target.startswith("learn."):
            learn[target[6:]] = value
        else:
            top[target] = value
    return SweepSpec(learn=LearnSpec(**learn), **top)


def load_config(path) -> SweepSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))


def dump_config(spec: SweepSpec) -> str:
    """Render ``spec`` back into config-file text (inverse of :func:`parse_config`)."""
    def fmt(v):
        if isinstance(v, tuple):
            return ", ".join(fmt(x) for x in v)
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float):
            return repr(v)
        return "" if v is None else str(v)

    lines = []
    for key, (target, _) in _KEYS.items():
        if target.startswith("learn."):
            value = getattr(spec.learn, target[6:])
            if value is None:
                continue
        else:
            value = getattr(spec, target)
        lines.append(f"{key} = {fmt(value)}")
    return "\n".join(lines) + "\n"


def with_overrides(spec: SweepSpec, **changes) -> SweepSpec:
    return replace(spec, **{k: v for k, v in changes.items() if v is not None})


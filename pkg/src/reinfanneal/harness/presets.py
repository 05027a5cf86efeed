"""Figure-reproduction presets.

Each figure expands into one :class:`SweepSpec` per panel; the panel name is
appended to the figure id and becomes the CSV stem.  ``desk`` scale swaps the
N=10 search for N=6 with fewer realizations and leaves the one- and two-qubit
figures untouched.
"""

import logging
from dataclasses import replace

from reinfanneal.harness.config import SweepSpec
from reinfanneal.harness.sweep import run_sweep, write_outputs

log = logging.getLogger(__name__)

SCALES = ("paper", "desk")
R_GRID = tuple(round(-1.0 + 0.1 * k, 12) + 0.0 for k in range(21))
NOISY_EPSILONS = (0.2, 0.4, 0.8)
FIG2_EPSILONS = (0.0, 0.4, 0.8)


def _fig2(scale):
    n, reals = (10, 100) if scale == "paper" else (6, 20)
    spec = SweepSpec(model="teacher", figure_id="fig2", instance="n_qubit", n_qubits=n,
                     noise="pauli_random", r=(0.0, 1.0), delta_l=(0,), epsilon=FIG2_EPSILONS,
                     l_t=(50,), realizations=reals)
    return [spec]


def _fig3(scale):
    specs = []
    for instance, tag in (("single_qubit", "d2"), ("two_qubit", "d4")):
        for lt in (10, 20, 50):
            specs.append(SweepSpec(model="student", figure_id=f"fig3_{tag}_Lt{lt}", instance=instance,
                                   noise="none", r=R_GRID, delta_l=(0, 1, 2), epsilon=(0.0,),
                                   l_t=(lt,), l_s=(5,)))
    return specs


def _depolarizing_panels(fig, instance, lt):
    return [SweepSpec(model="both", figure_id=f"{fig}_eps{eps:g}", instance=instance,
                      noise="depolarizing", r=R_GRID, delta_l=(0, 1), epsilon=(eps,),
                      l_t=(lt,), l_s=(5,))
            for eps in NOISY_EPSILONS]


def _noise_type_panels(fig, instance, layers):
    return [SweepSpec(model="both", figure_id=f"{fig}_{noise}", instance=instance, noise=noise,
                      r=R_GRID, delta_l=(0, 1), epsilon=(0.4,), l_t=(layers,), l_s=(layers,))
            for noise in ("depolarizing", "bitflip")]


PRESETS = {
    "fig2": _fig2,
    "fig3": _fig3,
    "fig4": lambda scale: _depolarizing_panels("fig4", "single_qubit", 50),
    "fig5": lambda scale: _noise_type_panels("fig5", "single_qubit", 50),
    "figM4": lambda scale: _depolarizing_panels("figM4", "two_qubit", 50),
    "A1": lambda scale: _depolarizing_panels("A1", "single_qubit", 10),
    "A2": lambda scale: _depolarizing_panels("A2", "single_qubit", 20),
    "B1": lambda scale: _depolarizing_panels("B1", "two_qubit", 10),
    "B2": lambda scale: _depolarizing_panels("B2", "two_qubit", 20),
    "B3": lambda scale: _noise_type_panels("B3", "two_qubit", 20),
}
FIGURE_IDS = tuple(PRESETS)


def desk_substitutions(figure_id: str) -> list:
    """Human-readable list of parameters that desk scale changes."""
    if figure_id == "fig2":
        return ["n_qubits: 10 -> 6", "realizations: 100 -> 20"]
    return []


def preset_specs(figure_id: str, scale: str = "paper", **overrides) -> list:
    if figure_id not in PRESETS:
        raise KeyError(f"unknown figure id {figure_id!r}; valid ids: {', '.join(FIGURE_IDS)}")
    if scale not in SCALES:
        raise ValueError(f"scale must be one of {SCALES}, got {scale!r}")
    specs = PRESETS[figure_id](scale)
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return [replace(s, **overrides) for s in specs] if overrides else specs


def reproduce(figure_id: str, scale: str = "paper", out_dir=None, threads=None, master_seed=None,
              echo=print) -> list:
    """Run every panel of a figure and write one CSV per panel.

    Returns ``(csv_path, SweepResult)`` pairs.
    """
    specs = preset_specs(figure_id, scale, master_seed=master_seed)
    notes = [f"r grid step 0.1 over [-1, 1]"]
    if scale == "desk":
        subs = desk_substitutions(figure_id)
        for line in subs:
            echo(f"desk substitution for {figure_id}: {line}")
        notes += [f"desk substitution: {line}" for line in subs]
    outputs = []
    for spec in specs:
        result = run_sweep(spec, threads=threads)
        path = write_outputs(spec, result, out_dir=out_dir, notes=notes)
        echo(f"wrote {path} ({len(result.rows)} rows, {len(result.failures)} failures)")
        outputs.append((path, result))
    return outputs

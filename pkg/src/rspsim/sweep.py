"""Fidelity sweeps over (alpha^2, gamma^2, rate) and their CSV serialization."""
from __future__ import annotations

import io
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .noise import FidelityConvention, NoiseKind, closed_form_fidelity, fidelity_noisy
from .protocol import ProtocolParams

AXES = ("alpha2", "gamma2", "rate")
PRESET_STEPS = 51


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if self.name not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.name!r}")
        if not 0.0 <= self.lo <= self.hi <= 1.0:
            raise ValueError(f"axis {self.name}: need 0 <= min <= max <= 1, got [{self.lo}, {self.hi}]")
        if self.steps < 2:
            raise ValueError(f"axis {self.name}: steps must be >= 2, got {self.steps}")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)

    @classmethod
    def parse(cls, text: str) -> Axis:
        """``name:min:max:steps``, e.g. ``rate:0:1:51``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError(f"axis spec {text!r} is not name:min:max:steps")
        return cls(parts[0], float(parts[1]), float(parts[2]), int(parts[3]))


@dataclass(frozen=True)
class SweepSpec:
    kind: NoiseKind
    axes: tuple[Axis, ...]
    fixed: dict[str, float] = field(default_factory=dict)
    outcome: int = 2
    convention: FidelityConvention = FidelityConvention.PAPER_UNNORMALIZED
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        object.__setattr__(self, "convention", FidelityConvention(self.convention))
        object.__setattr__(self, "axes", tuple(self.axes))
        if not 1 <= len(self.axes) <= 2:
            raise ValueError(f"a sweep varies 1 or 2 axes, got {len(self.axes)}")
        varied = [a.name for a in self.axes]
        if len(set(varied)) != len(varied):
            raise ValueError(f"axis varied twice: {varied}")
        for k, v in self.fixed.items():
            if k not in AXES:
                raise ValueError(f"unknown fixed parameter {k!r}")
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"fixed {k}={v} outside [0, 1]")
        if set(varied) & set(self.fixed) or set(varied) | set(self.fixed) != set(AXES):
            raise ValueError(
                f"varied {varied} and fixed {sorted(self.fixed)} must partition {list(AXES)}"
            )
        if self.outcome not in (1, 2, 3, 4):
            raise ValueError(f"outcome must be 1..4, got {self.outcome}")

    def points(self) -> list[tuple[float, ...]]:
        """Grid points in row-major order (first axis outermost)."""
        return list(itertools.product(*(a.values().tolist() for a in self.axes)))


def _fig(kind: NoiseKind, panel: str) -> SweepSpec:
    full = lambda name: Axis(name, 0.0, 1.0, PRESET_STEPS)  # noqa: E731
    if panel == "a":
        return SweepSpec(kind, (full("gamma2"), full("rate")), {"alpha2": 0.3})
    if panel == "b":
        return SweepSpec(kind, (full("alpha2"), full("rate")), {"gamma2": 0.3})
    if panel == "c":
        return SweepSpec(kind, (full("alpha2"), full("gamma2")), {"rate": 0.5})
    return SweepSpec(
        kind,
        (full("rate"),),
        {"alpha2": 0.4, "gamma2": 0.3},
        notes=(
            "figure caption writes the two-qubit target on |00> and |01>;"
            " this preset uses gamma|00> + delta|11> like every other run",
        ),
    )


PRESETS: dict[str, SweepSpec] = {
    f"fig{num}{panel}": _fig(kind, panel)
    for num, kind in ((3, NoiseKind.AMPLITUDE_DAMPING), (4, NoiseKind.PHASE_FLIP), (5, NoiseKind.BIT_FLIP))
    for panel in "abcd"
}


def evaluate_point(spec: SweepSpec, point: tuple[float, ...]) -> tuple[float | None, float, float]:
    """(closed form or None, paper-convention numeric, trace-normalized numeric)."""
    values = dict(spec.fixed)
    values.update(zip((a.name for a in spec.axes), point))
    p = ProtocolParams.from_probabilities(values["alpha2"], values["gamma2"])
    rate = values["rate"]
    closed = closed_form_fidelity(spec.kind, p, rate) if spec.outcome == 2 else None
    paper = fidelity_noisy(p, spec.kind, rate, spec.outcome, FidelityConvention.PAPER_UNNORMALIZED)
    normed = fidelity_noisy(p, spec.kind, rate, spec.outcome, FidelityConvention.TRACE_NORMALIZED)
    return closed, paper, normed


def _evaluate_chunk(args):
    spec, points = args
    return [evaluate_point(spec, pt) for pt in points]


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[tuple[tuple[float, ...], tuple]]:
    """Evaluate every grid point; results always come back in grid order."""
    points = spec.points()
    if jobs <= 1:
        results = [evaluate_point(spec, pt) for pt in points]
    else:
        chunks = [points[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_evaluate_chunk, [(spec, c) for c in chunks]))
        results = [None] * len(points)
        for i, part in enumerate(parts):
            results[i::jobs] = part
    return list(zip(points, results))


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.12g}"


def format_csv(spec: SweepSpec, rows, preset: str | None = None) -> str:
    buf = io.StringIO()
    buf.write(f"# tool: rspsim {__version__}\n")
    if preset:
        buf.write(f"# preset: {preset}\n")
    buf.write(f"# noise: {spec.kind.value}\n")
    buf.write(f"# outcome: {spec.outcome}\n")
    buf.write(f"# convention: {spec.convention.value}\n")
    for i, a in enumerate(spec.axes, start=1):
        buf.write(f"# axis{i}: {a.name} from {_fmt(a.lo)} to {_fmt(a.hi)} in {a.steps} steps\n")
    for k in AXES:
        if k in spec.fixed:
            buf.write(f"# fixed: {k}={_fmt(spec.fixed[k])}\n")
    for note in spec.notes:
        buf.write(f"# note: {note}\n")
    if spec.outcome == 2:
        col = 1 if spec.convention is FidelityConvention.PAPER_UNNORMALIZED else 2
        dev = max(abs(r[0] - r[col]) for _, r in rows)
        buf.write(f"# max_deviation_closed_vs_numeric: {dev:.3e}\n")

    cols = [f"axis{i}" for i in range(1, len(spec.axes) + 1)]
    buf.write(",".join(cols + ["F_closed", "F_numeric_paper", "F_numeric_normalized"]) + "\n")
    for point, vals in rows:
        buf.write(",".join([_fmt(x) for x in point] + [_fmt(v) for v in vals]) + "\n")
    return buf.getvalue()

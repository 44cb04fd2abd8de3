"""Fixed-step RK4 integration of curve evolutions with per-step diagnostics.

The stage fields are re-evaluated through the full Hamiltonian-field
pipeline (length-dependent coefficients included) at every stage; no
coefficients are frozen across a step.  Optional uniform-arclength
resampling is off by default and logged when it fires.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .curves import (
    DegenerateCurveError,
    DiscreteCurve,
    EdgeCollapseError,
    NumericalBlowupError,
    resample_uniform,
)
from .hamiltonians import h_value, hgrad, validate_pairing
from .momentum import MomentumRecord, momentum_record
from .scenario import Scenario

FieldFn = Callable[[DiscreteCurve], np.ndarray]


@dataclass(frozen=True)
class FlowDiagnostics:
    """State summary at one sampled step of a trajectory."""

    step: int
    time: float
    hamiltonian_value: float
    length: float
    momenta: MomentumRecord
    max_speed: float
    min_edge: float
    resampled: bool = False


@dataclass
class SimulationResult:
    frames: List[DiscreteCurve] = field(default_factory=list)
    diagnostics: List[FlowDiagnostics] = field(default_factory=list)
    completed_steps: int = 0


class FlowAborted(NumericalBlowupError):
    """Time integration failed; carries the partial result and the cause."""

    def __init__(self, step: int, cause: Exception, result: SimulationResult):
        super().__init__(f"flow aborted at step {step}: {cause}")
        self.step = step
        self.cause = cause
        self.result = result


def rk4_step(field_fn: FieldFn, c: DiscreteCurve, dt: float) -> DiscreteCurve:
    """One classic 4-stage step of c' = field(c).

    Raises ``NumericalBlowupError`` on non-finite stage values and
    ``EdgeCollapseError`` when a stage curve loses the immersion condition.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    v = c.vertices
    k1 = _stage(field_fn, c)
    k2 = _stage(field_fn, _stage_curve(v + (0.5 * dt) * k1))
    k3 = _stage(field_fn, _stage_curve(v + (0.5 * dt) * k2))
    k4 = _stage(field_fn, _stage_curve(v + dt * k3))
    new = v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return _stage_curve(new)


def _stage(field_fn: FieldFn, c: DiscreteCurve) -> np.ndarray:
    k = np.asarray(field_fn(c), dtype=np.float64)
    if k.shape != (c.n, 3):
        raise ValueError(f"field returned shape {k.shape}, expected ({c.n}, 3)")
    if not np.isfinite(k).all():
        raise NumericalBlowupError("non-finite stage velocity")
    return k


def _stage_curve(vertices: np.ndarray) -> DiscreteCurve:
    if not np.isfinite(vertices).all():
        raise NumericalBlowupError("non-finite stage vertices")
    try:
        return DiscreteCurve(vertices)
    except EdgeCollapseError:
        raise
    except DegenerateCurveError as exc:
        raise EdgeCollapseError(str(exc)) from exc


def hamiltonian_field(scenario: Scenario) -> FieldFn:
    """The horizontal Hamiltonian field configured by a scenario."""
    validate_pairing(scenario.hamiltonian, scenario.weight)

    def field_fn(c: DiscreteCurve) -> np.ndarray:
        return hgrad(scenario.hamiltonian, scenario.weight, c)

    return field_fn


def simulate(scenario: Scenario, field_fn: Optional[FieldFn] = None) -> SimulationResult:
    """Run a scenario; returns sampled frames and diagnostics.

    Frames and diagnostics are recorded at step 0 and every
    ``output_every``-th step.  On numerical failure raises ``FlowAborted``
    carrying everything recorded up to the failing step.
    """
    if field_fn is None:
        field_fn = hamiltonian_field(scenario)
    c = scenario.curve.make()
    result = SimulationResult()
    _record(result, scenario, field_fn, c, step=0, resampled=False)
    for step in range(1, scenario.steps + 1):
        try:
            c = rk4_step(field_fn, c, scenario.dt)
            resampled = bool(
                scenario.resample_every and step % scenario.resample_every == 0
            )
            if resampled:
                c = resample_uniform(c)
        except (NumericalBlowupError, EdgeCollapseError) as exc:
            raise FlowAborted(step, exc, result) from exc
        result.completed_steps = step
        if step % scenario.output_every == 0:
            _record(result, scenario, field_fn, c, step, resampled)
    return result


def _record(result, scenario, field_fn, c, step, resampled):
    hv = h_value(scenario.hamiltonian, c)
    speeds = np.linalg.norm(field_fn(c), axis=1)
    result.frames.append(c)
    result.diagnostics.append(
        FlowDiagnostics(
            step=step,
            time=step * scenario.dt,
            hamiltonian_value=hv,
            length=c.measure.total_length,
            momenta=momentum_record(scenario.weight, c, hv),
            max_speed=float(speeds.max()),
            min_edge=float(c.measure.edge_lengths.min()),
            resampled=resampled,
        )
    )

"""Scenario files: plain-text sectioned key-value simulation configurations.

Format::

    [curve]
    family = trefoil          # circle | trefoil | torus_knot
    n = 256
    # radius = 1.0            (circle)
    # p = 2 / q = 3 / big_radius = 2.0 / small_radius = 0.5   (torus_knot)

    [weight]
    variant = length_weighted # identity | length_weighted | curvature_weighted
    c = 10.0
    p = -2.0

    [hamiltonian]
    variant = flux_rotation   # length | flux_translation | flux_rotation |
                              # squared_curvature | total_torsion |
                              # squared_scale | length_times_k
    axis = 0 0 1              (flux variants)

    [run]
    dt = 1e-3
    steps = 1000
    output_every = 10
    resample_every = 0        (optional; 0 disables)
    seed = 42                 (optional)

    [outputs]                 (optional section)
    formats = frames_csv diagnostics_csv summary_json

Unknown sections or keys are rejected with their line number.  Custom
conformal weights carry callables and are not representable in files.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .curves import ConfigurationError, DiscreteCurve, make_curve
from .forms import CurvatureWeighted, Identity, LengthWeighted, WeightSpec
from .hamiltonians import (
    FluxRotation,
    FluxTranslation,
    HamiltonianSpec,
    Length,
    LengthTimesK,
    SquaredCurvature,
    SquaredScale,
    TotalTorsion,
    spec_name,
    validate_pairing,
)

OUTPUT_FORMATS = ("frames_csv", "frames_obj", "diagnostics_csv", "summary_json")
DEFAULT_OUTPUTS = ("frames_csv", "diagnostics_csv", "summary_json")


class ScenarioError(ConfigurationError):
    """Malformed or semantically invalid scenario text."""


@dataclass(frozen=True)
class CurveSpec:
    """Initial-curve family with parameters; builds curves at any resolution."""

    family: str
    n: int
    params: tuple = ()

    def make(self, n: Optional[int] = None) -> DiscreteCurve:
        return make_curve(self.family, self.n if n is None else n, **dict(self.params))


@dataclass(frozen=True)
class Scenario:
    curve: CurveSpec
    weight: WeightSpec
    hamiltonian: HamiltonianSpec
    dt: float
    steps: int
    output_every: int = 1
    resample_every: Optional[int] = None
    seed: int = 42
    outputs: tuple = DEFAULT_OUTPUTS

    def echo(self) -> dict:
        """JSON-ready scenario description for the run summary."""
        w = self.weight
        wdict = {"variant": spec_name(w)}
        if isinstance(w, LengthWeighted):
            wdict.update(c=w.coeff, p=w.power)
        h = self.hamiltonian
        hdict = {"variant": spec_name(h)}
        if isinstance(h, (FluxTranslation, FluxRotation)):
            hdict.update(axis=list(h.axis))
        return {
            "curve": {
                "family": self.curve.family,
                "n": self.curve.n,
                **dict(self.curve.params),
            },
            "weight": wdict,
            "hamiltonian": hdict,
            "dt": self.dt,
            "steps": self.steps,
            "output_every": self.output_every,
            "resample_every": self.resample_every,
            "seed": self.seed,
            "outputs": list(self.outputs),
        }


def parse_scenario(text: str, name: str = "<scenario>") -> Scenario:
    """Parse and validate a scenario; errors carry line numbers."""
    sections = _split_sections(text, name)
    for sec in sections:
        if sec not in ("curve", "weight", "hamiltonian", "run", "outputs"):
            lineno = sections[sec]["__line__"]
            raise ScenarioError(f"{name}:{lineno}: unknown section [{sec}]")
    curve = _parse_curve(_require(sections, "curve", name), name)
    weight = _parse_weight(_require(sections, "weight", name), name)
    ham = _parse_hamiltonian(_require(sections, "hamiltonian", name), name)
    run = _require(sections, "run", name)
    dt = _take_float(run, "dt", name)
    if not dt > 0:
        raise ScenarioError(f"{name}: dt must be positive, got {dt}")
    steps = _take_int(run, "steps", name)
    if steps < 1:
        raise ScenarioError(f"{name}: steps must be >= 1, got {steps}")
    output_every = _take_int(run, "output_every", name, default=1)
    if output_every < 1:
        raise ScenarioError(f"{name}: output_every must be >= 1")
    resample_every = _take_int(run, "resample_every", name, default=0)
    seed = _take_int(run, "seed", name, default=42)
    _reject_leftovers(run, name)
    outputs = DEFAULT_OUTPUTS
    if "outputs" in sections:
        sec = sections["outputs"]
        raw = _take_str(sec, "formats", name)
        _reject_leftovers(sec, name)
        outputs = tuple(raw.split())
        for fmt in outputs:
            if fmt not in OUTPUT_FORMATS:
                raise ScenarioError(
                    f"{name}: unknown output format '{fmt}' "
                    f"(expected one of {', '.join(OUTPUT_FORMATS)})"
                )
    try:
        validate_pairing(ham, weight)
        curve.make()
    except ScenarioError:
        raise
    except ConfigurationError as exc:
        raise ScenarioError(f"{name}: {exc}") from exc
    except Exception as exc:  # invariance / unsupported-weight rejections
        raise ScenarioError(f"{name}: {exc}") from exc
    return Scenario(
        curve=curve,
        weight=weight,
        hamiltonian=ham,
        dt=dt,
        steps=steps,
        output_every=output_every,
        resample_every=resample_every or None,
        seed=seed,
        outputs=outputs,
    )


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read(), name=str(path))


# ---------------------------------------------------------------------------


def _split_sections(text: str, name: str) -> dict:
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            if current in sections:
                raise ScenarioError(f"{name}:{lineno}: duplicate section [{current}]")
            sections[current] = {"__line__": lineno}
            continue
        if current is None:
            raise ScenarioError(f"{name}:{lineno}: key outside any [section]")
        if "=" not in line:
            raise ScenarioError(f"{name}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ScenarioError(f"{name}:{lineno}: expected 'key = value'")
        key = key.lower()
        if key in sections[current]:
            raise ScenarioError(f"{name}:{lineno}: duplicate key '{key}'")
        sections[current][key] = (value, lineno)
    return sections


def _require(sections: dict, sec: str, name: str) -> dict:
    if sec not in sections:
        raise ScenarioError(f"{name}: missing required section [{sec}]")
    return sections[sec]


def _take(section: dict, key: str, name: str, default=None):
    if key in section:
        value, _ = section.pop(key)
        return value
    if default is not None:
        return default
    lineno = section["__line__"]
    raise ScenarioError(f"{name}:{lineno}: missing required key '{key}'")


def _take_str(section, key, name, default=None) -> str:
    value = _take(section, key, name, default)
    return str(value)


def _take_float(section, key, name, default=None) -> float:
    raw = _take(section, key, name, "" if default is None else str(default))
    if raw == "":
        raise ScenarioError(f"{name}: missing required key '{key}'")
    try:
        return float(raw)
    except ValueError:
        raise ScenarioError(f"{name}: key '{key}' is not a number: {raw!r}") from None


def _take_int(section, key, name, default=None) -> int:
    raw = _take(section, key, name, None if default is None else str(default))
    try:
        return int(str(raw))
    except ValueError:
        raise ScenarioError(f"{name}: key '{key}' is not an integer: {raw!r}") from None


def _reject_leftovers(section: dict, name: str) -> None:
    extras = {k: v for k, v in section.items() if k != "__line__"}
    if extras:
        key, (_, lineno) = next(iter(extras.items()))
        raise ScenarioError(f"{name}:{lineno}: unknown key '{key}'")


def _parse_curve(section: dict, name: str) -> CurveSpec:
    family = _take_str(section, "family", name).lower()
    n = _take_int(section, "n", name)
    params = {}
    if family == "circle":
        if "radius" in section:
            params["radius"] = _take_float(section, "radius", name)
    elif family == "torus_knot":
        for key in ("p", "q"):
            if key in section:
                params[key] = _take_int(section, key, name)
        for key in ("big_radius", "small_radius"):
            if key in section:
                params[key] = _take_float(section, key, name)
    elif family != "trefoil":
        lineno = section["__line__"]
        raise ScenarioError(f"{name}:{lineno}: unknown curve family '{family}'")
    _reject_leftovers(section, name)
    return CurveSpec(family=family, n=n, params=tuple(sorted(params.items())))


def _parse_weight(section: dict, name: str) -> WeightSpec:
    variant = _take_str(section, "variant", name).lower()
    if variant == "identity":
        _reject_leftovers(section, name)
        return Identity()
    if variant == "length_weighted":
        coeff = _take_float(section, "c", name, default=1.0)
        power = _take_float(section, "p", name, default=0.0)
        _reject_leftovers(section, name)
        try:
            return LengthWeighted(coeff=coeff, power=power)
        except ConfigurationError as exc:
            raise ScenarioError(f"{name}: {exc}") from exc
    if variant == "curvature_weighted":
        _reject_leftovers(section, name)
        return CurvatureWeighted()
    lineno = section["__line__"]
    raise ScenarioError(
        f"{name}:{lineno}: unknown weight variant '{variant}' "
        f"(custom conformal weights are not representable in scenario files)"
    )


def _parse_hamiltonian(section: dict, name: str) -> HamiltonianSpec:
    variant = _take_str(section, "variant", name).lower()
    simple = {
        "length": Length,
        "squared_curvature": SquaredCurvature,
        "total_torsion": TotalTorsion,
        "squared_scale": SquaredScale,
        "length_times_k": LengthTimesK,
    }
    if variant in simple:
        _reject_leftovers(section, name)
        return simple[variant]()
    if variant in ("flux_translation", "flux_rotation"):
        raw = _take_str(section, "axis", name, default="0 0 1")
        try:
            axis = tuple(float(p) for p in raw.split())
        except ValueError:
            raise ScenarioError(f"{name}: bad axis '{raw}'") from None
        if len(axis) != 3:
            raise ScenarioError(f"{name}: axis needs three components, got '{raw}'")
        _reject_leftovers(section, name)
        cls = FluxTranslation if variant == "flux_translation" else FluxRotation
        try:
            return cls(axis=axis)
        except ConfigurationError as exc:
            raise ScenarioError(f"{name}: {exc}") from exc
    lineno = section["__line__"]
    raise ScenarioError(f"{name}:{lineno}: unknown hamiltonian variant '{variant}'")

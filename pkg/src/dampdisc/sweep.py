"""Point evaluation, grid sweeps, figure presets and Monte Carlo runs.

This is the data-production layer behind the CLI: a SweepConfig describes what
to evaluate; run_point / run_sweep / run_mc produce typed reports; emit writes
CSV or JSON deterministically (same config, same bytes).  Point evaluations
cross-check closed forms against the numeric route and raise ConsistencyError
on disagreement, which the CLI maps to its own exit code.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .channel import DampingChannel, InputState
from .discrimination import monte_carlo_psucc
from .linalg import trace_norm
from .protocols import MC_STRATEGIES, build_protocol
from .strategies import (
    ChannelPair,
    adaptive_feedback_closed_form,
    adaptive_feedback_psucc,
    adaptive_forward_optimal,
    adaptive_forward_psucc,
    backward_adaptive_optimal,
    backward_adaptive_psucc,
    damping_polar_curve,
    feedback_optimal,
    feedback_psucc,
    fwd_bwd_difference,
    one_shot_optimal,
    one_shot_optimal_numeric,
    one_shot_psucc,
    one_shot_psucc_numeric,
    sequential_effective_pair,
    sequential_two_shot_optimal,
    sequential_two_shot_psucc,
    side_ent_gain_expression,
    side_ent_optimal,
    side_ent_optimal_numeric,
    side_ent_psucc,
    two_shot_entangled_optimal,
    two_shot_entangled_psucc,
    two_shot_product_optimal,
    two_shot_product_psucc,
)
from .strategies import (
    _adaptive_forward_values_batch,
    _feedback_values_batch,
    _one_shot_values_batch,
    _two_shot_ent_values_batch,
    _two_shot_product_values_batch,
)

HALF_PI = math.pi / 2

STRATEGIES = (
    "one-shot",
    "side-ent",
    "feedback",
    "two-shot-entangled",
    "two-shot-product",
    "adaptive",
    "adaptive-fb",
    "backward",
    "sequential",
    "fwd-bwd-diff",
    "polar-curve",
)

FIXED_KEYS = ("x", "y", "alpha", "variant")

VALUE_CHECK_TOL = 1e-8
ARGMAX_CHECK_TOL = 1e-3
IDENTITY_CHECK_TOL = 1e-9
FLAT_OBJECTIVE_TOL = 1e-9  # below this excess over 1/2 argmax location is meaningless
MC_Z_LIMIT = 4.0

POLAR_CURVE_ANGLES = (0.0, math.pi / 6, math.pi / 3)
POLAR_GRID_DEFAULT = 91


class ConsistencyError(RuntimeError):
    """Closed-form and numeric evaluations disagree beyond tolerance."""


@dataclass(frozen=True)
class SweepConfig:
    """Everything needed to reproduce one evaluation, sweep or simulation."""

    strategy: str
    grid_n: int = 25
    eta0_range: tuple = (0.0, HALF_PI)
    eta1_range: tuple = (0.0, HALF_PI)
    fixed: dict = field(default_factory=dict)
    output_path: str | None = None
    format: str = "csv"
    seed: int = 20260815
    trials: int | None = None
    eta0: float | None = None
    eta1: float | None = None
    preset: str | None = None

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(
                f"unknown strategy {self.strategy!r}; choose one of {', '.join(STRATEGIES)}"
            )
        if self.preset is not None and self.preset not in PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}")
        if not isinstance(self.grid_n, int) or self.grid_n < 2:
            raise ValueError(f"grid_n must be an integer >= 2, got {self.grid_n!r}")
        for name, rng in (("eta0_range", self.eta0_range), ("eta1_range", self.eta1_range)):
            lo, hi = rng
            if not (0.0 <= lo <= hi <= HALF_PI):
                raise ValueError(f"{name} must satisfy 0 <= lo <= hi <= pi/2, got {rng}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")
        if self.trials is not None and self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        for key in self.fixed:
            if key not in FIXED_KEYS:
                raise ValueError(f"unknown fixed parameter {key!r}; allowed: {FIXED_KEYS}")
        for key in ("x", "y"):
            if key in self.fixed and not 0.0 <= self.fixed[key] <= 1.0:
                raise ValueError(f"{key} must lie in [0, 1], got {self.fixed[key]}")
        if "alpha" in self.fixed and not 0.0 <= self.fixed["alpha"] <= HALF_PI:
            raise ValueError(f"alpha must lie in [0, pi/2], got {self.fixed['alpha']}")
        if "variant" in self.fixed and self.fixed["variant"] not in ("odd", "even"):
            raise ValueError(f"variant must be odd or even, got {self.fixed['variant']!r}")
        for name, value in (("eta0", self.eta0), ("eta1", self.eta1)):
            if value is not None and not 0.0 <= value <= HALF_PI:
                raise ValueError(f"{name} must lie in [0, pi/2], got {value}")

    def pair(self) -> ChannelPair:
        if self.eta0 is None or self.eta1 is None:
            raise ValueError("this evaluation needs both --eta0 and --eta1")
        return ChannelPair(self.eta0, self.eta1)


@dataclass(frozen=True)
class PointReport:
    strategy: str
    value: float
    label: str
    params: dict
    measurement: dict | None = None

    def lines(self) -> list[str]:
        out = [f"{self.label} = {self.value:.12g}"]
        for key in sorted(self.params):
            out.append(f"{key} = {self.params[key]:.12g}")
        if self.measurement is not None and "local" in self.measurement:
            out.append(f"measurement local = {'yes' if self.measurement['local'] else 'no'}")
        return out


@dataclass(frozen=True)
class SweepGrid:
    eta0_values: np.ndarray
    eta1_values: np.ndarray
    values: np.ndarray
    metadata: dict

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(self.eta0_values), len(self.eta1_values)):
            raise ValueError(
                f"values shape {values.shape} inconsistent with axes "
                f"({len(self.eta0_values)}, {len(self.eta1_values)})"
            )
        if not np.isfinite(values).all():
            raise ValueError("sweep produced non-finite values")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class CurveFamily:
    """Polar-curve dataset: one row per channel angle, columns over theta."""

    eta1_values: np.ndarray
    theta_values: np.ndarray
    values: np.ndarray
    metadata: dict

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(self.eta1_values), len(self.theta_values)):
            raise ValueError("curve values inconsistent with axes")
        if not np.isfinite(values).all():
            raise ValueError("curve produced non-finite values")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class McReport:
    analytic: float
    estimate: float
    stderr: float
    trials: int
    z: float
    ok: bool

    def lines(self) -> list[str]:
        return [
            f"analytic = {self.analytic:.12g}",
            f"estimate = {self.estimate:.12g}",
            f"stderr = {self.stderr:.12g}",
            f"z = {self.z:.12g}",
            f"trials = {self.trials}",
            f"ok = {'yes' if self.ok else 'no'}",
        ]


@dataclass(frozen=True)
class FigurePreset:
    """A named dataset: the quantity behind one published panel."""

    id: str
    description: str
    strategy: str
    cell: Callable[[ChannelPair], float] | None
    grid_n: int = 25

    def config(self, grid_n: int | None = None) -> SweepConfig:
        return SweepConfig(
            strategy=self.strategy, grid_n=grid_n or self.grid_n, preset=self.id
        )


# ---------------------------------------------------------------------------
# point evaluation with dual-route consistency checks


def _check_close(label: str, a: float, b: float, tol: float) -> None:
    if abs(a - b) > tol:
        raise ConsistencyError(f"{label}: {a!r} vs {b!r} (tolerance {tol})")


def _point_one_shot(pair: ChannelPair, fixed: dict) -> PointReport:
    x = fixed.get("x")
    if x is not None:
        value = one_shot_psucc(pair, x)
        _check_close("one-shot closed vs numeric", value, one_shot_psucc_numeric(pair, x), IDENTITY_CHECK_TOL)
        return PointReport("one-shot", value, "psucc", {"x": x})
    res = one_shot_optimal(pair)
    x_num, val_num = one_shot_optimal_numeric(pair)
    _check_close("one-shot optimum closed vs numeric", res.psucc, val_num, VALUE_CHECK_TOL)
    if res.psucc - 0.5 > FLAT_OBJECTIVE_TOL:
        _check_close("one-shot argmax closed vs numeric", res.params["x"], x_num, ARGMAX_CHECK_TOL)
    return PointReport("one-shot", res.psucc, "psucc", res.params)


def _point_side_ent(pair: ChannelPair, fixed: dict) -> PointReport:
    y = fixed.get("y")
    if y is not None:
        value = side_ent_psucc(pair, y)
        _check_close(
            "side-ent numeric vs closed separation",
            value,
            0.5 + 0.25 * side_ent_gain_expression(pair, y),
            IDENTITY_CHECK_TOL,
        )
        return PointReport("side-ent", value, "psucc", {"y": y})
    res = side_ent_optimal(pair)
    y_num, val_num = side_ent_optimal_numeric(pair)
    _check_close("side-ent optimum closed vs numeric", res.psucc, val_num, 1e-6)
    if res.psucc - 0.5 > FLAT_OBJECTIVE_TOL:
        _check_close("side-ent argmax closed vs numeric", res.params["y"], y_num, ARGMAX_CHECK_TOL)
    return PointReport("side-ent", res.psucc, "psucc", res.params)


def _point_feedback(pair: ChannelPair, fixed: dict) -> PointReport:
    if "x" in fixed or "alpha" in fixed:
        x = fixed.get("x", 1.0)
        alpha = fixed.get("alpha", math.pi / 4)
        value = feedback_psucc(pair, x, alpha)
        _check_close(
            "feedback construction vs batched evaluation",
            value,
            float(_feedback_values_batch(pair, x, alpha)),
            1e-10,
        )
        return PointReport("feedback", value, "psucc", {"x": x, "alpha": alpha})
    res = feedback_optimal(pair)
    _check_close(
        "feedback optimum closed vs construction",
        res.psucc,
        feedback_psucc(pair, 1.0, math.pi / 4),
        IDENTITY_CHECK_TOL,
    )
    return PointReport("feedback", res.psucc, "psucc", res.params)


def _point_two_shot_entangled(pair: ChannelPair, fixed: dict) -> PointReport:
    variant = fixed.get("variant", "odd")
    x = fixed.get("x")
    if x is None:
        res = two_shot_entangled_optimal(pair, variant)
        x, value = res.params["x"], res.psucc
    else:
        value = two_shot_entangled_psucc(pair, variant, x)
    _check_close(
        "two-shot entangled scalar vs batched",
        value,
        float(_two_shot_ent_values_batch(pair, variant, np.asarray(x))),
        IDENTITY_CHECK_TOL,
    )
    return PointReport("two-shot-entangled", value, "psucc", {"x": x})


def _point_two_shot_product(pair: ChannelPair, fixed: dict) -> PointReport:
    x = fixed.get("x")
    if x is not None:
        value = two_shot_product_psucc(pair, x)
        _check_close(
            "two-shot product scalar vs batched",
            value,
            float(_two_shot_product_values_batch(pair, np.asarray(x))),
            IDENTITY_CHECK_TOL,
        )
        return PointReport("two-shot-product", value, "psucc", {"x": x})
    res = two_shot_product_optimal(pair)
    _check_close(
        "two-shot product optimum vs scalar at argmax",
        res.psucc,
        two_shot_product_psucc(pair, res.params["x"]),
        IDENTITY_CHECK_TOL,
    )
    return PointReport("two-shot-product", res.psucc, "psucc", res.params, res.measurement)


def _point_adaptive(pair: ChannelPair, fixed: dict) -> PointReport:
    x = fixed.get("x")
    if x is not None:
        value = adaptive_forward_psucc(pair, x)
        _check_close(
            "adaptive scalar vs batched",
            value,
            float(_adaptive_forward_values_batch(pair, np.asarray(x))),
            1e-10,
        )
        return PointReport("adaptive", value, "psucc", {"x": x})
    res = adaptive_forward_optimal(pair)
    _check_close(
        "adaptive optimum vs scalar at argmax",
        res.psucc,
        adaptive_forward_psucc(pair, res.params["x"]),
        IDENTITY_CHECK_TOL,
    )
    return PointReport("adaptive", res.psucc, "psucc", res.params)


def _point_adaptive_fb(pair: ChannelPair, fixed: dict) -> PointReport:
    value = adaptive_feedback_psucc(pair)
    _check_close(
        "two-copy feedback construction vs closed form",
        value,
        adaptive_feedback_closed_form(pair),
        IDENTITY_CHECK_TOL,
    )
    return PointReport("adaptive-fb", value, "psucc", {})


def _point_backward(pair: ChannelPair, fixed: dict) -> PointReport:
    x = fixed.get("x")
    if x is not None:
        value = backward_adaptive_psucc(pair, x)
        if value < adaptive_forward_psucc(pair, x) - IDENTITY_CHECK_TOL:
            raise ConsistencyError("backward optimization fell below the forward value")
        return PointReport("backward", value, "psucc", {"x": x})
    x_star, value = backward_adaptive_optimal(pair)
    if value < adaptive_forward_optimal(pair).psucc - IDENTITY_CHECK_TOL:
        raise ConsistencyError("backward optimum fell below the forward optimum")
    return PointReport("backward", value, "psucc", {"x": x_star})


def _point_sequential(pair: ChannelPair, fixed: dict) -> PointReport:
    x = fixed.get("x")
    if x is None:
        res = sequential_two_shot_optimal(pair)
        x, value = res.params["x"], res.psucc
    else:
        value = sequential_two_shot_psucc(pair, x)
    eff = sequential_effective_pair(pair)
    _check_close(
        "sequential composition vs effective single channel",
        sequential_two_shot_psucc(pair, x),
        float(_one_shot_values_batch(eff, np.asarray(x))),
        IDENTITY_CHECK_TOL,
    )
    return PointReport("sequential", value, "psucc", {"x": x})


def _point_fwd_bwd(pair: ChannelPair, fixed: dict) -> PointReport:
    value = fwd_bwd_difference(pair)
    if value > IDENTITY_CHECK_TOL:
        raise ConsistencyError(
            "forward optimum exceeded the backward optimum, which is structurally impossible"
        )
    return PointReport("fwd-bwd-diff", value, "difference", {})


def _polar_radius_closed(eta1: float, x: float) -> float:
    return 2.0 * math.cos(eta1) * math.sqrt(max(0.0, x * (1.0 - x * math.sin(eta1) ** 2)))


_POINT_DISPATCH = {
    "one-shot": _point_one_shot,
    "side-ent": _point_side_ent,
    "feedback": _point_feedback,
    "two-shot-entangled": _point_two_shot_entangled,
    "two-shot-product": _point_two_shot_product,
    "adaptive": _point_adaptive,
    "adaptive-fb": _point_adaptive_fb,
    "backward": _point_backward,
    "sequential": _point_sequential,
    "fwd-bwd-diff": _point_fwd_bwd,
}


def run_point(cfg: SweepConfig) -> PointReport:
    """Evaluate one strategy at one channel pair, cross-checking dual routes."""
    if cfg.strategy == "polar-curve":
        if cfg.eta1 is None:
            raise ValueError("polar-curve needs --eta1")
        x = cfg.fixed.get("x", 1.0)
        theta = math.asin(math.sqrt(x))
        ground = np.diag([1.0, 0.0]).astype(complex)
        radius = trace_norm(ground - DampingChannel(cfg.eta1).output_state(InputState(x)))
        _check_close(
            "polar radius numeric vs closed",
            radius,
            _polar_radius_closed(cfg.eta1, x),
            IDENTITY_CHECK_TOL,
        )
        return PointReport("polar-curve", radius, "radius", {"theta": theta, "x": x})
    return _POINT_DISPATCH[cfg.strategy](cfg.pair(), cfg.fixed)


# ---------------------------------------------------------------------------
# sweeps and presets


def _sweep_cell(strategy: str, fixed: dict) -> Callable[[ChannelPair], float]:
    def cell(pair: ChannelPair) -> float:
        return _POINT_DISPATCH[strategy](pair, fixed).value

    return cell


def _preset_side_gain(pair: ChannelPair) -> float:
    return side_ent_optimal(pair).psucc - side_ent_psucc(pair, 0.0)


def _preset_side_optimum(pair: ChannelPair) -> float:
    return side_ent_optimal(pair).psucc


def _preset_side_weight(pair: ChannelPair) -> float:
    return side_ent_optimal(pair).params["y"]


def _preset_feedback_gain(pair: ChannelPair) -> float:
    return feedback_optimal(pair).psucc - one_shot_optimal(pair).psucc


def _preset_collective_gain(pair: ChannelPair) -> float:
    return two_shot_product_optimal(pair).psucc - one_shot_optimal(pair).psucc


def _preset_collective_probe(pair: ChannelPair) -> float:
    return two_shot_product_optimal(pair).params["x"]


def _preset_collective_vs_adaptive(pair: ChannelPair) -> float:
    return two_shot_product_optimal(pair).psucc - adaptive_forward_optimal(pair).psucc


def _preset_adaptive_gain(pair: ChannelPair) -> float:
    return adaptive_forward_optimal(pair).psucc - one_shot_optimal(pair).psucc


def _preset_second_copy_feedback_gain(pair: ChannelPair) -> float:
    return adaptive_feedback_psucc(pair) - feedback_optimal(pair).psucc


PRESETS = {
    "fig2new": FigurePreset(
        id="fig2new",
        description="polar separation curves from the ground state for three channel angles",
        strategy="polar-curve",
        cell=None,
        grid_n=POLAR_GRID_DEFAULT,
    ),
    "fig3": FigurePreset(
        id="fig3",
        description="gain from an idle entangled reference over the best bare probe",
        strategy="side-ent",
        cell=_preset_side_gain,
    ),
    "fig4new": FigurePreset(
        id="fig4new",
        description="best success probability with an idle entangled reference",
        strategy="side-ent",
        cell=_preset_side_optimum,
    ),
    "fig4": FigurePreset(
        id="fig4",
        description="optimal reference weight for the entangled input",
        strategy="side-ent",
        cell=_preset_side_weight,
    ),
    "fig6": FigurePreset(
        id="fig6",
        description="environment feedback gain over the best unassisted probe",
        strategy="feedback",
        cell=_preset_feedback_gain,
    ),
    "fig7": FigurePreset(
        id="fig7",
        description="two-probe collective gain over the best single probe",
        strategy="two-shot-product",
        cell=_preset_collective_gain,
    ),
    "fig8": FigurePreset(
        id="fig8",
        description="optimal probe weight for the two-probe collective strategy",
        strategy="two-shot-product",
        cell=_preset_collective_probe,
    ),
    "fig10": FigurePreset(
        id="fig10",
        description="collective minus adaptive local-measurement success probability",
        strategy="adaptive",
        cell=_preset_collective_vs_adaptive,
    ),
    "fig11": FigurePreset(
        id="fig11",
        description="adaptive local-measurement gain over the best single probe",
        strategy="adaptive",
        cell=_preset_adaptive_gain,
    ),
    "fig13": FigurePreset(
        id="fig13",
        description="second feedback-assisted copy gain over one feedback-assisted copy",
        strategy="adaptive-fb",
        cell=_preset_second_copy_feedback_gain,
    ),
    "fig15": FigurePreset(
        id="fig15",
        description="forward minus backward optimized adaptive success (slow: POVM search per cell)",
        strategy="fwd-bwd-diff",
        cell=fwd_bwd_difference,
        grid_n=9,
    ),
}


def _metadata(cfg: SweepConfig) -> dict:
    meta = {
        "strategy": cfg.strategy,
        "grid_n": cfg.grid_n,
        "eta0_range": list(cfg.eta0_range),
        "eta1_range": list(cfg.eta1_range),
        "fixed": dict(sorted(cfg.fixed.items())),
        "version": __version__,
    }
    if cfg.preset is not None:
        meta["preset"] = cfg.preset
        meta["description"] = PRESETS[cfg.preset].description
    return meta


def _polar_family(cfg: SweepConfig) -> CurveFamily:
    if cfg.preset == "fig2new":
        angles = POLAR_CURVE_ANGLES
    else:
        if cfg.eta1 is None:
            raise ValueError("polar-curve sweep needs --eta1")
        angles = (cfg.eta1,)
    thetas = np.linspace(0.0, HALF_PI, cfg.grid_n)
    values = np.empty((len(angles), cfg.grid_n))
    for i, eta1 in enumerate(angles):
        values[i] = [p.radius for p in damping_polar_curve(eta1, cfg.grid_n)]
    meta = _metadata(cfg)
    meta["theta_points"] = cfg.grid_n
    return CurveFamily(
        eta1_values=np.asarray(angles, dtype=float),
        theta_values=thetas,
        values=values,
        metadata=meta,
    )


def run_sweep(cfg: SweepConfig, workers: int = 1) -> "SweepGrid | CurveFamily":
    """Evaluate the configured quantity on the (eta0, eta1) grid.

    Cells are pure functions of the channel pair and are assembled by index,
    so the result is identical for any worker count.
    """
    if cfg.strategy == "polar-curve":
        return _polar_family(cfg)
    if cfg.preset is not None:
        cell = PRESETS[cfg.preset].cell
    else:
        cell = _sweep_cell(cfg.strategy, cfg.fixed)
    eta0s = np.linspace(cfg.eta0_range[0], cfg.eta0_range[1], cfg.grid_n)
    eta1s = np.linspace(cfg.eta1_range[0], cfg.eta1_range[1], cfg.grid_n)
    pairs = [ChannelPair(float(e0), float(e1)) for e0 in eta0s for e1 in eta1s]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(cell, pairs))
    else:
        flat = [cell(p) for p in pairs]
    values = np.asarray(flat, dtype=float).reshape(cfg.grid_n, cfg.grid_n)
    return SweepGrid(
        eta0_values=eta0s, eta1_values=eta1s, values=values, metadata=_metadata(cfg)
    )


# ---------------------------------------------------------------------------
# Monte Carlo


def run_mc(cfg: SweepConfig) -> McReport:
    """Simulate the strategy's measurement tree and compare with the analytic value."""
    if cfg.trials is None:
        raise ValueError("Monte Carlo mode needs --trials")
    if cfg.strategy not in MC_STRATEGIES:
        raise ValueError(
            f"strategy {cfg.strategy!r} cannot be simulated; "
            f"choose one of {', '.join(MC_STRATEGIES)}"
        )
    protocol = build_protocol(cfg.strategy, cfg.pair(), cfg.fixed)
    est = monte_carlo_psucc(protocol, trials=cfg.trials, seed=cfg.seed)
    gap = est.estimate - protocol.analytic_psucc
    if est.stderr > 0.0:
        z = gap / est.stderr
    else:
        z = 0.0 if abs(gap) < 1e-12 else math.inf
    return McReport(
        analytic=protocol.analytic_psucc,
        estimate=est.estimate,
        stderr=est.stderr,
        trials=est.trials,
        z=z,
        ok=abs(z) <= MC_Z_LIMIT,
    )


# ---------------------------------------------------------------------------
# serialization


def format_csv(grid: "SweepGrid | CurveFamily") -> str:
    lines = []
    if isinstance(grid, CurveFamily):
        lines.append("eta1,theta,value")
        for i, eta1 in enumerate(grid.eta1_values):
            for j, theta in enumerate(grid.theta_values):
                lines.append(f"{eta1:.12g},{theta:.12g},{grid.values[i, j]:.12g}")
    else:
        lines.append("eta0,eta1,value")
        for i, eta0 in enumerate(grid.eta0_values):
            for j, eta1 in enumerate(grid.eta1_values):
                lines.append(f"{eta0:.12g},{eta1:.12g},{grid.values[i, j]:.12g}")
    return "\n".join(lines) + "\n"


def format_json(grid: "SweepGrid | CurveFamily") -> str:
    if isinstance(grid, CurveFamily):
        payload = {
            "metadata": grid.metadata,
            "eta1_values": [float(v) for v in grid.eta1_values],
            "theta_values": [float(v) for v in grid.theta_values],
            "values": [float(v) for v in grid.values.ravel()],
        }
    else:
        payload = {
            "metadata": grid.metadata,
            "eta0_values": [float(v) for v in grid.eta0_values],
            "eta1_values": [float(v) for v in grid.eta1_values],
            "values": [float(v) for v in grid.values.ravel()],
        }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def grid_from_json(text: str) -> "SweepGrid | CurveFamily":
    payload = json.loads(text)
    if "theta_values" in payload:
        eta1 = np.asarray(payload["eta1_values"], dtype=float)
        theta = np.asarray(payload["theta_values"], dtype=float)
        values = np.asarray(payload["values"], dtype=float).reshape(len(eta1), len(theta))
        return CurveFamily(
            eta1_values=eta1, theta_values=theta, values=values, metadata=payload["metadata"]
        )
    eta0 = np.asarray(payload["eta0_values"], dtype=float)
    eta1 = np.asarray(payload["eta1_values"], dtype=float)
    values = np.asarray(payload["values"], dtype=float).reshape(len(eta0), len(eta1))
    return SweepGrid(
        eta0_values=eta0, eta1_values=eta1, values=values, metadata=payload["metadata"]
    )


def emit(grid: "SweepGrid | CurveFamily", fmt: str = "csv", path: str | None = None) -> str:
    """Render the dataset; write it (LF endings) when a path is given."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    text = format_csv(grid) if fmt == "csv" else format_json(grid)
    if path is not None:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    return text

"""Latency budget of one feed-forward cycle and the supporting pipeline.

Models the electro-optic feed-forward chain as named delay terms: fiber
runs to the detectors, detector delay (the only term carrying a quoted
uncertainty), coincidence logic, the modulator driver, the Pockels-cell
rise, and miscellaneous cabling. Delay fibers must park a photon for as
many full cycles as the corrections stacked in front of it: one cycle
for the basis switch on qubit 3, two for the qubit-4 error correction
chain (a modeling assumption, flagged in the report).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class LatencyBudget:
    """Per-cycle delay contributions in nanoseconds."""

    fiber_to_detector_ns: float = 15.0
    detector_delay_ns: float = 35.0
    detector_delay_uncertainty_ns: float = 3.0
    logic_ns: float = 7.5
    eom_driver_ns: float = 65.0
    pockels_rise_ns: float = 5.0
    cables_ns: float = 17.5

    def __post_init__(self):
        for name, value in asdict(self).items():
            if value < 0:
                raise ValueError(f"{name} must be >= 0, got {value}")

    def components(self) -> dict:
        d = asdict(self)
        d.pop("detector_delay_uncertainty_ns")
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "LatencyBudget":
        return cls(**data)


@dataclass(frozen=True)
class PipelineSpec:
    """Fibers, rates and switch characteristics of the feed-forward stage."""

    delay_fiber_lengths_m: tuple = (30.0, 60.0)
    fiber_ns_per_m: float = 5.0
    eom_dead_time_us: float = 1.6
    max_driver_rate_hz: float = 20_000.0
    pair_rate_hz: float = 2_000.0
    four_photon_rate_hz: float = 1.0
    switching_contrast: float = 500.0
    n_eoms: int = 3

    def __post_init__(self):
        if any(length <= 0 for length in self.delay_fiber_lengths_m):
            raise ValueError("fiber lengths must be positive")
        for name in (
            "fiber_ns_per_m",
            "eom_dead_time_us",
            "max_driver_rate_hz",
            "pair_rate_hz",
            "four_photon_rate_hz",
            "switching_contrast",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.n_eoms < 1:
            raise ValueError("need at least one modulator")

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineSpec":
        data = dict(data)
        if "delay_fiber_lengths_m" in data:
            data["delay_fiber_lengths_m"] = tuple(data["delay_fiber_lengths_m"])
        return cls(**data)


def total_latency(budget: LatencyBudget) -> tuple[float, float]:
    """(mean, uncertainty) of one feed-forward cycle in ns.

    The sum of all components; the uncertainty comes from the detector
    term alone.
    """
    mean = sum(budget.components().values())
    return float(mean), float(budget.detector_delay_uncertainty_ns)


def delay_line_check(spec: PipelineSpec, budget: LatencyBudget) -> list[dict]:
    """Per-fiber report: does each delay line cover its cycle budget?

    Fiber k (1-based, ordered as given) must bridge k concatenated
    feed-forward cycles.
    """
    cycle, _ = total_latency(budget)
    report = []
    for k, length in enumerate(spec.delay_fiber_lengths_m, start=1):
        delay = length * spec.fiber_ns_per_m
        required = k * cycle
        report.append(
            {
                "length_m": float(length),
                "delay_ns": float(delay),
                "cycles_required": k,
                "required_ns": float(required),
                "ok": bool(delay >= required),
            }
        )
    return report


def duty_cycle_loss(spec: PipelineSpec, trigger_rate_hz: float | None = None) -> float:
    """Fraction of Poisson triggers falling in a prior trigger's dead window.

    lambda*tau / (1 + lambda*tau) for rate lambda and dead time tau;
    zero rate means zero loss.
    """
    rate = spec.pair_rate_hz if trigger_rate_hz is None else trigger_rate_hz
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    x = rate * spec.eom_dead_time_us * 1e-6
    return x / (1.0 + x)


def switching_accuracy(spec: PipelineSpec) -> float:
    """(1 - 1/contrast)^n_eoms, the chance all switches act correctly."""
    if spec.switching_contrast <= 1:
        raise ValueError("switching contrast must exceed 1")
    return (1.0 - 1.0 / spec.switching_contrast) ** spec.n_eoms


DUTY_CYCLE_WARN_FRACTION = 0.05


def timing_report(
    spec: PipelineSpec | None = None, budget: LatencyBudget | None = None
) -> dict:
    """JSON-ready summary of the whole timing model."""
    spec = spec or PipelineSpec()
    budget = budget or LatencyBudget()
    mean, unc = total_latency(budget)
    loss_pair = duty_cycle_loss(spec)
    loss_max = duty_cycle_loss(spec, spec.max_driver_rate_hz)
    return {
        "components_ns": budget.components(),
        "cycle_ns": {"mean": mean, "uncertainty": unc},
        "delay_lines": delay_line_check(spec, budget),
        "delay_line_note": "qubit-4 fiber must cover two concatenated cycles (model assumption)",
        "duty_cycle_loss": {
            "at_pair_rate": loss_pair,
            "at_max_driver_rate": loss_max,
            "warn_threshold": DUTY_CYCLE_WARN_FRACTION,
            "warn": bool(max(loss_pair, loss_max) > DUTY_CYCLE_WARN_FRACTION),
        },
        "switching_accuracy": {
            "contrast": spec.switching_contrast,
            "n_eoms": spec.n_eoms,
            "probability": switching_accuracy(spec),
        },
    }


def render_table(report: dict) -> str:
    """Human-readable view of :func:`timing_report`."""
    lines = ["feed-forward cycle budget (ns)"]
    for name, value in report["components_ns"].items():
        lines.append(f"  {name:<24} {value:>8.1f}")
    cyc = report["cycle_ns"]
    lines.append(f"  {'total':<24} {cyc['mean']:>8.1f} +- {cyc['uncertainty']:.1f}")
    lines.append("delay lines")
    for entry in report["delay_lines"]:
        status = "ok" if entry["ok"] else "TOO SHORT"
        lines.append(
            f"  {entry['length_m']:.0f} m -> {entry['delay_ns']:.0f} ns "
            f"(needs {entry['required_ns']:.0f} ns for {entry['cycles_required']} "
            f"cycle{'s' if entry['cycles_required'] > 1 else ''}): {status}"
        )
    duty = report["duty_cycle_loss"]
    lines.append(
        f"duty-cycle loss: {duty['at_pair_rate']:.4%} at pair rate, "
        f"{duty['at_max_driver_rate']:.4%} at max driver rate"
        + (" (WARN)" if duty["warn"] else "")
    )
    sw = report["switching_accuracy"]
    lines.append(
        f"switching accuracy: {sw['probability']:.5f} "
        f"({sw['n_eoms']} switches at {sw['contrast']:.0f}:1 contrast)"
    )
    return "\n".join(lines)


def load_timing_config(path) -> tuple[PipelineSpec, LatencyBudget]:
    """Read {"pipeline": {...}, "budget": {...}} with both keys optional."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    spec = PipelineSpec.from_dict(data.get("pipeline", {}))
    budget = LatencyBudget.from_dict(data.get("budget", {}))
    return spec, budget

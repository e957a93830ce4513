"""Seeded Monte Carlo driver, metrics, reports and parameter sweeps."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import time
from dataclasses import dataclass, field
from typing import Any, Sequence

from .. import __version__
from ..adversary import AdversaryKind
from ..errors import UnknownParameter
from ..protocol import OP_ORDER, Mode, SessionResult, Verdict, run_session
from .config import SimConfig, h_distribution
from .enumerate import ExactDetection, enumerate_detection
from .stats import Rate

TOOL_NAME = "qss-sim"


@dataclass
class Metrics:
    rounds_total: int = 0
    control_rounds: int = 0
    message_rounds: int = 0
    detections: int = 0
    detections_by_op: dict[str, Rate] = field(default_factory=dict)
    leaked: int = 0
    decoded_correct: int = 0
    transmissions: int = 0
    aborted_transmissions: int = 0
    abort_reasons: dict[str, int] = field(default_factory=dict)
    decoys_total: int = 0
    decoy_errors: int = 0
    decoy_detections: int = 0  # transmissions with at least one decoy error
    checking_total: int = 0
    checking_errors: int = 0
    authentications: int = 0
    authentications_passed: int = 0
    exact_values: dict[str, Any] | None = None

    @property
    def detection_rate(self) -> Rate:
        return Rate(self.detections, self.control_rounds)

    @property
    def detection_rate_by_op(self) -> dict[str, Rate]:
        return self.detections_by_op

    @property
    def leakage_rate(self) -> Rate:
        return Rate(self.leaked, self.message_rounds)

    @property
    def decoding_rate(self) -> Rate:
        return Rate(self.decoded_correct, self.message_rounds)

    @property
    def decoy_error_rate(self) -> Rate:
        return Rate(self.decoy_errors, self.decoys_total)

    @property
    def decoy_detection_rate(self) -> Rate:
        return Rate(self.decoy_detections, self.transmissions)

    @property
    def checking_error_rate(self) -> Rate:
        return Rate(self.checking_errors, self.checking_total)

    @property
    def session_abort_rate(self) -> Rate:
        return Rate(self.aborted_transmissions, self.transmissions)

    def add_session(self, result: SessionResult) -> None:
        for tr in result.transmissions:
            self.transmissions += 1
            self.aborted_transmissions += tr.aborted
            for reason in tr.abort_reasons:
                self.abort_reasons[reason.value] = self.abort_reasons.get(reason.value, 0) + 1
            self.decoys_total += tr.decoy_count
            self.decoy_errors += tr.decoy_errors
            self.decoy_detections += tr.decoy_errors > 0
            self.checking_total += tr.checking_count
            self.checking_errors += tr.checking_errors
            for rec in tr.rounds:
                self.rounds_total += 1
                if rec.mode is Mode.CONTROL:
                    self.control_rounds += 1
                    failed = rec.verdict is Verdict.FAIL
                    self.detections += failed
                    key = rec.charlie_op.value
                    self.detections_by_op[key] = self.detections_by_op.get(key, Rate(0, 0)) + Rate(failed, 1)
                else:
                    self.message_rounds += 1
                    self.decoded_correct += rec.decoded_pauli is rec.alice_pauli
                    self.leaked += rec.adversary_notes.get("leaked_pauli") is rec.alice_pauli
        if result.authentication is not None:
            self.authentications += 1
            self.authentications_passed += result.authentication

    def to_dict(self) -> dict:
        by_op = {op.value: self.detections_by_op.get(op.value, Rate(0, 0)).as_dict() for op in OP_ORDER}
        return {
            "rounds_total": self.rounds_total,
            "control_rounds": self.control_rounds,
            "message_rounds": self.message_rounds,
            "detections": self.detections,
            "detection_rate": self.detection_rate.as_dict(),
            "detection_rate_by_op": by_op,
            "leakage_rate": self.leakage_rate.as_dict(),
            "decoding_rate": self.decoding_rate.as_dict(),
            "transmissions": self.transmissions,
            "session_abort_rate": self.session_abort_rate.as_dict(),
            "abort_reasons": dict(sorted(self.abort_reasons.items())),
            "decoys_total": self.decoys_total,
            "decoy_errors": self.decoy_errors,
            "decoy_error_rate": self.decoy_error_rate.as_dict(),
            "decoy_detection_rate": self.decoy_detection_rate.as_dict(),
            "checking_total": self.checking_total,
            "checking_errors": self.checking_errors,
            "checking_error_rate": self.checking_error_rate.as_dict(),
            "authentication": {
                "performed": self.authentications,
                "passed": self.authentications_passed,
            },
            "exact_values": self.exact_values,
        }


def exact_summary(exact: ExactDetection) -> dict:
    return {
        "ancilla": exact.ancilla.value,
        "aggregate_fail_probability": exact.aggregate,
        "fail_probability_by_op": {op.value: p for op, p in exact.by_op().items()},
    }


def exact_table(exact: ExactDetection) -> list[dict]:
    return [
        {
            "initial": b.initial.value,
            "charlie_op": b.charlie_op.value,
            "bell_outcome": b.bell_outcome.value,
            "basis": b.basis.value,
            "control_order": b.control_order.value,
            "announced": b.announced.value,
            "probability": b.probability,
            "fail_probability": b.fail_probability,
        }
        for b in exact.branches
    ]


@dataclass
class Report:
    config: SimConfig
    metrics: Metrics
    branches: list[dict] | None = None
    version: str = __version__
    duration_s: float = 0.0

    def to_dict(self, *, include_timing: bool = False) -> dict:
        out = {
            "tool": {"name": TOOL_NAME, "version": self.version},
            "config": self.config.to_dict(),
            "metrics": self.metrics.to_dict(),
            "branches": self.branches,
        }
        if include_timing:
            out["duration_s"] = self.duration_s
        return out

    def to_json(self, *, include_timing: bool = False) -> str:
        return dumps(self.to_dict(include_timing=include_timing))


def _round_floats(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """Deterministic JSON: insertion key order, floats at 12 significant digits."""
    return json.dumps(_round_floats(obj), indent=2) + "\n"


def run_simulation(config: SimConfig) -> Report:
    start = time.perf_counter()
    adversary = config.build_adversary()
    metrics = Metrics()
    for trial in range(config.trials):
        metrics.add_session(run_session(config.protocol, adversary, trial=trial))
    branches = None
    if config.enumerate_exact and config.adversary is AdversaryKind.BOB_REPLACE:
        exact = enumerate_detection(config.protocol.charlie_op_distribution, config.ancilla)
        metrics.exact_values = exact_summary(exact)
        branches = exact_table(exact)
    return Report(config, metrics, branches, duration_s=time.perf_counter() - start)


SWEEPABLE = {
    "decoy_count": int,
    "checking_photon_count": int,
    "control_probability": float,
    "h_probability": float,
    "trials": int,
    "rounds": int,
    "batch_size": int,
    "seed": int,
}


def with_param(config: SimConfig, name: str, value) -> SimConfig:
    if name not in SWEEPABLE:
        raise UnknownParameter(f"{name!r} cannot be swept; choose from {', '.join(SWEEPABLE)}")
    value = SWEEPABLE[name](value)
    if name == "trials":
        return dataclasses.replace(config, trials=value)
    if name == "h_probability":
        return config.replace(charlie_op_distribution=h_distribution(value))
    return config.replace(**{name: value})


def sweep(base: SimConfig, parameter: str, values: Sequence) -> list[tuple[Any, Metrics]]:
    if parameter not in SWEEPABLE:
        raise UnknownParameter(f"{parameter!r} cannot be swept; choose from {', '.join(SWEEPABLE)}")
    return [(v, run_simulation(with_param(base, parameter, v)).metrics) for v in values]


SWEEP_COLUMNS = [
    "rounds_total", "control_rounds", "message_rounds", "detections",
    "detection_rate", "detection_ci_low", "detection_ci_high",
    "leakage_rate", "transmissions", "session_abort_rate",
    "decoys_total", "decoy_errors", "decoy_error_rate",
    "decoy_detection_rate", "decoy_detection_ci_low", "decoy_detection_ci_high",
]


def sweep_csv(parameter: str, rows: Sequence[tuple[Any, Metrics]], level: float = 0.99) -> str:
    """Comma-separated table with a header line. CI columns use ``level``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([parameter] + SWEEP_COLUMNS)
    fmt = lambda x: f"{x:.12g}"
    for value, m in rows:
        det_lo, det_hi = m.detection_rate.ci(level)
        dd_lo, dd_hi = m.decoy_detection_rate.ci(level)
        w.writerow([
            value, m.rounds_total, m.control_rounds, m.message_rounds, m.detections,
            fmt(m.detection_rate.value), fmt(det_lo), fmt(det_hi),
            fmt(m.leakage_rate.value), m.transmissions, fmt(m.session_abort_rate.value),
            m.decoys_total, m.decoy_errors, fmt(m.decoy_error_rate.value),
            fmt(m.decoy_detection_rate.value), fmt(dd_lo), fmt(dd_hi),
        ])
    return buf.getvalue()

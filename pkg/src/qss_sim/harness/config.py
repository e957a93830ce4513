"""Simulation configuration and its INI file format.

Example (every key is optional; shown values are the defaults)::

    [protocol]
    variant = lin-improved            ; or further-improved
    rounds = 1000
    batch_size = 50                   ; rounds per transmission
    control_probability = 0.5
    charlie_op_distribution = 0.125, 0.125, 0.125, 0.125, 0.5   ; I, X, Y, Z, H
    checking_photon_count = 10
    decoy_count = 10
    authentication_fraction = 0.05
    seed = 0

    [adversary]
    kind = honest                     ; honest | bob-replace | eve-intercept-resend
    channel = charlie-to-alice        ; eve only: charlie-to-alice | alice-to-bob
    ancilla = psi-                    ; bob only: phi+ | phi- | psi+ | psi-

    [simulation]
    trials = 1
    enumerate_exact = false

``h_probability = p`` may be given instead of ``charlie_op_distribution``;
it spreads ``1 - p`` evenly over the four Paulis. Unknown sections or keys
are errors.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from ..adversary import AdversaryKind, Channel, make_adversary
from ..errors import ConfigError
from ..protocol import ProtocolConfig, ProtocolVariant
from ..qcore import BellKind

_PROTOCOL_KEYS = {
    "variant",
    "rounds",
    "batch_size",
    "control_probability",
    "charlie_op_distribution",
    "h_probability",
    "checking_photon_count",
    "decoy_count",
    "authentication_fraction",
    "seed",
}
_ADVERSARY_KEYS = {"kind", "channel", "ancilla"}
_SIMULATION_KEYS = {"trials", "enumerate_exact"}
_SECTIONS = {"protocol": _PROTOCOL_KEYS, "adversary": _ADVERSARY_KEYS, "simulation": _SIMULATION_KEYS}

_INT_FIELDS = {"rounds", "batch_size", "checking_photon_count", "decoy_count", "seed"}
_FLOAT_FIELDS = {"control_probability", "authentication_fraction"}


def h_distribution(p: float) -> tuple[float, ...]:
    q = (1 - p) / 4
    return (q, q, q, q, p)


@dataclass
class SimConfig:
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    adversary: AdversaryKind = AdversaryKind.HONEST
    channel: Channel = Channel.CHARLIE_TO_ALICE
    ancilla: BellKind = BellKind.PSI_MINUS
    trials: int = 1
    enumerate_exact: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError({"simulation.trials": "must be >= 1"})

    def build_adversary(self):
        return make_adversary(self.adversary, channel=self.channel, ancilla=self.ancilla)

    def replace(self, **protocol_changes) -> "SimConfig":
        return dataclasses.replace(self, protocol=dataclasses.replace(self.protocol, **protocol_changes))

    def to_dict(self) -> dict:
        p = self.protocol
        return {
            "protocol": {
                "variant": p.variant.value,
                "rounds": p.rounds,
                "batch_size": p.batch_size,
                "control_probability": p.control_probability,
                "charlie_op_distribution": list(p.charlie_op_distribution),
                "checking_photon_count": p.checking_photon_count,
                "decoy_count": p.decoy_count,
                "authentication_fraction": p.authentication_fraction,
                "seed": p.seed,
            },
            "adversary": {
                "kind": self.adversary.value,
                "channel": self.channel.value,
                "ancilla": self.ancilla.value,
            },
            "simulation": {"trials": self.trials, "enumerate_exact": self.enumerate_exact},
        }


def _enum(cls, raw: str, key: str, problems: dict):
    try:
        return cls(raw.strip().lower())
    except ValueError:
        allowed = ", ".join(m.value for m in cls)
        problems[key] = f"{raw!r} is not one of: {allowed}"
        return None


def parse_config(text: str, *, seed: int | None = None) -> SimConfig:
    """Parse INI text into a :class:`SimConfig`; ``seed`` overrides the file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError({"file": str(exc).splitlines()[0]}) from None

    problems: dict[str, str] = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            problems[section] = "unknown section"
            continue
        for key in parser[section]:
            if key not in _SECTIONS[section]:
                problems[f"{section}.{key}"] = "unknown key"
    if problems:
        raise ConfigError(problems)

    proto: dict = {}
    sec = parser["protocol"] if parser.has_section("protocol") else {}
    for key, raw in sec.items():
        name = f"protocol.{key}"
        try:
            if key in _INT_FIELDS:
                proto[key] = int(raw)
            elif key in _FLOAT_FIELDS:
                proto[key] = float(raw)
            elif key == "variant":
                proto[key] = _enum(ProtocolVariant, raw, name, problems)
            elif key == "charlie_op_distribution":
                proto[key] = tuple(float(x) for x in raw.split(","))
            elif key == "h_probability":
                proto["_h"] = float(raw)
        except ValueError:
            problems[name] = f"cannot parse {raw!r}"
    if "_h" in proto:
        h = proto.pop("_h")
        if "charlie_op_distribution" in proto:
            problems["protocol.h_probability"] = "conflicts with charlie_op_distribution"
        elif not 0 <= h <= 1:
            problems["protocol.h_probability"] = "must lie in [0, 1]"
        else:
            proto["charlie_op_distribution"] = h_distribution(h)
    if seed is not None:
        proto["seed"] = seed

    sim: dict = {}
    sec = parser["adversary"] if parser.has_section("adversary") else {}
    if "kind" in sec:
        sim["adversary"] = _enum(AdversaryKind, sec["kind"], "adversary.kind", problems)
    if "channel" in sec:
        sim["channel"] = _enum(Channel, sec["channel"], "adversary.channel", problems)
    if "ancilla" in sec:
        sim["ancilla"] = _enum(BellKind, sec["ancilla"], "adversary.ancilla", problems)

    sec = parser["simulation"] if parser.has_section("simulation") else None
    if sec is not None:
        if "trials" in sec:
            try:
                sim["trials"] = int(sec["trials"])
            except ValueError:
                problems["simulation.trials"] = f"cannot parse {sec['trials']!r}"
        if "enumerate_exact" in sec:
            try:
                sim["enumerate_exact"] = sec.getboolean("enumerate_exact")
            except ValueError:
                problems["simulation.enumerate_exact"] = "expected true/false"
    if problems:
        raise ConfigError(problems)

    try:
        protocol = ProtocolConfig(**proto)
    except ConfigError as exc:
        raise ConfigError({f"protocol.{k}": v for k, v in exc.problems.items()}) from None
    return SimConfig(protocol=protocol, **sim)


def load_config(path: str | Path, *, seed: int | None = None) -> SimConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError({"file": f"cannot read {path}: {exc.strerror}"}) from None
    return parse_config(text, seed=seed)

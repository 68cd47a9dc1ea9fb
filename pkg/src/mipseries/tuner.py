"""Online tuning of three binary solver parameters with a modified UCB score.

Each parameter (solution hint, tree cuts, root cuts) keeps one arm per value
with a running average Q of base scores and an update count N.  The score is
Q + C/N (linear in N for fast convergence; C/sqrt(N) and the classical
total-count form are available behind a switch).  A parameter stays under
deterministic exploration until both arms have at least four updates; after
that all arms within one tenth of the base-score standard deviation of the
best score are candidates, drawn uniformly at random.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum

DEFAULT_C = 0.3
EXPLORATION_MIN_USES = 4
CANDIDATE_BAND_FRACTION = 0.1


class Param(Enum):
    HINT = "HINT"
    CUTS = "CUTS"
    ROOT_CUTS = "ROOT_CUTS"


PARAM_ORDER = (Param.HINT, Param.CUTS, Param.ROOT_CUTS)
_EXPLORATION_BIT = {Param.HINT: 0, Param.CUTS: 1, Param.ROOT_CUTS: 2}


class Variant(Enum):
    LINEAR = "LINEAR"       # bonus C / N
    SQRT = "SQRT"           # bonus C / sqrt(N)
    CLASSIC = "CLASSIC"     # bonus C * sqrt(ln(total) / N)


ON = "ON"
OFF = "OFF"


@dataclass
class ParamArm:
    value: str
    Q: float = 0.0
    N: int = 0


def arm_score(arm: ParamArm, C: float, variant: Variant = Variant.LINEAR,
              total_updates: int | None = None) -> float:
    """Q + exploration bonus; calling it on an unused arm is a contract error."""
    if arm.N < 1:
        raise ValueError("arm_score requires N >= 1; the arm is under exploration")
    if variant is Variant.LINEAR:
        return arm.Q + C / arm.N
    if variant is Variant.SQRT:
        return arm.Q + C / math.sqrt(arm.N)
    total = total_updates if total_updates is not None else arm.N
    return arm.Q + C * math.sqrt(math.log(max(total, 2)) / arm.N)


@dataclass
class ParamState:
    on: ParamArm
    off: ParamArm
    samples: list = field(default_factory=list)

    def arm(self, value: str) -> ParamArm:
        return self.on if value == ON else self.off

    def under_exploration(self) -> bool:
        return min(self.on.N, self.off.N) < EXPLORATION_MIN_USES

    def sigma(self) -> float:
        if len(self.samples) < 2:
            return 0.0
        mean = sum(self.samples) / len(self.samples)
        var = sum((s - mean) ** 2 for s in self.samples) / (len(self.samples) - 1)
        return math.sqrt(var)


class TunerState:
    def __init__(self, seed: int = 0, C: float = DEFAULT_C,
                 variant: Variant = Variant.LINEAR, tuning_start_index: int = 1):
        self.C = C
        self.variant = variant
        self.tuning_start_index = tuning_start_index
        self.seed = seed
        self.rng = random.Random(seed)
        self.params = {p: ParamState(ParamArm(ON), ParamArm(OFF)) for p in PARAM_ORDER}

    # -- selection ----------------------------------------------------------

    def select_values(self, instance_index: int) -> dict:
        """Value per parameter for this instance.

        Under exploration the choice is the deterministic bit pattern of
        t = instance_index - tuning_start_index (HINT: bit 0, CUTS: bit 1,
        ROOT_CUTS: bit 2).  Otherwise every arm whose score is within one
        tenth of the base-score standard deviation of the best is a
        candidate; ties are drawn uniformly with the seeded rng."""
        t = instance_index - self.tuning_start_index
        out = {}
        for p in PARAM_ORDER:
            state = self.params[p]
            if state.under_exploration():
                out[p] = ON if (t >> _EXPLORATION_BIT[p]) & 1 else OFF
                continue
            total = state.on.N + state.off.N
            scores = {ON: arm_score(state.on, self.C, self.variant, total),
                      OFF: arm_score(state.off, self.C, self.variant, total)}
            best = max(scores.values())
            band = state.sigma() * CANDIDATE_BAND_FRACTION
            candidates = [v for v in (ON, OFF) if scores[v] >= best - band]
            if len(candidates) == 1:
                out[p] = candidates[0]
            else:
                out[p] = self.rng.choice(candidates)
        return out

    # -- updates --------------------------------------------------------------

    def update(self, param: Param, value_used: str, base_score: float,
               hints_provided: bool = False, hint_converted: bool = False) -> None:
        """Credit one observation.

        For CUTS/ROOT_CUTS the arm actually used is credited.  For HINT the ON
        arm is credited only when hints were provided and converted into at
        least one feasible solution; otherwise the OFF arm is credited."""
        state = self.params[param]
        if param is Param.HINT:
            credited = ON if (value_used == ON and hints_provided and hint_converted) else OFF
        else:
            credited = value_used
        arm = state.arm(credited)
        arm.N += 1
        arm.Q += (base_score - arm.Q) / arm.N
        state.samples.append(base_score)

    def exploration_flags(self) -> dict:
        return {p: self.params[p].under_exploration() for p in PARAM_ORDER}

    # -- reporting / persistence ------------------------------------------------

    def summary(self) -> dict:
        """Most-updated value and its count per parameter."""
        out = {}
        for p in PARAM_ORDER:
            state = self.params[p]
            if state.on.N >= state.off.N:
                value, count = ON, state.on.N
            else:
                value, count = OFF, state.off.N
            out[p.value] = {"value": value, "count": count,
                            "n_on": state.on.N, "n_off": state.off.N,
                            "q_on": state.on.Q, "q_off": state.off.Q}
        return out

    def to_json_dict(self) -> dict:
        def _enc(x):
            if isinstance(x, (list, tuple)):
                return {"t": "seq", "v": [_enc(e) for e in x]}
            return x
        rng_state = self.rng.getstate()
        return {
            "seed": self.seed,
            "C": self.C,
            "variant": self.variant.value,
            "tuning_start_index": self.tuning_start_index,
            "rng_state": _enc(rng_state),
            "params": {
                p.value: {
                    "on": {"Q": st.on.Q, "N": st.on.N},
                    "off": {"Q": st.off.Q, "N": st.off.N},
                    "samples": list(st.samples),
                } for p, st in self.params.items()},
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "TunerState":
        def _dec(x):
            if isinstance(x, dict) and x.get("t") == "seq":
                return tuple(_dec(e) for e in x["v"])
            return x
        state = cls(seed=data["seed"], C=data["C"],
                    variant=Variant(data["variant"]),
                    tuning_start_index=data["tuning_start_index"])
        state.rng.setstate(_dec(data["rng_state"]))
        for p in PARAM_ORDER:
            src = data["params"][p.value]
            st = state.params[p]
            st.on.Q, st.on.N = src["on"]["Q"], src["on"]["N"]
            st.off.Q, st.off.N = src["off"]["Q"], src["off"]["N"]
            st.samples = list(src["samples"])
        return state

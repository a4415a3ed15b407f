"""Experiment settings: which variant of each tuner feature to use.

Settings files are JSON documents mirroring the feature tree, e.g.::

    {"version": 1, "selection": "sobol", "model": "combined",
     "repeater": {"kind": "quantity", "k": 2},
     "stop": [{"kind": "improvement", "n": 50}],
     "perEvalTimeLimit": 10, "productionTimeLimit": 900, "seed": 0}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .repeater import ModelAwareStudent, Quantity, Student
from .stop import AdaptiveStop, GuaranteedStop, ImprovementStop, QuantityStop, TimeStop

SELECTIONS = ("random", "sobol")
MODELS = ("regression", "bayesian", "combined")
SETTINGS_VERSION = 1


class SettingsError(ValueError):
    pass


@dataclass(frozen=True)
class TunerSettings:
    selection: str = "sobol"
    model: str = "combined"
    repeater: Any = Quantity(2)
    stop: tuple = (ImprovementStop(50),)
    perEvalTimeLimit: float = 10.0
    productionTimeLimit: float = 900.0
    seed: int = 0
    default_configuration: dict | None = field(default=None)
    virtual_clock: bool = False

    def __post_init__(self):
        if self.selection not in SELECTIONS:
            raise SettingsError(f"selection must be one of {SELECTIONS}")
        if self.model not in MODELS:
            raise SettingsError(f"model must be one of {MODELS}")
        if not self.stop:
            raise SettingsError("at least one stop condition is required")
        if not self.perEvalTimeLimit > 0:
            raise SettingsError("perEvalTimeLimit must be positive")


_REPEATERS = {
    "quantity": lambda d: Quantity(int(d.get("k", 2))),
    "student": lambda d: Student(int(d.get("max_reps", 10)), float(d.get("rel_ci", 0.05))),
    "model-aware-student": lambda d: ModelAwareStudent(int(d.get("max_reps", 10)), float(d.get("rel_ci", 0.05)),
                                                       float(d.get("relax", 2.0))),
}

_STOPS = {
    "quantity": lambda d, m: QuantityStop(int(d["n"]), m),
    "adaptive": lambda d, m: AdaptiveStop(float(d["fraction"]), m),
    "time": lambda d, m: TimeStop(float(d["seconds"]), m),
    "improvement": lambda d, m: ImprovementStop(int(d.get("n", 50)), m),
    "guaranteed": lambda d, m: GuaranteedStop(m),
}


def settings_from_dict(doc: dict) -> TunerSettings:
    if doc.get("version", SETTINGS_VERSION) != SETTINGS_VERSION:
        raise SettingsError(f"unsupported settings version {doc.get('version')!r}")
    try:
        rep = doc.get("repeater", {"kind": "quantity", "k": 2})
        repeater = _REPEATERS[rep["kind"]](rep)
        stops = tuple(_STOPS[s["kind"]](s, bool(s.get("mandatory", False))) for s in doc.get("stop", ()))
    except KeyError as exc:
        raise SettingsError(f"unknown or incomplete feature: {exc.args[0]!r}") from None
    return TunerSettings(
        selection=doc.get("selection", "sobol"),
        model=doc.get("model", "combined"),
        repeater=repeater,
        stop=stops,
        perEvalTimeLimit=float(doc.get("perEvalTimeLimit", 10.0)),
        productionTimeLimit=float(doc.get("productionTimeLimit", 900.0)),
        seed=int(doc.get("seed", 0)),
        default_configuration=doc.get("defaultConfiguration"),
        virtual_clock=bool(doc.get("virtualClock", False)),
    )


def load_settings(path) -> TunerSettings:
    return settings_from_dict(json.loads(Path(path).read_text()))


# Sobol sampling, regression + Bayesian model, stop after 50 non-improving
# configurations, 2 repetitions each, 10 s per run, 900 s in production.
REFERENCE_SETTINGS = TunerSettings()

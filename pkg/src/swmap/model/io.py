"""Scenario file format (JSON, versioned schema shipped as ``scenario.schema.json``)."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema

from .types import (
    RESOURCE_KINDS,
    ComponentType,
    HardwareComponent,
    Implementation,
    Request,
    Scenario,
    ScenarioError,
    SubRequirement,
)

FORMAT_VERSION = 1


class ScenarioFormatError(ScenarioError):
    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@lru_cache(maxsize=None)
def schema() -> dict:
    text = resources.files("swmap.model").joinpath("scenario.schema.json").read_text()
    return json.loads(text)


def _res(vec):
    return {k.value: v for k, v in zip(RESOURCE_KINDS, vec)}


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "version": FORMAT_VERSION,
        "meta": dict(s.meta),
        "componentTypes": [{"id": t.id, "name": t.name} for t in s.component_types],
        "implementations": [
            {
                "id": i.id,
                "ofType": i.of_type,
                "provides": dict(i.provides),
                "resourceReq": _res(i.resource_req),
                "requires": [
                    {"requiredType": r.required_type, "nfpMin": dict(r.nfp_min), "nfpMax": dict(r.nfp_max)}
                    for r in i.requires
                ],
            }
            for i in s.implementations
        ],
        "hardware": [
            {"id": h.id, "capacities": _res(h.capacities), "energyCoeff": _res(h.energy_coeff)}
            for h in s.hardware
        ],
        "requests": [
            {"id": r.id, "target": r.target, "nfpMin": dict(r.nfp_min), "nfpMax": dict(r.nfp_max)}
            for r in s.requests
        ],
    }


def scenario_from_dict(doc: dict) -> Scenario:
    if isinstance(doc, dict) and "version" in doc and doc["version"] != FORMAT_VERSION:
        raise ScenarioFormatError(f"unsupported scenario format version {doc['version']!r}", "version")
    errors = sorted(jsonschema.Draft202012Validator(schema()).iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = "/".join(str(p) for p in err.absolute_path)
        raise ScenarioFormatError(err.message, path or "<root>")
    types = tuple(ComponentType(t["id"], t.get("name", "")) for t in doc["componentTypes"])
    impls = tuple(
        Implementation.create(
            i["id"], i["ofType"], i.get("provides"), i.get("resourceReq"),
            [SubRequirement.create(r["requiredType"], r.get("nfpMin"), r.get("nfpMax")) for r in i.get("requires", ())],
        )
        for i in doc["implementations"]
    )
    hardware = tuple(HardwareComponent.create(h["id"], h["capacities"], h.get("energyCoeff", {}))
                     for h in doc["hardware"])
    reqs = tuple(Request.create(r["id"], r["target"], r.get("nfpMin"), r.get("nfpMax")) for r in doc["requests"])
    return Scenario(types, impls, hardware, reqs, doc.get("meta", {}))


def dumps(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=1, allow_nan=False) + "\n"


def save_scenario(s: Scenario, path) -> None:
    Path(path).write_text(dumps(s))


def load_scenario(path) -> Scenario:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"not valid JSON: {exc}") from exc
    return scenario_from_dict(doc)

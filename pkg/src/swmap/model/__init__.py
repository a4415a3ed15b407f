"""Problem model: domain types, scenario generator, file format, task decomposition."""

from .generate import SIZE_FAMILIES, Family, GeneratorError, generate_scenario, scaling_family
from .io import ScenarioFormatError, load_scenario, save_scenario, scenario_from_dict, scenario_to_dict
from .tasks import Task, check_acyclic, decompose_tasks, path_from_str, path_to_str
from .types import (
    RESOURCE_KINDS,
    ComponentType,
    HardwareComponent,
    Implementation,
    Request,
    ResourceKind,
    Scenario,
    ScenarioError,
    SubRequirement,
    assignment_energy,
    satisfies,
)

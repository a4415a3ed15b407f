"""Parameter-tuning product line: selection, surrogate model, repeaters, stop conditions, experiment loop."""

from .experiment import ExperimentReport, ExperimentState, measure, run_experiment
from .measure import WORST, Measurement, Sample, objective
from .repeater import ModelAwareStudent, Quantity, Student, half_width, relative_half_width
from .settings import REFERENCE_SETTINGS, TunerSettings, load_settings, settings_from_dict
from .sobol import sobol_point
from .space import Configuration, SearchSpaceDef, SpaceExhausted, random_next, sobol_next
from .stop import AdaptiveStop, GuaranteedStop, ImprovementStop, QuantityStop, TimeStop, evaluate_stop
from .surrogate import Surrogate, fit_and_validate, suggest


def solver_space() -> SearchSpaceDef:
    """The solver's five tunable parameters with their listed values."""
    from ..solver.anneal import PARAMETER_DOMAINS

    return SearchSpaceDef(list(PARAMETER_DOMAINS.items()))

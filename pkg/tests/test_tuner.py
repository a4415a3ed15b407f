import json
import math
import random

import numpy as np
import pytest
from scipy.stats import qmc

from swmap.clock import VirtualClock
from swmap.tuner import (WORST, AdaptiveStop, Configuration, GuaranteedStop, ImprovementStop, Measurement,
                         ModelAwareStudent, Quantity, QuantityStop, Sample, SearchSpaceDef, SpaceExhausted, Student,
                         TimeStop, TunerSettings, evaluate_stop, fit_and_validate, load_settings, objective,
                         relative_half_width, run_experiment, settings_from_dict, sobol_next, sobol_point,
                         solver_space, suggest)
from swmap.tuner.experiment import ExperimentState
from swmap.tuner.settings import SettingsError

# two-sided 95% Student-t quantiles from a printed table, df = 1..9
T_TABLE = {1: 12.706, 2: 4.303, 3: 3.182, 4: 2.776, 5: 2.571, 6: 2.447, 7: 2.365, 8: 2.306, 9: 2.262}


def table_relative_half_width(values):
    n = len(values)
    mean = sum(values) / n
    s = math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1))
    return T_TABLE[n - 1] * s / (math.sqrt(n) * abs(mean))


def measurement(*values, valid=True):
    return Measurement(Configuration.of({"a": 0}), [Sample(valid, v) for v in values])


def small_space(*lengths):
    return SearchSpaceDef([(f"p{d}", list(range(n))) for d, n in enumerate(lengths)])


class TestSpace:
    def test_solver_space_size(self):
        space = solver_space()
        assert space.size == 8 * 8 * 10 * 10 * 8 == 51200
        assert space.dim == 5

    def test_flat_round_trip(self):
        space = small_space(3, 4, 5)
        assert [space.unflat(space.flat(ix)) for ix in space.all_indices()] == list(space.all_indices())
        assert [space.flat(ix) for ix in space.all_indices()] == list(range(space.size))

    def test_rejects_bad_definitions(self):
        with pytest.raises(ValueError):
            SearchSpaceDef([("a", [1]), ("a", [2])])
        with pytest.raises(ValueError):
            SearchSpaceDef([("a", [])])

    def test_sobol_matches_reference_sets(self):
        for m in (4, 8):
            ref = {tuple(p) for p in qmc.Sobol(5, scramble=False).random(2 ** m)}
            assert {tuple(sobol_point(k, 5)) for k in range(2 ** m)} == ref

    def test_sobol_first_point_is_middle(self):
        space = solver_space()
        config, used = sobol_next(space, 1)
        assert used == 1
        assert space.indices(config) == tuple(n // 2 for n in space.lengths)

    def test_sobol_two_values(self):
        space = small_space(2)
        first, k = sobol_next(space, 1)
        second, _ = sobol_next(space, k + 1, {space.indices(first)})
        assert {first["p0"], second["p0"]} == {0, 1}

    def test_sobol_skips_measured(self):
        space = small_space(4, 4)
        first, k = sobol_next(space, 1)
        again, k2 = sobol_next(space, 1, {space.indices(first)})
        assert again != first and k2 > k

    def test_exhausted(self):
        space = small_space(2)
        with pytest.raises(SpaceExhausted):
            sobol_next(space, 1, {(0,), (1,)})
        with pytest.raises(ValueError):
            sobol_next(space, 0)


class TestObjective:
    def test_mean_of_valid(self):
        assert objective([Sample(True, 1000), Sample(True, 1100)]) == 1050

    def test_mixed(self):
        samples = [Sample(True, 900), Sample(False, 50)]
        assert objective(samples) == 900
        assert objective(samples) == sum(s.soft for s in samples if s.valid) / 1

    def test_all_invalid(self):
        assert objective([Sample(False, 3), Sample.failure()]) == WORST

    def test_empty(self):
        with pytest.raises(ValueError):
            objective([])


class TestRepeater:
    def test_quantity(self):
        assert not Quantity(2).decide(measurement(10))
        assert Quantity(2).decide(measurement(10, 11))

    def test_student_examples(self):
        assert Student(10, 0.05).decide(measurement(10, 10))
        rel = relative_half_width([10, 20])
        assert rel == pytest.approx(table_relative_half_width([10, 20]), rel=1e-4)
        assert rel == pytest.approx(4.24, abs=0.005)
        assert not Student(10, 0.05).decide(measurement(10, 20))

    def test_student_single_sample_continues(self):
        assert not Student(10, 0.05).decide(measurement(10))

    def test_student_max_reps(self):
        assert Student(3, 1e-9).decide(measurement(1, 5, 9))

    def test_student_zero_mean_uses_absolute_width(self):
        assert relative_half_width([-1, 1]) == pytest.approx(12.706 * math.sqrt(2) / math.sqrt(2), rel=1e-4)

    def test_student_all_invalid_stops(self):
        assert Student(10, 0.05).decide(measurement(1, 2, valid=False))

    def test_model_aware_relaxes(self):
        space = small_space(4)

        class Fake:
            def predict(self, ix):
                return np.array([100.0])

        state = ExperimentState(space, TunerSettings(), VirtualClock())
        state.surrogate, state.best_objective = Fake(), 1.0
        m = Measurement(space.config((3,)), [Sample(True, 100), Sample(True, 104)])
        rel = relative_half_width([100, 104])
        assert 0.05 < rel <= 0.5
        assert not Student(10, 0.05).decide(m, state)
        assert ModelAwareStudent(10, 0.05, relax=10).decide(m, state)
        state.best_objective = 1000.0
        assert not ModelAwareStudent(10, 0.05, relax=10).decide(m, state)


class TestStop:
    def state(self, space=None, **kw):
        st = ExperimentState(space or small_space(10), TunerSettings(), VirtualClock())
        for k, v in kw.items():
            setattr(st, k, v)
        return st

    def test_improvement_fires_on_fiftieth(self):
        st = self.state(space=small_space(100))
        st.record((0,), measurement(10))
        for i in range(1, 51):
            st.record((i,), measurement(20))
            fired = evaluate_stop((ImprovementStop(50),), st)
            assert (fired is not None) == (i == 50)

    def test_improvement_resets(self):
        st = self.state(space=small_space(100))
        st.record((0,), measurement(10))
        for i in range(1, 49):
            st.record((i,), measurement(20))
        st.record((49,), measurement(5))
        assert st.configs_since_improvement == 0

    def test_adaptive_full(self):
        space = small_space(4)
        st = self.state(space=space)
        for i in range(4):
            assert evaluate_stop((AdaptiveStop(1.0),), st) is None
            st.record((i,), measurement(i + 1))
        assert evaluate_stop((AdaptiveStop(1.0),), st) == "adaptive"

    def test_guaranteed_needs_default(self):
        st = self.state()
        st.record((0,), measurement(10))
        assert evaluate_stop((GuaranteedStop(),), st) is None
        st.default_objective = 10
        assert evaluate_stop((GuaranteedStop(),), st) is None
        st.record((1,), measurement(10))
        assert evaluate_stop((GuaranteedStop(),), st) is None
        st.record((2,), measurement(9))
        assert evaluate_stop((GuaranteedStop(),), st) == "guaranteed"

    def test_time_zero(self):
        assert evaluate_stop((TimeStop(0),), self.state()) == "time"

    def test_composition(self):
        st = self.state()
        st.record((0,), measurement(1))
        gate = GuaranteedStop(mandatory=True)
        assert evaluate_stop((gate, QuantityStop(1)), st) is None
        st.default_objective = 2
        assert evaluate_stop((gate, QuantityStop(1)), st) == "guaranteed+quantity"
        assert evaluate_stop((QuantityStop(5), QuantityStop(1)), st) == "quantity"


class TestSurrogate:
    def test_too_few(self):
        space = small_space(5, 5)
        assert fit_and_validate({(i, 0): float(i) for i in range(5)}, space) is None

    def test_quadratic_validated(self):
        space = small_space(8, 8, 8)
        rng = random.Random(1)
        pts = rng.sample(list(space.all_indices()), 50)

        def f(ix):
            x = np.asarray(ix, dtype=float) / 7
            return 3 + 2 * x[0] - x[1] + 4 * x[2] ** 2 + 1.5 * x[0] * x[1]

        train, held = pts[:40], pts[40:]
        sur = fit_and_validate({k: f(k) for k in train}, space)
        assert sur is not None and sur.r2 > 0.999
        assert np.allclose(sur.predict(held), [f(k) for k in held], atol=1e-9)

    def test_noise_rarely_validated(self):
        space = solver_space()
        passed = 0
        for seed in range(100):
            rng = random.Random(seed)
            keys = [space.unflat(k) for k in rng.sample(range(space.size), 40)]
            passed += fit_and_validate({k: rng.gauss(0, 1) for k in keys}, space) is not None
        assert passed < 10

    def test_last_remaining(self):
        space = small_space(3, 3)
        measured = {ix: float(sum(ix)) for ix in space.all_indices() if ix != (2, 1)}
        sur = fit_and_validate(measured, space, min_samples=5)
        for variant in ("regression", "bayesian", "combined"):
            assert suggest(space, measured, sur, variant) == (2, 1)

    def test_suggestion_is_promising_and_deterministic(self):
        space = small_space(10, 10, 10)

        def f(ix):
            return (ix[0] - 7) ** 2 + (ix[1] - 2) ** 2 + 0.5 * (ix[2] - 5) ** 2

        rng = random.Random(3)
        keys = rng.sample(list(space.all_indices()), 30)
        measured = {k: float(f(k)) for k in keys}
        sur = fit_and_validate(measured, space)
        assert sur is not None
        pick = suggest(space, measured, sur, "combined")
        assert pick not in measured
        assert float(sur.predict(pick)[0]) <= float(np.median(list(measured.values())))
        assert suggest(space, measured, sur, "combined") == pick


class TestExperiment:
    def test_single_point(self):
        space = SearchSpaceDef([("a", [1]), ("b", ["x"])])
        best, report = run_experiment(TunerSettings(virtual_clock=True), space, lambda c, r: Sample(True, 5.0))
        assert best == Configuration.of({"a": 1, "b": "x"})
        assert report.configurations == 1 and report.stop_reason == "space exhausted"

    def test_quantity_stop_count(self):
        space = small_space(6, 6)
        settings = TunerSettings(stop=(QuantityStop(7),), repeater=Quantity(1), virtual_clock=True)
        _, report = run_experiment(settings, space, lambda c, r: Sample(True, float(c["p0"] + c["p1"])))
        assert report.configurations == 7 and report.evaluations == 7

    def test_no_duplicates_and_monotone_best(self):
        space = small_space(5, 5, 4)
        settings = TunerSettings(stop=(AdaptiveStop(1.0),), repeater=Quantity(1), virtual_clock=True)
        seen = []

        def ev(c, r):
            seen.append(c)
            return Sample(True, float((c["p0"] - 3) ** 2 + c["p1"] * c["p2"]))

        best, report = run_experiment(settings, space, ev)
        assert len(seen) == len(set(seen)) == space.size
        assert all(space.contains(c) for c in seen)
        running = math.inf
        for row in report.rows:
            running = min(running, row["mean"])
        assert report.best_objective == running == 0.0

    def test_failures_recorded(self):
        space = small_space(4)

        def ev(c, r):
            if c["p0"] == 2:
                raise RuntimeError("solver crashed")
            return Sample(True, float(c["p0"]) + 1)

        settings = TunerSettings(stop=(AdaptiveStop(1.0),), repeater=Quantity(2), virtual_clock=True)
        best, report = run_experiment(settings, space, ev)
        failed = [row for row in report.rows if row["values"] == (2,)]
        assert failed and failed[0]["mean"] == WORST and not failed[0]["valid"]
        assert best["p0"] == 0

    def test_report_deterministic(self):
        space = small_space(6, 6, 6)

        def ev(c, r):
            return Sample(True, float(abs(c["p0"] - 2) + abs(c["p1"] - 4) + c["p2"] + 0.1 * r))

        settings = TunerSettings(stop=(ImprovementStop(10),), seed=4, virtual_clock=True)
        a = run_experiment(settings, space, ev)[1].to_csv()
        b = run_experiment(settings, space, ev)[1].to_csv()
        assert a == b
        assert a.startswith("iteration,p0,p1,p2,repetitions,mean_objective,valid,elapsed_s,source\n")

    def test_virtual_elapsed(self):
        space = small_space(4)
        settings = TunerSettings(stop=(QuantityStop(3),), repeater=Quantity(2), perEvalTimeLimit=10,
                                 virtual_clock=True)
        _, report = run_experiment(settings, space, lambda c, r: Sample(True, 1.0))
        assert report.wall_time == 60.0

    def test_default_measured_first(self):
        space = small_space(5, 5)
        settings = TunerSettings(stop=(GuaranteedStop(),), repeater=Quantity(1), virtual_clock=True,
                                 default_configuration={"p0": 4, "p1": 4})
        best, report = run_experiment(settings, space, lambda c, r: Sample(True, float(c["p0"] + c["p1"])))
        assert report.rows[0]["source"] == "default"
        assert report.stop_reason == "guaranteed" and report.best_objective < 8


class TestSettings:
    def test_defaults_mirror_reference_experiment(self):
        s = TunerSettings()
        assert (s.selection, s.repeater, s.perEvalTimeLimit, s.productionTimeLimit) == ("sobol", Quantity(2), 10, 900)
        assert s.stop == (ImprovementStop(50),)

    def test_from_file(self, tmp_path):
        doc = {"version": 1, "selection": "random", "model": "bayesian",
               "repeater": {"kind": "student", "max_reps": 5, "rel_ci": 0.1},
               "stop": [{"kind": "quantity", "n": 30}, {"kind": "guaranteed", "mandatory": True}],
               "perEvalTimeLimit": 2, "seed": 9}
        (tmp_path / "s.json").write_text(json.dumps(doc))
        s = load_settings(tmp_path / "s.json")
        assert s.repeater == Student(5, 0.1)
        assert s.stop == (QuantityStop(30), GuaranteedStop(True))
        assert (s.selection, s.model, s.perEvalTimeLimit, s.seed) == ("random", "bayesian", 2.0, 9)

    @pytest.mark.parametrize("doc", [
        {"stop": []},
        {"stop": [{"kind": "nope"}]},
        {"selection": "fedorov", "stop": [{"kind": "quantity", "n": 1}]},
        {"version": 2, "stop": [{"kind": "quantity", "n": 1}]},
        {"perEvalTimeLimit": 0, "stop": [{"kind": "quantity", "n": 1}]},
    ])
    def test_rejects(self, doc):
        with pytest.raises(SettingsError):
            settings_from_dict(doc)

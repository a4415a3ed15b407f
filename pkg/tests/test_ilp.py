import random

import pytest

from oracles import all_assignments, as_allocation, count_assignments, enumerate_optimum, random_scenario
from swmap.clock import VirtualClock
from swmap.ilp import BUDGET, INFEASIBLE, build_ilp, exact_solve, export_lp, parse_lp, to_lp
from swmap.model import (SIZE_FAMILIES, ComponentType, HardwareComponent, Implementation, Request, Scenario,
                         SubRequirement, decompose_tasks, generate_scenario, satisfies, scaling_family)
from swmap.solver import Score, is_valid, score

KINDS = ("cpu", "ram", "disk", "network")


def chain(n_hw, length=4):
    types = tuple(ComponentType(f"C{i}") for i in range(length))
    impls = tuple(Implementation.create(f"c{i}", f"C{i}", {}, {"cpu": 1},
                                        [SubRequirement.create(f"C{i + 1}")] if i + 1 < length else [])
                  for i in range(length))
    hws = tuple(HardwareComponent.create(f"H{h}", {k: 8 for k in KINDS}, {k: 1 for k in KINDS})
                for h in range(n_hw))
    return Scenario(types, impls, hws, (Request.create("R0", "C0"),))


def expected_vars(scenario):
    """Variable count from the model layer: tasks times compatible implementations times hardware."""
    total = 0
    for t in decompose_tasks(scenario):
        impls = scenario.impls_by_type[t.component_type]
        if t.is_root:
            impls = [i for i in impls if satisfies(i.provides, t.nfp_min, t.nfp_max)]
        total += len(impls) * len(scenario.hardware)
    return total


def ilp_feasible(model, scenario, rows) -> bool:
    """Check a complete assignment against every row of the model."""
    task_of = {(t.request_id, t.slot_path): t.index for t in decompose_tasks(scenario)}
    impl_pos = {i.id: k for k, i in enumerate(scenario.implementations)}
    hw_pos = {h.id: k for k, h in enumerate(scenario.hardware)}
    index = {(v.task, v.impl, v.hw): k for k, v in enumerate(model.variables)}
    x = [0] * model.n_vars
    for rid, path, impl, h in rows:
        k = index.get((task_of[(rid, path)], impl_pos[impl], hw_pos[h]))
        if k is None:
            return False  # pruned by the request's bounds
        x[k] = 1
    for con in model.constraints:
        lhs = sum(c * x[k] for k, c in con.terms)
        if con.sense == "=" and abs(lhs - con.rhs) > 1e-9:
            return False
        if con.sense == "<=" and lhs > con.rhs + 1e-9:
            return False
    return True


class TestBuild:
    def test_trivial(self):
        s = SIZE_FAMILIES[0].generate(0)
        model, _ = build_ilp(s)
        assert model.n_vars == 1
        opt = exact_solve(s)
        assert model.objective == [opt.objective]

    def test_count_formula_chain(self):
        model, _ = build_ilp(chain(64))
        assert model.n_vars == 4 * 1 * 64

    def test_count_formula_random(self):
        rng = random.Random(9)
        for _ in range(40):
            s = random_scenario(rng, max_hw=4)
            assert build_ilp(s)[0].n_vars == expected_vars(s)
        for fam in SIZE_FAMILIES[:7]:
            s = fam.generate(0)
            assert build_ilp(s)[0].n_vars == expected_vars(s)

    def test_doubling_hardware(self):
        small, _ = build_ilp(scaling_family(64).generate(0))
        big, _ = build_ilp(scaling_family(128).generate(0))
        assert big.n_vars == 2 * small.n_vars
        assert len(big.rows("cap_")) >= 2 * len(small.rows("cap_"))

    def test_rows_accept_exactly_valid_assignments(self):
        rng = random.Random(4)
        checked = 0
        for _ in range(60):
            s = random_scenario(rng, max_types=3, max_impls=2, max_hw=2)
            if count_assignments(s) > 3000:
                continue
            model, _ = build_ilp(s)
            for rows in all_assignments(s):
                assert ilp_feasible(model, s, rows) == is_valid(s, as_allocation(rows))
                checked += 1
        assert checked > 500

    def test_virtual_generation_time(self):
        s = scaling_family(64).generate(0)
        model, secs = build_ilp(s, VirtualClock(rate=1000.0))
        assert secs == (model.n_vars + model.n_nonzeros) / 1000.0


class TestLpFile:
    def test_trivial_file(self, tmp_path):
        model, _ = build_ilp(SIZE_FAMILIES[0].generate(0))
        export_lp(model, tmp_path / "m.lp")
        parsed = parse_lp((tmp_path / "m.lp").read_text())
        assert len(parsed["binaries"]) == 1

    def test_byte_stable(self, tmp_path):
        model, _ = build_ilp(SIZE_FAMILIES[3].generate(0))
        export_lp(model, tmp_path / "a.lp")
        export_lp(build_ilp(SIZE_FAMILIES[3].generate(0))[0], tmp_path / "b.lp")
        assert (tmp_path / "a.lp").read_bytes() == (tmp_path / "b.lp").read_bytes()

    def test_parse_round_trip(self):
        model, _ = build_ilp(SIZE_FAMILIES[1].generate(0))
        parsed = parse_lp(to_lp(model))
        names = [v.name for v in model.variables]
        assert parsed["binaries"] == names
        assert parsed["objective"] == {n: c for n, c in zip(names, model.objective) if c}
        assert len(parsed["rows"]) == model.n_rows
        for row, con in zip(parsed["rows"], model.constraints):
            assert row["name"] == con.name
            assert row["sense"] == con.sense and row["rhs"] == con.rhs
            assert row["terms"] == {names[k]: c for k, c in con.terms}

    def test_unwritable(self, tmp_path):
        model, _ = build_ilp(SIZE_FAMILIES[0].generate(0))
        with pytest.raises(OSError):
            export_lp(model, tmp_path / "missing" / "m.lp")


class TestExact:
    def test_trivial(self):
        sol = exact_solve(SIZE_FAMILIES[0].generate(0))
        assert sol.provedOptimal and len(sol.assignment) == 1

    def test_empty(self):
        sol = exact_solve(generate_scenario(0, 1, 1, 1, seed=0))
        assert sol.provedOptimal and sol.assignment == {} and sol.objective == 0

    def test_infeasible_is_not_budget(self):
        types = (ComponentType("A"),)
        impls = (Implementation.create("a", "A", {}, {"cpu": 5}),)
        hws = (HardwareComponent.create("H0", {k: 1 for k in KINDS}, {k: 1 for k in KINDS}),)
        sol = exact_solve(Scenario(types, impls, hws, (Request.create("R", "A"),)))
        assert sol.status == INFEASIBLE and not sol.feasible

    def test_budget(self):
        sol = exact_solve(SIZE_FAMILIES[3].generate(0), nodeBudget=10)
        assert sol.status == BUDGET and not sol.provedOptimal

    def test_matches_enumeration(self):
        rng = random.Random(21)
        done = 0
        while done < 25:
            s = random_scenario(rng)
            if count_assignments(s) > 5000:
                continue
            best, _ = enumerate_optimum(s)
            sol = exact_solve(s)
            assert sol.objective == best
            if best is not None:
                assert sol.provedOptimal
                assert score(sol.to_allocation(s), s) == Score(0, best)
            done += 1

    def test_known_optima(self):
        optima = [exact_solve(f.generate(0)).objective for f in SIZE_FAMILIES[:4]]
        assert optima == [69.0, 113.0, 82.0, 207.0]

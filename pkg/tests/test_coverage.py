import random
from dataclasses import replace

import pytest

from analysis.cmd_graph import build_cmd
from analysis.coverage import (
    CoverageEvaluator,
    CoverageReport,
    Criterion,
    boundary_interior,
    complete_path_coverage,
    evaluate_all,
    map_traces,
    message_coverage,
    method_coverage,
    poly_message_coverage,
)
from conftest import m
from dsl.model_parser import parse_model
from dsl.trace_parser import parse_traces
from model_factory import random_model, random_traces
from models.errors import CycleCapExceeded, CyclicCmdError, PathCapExceeded, TraceMismatch
from models.trace import TraceStore


class TestFig5:
    def test_element_criteria(self, fig5_cmd, fig5_traces):
        covered = map_traces(fig5_cmd, fig5_traces)
        assert covered.methods == frozenset({m("A.aMethod"), m("B.aMethod")})
        report = method_coverage(fig5_cmd, covered)
        assert (report.covered, report.required) == (2, 4)
        assert report.uncovered == ["A.<init>", "B.<init>"]
        assert message_coverage(fig5_cmd, covered).summary() == "message 1/1 1.0000"
        assert poly_message_coverage(fig5_cmd, covered).summary() == "poly-message 3/3 1.0000"

    def test_site_selects_edge(self, fig5_cmd, fig5_traces):
        covered = map_traces(fig5_cmd, [fig5_traces.get("t_super")])
        assert [str(e) for e in covered.edges] == ["B.aMethod#0 -> A.aMethod (super)"]

    def test_boundary_interior(self, fig5_cmd, fig5_traces):
        report = boundary_interior(fig5_cmd, fig5_traces)
        assert (report.covered, report.required) == (5, 6)
        assert report.uncovered == ["cycle B.aMethod -> B.aMethod x2+"]
        assert report.ratio == pytest.approx(5 / 6)

    def test_traversals(self, fig5_cmd, fig5_traces):
        evaluator = CoverageEvaluator(fig5_cmd)
        assert evaluator.simple_cycles() == [(m("B.aMethod"),)]
        assert evaluator.traversals(fig5_traces.get("t_typed"), (m("B.aMethod"),)) == 1
        assert evaluator.traversals(fig5_traces.get("t_super"), (m("B.aMethod"),)) == 0

    def test_repeated_recursion_meets_interior(self, fig5_cmd, fig5_model):
        traces = parse_traces("""
            test deep
            enter B.aMethod
            enter B.aMethod site=1
            enter B.aMethod site=1
            exit
            exit
            exit
        """, fig5_model)
        report = boundary_interior(fig5_cmd, traces)
        assert "cycle B.aMethod -> B.aMethod x2+" not in report.uncovered
        assert "cycle B.aMethod -> B.aMethod x0" in report.uncovered

    def test_complete_path_needs_acyclic_graph(self, fig5_cmd, fig5_traces):
        with pytest.raises(CyclicCmdError) as info:
            complete_path_coverage(fig5_cmd, fig5_traces)
        assert info.value.component == ["B.aMethod"]

    def test_evaluate_all_skips_complete_path(self, fig5_cmd, fig5_traces):
        reports = evaluate_all(fig5_cmd, fig5_traces)
        assert [r.criterion for r in reports] == [
            Criterion.METHOD, Criterion.MESSAGE, Criterion.POLY_MESSAGE, Criterion.BOUNDARY_INTERIOR]


class TestMediator:
    def test_all_criteria(self, mediator_cmd, mediator_traces):
        summaries = [r.summary() for r in evaluate_all(mediator_cmd, mediator_traces)]
        assert summaries == [
            "method 5/10 0.5000",
            "message 3/3 1.0000",
            "poly-message 3/4 0.7500",
            "boundary-interior 3/4 0.7500",
            "complete-path 3/4 0.7500",
        ]

    def test_maximal_paths(self, mediator_cmd):
        paths = CoverageEvaluator(mediator_cmd).maximal_paths()
        assert [[str(e.dst) for e in path] for path in paths] == [
            ["ListBox.<init>"],
            ["EntryField.<init>"],
            ["DialogDirector.WidgetChanged"],
            ["FontDialogDirector.WidgetChanged"],
        ]

    def test_uncovered_path(self, mediator_cmd, mediator_traces):
        report = complete_path_coverage(mediator_cmd, mediator_traces)
        assert report.uncovered == ["Widget.Changed#0 -> DialogDirector.WidgetChanged"]

    def test_path_cap(self, mediator_cmd, mediator_traces):
        with pytest.raises(PathCapExceeded):
            complete_path_coverage(mediator_cmd, mediator_traces, path_cap=3)


def test_cycle_cap():
    cmd = build_cmd(parse_model("class A { method p { call self.p } method q { call self.q } }"))
    assert len(CoverageEvaluator(cmd, cycle_cap=2).simple_cycles()) == 2
    with pytest.raises(CycleCapExceeded) as info:
        CoverageEvaluator(cmd, cycle_cap=1).simple_cycles()
    assert info.value.cap == 1


class TestTraceMismatch:
    def test_unknown_method(self, fig5_cmd):
        traces = parse_traces("test t\nenter Nope.m\nexit\n")
        with pytest.raises(TraceMismatch, match="test t"):
            map_traces(fig5_cmd, traces)

    def test_call_without_edge(self, fig5_cmd):
        traces = parse_traces("test t\nenter A.aMethod\nenter B.aMethod\nexit\nexit\n")
        with pytest.raises(TraceMismatch) as info:
            map_traces(fig5_cmd, traces)
        assert str(info.value.call) == "A.aMethod -> B.aMethod"

    def test_wrong_site(self, fig5_cmd):
        traces = parse_traces("test t\nenter B.aMethod\nenter B.aMethod site=0\nexit\nexit\n")
        with pytest.raises(TraceMismatch):
            map_traces(fig5_cmd, traces)


def test_empty_requirements_count_as_complete():
    report = CoverageReport(criterion=Criterion.MESSAGE, covered=0, required=0)
    assert report.ratio == 1.0
    assert report.complete


def test_criteria_subsume_on_random_traces():
    rng = random.Random(11)
    checked = 0
    for index in range(100):
        cmd = build_cmd(random_model(rng, model_id=f"r{index}"))
        traces = random_traces(rng, cmd)
        evaluator = CoverageEvaluator(cmd, cycle_cap=2000, path_cap=2000)
        covered = evaluator.map_traces(traces)
        poly = evaluator.poly_message_coverage(covered)
        message = evaluator.message_coverage(covered)
        try:
            boundary = evaluator.boundary_interior(traces)
        except CycleCapExceeded:
            boundary = None
        if boundary is not None:
            assert boundary.required >= poly.required
            if boundary.complete:
                assert poly.complete
        if poly.complete:
            assert message.complete
            checked += 1
        try:
            if evaluator.complete_path_coverage(traces).complete:
                assert poly.complete or not evaluator.maximal_paths()
        except (CyclicCmdError, PathCapExceeded):
            pass
    assert checked > 0


def test_more_traces_never_lower_coverage():
    rng = random.Random(5)
    compared = 0
    for index in range(60):
        cmd = build_cmd(random_model(rng, model_id=f"c{index}"))
        first = random_traces(rng, cmd, tests=3)
        combined = TraceStore(model_id=cmd.source_model_id)
        for record in first:
            combined.add(record)
        for record in random_traces(rng, cmd, tests=3):
            combined.add(replace(record, test_id=f"extra-{record.test_id}"))
        evaluator = CoverageEvaluator(cmd, cycle_cap=2000, path_cap=2000)
        for criterion in Criterion:
            try:
                before = evaluator.evaluate(criterion, first)
                after = evaluator.evaluate(criterion, combined)
            except (CycleCapExceeded, CyclicCmdError, PathCapExceeded):
                continue
            assert after.required == before.required
            assert after.covered >= before.covered
            assert after.ratio >= before.ratio
            compared += 1
    assert compared > 0

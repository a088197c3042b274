import random

import networkx as nx

from analysis.change_analysis import ImpactAnalyzer, impact
from analysis.cmd_graph import build_cmd, collapse_parallel
from analysis.test_strategy import TOP_DOWN, Scope, generate_strategy, scc_members, validate_order
from conftest import m
from dsl.model_parser import parse_model
from model_factory import mutate_model, random_model

PING_PONG = """
class A { method ping { call B.pong } }
class B { method pong { call A.ping } }
"""


def test_mediator_full_order(mediator_cmd):
    strategy = generate_strategy(mediator_cmd)
    assert strategy.scope is Scope.ALL
    assert strategy.lines() == [
        "level 0: DialogDirector.<init>",
        "level 0: EntryField.<init>",
        "level 0: FontDialogDirector.<init>",
        "level 0: ListBox.<init>",
        "level 0: Widget.<init>",
        "level 0: DialogDirector.CreateWidgets",
        "level 0: DialogDirector.WidgetChanged",
        "level 1: FontDialogDirector.CreateWidgets",
        "level 2: FontDialogDirector.WidgetChanged",
        "level 3: Widget.Changed",
    ]
    assert strategy.level_of(m("Widget.Changed")) == 3
    assert validate_order(strategy, mediator_cmd) == []


def test_mediator_impacted_order(mediator_model, mediator_v2_model):
    analyzer = ImpactAnalyzer(mediator_model, mediator_v2_model)
    impacted = impact(analyzer.cmd_new, analyzer.diff())
    strategy = generate_strategy(analyzer.cmd_new, impacted)
    assert strategy.scope is Scope.IMPACTED
    assert strategy.lines() == [
        "level 0: FontDialogDirector.WidgetChanged",
        "level 1: Widget.Changed",
    ]
    top_down = generate_strategy(analyzer.cmd_new, impacted, top_down=True)
    assert top_down.direction == TOP_DOWN
    assert top_down.flatten() == [m("Widget.Changed"), m("FontDialogDirector.WidgetChanged")]
    assert validate_order(top_down, analyzer.cmd_new) == []


def test_cycle_is_broken_by_one_stub():
    cmd = build_cmd(parse_model(PING_PONG))
    strategy = generate_strategy(cmd)
    assert strategy.lines() == [
        "level 0: A.<init>",
        "level 0: B.<init>",
        "level 0: component {A.ping, B.pong}",
        "  stub A.ping#0 -> B.pong",
    ]
    assert strategy.flatten() == [m("A.<init>"), m("B.<init>"), m("A.ping"), m("B.pong")]
    assert [str(s) for s in strategy.stub_edges()] == ["A.ping#0 -> B.pong"]
    assert validate_order(strategy, cmd) == []


def test_self_loop_stub(fig5_cmd):
    strategy = generate_strategy(fig5_cmd)
    assert strategy.lines()[-2:] == ["level 1: component {B.aMethod}", "  stub B.aMethod#1 -> B.aMethod"]


def test_out_of_order_strategy_is_reported(mediator_cmd):
    strategy = generate_strategy(mediator_cmd)
    reversed_levels = type(strategy)(levels=tuple(reversed(strategy.levels)))
    problems = validate_order(reversed_levels, mediator_cmd)
    assert any(p.startswith("Widget.Changed depends on FontDialogDirector.WidgetChanged") for p in problems)


def test_empty_model():
    strategy = generate_strategy(build_cmd(parse_model("")))
    assert strategy.levels == ()
    assert strategy.lines() == []


def _assert_minimal(cmd, strategy):
    g = collapse_parallel(cmd)
    components = scc_members(cmd)
    for level in strategy.levels:
        for item in level:
            if item.stub_plan is None:
                continue
            component = next(c for c in components if item.members[0] in c)
            sub = g.subgraph(component).copy()
            sub.remove_edges_from(item.stub_plan.removed)
            assert nx.is_directed_acyclic_graph(sub)
            for edge in item.stub_plan.removed:
                sub.add_edge(*edge)
                assert not nx.is_directed_acyclic_graph(sub)
                sub.remove_edge(*edge)


def test_random_strategies_are_valid_and_minimal():
    rng = random.Random(99)
    for index in range(200):
        old = random_model(rng, model_id=f"r{index}")
        cmd = build_cmd(old)
        strategy = generate_strategy(cmd)
        assert validate_order(strategy, cmd) == []
        assert sorted(strategy.flatten(), key=cmd.node_key) == cmd.method_nodes
        _assert_minimal(cmd, strategy)

        analyzer = ImpactAnalyzer(old, mutate_model(rng, old))
        impacted = impact(analyzer.cmd_new, analyzer.diff())
        scoped = generate_strategy(analyzer.cmd_new, impacted)
        assert validate_order(scoped, analyzer.cmd_new) == []
        assert set(scoped.flatten()) == set(impacted.methods)

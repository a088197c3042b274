"""
End-to-end checks on the bundled fixtures.
"""

import os
import subprocess
import sys
from pathlib import Path

import pytest
from click.testing import CliRunner

from analysis import IncrementPipeline
from analysis.cmd_graph import EdgeLabel
from analysis.test_strategy import generate_strategy
from cli import cli
from cli.report import stats
from config.config import Config
from conftest import fixture_path, m


def test_mediator_increment(mediator_model, mediator_v2_model, mediator_traces):
    result = IncrementPipeline(Config(), mediator_model, mediator_v2_model).run(mediator_traces)
    assert result.impact.methods == frozenset({m("FontDialogDirector.WidgetChanged"), m("Widget.Changed")})
    assert len(result.impacted_classes) == 5
    assert result.reduction >= 0.8
    assert result.selection.rerun == ["t_font_change"]


def test_mediator_changed_specs(mediator_model, mediator_v2_model, mediator_traces):
    result = IncrementPipeline(Config(), mediator_model, mediator_v2_model).run(
        mediator_traces, changed_specs=["font-dialog"], top_down=True)
    assert result.selection.obsolete == ["t_create", "t_font_change"]
    assert result.strategy.flatten()[0] == m("Widget.Changed")


def test_fig5_counts(fig5_cmd):
    assert len(fig5_cmd.method_nodes) == 4
    assert len(fig5_cmd.data_nodes) == 2
    counts = {label: len(fig5_cmd.edges_labeled(label)) for label in EdgeLabel}
    assert counts == {
        EdgeLabel.INHERITANCE: 1,
        EdgeLabel.SUPER: 1,
        EdgeLabel.MESSAGE: 2,
        EdgeLabel.SELF: 0,
        EdgeLabel.USES: 1,
        EdgeLabel.DEF: 3,
    }


def test_vending_decays_at_method_level(vending_model):
    result = stats(vending_model)
    assert result.class_level.strong_components == 1
    assert result.cmd_level.strong_components == 0


def test_constructor_and_override_order(mediator_cmd):
    order = generate_strategy(mediator_cmd).flatten()
    position = {node: index for index, node in enumerate(order)}
    for selector in ("CreateWidgets", "WidgetChanged"):
        assert position[m(f"DialogDirector.{selector}")] < position[m(f"FontDialogDirector.{selector}")]
    for node in order:
        ctor = m(f"{node.class_name}.<init>")
        if node != ctor:
            assert position[ctor] < position[node]
    assert order[:5] == [m(f"{name}.<init>") for name in
                         ("DialogDirector", "EntryField", "FontDialogDirector", "ListBox", "Widget")]


COMMANDS = [
    ("build", "fig5.mdl"),
    ("build", "mediator.mdl"),
    ("build", "vending.mdl"),
    ("diff", "mediator.mdl", "mediator_v2.mdl"),
    ("impact", "mediator.mdl", "mediator_v2.mdl", "--class-level"),
    ("order", "fig5.mdl"),
    ("order", "vending.mdl"),
    ("order", "mediator_v2.mdl", "--impacted-from", "mediator.mdl"),
    ("coverage", "fig5.mdl", "fig5.trc", "--criterion", "all"),
    ("coverage", "mediator.mdl", "mediator.trc", "--criterion", "all"),
    ("select", "mediator.mdl", "mediator_v2.mdl", "mediator.trc"),
    ("stats", "vending.mdl"),
    ("stats", "mediator.mdl"),
    ("increment", "mediator.mdl", "mediator_v2.mdl", "mediator.trc"),
]


@pytest.mark.parametrize("command", COMMANDS, ids=lambda c: " ".join(c))
def test_cli_output_is_byte_identical(command):
    args = [str(fixture_path(a)) if a.endswith((".mdl", ".trc")) else a for a in command]
    outputs = [CliRunner().invoke(cli, args).output for _ in range(3)]
    assert outputs[0]
    assert outputs[0] == outputs[1] == outputs[2]


@pytest.mark.parametrize("command", [
    ("order", "vending.mdl"),
    ("coverage", "mediator.mdl", "mediator.trc", "--criterion", "all"),
    ("increment", "mediator.mdl", "mediator_v2.mdl", "mediator.trc"),
], ids=lambda c: c[0])
def test_cli_output_ignores_hash_seed(command):
    root = Path(__file__).resolve().parent.parent
    args = [str(fixture_path(a)) if a.endswith((".mdl", ".trc")) else a for a in command]
    outputs = []
    for seed in ("0", "1", "12345"):
        env = {**os.environ, "PYTHONHASHSEED": seed}
        for name in ("CMDKIT_CYCLE_CAP", "CMDKIT_PATH_CAP", "CMDKIT_LOG_LEVEL", "CMDKIT_FORMAT"):
            env.pop(name, None)
        done = subprocess.run([sys.executable, "main.py", *args], cwd=root, env=env,
                              capture_output=True, text=True, check=True)
        outputs.append(done.stdout)
    assert outputs[0]
    assert outputs[0] == outputs[1] == outputs[2]

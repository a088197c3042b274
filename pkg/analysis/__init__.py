import logging
from dataclasses import dataclass
from typing import Iterable, Optional

from config.config import Config
from models.program_model import ProgramModel, synthesize_default_constructors
from models.trace import TraceStore

from .change_analysis import ChangeSet, ImpactAnalyzer, ImpactSet, class_level_impact, impact, methods_in_classes, reduction_ratio
from .cmd_graph import ClassMessageDiagram, build_cmd
from .regression_select import SelectionResult, TestSelector
from .test_strategy import TestStrategy, generate_strategy


@dataclass
class IncrementResult:
    changes: ChangeSet
    impact: ImpactSet
    impacted_classes: frozenset
    reduction: float
    strategy: TestStrategy
    selection: Optional[SelectionResult] = None


class IncrementPipeline:
    """
    One pass of the integration and regression loop for a new increment:
    change identification, impact analysis, the (re-)test strategy and,
    when traces are available, regression test selection.
    """
    def __init__(self, config: Config, old: ProgramModel, new: ProgramModel):
        self.logger = logging.getLogger(__name__)
        self.config = config
        self.old = synthesize_default_constructors(old)
        self.new = synthesize_default_constructors(new)
        self.cmd_old: ClassMessageDiagram = build_cmd(self.old)
        self.cmd_new: ClassMessageDiagram = build_cmd(self.new)
        self.analyzer = ImpactAnalyzer(self.old, self.new, self.cmd_old, self.cmd_new)

    def run(self, store: Optional[TraceStore] = None, changed_specs: Iterable[str] = (),
            top_down: Optional[bool] = None) -> IncrementResult:
        changes = self.analyzer.diff()
        impacted = impact(self.cmd_new, changes)
        classes = class_level_impact(self.new, changes, self.cmd_new)
        reduction = reduction_ratio(len(impacted.methods), methods_in_classes(self.new, classes))
        if top_down is None:
            top_down = self.config.strategy.direction == "top-down"
        strategy = generate_strategy(self.cmd_new, impacted, top_down=top_down)

        selection = None
        if store is not None:
            selector = TestSelector(store, self.config.selection.granularity)
            selection = selector.select(impacted, changed_specs)

        self.logger.info(
            f"Increment {self.old.model_id!r} -> {self.new.model_id!r}: {len(changes)} change(s), "
            f"{len(impacted.methods)} impacted method(s), reduction {reduction:.4f}")
        return IncrementResult(changes=changes, impact=impacted, impacted_classes=classes,
                               reduction=reduction, strategy=strategy, selection=selection)

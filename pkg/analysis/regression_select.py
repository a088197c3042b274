"""
Selective regression testing: stored traces against an impact set.
"""

import logging
from enum import Enum
from typing import Iterable, List, Optional

from pydantic import BaseModel

from models.errors import StaleStore
from models.trace import TestRecord, TraceStore

from .change_analysis import ImpactSet

logger = logging.getLogger(__name__)


class SelectionGranularity(str, Enum):
    METHOD = "method"
    EDGE = "edge"


class Verdict(str, Enum):
    RERUN = "rerun"
    OBSOLETE = "obsolete"
    RETAINED = "retained"


class SelectionResult(BaseModel):
    rerun: List[str] = []
    obsolete: List[str] = []
    retained: List[str] = []

    def verdict(self, test_id: str) -> Optional[Verdict]:
        for verdict in Verdict:
            if test_id in getattr(self, verdict.value):
                return verdict
        return None

    def lines(self) -> List[str]:
        return [f"{verdict.value} {test_id}" for verdict in Verdict for test_id in getattr(self, verdict.value)]


def overlap(record: TestRecord, impact: ImpactSet) -> int:
    return len(record.touched_methods & impact.method_names)


def risk_key(record: TestRecord, impact: ImpactSet):
    return (-record.criticality, -overlap(record, impact), -record.trace_depth, record.test_id)


def prioritize(rerun: Iterable[TestRecord], impact: ImpactSet) -> List[TestRecord]:
    """
    Order tests by descending criticality, then impact overlap, then trace
    depth; remaining ties go by test id.
    """
    return sorted(rerun, key=lambda record: risk_key(record, impact))


class TestSelector:
    """
    Sorts every stored test into rerun, obsolete or retained.

    A test is obsolete when its specification changed (rerunning it would
    only raise false alarms). Otherwise it is rerun when its trace reaches
    the impact set, and retained when it does not.
    """
    __test__ = False

    def __init__(self, store: TraceStore, granularity: SelectionGranularity = SelectionGranularity.METHOD):
        self.logger = logging.getLogger(__name__)
        self.store = store
        self.granularity = SelectionGranularity(granularity)

    def check_store(self, impact: ImpactSet) -> None:
        expected = impact.seed.old_model_id
        if self.store.model_id and expected and self.store.model_id != expected:
            raise StaleStore(expected, self.store.model_id)

    def needs_rerun(self, record: TestRecord, impact: ImpactSet) -> bool:
        if self.granularity is SelectionGranularity.METHOD:
            return bool(record.touched_methods & impact.method_names)
        seeds = {str(n) for n in impact.seed.marked_nodes if n.is_method}
        if record.touched_methods & seeds:
            return True
        impacted = impact.method_names
        return any(call.caller in impacted and call.callee in impacted for call in record.calls())

    def select(self, impact: ImpactSet, changed_specs: Iterable[str] = ()) -> SelectionResult:
        self.check_store(impact)
        changed = set(changed_specs)
        rerun: List[TestRecord] = []
        obsolete: List[str] = []
        retained: List[str] = []
        for record in self.store:
            if record.spec_tag is not None and record.spec_tag in changed:
                obsolete.append(record.test_id)
            elif self.needs_rerun(record, impact):
                rerun.append(record)
            else:
                retained.append(record.test_id)

        result = SelectionResult(
            rerun=[r.test_id for r in prioritize(rerun, impact)],
            obsolete=sorted(obsolete),
            retained=sorted(retained),
        )
        self.logger.info(
            f"Selection ({self.granularity.value}): {len(result.rerun)} rerun, "
            f"{len(result.obsolete)} obsolete, {len(result.retained)} retained")
        return result


def select_tests(store: TraceStore, impact: ImpactSet, changed_specs: Iterable[str] = (),
                 granularity: SelectionGranularity = SelectionGranularity.METHOD) -> SelectionResult:
    """Select and prioritize the tests to rerun; raises StaleStore on a model mismatch."""
    return TestSelector(store, granularity).select(impact, changed_specs)

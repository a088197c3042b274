"""
Execution traces: per-test call trees rebuilt from method enter/exit events.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, NamedTuple, Optional


class TraceCall(NamedTuple):
    """A reconstructed call: the frame beneath `callee` is `caller`."""
    caller: str
    site: Optional[int]
    callee: str

    def __str__(self) -> str:
        site = f"#{self.site}" if self.site is not None else ""
        return f"{self.caller}{site} -> {self.callee}"


@dataclass
class TraceFrame:
    method: str
    site: Optional[int] = None
    children: List["TraceFrame"] = field(default_factory=list)
    line: Optional[int] = field(default=None, compare=False)

    @property
    def class_name(self) -> str:
        return self.method.split(".", 1)[0]

    @property
    def selector(self) -> str:
        return self.method.split(".", 1)[1]


@dataclass
class TestRecord:
    __test__ = False

    test_id: str
    spec_tag: Optional[str] = None
    criticality: int = 3
    roots: List[TraceFrame] = field(default_factory=list)

    def frames(self) -> Iterator[TraceFrame]:
        """All frames in pre-order (entry order)."""
        stack = list(reversed(self.roots))
        while stack:
            frame = stack.pop()
            yield frame
            stack.extend(reversed(frame.children))

    def calls(self) -> List[TraceCall]:
        """Reconstructed calls in entry order; one per non-root enter event."""
        result: List[TraceCall] = []
        stack = [(root, None) for root in reversed(self.roots)]
        while stack:
            frame, caller = stack.pop()
            if caller is not None:
                result.append(TraceCall(caller.method, frame.site, frame.method))
            stack.extend((child, frame) for child in reversed(frame.children))
        return result

    def chains(self) -> Iterator[List[TraceFrame]]:
        """Root-to-leaf frame chains (the call stacks the test went through)."""
        stack = [[root] for root in reversed(self.roots)]
        while stack:
            chain = stack.pop()
            tip = chain[-1]
            if not tip.children:
                yield chain
                continue
            for child in reversed(tip.children):
                stack.append(chain + [child])

    @property
    def touched_methods(self) -> FrozenSet[str]:
        return frozenset(frame.method for frame in self.frames())

    @property
    def trace_depth(self) -> int:
        depth = 0
        stack = [(root, 1) for root in self.roots]
        while stack:
            frame, level = stack.pop()
            depth = max(depth, level)
            stack.extend((child, level + 1) for child in frame.children)
        return depth


@dataclass
class TraceStore:
    records: Dict[str, TestRecord] = field(default_factory=dict)
    model_id: Optional[str] = None

    def add(self, record: TestRecord) -> None:
        if record.test_id in self.records:
            raise ValueError(f"duplicate test id {record.test_id}")
        self.records[record.test_id] = record

    def get(self, test_id: str) -> Optional[TestRecord]:
        return self.records.get(test_id)

    def __iter__(self) -> Iterator[TestRecord]:
        return iter(self.records.values())

    def __len__(self) -> int:
        return len(self.records)

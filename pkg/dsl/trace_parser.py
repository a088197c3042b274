"""
Reader and writer for the line-oriented `.trc` execution-trace format.

    model <model-id>                                   (optional, first)
    test <test-id> [spec=<tag>] [criticality=<1..5>]
    enter <Class>.<selector> [site=<ordinal>]
    exit

Blank lines and `#` comments are ignored. Within a test, enter/exit events
must balance; the frame beneath an entered method is its caller.
"""

import logging
from typing import List, Optional

from models.errors import TraceFormatError
from models.program_model import ClassHierarchy, ProgramModel, synthesize_default_constructors
from models.trace import TestRecord, TraceFrame, TraceStore

logger = logging.getLogger(__name__)

MIN_CRITICALITY = 1
MAX_CRITICALITY = 5


def is_storable_test_id(test_id: str) -> bool:
    """Test ids name files in a trace store: no path separators, no dot entries."""
    return "/" not in test_id and "\\" not in test_id and test_id not in (".", "..")


class TraceParser:
    def __init__(self, model: Optional[ProgramModel] = None, file: str = "<traces>",
                 default_criticality: int = 3):
        self.logger = logging.getLogger(__name__)
        self.model = model
        self.hierarchy = ClassHierarchy(synthesize_default_constructors(model)) if model is not None else None
        self.file = file
        self.default_criticality = default_criticality

    def error(self, message: str, line: int) -> TraceFormatError:
        return TraceFormatError(message, line, self.file)

    def parse(self, text: str) -> TraceStore:
        store = TraceStore()
        record: Optional[TestRecord] = None
        stack: List[TraceFrame] = []
        saw_content = False

        for number, raw in enumerate(text.lstrip("\ufeff").splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            words = line.split()
            keyword, args = words[0], words[1:]

            if keyword == "model":
                if saw_content or store.model_id is not None or len(args) != 1:
                    raise self.error("'model <id>' must appear once, before any test", number)
                store.model_id = args[0]
            elif keyword == "test":
                if stack:
                    raise self.error(f"test {record.test_id} ends with {len(stack)} unclosed frame(s)", number)
                record = self._parse_test_header(args, number)
                if store.get(record.test_id) is not None:
                    raise self.error(f"duplicate test id {record.test_id}", number)
                store.add(record)
            elif keyword == "enter":
                if record is None:
                    raise self.error("'enter' before any 'test' line", number)
                frame = self._parse_enter(args, stack[-1] if stack else None, number)
                if stack:
                    stack[-1].children.append(frame)
                else:
                    record.roots.append(frame)
                stack.append(frame)
            elif keyword == "exit":
                if args:
                    raise self.error("'exit' takes no arguments", number)
                if not stack:
                    raise self.error("'exit' without a matching 'enter'", number)
                stack.pop()
            else:
                raise self.error(f"unknown directive {keyword!r}", number)
            saw_content = True

        if stack:
            raise self.error(f"test {record.test_id} ends with {len(stack)} unclosed frame(s)", None)
        self.logger.debug(f"Parsed {len(store)} test trace(s) from {self.file}")
        return store

    def _parse_test_header(self, args: List[str], number: int) -> TestRecord:
        if not args:
            raise self.error("'test' needs a test id", number)
        test_id, options = args[0], args[1:]
        if not is_storable_test_id(test_id):
            raise self.error(f"test id {test_id!r} cannot name a trace file", number)
        spec_tag = None
        criticality = self.default_criticality
        for option in options:
            key, sep, value = option.partition("=")
            if not sep or not value:
                raise self.error(f"malformed test option {option!r}", number)
            if key == "spec":
                spec_tag = value
            elif key == "criticality":
                if not value.isdigit() or not MIN_CRITICALITY <= int(value) <= MAX_CRITICALITY:
                    raise self.error(f"criticality must be {MIN_CRITICALITY}..{MAX_CRITICALITY}, got {value}", number)
                criticality = int(value)
            else:
                raise self.error(f"unknown test option {key!r}", number)
        return TestRecord(test_id=test_id, spec_tag=spec_tag, criticality=criticality)

    def _parse_enter(self, args: List[str], caller: Optional[TraceFrame], number: int) -> TraceFrame:
        if not args or len(args) > 2:
            raise self.error("expected 'enter <Class>.<selector> [site=<ordinal>]'", number)
        class_name, dot, selector = args[0].partition(".")
        if not dot or not class_name or not selector:
            raise self.error(f"malformed method name {args[0]!r}", number)

        site = None
        if len(args) == 2:
            key, _, value = args[1].partition("=")
            if key != "site" or not value.isdigit():
                raise self.error(f"malformed site option {args[1]!r}", number)
            site = int(value)

        if self.hierarchy is not None:
            implementor = None
            if self.hierarchy.has_class(class_name):
                implementor = self.hierarchy.lookup(class_name, selector)
            if implementor is None:
                raise self.error(f"enter of unknown method {class_name}.{selector}", number)
            class_name = implementor
            if site is not None:
                if caller is None:
                    raise self.error(f"site={site} on a root frame (no caller)", number)
                caller_method = self.hierarchy.classes[caller.class_name].method(caller.selector)
                if site >= len(caller_method.call_sites):
                    raise self.error(
                        f"site ordinal {site} out of range for {caller.method} "
                        f"({len(caller_method.call_sites)} call site(s))", number)

        return TraceFrame(method=f"{class_name}.{selector}", site=site, line=number)


def parse_traces(text: str, model: Optional[ProgramModel] = None, file: str = "<traces>",
                 default_criticality: int = 3) -> TraceStore:
    """
    Parse `.trc` text into a TraceStore of per-test call trees.

    With `model`, each entered method is resolved from the receiver's dynamic
    class up to its implementing class and site ordinals are range-checked.
    """
    return TraceParser(model, file, default_criticality).parse(text)


def _frame_lines(frame: TraceFrame, lines: List[str]) -> None:
    site = f" site={frame.site}" if frame.site is not None else ""
    lines.append(f"enter {frame.method}{site}")
    for child in frame.children:
        _frame_lines(child, lines)
    lines.append("exit")


def serialize_record(record: TestRecord) -> List[str]:
    header = f"test {record.test_id}"
    if record.spec_tag is not None:
        header += f" spec={record.spec_tag}"
    header += f" criticality={record.criticality}"
    lines = [header]
    for root in record.roots:
        _frame_lines(root, lines)
    return lines


def serialize_traces(store: TraceStore) -> str:
    """Canonical `.trc` text for a store (LF line endings)."""
    lines: List[str] = []
    if store.model_id is not None:
        lines.append(f"model {store.model_id}")
    for record in store:
        lines.extend(serialize_record(record))
    return "".join(f"{line}\n" for line in lines)

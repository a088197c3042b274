"""
Persisted trace stores: one `<test-id>.trc` file per test plus `index.tsv`.

index.tsv starts with `# model <id>` (when known) and then holds one line
per test: test_id<TAB>spec_tag<TAB>criticality<TAB>depth.
"""

import logging
from pathlib import Path
from typing import Optional, Union

from models.errors import TraceFormatError
from models.program_model import ProgramModel
from models.trace import TraceStore

from .trace_parser import is_storable_test_id, parse_traces, serialize_record

logger = logging.getLogger(__name__)

INDEX_FILE = "index.tsv"


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise TraceFormatError(f"not valid UTF-8 (byte {e.start})", None, str(path)) from e


def save_trace_store(store: TraceStore, directory: Union[str, Path]) -> Path:
    directory = Path(directory)
    for record in store:
        if not is_storable_test_id(record.test_id):
            raise TraceFormatError(f"test id {record.test_id!r} cannot name a file in the store", None, str(directory))
    directory.mkdir(parents=True, exist_ok=True)
    index_lines = []
    if store.model_id is not None:
        index_lines.append(f"# model {store.model_id}")
    for record in store:
        trace_file = directory / f"{record.test_id}.trc"
        trace_file.write_text("".join(f"{line}\n" for line in serialize_record(record)), encoding="utf-8")
        index_lines.append("\t".join([
            record.test_id, record.spec_tag or "", str(record.criticality), str(record.trace_depth),
        ]))
    index_path = directory / INDEX_FILE
    index_path.write_text("".join(f"{line}\n" for line in index_lines), encoding="utf-8")
    logger.info(f"Saved {len(store)} trace(s) to {directory}")
    return index_path


def load_trace_store(directory: Union[str, Path], model: Optional[ProgramModel] = None) -> TraceStore:
    """Load a store written by save_trace_store; the index fixes test order and metadata."""
    directory = Path(directory)
    index_path = directory / INDEX_FILE
    if not index_path.exists():
        raise TraceFormatError(f"missing {INDEX_FILE}", None, str(directory))

    store = TraceStore()
    lines = _read(index_path).splitlines()
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            words = line[1:].split()
            if len(words) == 2 and words[0] == "model":
                store.model_id = words[1]
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise TraceFormatError("index line needs 4 tab-separated fields", number, str(index_path))
        test_id, spec_tag, criticality, _depth = fields
        if not is_storable_test_id(test_id):
            raise TraceFormatError(f"index names unusable test id {test_id!r}", number, str(index_path))
        trace_path = directory / f"{test_id}.trc"
        if not trace_path.exists():
            raise TraceFormatError(f"index names {test_id} but {trace_path.name} is missing", number, str(index_path))
        parsed = parse_traces(_read(trace_path), model=model, file=str(trace_path))
        record = parsed.get(test_id)
        if record is None or len(parsed) != 1:
            raise TraceFormatError(f"{trace_path.name} must hold exactly test {test_id}", None, str(trace_path))
        record.spec_tag = spec_tag or None
        record.criticality = int(criticality)
        store.add(record)
    logger.info(f"Loaded {len(store)} trace(s) from {directory}")
    return store

from .model_parser import parse_model
from .model_writer import serialize_model
from .tokenizer import SourceSpan
from .trace_parser import parse_traces, serialize_traces
from .trace_store_io import load_trace_store, save_trace_store

__all__ = [
    "SourceSpan",
    "load_trace_store",
    "parse_model",
    "parse_traces",
    "save_trace_store",
    "serialize_model",
    "serialize_traces",
]

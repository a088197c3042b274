import re
from typing import Iterator, List, NamedTuple

from models.errors import ParseError

KEYWORDS = frozenset({
    "class", "extends", "abstract", "var", "method", "ctor", "body",
    "call", "uses", "defs", "self", "super",
})

_TOKEN_SPEC = [
    ("NEWLINE", r"\r\n|\n|\r"),
    ("SKIP", r"[ \t\f\v]+"),
    ("COMMENT", r"#[^\r\n]*"),
    ("STRING", r'"(?:[^"\\\r\n]|\\.)*"'),
    ("IDENT", r"<init>|[A-Za-z_][A-Za-z0-9_]*"),
    ("PUNCT", r"[{}:.?]"),
    ("MISMATCH", r"."),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in _TOKEN_SPEC))

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r"}
IDENT_RE = re.compile(r"<init>|[A-Za-z_][A-Za-z0-9_]*")


class SourceSpan(NamedTuple):
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class Token(NamedTuple):
    kind: str  # KEYWORD | IDENT | STRING | PUNCT | EOF
    value: str
    span: SourceSpan

    def describe(self) -> str:
        if self.kind == "EOF":
            return "end of input"
        if self.kind == "STRING":
            return "string literal"
        return f"'{self.value}'"


def is_identifier(text: str) -> bool:
    return text not in KEYWORDS and IDENT_RE.fullmatch(text) is not None


def _unescape(raw: str, span: SourceSpan) -> str:
    out: List[str] = []
    chars = iter(raw[1:-1])
    for ch in chars:
        if ch != "\\":
            out.append(ch)
            continue
        nxt = next(chars)
        if nxt not in _ESCAPES:
            raise ParseError(f"unknown escape sequence \\{nxt}", span)
        out.append(_ESCAPES[nxt])
    return "".join(out)


def escape_string(value: str) -> str:
    escaped = (value.replace("\\", "\\\\").replace('"', '\\"')
               .replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r"))
    return f'"{escaped}"'


def tokenize(text: str, file: str = "<model>") -> Iterator[Token]:
    """Yield tokens with 1-based line/column spans, ending with an EOF token."""
    line = 1
    line_start = 0
    for match in _TOKEN_RE.finditer(text):
        kind = match.lastgroup
        value = match.group()
        span = SourceSpan(file, line, match.start() - line_start + 1)
        if kind == "NEWLINE":
            line += 1
            line_start = match.end()
        elif kind in ("SKIP", "COMMENT"):
            continue
        elif kind == "MISMATCH":
            if value == '"':
                raise ParseError("unterminated string literal", span)
            raise ParseError(f"unexpected character {value!r}", span)
        elif kind == "STRING":
            yield Token("STRING", _unescape(value, span), span)
        elif kind == "IDENT" and value in KEYWORDS:
            yield Token("KEYWORD", value, span)
        else:
            yield Token(kind, value, span)
    yield Token("EOF", "", SourceSpan(file, line, len(text) - line_start + 1))

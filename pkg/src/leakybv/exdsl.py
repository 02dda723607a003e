"""The ``.qex`` experiment description language.

A file holds one block::

    # comment
    experiment leaky_bv {
      n = 6
      a = 101101
      S = {1,4}
      mode = exact
      output = csv
    }

Bindings are ``key = value`` separated by whitespace or newlines.  Values
are integers, binary strings, subset literals ``{1,3,4}``, or bare words.
``random`` / ``random_subset`` tokens are kept verbatim; the runner
resolves them from the seed.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, replace
from typing import Literal, Optional, Union

from .gf2 import MAX_BITS, BitString, SubsetMask

RANDOM = "random"
RANDOM_SUBSET = "random_subset"
OPTIMAL = "optimal"
MAX_SEED = 2**64 - 1
# Longer digit runs are rejected before int() conversion.
_MAX_DIGITS = 40

KINDS = ("leaky_bv", "bv", "deutsch_jozsa", "grover", "parity", "holevo_curve", "sweep")

# Canonical key order used by the renderer.
KEY_ORDER = (
    "n", "a", "S", "k", "f", "promise", "marked", "iterations", "bits",
    "trials", "subset_policy", "mode", "shots", "seed", "output",
)

_SAMPLED = {"mode": "exact", "shots": None, "seed": 0, "output": "csv"}

# key -> default; a default of ... marks the key as required.
SCHEMA: dict[str, dict[str, object]] = {
    "leaky_bv": {"n": ..., "a": ..., "S": ..., "k": None, **_SAMPLED},
    "bv": {"n": ..., "a": ..., **_SAMPLED},
    "deutsch_jozsa": {"n": ..., "f": ..., "promise": "none", **_SAMPLED},
    "grover": {"n": ..., "marked": ..., "iterations": OPTIMAL, **_SAMPLED},
    "parity": {"bits": ..., "seed": 0, "output": "csv"},
    "holevo_curve": {"n": ..., "trials": 1, "subset_policy": "nested_prefix", "seed": 0, "output": "csv"},
    "sweep": {"n": ..., "k": None, "trials": 10, "subset_policy": "nested_prefix", "seed": 0, "output": "csv"},
}

_WORDS = {
    "promise": ("none", "constant_or_balanced"),
    "subset_policy": ("nested_prefix", "random"),
    "mode": ("exact", "shots"),
    "output": ("csv", "json"),
}


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    n: Optional[int] = None
    a: Union[BitString, str, None] = None
    S: Union[SubsetMask, str, None] = None
    k: Optional[int] = None
    f: Optional[str] = None
    promise: Optional[str] = None
    marked: Optional[BitString] = None
    iterations: Union[int, str, None] = None
    bits: Optional[BitString] = None
    trials: Optional[int] = None
    subset_policy: Optional[str] = None
    mode: Optional[str] = None
    shots: Optional[int] = None
    seed: Optional[int] = None
    output: Optional[str] = None

    def bound_keys(self) -> list[str]:
        """Keys the renderer emits, in canonical order."""
        keys = [key for key in KEY_ORDER if key in SCHEMA[self.kind] and getattr(self, key) is not None]
        if self.kind == "leaky_bv" and self.S != RANDOM_SUBSET and "k" in keys:
            keys.remove("k")
        return keys


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    message: str
    severity: Literal["error", "warning"] = "error"

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class ParseError(ValueError):
    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(map(str, diagnostics)))


# --- lexer ------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<num>[0-9]+)
  | (?P<lbrace>\{)
  | (?P<rbrace>\})
  | (?P<eq>=)
  | (?P<comma>,)
  | (?P<bad>.)
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    offset: int


class _Source:
    def __init__(self, text: str):
        self.text = text
        self.line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def position(self, offset: int) -> tuple[int, int]:
        # Clamp end-of-input onto the last visible character so positions stay inside the text.
        visible = len(self.text.rstrip("\r\n"))
        offset = min(offset, max(visible - 1, 0))
        line = bisect.bisect_right(self.line_starts, offset)
        return line, offset - self.line_starts[line - 1] + 1


def _tokenize(text: str) -> list[_Tok]:
    out = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        if kind in ("ws", "nl", "comment"):
            continue
        out.append(_Tok(kind, m.group(), m.start()))
    return out


# --- parser -----------------------------------------------------------------

@dataclass
class _Value:
    """A raw bound value: a word, a digit string, or a subset literal."""

    kind: str  # "word" | "num" | "set"
    text: str
    offset: int
    members: tuple[int, ...] = ()


class _Parser:
    def __init__(self, text: str):
        self.src = _Source(text)
        self.toks = _tokenize(text)
        self.pos = 0
        self.diags: list[ParseDiagnostic] = []

    def error(self, offset: int, message: str, severity="error"):
        line, col = self.src.position(offset)
        self.diags.append(ParseDiagnostic(line, col, message, severity))

    def peek(self) -> Optional[_Tok]:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self) -> Optional[_Tok]:
        tok = self.peek()
        if tok is not None:
            self.pos += 1
        return tok

    def eof_offset(self) -> int:
        return len(self.src.text)

    def expect(self, kind: str, what: str) -> Optional[_Tok]:
        tok = self.peek()
        if tok is None:
            self.error(self.eof_offset(), f"expected {what}, found end of input")
            return None
        if tok.kind != kind:
            self.error(tok.offset, f"expected {what}, found {tok.text!r}")
            return None
        return self.next()

    def parse(self) -> Optional[ExperimentSpec]:
        for tok in self.toks:
            if tok.kind == "bad":
                self.error(tok.offset, f"unexpected character {tok.text!r}")
        if self.diags:
            return None
        head = self.expect("word", "'experiment'")
        if head is None:
            return None
        if head.text != "experiment":
            self.error(head.offset, f"expected 'experiment', found {head.text!r}")
            return None
        kind_tok = self.expect("word", "an experiment kind")
        if kind_tok is None:
            return None
        if kind_tok.text not in KINDS:
            self.error(kind_tok.offset, f"unknown experiment kind {kind_tok.text!r}; expected one of {', '.join(KINDS)}")
            return None
        open_tok = self.expect("lbrace", "'{'")
        if open_tok is None:
            return None
        bindings, close_offset = self.parse_bindings()
        if close_offset is None:
            return None
        extra = self.peek()
        if extra is not None:
            self.error(extra.offset, f"unexpected {extra.text!r} after the closing '}}'")
        return _build(self, kind_tok, bindings, close_offset)

    def parse_bindings(self):
        bindings: dict[str, tuple[_Tok, _Value]] = {}
        while True:
            tok = self.peek()
            if tok is None:
                self.error(self.eof_offset(), "missing closing '}'")
                return bindings, None
            if tok.kind == "rbrace":
                self.next()
                return bindings, tok.offset
            if tok.kind != "word":
                self.error(tok.offset, f"expected a key, found {tok.text!r}")
                self.next()
                continue
            key = self.next()
            if self.expect("eq", f"'=' after {key.text!r}") is None:
                continue
            value = self.parse_value()
            if value is None:
                continue
            if key.text in bindings:
                first = self.src.position(bindings[key.text][0].offset)
                self.error(key.offset, f"duplicate key {key.text!r} (first bound at line {first[0]}, column {first[1]})")
                continue
            bindings[key.text] = (key, value)

    def parse_value(self) -> Optional[_Value]:
        tok = self.peek()
        if tok is None:
            self.error(self.eof_offset(), "expected a value, found end of input")
            return None
        if tok.kind in ("word", "num"):
            self.next()
            return _Value(tok.kind, tok.text, tok.offset)
        if tok.kind == "lbrace":
            self.next()
            members: list[int] = []
            prev_comma = False
            while True:
                t = self.next()
                if t is None:
                    self.error(self.eof_offset(), "unterminated subset literal")
                    return None
                if t.kind == "rbrace" and not prev_comma:
                    break
                if t.kind == "num" and (not members or prev_comma) and len(t.text) <= _MAX_DIGITS:
                    members.append(int(t.text))
                    prev_comma = False
                    continue
                if t.kind == "comma" and members and not prev_comma:
                    prev_comma = True
                    continue
                self.error(t.offset, f"malformed subset literal near {t.text!r}")
                self._skip_literal()
                return None
            return _Value("set", "{" + ",".join(map(str, members)) + "}", tok.offset, tuple(members))
        self.error(tok.offset, f"expected a value, found {tok.text!r}")
        self.next()
        return None

    def _skip_literal(self):
        while (t := self.peek()) is not None and t.kind not in ("rbrace",):
            if t.kind == "word":
                return
            self.next()
        if self.peek() is not None:
            self.next()


# --- typed conversion and validation ---------------------------------------

class _Invalid(Exception):
    pass


def _int(v: _Value, key: str, lo: int, hi: int) -> int:
    if v.kind != "num":
        raise _Invalid(f"{key} must be an integer, got {v.text!r}")
    if len(v.text) > _MAX_DIGITS:
        raise _Invalid(f"{key} has too many digits")
    x = int(v.text)
    if not lo <= x <= hi:
        raise _Invalid(f"{key} = {x} outside {lo}..{hi}")
    return x


def _bits(v: _Value, key: str, allow_random: bool = False):
    if allow_random and v.kind == "word" and v.text == RANDOM:
        return RANDOM
    if v.kind != "num" or set(v.text) - {"0", "1"}:
        extra = " or 'random'" if allow_random else ""
        raise _Invalid(f"{key} must be a binary string{extra}, got {v.text!r}")
    if len(v.text) > MAX_BITS:
        raise _Invalid(f"{key} has length {len(v.text)}, cap is {MAX_BITS}")
    return BitString.from_str(v.text)


def _word(v: _Value, key: str) -> str:
    allowed = _WORDS[key]
    if v.kind != "word" or v.text not in allowed:
        raise _Invalid(f"{key} must be one of {', '.join(allowed)}, got {v.text!r}")
    return v.text


def _convert(key: str, v: _Value):
    if key == "n":
        return _int(v, key, 1, MAX_BITS)
    if key == "a":
        return _bits(v, key, allow_random=True)
    if key in ("marked", "bits"):
        return _bits(v, key)
    if key == "S":
        if v.kind == "word" and v.text == RANDOM_SUBSET:
            return RANDOM_SUBSET
        if v.kind != "set":
            raise _Invalid(f"S must be a subset literal like {{1,3}} or 'random_subset', got {v.text!r}")
        return v.members
    if key == "k":
        return _int(v, key, 0, MAX_BITS)
    if key == "f":
        if v.kind != "num" or set(v.text) - {"0", "1"}:
            raise _Invalid(f"f must be a binary truth table, got {v.text!r}")
        return v.text
    if key == "iterations":
        if v.kind == "word" and v.text == OPTIMAL:
            return OPTIMAL
        return _int(v, key, 0, 10**9)
    if key in ("trials", "shots"):
        return _int(v, key, 1, 10**9)
    if key == "seed":
        return _int(v, key, 0, MAX_SEED)
    return _word(v, key)


def _build(p: _Parser, kind_tok: _Tok, bindings, close_offset: int) -> Optional[ExperimentSpec]:
    kind = kind_tok.text
    schema = SCHEMA[kind]
    values: dict[str, object] = {}
    where: dict[str, int] = {}
    for key, (ktok, v) in bindings.items():
        if key not in schema:
            p.error(ktok.offset, f"unknown key {key!r} for experiment {kind}")
            continue
        where[key] = v.offset
        try:
            values[key] = _convert(key, v)
        except _Invalid as exc:
            p.error(v.offset, str(exc))
    for key, default in schema.items():
        if key not in bindings and default is ...:
            p.error(close_offset, f"missing required key {key!r} for experiment {kind}")
    if any(d.severity == "error" for d in p.diags):
        return None

    def bad(key: str, message: str):
        p.error(where.get(key, close_offset), message)

    n = values.get("n")
    if isinstance(values.get("a"), BitString) and values["a"].n != n:
        bad("a", f"a has length {values['a'].n}, expected n={n}")
    if isinstance(values.get("marked"), BitString) and values["marked"].n != n:
        bad("marked", f"marked has length {values['marked'].n}, expected n={n}")
    if "f" in values:
        need = 1 << n
        if len(values["f"]) != need:
            bad("f", f"f has length {len(values['f'])}, expected 2^n={need}")
        elif values.get("promise", "none") == "constant_or_balanced":
            ones = values["f"].count("1")
            if ones not in (0, need) and 2 * ones != need:
                bad("f", f"f has {ones} ones: neither constant nor balanced")
    if kind == "leaky_bv":
        S = values["S"]
        if S == RANDOM_SUBSET:
            if "k" not in values:
                bad("S", "S = random_subset requires k")
            elif values["k"] > n:
                bad("k", f"k = {values['k']} exceeds n={n}")
        else:
            if "k" in values:
                bad("k", "k is only allowed with S = random_subset")
            elif len(set(S)) != len(S):
                bad("S", f"subset {{{','.join(map(str, S))}}} repeats a coordinate")
            elif any(not 1 <= i <= n for i in S):
                bad("S", f"subset members must lie in 1..{n}")
            else:
                if list(S) != sorted(S):
                    p.error(where["S"], "subset literal normalized to ascending order", "warning")
                values["S"] = SubsetMask.of(S, n)
                values["k"] = len(S)
    if kind == "sweep" and values.get("k") is not None and values["k"] > n:
        bad("k", f"k = {values['k']} exceeds n={n}")
    mode = values.get("mode", schema.get("mode"))
    if "mode" in schema:
        if mode == "shots" and "shots" not in values:
            bad("mode", "mode = shots requires shots")
        if mode != "shots" and "shots" in values:
            bad("shots", "shots is only allowed with mode = shots")
    if any(d.severity == "error" for d in p.diags):
        return None
    for key, default in schema.items():
        if key not in values and default is not ...:
            values[key] = default
    return ExperimentSpec(kind=kind, **values)


def parse(source: Union[str, bytes]) -> ExperimentSpec:
    """Parse one experiment block; raise ParseError with positioned diagnostics."""
    spec, diags = parse_with_diagnostics(source)
    if spec is None:
        raise ParseError(diags)
    return spec


def parse_with_diagnostics(source: Union[str, bytes]) -> tuple[Optional[ExperimentSpec], list[ParseDiagnostic]]:
    """Parse, returning the spec (None on any error) and every diagnostic, warnings included."""
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            lines = source[: exc.start].count(b"\n")
            col = exc.start - (source.rfind(b"\n", 0, exc.start) + 1) + 1
            return None, [ParseDiagnostic(lines + 1, col, f"invalid UTF-8 at byte {exc.start}")]
    p = _Parser(source)
    spec = p.parse()
    return spec, p.diags


def render(spec: ExperimentSpec) -> str:
    """Canonical text: fixed key order, one binding per line, LF endings."""
    lines = [f"experiment {spec.kind} {{"]
    for key in spec.bound_keys():
        lines.append(f"  {key} = {getattr(spec, key)}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def with_seed(spec: ExperimentSpec, seed: int) -> ExperimentSpec:
    return replace(spec, seed=seed)

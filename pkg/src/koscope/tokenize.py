"""Label normalization, tokenization, deduplication and unit accounting.

A *token* is any unit that receives a POS tag (word, digit group or
punctuation mark); a *word* is a token of kind ``Word``.
"""
from __future__ import annotations

import dataclasses
import re
import unicodedata
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from .diagnostics import emit
from .morphotag import MorphoTag
from .numbers import round_half_up

KINDS = ("Word", "Digit", "Punct", "Symbol")
DEFAULT_STRIP = "%*"

_DIGITS = r"\d+(?:[.,]\d+)*"
_TOKEN_RE = re.compile(rf"{_DIGITS}(?!\w)|\w+(?:[-'’]\w+)*|[^\w\s]")
_DIGIT_RE = re.compile(_DIGITS)
_WS_RE = re.compile(r"\s+")


class EmptyLabelError(ValueError):
    pass


@dataclass(frozen=True)
class Token:
    surface: str
    kind: str
    index: int
    tag: Optional[MorphoTag] = None
    lemma: Optional[str] = None
    ws_after: str = ""
    offset: int = 0

    @property
    def is_word(self) -> bool:
        return self.kind == "Word"


def token_kind(surface: str) -> str:
    if _DIGIT_RE.fullmatch(surface):
        return "Digit"
    if len(surface) == 1 and not surface.isalnum():
        return "Punct" if unicodedata.category(surface).startswith("P") else "Symbol"
    if any(ch.isalpha() for ch in surface):
        return "Word"
    return "Symbol"


def preprocess(raw_label: str, strip_set: Iterable[str] = DEFAULT_STRIP) -> str:
    """NFC-normalize, drop ``strip_set`` characters, collapse whitespace.

    Raises :class:`EmptyLabelError` when nothing is left.
    """
    text = unicodedata.normalize("NFC", raw_label)
    drop = set(strip_set)
    if drop:
        text = "".join(ch for ch in text if ch not in drop)
    text = _WS_RE.sub(" ", text).strip()
    if not text:
        raise EmptyLabelError(f"label {raw_label!r} is empty after preprocessing")
    return text


def tokenize(label: str) -> List[Token]:
    """Split a label into tokens, keeping the whitespace that follows each.

    Digit groups (``070.1``) and hyphenated words stay whole; every other
    non-alphanumeric character is its own token.
    """
    if not label.strip():
        raise EmptyLabelError("cannot tokenize an empty label")
    matches = list(_TOKEN_RE.finditer(label))
    tokens = []
    for i, m in enumerate(matches):
        end = matches[i + 1].start() if i + 1 < len(matches) else len(label)
        tokens.append(Token(
            surface=m.group(),
            kind=token_kind(m.group()),
            index=i,
            ws_after=label[m.end():end],
            offset=m.start(),
        ))
    return tokens


def detokenize(tokens: Sequence[Token]) -> str:
    """Inverse of :func:`tokenize` from the first token onwards."""
    return "".join(t.surface + t.ws_after for t in tokens)


def tokenize_entry(entry, strip_set: Iterable[str] = DEFAULT_STRIP):
    label = preprocess(entry.raw_label, strip_set)
    return dataclasses.replace(entry, raw_label=label, tokens=tuple(tokenize(label)))


def dedup_key(label: str) -> str:
    return _WS_RE.sub(" ", unicodedata.normalize("NFC", label)).strip()


def deduplicate(entries: Sequence, diagnostics: Optional[list] = None) -> list:
    """Keep the first entry for each whitespace-normalized, case-sensitive label."""
    seen = set()
    kept = []
    for entry in entries:
        key = dedup_key(entry.raw_label)
        if key in seen:
            continue
        seen.add(key)
        kept.append(entry)
    removed = len(entries) - len(kept)
    if removed:
        emit(diagnostics, "info", "dedup", f"removed {removed} duplicate entries ({len(entries)} -> {len(kept)}); "
             "key is the exact label after whitespace normalization, case-sensitive")
    return kept


@dataclass(frozen=True)
class UnitCounts:
    entries: int = 0
    tokens: int = 0
    words: int = 0

    def __add__(self, other: "UnitCounts") -> "UnitCounts":
        return UnitCounts(self.entries + other.entries, self.tokens + other.tokens, self.words + other.words)

    @property
    def words_per_entry(self) -> Optional[Fraction]:
        return Fraction(self.words, self.entries) if self.entries else None

    @property
    def tokens_per_entry(self) -> Optional[Fraction]:
        return Fraction(self.tokens, self.entries) if self.entries else None

    def to_dict(self) -> dict:
        def ratio(value):
            return None if value is None else float(value)

        return {
            "entries": self.entries,
            "tokens": self.tokens,
            "words": self.words,
            "words_per_entry": ratio(self.words_per_entry),
            "tokens_per_entry": ratio(self.tokens_per_entry),
        }

    def display(self) -> dict:
        """Ratios rounded half-up to two decimals; absent on an empty corpus."""
        return {
            "words_per_entry": None if not self.entries else round_half_up(self.words_per_entry),
            "tokens_per_entry": None if not self.entries else round_half_up(self.tokens_per_entry),
        }


def unit_counts(entries: Sequence) -> UnitCounts:
    tokens = words = 0
    for entry in entries:
        tokens += len(entry.tokens)
        words += sum(1 for t in entry.tokens if t.kind == "Word")
    return UnitCounts(len(entries), tokens, words)


def dump_tokens(entry) -> str:
    """TSV token dump: ``index<TAB>surface<TAB>kind`` per line."""
    return "".join(f"{t.index}\t{t.surface}\t{t.kind}\n" for t in entry.tokens)


class LabelTokenizer(BaseEstimator, TransformerMixin):
    """Transformer: preprocess, optionally deduplicate, and tokenize entries.

    Entries that are empty after stripping are dropped with a diagnostic.
    """

    def __init__(self, strip=DEFAULT_STRIP, dedup=True):
        self.strip = strip
        self.dedup = dedup

    def fit(self, X=None, y=None):
        self.diagnostics_ = []
        return self

    def transform(self, X):
        from .validation import check_entries, check_fitted

        check_fitted(self, "diagnostics_")
        out = []
        for entry in check_entries(X):
            try:
                out.append(tokenize_entry(entry, self.strip))
            except EmptyLabelError as exc:
                emit(self.diagnostics_, "warning", "empty-label", str(exc), entry.entry_id)
        if self.dedup:
            out = deduplicate(out, self.diagnostics_)
        return out

"""Morphosyntactic tags: the feature model, the positional tag codec, coarse
POS projection, and a deterministic lexicon-driven fallback tagger."""
from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sklearn.base import BaseEstimator, TransformerMixin

from .diagnostics import emit

# category -> (word class, inflected); Residual/Abbreviation have no inflection
# ("n/a"), Punctuation/Digit have neither.
CATEGORIES: Dict[str, Tuple[str, bool]] = {
    "Adjective": ("open", True),
    "Article": ("closed", True),
    "Noun": ("open", True),
    "Pronoun": ("closed", True),
    "Verb": ("open", True),
    "Numeral": ("open", True),
    "Adverb": ("open", False),
    "Adposition": ("closed", False),
    "Conjunction": ("closed", False),
    "Particle": ("closed", False),
    "Residual": ("open", False),
    "Abbreviation": ("open", False),
    "Punctuation": ("n/a", False),
    "Digit": ("n/a", False),
}

COARSE: Dict[str, str] = {
    "Noun": "N",
    "Adjective": "Adj",
    "Article": "Art",
    "Pronoun": "Pn",
    "Verb": "V",
    "Numeral": "Num",
    "Adverb": "Advb",
    "Adposition": "Adp",
    "Conjunction": "Conj",
    "Particle": "Pt",
    "Residual": "Res",
    "Abbreviation": "Abbr",
    "Punctuation": "Punct",
    "Digit": "Dig",
}

PUNCT_COMMA = "Punct(comma)"
PUNCT_OPEN = "Punct(open-paren)"
PUNCT_CLOSE = "Punct(close-paren)"
PUNCT_OTHER = "Punct(other)"
_PUNCT_COARSE = {"Comma": PUNCT_COMMA, "Open bracket": PUNCT_OPEN, "Close bracket": PUNCT_CLOSE}

GENDERS = ("Masc", "Fem", "Neut")
NUMBERS = ("Sg", "Pl")
CASES = ("Nom", "Gen", "Acc", "Voc", "Dat")
DEGREES = ("Basic", "Comparative", "Superlative")
_DEGREE_CATEGORIES = ("Adjective",)
ABSENT_CODE = "Xx"


class TagError(ValueError):
    """A tag string or tag value the mapping cannot handle."""


@dataclass(frozen=True)
class MorphoTag:
    category: str
    subtype: Optional[str] = None
    gender: Optional[str] = None
    number: Optional[str] = None
    case: Optional[str] = None
    degree: Optional[str] = None

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise TagError(f"unknown category {self.category!r}")
        for name, allowed in (("gender", GENDERS), ("number", NUMBERS),
                              ("case", CASES), ("degree", DEGREES)):
            value = getattr(self, name)
            if value is not None and value not in allowed:
                raise TagError(f"invalid {name} {value!r}")
        if not self.inflected and (self.gender or self.number or self.case):
            raise TagError(f"{self.category} is not inflected; gender/number/case must be absent")
        # adjectives carry their degree as the subtype too
        if self.category in _DEGREE_CATEGORIES:
            if self.degree is None and self.subtype in DEGREES:
                object.__setattr__(self, "degree", self.subtype)
            elif self.subtype is None and self.degree is not None:
                object.__setattr__(self, "subtype", self.degree)
        elif self.degree is not None:
            raise TagError(f"degree is only defined for {_DEGREE_CATEGORIES}")

    @property
    def word_class(self) -> str:
        return CATEGORIES[self.category][0]

    @property
    def inflected(self) -> bool:
        return CATEGORIES[self.category][1]

    def agrees_with(self, other: "MorphoTag", features: Sequence[str] = ("gender", "number", "case")) -> bool:
        """True when every feature present on both tags has the same value."""
        for name in features:
            a, b = getattr(self, name), getattr(other, name)
            if a is not None and b is not None and a != b:
                return False
        return True


@dataclass(frozen=True)
class _Slot:
    name: str
    codes: Mapping[str, str]

    def reverse(self) -> Dict[str, str]:
        return {v: k for k, v in self.codes.items()}


class TagsetMapping:
    """Positional tag table: 2-char category prefix followed by 2-char feature codes."""

    def __init__(self, layouts: Mapping[str, Tuple[str, Sequence[_Slot]]]):
        self.layouts = dict(layouts)
        self.prefix_of = {category: prefix for prefix, (category, _) in self.layouts.items()}

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "TagsetMapping":
        fields: Dict[str, Dict[str, str]] = {}
        layouts: Dict[str, Tuple[str, List[_Slot]]] = {}
        for lineno, raw in enumerate(lines, 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise TagError(f"tagset line {lineno}: expected 3 tab-separated columns")
            head, name, body = parts
            if head == "field":
                fields[name] = _parse_codes(body, lineno)
                continue
            if len(head) != 2:
                raise TagError(f"tagset line {lineno}: prefix must be 2 characters")
            if name not in CATEGORIES:
                raise TagError(f"tagset line {lineno}: unknown category {name!r}")
            slots = []
            for item in _SLOT_RE.findall(body):
                if "{" in item:
                    slot_name, _, table = item.partition("{")
                    slots.append(_Slot(slot_name, _parse_codes(table.rstrip("}"), lineno)))
                elif item in fields:
                    slots.append(_Slot(item, fields[item]))
                else:
                    raise TagError(f"tagset line {lineno}: no code table for slot {item!r}")
            layouts[head] = (name, slots)
        return cls(layouts)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "TagsetMapping":
        with open(path, encoding="utf-8") as fh:
            return cls.from_lines(fh)

    def subtypes(self, category: str) -> Tuple[str, ...]:
        prefix = self.prefix_of.get(category)
        if prefix is None:
            return ()
        for slot in self.layouts[prefix][1]:
            if slot.name in ("subtype", "degree"):
                return tuple(slot.codes.values())
        return ()

    def code_for(self, category: str, subtype: str) -> str:
        """Shortest tag string for a bare (category, subtype) pair."""
        return encode_tag(MorphoTag(category, subtype), self)


_SLOT_RE = re.compile(r"\w+(?:\{[^}]*\})?")


def _parse_codes(body: str, lineno: int) -> Dict[str, str]:
    codes = {}
    for pair in body.split(","):
        code, sep, value = pair.partition("=")
        if not sep or len(code) != 2:
            raise TagError(f"tagset line {lineno}: bad code entry {pair!r}")
        codes[code] = value
    return codes


@lru_cache(maxsize=None)
def default_mapping() -> TagsetMapping:
    text = resources.files("koscope").joinpath("data/tagset.tsv").read_text(encoding="utf-8")
    return TagsetMapping.from_lines(text.splitlines())


def decode_tag(tag_string: str, mapping: Optional[TagsetMapping] = None,
               diagnostics: Optional[list] = None) -> MorphoTag:
    """Decode a positional tag such as ``NoCmMaSgNm``.

    Unknown feature codes inside a known category are dropped with a
    diagnostic; an unknown category prefix raises :class:`TagError`.
    """
    mapping = mapping or default_mapping()
    if not tag_string:
        raise TagError("empty tag string")
    prefix, body = tag_string[:2], tag_string[2:]
    if prefix not in mapping.layouts:
        raise TagError(f"unknown category prefix {prefix!r} in tag {tag_string!r}")
    category, slots = mapping.layouts[prefix]
    if len(body) % 2:
        emit(diagnostics, "warning", "tag-odd-length", f"trailing character ignored in tag {tag_string!r}")
    values: Dict[str, str] = {}
    for i in range(len(body) // 2):
        code = body[2 * i: 2 * i + 2]
        if i >= len(slots):
            emit(diagnostics, "warning", "tag-extra-code", f"code {code!r} beyond layout of {category} in {tag_string!r}")
            continue
        if code == ABSENT_CODE:
            continue
        slot = slots[i]
        value = slot.codes.get(code)
        if value is None:
            emit(diagnostics, "warning", "tag-unknown-code", f"unknown {slot.name} code {code!r} in {tag_string!r}")
            continue
        values[slot.name] = value
    if "degree" in values:
        values.setdefault("subtype", values["degree"])
        if category not in _DEGREE_CATEGORIES:
            values.pop("degree")
    return MorphoTag(category, **values)


def encode_tag(tag: MorphoTag, mapping: Optional[TagsetMapping] = None) -> str:
    mapping = mapping or default_mapping()
    prefix = mapping.prefix_of.get(tag.category)
    if prefix is None:
        raise TagError(f"category {tag.category} has no prefix in this mapping")
    codes = []
    for slot in mapping.layouts[prefix][1]:
        value = tag.degree or tag.subtype if slot.name == "degree" else getattr(tag, slot.name)
        if value is None:
            codes.append(ABSENT_CODE)
            continue
        code = slot.reverse().get(value)
        if code is None:
            raise TagError(f"{slot.name} value {value!r} has no code for {tag.category}")
        codes.append(code)
    while codes and codes[-1] == ABSENT_CODE:
        codes.pop()
    return prefix + "".join(codes)


def coarse(tag: MorphoTag) -> str:
    """Project a tag onto the pattern alphabet (``N``, ``Adj``, ``Punct(comma)``, ...)."""
    label = COARSE[tag.category]
    if label == "Punct":
        return _PUNCT_COARSE.get(tag.subtype, PUNCT_OTHER)
    return label


_SLOT_LABELS = (set(COARSE.values()) | {PUNCT_COMMA, PUNCT_OPEN, PUNCT_CLOSE, PUNCT_OTHER, "WORD", "*"})


class Slot:
    """One position of a coarse-label template.

    Syntax: ``Adj|N`` (alternatives), optional ``:Gen`` case constraint;
    ``,`` ``(`` ``)`` name punctuation kinds, ``Punct`` any punctuation,
    ``WORD`` any non-punctuation token, ``*`` anything.
    """

    _PUNCT_ALIASES = {",": PUNCT_COMMA, "(": PUNCT_OPEN, ")": PUNCT_CLOSE}

    def __init__(self, text: str):
        self.text = text
        labels, _, case = text.partition(":")
        if case and case not in CASES:
            raise ValueError(f"unknown case {case!r} in slot {text!r}")
        self.case = case or None
        self.labels = frozenset(self._PUNCT_ALIASES.get(l, l) for l in labels.split("|"))
        unknown = self.labels - _SLOT_LABELS
        if unknown:
            raise ValueError(f"unknown label(s) {sorted(unknown)} in slot {text!r}")

    def matches(self, tag: MorphoTag) -> bool:
        label = coarse(tag)
        ok = (
            "*" in self.labels
            or label in self.labels
            or ("Punct" in self.labels and label.startswith("Punct"))
            or ("WORD" in self.labels and not label.startswith("Punct"))
        )
        return ok and (self.case is None or tag.case == self.case)

    def __repr__(self):
        return f"Slot({self.text!r})"


# --- lexicon fallback tagger -------------------------------------------------

Lexicon = Dict[str, Tuple[MorphoTag, ...]]


def load_lexicon(path: Union[str, Path], mapping: Optional[TagsetMapping] = None) -> Lexicon:
    """Read ``surface<TAB>tag[,tag...]`` lines; keys are case-folded surfaces."""
    with open(path, encoding="utf-8") as fh:
        return parse_lexicon(fh, mapping)


def parse_lexicon(lines: Iterable[str], mapping: Optional[TagsetMapping] = None) -> Lexicon:
    lexicon: Dict[str, Tuple[MorphoTag, ...]] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        surface, sep, tags = line.partition("\t")
        if not sep:
            raise TagError(f"lexicon line {lineno}: expected surface<TAB>tags")
        decoded = tuple(decode_tag(t.strip(), mapping) for t in tags.split(",") if t.strip())
        key = surface.strip().casefold()
        merged = lexicon.get(key, ()) + tuple(t for t in decoded if t not in lexicon.get(key, ()))
        lexicon[key] = merged
    return lexicon


@dataclass(frozen=True)
class ContextRule:
    """Disambiguation rule: when ``trigger`` holds around an ambiguous word,
    keep the candidate tags matching ``choose``."""

    rule_id: str
    conditions: Tuple[Tuple[str, Optional[Slot]], ...]
    choose: Tuple[Tuple[str, str], ...]
    agree: Optional[str] = None

    _OFFSETS = {"prev": -1, "next": 1, "prev2": -2, "next2": 2}

    @classmethod
    def parse(cls, rule_id: str, trigger: str, choose: str) -> "ContextRule":
        conditions = []
        agree = None
        for item in trigger.split():
            key, _, value = item.partition("=")
            if key in cls._OFFSETS:
                conditions.append((key, Slot(value)))
            elif key in ("first", "last"):
                conditions.append((key, None))
            elif key == "agree":
                agree = value or "prev"
                if agree not in cls._OFFSETS:
                    raise ValueError(f"rule {rule_id}: agree target must be one of {sorted(cls._OFFSETS)}")
            else:
                raise ValueError(f"rule {rule_id}: unknown trigger condition {item!r}")
        filters = []
        for item in choose.split(","):
            key, sep, value = item.strip().partition("=")
            if not sep or key not in ("category", "subtype", "gender", "number", "case"):
                raise ValueError(f"rule {rule_id}: bad tag filter {item!r}")
            filters.append((key, value))
        return cls(rule_id, tuple(conditions), tuple(filters), agree)

    def fires(self, i: int, resolved: Sequence[Optional[MorphoTag]]) -> bool:
        n = len(resolved)
        for key, slot in self.conditions:
            if key == "first":
                if i != 0:
                    return False
                continue
            if key == "last":
                if i != n - 1:
                    return False
                continue
            j = i + self._OFFSETS[key]
            if not 0 <= j < n or resolved[j] is None or not slot.matches(resolved[j]):
                return False
        return True

    def select(self, i: int, candidates: Sequence[MorphoTag],
               resolved: Sequence[Optional[MorphoTag]]) -> Optional[MorphoTag]:
        picked = [c for c in candidates if all(getattr(c, k) == v for k, v in self.choose)]
        if self.agree:
            j = i + self._OFFSETS[self.agree]
            other = resolved[j] if 0 <= j < len(resolved) else None
            if other is None:
                return None
            picked = [c for c in picked if c.agrees_with(other)]
        return picked[0] if picked else None


def parse_context_rules(lines: Iterable[str]) -> List[ContextRule]:
    rules = []
    seen = set()
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"context rule line {lineno}: expected rule_id<TAB>trigger<TAB>filter")
        if parts[0] in seen:
            raise ValueError(f"context rule line {lineno}: duplicate rule id {parts[0]!r}")
        seen.add(parts[0])
        rules.append(ContextRule.parse(*parts))
    return rules


def load_context_rules(path: Union[str, Path]) -> List[ContextRule]:
    with open(path, encoding="utf-8") as fh:
        return parse_context_rules(fh)


def _data_path(name: str):
    return resources.files("koscope") / "data" / name


def default_lexicon(lang: str) -> Lexicon:
    ref = _data_path(f"lexicon_{lang}.tsv")
    if not ref.is_file():
        return {}
    return parse_lexicon(ref.read_text(encoding="utf-8").splitlines())


def default_context_rules(lang: str) -> List[ContextRule]:
    ref = _data_path(f"context_{lang}.tsv")
    if not ref.is_file():
        return []
    return parse_context_rules(ref.read_text(encoding="utf-8").splitlines())


_TERMINAL = set(".;··!?…")
_OPEN = set("([{")
_CLOSE = set(")]}")


def synthetic_tag(surface: str, kind: str) -> Optional[MorphoTag]:
    """Tags for non-word tokens, assigned without lexicon lookup."""
    if kind == "Digit":
        return MorphoTag("Digit", "Numbers etc")
    if kind == "Symbol":
        return MorphoTag("Residual", "Symbol")
    if kind == "Punct":
        if surface == ",":
            subtype = "Comma"
        elif surface in _TERMINAL:
            subtype = "Terminal"
        elif surface in _OPEN:
            subtype = "Open bracket"
        elif surface in _CLOSE:
            subtype = "Close bracket"
        else:
            subtype = "All others"
        return MorphoTag("Punctuation", subtype)
    return None


def lexicon_tag(entry, lexicon: Lexicon, context_rules: Sequence[ContextRule] = (),
                diagnostics: Optional[list] = None):
    """Tag every untagged token of a tokenized entry.

    Unambiguous words take their lexicon tag. Ambiguous words are settled by
    the first context rule that fires (rules see only already-settled
    neighbours; passes repeat until nothing changes); leftovers take the first
    lexicon reading with a diagnostic. Unknown words become Residual.
    Tokens that already carry a tag are left alone. Returns a new entry.
    """
    tokens = entry.tokens
    resolved: List[Optional[MorphoTag]] = []
    candidates: List[Tuple[MorphoTag, ...]] = []
    for tok in tokens:
        if tok.tag is not None:
            resolved.append(tok.tag)
            candidates.append((tok.tag,))
            continue
        if tok.kind != "Word":
            tag = synthetic_tag(tok.surface, tok.kind)
            resolved.append(tag)
            candidates.append((tag,))
            continue
        found = lexicon.get(tok.surface) or lexicon.get(tok.surface.casefold())
        if not found:
            emit(diagnostics, "warning", "unknown-word", f"{tok.surface!r} not in lexicon; tagged Residual",
                 entry.entry_id)
            tag = MorphoTag("Residual", "Other")
            resolved.append(tag)
            candidates.append((tag,))
            continue
        candidates.append(found)
        resolved.append(found[0] if len(found) == 1 else None)

    changed = True
    while changed:
        changed = False
        for i, tag in enumerate(resolved):
            if tag is not None:
                continue
            for rule in context_rules:
                if rule.fires(i, resolved):
                    pick = rule.select(i, candidates[i], resolved)
                    if pick is not None:
                        resolved[i] = pick
                        changed = True
                        break
    for i, tag in enumerate(resolved):
        if tag is None:
            resolved[i] = candidates[i][0]
            emit(diagnostics, "info", "ambiguous-fallback",
                 f"{tokens[i].surface!r}: no context rule applied; took first reading", entry.entry_id)

    new_tokens = tuple(dataclasses.replace(tok, tag=tag) for tok, tag in zip(tokens, resolved))
    return dataclasses.replace(entry, tokens=new_tokens)


class LexiconTagger(BaseEstimator, TransformerMixin):
    """Transformer tagging tokenized entries from a lexicon plus context rules.

    Parameters left as ``None`` fall back to the shipped resources for
    ``lang`` (``data/lexicon_<lang>.tsv`` and ``data/context_<lang>.tsv``).
    """

    def __init__(self, lang="el", lexicon=None, context_rules=None):
        self.lang = lang
        self.lexicon = lexicon
        self.context_rules = context_rules

    def fit(self, X=None, y=None):
        lexicon = self.lexicon
        if lexicon is None:
            lexicon = default_lexicon(self.lang)
        elif isinstance(lexicon, (str, Path)):
            lexicon = load_lexicon(lexicon)
        rules = self.context_rules
        if rules is None:
            rules = default_context_rules(self.lang)
        elif isinstance(rules, (str, Path)):
            rules = load_context_rules(rules)
        self.lexicon_ = lexicon
        self.context_rules_ = list(rules)
        self.diagnostics_ = []
        return self

    def transform(self, X):
        from .validation import check_entries, check_fitted

        check_fitted(self, "lexicon_")
        entries = check_entries(X, tokenized=True)
        return [lexicon_tag(e, self.lexicon_, self.context_rules_, self.diagnostics_) for e in entries]

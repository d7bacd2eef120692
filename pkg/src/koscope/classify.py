"""Syntactic patterns, divisibility markers and the atomicity verdict."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

import yaml
from sklearn.base import BaseEstimator

from .morphotag import PUNCT_CLOSE, PUNCT_COMMA, PUNCT_OPEN, MorphoTag, Slot, coarse
from .tokenize import tokenize

ENUMERATION = "Enumeration"
COMPOSITE = "Composite"
MARKER_TYPES = {
    "Conjunction": ENUMERATION,
    "EtcExpression": ENUMERATION,
    "CommaParataxis": ENUMERATION,
    "Parenthesis": COMPOSITE,
    "Adposition": COMPOSITE,
}

INDIVISIBLE = "indivisible"
DIVISIBLE = "divisible"
UNDETERMINED = "undetermined"
OUTCOMES = (INDIVISIBLE, DIVISIBLE, UNDETERMINED)


class PatternError(ValueError):
    pass


@dataclass(frozen=True)
class SyntacticPattern:
    labels: Tuple[str, ...]

    def __post_init__(self):
        if not self.labels:
            raise PatternError("a pattern needs at least one label")

    @property
    def canonical(self) -> str:
        return "+".join("Punct" if l.startswith("Punct") else l for l in self.labels)

    def __str__(self):
        return self.canonical


@dataclass(frozen=True)
class DivisibilityMarker:
    kind: str
    token_indices: Tuple[int, ...]

    @property
    def type(self) -> str:
        return MARKER_TYPES[self.kind]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "token_indices": list(self.token_indices)}


@dataclass(frozen=True)
class Verdict:
    outcome: str
    pattern: SyntacticPattern
    rule_id: Optional[str] = None
    types: FrozenSet[str] = frozenset()
    markers: Tuple[DivisibilityMarker, ...] = ()
    reason: Optional[str] = None

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {self.outcome!r}")
        if (self.outcome == DIVISIBLE) != bool(self.markers):
            raise ValueError("a verdict is divisible exactly when it has markers")
        if self.outcome == DIVISIBLE and self.types != frozenset(m.type for m in self.markers):
            raise ValueError("divisible types must be the union of marker types")
        if (self.outcome == INDIVISIBLE) != (self.rule_id is not None):
            raise ValueError("an indivisible verdict carries exactly one rule id")

    @property
    def annotation(self) -> str:
        return {INDIVISIBLE: "[i]", DIVISIBLE: "[d]", UNDETERMINED: "[u]"}[self.outcome]

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern.canonical,
            "labels": list(self.pattern.labels),
            "outcome": self.outcome,
            "rule_id": self.rule_id,
            "types": sorted(self.types),
            "markers": [m.to_dict() for m in self.markers],
            "reason": self.reason,
        }


@dataclass(frozen=True)
class Template:
    slots: Tuple[Slot, ...]
    same_case: Tuple[int, ...] = ()

    @classmethod
    def parse(cls, spec) -> "Template":
        if isinstance(spec, Mapping):
            slots, same = spec["slots"], tuple(spec.get("same_case", ()))
        else:
            slots, same = spec, ()
        template = cls(tuple(Slot(str(s)) for s in slots), same)
        if any(not 0 <= i < len(template.slots) for i in same):
            raise ValueError(f"same_case position out of range in {spec!r}")
        return template

    def matches(self, tags: Sequence[MorphoTag]) -> bool:
        if len(tags) != len(self.slots):
            return False
        if not all(slot.matches(tag) for slot, tag in zip(self.slots, tags)):
            return False
        if self.same_case:
            cases = {tags[i].case for i in self.same_case}
            return len(cases) == 1 and None not in cases
        return True

    def to_spec(self):
        slots = [s.text for s in self.slots]
        return {"slots": slots, "same_case": list(self.same_case)} if self.same_case else slots


@dataclass(frozen=True)
class IndivisibilityRule:
    rule_id: str
    alternatives: Tuple[Template, ...]
    description: str = ""

    def matches(self, tags: Sequence[MorphoTag]) -> bool:
        return any(t.matches(tags) for t in self.alternatives)


def _lexical_set(words) -> FrozenSet[str]:
    return frozenset(str(w).casefold() for w in words)


@dataclass(frozen=True)
class RuleSet:
    indivisible: Tuple[IndivisibilityRule, ...]
    conjunctions: FrozenSet[str]
    etc_expressions: Tuple[Tuple[str, ...], ...]
    etc_pronouns: FrozenSet[str]
    inversion_exceptions: Tuple[Template, ...]
    name: str = "custom"
    source: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        ids = [r.rule_id for r in self.indivisible]
        if len(ids) != len(set(ids)):
            raise ValueError("indivisibility rule ids must be unique")

    @classmethod
    def from_dict(cls, data: Mapping) -> "RuleSet":
        try:
            rules = tuple(
                IndivisibilityRule(str(r["id"]), tuple(Template.parse(a) for a in r["alternatives"]),
                                   r.get("description", ""))
                for r in data.get("indivisible", ())
            )
            etc = tuple(
                tuple(t.surface.casefold() for t in tokenize(str(phrase)))
                for phrase in data.get("etc_expressions", ())
            )
            # longest phrases first so "και τα λοιπά" wins over a bare "και"
            etc = tuple(sorted(set(etc), key=lambda p: (-len(p), p)))
            return cls(
                indivisible=rules,
                conjunctions=_lexical_set(data.get("conjunctions", ())),
                etc_expressions=etc,
                etc_pronouns=_lexical_set(data.get("etc_pronouns", ())),
                inversion_exceptions=tuple(Template.parse(t) for t in data.get("inversion_exceptions", ())),
                name=str(data.get("name", "custom")),
                source=dict(data),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed rule set: {exc}") from exc

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "RuleSet":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(yaml.safe_load(fh) or {})

    @property
    def rule_ids(self) -> List[str]:
        return [r.rule_id for r in self.indivisible]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "conjunctions": sorted(self.conjunctions),
            "etc_expressions": [" ".join(p) for p in self.etc_expressions],
            "etc_pronouns": sorted(self.etc_pronouns),
            "inversion_exceptions": [t.to_spec() for t in self.inversion_exceptions],
            "indivisible": [
                {"id": r.rule_id, "description": r.description,
                 "alternatives": [t.to_spec() for t in r.alternatives]}
                for r in self.indivisible
            ],
        }


DEFAULT_RULES_RESOURCE = "data/rules.yaml"


@lru_cache(maxsize=None)
def default_rules() -> RuleSet:
    text = resources.files("koscope").joinpath(DEFAULT_RULES_RESOURCE).read_text(encoding="utf-8")
    return RuleSet.from_dict(yaml.safe_load(text))


def _tags(entry) -> List[MorphoTag]:
    if not entry.tokens:
        raise PatternError(f"entry {entry.entry_id!r} has no tokens")
    missing = [t.index for t in entry.tokens if t.tag is None]
    if missing:
        raise PatternError(f"entry {entry.entry_id!r}: untagged tokens at {missing}")
    return [t.tag for t in entry.tokens]


def pattern_of(entry) -> SyntacticPattern:
    return SyntacticPattern(tuple(coarse(tag) for tag in _tags(entry)))


def _lexical(tok) -> Tuple[str, ...]:
    forms = [tok.surface.casefold()]
    if tok.lemma:
        forms.append(tok.lemma.casefold())
    return tuple(forms)


def _is_and_or(tok, rules: RuleSet) -> bool:
    tag = tok.tag
    return (tag.category == "Conjunction" and tag.subtype in (None, "Coordinative")
            and any(f in rules.conjunctions for f in _lexical(tok)))


def scan_markers(entry, rules: Optional[RuleSet] = None) -> List[DivisibilityMarker]:
    """Find the evidence that an entry joins more than one concept.

    Conjunction: each and/or coordinator. EtcExpression: each et-cetera
    phrase, or a coordinator directly followed by the pronoun "other" (one
    marker, the coordinator is not counted again). CommaParataxis: two or
    more commas, or one comma outside an inversion template. Parenthesis:
    each balanced bracket pair. Adposition: each adposition.
    """
    rules = rules or default_rules()
    tags = _tags(entry)
    toks = entry.tokens
    n = len(toks)
    markers = []
    consumed = set()

    surfaces = [t.surface.casefold() for t in toks]
    i = 0
    while i < n:
        for phrase in rules.etc_expressions:
            if tuple(surfaces[i:i + len(phrase)]) == phrase:
                span = tuple(range(i, i + len(phrase)))
                markers.append(DivisibilityMarker("EtcExpression", span))
                consumed.update(span)
                i += len(phrase) - 1
                break
        i += 1

    for i in range(n - 1):
        if i in consumed or i + 1 in consumed:
            continue
        nxt = toks[i + 1]
        if (_is_and_or(toks[i], rules) and nxt.tag.category == "Pronoun"
                and any(f in rules.etc_pronouns for f in _lexical(nxt))):
            markers.append(DivisibilityMarker("EtcExpression", (i, i + 1)))
            consumed.update((i, i + 1))

    for i, tok in enumerate(toks):
        if i not in consumed and _is_and_or(tok, rules):
            markers.append(DivisibilityMarker("Conjunction", (i,)))

    labels = [coarse(t) for t in tags]
    commas = tuple(i for i, l in enumerate(labels) if l == PUNCT_COMMA)
    if len(commas) >= 2 or (
        len(commas) == 1 and not any(t.matches(tags) for t in rules.inversion_exceptions)
    ):
        markers.append(DivisibilityMarker("CommaParataxis", commas))

    stack = []
    for i, label in enumerate(labels):
        if label == PUNCT_OPEN:
            stack.append(i)
        elif label == PUNCT_CLOSE and stack:
            markers.append(DivisibilityMarker("Parenthesis", (stack.pop(), i)))

    for i, tag in enumerate(tags):
        if tag.category == "Adposition":
            markers.append(DivisibilityMarker("Adposition", (i,)))

    markers.sort(key=lambda m: (m.token_indices[0], m.kind))
    return markers


def match_indivisible(entry, rules: Optional[RuleSet] = None) -> Optional[str]:
    """Id of the first indivisibility rule whose template fits the whole entry."""
    rules = rules or default_rules()
    tags = _tags(entry)
    for rule in rules.indivisible:
        if rule.matches(tags):
            return rule.rule_id
    return None


def classify(entry, rules: Optional[RuleSet] = None) -> Verdict:
    """Markers win over indivisibility rules; no marker and no rule is undetermined."""
    rules = rules or default_rules()
    pattern = pattern_of(entry)
    markers = scan_markers(entry, rules)
    if markers:
        return Verdict(DIVISIBLE, pattern, types=frozenset(m.type for m in markers), markers=tuple(markers))
    rule_id = match_indivisible(entry, rules)
    if rule_id is not None:
        return Verdict(INDIVISIBLE, pattern, rule_id=rule_id)
    return Verdict(UNDETERMINED, pattern, reason="no rule matched")


def verdict_row(entry, verdict: Verdict) -> str:
    """TSV line: entry_id, pattern, outcome, rule id or marker kinds."""
    if verdict.outcome == INDIVISIBLE:
        detail = verdict.rule_id
    elif verdict.outcome == DIVISIBLE:
        detail = ",".join(m.kind for m in verdict.markers)
    else:
        detail = verdict.reason or ""
    return f"{entry.entry_id}\t{verdict.pattern.canonical}\t{verdict.outcome}\t{detail}\n"


class AtomicityClassifier(BaseEstimator):
    """Estimator wrapping :func:`classify`.

    ``rules`` may be a :class:`RuleSet`, a path to a rule file, or ``None``
    for the shipped default. ``predict`` returns one :class:`Verdict` per
    tagged entry.
    """

    def __init__(self, rules=None):
        self.rules = rules

    def fit(self, X=None, y=None):
        if self.rules is None:
            self.rules_ = default_rules()
        elif isinstance(self.rules, RuleSet):
            self.rules_ = self.rules
        else:
            self.rules_ = RuleSet.from_file(self.rules)
        return self

    def predict(self, X) -> List[Verdict]:
        from .validation import check_entries, check_fitted

        check_fitted(self, "rules_")
        return [classify(e, self.rules_) for e in check_entries(X, tagged=True)]

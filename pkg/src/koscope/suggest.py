"""Decomposition proposals for divisible entries, emitted as SKOS fragments.

Output is always a proposal for human review; it never claims to be the
source vocabulary's content.
"""
from __future__ import annotations

import dataclasses
import re
import unicodedata
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
from urllib.parse import quote

from rdflib import Graph, Literal, Namespace, URIRef
from rdflib.namespace import RDF, SKOS

from .classify import DIVISIBLE, INDIVISIBLE, RuleSet, Verdict, classify, default_rules
from .ingest import ConceptEntry

PROV = Namespace("http://www.w3.org/ns/prov#")
ENUMERATION_HINT = "enumeration"
QUALIFIER_HINT = "qualifier"
PROPOSAL_HEADER = "# PROPOSAL: machine-suggested decomposition; not part of the source vocabulary\n"

_IRI_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:[^\s<>\"{}|\\^`]*$")


@dataclass(frozen=True)
class Decomposition:
    entry_id: str
    lang: str
    spans: Tuple[Tuple[int, int], ...]          # token ranges, end exclusive
    labels: Tuple[str, ...]
    relation_hints: Tuple[str, ...]             # one per adjacent pair
    separators: Tuple[str, ...]                 # text around/between constituents
    verdicts: Tuple[Verdict, ...]
    confidence: str

    def __post_init__(self):
        if len(self.spans) < 2:
            raise ValueError("a decomposition needs at least two constituents")
        for (s1, e1), (s2, _) in zip(self.spans, self.spans[1:]):
            if e1 > s2:
                raise ValueError("constituent spans overlap or are out of order")
        if len(self.relation_hints) != len(self.spans) - 1:
            raise ValueError("need one relation hint per adjacent pair")

    def reconstruct(self) -> str:
        out = self.separators[0]
        for label, sep in zip(self.labels, self.separators[1:]):
            out += label + sep
        return out

    def to_dict(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "constituents": list(self.labels),
            "spans": [list(s) for s in self.spans],
            "relation_hints": list(self.relation_hints),
            "confidence": self.confidence,
            "constituent_outcomes": [v.outcome for v in self.verdicts],
        }


def _separator_hints(entry, verdict: Verdict) -> Dict[int, str]:
    hints: Dict[int, str] = {}
    for marker in verdict.markers:
        for i in marker.token_indices:
            if marker.kind == "Adposition":
                tok = entry.tokens[i]
                hints[i] = (tok.lemma or tok.surface).casefold()
            elif marker.kind == "Parenthesis":
                hints[i] = QUALIFIER_HINT
            else:
                hints.setdefault(i, ENUMERATION_HINT)
    return hints


def _runs(entry, separators: Dict[int, str]) -> List[Tuple[int, int]]:
    runs = []
    start = None
    for i in range(len(entry.tokens) + 1):
        inside = i < len(entry.tokens) and i not in separators
        if inside and start is None:
            start = i
        elif not inside and start is not None:
            runs.append((start, i))
            start = None
    trimmed = []
    for s, e in runs:
        while s < e and entry.tokens[s].kind in ("Punct", "Symbol"):
            s += 1
        while e > s and entry.tokens[e - 1].kind in ("Punct", "Symbol"):
            e -= 1
        if any(entry.tokens[i].kind == "Word" for i in range(s, e)):
            trimmed.append((s, e))
    return trimmed


def _gap_hint(hints: Dict[int, str], lo: int, hi: int) -> str:
    found = [hints[i] for i in range(lo, hi) if i in hints]
    adpositions = [h for h in found if h not in (ENUMERATION_HINT, QUALIFIER_HINT)]
    if adpositions:
        return "/".join(dict.fromkeys(adpositions))
    if QUALIFIER_HINT in found:
        return QUALIFIER_HINT
    return ENUMERATION_HINT


def _sub_entry(entry, s: int, e: int, n: int) -> ConceptEntry:
    base = entry.tokens[s].offset
    tokens = tuple(
        dataclasses.replace(t, index=j, offset=t.offset - base, ws_after=t.ws_after if j < e - s - 1 else "")
        for j, t in enumerate(entry.tokens[s:e])
    )
    label = "".join(t.surface + t.ws_after for t in tokens)
    return ConceptEntry(f"{entry.entry_id}/{n}", label, entry.lang, entry.corpus_id, tokens)


def split(entry, verdict: Verdict, rules: Optional[RuleSet] = None) -> Optional[Decomposition]:
    """Cut a divisible entry at its markers and re-classify each piece.

    Confidence is ``high`` only when every piece is indivisible on its own.
    Returns ``None`` for non-divisible verdicts or when fewer than two
    pieces with a word in them survive.
    """
    if verdict.outcome != DIVISIBLE:
        return None
    rules = rules or default_rules()
    hints = _separator_hints(entry, verdict)
    spans = _runs(entry, hints)
    if len(spans) < 2:
        return None

    label = "".join(t.surface + t.ws_after for t in entry.tokens)
    base = entry.tokens[0].offset

    def char_start(i):
        return entry.tokens[i].offset - base

    def char_end(i):
        return entry.tokens[i].offset - base + len(entry.tokens[i].surface)

    labels, separators, verdicts = [], [], []
    cursor = 0
    for n, (s, e) in enumerate(spans, 1):
        separators.append(label[cursor:char_start(s)])
        labels.append(label[char_start(s):char_end(e - 1)])
        cursor = char_end(e - 1)
        verdicts.append(classify(_sub_entry(entry, s, e, n), rules))
    separators.append(label[cursor:])
    relation_hints = tuple(_gap_hint(hints, e1, s2) for (_, e1), (s2, _) in zip(spans, spans[1:]))
    confidence = "high" if all(v.outcome == INDIVISIBLE for v in verdicts) else "low"
    return Decomposition(entry.entry_id, entry.lang, tuple(spans), tuple(labels), relation_hints,
                         tuple(separators), tuple(verdicts), confidence)


def check_base_iri(base_iri: str) -> str:
    if not base_iri or not _IRI_RE.match(base_iri):
        raise ValueError(f"{base_iri!r} is not a valid IRI prefix")
    return base_iri


def slug(label: str) -> str:
    text = unicodedata.normalize("NFC", label).casefold()
    text = re.sub(r"[^\w]+", "-", text).strip("-")
    return quote(text or "x", safe="-")


def source_iri(entry_id: str) -> str:
    if _IRI_RE.match(entry_id) and "://" in entry_id:
        return entry_id
    return "urn:koscope:entry:" + quote(entry_id, safe="")


def fragment_graph(decomposition: Decomposition, base_iri: str) -> Graph:
    check_base_iri(base_iri)
    graph = Graph()
    source = URIRef(source_iri(decomposition.entry_id))
    nodes: List[URIRef] = []
    for label in decomposition.labels:
        node = URIRef(base_iri + slug(label))
        nodes.append(node)
        if (node, RDF.type, SKOS.Concept) in graph:
            continue
        graph.add((node, RDF.type, SKOS.Concept))
        graph.add((node, SKOS.prefLabel, Literal(label, lang=decomposition.lang)))
        graph.add((node, PROV.wasDerivedFrom, source))
    for a, b in zip(nodes, nodes[1:]):
        if a != b and (b, SKOS.related, a) not in graph:
            graph.add((a, SKOS.related, b))
    return graph


def emit_fragment(decomposition: Decomposition, base_iri: str) -> str:
    """N-Triples proposal: one concept node per distinct constituent with a
    prefLabel, ``skos:related`` between neighbours, provenance to the source."""
    nt = fragment_graph(decomposition, base_iri).serialize(format="nt")
    lines = sorted(line for line in nt.splitlines() if line.strip())
    return PROPOSAL_HEADER + "".join(line + "\n" for line in lines)


def emit_fragments(decompositions: Sequence[Decomposition], base_iri: str) -> str:
    graph = Graph()
    for d in decompositions:
        graph += fragment_graph(d, base_iri)
    lines = sorted(line for line in graph.serialize(format="nt").splitlines() if line.strip())
    return PROPOSAL_HEADER + "".join(line + "\n" for line in lines)


def sidecar(decompositions: Sequence[Decomposition], base_iri: str) -> dict:
    """JSON-ready map from proposed IRIs to their source entries and confidence."""
    check_base_iri(base_iri)
    proposals: Dict[str, dict] = {}
    for d in decompositions:
        for label in d.labels:
            record = proposals.setdefault(base_iri + slug(label), {"label": label, "sources": []})
            record["sources"].append({
                "entry_id": d.entry_id,
                "confidence": d.confidence,
                "relation_hints": list(d.relation_hints),
            })
    return {"status": "proposal", "base_iri": base_iri, "proposals": proposals,
            "decompositions": [d.to_dict() for d in decompositions]}

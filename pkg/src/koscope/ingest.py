"""Loading concept entries from SKOS RDF, plain entry lists and tagger output."""
from __future__ import annotations

import csv
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union
from xml.sax.saxutils import quoteattr, escape

from rdflib import Graph, Literal, URIRef
from rdflib.namespace import RDF, SKOS

from .diagnostics import emit
from .morphotag import MorphoTag, TagError, decode_tag, encode_tag, TagsetMapping
from .tokenize import Token, token_kind

LANG_RE = re.compile(r"^[a-z]{2,3}(-[A-Za-z0-9]{1,8})*$")

KINDS = {
    "skos-rdf": ("turtle", "ntriples"),
    "plaintext": ("lines",),
    "pretagged": ("tagged-xml", "token-tsv"),
}
_RDF_FORMATS = {"turtle": "turtle", "ntriples": "nt"}
_SUFFIX_HINTS = {
    ".ttl": "turtle", ".turtle": "turtle", ".nt": "ntriples",
    ".txt": "lines", ".lst": "lines", ".xml": "tagged-xml", ".tsv": "token-tsv",
}
_HINT_KIND = {hint: kind for kind, hints in KINDS.items() for hint in hints}


class IngestError(Exception):
    """The input could not be read or parsed."""


@dataclass(frozen=True)
class ConceptEntry:
    entry_id: str
    raw_label: str
    lang: str
    corpus_id: str
    tokens: Tuple[Token, ...] = ()

    def __post_init__(self):
        if not self.raw_label or not self.raw_label.strip():
            raise ValueError(f"entry {self.entry_id!r}: empty label")
        if not LANG_RE.match(self.lang):
            raise ValueError(f"entry {self.entry_id!r}: invalid language tag {self.lang!r}")
        if not isinstance(self.tokens, tuple):
            object.__setattr__(self, "tokens", tuple(self.tokens))


@dataclass(frozen=True)
class CorpusSource:
    kind: str
    path: Union[str, Path]
    format_hint: str
    label_properties: Tuple[str, ...] = field(default=(str(SKOS.prefLabel),))

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.format_hint not in KINDS[self.kind]:
            raise ValueError(f"format {self.format_hint!r} is not valid for kind {self.kind!r}")

    @property
    def corpus_id(self) -> str:
        return Path(self.path).stem

    @classmethod
    def guess(cls, path: Union[str, Path], format_hint: Optional[str] = None,
              label_properties: Optional[Sequence[str]] = None) -> "CorpusSource":
        """Build a source from a path, taking the format from its suffix unless given."""
        hint = format_hint or _SUFFIX_HINTS.get(Path(path).suffix.lower())
        if hint not in _HINT_KIND:
            raise ValueError(f"cannot infer input format for {path}; pass a format hint")
        props = tuple(label_properties) if label_properties else (str(SKOS.prefLabel),)
        return cls(_HINT_KIND[hint], path, hint, props)


def _check_lang(lang: str) -> str:
    if not LANG_RE.match(lang):
        raise ValueError(f"invalid language tag {lang!r}")
    return lang


def _primary(tag: str) -> str:
    return tag.split("-", 1)[0].lower()


_NON_CONCEPT_TYPES = (SKOS.ConceptScheme, SKOS.Collection, SKOS.OrderedCollection)


def load_skos(source: CorpusSource, lang: str, diagnostics: Optional[list] = None) -> List[ConceptEntry]:
    """One entry per (concept, harvested label literal) in language ``lang``.

    Schemes and collections are skipped; untyped subjects count as concepts.
    Only the primary language subtag is compared, so ``el`` matches ``el-GR``.
    """
    if source.kind != "skos-rdf":
        raise ValueError("load_skos needs a skos-rdf source")
    _check_lang(lang)
    graph = Graph()
    try:
        with open(source.path, "rb") as fh:
            graph.parse(fh, format=_RDF_FORMATS[source.format_hint])
    except OSError as exc:
        raise IngestError(f"cannot read {source.path}: {exc}") from exc
    except Exception as exc:  # rdflib raises several parser-specific types
        raise IngestError(f"RDF syntax error in {source.path}: {exc}") from exc

    want = _primary(lang)
    skip = {s for t in _NON_CONCEPT_TYPES for s in graph.subjects(RDF.type, t)}
    found = {}
    for prop in source.label_properties:
        for subject, obj in graph.subject_objects(URIRef(prop)):
            if subject in skip or not isinstance(obj, Literal) or not obj.language:
                continue
            if _primary(obj.language) != want or not str(obj).strip():
                continue
            found.setdefault(str(subject), set()).add(str(obj).strip())

    entries = []
    for uri in sorted(found):
        labels = sorted(found[uri])
        for n, label in enumerate(labels, 1):
            entry_id = uri if len(labels) == 1 else f"{uri}#{n}"
            entries.append(ConceptEntry(entry_id, label, lang, source.corpus_id))
    if not entries:
        emit(diagnostics, "warning", "no-labels", f"no {lang!r} labels found in {source.path}")
    return entries


def load_plaintext(source: CorpusSource, lang: str, corpus_id: Optional[str] = None,
                   diagnostics: Optional[list] = None) -> List[ConceptEntry]:
    """One entry per non-blank line; ids are ``corpus_id:lineno``."""
    if source.kind != "plaintext":
        raise ValueError("load_plaintext needs a plaintext source")
    _check_lang(lang)
    corpus_id = corpus_id or source.corpus_id
    try:
        text = Path(source.path).read_bytes().decode("utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read {source.path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise IngestError(f"{source.path} is not valid UTF-8: {exc}") from exc
    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.rstrip()
        if line.strip():
            entries.append(ConceptEntry(f"{corpus_id}:{lineno}", line.strip(), lang, corpus_id))
    if not entries:
        emit(diagnostics, "warning", "no-entries", f"{source.path} contains no entries")
    return entries


def _decode_or_residual(tag_string: str, mapping, diagnostics, entry_id) -> MorphoTag:
    try:
        return decode_tag(tag_string, mapping, diagnostics)
    except TagError as exc:
        emit(diagnostics, "warning", "undecodable-tag", f"{exc}; token kept as Residual", entry_id)
        return MorphoTag("Residual", "Other")


_NO_SPACE_BEFORE = set(",.;:)]}·;!?…")
_NO_SPACE_AFTER = set("([{")


def _join_words(words: Sequence[str]) -> str:
    out = ""
    for i, w in enumerate(words):
        if i and w not in _NO_SPACE_BEFORE and words[i - 1] not in _NO_SPACE_AFTER:
            out += " "
        out += w
    return out


def build_tagged_entry(entry_id: str, rows: Sequence[Tuple[str, MorphoTag, Optional[str]]],
                       lang: str, corpus_id: str) -> ConceptEntry:
    """Assemble an entry from (word, tag, lemma) rows, re-deriving spacing."""
    words = [w for w, _, _ in rows]
    label = _join_words(words)
    tokens = []
    pos = 0
    for i, (word, tag, lemma) in enumerate(rows):
        start = label.index(word, pos)
        pos = start + len(word)
        end = label.index(words[i + 1], pos) if i + 1 < len(rows) else len(label)
        tokens.append(Token(word, token_kind(word), i, tag, lemma, label[pos:end], start))
    return ConceptEntry(entry_id, label, lang, corpus_id, tuple(tokens))


def _parse_xml(data: bytes, path) -> ET.Element:
    try:
        return ET.fromstring(data)
    except ET.ParseError:
        # tagger output is often a bare sequence of <p> elements
        try:
            body = data.decode("utf-8")
            body = re.sub(r"^\s*<\?xml[^>]*\?>", "", body)
            return ET.fromstring(f"<doc>{body}</doc>")
        except (ET.ParseError, UnicodeDecodeError) as exc:
            raise IngestError(f"malformed tagged document {path}: {exc}") from exc


def load_pretagged(source: CorpusSource, lang: str = "el", mapping: Optional[TagsetMapping] = None,
                   diagnostics: Optional[list] = None) -> List[ConceptEntry]:
    """Read tagger output: ``<p id>`` entries holding ``<s>`` sentences of
    ``<t word= tag= lemma=>`` tokens, or the equivalent token TSV."""
    if source.kind != "pretagged":
        raise ValueError("load_pretagged needs a pretagged source")
    _check_lang(lang)
    try:
        data = Path(source.path).read_bytes()
    except OSError as exc:
        raise IngestError(f"cannot read {source.path}: {exc}") from exc
    if source.format_hint == "token-tsv":
        entries = _load_token_tsv(data, source, lang, mapping, diagnostics)
    else:
        entries = _load_tagged_xml(data, source, lang, mapping, diagnostics)
    if not entries:
        emit(diagnostics, "warning", "no-entries", f"{source.path} contains no entries")
    return entries


def _load_tagged_xml(data, source, lang, mapping, diagnostics):
    root = _parse_xml(data, source.path)
    entries = []
    paragraphs = [root] if root.tag == "p" else list(root.iter("p"))
    for n, p in enumerate(paragraphs, 1):
        entry_id = p.get("id") or f"{source.corpus_id}:{n}"
        rows = []
        for t in p.iter("t"):
            word, tag_string = t.get("word"), t.get("tag")
            if not word or not tag_string:
                raise IngestError(f"{source.path}: token in {entry_id} lacks word or tag attribute")
            rows.append((word, _decode_or_residual(tag_string, mapping, diagnostics, entry_id), t.get("lemma")))
        if not rows:
            emit(diagnostics, "warning", "empty-entry", f"entry {entry_id} has no tokens; skipped", entry_id)
            continue
        entries.append(build_tagged_entry(entry_id, rows, lang, source.corpus_id))
    return entries


def _load_token_tsv(data, source, lang, mapping, diagnostics):
    try:
        lines = data.decode("utf-8").splitlines()
    except UnicodeDecodeError as exc:
        raise IngestError(f"{source.path} is not valid UTF-8: {exc}") from exc
    grouped = {}
    for lineno, row in enumerate(csv.reader(lines, delimiter="\t"), 1):
        if not row or row[0].startswith("#"):
            continue
        if len(row) < 4:
            raise IngestError(f"{source.path}:{lineno}: expected entry_id, index, surface, tag[, lemma]")
        entry_id, _, surface, tag_string = row[:4]
        lemma = row[4] if len(row) > 4 and row[4] else None
        tag = _decode_or_residual(tag_string, mapping, diagnostics, entry_id)
        grouped.setdefault(entry_id, []).append((surface, tag, lemma))
    return [build_tagged_entry(eid, rows, lang, source.corpus_id) for eid, rows in grouped.items()]


def load(source: CorpusSource, lang: str, diagnostics: Optional[list] = None) -> List[ConceptEntry]:
    if source.kind == "skos-rdf":
        return load_skos(source, lang, diagnostics)
    if source.kind == "plaintext":
        return load_plaintext(source, lang, diagnostics=diagnostics)
    return load_pretagged(source, lang, diagnostics=diagnostics)


def write_tagged_xml(entries: Sequence[ConceptEntry], mapping: Optional[TagsetMapping] = None) -> str:
    """Serialize tagged entries in the tagger-output shape read by :func:`load_pretagged`."""
    lines = ["<doc>"]
    tid = 0
    for n, entry in enumerate(entries, 1):
        lines.append(f"  <p id={quoteattr(entry.entry_id)}>")
        lines.append(f'    <s id="s{n}">')
        for tok in entry.tokens:
            tid += 1
            attrs = f"id=\"t{tid}\" word={quoteattr(tok.surface)}"
            if tok.tag is not None:
                attrs += f" tag={quoteattr(encode_tag(tok.tag, mapping))}"
            if tok.lemma:
                attrs += f" lemma={quoteattr(tok.lemma)}"
            lines.append(f"      <t {attrs}/>")
        lines.append("    </s>")
        lines.append("  </p>")
    lines.append("</doc>")
    return "\n".join(lines) + "\n"


def write_tagger_input(entries: Sequence[ConceptEntry]) -> str:
    """One ``<p id>label</p>`` per entry, the input shape the external tagger takes."""
    body = "".join(f"  <p id={quoteattr(e.entry_id)}>{escape(e.raw_label)}</p>\n" for e in entries)
    return f"<doc>\n{body}</doc>\n"

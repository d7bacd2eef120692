"""koscope: concept-atomicity analysis of SKOS / KOS labels.

Typical use::

    from koscope import CorpusSource, load, LabelTokenizer, LexiconTagger, CorpusProfiler

    entries = load(CorpusSource.guess("thesaurus.ttl"), lang="el")
    entries = LabelTokenizer().fit_transform(entries)
    entries = LexiconTagger(lang="el").fit_transform(entries)
    report = CorpusProfiler(corpus_id="thesaurus").fit(entries).report_
"""
from .classify import (COMPOSITE, DIVISIBLE, ENUMERATION, INDIVISIBLE, UNDETERMINED, AtomicityClassifier,
                       DivisibilityMarker, RuleSet, SyntacticPattern, Verdict, classify, default_rules,
                       pattern_of, scan_markers)
from .diagnostics import Diagnostic
from .ingest import ConceptEntry, CorpusSource, IngestError, load, load_plaintext, load_pretagged, load_skos
from .metrics import (CorpusCounts, CorpusProfiler, CorpusReport, build_report, count_corpus,
                      divisibility_summary, nn_breakdown, pattern_table, pos_distribution,
                      reconcile_pattern_table, render, suitability)
from .morphotag import (LexiconTagger, MorphoTag, TagError, TagsetMapping, decode_tag, default_mapping,
                        encode_tag, lexicon_tag)
from .suggest import Decomposition, emit_fragment, emit_fragments, split
from .tokenize import (EmptyLabelError, LabelTokenizer, Token, UnitCounts, deduplicate, preprocess,
                       tokenize, tokenize_entry, unit_counts)

__version__ = "0.1.0"

__all__ = [
    "AtomicityClassifier", "COMPOSITE", "ConceptEntry", "CorpusCounts", "CorpusProfiler", "CorpusReport",
    "CorpusSource", "DIVISIBLE", "Decomposition", "Diagnostic", "DivisibilityMarker", "ENUMERATION",
    "EmptyLabelError", "INDIVISIBLE", "IngestError", "LabelTokenizer", "LexiconTagger", "MorphoTag",
    "RuleSet", "SyntacticPattern", "TagError", "TagsetMapping", "Token", "UNDETERMINED", "UnitCounts",
    "Verdict", "build_report", "classify", "count_corpus", "decode_tag", "deduplicate", "default_mapping",
    "default_rules", "divisibility_summary", "emit_fragment", "emit_fragments", "encode_tag", "lexicon_tag",
    "load", "load_plaintext", "load_pretagged", "load_skos", "nn_breakdown", "pattern_of", "pattern_table",
    "pos_distribution", "preprocess", "reconcile_pattern_table", "render", "scan_markers", "split",
    "suitability", "tokenize", "tokenize_entry", "unit_counts",
]

import pytest

from koscope.ingest import (ConceptEntry, CorpusSource, IngestError, load, load_plaintext, load_pretagged,
                            load_skos, write_tagged_xml, write_tagger_input)
from koscope.morphotag import MorphoTag, encode_tag

from helpers import GOLDEN_XML, THESAURUS_TTL, golden_entries

FIGURE_XML = """<doc>
  <p id="p1">
    <s id="s1">
      <t id="t1" word="χάρτης" tag="NoCmMaSgNm" lemma="χάρτης"/>
      <t id="t2" word="εκπαιδευτικών" tag="AjBaNePlGe" lemma="εκπαιδευτικός"/>
      <t id="t3" word="ιδρυμάτων" tag="NoCmNePlGe" lemma="ίδρυμα"/>
    </s>
  </p>
</doc>
"""

TTL = """@prefix skos: <http://www.w3.org/2004/02/skos/core#> .
<http://ex.org/c1> a skos:Concept ;
    skos:prefLabel "χάρτης εκπαιδευτικών ιδρυμάτων"@el ;
    skos:altLabel "χάρτες σχολείων"@el .
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestConceptEntry:
    def test_rejects_blank_label(self):
        with pytest.raises(ValueError):
            ConceptEntry("e", "   ", "el", "c")

    @pytest.mark.parametrize("lang", ["EL", "e", "english", ""])
    def test_rejects_bad_lang(self, lang):
        with pytest.raises(ValueError):
            ConceptEntry("e", "x", lang, "c")

    def test_accepts_region(self):
        assert ConceptEntry("e", "x", "el-GR", "c").lang == "el-GR"


class TestCorpusSource:
    def test_guess_from_suffix(self, tmp_path):
        assert CorpusSource.guess(tmp_path / "a.ttl").kind == "skos-rdf"
        assert CorpusSource.guess(tmp_path / "a.nt").format_hint == "ntriples"
        assert CorpusSource.guess(tmp_path / "a.txt").kind == "plaintext"
        assert CorpusSource.guess(tmp_path / "a.xml").kind == "pretagged"

    def test_incompatible_hint(self):
        with pytest.raises(ValueError):
            CorpusSource("plaintext", "x", "turtle")

    def test_unknown_suffix(self):
        with pytest.raises(ValueError):
            CorpusSource.guess("a.docx")


class TestLoadSkos:
    def test_single_concept(self, tmp_path):
        source = CorpusSource.guess(write(tmp_path, "t.ttl", TTL))
        entries = load_skos(source, "el")
        assert [e.raw_label for e in entries] == ["χάρτης εκπαιδευτικών ιδρυμάτων"]
        assert entries[0].entry_id == "http://ex.org/c1"
        assert entries[0].corpus_id == "t"

    def test_other_language_is_empty_with_warning(self, tmp_path):
        diags = []
        assert load_skos(CorpusSource.guess(write(tmp_path, "t.ttl", TTL)), "fr", diags) == []
        assert diags[0].code == "no-labels"

    def test_alt_labels_opt_in(self, tmp_path):
        path = write(tmp_path, "t.ttl", TTL)
        props = ("http://www.w3.org/2004/02/skos/core#prefLabel", "http://www.w3.org/2004/02/skos/core#altLabel")
        entries = load_skos(CorpusSource.guess(path, label_properties=props), "el")
        assert [e.entry_id for e in entries] == ["http://ex.org/c1#1", "http://ex.org/c1#2"]

    def test_syntax_error(self, tmp_path):
        with pytest.raises(IngestError):
            load_skos(CorpusSource.guess(write(tmp_path, "bad.ttl", "<x> <y> .")), "el")

    def test_fixture_thesaurus(self):
        entries = load(CorpusSource.guess(THESAURUS_TTL), "el")
        assert len(entries) == 20
        assert len({e.entry_id for e in entries}) == 20
        assert [e.raw_label for e in load(CorpusSource.guess(THESAURUS_TTL), "en")][0] == \
            "Map of educational institutions"

    def test_ntriples(self, tmp_path):
        nt = '<http://ex.org/c> <http://www.w3.org/2004/02/skos/core#prefLabel> "Oil and natural gas"@en .\n'
        entries = load(CorpusSource.guess(write(tmp_path, "x.nt", nt)), "en")
        assert entries[0].raw_label == "Oil and natural gas"


class TestLoadPlaintext:
    def test_skips_blank_lines(self, tmp_path):
        path = write(tmp_path, "p.txt", "Oil and natural gas\nSports for children\n\nAthletes\n")
        entries = load_plaintext(CorpusSource.guess(path), "en")
        assert [e.entry_id for e in entries] == ["p:1", "p:2", "p:4"]
        assert entries[0].raw_label == "Oil and natural gas"

    def test_empty_file_warns(self, tmp_path):
        diags = []
        assert load_plaintext(CorpusSource.guess(write(tmp_path, "e.txt", "")), "en", diagnostics=diags) == []
        assert diags


class TestLoadPretagged:
    def test_figure_excerpt(self, tmp_path):
        entries = load_pretagged(CorpusSource.guess(write(tmp_path, "f.xml", FIGURE_XML)), "el")
        assert len(entries) == 1
        (entry,) = entries
        assert entry.raw_label == "χάρτης εκπαιδευτικών ιδρυμάτων"
        assert [t.tag for t in entry.tokens] == [
            MorphoTag("Noun", "Common", "Masc", "Sg", "Nom"),
            MorphoTag("Adjective", "Basic", "Neut", "Pl", "Gen"),
            MorphoTag("Noun", "Common", "Neut", "Pl", "Gen"),
        ]
        assert entry.tokens[1].lemma == "εκπαιδευτικός"

    def test_no_entries_warns(self, tmp_path):
        diags = []
        assert load_pretagged(CorpusSource.guess(write(tmp_path, "e.xml", "<doc/>")), "el", diagnostics=diags) == []
        assert diags

    def test_unknown_category_becomes_residual(self, tmp_path):
        xml = FIGURE_XML.replace('tag="AjBaNePlGe"', 'tag="XxYy"')
        diags = []
        (entry,) = load_pretagged(CorpusSource.guess(write(tmp_path, "u.xml", xml)), "el", diagnostics=diags)
        assert len(entry.tokens) == 3
        assert entry.tokens[1].tag.category == "Residual"
        assert any("XxYy" in d.message for d in diags)

    def test_token_tsv(self, tmp_path):
        tsv = "p1\t0\tΕρμής\tNoPrMaSgNm\np1\t1\t(\tPuOp\np1\t2\tπλανήτης\tNoCmMaSgNm\tπλανήτης\np1\t3\t)\tPuCl\n"
        (entry,) = load_pretagged(CorpusSource.guess(write(tmp_path, "t.tsv", tsv)), "el")
        assert entry.raw_label == "Ερμής (πλανήτης)"
        assert entry.tokens[2].lemma == "πλανήτης"

    def test_malformed_xml(self, tmp_path):
        with pytest.raises(IngestError):
            load_pretagged(CorpusSource.guess(write(tmp_path, "m.xml", "<doc><p>")), "el")

    def test_golden_round_trip(self, tmp_path):
        entries = golden_entries()
        again = load_pretagged(CorpusSource.guess(write(tmp_path, "g.xml", write_tagged_xml(entries))), "el")
        assert [[encode_tag(t.tag) for t in e.tokens] for e in again] == \
            [[encode_tag(t.tag) for t in e.tokens] for e in entries]
        assert [e.raw_label for e in again] == [e.raw_label for e in entries]

    def test_tagger_input(self):
        text = write_tagger_input(golden_entries()[:1])
        assert text == '<doc>\n  <p id="g01">Ασφάλεια</p>\n</doc>\n'

    def test_golden_fixture_size(self):
        assert GOLDEN_XML.exists()
        assert len(golden_entries()) == 32

"""Shared builders for tests: tagged entries from tag strings, and synthetic
corpora whose totals match published figures."""
from collections import Counter
from pathlib import Path

from koscope.classify import classify
from koscope.ingest import CorpusSource, build_tagged_entry, load_pretagged
from koscope.metrics import CorpusCounts
from koscope.morphotag import decode_tag
from koscope.tokenize import Token, UnitCounts

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN_XML = FIXTURES / "golden.xml"
GOLDEN_EXPECTED = FIXTURES / "golden_expected.tsv"
THESAURUS_TTL = FIXTURES / "thesaurus_el.ttl"
THREE_LINES = FIXTURES / "three.txt"

# (entries, tokens, words)
UNIT_TOTALS = {
    "eurovoc": (6882, 15234, 15067),
    "lcsh": (10308, 23670, 20497),
    "ddc": (3811, 16414, 14613),
}
UNIT_RATIOS = {  # words per entry, tokens per entry
    "eurovoc": (2.19, 2.21),
    "lcsh": (1.99, 2.30),
    "ddc": (3.83, 4.31),
}

# pattern, frequency, printed pct; LCSH "N(N)" is written in our canonical form
PATTERN_ROWS = {
    "eurovoc": [
        ("Adj+N", 2182, 31.71), ("N", 1364, 19.82), ("N+N", 819, 11.90), ("N+Art+N", 454, 6.60),
        ("Res", 191, 2.78), ("N+Adj+N", 171, 2.48), ("Adj+Adj+N", 143, 2.08), ("N+Adp+N", 118, 1.71),
        ("Adj", 103, 1.50), ("Adj+N+N", 93, 1.35),
    ],
    "lcsh": [
        ("N", 3353, 32.53), ("Adj+N", 1936, 18.78), ("N+Punct+Adj", 677, 6.57), ("N+N", 548, 5.32),
        ("N+Punct+N+Punct", 369, 3.58), ("N+Adp+N", 361, 3.50), ("N+Conj+N", 311, 3.02), ("Adj", 261, 2.53),
        ("Adj+Adj", 134, 1.30), ("Adj+N+Punct+Adj", 124, 1.20),
    ],
    "ddc": [
        ("N", 634, 16.64), ("Adj+N", 387, 10.15), ("N+N", 156, 4.09), ("N+Conj+N", 112, 2.94),
        ("Dig", 112, 2.94), ("Adj", 63, 1.65), ("N+Adj+N", 61, 1.60), ("Adj+Adj+N", 50, 1.31),
        ("N+Art+N", 44, 1.15), ("Adj+N+Conj+N", 40, 1.05),
    ],
}
PATTERN_SUMS = {"eurovoc": (5638, 81.92), "lcsh": (8084, 78.33), "ddc": (1659, 43.53)}

# genitive-second, nom + nom/acc, total N+N
NN_COUNTS = {"eurovoc": (724, 95, 819), "lcsh": (305, 241, 548), "ddc": (98, 50, 156)}

# enumeration, composite, union
DIVISIBLE_COUNTS = {"eurovoc": (97, 449, 536), "lcsh": (704, 1504, 2118), "ddc": (1224, 894, 1766)}
UNION_PCT = {"eurovoc": 7.79, "lcsh": 20.55, "ddc": 46.34}

# Eurovoc column of the POS table: (category, subtype) -> tokens
EUROVOC_POS = {
    ("Adjective", "Basic"): 3678, ("Adjective", "Comparative"): 7, ("Adjective", "Superlative"): 9,
    ("Article", "Definite"): 101, ("Article", "Indefinite"): 3,
    ("Noun", "Common"): 8443, ("Noun", "Proper"): 653,
    ("Pronoun", "Possessive"): 5, ("Pronoun", "Relative"): 6, ("Pronoun", "Relative indefinite"): 2,
    ("Verb", "Indicative"): 18, ("Numeral", "Cardinal"): 8, ("Numeral", "Ordinal"): 15,
    ("Adverb", "Multiplicative"): 5, ("Adverb", "Basic"): 82, ("Adverb", "Comparative"): 1,
    ("Adposition", "Prepart"): 69, ("Adposition", "Simple"): 299,
    ("Conjunction", "Coordinative"): 98, ("Particle", "Negative"): 35,
    ("Residual", "Foreign word"): 314, ("Abbreviation", "All CAPS"): 240,
    ("Punctuation", "Comma"): 2, ("Punctuation", "All others"): 203, ("Digit", "Numbers etc"): 2,
}


def tagged(tags, surfaces=None, entry_id="e1", lang="el", lemmas=None):
    """Entry from space-separated tag codes; surfaces default to the codes."""
    codes = tags.split() if isinstance(tags, str) else list(tags)
    if surfaces is None:
        surfaces = codes
    elif isinstance(surfaces, str):
        surfaces = surfaces.split()
    lemmas = lemmas or [None] * len(codes)
    rows = [(s, decode_tag(c), l) for s, c, l in zip(surfaces, codes, lemmas)]
    return build_tagged_entry(entry_id, rows, lang, "test")


def golden_entries():
    return load_pretagged(CorpusSource("pretagged", GOLDEN_XML, "tagged-xml"), "el")


def golden_expected():
    rows = {}
    for line in GOLDEN_EXPECTED.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        eid, pattern, outcome, rule, types, markers = line.split("\t")
        rows[eid] = {
            "pattern": pattern,
            "outcome": outcome,
            "rule": None if rule == "-" else rule,
            "types": [] if types == "-" else types.split(","),
            "markers": [] if markers == "-" else markers.split(","),
        }
    return rows


def unit_entries(entries, tokens, words):
    """Entries whose word and token totals are exactly the given counts.

    Words are spread round-robin; the extra non-word tokens are commas.
    """
    from koscope.ingest import ConceptEntry

    per_words = [words // entries + (1 if i < words % entries else 0) for i in range(entries)]
    extra = tokens - words
    per_punct = [extra // entries + (1 if i < extra % entries else 0) for i in range(entries)]
    out = []
    for i, (w, p) in enumerate(zip(per_words, per_punct)):
        toks = [Token("w", "Word", j) for j in range(w)] + [Token(",", "Punct", w + j) for j in range(p)]
        out.append(ConceptEntry(f"e{i}", "w", "el", "t1", tuple(toks)))
    return out


def pattern_counts(rows, entries):
    """Counts carrying the given top patterns, padded with distinct fillers
    that are each rarer than the rarest listed pattern."""
    patterns = Counter({p: f for p, f, _ in rows})
    remainder = entries - sum(patterns.values())
    cap = min(patterns.values()) - 1
    n = 0
    while remainder > 0:
        take = min(cap, remainder)
        patterns[f"Filler{n:04d}"] = take
        remainder -= take
        n += 1
    return CorpusCounts(units=UnitCounts(entries, entries, entries), patterns=patterns)


# prototype entries for case-driven and marker-driven fixtures
PROTO = {
    "nn_gen": "NoCmFeSgNm NoCmFeSgGe",
    "nn_nomacc": "NoCmFePlNm NoCmFePlAc",
    "nn_other": "NoCmFeSgAc NoCmFeSgNm",
    "single": "NoCmFeSgNm",
    "enum": ("NoCmFeSgNm CjCo NoCmFeSgNm", "a και b"),
    "comp": ("NoCmNePlNm AsSp NoCmNePlAc", "a για b"),
    "both": ("NoCmFeSgNm CjCo NoCmFeSgNm AsSp NoCmNePlAc", "a και b για c"),
}


def proto(name):
    spec = PROTO[name]
    if isinstance(spec, tuple):
        return tagged(spec[0], spec[1], entry_id=name)
    return tagged(spec, entry_id=name)


def corpus_from_mix(mix, total):
    """(entries, verdicts) with ``mix`` prototype counts, padded with single nouns."""
    entries, verdicts = [], []
    cache = {}
    filled = 0
    for name, n in mix.items():
        if name not in cache:
            e = proto(name)
            cache[name] = (e, classify(e))
        entries += [cache[name][0]] * n
        verdicts += [cache[name][1]] * n
        filled += n
    pad = proto("single")
    pad_verdict = classify(pad)
    entries += [pad] * (total - filled)
    verdicts += [pad_verdict] * (total - filled)
    return entries, verdicts


def nn_corpus(name):
    gen, nomacc, total = NN_COUNTS[name]
    return corpus_from_mix({"nn_gen": gen, "nn_nomacc": nomacc, "nn_other": total - gen - nomacc},
                           UNIT_TOTALS[name][0])


def divisible_corpus(name):
    enum, comp, union = DIVISIBLE_COUNTS[name]
    both = enum + comp - union
    return corpus_from_mix({"enum": enum - both, "comp": comp - both, "both": both}, UNIT_TOTALS[name][0])

"""Acceptance gate: one PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""
import random
import sys
import tempfile
import time
from pathlib import Path

import pytest
from rdflib import Graph

sys.path.insert(0, str(Path(__file__).parent))

from koscope.classify import classify
from koscope.ingest import ConceptEntry, CorpusSource, load, load_skos
from koscope.metrics import (SUITABILITY_RANK, CorpusProfiler, count_corpus, divisibility_summary, nn_breakdown,
                             pattern_table, reconcile_pattern_table, render, suitability)
from koscope.morphotag import LexiconTagger, decode_tag, default_mapping, encode_tag
from koscope.numbers import round_half_up
from koscope.suggest import emit_fragments, split
from koscope.tokenize import EmptyLabelError, deduplicate, detokenize, preprocess, tokenize, tokenize_entry, unit_counts

from helpers import (UNIT_TOTALS, UNIT_RATIOS, PATTERN_ROWS, PATTERN_SUMS, NN_COUNTS, DIVISIBLE_COUNTS, UNION_PCT, THESAURUS_TTL,
                     golden_entries, golden_expected, pattern_counts, unit_entries, nn_corpus, divisible_corpus)


def unit_ratios():
    start = time.perf_counter()
    misses = []
    for name, totals in UNIT_TOTALS.items():
        counts = unit_counts(unit_entries(*totals))
        words, tokens = UNIT_RATIOS[name]
        got = (float(counts.words_per_entry), float(counts.tokens_per_entry))
        if (counts.entries, counts.tokens, counts.words) != totals \
                or abs(got[0] - words) > 0.005 or abs(got[1] - tokens) > 0.005:
            misses.append(f"{name}: {got[0]:.4f}/{got[1]:.4f}")
    elapsed = time.perf_counter() - start
    ok = not misses and elapsed < 1.0
    return ok, f"ratios {'ok' if not misses else misses}, {elapsed:.3f}s"


def pattern_rows():
    problems = []
    for name, rows in PATTERN_ROWS.items():
        table = pattern_table(pattern_counts(rows, UNIT_TOTALS[name][0]))
        got = {r["pattern"]: r for r in table["rows"]}
        for pattern, freq, pct in rows:
            row = got.get(pattern)
            if row is None or row["frequency"] != freq or abs(round_half_up(row["pct"]) - pct) > 0.01:
                problems.append(f"{name}/{pattern}")
        found = reconcile_pattern_table(table, rows, PATTERN_SUMS[name])
        total, total_pct = table["sum"]["frequency"], round_half_up(table["sum"]["pct"])
        if name == "lcsh":
            if (total, total_pct) != (8074, 78.33) or not any("8,084" in d.message for d in found):
                problems.append("lcsh sum/diagnostic")
        elif found or total != PATTERN_SUMS[name][0] or abs(total_pct - PATTERN_SUMS[name][1]) > 0.01:
            problems.append(f"{name} sum")
    return not problems, "all rows and sums match, LCSH 8,074 flagged" if not problems else str(problems)


def nn_split():
    out, ok = [], True
    for name, want in (("eurovoc", 0), ("lcsh", 2), ("ddc", 8)):
        table = nn_breakdown(count_corpus(*nn_corpus(name)))
        gen, nomacc, _ = NN_COUNTS[name]
        ok &= (table["genitive_second"]["count"], table["nominative_nom_or_acc"]["count"]) == (gen, nomacc)
        ok &= table["remainder"] == want
        out.append(f"{name} {table['subsum']}+r{table['remainder']}")
    return ok, ", ".join(out)


def divisible_union():
    out, ok = [], True
    for name, (enum, comp, union) in DIVISIBLE_COUNTS.items():
        summary = divisibility_summary(count_corpus(*divisible_corpus(name)))
        pct = round_half_up(summary["union"]["pct"])
        ok &= summary["union"]["count"] == union and pct == UNION_PCT[name]
        ok &= summary["union"]["count"] <= summary["enumeration"]["count"] + summary["composite"]["count"]
        out.append(f"{name} {pct:.2f}%")
    return ok, ", ".join(out)


def suitability_ordering():
    verdicts = {name: suitability(divisibility_summary(count_corpus(*divisible_corpus(name))))["verdict"]
                for name in DIVISIBLE_COUNTS}
    ok = verdicts == {"eurovoc": "High", "lcsh": "Moderate", "ddc": "Low"} \
        and SUITABILITY_RANK[verdicts["eurovoc"]] > SUITABILITY_RANK[verdicts["lcsh"]] > SUITABILITY_RANK[verdicts["ddc"]]
    return ok, ", ".join(f"{k}={v}" for k, v in verdicts.items())


def golden_agreement():
    expected = golden_expected()
    start = time.perf_counter()
    entries = golden_entries()
    verdicts = [classify(e) for e in entries]
    elapsed = time.perf_counter() - start
    hits = 0
    for entry, v in zip(entries, verdicts):
        want = expected[entry.entry_id]
        hits += (v.pattern.canonical == want["pattern"] and v.outcome == want["outcome"]
                 and v.rule_id == want["rule"] and sorted(v.types) == sorted(want["types"])
                 and [m.kind for m in v.markers] == want["markers"])
    ok = hits == len(entries) == len(expected) and elapsed < 1.0
    return ok, f"{hits}/{len(expected)} verdicts, {elapsed:.3f}s"


_ALPHABET = "abcXYZαβγΆέή0123456789 ,.;:()[]-/&'\t"


def properties():
    rng = random.Random(20240901)
    failed = []

    entries = golden_entries()
    if any(decode_tag(encode_tag(t.tag)) != t.tag for e in entries for t in e.tokens):
        failed.append("codec")
    for prefix, (_, slots) in default_mapping().layouts.items():
        code = prefix + "".join(sorted(s.codes)[0] for s in slots)
        if encode_tag(decode_tag(code)) != code:
            failed.append(f"codec {code}")

    checked = 0
    while checked < 1000:
        raw = "".join(rng.choice(_ALPHABET) for _ in range(rng.randint(1, 40)))
        try:
            label = preprocess(raw)
        except EmptyLabelError:
            continue
        checked += 1
        if detokenize(tokenize(label)) != label:
            failed.append(f"reconstruct {label!r}")
            break

    raw = [rng.choice(["Oil", "Oil ", "oil", "Gas", "Oil  and gas"]) for _ in range(50)]
    once = deduplicate([ConceptEntry(f"e{i}", r, "en", "c") for i, r in enumerate(raw)])
    if deduplicate(once) != once:
        failed.append("dedup")

    base = render(CorpusProfiler(corpus_id="g").fit(entries).report_)
    for _ in range(5):
        shuffled = list(entries)
        rng.shuffle(shuffled)
        if render(CorpusProfiler(corpus_id="g").fit(shuffled).report_) != base:
            failed.append("shuffle")
            break

    verdicts = [classify(e) for e in entries]
    cut = len(entries) // 2
    if count_corpus(entries[:cut], verdicts[:cut]) + count_corpus(entries[cut:], verdicts[cut:]) \
            != count_corpus(entries, verdicts):
        failed.append("merge")
    return not failed, f"codec, {checked} labels, dedup, shuffle, merge" if not failed else str(failed)


def end_to_end():
    start = time.perf_counter()
    source = CorpusSource.guess(THESAURUS_TTL)
    tagger = LexiconTagger(lang="el").fit()
    entries = tagger.transform([tokenize_entry(e) for e in deduplicate(load(source, "el"))])
    profiler = CorpusProfiler(corpus_id=source.corpus_id).fit(entries)
    report = profiler.report_.to_dict()
    populated = all([report["general"]["entries"] == 20, report["pos_distribution"]["rows"],
                     report["pattern_table"]["rows"], report["nn_breakdown"]["total"]["count"] > 0,
                     report["divisibility_summary"]["union"]["count"] > 0])
    found = [d for d in (split(e, classify(e)) for e in entries) if d is not None]
    text = emit_fragments(found, "http://example.org/proposal/")
    graph = Graph().parse(data=text, format="nt")
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "proposals.nt"
        path.write_text(text, encoding="utf-8")
        again = load_skos(CorpusSource.guess(path), "el")
    elapsed = time.perf_counter() - start
    ok = populated and found and len(graph) > 0 and len(again) >= 2 and elapsed < 2.0
    return bool(ok), f"5 tables {'populated' if populated else 'INCOMPLETE'}, {len(found)} proposals, " \
                     f"{len(again)} labels re-ingested, {elapsed:.3f}s"


CRITERIA = [
    (1, "Unit ratios", unit_ratios),
    (2, "Pattern table", pattern_rows),
    (3, "Noun-noun breakdown", nn_split),
    (4, "Divisibility union", divisible_union),
    (5, "Suitability ordering", suitability_ordering),
    (6, "Classifier golden corpus", golden_agreement),
    (7, "Property suites", properties),
    (8, "End-to-end SKOS path", end_to_end),
]


def line(number, title, check):
    ok, detail = check()
    return ok, f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail})"


@pytest.mark.parametrize("number,title,check", CRITERIA, ids=[f"criterion{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, check, capsys):
    ok, text = line(number, title, check)
    with capsys.disabled():
        print("\n" + text)
    assert ok, text


if __name__ == "__main__":
    results = [line(*c) for c in CRITERIA]
    for _, text in results:
        print(text)
    sys.exit(0 if all(ok for ok, _ in results) else 1)

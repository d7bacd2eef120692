"""Corpus statistics: token accounting, POS distribution, pattern frequencies,
noun-noun case analysis, divisibility summary and migration suitability.

Everything is derived from :class:`CorpusCounts`, a bundle of integer tallies
that adds like a monoid, so shards can be counted separately and merged.
"""
from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from sklearn.base import BaseEstimator

from .classify import (COMPOSITE, DIVISIBLE, ENUMERATION, INDIVISIBLE, OUTCOMES, AtomicityClassifier,
                       Verdict)
from .diagnostics import Diagnostic, emit
from .morphotag import CATEGORIES, default_mapping
from .numbers import fmt_pct, round_half_up, share
from .tokenize import UnitCounts

DEFAULT_THRESHOLDS = (10.0, 30.0)
REPORT_FORMATS = ("json", "csv", "markdown")
NN_PATTERN = "N+N"


@dataclass
class CorpusCounts:
    units: UnitCounts = field(default_factory=UnitCounts)
    pos: Counter = field(default_factory=Counter)        # (category, subtype) -> tokens
    patterns: Counter = field(default_factory=Counter)   # canonical -> entries
    outcomes: Counter = field(default_factory=Counter)   # (canonical, outcome) -> entries
    rules: Counter = field(default_factory=Counter)      # rule id -> indivisible entries
    markers: Counter = field(default_factory=Counter)    # marker kind -> entries carrying it
    tallies: Counter = field(default_factory=Counter)    # named entry tallies, see add()

    def __add__(self, other: "CorpusCounts") -> "CorpusCounts":
        merged = CorpusCounts(units=self.units + other.units)
        for name in ("pos", "patterns", "outcomes", "rules", "markers", "tallies"):
            c = Counter(getattr(self, name))
            c.update(getattr(other, name))
            setattr(merged, name, c)
        return merged

    def add(self, entry, verdict: Verdict) -> None:
        """Fold one tagged entry and its verdict into the tallies."""
        words = sum(1 for t in entry.tokens if t.kind == "Word")
        self.units = self.units + UnitCounts(1, len(entry.tokens), words)
        for tok in entry.tokens:
            self.pos[(tok.tag.category, tok.tag.subtype or "")] += 1
        canonical = verdict.pattern.canonical
        self.patterns[canonical] += 1
        self.outcomes[(canonical, verdict.outcome)] += 1
        self.tallies[verdict.outcome] += 1
        if verdict.outcome == INDIVISIBLE:
            self.rules[verdict.rule_id] += 1
        if canonical == NN_PATTERN:
            first, second = (t.tag.case for t in entry.tokens)
            self.tallies["nn_total"] += 1
            if second == "Gen":
                self.tallies["nn_genitive"] += 1
            elif first == "Nom" and second in ("Nom", "Acc"):
                self.tallies["nn_nom_nomacc"] += 1
        if verdict.outcome == DIVISIBLE:
            if ENUMERATION in verdict.types:
                self.tallies["enumeration"] += 1
            if COMPOSITE in verdict.types:
                self.tallies["composite"] += 1
            for kind in sorted({m.kind for m in verdict.markers}):
                self.markers[kind] += 1
            if any(m.kind == "CommaParataxis" and len(m.token_indices) == 1 for m in verdict.markers):
                self.tallies["single_comma_parataxis"] += 1

    @property
    def entries(self) -> int:
        return self.units.entries


def count_corpus(entries: Sequence, verdicts: Sequence[Verdict]) -> CorpusCounts:
    if len(entries) != len(verdicts):
        raise ValueError("need exactly one verdict per entry")
    counts = CorpusCounts()
    for entry, verdict in zip(entries, verdicts):
        counts.add(entry, verdict)
    return counts


# --- tables ------------------------------------------------------------------

def general(counts: CorpusCounts) -> dict:
    out = counts.units.to_dict()
    out["display"] = counts.units.display()
    return out


def _subtype_order(category: str) -> Dict[str, int]:
    return {s: i for i, s in enumerate(default_mapping().subtypes(category))}


def pos_distribution(counts: CorpusCounts, diagnostics: Optional[list] = None) -> dict:
    """Token count and share per (category, subtype); closed-class share over words."""
    total = counts.units.tokens
    if not total:
        emit(diagnostics, "warning", "empty-corpus", "no tokens; POS distribution is empty")
    category_rank = {c: i for i, c in enumerate(CATEGORIES)}

    def key(item):
        (category, subtype), _ = item
        order = _subtype_order(category)
        return (category_rank.get(category, len(category_rank)), order.get(subtype, len(order)), subtype)

    rows = []
    for (category, subtype), count in sorted(counts.pos.items(), key=key):
        word_class, inflected = CATEGORIES[category]
        rows.append({
            "category": category,
            "subtype": subtype,
            "word_class": word_class,
            "inflected": inflected,
            **share(count, total),
        })
    closed = sum(n for (category, _), n in counts.pos.items() if CATEGORIES[category][0] == "closed")
    return {"tokens": total, "rows": rows, "closed_class": share(closed, counts.units.words)}


def _modal(outcome_counts: Dict[str, int]) -> str:
    return max(OUTCOMES, key=lambda o: (outcome_counts[o], -OUTCOMES.index(o)))


def pattern_table(counts: CorpusCounts, k: int = 10) -> dict:
    """Top-k patterns by frequency (ties by pattern string) with a Sum row."""
    if k < 1:
        raise ValueError("k must be at least 1")
    ranked = sorted(counts.patterns.items(), key=lambda kv: (-kv[1], kv[0]))
    rows = []
    for canonical, freq in ranked[:k]:
        outcome_counts = {o: counts.outcomes.get((canonical, o), 0) for o in OUTCOMES}
        modal = _modal(outcome_counts)
        rows.append({
            "pattern": canonical,
            "frequency": freq,
            "pct": share(freq, counts.entries)["pct"],
            "annotation": {INDIVISIBLE: "[i]", DIVISIBLE: "[d]"}.get(modal, "[u]"),
            "outcomes": outcome_counts,
        })
    total = sum(r["frequency"] for r in rows)
    return {
        "k": k,
        "entries": counts.entries,
        "rows": rows,
        "sum": {"frequency": total, "pct": share(total, counts.entries)["pct"]},
        "distinct_patterns": len(counts.patterns),
        "singleton_patterns": sum(1 for n in counts.patterns.values() if n == 1),
    }


def nn_breakdown(counts: CorpusCounts) -> dict:
    gen = counts.tallies["nn_genitive"]
    nomacc = counts.tallies["nn_nom_nomacc"]
    total = counts.tallies["nn_total"]
    return {
        "genitive_second": share(gen, counts.entries),
        "nominative_nom_or_acc": share(nomacc, counts.entries),
        "subsum": gen + nomacc,
        "total": share(total, counts.entries),
        "remainder": total - gen - nomacc,
    }


def divisibility_summary(counts: CorpusCounts) -> dict:
    return {
        "enumeration": share(counts.tallies["enumeration"], counts.entries),
        "composite": share(counts.tallies["composite"], counts.entries),
        "union": share(counts.tallies[DIVISIBLE], counts.entries),
        "single_comma_parataxis": counts.tallies["single_comma_parataxis"],
        "marker_entries": {k: counts.markers[k] for k in sorted(counts.markers)},
    }


def indivisible_coverage(counts: CorpusCounts, k: int = 10) -> dict:
    top = [p for p, _ in sorted(counts.patterns.items(), key=lambda kv: (-kv[1], kv[0]))[:k]]
    within = sum(counts.outcomes.get((p, INDIVISIBLE), 0) for p in top)
    return {
        "top_k": share(within, counts.entries),
        "overall": share(counts.tallies[INDIVISIBLE], counts.entries),
        "undetermined": share(counts.tallies["undetermined"], counts.entries),
        "rule_hits": {r: counts.rules[r] for r in sorted(counts.rules)},
    }


def check_thresholds(thresholds: Sequence[float]) -> Tuple[float, float]:
    if len(thresholds) != 2 or not thresholds[0] < thresholds[1]:
        raise ValueError("thresholds must be two strictly increasing percentages")
    return float(thresholds[0]), float(thresholds[1])


def suitability(summary: dict, thresholds: Sequence[float] = DEFAULT_THRESHOLDS) -> dict:
    """Ordinal SKOS-migration suitability from the share of divisible entries.

    High below the lower threshold, Low above the upper one, Moderate in
    between (bounds inclusive). The thresholds are a heuristic.
    """
    low, high = check_thresholds(thresholds)
    pct = summary["union"]["pct"]
    if pct is None:
        verdict = "Undetermined"
        rationale = "empty corpus; no divisibility share to judge"
    else:
        if pct < low:
            verdict = "High"
        elif pct > high:
            verdict = "Low"
        else:
            verdict = "Moderate"
        rationale = (
            f"{fmt_pct(pct)} of entries are divisible "
            f"(enumeration {fmt_pct(summary['enumeration']['pct'])}, "
            f"composite {fmt_pct(summary['composite']['pct'])}); "
            f"heuristic bands: High < {low:g}%, Moderate {low:g}-{high:g}%, Low > {high:g}%"
        )
    return {"verdict": verdict, "union_pct": pct, "thresholds": [low, high], "rationale": rationale}


SUITABILITY_RANK = {"Low": 0, "Moderate": 1, "High": 2}


def reconcile_pattern_table(table: dict, published_rows: Sequence[Tuple[str, int, float]],
                            published_sum: Optional[Tuple[int, float]] = None,
                            tolerance: float = 0.01, diagnostics: Optional[list] = None) -> List[Diagnostic]:
    """Compare a computed pattern table with published figures.

    Emits a ``published-discrepancy`` diagnostic for each published frequency
    or percentage that the computed table does not reproduce.
    """
    found: List[Diagnostic] = []
    computed = {r["pattern"]: r for r in table["rows"]}
    for pattern, freq, pct in published_rows:
        row = computed.get(pattern)
        if row is None:
            found.append(emit(diagnostics, "warning", "published-discrepancy",
                              f"published pattern {pattern} is not in the computed top {table['k']}"))
            continue
        if row["frequency"] != freq:
            found.append(emit(diagnostics, "warning", "published-discrepancy",
                              f"{pattern}: published frequency {freq:,} vs computed {row['frequency']:,}"))
        if abs(round_half_up(row["pct"]) - pct) > tolerance:
            found.append(emit(diagnostics, "warning", "published-discrepancy",
                              f"{pattern}: published {pct:.2f}% vs computed {fmt_pct(row['pct'])}"))
    if published_sum is not None:
        freq, pct = published_sum
        computed_sum = table["sum"]
        if computed_sum["frequency"] != freq:
            found.append(emit(diagnostics, "warning", "published-discrepancy",
                              f"Sum: published {freq:,} but rows total {computed_sum['frequency']:,}"))
        if abs(round_half_up(computed_sum["pct"]) - pct) > tolerance:
            found.append(emit(diagnostics, "warning", "published-discrepancy",
                              f"Sum: published {pct:.2f}% vs computed {fmt_pct(computed_sum['pct'])}"))
    return found


# --- report ------------------------------------------------------------------

REPORT_KEYS = ("corpus_id", "general", "pos_distribution", "pattern_table", "nn_breakdown",
               "divisibility_summary", "indivisible_coverage", "suitability", "diagnostics")


@dataclass
class CorpusReport:
    corpus_id: str
    general: dict
    pos_distribution: dict
    pattern_table: dict
    nn_breakdown: dict
    divisibility_summary: dict
    indivisible_coverage: dict
    suitability: dict
    diagnostics: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {key: getattr(self, key) for key in REPORT_KEYS}

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusReport":
        return cls(**{key: data[key] for key in REPORT_KEYS})


def build_report(counts: CorpusCounts, corpus_id: str, k: int = 10,
                 thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
                 diagnostics: Sequence = ()) -> CorpusReport:
    diags = list(diagnostics)
    summary = divisibility_summary(counts)
    if summary["single_comma_parataxis"]:
        emit(diags, "info", "single-comma-policy",
             f"{summary['single_comma_parataxis']} entries are divisible because of a single comma "
             "outside the inversion templates")
    report = CorpusReport(
        corpus_id=corpus_id,
        general=general(counts),
        pos_distribution=pos_distribution(counts, diags),
        pattern_table=pattern_table(counts, k),
        nn_breakdown=nn_breakdown(counts),
        divisibility_summary=summary,
        indivisible_coverage=indivisible_coverage(counts, k),
        suitability=suitability(summary, thresholds),
    )
    report.diagnostics = [d.to_dict() if isinstance(d, Diagnostic) else dict(d) for d in diags]
    return report


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def parse_report(data: bytes) -> CorpusReport:
    return CorpusReport.from_dict(json.loads(data))


def render(report: CorpusReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        text = json.dumps(_json_safe(report.to_dict()), ensure_ascii=False, indent=2) + "\n"
    elif fmt == "csv":
        text = _render_csv(report)
    elif fmt == "markdown":
        text = _render_markdown(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}; choose from {REPORT_FORMATS}")
    return text.encode("utf-8")


def _p(pct) -> str:
    return "" if pct is None else f"{round_half_up(pct):.2f}"


def _table_sections(report: CorpusReport):
    g = report.general
    yield "general", ["measure", "value"], [
        ["entries", g["entries"]], ["tokens", g["tokens"]], ["words", g["words"]],
        ["words_per_entry", _p(g["words_per_entry"])], ["tokens_per_entry", _p(g["tokens_per_entry"])],
    ]
    pos = report.pos_distribution
    yield "pos_distribution", ["category", "subtype", "word_class", "count", "pct"], [
        [r["category"], r["subtype"], r["word_class"], r["count"], _p(r["pct"])] for r in pos["rows"]
    ] + [["closed class (of words)", "", "", pos["closed_class"]["count"], _p(pos["closed_class"]["pct"])]]
    pt = report.pattern_table
    yield "pattern_table", ["pattern", "annotation", "frequency", "pct"], [
        [r["pattern"], r["annotation"], r["frequency"], _p(r["pct"])] for r in pt["rows"]
    ] + [["Sum", "", pt["sum"]["frequency"], _p(pt["sum"]["pct"])]]
    nn = report.nn_breakdown
    yield "nn_breakdown", ["subset", "count", "pct"], [
        ["2nd noun genitive", nn["genitive_second"]["count"], _p(nn["genitive_second"]["pct"])],
        ["nominative + nominative/accusative", nn["nominative_nom_or_acc"]["count"],
         _p(nn["nominative_nom_or_acc"]["pct"])],
        ["subsum", nn["subsum"], ""],
        ["N+N total", nn["total"]["count"], _p(nn["total"]["pct"])],
    ]
    ds = report.divisibility_summary
    yield "divisibility_summary", ["type", "count", "pct"], [
        ["Enumeration/parataxis", ds["enumeration"]["count"], _p(ds["enumeration"]["pct"])],
        ["Composite", ds["composite"]["count"], _p(ds["composite"]["pct"])],
        ["SUM (unique)", ds["union"]["count"], _p(ds["union"]["pct"])],
    ]
    s = report.suitability
    yield "suitability", ["verdict", "union_pct", "rationale"], [[s["verdict"], _p(s["union_pct"]), s["rationale"]]]


def _render_csv(report: CorpusReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    first = True
    for name, header, rows in _table_sections(report):
        if not first:
            writer.writerow([])
        first = False
        writer.writerow([f"# {name}"])
        writer.writerow(header)
        writer.writerows(rows)
    return buf.getvalue()


def parse_csv_sections(text: str) -> Dict[str, List[List[str]]]:
    """Split a CSV report back into ``{section: [header, *rows]}``."""
    sections: Dict[str, List[List[str]]] = {}
    current = None
    for row in csv.reader(io.StringIO(text)):
        if not row:
            continue
        if len(row) == 1 and row[0].startswith("# "):
            current = sections.setdefault(row[0][2:], [])
            continue
        current.append(row)
    return sections


def _md_escape(value) -> str:
    return str(value).replace("|", "\\|")


def _render_markdown(report: CorpusReport) -> str:
    titles = {
        "general": "KOS entries, tokens and words",
        "pos_distribution": "Part-of-speech distribution (share of tokens)",
        "pattern_table": f"Top {report.pattern_table['k']} syntactic patterns",
        "nn_breakdown": "Noun + noun pattern by case",
        "divisibility_summary": "Divisible entries by type",
        "suitability": "SKOS migration suitability",
    }
    out = [f"# Atomicity report: {report.corpus_id}", ""]
    for name, header, rows in _table_sections(report):
        out += [f"## {titles[name]}", "", "| " + " | ".join(header) + " |",
                "|" + "|".join("---" for _ in header) + "|"]
        out += ["| " + " | ".join(_md_escape(c) for c in row) + " |" for row in rows]
        out.append("")
    pt = report.pattern_table
    out.append(f"{pt['distinct_patterns']} distinct patterns, {pt['singleton_patterns']} occurring once.")
    out.append("")
    if report.diagnostics:
        out += ["## Diagnostics", ""]
        out += [f"- {d['level']} `{d['code']}`: {d['message']}" for d in report.diagnostics]
        out.append("")
    return "\n".join(out)


class CorpusProfiler(BaseEstimator):
    """Estimator that classifies tagged entries and builds a :class:`CorpusReport`.

    ``fit`` replaces the accumulated counts, ``partial_fit`` adds a shard.
    Pass verdicts as ``y`` to skip classification.
    """

    def __init__(self, classifier=None, top_k=10, thresholds=DEFAULT_THRESHOLDS, corpus_id="corpus"):
        self.classifier = classifier
        self.top_k = top_k
        self.thresholds = thresholds
        self.corpus_id = corpus_id

    def _verdicts(self, X, y):
        if y is not None:
            return list(y)
        clf = self.classifier if self.classifier is not None else AtomicityClassifier()
        if not hasattr(clf, "rules_"):
            clf = clf.fit()
        return clf.predict(X)

    def partial_fit(self, X, y=None, diagnostics: Sequence = ()):
        from .validation import check_entries

        if self.top_k < 1:
            raise ValueError("top_k must be at least 1")
        check_thresholds(self.thresholds)
        entries = check_entries(X, tagged=True)
        counts = count_corpus(entries, self._verdicts(entries, y))
        self.counts_ = counts if not hasattr(self, "counts_") else self.counts_ + counts
        self.diagnostics_ = list(getattr(self, "diagnostics_", [])) + list(diagnostics)
        self.report_ = build_report(self.counts_, self.corpus_id, self.top_k, self.thresholds, self.diagnostics_)
        return self

    def fit(self, X, y=None, diagnostics: Sequence = ()):
        for attr in ("counts_", "diagnostics_", "report_"):
            if hasattr(self, attr):
                delattr(self, attr)
        return self.partial_fit(X, y, diagnostics)

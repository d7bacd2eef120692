"""Command-line front end: ``koscope analyze|classify|tag|suggest|dump-rules``.

Exit codes: 0 success (warnings included), 1 input error, 2 config error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import yaml

from .classify import AtomicityClassifier, PatternError, RuleSet, classify, default_rules, verdict_row
from .ingest import CorpusSource, IngestError, build_tagged_entry, load, load_pretagged, write_tagged_xml
from .metrics import DEFAULT_THRESHOLDS, REPORT_FORMATS, CorpusProfiler, check_thresholds, render
from .morphotag import (LexiconTagger, TagError, TagsetMapping, decode_tag, default_mapping,
                        load_context_rules, load_lexicon)
from .suggest import check_base_iri, emit_fragments, sidecar, split
from .tokenize import DEFAULT_STRIP, LabelTokenizer, deduplicate, dump_tokens, tokenize

log = logging.getLogger("koscope")

EXIT_OK, EXIT_INPUT, EXIT_CONFIG = 0, 1, 2
RULES_ENV = "KOSCOPE_RULES"
_REPORT_SUFFIX = {"json": "json", "csv": "csv", "markdown": "md"}


class ConfigError(Exception):
    pass


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    inputs: List[CorpusSource]
    lang: str = "el"
    rules: Optional[str] = None
    tagset: Optional[str] = None
    lexicon: Optional[str] = None
    context_rules: Optional[str] = None
    top_k: int = 10
    out: Optional[str] = None
    report_format: str = "json"
    strip: str = DEFAULT_STRIP
    dedup: bool = True
    suggest: bool = False
    base_iri: str = "urn:koscope:proposal:"
    thresholds: Tuple[float, float] = DEFAULT_THRESHOLDS
    _cache: Dict[str, object] = field(default_factory=dict, repr=False)

    def validate(self, need_inputs: bool = True) -> "RunConfig":
        if need_inputs and not self.inputs:
            raise ConfigError("at least one --input is required")
        if self.top_k < 1:
            raise ConfigError(f"--top-k must be at least 1, got {self.top_k}")
        if self.report_format not in REPORT_FORMATS:
            raise ConfigError(f"--report-format must be one of {', '.join(REPORT_FORMATS)}")
        try:
            self.thresholds = check_thresholds(self.thresholds)
            check_base_iri(self.base_iri)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def ruleset(self) -> RuleSet:
        if "rules" not in self._cache:
            try:
                self._cache["rules"] = RuleSet.from_file(self.rules) if self.rules else default_rules()
            except (OSError, ValueError, KeyError, TypeError, yaml.YAMLError) as exc:
                raise ConfigError(f"cannot load rules {self.rules}: {exc}") from exc
        return self._cache["rules"]

    def mapping(self) -> TagsetMapping:
        if "mapping" not in self._cache:
            try:
                self._cache["mapping"] = TagsetMapping.from_file(self.tagset) if self.tagset else default_mapping()
            except (OSError, ValueError) as exc:
                raise ConfigError(f"cannot load tagset {self.tagset}: {exc}") from exc
        return self._cache["mapping"]

    def tagger(self) -> LexiconTagger:
        try:
            lexicon = load_lexicon(self.lexicon, self.mapping()) if self.lexicon else None
            context = load_context_rules(self.context_rules) if self.context_rules else None
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load lexicon resources: {exc}") from exc
        return LexiconTagger(lang=self.lang.split("-")[0], lexicon=lexicon, context_rules=context).fit()


def _thresholds(text) -> Tuple[float, float]:
    if isinstance(text, (list, tuple)):
        values = list(text)
    else:
        values = [v for v in str(text).replace(",", " ").split()]
    try:
        low, high = (float(v) for v in values)
    except ValueError as exc:
        raise ConfigError(f"--thresholds needs two numbers, got {text!r}") from exc
    return low, high


def _read_config_file(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping")
    return {k.replace("-", "_"): v for k, v in data.items()}


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the optional config file and flags (flags win)."""
    file_values = _read_config_file(getattr(args, "config", None))

    def pick(name, default=None):
        value = getattr(args, name, None)
        if value is not None:
            return value
        return file_values.get(name, default)

    fmt = pick("format")
    paths = pick("input", []) or []
    if isinstance(paths, str):
        paths = [paths]
    inputs = []
    for path in paths:
        try:
            inputs.append(CorpusSource.guess(path, fmt))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    try:
        top_k = int(pick("top_k", 10))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"--top-k must be an integer: {exc}") from exc
    dedup = False if getattr(args, "no_dedup", False) else bool(file_values.get("dedup", True))
    suggest_on = True if getattr(args, "suggest", False) else bool(file_values.get("suggest", False))
    thresholds = pick("thresholds")
    return RunConfig(
        inputs=inputs,
        lang=pick("lang", "el"),
        rules=pick("rules", os.environ.get(RULES_ENV) or None),
        tagset=pick("tagset"),
        lexicon=pick("lexicon"),
        context_rules=pick("context_rules"),
        top_k=top_k,
        out=pick("out"),
        report_format=pick("report_format", "json"),
        strip=pick("strip", DEFAULT_STRIP),
        dedup=dedup,
        suggest=suggest_on,
        base_iri=pick("base_iri", "urn:koscope:proposal:"),
        thresholds=_thresholds(thresholds) if thresholds is not None else DEFAULT_THRESHOLDS,
    )


# -- pipeline -----------------------------------------------------------------

def _load_source(source: CorpusSource, config: RunConfig, diagnostics: list):
    if not Path(source.path).is_file():
        raise InputError(f"input file not found: {source.path}")
    try:
        if source.kind == "pretagged":
            return load_pretagged(source, config.lang, config.mapping(), diagnostics)
        return load(source, config.lang, diagnostics)
    except (IngestError, OSError, UnicodeDecodeError) as exc:
        raise InputError(str(exc)) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def tagged_entries(source: CorpusSource, config: RunConfig, diagnostics: list) -> list:
    """Ingest, deduplicate, tokenize and tag one corpus."""
    entries = _load_source(source, config, diagnostics)
    if source.kind == "pretagged":
        return deduplicate(entries, diagnostics) if config.dedup else entries
    tokenizer = LabelTokenizer(strip=config.strip, dedup=config.dedup).fit()
    entries = tokenizer.transform(entries)
    tagger = config.tagger()
    entries = tagger.transform(entries)
    diagnostics.extend(tokenizer.diagnostics_)
    diagnostics.extend(tagger.diagnostics_)
    return entries


def _corpus_ids(sources: Sequence[CorpusSource]) -> List[str]:
    seen: Dict[str, int] = {}
    ids = []
    for source in sources:
        base = source.corpus_id
        seen[base] = seen.get(base, 0) + 1
        ids.append(base if seen[base] == 1 else f"{base}-{seen[base]}")
    return ids


def _write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def _emit(data: bytes, out: Optional[str]) -> None:
    if out:
        _write(Path(out), data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _proposals(entries, verdicts, rules) -> list:
    found = []
    for entry, verdict in zip(entries, verdicts):
        decomposition = split(entry, verdict, rules)
        if decomposition is not None:
            found.append(decomposition)
    return found


def cmd_analyze(config: RunConfig) -> int:
    config.validate()
    if config.suggest and not config.out:
        raise ConfigError("--suggest with analyze needs --out DIR")
    rules = config.ruleset()
    classifier = AtomicityClassifier(rules).fit()
    for source, corpus_id in zip(config.inputs, _corpus_ids(config.inputs)):
        diagnostics: list = []
        entries = tagged_entries(source, config, diagnostics)
        verdicts = classifier.predict(entries)
        profiler = CorpusProfiler(classifier, config.top_k, config.thresholds, corpus_id)
        profiler.fit(entries, verdicts, diagnostics)
        data = render(profiler.report_, config.report_format)
        if config.out:
            out_dir = Path(config.out)
            _write(out_dir / f"{corpus_id}.report.{_REPORT_SUFFIX[config.report_format]}", data)
            if config.suggest:
                found = _proposals(entries, verdicts, rules)
                _write(out_dir / f"{corpus_id}.proposals.nt",
                       emit_fragments(found, config.base_iri).encode("utf-8"))
                _write(out_dir / f"{corpus_id}.proposals.json", _json_bytes(sidecar(found, config.base_iri)))
        else:
            _emit(data, None)
        log.info("%s: %d entries analyzed", corpus_id, len(entries))
    return EXIT_OK


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


_PUNCT_SURFACE = {"Comma": ",", "Open bracket": "(", "Close bracket": ")", "Terminal": "."}


def _synthetic_surface(tag, rules: RuleSet, code: str) -> str:
    # stand-in surfaces so lexical markers still fire on tag-only input
    if tag.category == "Conjunction" and tag.subtype in (None, "Coordinative"):
        return min(rules.conjunctions) if rules.conjunctions else code
    if tag.category == "Punctuation":
        return _PUNCT_SURFACE.get(tag.subtype, "-")
    return code


def entry_from_tags(tags: str, label: Optional[str], config: RunConfig, diagnostics: list):
    codes = tags.split()
    if not codes:
        raise InputError("no tags given")
    try:
        decoded = [decode_tag(code, config.mapping(), diagnostics) for code in codes]
    except TagError as exc:
        raise InputError(str(exc)) from exc
    if label:
        surfaces = [t.surface for t in tokenize(label)]
        if len(surfaces) != len(decoded):
            raise InputError(f"label has {len(surfaces)} tokens but {len(decoded)} tags were given")
    else:
        rules = config.ruleset()
        surfaces = [_synthetic_surface(t, rules, c) for t, c in zip(decoded, codes)]
    rows = [(s, t, None) for s, t in zip(surfaces, decoded)]
    return build_tagged_entry("cli:1", rows, config.lang, "cli")


def cmd_classify(config: RunConfig, tags: Optional[str] = None, label: Optional[str] = None) -> int:
    config.validate(need_inputs=tags is None)
    rules = config.ruleset()
    if tags is not None:
        diagnostics: list = []
        entry = entry_from_tags(tags, label, config, diagnostics)
        result = classify(entry, rules).to_dict()
        result["label"] = entry.raw_label
        result["diagnostics"] = [d.to_dict() for d in diagnostics]
        _emit(_json_bytes(result), config.out)
        return EXIT_OK
    lines = []
    for source in config.inputs:
        diagnostics = []
        for entry in tagged_entries(source, config, diagnostics):
            lines.append(verdict_row(entry, classify(entry, rules)))
    _emit("".join(line if line.endswith("\n") else line + "\n" for line in lines).encode("utf-8"), config.out)
    return EXIT_OK


def cmd_tag(config: RunConfig, tokens_only: bool = False) -> int:
    config.validate()
    chunks = []
    for source in config.inputs:
        diagnostics: list = []
        entries = tagged_entries(source, config, diagnostics)
        if tokens_only:
            chunks.extend(f"# {e.entry_id}\n" + dump_tokens(e) for e in entries)
        else:
            chunks.append(write_tagged_xml(entries, config.mapping()))
    _emit("".join(chunks).encode("utf-8"), config.out)
    return EXIT_OK


def cmd_suggest(config: RunConfig) -> int:
    config.validate()
    rules = config.ruleset()
    found = []
    for source in config.inputs:
        diagnostics: list = []
        entries = tagged_entries(source, config, diagnostics)
        found.extend(_proposals(entries, [classify(e, rules) for e in entries], rules))
    _emit(emit_fragments(found, config.base_iri).encode("utf-8"), config.out)
    if config.out:
        _write(Path(config.out + ".json"), _json_bytes(sidecar(found, config.base_iri)))
    return EXIT_OK


def cmd_dump_rules(config: RunConfig) -> int:
    data = yaml.safe_dump(config.ruleset().to_dict(), allow_unicode=True, sort_keys=False)
    _emit(data.encode("utf-8"), config.out)
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------

def _common(p: argparse.ArgumentParser, inputs: bool = True) -> None:
    if inputs:
        p.add_argument("--input", "-i", action="append", metavar="PATH",
                       help="corpus file; repeat for several corpora")
        p.add_argument("--format", choices=["turtle", "ntriples", "lines", "tagged-xml", "token-tsv"],
                       help="input format (default: from file suffix)")
        p.add_argument("--lang", help="language tag of labels to analyze (default el)")
        p.add_argument("--strip", help=f"characters removed before tokenizing (default {DEFAULT_STRIP!r})")
        p.add_argument("--no-dedup", action="store_true", default=False, help="keep duplicate labels")
        p.add_argument("--lexicon", help="lexicon TSV for the fallback tagger")
        p.add_argument("--context-rules", help="disambiguation rules TSV for the fallback tagger")
    p.add_argument("--rules", help=f"rule set YAML (default ${RULES_ENV} or the shipped set)")
    p.add_argument("--tagset", help="tagset mapping TSV")
    p.add_argument("--out", "-o", help="output path")
    p.add_argument("--config", help="YAML/JSON file with defaults for any flag")
    p.add_argument("--verbose", "-v", action="store_true", help="log progress to stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="koscope", description="Concept atomicity analysis for SKOS vocabularies.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full pipeline; one report per input corpus")
    _common(p)
    p.add_argument("--top-k", type=int, help="rows in the pattern table (default 10)")
    p.add_argument("--report-format", choices=REPORT_FORMATS, help="report format (default json)")
    p.add_argument("--thresholds", help="suitability cut-offs in percent, e.g. '10,30'")
    p.add_argument("--suggest", action="store_true", default=False,
                   help="also write decomposition proposals next to each report")
    p.add_argument("--base-iri", help="namespace for proposed concept IRIs")

    p = sub.add_parser("classify", help="verdicts for corpus entries or one inline tag sequence")
    _common(p)
    p.add_argument("--tags", help="space-separated positional tags of one entry")
    p.add_argument("--label", help="surface text matching --tags token by token")

    p = sub.add_parser("tag", help="tokenize and tag; write tagged XML")
    _common(p)
    p.add_argument("--tokens", action="store_true", help="dump tokens as TSV instead of tagged XML")

    p = sub.add_parser("suggest", help="N-Triples decomposition proposals for divisible entries")
    _common(p)
    p.add_argument("--base-iri", help="namespace for proposed concept IRIs")

    p = sub.add_parser("dump-rules", help="print the effective rule set as YAML")
    _common(p, inputs=False)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = build_config(args)
        if args.command == "analyze":
            return cmd_analyze(config)
        if args.command == "classify":
            return cmd_classify(config, args.tags, args.label)
        if args.command == "tag":
            return cmd_tag(config, args.tokens)
        if args.command == "suggest":
            return cmd_suggest(config)
        return cmd_dump_rules(config)
    except InputError as exc:
        print(f"koscope: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigError, PatternError) as exc:
        print(f"koscope: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

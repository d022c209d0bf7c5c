"""Scoring: exact match, the hierarchical error taxonomy and the syncretism probe.

Error labels, highest first: Target > Stem > Allomorphy > FreeVariation.
When several conditions hold for one prediction only the highest is
reported. Free variants still count as wrong for accuracy.

With a grammar oracle, "Stem" additionally requires that the prediction is
not a form of the lemma in any cell, and "Allomorphy" is also raised for
forms of another cell and for forms that skip a rewrite. Without an oracle
the labels fall back to string heuristics and reports say so.
"""

from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from morphkit.corpus import (DEFAULT_PREFIXING_LEXEMES, FeatureBundle, Triple, VerbClass, classify_verb, nfc)
from morphkit.grammar import GrammarConfig, GrammarError, ParadigmCell, full_paradigm, generate


class Label(str, enum.Enum):
    CORRECT = "Correct"
    FREE_VARIATION = "FreeVariation"
    ALLOMORPHY = "Allomorphy"
    STEM = "Stem"
    TARGET = "Target"

    def __str__(self) -> str:
        return self.value


class StemKind(str, enum.Enum):
    REMAPPING = "Remapping"
    GENERATED_STEM = "GeneratedStem"
    LOOPING = "Looping"

    def __str__(self) -> str:
        return self.value


HIERARCHY = (Label.TARGET, Label.STEM, Label.ALLOMORPHY, Label.FREE_VARIATION)
ERROR_LABELS = HIERARCHY


@dataclass(frozen=True)
class ErrorLabel:
    label: Label
    sublabel: StemKind | None = None
    flags: frozenset[Label] = frozenset()

    def __str__(self) -> str:
        return f"{self.label}({self.sublabel})" if self.sublabel else str(self.label)


def pick_label(flags: Iterable[Label]) -> Label:
    flags = set(flags)
    for label in HIERARCHY:
        if label in flags:
            return label
    return Label.CORRECT


class ProbeCategory(str, enum.Enum):
    SYNCRETIC_WITH_3SG = "SyncreticWith3SG"
    CORRECT_2SG = "Correct2SG"
    OTHER_CELL = "OtherCell"
    NONCE = "Nonce"

    def __str__(self) -> str:
        return self.value


# -- accuracy and orthography ---------------------------------------------------

def exact_accuracy(preds: Sequence[str], gold: Sequence) -> float:
    if len(preds) != len(gold):
        raise ValueError(f"{len(preds)} predictions for {len(gold)} gold items")
    if not gold:
        return 0.0
    forms = [g.form if isinstance(g, Triple) else g for g in gold]
    return sum(nfc(p) == nfc(f) for p, f in zip(preds, forms)) / len(forms)


@dataclass(frozen=True)
class VariantRules:
    """Orthographic variants: characters dropped outright plus character equivalences."""

    strip: frozenset[str] = frozenset({"é"})
    pairs: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for src, dst in self.pairs.items():
            if len(src) != 1:
                raise ValueError(f"variant pair source must be one character, got {src!r}")
            if any(ch in self.pairs for ch in dst):
                raise ValueError(f"variant target {dst!r} is itself rewritten; map {src!r} to the final form")


DEFAULT_VARIANTS = VariantRules()


def normalize_orthography(form: str, rules: VariantRules = DEFAULT_VARIANTS) -> str:
    form = nfc(form)
    out = "".join(rules.pairs.get(ch, ch) for ch in form)
    return "".join(ch for ch in out if ch not in rules.strip)


@dataclass(frozen=True)
class LoopThresholds:
    unit: int = 3
    repeats: int = 3
    length_factor: int = 4


def detect_loop(pred: str, gold: str, t: LoopThresholds = LoopThresholds()) -> bool:
    if len(pred) > t.length_factor * max(len(gold), 1):
        return True
    pattern = r"(.{%d,}?)\1{%d,}" % (t.unit, t.repeats - 1)
    return re.search(pattern, pred) is not None


def stem_preserved(stem: str, pred: str) -> bool:
    """True if ``pred`` keeps the lemma's stem as one contiguous stretch.

    Stems of three or more characters may lose their final segment, which is
    where boundary rewrites such as r+t -> n act.
    """
    if not stem or stem in pred:
        return True
    return len(stem) >= 3 and stem[:-1] in pred


def strip_infinitive(lemma: str) -> str:
    return lemma[:-1] if lemma.endswith("s") and len(lemma) > 1 else lemma


# -- oracle ---------------------------------------------------------------

class Oracle:
    """A grammar plus the lemma-to-stem mapping, with paradigms cached per stem."""

    def __init__(self, grammar: GrammarConfig, prefixing_lexemes: Iterable[str] | None = None,
                 stems: Mapping[str, str] | None = None):
        self.grammar = grammar
        self.prefixing = frozenset(grammar.prefixing_lexemes if prefixing_lexemes is None else prefixing_lexemes)
        self.stems = dict(stems or {})
        self._paradigms: dict[str, list[ParadigmCell]] = {}

    def stem(self, lemma: str) -> str:
        if lemma in self.stems:
            return self.stems[lemma]
        cls = VerbClass.PREFIXING if lemma in self.prefixing else VerbClass.AMBIFIXING
        return self.grammar.stem_for(lemma, cls)

    def paradigm(self, lemma: str) -> list[ParadigmCell]:
        stem = self.stem(lemma)
        if stem not in self._paradigms:
            self._paradigms[stem] = full_paradigm(self.grammar, stem)
        return self._paradigms[stem]

    def analyze(self, lemma: str, form: str) -> set[FeatureBundle]:
        form = nfc(form)
        return {c.bundle for c in self.paradigm(lemma) if c.form == form}

    def generate(self, lemma: str, bundle: FeatureBundle) -> str | None:
        """The oracle's form for the cell, or None when the cell is outside its coverage."""
        try:
            return generate(self.grammar, self.stem(lemma), bundle)
        except GrammarError:
            return None

    def skips_rewrite(self, lemma: str, form: str) -> bool:
        """``form`` is some cell's plain concatenation that a rewrite should have changed."""
        form = nfc(form)
        return any(c.unrewritten == form != c.form for c in self.paradigm(lemma))


def _bundle_key(b) -> str:
    return b.key if isinstance(b, FeatureBundle) else FeatureBundle.parse(b).key


def error_flags(pred: str, gold: str, lemma: str, bundle: FeatureBundle, oracle: Oracle | None = None,
                badgold: Iterable = (), known_stems: Iterable[str] = (),
                variants: VariantRules = DEFAULT_VARIANTS,
                loops: LoopThresholds = LoopThresholds()) -> tuple[set[Label], StemKind | None]:
    """Every error condition that holds, before the hierarchy is applied."""
    pred, gold = nfc(pred), nfc(gold)
    flags: set[Label] = set()
    sublabel = None
    bad = {(lem, _bundle_key(b)) for lem, b in badgold}
    if (lemma, bundle.key) in bad:
        flags.add(Label.TARGET)
    elif oracle is not None:
        expected = oracle.generate(lemma, bundle)
        if expected is not None and normalize_orthography(expected, variants) != normalize_orthography(gold, variants):
            flags.add(Label.TARGET)

    stem = oracle.stem(lemma) if oracle is not None else strip_infinitive(lemma)
    if detect_loop(pred, gold, loops):
        flags.add(Label.STEM)
        sublabel = StemKind.LOOPING
    elif not stem_preserved(stem, pred) and (oracle is None or not oracle.analyze(lemma, pred)):
        flags.add(Label.STEM)
        others = {s for s in known_stems if len(s) >= 2 and s != stem}
        sublabel = StemKind.REMAPPING if any(s in pred for s in others) else StemKind.GENERATED_STEM

    same_variant = normalize_orthography(pred, variants) == normalize_orthography(gold, variants)
    if not same_variant:
        flags.add(Label.ALLOMORPHY)
    if oracle is not None:
        other_cells = oracle.analyze(lemma, pred) - {bundle}
        if other_cells or oracle.skips_rewrite(lemma, pred):
            flags.add(Label.ALLOMORPHY)
    if same_variant:
        flags.add(Label.FREE_VARIATION)
    return flags, sublabel


def classify_error(pred: str, gold: str, lemma: str, bundle: FeatureBundle, oracle: Oracle | None = None,
                   badgold: Iterable = (), known_stems: Iterable[str] = (),
                   variants: VariantRules = DEFAULT_VARIANTS,
                   loops: LoopThresholds = LoopThresholds()) -> ErrorLabel:
    if nfc(pred) == nfc(gold):
        return ErrorLabel(Label.CORRECT)
    flags, sublabel = error_flags(pred, gold, lemma, bundle, oracle, badgold, known_stems, variants, loops)
    label = pick_label(flags)
    return ErrorLabel(label, sublabel if label is Label.STEM else None, frozenset(flags))


# -- reports ---------------------------------------------------------------

@dataclass(frozen=True)
class Instance:
    lemma: str
    bundle: FeatureBundle
    gold: str
    pred: str

    @classmethod
    def from_triple(cls, t: Triple, pred: str) -> "Instance":
        return cls(t.lemma, t.bundle, t.form, pred)


@dataclass
class EvalReport:
    total: int = 0
    correct: int = 0
    error_counts: Counter = field(default_factory=Counter)
    stem_kinds: Counter = field(default_factory=Counter)
    per_class: Counter = field(default_factory=Counter)
    per_class_total: Counter = field(default_factory=Counter)
    labels: list[ErrorLabel] = field(default_factory=list)
    heuristic: bool = False

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    def to_tsv(self) -> str:
        rows = [("metric", "value"), ("total", self.total), ("correct", self.correct),
                ("accuracy", f"{self.accuracy:.3f}")]
        rows += [(f"errors.{label}", self.error_counts[label]) for label in ERROR_LABELS]
        rows += [(f"stem.{kind}", self.stem_kinds[kind]) for kind in StemKind]
        for cls in VerbClass:
            rows.append((f"correct.{cls}", self.per_class[cls]))
            rows.append((f"total.{cls}", self.per_class_total[cls]))
        rows.append(("oracle", "heuristic" if self.heuristic else "grammar"))
        return "".join("\t".join(str(x) for x in row) + "\n" for row in rows)


def error_report(instances: Iterable[Instance], oracle: Oracle | None = None, badgold: Iterable = (),
                 known_stems: Iterable[str] = (), prefixing_lexemes=DEFAULT_PREFIXING_LEXEMES,
                 variants: VariantRules = DEFAULT_VARIANTS) -> EvalReport:
    report = EvalReport(heuristic=oracle is None)
    badgold = list(badgold)
    known_stems = set(known_stems)
    for inst in instances:
        result = classify_error(inst.pred, inst.gold, inst.lemma, inst.bundle, oracle, badgold, known_stems, variants)
        cls = classify_verb(Triple(inst.lemma, inst.bundle, inst.gold), prefixing_lexemes)
        report.total += 1
        report.per_class_total[cls] += 1
        report.labels.append(result)
        if result.label is Label.CORRECT:
            report.correct += 1
            report.per_class[cls] += 1
        else:
            report.error_counts[result.label] += 1
            if result.sublabel:
                report.stem_kinds[result.sublabel] += 1
    return report


def probe_categories(preds: Sequence[str], probe_gold: Sequence[Triple], oracle: Oracle,
                     source: str = "2SGA", syncretic_with: str = "3SGA") -> list[ProbeCategory]:
    if len(preds) != len(probe_gold):
        raise ValueError(f"{len(preds)} predictions for {len(probe_gold)} probe items")
    out = []
    for pred, t in zip(preds, probe_gold):
        pred = nfc(pred)
        if pred == t.form:
            out.append(ProbeCategory.CORRECT_2SG)
            continue
        if source in t.bundle and pred == oracle.generate(t.lemma, t.bundle.replace(source, syncretic_with)):
            out.append(ProbeCategory.SYNCRETIC_WITH_3SG)
        elif oracle.analyze(t.lemma, pred) - {t.bundle}:
            out.append(ProbeCategory.OTHER_CELL)
        else:
            out.append(ProbeCategory.NONCE)
    return out


def syncretism_probe(preds: Sequence[str], probe_gold: Sequence[Triple],
                     oracle: Oracle | GrammarConfig) -> dict[ProbeCategory, int]:
    if isinstance(oracle, GrammarConfig):
        oracle = Oracle(oracle)
    counts = Counter(probe_categories(preds, probe_gold, oracle))
    return {cat: counts[cat] for cat in ProbeCategory}


# -- plain-text tables -----------------------------------------------------------

def format_table(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Left column left-aligned, the rest right-aligned, ``|``-separated."""
    rows = [[str(x) for x in row] for row in rows]
    header = [str(h) for h in header]
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]

    def line(cells):
        parts = [cells[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(cells[1:], widths[1:])]
        return " | ".join(parts).rstrip()

    rule = "-+-".join("-" * w for w in widths)
    return "\n".join([line(header), rule] + [line(r) for r in rows]) + "\n"


def error_table(reports: Mapping[str, EvalReport]) -> str:
    """Error counts per setting, laid out like the error-count table (labels as rows)."""
    names = {Label.ALLOMORPHY: "Allomorphy", Label.FREE_VARIATION: "Free Variation",
             Label.TARGET: "Target", Label.STEM: "Stem"}
    rows = []
    for label in (Label.ALLOMORPHY, Label.FREE_VARIATION, Label.TARGET, Label.STEM):
        rows.append([names[label]] + [r.error_counts[label] for r in reports.values()])
    rows.append(["Total"] + [r.total - r.correct for r in reports.values()])
    return format_table([""] + list(reports), rows)


def per_class_table(reports: Mapping[str, EvalReport]) -> str:
    rows = [[name] + [r.per_class[c] for c in VerbClass] for name, r in reports.items()]
    return format_table([""] + [c.value for c in VerbClass], rows)

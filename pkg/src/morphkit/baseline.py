"""Non-neural inflection baseline: prefix and suffix transformation rules.

Each training pair is aligned, split around its longest COPY run (the stem
anchor) and turned into a rule ``old_prefix -> new_prefix``,
``old_suffix -> new_suffix`` for its feature bundle. Widened copies of the
rule pull stem characters into both suffixes one at a time, so a lemma ending
that was seen in training is matched by the most specific rule available.

Dump format (one rule per line, tab-separated)::

    bundle  old_prefix  new_prefix  old_suffix  new_suffix  specificity  support
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

from morphkit.align import align, longest_copy_run
from morphkit.corpus import FeatureBundle, Triple, nfc


@dataclass(frozen=True)
class TransformationRule:
    bundle: str
    old_prefix: str
    new_prefix: str
    old_suffix: str
    new_suffix: str
    support: int = 1

    @property
    def specificity(self) -> int:
        return len(self.old_suffix)

    @property
    def antecedent(self) -> tuple[str, str]:
        return (self.old_prefix, self.old_suffix)

    @property
    def consequent(self) -> tuple[str, str]:
        return (self.new_prefix, self.new_suffix)

    def sort_key(self):
        return (-self.specificity, -self.support, self.old_suffix, self.old_prefix, self.consequent)

    def matches(self, lemma: str) -> bool:
        return (len(lemma) >= len(self.old_prefix) + len(self.old_suffix)
                and lemma.startswith(self.old_prefix) and lemma.endswith(self.old_suffix))

    def apply(self, lemma: str) -> str:
        core = lemma[len(self.old_prefix):len(lemma) - len(self.old_suffix)]
        return self.new_prefix + core + self.new_suffix


def rules_for_pair(lemma: str, form: str, bundle: str) -> list[TransformationRule]:
    """The base rule for one pair followed by its widened variants."""
    lemma, form = nfc(lemma), nfc(form)
    run = longest_copy_run(align(lemma, form))
    if run is None:
        # nothing copied: substitute the whole string
        return [TransformationRule(bundle, lemma, form, "", "")]
    ls, le, fs, fe = run
    old_prefix, new_prefix = lemma[:ls], form[:fs]
    stem = lemma[ls:le]
    rules = []
    for k in range(len(stem) + 1):
        grab = stem[len(stem) - k:]
        rules.append(TransformationRule(bundle, old_prefix, new_prefix, grab + lemma[le:], grab + form[fe:]))
    return rules


class RuleSet:
    """Rules grouped by bundle key, each group in precedence order."""

    def __init__(self, rules: Mapping[str, list[TransformationRule]]):
        self._rules = {key: sorted(group, key=TransformationRule.sort_key) for key, group in rules.items()}

    def __getitem__(self, key) -> list[TransformationRule]:
        if isinstance(key, FeatureBundle):
            key = key.key
        return self._rules.get(key, [])

    def __contains__(self, key) -> bool:
        return (key.key if isinstance(key, FeatureBundle) else key) in self._rules

    def __len__(self) -> int:
        return sum(len(group) for group in self._rules.values())

    def bundles(self) -> list[str]:
        return sorted(self._rules)

    def dump(self) -> str:
        lines = []
        for key in self.bundles():
            for r in self._rules[key]:
                lines.append("\t".join([key, r.old_prefix, r.new_prefix, r.old_suffix, r.new_suffix,
                                        str(r.specificity), str(r.support)]))
        return "".join(line + "\n" for line in lines)

    @classmethod
    def load(cls, text: str) -> "RuleSet":
        groups = defaultdict(list)
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 7:
                raise ValueError(f"line {lineno}: expected 7 fields, got {len(fields)}")
            key, op, np, os_, ns, spec, support = fields
            rule = TransformationRule(key, op, np, os_, ns, int(support))
            if rule.specificity != int(spec):
                raise ValueError(f"line {lineno}: specificity {spec} does not match old suffix {os_!r}")
            groups[key].append(rule)
        return cls(groups)


def extract_rules(train: Iterable[Triple]) -> RuleSet:
    observed: dict[str, Counter] = defaultdict(Counter)
    for t in train:
        for r in rules_for_pair(t.lemma, t.form, t.bundle.key):
            observed[t.bundle.key][(r.antecedent, r.consequent)] += 1

    groups = {}
    for key, counts in observed.items():
        best: dict[tuple[str, str], tuple[tuple[str, str], int]] = {}
        for (antecedent, consequent), support in counts.items():
            current = best.get(antecedent)
            # conflicting consequents: higher support wins, then the smaller output
            if current is None or (-support, consequent) < (-current[1], current[0]):
                best[antecedent] = (consequent, support)
        groups[key] = [TransformationRule(key, a[0], c[0], a[1], c[1], s) for a, (c, s) in best.items()]
    return RuleSet(groups)


def predict(rules: RuleSet, lemma: str, bundle: FeatureBundle) -> str:
    lemma = nfc(lemma)
    for rule in rules[bundle]:
        if rule.matches(lemma):
            return rule.apply(lemma) or lemma
    return lemma


def predict_all(rules: RuleSet, items: Iterable[Triple]) -> list[str]:
    return [predict(rules, t.lemma, t.bundle) for t in items]

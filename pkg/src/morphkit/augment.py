"""Data hallucination: new triples made by swapping the aligned stem for random characters."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable

from morphkit.align import align, longest_copy_run
from morphkit.corpus import Corpus, Triple


class HallucinationError(ValueError):
    pass


@dataclass(frozen=True)
class HallucinationSpec:
    target_total: int
    min_stem_run: int = 3
    alphabet: frozenset[str] = field(default_factory=frozenset)  # empty: take it from the corpus forms
    seed: int = 0
    # off by default: same-length replacements drawn without regard to vowel/consonant class
    length_jitter: int = 0
    by_char_class: bool = False
    max_attempts: int = 1000


@dataclass(frozen=True)
class StemSpan:
    lemma_start: int
    lemma_end: int
    form_start: int
    form_end: int

    @property
    def length(self) -> int:
        return self.lemma_end - self.lemma_start


def stem_span(t: Triple) -> StemSpan | None:
    run = longest_copy_run(align(t.lemma, t.form))
    return None if run is None else StemSpan(*run)


def replace_stem(t: Triple, span: StemSpan, replacement: str) -> Triple:
    lemma = t.lemma[:span.lemma_start] + replacement + t.lemma[span.lemma_end:]
    form = t.form[:span.form_start] + replacement + t.form[span.form_end:]
    return Triple(lemma, t.bundle, form, 0)


def corpus_alphabet(c: Corpus) -> frozenset[str]:
    return frozenset(ch for t in c for ch in t.form)


VOWELS = frozenset("aeiouäëéèöüáíóú")


def _draw(rng: random.Random, stem: str, alphabet: list[str], spec: HallucinationSpec) -> str:
    length = len(stem)
    if spec.length_jitter:
        length = max(1, length + rng.randint(-spec.length_jitter, spec.length_jitter))
    if not spec.by_char_class:
        return "".join(rng.choice(alphabet) for _ in range(length))
    vowels = [ch for ch in alphabet if ch in VOWELS] or alphabet
    consonants = [ch for ch in alphabet if ch not in VOWELS] or alphabet
    template = (stem * (length // len(stem) + 1))[:length]
    return "".join(rng.choice(vowels if ch in VOWELS else consonants) for ch in template)


def hallucinate(c: Corpus, spec: HallucinationSpec, reserved: Iterable[tuple[str, str]] = ()) -> Corpus:
    """Pad ``c`` to ``spec.target_total`` entries with stem-swapped copies.

    Synthetic triples never reuse a (lemma, bundle) cell of ``c`` or of
    ``reserved`` (e.g. held-out data), and get frequency 0.
    """
    if not len(c):
        raise HallucinationError("cannot hallucinate from an empty corpus")
    if spec.target_total < len(c):
        raise HallucinationError(f"target_total {spec.target_total} is below the corpus size {len(c)}")
    needed = spec.target_total - len(c)
    if needed == 0:
        return Corpus(c.entries, c.provenance)

    eligible = []
    for t in c:
        span = stem_span(t)
        if span is not None and span.length >= spec.min_stem_run:
            eligible.append((t, span))
    if not eligible:
        raise HallucinationError("no hallucinable stems")
    alphabet = sorted(spec.alphabet or corpus_alphabet(c))
    if not alphabet:
        raise HallucinationError("empty alphabet")

    rng = random.Random(spec.seed)
    taken = {t.cell for t in c} | set(reserved)
    synthetic = []
    attempts = 0
    while len(synthetic) < needed:
        source, span = eligible[rng.randrange(len(eligible))]
        replacement = _draw(rng, source.lemma[span.lemma_start:span.lemma_end], alphabet, spec)
        new = replace_stem(source, span, replacement)
        if new.cell in taken:
            attempts += 1
            if attempts > spec.max_attempts:
                raise HallucinationError(f"gave up after {attempts} colliding draws; alphabet too small?")
            continue
        attempts = 0
        taken.add(new.cell)
        synthetic.append(new)
    return Corpus(c.entries + tuple(synthetic), c.provenance)

"""Synthetic corpora drawn from a grammar, with Zipf-distributed frequencies.

Used for experiments and tests when no natural corpus is available. Stems are
random CV(C) strings; every defined cell of every lexeme becomes a triple.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from morphkit.corpus import Corpus, Triple, VerbClass
from morphkit.grammar import GrammarConfig, enumerate_paradigm

CONSONANTS = "bdgklmprtz"
VOWELS = "aeiou"


@dataclass(frozen=True)
class Lexicon:
    ambifixing: tuple[str, ...]
    middle: tuple[str, ...]
    prefixing: tuple[str, ...]

    def lemmas(self, cls: VerbClass) -> tuple[str, ...]:
        return {VerbClass.AMBIFIXING: self.ambifixing, VerbClass.MIDDLE: self.middle,
                VerbClass.PREFIXING: self.prefixing}[cls]


def random_stems(n: int, rng: random.Random, syllables: tuple[int, int] = (2, 3)) -> list[str]:
    stems: list[str] = []
    seen = set()
    while len(stems) < n:
        parts = [rng.choice(CONSONANTS) + rng.choice(VOWELS) for _ in range(rng.randint(*syllables))]
        if rng.random() < 0.5:
            parts.append(rng.choice(CONSONANTS))
        stem = "".join(parts)
        if stem not in seen:
            seen.add(stem)
            stems.append(stem)
    return stems


def make_lexicon(n_ambifixing: int = 120, n_middle: int = 40, n_prefixing: int = 60, seed: int = 0) -> Lexicon:
    stems = random_stems(n_ambifixing + n_middle + n_prefixing, random.Random(f"{seed}:lexicon"))
    a, m = n_ambifixing, n_ambifixing + n_middle
    # non-prefixing lemmas carry the -s infinitive; prefixing lemmas are bare stems
    return Lexicon(tuple(s + "s" for s in stems[:a]), tuple(s + "s" for s in stems[a:m]), tuple(stems[m:]))


def zipf_frequencies(n: int, scale: int = 10000, exponent: float = 1.0) -> list[int]:
    """Frequency of rank r (1-based) is ``max(1, round(scale / r**exponent))``."""
    return [max(1, round(scale / (r ** exponent))) for r in range(1, n + 1)]


def synthetic_corpus(g: GrammarConfig, lexicon: Lexicon, size: int | None = None, seed: int = 0,
                     scale: int = 10000, exponent: float = 1.0) -> Corpus:
    """All paradigm cells of ``lexicon`` in a seeded random rank order.

    ``size`` truncates to the first ``size`` ranks. Frequencies fall off as
    a Zipf law over rank.
    """
    triples = []
    for cls in VerbClass:
        for lemma in lexicon.lemmas(cls):
            stem = g.stem_for(lemma, cls)
            for cell in enumerate_paradigm(g, stem, cls):
                triples.append(Triple(lemma, cell.bundle, cell.form))
    random.Random(f"{seed}:ranks").shuffle(triples)
    if size is not None:
        if size > len(triples):
            raise ValueError(f"lexicon yields {len(triples)} triples, {size} requested")
        triples = triples[:size]
    freqs = zipf_frequencies(len(triples), scale, exponent)
    return Corpus([t.with_frequency(f) for t, f in zip(triples, freqs)], "synthetic")

"""A purely concatenative toy grammar and lexicon shared by the baseline tests.

Stem letters and affix letters are disjoint so the longest common substring
of lemma and form is always exactly the stem.
"""

import itertools
import random

from morphkit.corpus import Triple, VerbClass
from morphkit.grammar import enumerate_paradigm, grammar_from_dict

STEM_CONSONANTS = "kmpl"
STEM_VOWELS = "aeio"


def toy_grammar(with_rewrite=False):
    raw = {
        "slots": ["UNDERGOER", "STEM", "THEMATIC", "DESINENCE"],
        "attributes": {
            "undergoer": {"values": ["3SGU", "NSGU"]},
            "number": {"values": ["ND", "DU"]},
            "actor": {"values": ["1SGA", "3SGA"]},
        },
        "exponents": {
            "UNDERGOER": [{"surface": "y", "when": {"undergoer": "3SGU"}},
                          {"surface": "yuw", "when": {"undergoer": "NSGU"}}],
            "THEMATIC": [{"surface": "tu", "when": {"number": "ND"}},
                         {"surface": "tw", "when": {"number": "DU"}}],
            "DESINENCE": [{"surface": "n", "when": {"actor": "1SGA"}},
                          {"surface": "dh", "when": {"actor": "3SGA"}}],
        },
        "classes": {"Ambifixing": {}},
    }
    if with_rewrite:
        raw["rewrites"] = [{"index": 1, "match": "r+t", "replace": "n"}]
    return grammar_from_dict(raw, "toy")


def stems(seed=0):
    """Training stems, held-out stems ending in a vowel, held-out stems ending in r."""
    pool = ["".join(p) for p in itertools.product(STEM_CONSONANTS, STEM_VOWELS, STEM_CONSONANTS, STEM_VOWELS)]
    random.Random(seed).shuffle(pool)
    train, heldout = pool[:60], pool[60:90]
    r_final = [s + "r" for s in pool[90:105]]
    return train, heldout, r_final


def triples(g, stem_list):
    out = []
    for stem in stem_list:
        for cell in enumerate_paradigm(g, stem, VerbClass.AMBIFIXING):
            out.append(Triple(stem + "s", cell.bundle, cell.form))
    return out

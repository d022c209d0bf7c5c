"""Train/dev/test construction: Zipfian and random size splits, verb-class
composition sets, and the held-out-cell probe set."""

from __future__ import annotations

import logging
import random
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from morphkit.augment import HallucinationSpec, hallucinate
from morphkit.corpus import (DEFAULT_PREFIXING_LEXEMES, Corpus, FeatureBundle, Triple, VerbClass,
                             classify_verb, write_corpus)
from morphkit.grammar import GrammarConfig, GrammarError, analyze, full_paradigm, generate

log = logging.getLogger(__name__)

SIZE_TAGS = ("LR", "MR", "ALL", "HR")
DEFAULT_SIZES = {"LR": 100, "MR": 1000, "ALL": 1931, "HR": 10000}
CLASS_ORDER = (VerbClass.AMBIFIXING, VerbClass.MIDDLE, VerbClass.PREFIXING)
COMPOSITIONS = (
    (VerbClass.AMBIFIXING,),
    (VerbClass.MIDDLE,),
    (VerbClass.PREFIXING,),
    (VerbClass.AMBIFIXING, VerbClass.PREFIXING),
    (VerbClass.AMBIFIXING, VerbClass.MIDDLE),
    (VerbClass.MIDDLE, VerbClass.PREFIXING),
    (VerbClass.AMBIFIXING, VerbClass.MIDDLE, VerbClass.PREFIXING),
)
PROBE_BUNDLE = FeatureBundle(["V", "ALPHA", "3SGU", "ND", "PSTPFV", "2SGA"])
PROBE_TAGS = frozenset({"2SGA", "PSTPFV"})


class SizingError(ValueError):
    pass


@dataclass(frozen=True)
class SplitSpec:
    mode: str = "zipfian"
    sizes: Mapping[str, int] = field(default_factory=lambda: dict(DEFAULT_SIZES))
    test_size: int = 200
    dev_size: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("zipfian", "random"):
            raise ValueError(f"unknown sampling mode {self.mode!r}")
        values = [self.sizes[tag] for tag in SIZE_TAGS]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError(f"sizes must satisfy LR < MR < ALL < HR, got {values}")

    @property
    def minimum_corpus(self) -> int:
        return self.sizes["ALL"] + self.test_size + self.dev_size


@dataclass(frozen=True)
class SplitResult:
    train: Corpus
    dev: Corpus
    test: Corpus
    label: str


def composition_label(classes: Sequence[VerbClass]) -> str:
    return "+".join(c.value[0] for c in classes)


# -- frequency handling ------------------------------------------------------

def _split_evenly(total: int, n: int) -> list[int]:
    base, remainder = divmod(total, n)
    return [base + remainder] + [base] * (n - 1)


def redistribute_syncretic(c: Corpus, syncretism: GrammarConfig | Mapping | None) -> Corpus:
    """Spread each surface form's frequency uniformly over the cells it realises.

    ``syncretism`` is either a grammar used as an oracle or a mapping
    ``(lemma, form) -> bundles``. Rows sharing a (lemma, form) are merged; the
    summed frequency is split by integer division with the remainder going to
    the lowest-sorted cell.
    """
    groups: OrderedDict[tuple[str, str], list[Triple]] = OrderedDict()
    for t in c:
        groups.setdefault((t.lemma, t.form), []).append(t)

    paradigms: dict[str, list] = {}
    out: list[Triple] = []
    for (lemma, form), rows in groups.items():
        if isinstance(syncretism, GrammarConfig):
            stem = syncretism.stem_for(lemma, classify_verb(rows[0], syncretism.prefixing_lexemes))
            if stem not in paradigms:
                paradigms[stem] = full_paradigm(syncretism, stem)
            known = analyze(syncretism, stem, form, paradigms[stem])
        elif syncretism is not None:
            known = {b if isinstance(b, FeatureBundle) else FeatureBundle.parse(b)
                     for b in syncretism.get((lemma, form), ())}
        else:
            known = set()
        if not known:
            if syncretism is not None:
                log.info("form %s of %s not attributable to any cell; left untouched", form, lemma)
            out.extend(rows)
            continue
        cells = sorted(known | {t.bundle for t in rows})
        if len(cells) == 1:
            out.extend(rows)
            continue
        total = sum(t.frequency for t in rows)
        for bundle, freq in zip(cells, _split_evenly(total, len(cells))):
            out.append(Triple(lemma, bundle, form, freq))
    return Corpus(out, c.provenance)


def rank_by_frequency(c: Iterable[Triple]) -> list[Triple]:
    # sorted() is stable, so equal frequencies keep corpus order
    return sorted(c, key=lambda t: -t.frequency)


def _dedupe(c: Iterable[Triple]) -> list[Triple]:
    merged: OrderedDict[tuple, Triple] = OrderedDict()
    for t in c:
        key = (t.lemma, t.bundle, t.form)
        if key in merged:
            merged[key] = merged[key].with_frequency(merged[key].frequency + t.frequency)
        else:
            merged[key] = t
    return list(merged.values())


# -- size splits -----------------------------------------------------------------

def _base_split(c: Corpus, spec: SplitSpec):
    ranked = rank_by_frequency(_dedupe(c))
    if len(ranked) < spec.minimum_corpus:
        raise SizingError(f"corpus has {len(ranked)} distinct triples; at least {spec.minimum_corpus} are needed "
                          f"(short by {spec.minimum_corpus - len(ranked)})")
    n_all = spec.sizes["ALL"]
    all_train, rest = ranked[:n_all], ranked[n_all:]
    random.Random(spec.seed).shuffle(rest)
    test = Corpus(rest[:spec.test_size], "test")
    dev = Corpus(rest[spec.test_size:spec.test_size + spec.dev_size], "dev")
    reserved = {t.cell for t in test} | {t.cell for t in dev}
    hr = hallucinate(Corpus(all_train), HallucinationSpec(spec.sizes["HR"], seed=spec.seed), reserved=reserved)
    return all_train, hr, dev, test


def zipf_split(c: Corpus, spec: SplitSpec) -> list[SplitResult]:
    """LR/MR/ALL are frequency-ranked prefixes of one list; HR extends ALL."""
    all_train, hr, dev, test = _base_split(c, spec)
    trains = {
        "LR": Corpus(all_train[:spec.sizes["LR"]]),
        "MR": Corpus(all_train[:spec.sizes["MR"]]),
        "ALL": Corpus(all_train),
        "HR": hr,
    }
    return [SplitResult(trains[tag], dev, test, tag) for tag in SIZE_TAGS]


def random_split(c: Corpus, spec: SplitSpec) -> list[SplitResult]:
    """As :func:`zipf_split`, but LR and MR are uniform draws from ALL.

    Dev and test are the least frequent forms either way, so ALL and HR are
    identical to the Zipfian ones.
    """
    all_train, hr, dev, test = _base_split(c, spec)
    shuffled = list(all_train)
    random.Random(f"{spec.seed}:random").shuffle(shuffled)
    trains = {
        "LR": Corpus(shuffled[:spec.sizes["LR"]]),
        "MR": Corpus(shuffled[:spec.sizes["MR"]]),
        "ALL": Corpus(all_train),
        "HR": hr,
    }
    return [SplitResult(trains[tag], dev, test, tag) for tag in SIZE_TAGS]


def make_splits(c: Corpus, spec: SplitSpec) -> list[SplitResult]:
    return zipf_split(c, spec) if spec.mode == "zipfian" else random_split(c, spec)


def write_splits(results: Iterable[SplitResult], outdir, mode: str, header: str = "") -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for r in results:
        for part in ("train", "dev", "test"):
            path = outdir / f"{mode}.{r.label}.{part}.tsv"
            write_corpus(path, getattr(r, part), header=header)
            written.append(path)
    return written


# -- composition sets --------------------------------------------------------------

def quotas(total: int, n: int) -> list[int]:
    """Split ``total`` over ``n`` classes; the first-listed classes absorb the remainder one each."""
    base, remainder = divmod(total, n)
    return [base + (1 if i < remainder else 0) for i in range(n)]


@dataclass(frozen=True)
class CompositionResult:
    sets: Mapping[str, Corpus]
    dev: Corpus
    test: Corpus


def _draw(pool: list[Triple], k: int, rng: random.Random, within: str) -> list[Triple]:
    if within == "zipfian":
        return rank_by_frequency(pool)[:k]
    return rng.sample(pool, k)


def composition_sets(c: Corpus, size: int = 386, seed: int = 0, prefixing_lexemes=DEFAULT_PREFIXING_LEXEMES,
                     heldout_size: int = 100, within: str = "random") -> CompositionResult:
    if within not in ("random", "zipfian"):
        raise ValueError(f"unknown within-class sampling {within!r}")
    pools: dict[VerbClass, list[Triple]] = {cls: [] for cls in CLASS_ORDER}
    for t in _dedupe(c):
        pools[classify_verb(t, prefixing_lexemes)].append(t)

    rng = random.Random(seed)
    heldout = {}
    for part in ("test", "dev"):
        chosen = []
        for cls, k in zip(CLASS_ORDER, quotas(heldout_size, len(CLASS_ORDER))):
            if len(pools[cls]) < k:
                raise SizingError(f"{cls} class exhausted: {part} needs {k}, {len(pools[cls])} left")
            picked = rng.sample(pools[cls], k)
            ids = {id(t) for t in picked}
            pools[cls] = [t for t in pools[cls] if id(t) not in ids]
            chosen.extend(picked)
        heldout[part] = Corpus(chosen, part)

    sets = {}
    for classes in COMPOSITIONS:
        label = composition_label(classes)
        set_rng = random.Random(f"{seed}:{label}")
        members = []
        for cls, k in zip(classes, quotas(size, len(classes))):
            if len(pools[cls]) < k:
                raise SizingError(f"{cls} class exhausted: set {label} needs {k}, {len(pools[cls])} available")
            members.extend(_draw(pools[cls], k, set_rng, within))
        sets[label] = Corpus(members, label)
    return CompositionResult(sets, heldout["dev"], heldout["test"])


# -- syncretism probe --------------------------------------------------------------

def syncretism_testset(g: GrammarConfig, lexemes: Iterable[str], bundle: FeatureBundle = PROBE_BUNDLE,
                       size: int = 100, prefixing_lexemes: Iterable[str] | None = None) -> Corpus:
    """``size`` triples for the held-out cell, one per eligible lexeme, forms from the grammar."""
    prefixing = set(g.prefixing_lexemes if prefixing_lexemes is None else prefixing_lexemes)
    out, seen = [], set()
    for lemma in lexemes:
        if lemma in seen or lemma in prefixing:
            continue
        seen.add(lemma)
        try:
            form = generate(g, g.stem_for(lemma, VerbClass.AMBIFIXING), bundle)
        except GrammarError:
            continue
        out.append(Triple(lemma, bundle, form))
        if len(out) == size:
            return Corpus(out, "probe")
    raise SizingError(f"only {len(out)} eligible lexemes for {bundle}; {size} needed")


def strip_cells(c: Iterable[Triple], tags: Iterable[str] = PROBE_TAGS) -> Corpus:
    """Drop every triple whose bundle contains all of ``tags``."""
    tags = frozenset(tags)
    return Corpus([t for t in c if not t.bundle.issuperset(tags)])

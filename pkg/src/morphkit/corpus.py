"""Inflection triples and the tab-separated corpus format.

One line per triple: ``lemma TAB form TAB tags [TAB frequency]``, tags joined
by ``;``. Lines starting with ``#`` are comments (the CLI writes a provenance
header); blank lines are skipped.
"""

from __future__ import annotations

import enum
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

TAG_SEPARATOR = ";"
DEFAULT_PREFIXING_LEXEMES = frozenset({"m", "tan", "awans", "kmangr"})


class CorpusError(ValueError):
    """Raised on malformed corpus text."""

    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True, order=True)
class FeatureBundle:
    """An unordered set of morphosyntactic tags naming one paradigm cell.

    Bundles compare and sort by their canonical serialization (sorted tags
    joined with ``;``).
    """

    key: str
    tags: frozenset[str] = field(compare=False)

    def __init__(self, tags: Iterable[str]):
        tags = list(tags)
        if not tags:
            raise CorpusError("feature bundle must be non-empty")
        cleaned = []
        for tag in tags:
            tag = nfc(tag)
            if not tag or TAG_SEPARATOR in tag or any(c.isspace() for c in tag):
                raise CorpusError(f"invalid tag {tag!r}")
            cleaned.append(tag)
        if len(set(cleaned)) != len(cleaned):
            raise CorpusError(f"duplicate tag in bundle {cleaned}")
        object.__setattr__(self, "tags", frozenset(cleaned))
        object.__setattr__(self, "key", TAG_SEPARATOR.join(sorted(cleaned)))

    @classmethod
    def parse(cls, text: str) -> "FeatureBundle":
        return cls(text.split(TAG_SEPARATOR))

    def __str__(self) -> str:
        return self.key

    def __repr__(self) -> str:
        return f"FeatureBundle({self.key!r})"

    def __contains__(self, tag: str) -> bool:
        return tag in self.tags

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self.tags))

    def __len__(self) -> int:
        return len(self.tags)

    def issuperset(self, tags: Iterable[str]) -> bool:
        return self.tags.issuperset(tags)

    def replace(self, old: str, new: str) -> "FeatureBundle":
        return FeatureBundle([new if t == old else t for t in self.tags])


@dataclass(frozen=True)
class Triple:
    lemma: str
    bundle: FeatureBundle
    form: str
    frequency: int = 1

    def __post_init__(self):
        if not self.lemma or not self.form:
            raise CorpusError("lemma and form must be non-empty")
        if self.frequency < 0:
            raise CorpusError(f"negative frequency {self.frequency}")
        object.__setattr__(self, "lemma", nfc(self.lemma))
        object.__setattr__(self, "form", nfc(self.form))

    @property
    def cell(self) -> tuple[str, str]:
        return (self.lemma, self.bundle.key)

    def with_frequency(self, frequency: int) -> "Triple":
        return Triple(self.lemma, self.bundle, self.form, frequency)


@dataclass(frozen=True)
class Corpus(Sequence[Triple]):
    entries: tuple[Triple, ...] = ()
    provenance: str = field(default="", compare=False)

    def __init__(self, entries: Iterable[Triple] = (), provenance: str = ""):
        object.__setattr__(self, "entries", tuple(entries))
        object.__setattr__(self, "provenance", provenance)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Corpus(self.entries[i], self.provenance)
        return self.entries[i]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.entries)

    def __add__(self, other: "Corpus") -> "Corpus":
        return Corpus(self.entries + tuple(other), self.provenance)

    def total_frequency(self) -> int:
        return sum(t.frequency for t in self.entries)


class VerbClass(str, enum.Enum):
    AMBIFIXING = "Ambifixing"
    MIDDLE = "Middle"
    PREFIXING = "Prefixing"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, name: str) -> "VerbClass":
        for member in cls:
            if name.lower() in (member.value.lower(), member.value[0].lower()):
                return member
        raise ValueError(f"unknown verb class {name!r}")


def classify_verb(triple: Triple, prefixing_lexemes=DEFAULT_PREFIXING_LEXEMES) -> VerbClass:
    # the middle tag wins over lexeme-list membership
    if "M" in triple.bundle:
        return VerbClass.MIDDLE
    if triple.lemma in prefixing_lexemes:
        return VerbClass.PREFIXING
    return VerbClass.AMBIFIXING


def parse_corpus(text: str, has_frequency: bool = True, provenance: str = "") -> Corpus:
    """Parse corpus text. With ``has_frequency`` a fourth column is accepted
    (and defaults to 1 when absent); without it, exactly three columns."""
    entries = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) == 4 and has_frequency:
            lemma, form, tags, freq_text = fields
            try:
                frequency = int(freq_text)
            except ValueError:
                raise CorpusError(f"non-integer frequency {freq_text!r}", lineno) from None
        elif len(fields) == 3:
            lemma, form, tags = fields
            frequency = 1
        else:
            raise CorpusError(f"expected 3 or 4 tab-separated fields, got {len(fields)}", lineno)
        if not (lemma and form and tags):
            raise CorpusError("empty field", lineno)
        try:
            entries.append(Triple(lemma, FeatureBundle.parse(tags), form, frequency))
        except CorpusError as exc:
            raise CorpusError(str(exc), lineno) from None
    return Corpus(entries, provenance)


def serialize_corpus(corpus: Iterable[Triple], with_frequency: bool = True, header: str = "") -> str:
    lines = [f"# {line}" for line in header.splitlines()]
    for t in corpus:
        row = [t.lemma, t.form, t.bundle.key]
        if with_frequency:
            row.append(str(t.frequency))
        lines.append("\t".join(row))
    return "".join(line + "\n" for line in lines)


def read_corpus(path, has_frequency: bool = True) -> Corpus:
    with open(path, encoding="utf-8") as f:
        return parse_corpus(f.read(), has_frequency, provenance=str(path))


def write_corpus(path, corpus: Iterable[Triple], with_frequency: bool = True, header: str = "") -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(serialize_corpus(corpus, with_frequency, header))

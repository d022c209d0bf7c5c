"""Slot-template grammar with unification-based distributed exponence.

A :class:`GrammarConfig` is pure data, normally loaded from a YAML fragment
(see ``docs/grammar-format.md``). Generation works in three steps:

1. the bundle's tags are resolved into an assignment ``attribute -> value``
   (alias tags such as ``2|3SGA`` expand into several assignments);
2. derived attributes are added by unification: the TAM table maps
   ``(series, suffix class) -> TAM`` and is read backwards to recover the
   suffix class, then the ordered unification rules fire;
3. exactly one exponent is chosen per non-stem slot, the surfaces are
   concatenated around the stem with ``+`` boundaries and the rewrite rules
   run in index order.

Analysis is generate-and-filter over the enumerated paradigm.
"""

from __future__ import annotations

import itertools
import re
import weakref
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import yaml

from morphkit.corpus import FeatureBundle, VerbClass, nfc

STEM = "STEM"
BOUNDARY = "+"
EDGE = "#"
REWRITE_BUDGET = 100
DEFAULT_SLOTS = ("UNDERGOER_PREFIX", "DIRECTIONAL", "FUT_IMP_PREFIX", STEM, "THEMATIC", "DESINENCE")

FRAGMENT_PATH = Path(__file__).parent / "data" / "nen_fragment.yaml"


class GrammarError(ValueError):
    pass


class ConfigError(GrammarError):
    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


class BundleError(GrammarError):
    """The bundle uses undeclared tags or leaves a required attribute unset."""


class CellUndefined(GrammarError):
    def __init__(self, slot: str, bundle=None):
        super().__init__(f"cell undefined: no exponent for slot {slot}" + (f" in {bundle}" if bundle else ""))
        self.slot = slot


class AmbiguousCell(GrammarError):
    pass


class RewriteBudgetExceeded(ConfigError):
    pass


@dataclass(frozen=True)
class Attribute:
    name: str
    values: tuple[str, ...]
    optional: bool = False

    def domain(self) -> tuple[str | None, ...]:
        return self.values + ((None,) if self.optional else ())


@dataclass(frozen=True)
class SlotTemplate:
    slots: tuple[str, ...] = DEFAULT_SLOTS
    optional: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.slots.count(STEM) != 1:
            raise ConfigError("STEM must appear exactly once", "slots")
        if len(set(self.slots)) != len(self.slots):
            raise ConfigError("slot names must be unique", "slots")

    @property
    def affix_slots(self) -> tuple[str, ...]:
        return tuple(s for s in self.slots if s != STEM)


def _satisfies(assignment: Mapping[str, str | None], constraints: Mapping[str, frozenset]) -> bool:
    return all(assignment.get(attr) in allowed for attr, allowed in constraints.items())


@dataclass(frozen=True)
class Exponent:
    slot: str
    surface: str
    constraints: Mapping[str, frozenset] = field(default_factory=dict)
    series: str | None = None

    def matches(self, assignment: Mapping[str, str | None]) -> bool:
        return _satisfies(assignment, self.constraints)


@dataclass(frozen=True)
class UnificationRule:
    inputs: Mapping[str, frozenset]
    output: tuple[str, str]


@dataclass(frozen=True)
class TamTable:
    """Maps (series, suffix class) to a TAM value; read backwards during generation."""

    series_attribute: str
    tam_attribute: str
    derives: str
    entries: Mapping[tuple[str, str], str]

    def suffix_class(self, series: str | None, tam: str | None) -> str | None:
        for (s, cls), value in self.entries.items():
            if s == series and value == tam:
                return cls
        return None


@dataclass(frozen=True)
class RewriteRule:
    index: int
    match: str
    replacement: str
    left: str = ""
    right: str = ""

    @property
    def pattern(self) -> re.Pattern:
        left = f"(?<={re.escape(self.left)})" if self.left else ""
        right = f"(?={re.escape(self.right)})" if self.right else ""
        return re.compile(left + re.escape(self.match) + right)

    def __str__(self) -> str:
        ctx = f" / {self.left}_{self.right}" if self.left or self.right else ""
        return f"{self.match} -> {self.replacement}{ctx}"


@dataclass(frozen=True)
class ParadigmCell:
    bundle: FeatureBundle
    form: str
    segments: tuple[str, ...] = field(default=(), compare=False)

    @property
    def unrewritten(self) -> str:
        """Plain concatenation of the slot surfaces, before any rewrite."""
        return "".join(self.segments)


@dataclass(frozen=True, eq=False)
class GrammarConfig:
    template: SlotTemplate
    attributes: tuple[Attribute, ...]
    exponents: tuple[Exponent, ...]
    unification: tuple[UnificationRule, ...] = ()
    rewrites: tuple[RewriteRule, ...] = ()
    tam_table: TamTable | None = None
    derived: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    aliases: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    classes: Mapping[VerbClass, Mapping[str, tuple]] = field(default_factory=dict)
    prefixing_lexemes: frozenset[str] = frozenset()
    name: str = ""

    def __post_init__(self):
        _validate(self)

    @property
    def attribute_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    def attribute(self, name: str) -> Attribute:
        for a in self.attributes:
            if a.name == name:
                return a
        raise KeyError(name)

    def tag_attribute(self, tag: str) -> str | None:
        for a in self.attributes:
            if tag in a.values:
                return a.name
        return None

    def exponents_for(self, slot: str) -> tuple[Exponent, ...]:
        return tuple(e for e in self.exponents if e.slot == slot)

    def stem_for(self, lemma: str, verb_class: VerbClass | None = None) -> str:
        # prefixing lemmas are listed as bare stems; the others carry the -s infinitive
        if verb_class is None:
            verb_class = VerbClass.PREFIXING if lemma in self.prefixing_lexemes else VerbClass.AMBIFIXING
        if verb_class is not VerbClass.PREFIXING and lemma.endswith("s") and len(lemma) > 1:
            return lemma[:-1]
        return lemma


def _validate(g: GrammarConfig) -> None:
    declared: dict[str, set] = {a.name: set(a.values) for a in g.attributes}
    seen_tags: dict[str, str] = {}
    for a in g.attributes:
        for v in a.values:
            if v in seen_tags:
                raise ConfigError(f"value {v!r} declared for both {seen_tags[v]} and {a.name}", f"attributes.{a.name}")
            seen_tags[v] = a.name
    for name, values in g.derived.items():
        if name in declared:
            raise ConfigError("derived attribute shadows a declared one", f"derived.{name}")
        declared[name] = set(values)

    def check_constraints(constraints, where):
        for attr, allowed in constraints.items():
            if attr not in declared:
                raise ConfigError(f"undeclared attribute {attr!r}", where)
            bad = {v for v in allowed if v is not None and v not in declared[attr]}
            if bad:
                raise ConfigError(f"undeclared values {sorted(bad)} for {attr}", where)

    slots = set(g.template.slots)
    for i, e in enumerate(g.exponents):
        where = f"exponents.{e.slot}[{i}]"
        if e.slot not in slots or e.slot == STEM:
            raise ConfigError(f"unknown slot {e.slot!r}", where)
        if not e.surface and e.slot not in g.template.optional:
            raise ConfigError("empty surface in a non-optional slot", where)
        if BOUNDARY in e.surface or EDGE in e.surface:
            raise ConfigError(f"surface may not contain {BOUNDARY!r} or {EDGE!r}", where)
        check_constraints(e.constraints, where)
    for i, rule in enumerate(g.unification):
        check_constraints(rule.inputs, f"unification[{i}]")
        attr, value = rule.output
        if attr not in g.derived or value not in g.derived[attr]:
            raise ConfigError(f"output {attr}={value} is not a declared derived value", f"unification[{i}]")
    if g.tam_table is not None:
        t = g.tam_table
        for attr in (t.series_attribute, t.tam_attribute):
            if attr not in declared:
                raise ConfigError(f"undeclared attribute {attr!r}", "tam_table")
        if t.derives not in g.derived:
            raise ConfigError(f"{t.derives!r} must be a derived attribute", "tam_table")
        for (series, cls), tam in t.entries.items():
            if series not in declared[t.series_attribute] or tam not in declared[t.tam_attribute]:
                raise ConfigError(f"entry ({series}, {cls}) -> {tam} uses undeclared values", "tam_table")
        inverse = [(s, tam) for (s, _), tam in t.entries.items()]
        if len(set(inverse)) != len(inverse):
            raise ConfigError("two suffix classes resolve to the same (series, TAM)", "tam_table")
    indices = [r.index for r in g.rewrites]
    if any(b <= a for a, b in zip(indices, indices[1:])):
        raise ConfigError("rewrite indices must be strictly increasing", "rewrites")
    for alias, targets in g.aliases.items():
        owners = {seen_tags.get(t) for t in targets}
        if None in owners or len(owners) != 1:
            raise ConfigError(f"alias {alias!r} must expand to values of one attribute", "aliases")
    for cls, restriction in g.classes.items():
        check_constraints({k: frozenset(v) for k, v in restriction.items()}, f"classes.{cls}")


# -- loading -----------------------------------------------------------------

def _value_set(values, where) -> frozenset:
    if values is None or isinstance(values, str):
        values = [values]
    if not isinstance(values, list):
        raise ConfigError("expected a value or list of values", where)
    return frozenset(None if v is None else nfc(str(v)) for v in values)


def _constraints(raw, where) -> dict[str, frozenset]:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError("constraints must be a mapping", where)
    return {str(k): _value_set(v, f"{where}.{k}") for k, v in raw.items()}


def grammar_from_dict(raw: dict, name: str = "") -> GrammarConfig:
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a mapping")
    try:
        slot_specs = raw.get("slots") or [{"name": s} for s in DEFAULT_SLOTS]
        slots, optional = [], set()
        for spec in slot_specs:
            spec = {"name": spec} if isinstance(spec, str) else spec
            slots.append(spec["name"])
            if spec.get("optional"):
                optional.add(spec["name"])
        template = SlotTemplate(tuple(slots), frozenset(optional))

        attributes = []
        for attr, spec in (raw.get("attributes") or {}).items():
            spec = {"values": spec} if isinstance(spec, list) else spec
            values = tuple(nfc(str(v)) for v in spec["values"])
            attributes.append(Attribute(str(attr), values, bool(spec.get("optional", False))))

        derived = {str(k): tuple(str(v) for v in vs) for k, vs in (raw.get("derived") or {}).items()}

        series_attr = None
        tam_table = None
        if raw.get("tam_table"):
            t = raw["tam_table"]
            entries = {}
            for i, entry in enumerate(t["entries"]):
                series, cls, tam = (str(x) for x in entry)
                if (series, cls) in entries:
                    raise ConfigError(f"duplicate key ({series}, {cls})", f"tam_table.entries[{i}]")
                entries[(series, cls)] = tam
            series_attr = str(t.get("series", "series"))
            tam_table = TamTable(series_attr, str(t.get("tam", "tam")), str(t["derives"]), entries)

        exponents = []
        for slot, specs in (raw.get("exponents") or {}).items():
            for i, spec in enumerate(specs or []):
                where = f"exponents.{slot}[{i}]"
                if "surface" not in spec:
                    raise ConfigError("missing surface", where)
                constraints = _constraints(spec.get("when"), where)
                series = spec.get("series")
                if series is not None:
                    if series_attr is None:
                        raise ConfigError("series given but no tam_table declares a series attribute", where)
                    constraints.setdefault(series_attr, frozenset([str(series)]))
                exponents.append(Exponent(str(slot), nfc(str(spec["surface"] or "")), constraints,
                                          None if series is None else str(series)))

        unification = []
        for i, spec in enumerate(raw.get("unification") or []):
            out = spec.get("set") or {}
            if len(out) != 1:
                raise ConfigError("'set' must assign exactly one attribute", f"unification[{i}]")
            (attr, value), = out.items()
            unification.append(UnificationRule(_constraints(spec.get("when"), f"unification[{i}]"),
                                               (str(attr), str(value))))

        rewrites = []
        for i, spec in enumerate(raw.get("rewrites") or []):
            rewrites.append(RewriteRule(int(spec.get("index", i + 1)), nfc(str(spec["match"])),
                                        nfc(str(spec.get("replace") or "")),
                                        nfc(str(spec.get("left") or "")), nfc(str(spec.get("right") or ""))))

        aliases = {nfc(str(k)): tuple(nfc(str(v)) for v in vs) for k, vs in (raw.get("aliases") or {}).items()}
        classes = {}
        for cls, restriction in (raw.get("classes") or {}).items():
            classes[VerbClass.parse(str(cls))] = {
                str(k): tuple(_value_set(v, f"classes.{cls}.{k}")) for k, v in (restriction or {}).items()
            }
        prefixing = frozenset(nfc(str(x)) for x in raw.get("prefixing_lexemes") or ())
    except KeyError as exc:
        raise ConfigError(f"missing key {exc}") from None
    return GrammarConfig(template, tuple(attributes), tuple(exponents), tuple(unification), tuple(rewrites),
                         tam_table, derived, aliases, classes, prefixing, name or str(raw.get("name", "")))


def load_grammar(path=FRAGMENT_PATH) -> GrammarConfig:
    with open(path, encoding="utf-8") as f:
        try:
            raw = yaml.safe_load(f)
        except yaml.YAMLError as exc:
            raise ConfigError(f"invalid YAML: {exc}", str(path)) from None
    try:
        return grammar_from_dict(raw, name=str(path))
    except ConfigError as exc:
        raise ConfigError(str(exc), str(path)) from None


def nen_fragment() -> GrammarConfig:
    return load_grammar(FRAGMENT_PATH)


# -- generation ----------------------------------------------------------------

def resolve_bundle(g: GrammarConfig, bundle: FeatureBundle) -> list[dict[str, str | None]]:
    """All assignments denoted by ``bundle`` (more than one if it uses alias tags)."""
    per_attr: dict[str, tuple[str, ...]] = {}
    for tag in bundle:
        values = g.aliases.get(tag, (tag,))
        attr = g.tag_attribute(values[0])
        if attr is None:
            raise BundleError(f"undeclared tag {tag!r}")
        if attr in per_attr:
            raise BundleError(f"two tags for attribute {attr!r} in {bundle}")
        per_attr[attr] = values
    for a in g.attributes:
        if a.name not in per_attr:
            if not a.optional:
                raise BundleError(f"bundle {bundle} leaves required attribute {a.name!r} unset")
            per_attr[a.name] = (None,)
    names = list(per_attr)
    return [dict(zip(names, combo)) for combo in itertools.product(*(per_attr[n] for n in names))]


def derive(g: GrammarConfig, assignment: Mapping[str, str | None]) -> dict[str, str | None]:
    """Extend an assignment with the attributes fixed by unification."""
    full = dict(assignment)
    for name in g.derived:
        full.setdefault(name, None)
    t = g.tam_table
    if t is not None:
        full[t.derives] = t.suffix_class(full.get(t.series_attribute), full.get(t.tam_attribute))
    for rule in g.unification:
        if _satisfies(full, rule.inputs):
            attr, value = rule.output
            if full.get(attr) not in (None, value):
                raise AmbiguousCell(f"unification gives {attr}={full[attr]} and {attr}={value}")
            full[attr] = value
    return full


def bundle_of(g: GrammarConfig, assignment: Mapping[str, str | None]) -> FeatureBundle:
    return FeatureBundle(v for a in g.attributes if (v := assignment.get(a.name)) is not None)


def _segments(g: GrammarConfig, stem: str, assignment: Mapping[str, str | None], bundle=None) -> list[str]:
    full = derive(g, assignment)
    segments = []
    for slot in g.template.slots:
        if slot == STEM:
            segments.append(stem)
            continue
        chosen = [e for e in g.exponents_for(slot) if e.matches(full)]
        if not chosen:
            raise CellUndefined(slot, bundle)
        if len(chosen) > 1:
            surfaces = ", ".join(repr(e.surface) for e in chosen)
            raise AmbiguousCell(f"ambiguous cell: slot {slot} has {len(chosen)} exponents ({surfaces})"
                                + (f" for {bundle}" if bundle else ""))
        segments.append(chosen[0].surface)
    return segments


def generate_segments(g: GrammarConfig, stem: str, bundle: FeatureBundle) -> list[str]:
    """Slot surfaces, in template order, before rewrites."""
    results = {tuple(_segments(g, nfc(stem), a, bundle)) for a in resolve_bundle(g, bundle)}
    if len(results) > 1:
        raise AmbiguousCell(f"underspecified bundle {bundle} realises distinct segmentations")
    return list(results.pop())


def generate(g: GrammarConfig, stem: str, bundle: FeatureBundle) -> str:
    stem = nfc(stem)
    forms = {apply_rewrites(g, _segments(g, stem, a, bundle)) for a in resolve_bundle(g, bundle)}
    if len(forms) > 1:
        raise AmbiguousCell(f"underspecified bundle {bundle} realises distinct forms {sorted(forms)}")
    return forms.pop()


def rewrite_string(rules: Sequence[RewriteRule], text: str, budget: int = REWRITE_BUDGET) -> str:
    """Run ``rules`` in index order over boundary-marked ``text``, each to a fixpoint.

    A step rewrites the leftmost match only; ``budget`` caps the steps per rule.
    """
    for rule in sorted(rules, key=lambda r: r.index):
        pattern = rule.pattern
        for _ in range(budget):
            new = pattern.sub(rule.replacement, text, count=1)
            if new == text:
                break
            text = new
        else:
            raise RewriteBudgetExceeded(f"rule {rule.index} ({rule}) did not reach a fixpoint in {budget} steps",
                                        "rewrites")
    return text


def apply_rewrites(g: GrammarConfig, segmented: Iterable[str]) -> str:
    marked = EDGE + BOUNDARY.join(nfc(s) for s in segmented if s) + EDGE
    out = rewrite_string(g.rewrites, marked)
    return out.replace(BOUNDARY, "").replace(EDGE, "")


# -- paradigms ---------------------------------------------------------------

def class_domains(g: GrammarConfig, verb_class: VerbClass) -> list[tuple[str, tuple]]:
    if g.classes and verb_class not in g.classes:
        raise GrammarError(f"verb class {verb_class} not supported by this grammar")
    restriction = g.classes.get(verb_class, {})
    return [(a.name, tuple(v for v in a.domain() if v in restriction.get(a.name, a.domain())))
            for a in g.attributes]


_SKELETONS: "weakref.WeakKeyDictionary[GrammarConfig, dict]" = weakref.WeakKeyDictionary()


def _skeleton(g: GrammarConfig, verb_class: VerbClass) -> list[tuple[FeatureBundle, list[str]]]:
    """Defined cells of a class with a placeholder stem; exponent choice never looks at the stem."""
    per_grammar = _SKELETONS.setdefault(g, {})
    if verb_class not in per_grammar:
        domains = class_domains(g, verb_class)
        names = [n for n, _ in domains]
        cells = []
        for combo in itertools.product(*(d for _, d in domains)):
            assignment = dict(zip(names, combo))
            try:
                segments = _segments(g, STEM, assignment)
            except CellUndefined:
                continue
            cells.append((bundle_of(g, assignment), segments))
        per_grammar[verb_class] = cells
    return per_grammar[verb_class]


def enumerate_paradigm(g: GrammarConfig, stem: str, verb_class: VerbClass) -> list[ParadigmCell]:
    stem = nfc(stem)
    at = g.template.slots.index(STEM)
    cells = []
    for bundle, segments in _skeleton(g, verb_class):
        segments = segments[:at] + [stem] + segments[at + 1:]
        cells.append(ParadigmCell(bundle, apply_rewrites(g, segments), tuple(segments)))
    return cells


def supported_classes(g: GrammarConfig) -> tuple[VerbClass, ...]:
    return tuple(g.classes) if g.classes else tuple(VerbClass)


def full_paradigm(g: GrammarConfig, stem: str) -> list[ParadigmCell]:
    return [c for cls in supported_classes(g) for c in enumerate_paradigm(g, stem, cls)]


def analyze(g: GrammarConfig, stem: str, form: str, cells: Iterable[ParadigmCell] | None = None) -> set[FeatureBundle]:
    form = nfc(form)
    if cells is None:
        cells = full_paradigm(g, stem)
    return {c.bundle for c in cells if c.form == form}


def iter_syncretic_groups(cells: Iterable[ParadigmCell]) -> Iterator[tuple[str, list[FeatureBundle]]]:
    by_form: dict[str, list[FeatureBundle]] = {}
    for c in cells:
        by_form.setdefault(c.form, []).append(c.bundle)
    for form, bundles in by_form.items():
        if len(bundles) > 1:
            yield form, sorted(bundles)

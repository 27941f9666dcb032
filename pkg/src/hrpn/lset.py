"""Labelled sets over a poset alphabet and their morphisms.

A morphism may send an element to one carrying a smaller (more specific)
label, never a greater one.  Pushouts are only built along the class M of
injective, strictly label-preserving morphisms; pullbacks label each pair
with the join of its two component labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, NamedTuple

from .poset import PosetG


class LSetError(ValueError):
    pass


class SubtypeViolation(LSetError):
    def __init__(self, x, msg=None):
        self.element = x
        super().__init__(msg or f"label condition fails at {x!r}")


class NotM(LSetError):
    pass


@dataclass(frozen=True)
class LabelledSet:
    labels: Mapping[Hashable, str]
    alphabet: PosetG

    def __post_init__(self):
        object.__setattr__(self, "labels", dict(self.labels))
        for x, a in self.labels.items():
            if a not in self.alphabet:
                raise LSetError(f"label {a!r} of {x!r} is not in the alphabet")

    @property
    def carrier(self) -> frozenset:
        return frozenset(self.labels)

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, x):
        return self.labels[x]


@dataclass(frozen=True)
class LSetMorphism:
    source: LabelledSet
    target: LabelledSet
    mapping: Mapping

    def __call__(self, x):
        return self.mapping[x]

    def image(self) -> frozenset:
        return frozenset(self.mapping.values())


class MFlag(NamedTuple):
    injective: bool
    strict: bool

    @property
    def is_m(self) -> bool:
        return self.injective and self.strict


def check_morphism(source: LabelledSet, target: LabelledSet, mapping: Mapping) -> LSetMorphism:
    """Validate `mapping` as a morphism ``source -> target``."""
    if source.alphabet != target.alphabet:
        raise LSetError("source and target use different alphabets")
    leq = target.alphabet.leq
    for x in source.labels:
        if x not in mapping:
            raise LSetError(f"map undefined on {x!r}")
        y = mapping[x]
        if y not in target.labels:
            raise LSetError(f"image {y!r} of {x!r} not in target")
        if not leq(target.labels[y], source.labels[x]):
            raise SubtypeViolation(x, f"{target.labels[y]!r} is not below {source.labels[x]!r} at {x!r}")
    return LSetMorphism(source, target, {x: mapping[x] for x in source.labels})


def is_M(f: LSetMorphism) -> MFlag:
    injective = len(set(f.mapping.values())) == len(f.mapping)
    strict = all(f.target.labels[f(x)] == a for x, a in f.source.labels.items())
    return MFlag(injective, strict)


def identity(s: LabelledSet) -> LSetMorphism:
    return LSetMorphism(s, s, {x: x for x in s.labels})


def compose(f: LSetMorphism, g: LSetMorphism) -> LSetMorphism:
    """``g ∘ f``."""
    return LSetMorphism(f.source, g.target, {x: g(y) for x, y in f.mapping.items()})


def pushout_along_M(f: LSetMorphism, g: LSetMorphism):
    """Pushout of ``S1 <-f- S0 -g-> S2`` with ``f`` in M.

    Returns ``(S3, f_, g_)`` where ``f_: S2 -> S3`` and ``g_: S1 -> S3``.
    A glued class is named after its least S1 member as ``"1:<id>"``; the
    other elements keep their id behind a side tag (``"1:"`` or ``"2:"``).
    Glued elements carry the S2 label.
    """
    if not is_M(f).is_m:
        raise NotM("pushouts are only constructed along injective strict morphisms")
    if f.source is not g.source and f.source != g.source:
        raise LSetError("span legs have different sources")
    s1, s2 = f.target, g.target
    f_inv = {y: x for x, y in f.mapping.items()}

    glued = {}
    for s0_el in f.source.labels:
        glued.setdefault(g(s0_el), []).append(f(s0_el))
    f_ = {
        s2_el: f"1:{min(glued[s2_el], key=repr)}" if s2_el in glued else f"2:{s2_el}"
        for s2_el in s2.labels
    }
    g_ = {}
    for s1_el in s1.labels:
        g_[s1_el] = f_[g(f_inv[s1_el])] if s1_el in f_inv else f"1:{s1_el}"
    labels = {f_[x]: a for x, a in s2.labels.items()}
    for s1_el, a in s1.labels.items():
        if s1_el not in f_inv:
            labels[g_[s1_el]] = a
    s3 = LabelledSet(labels, s1.alphabet)
    return s3, LSetMorphism(s2, s3, f_), LSetMorphism(s1, s3, g_)


def pullback(g: LSetMorphism, f: LSetMorphism):
    """Pullback of the cospan ``S1 -g-> S0 <-f- S2``.

    Returns ``(S3, f_, g_)`` with carrier ``{(s1, s2) | g(s1) = f(s2)}``,
    ``f_: S3 -> S1`` and ``g_: S3 -> S2`` the projections.  Each pair is
    labelled with the join of its component labels.
    """
    if g.target is not f.target and g.target != f.target:
        raise LSetError("cospan legs have different targets")
    s1, s2 = g.source, f.source
    alphabet = s1.alphabet
    labels = {}
    for x1, a1 in sorted(s1.labels.items(), key=lambda kv: repr(kv[0])):
        for x2, a2 in sorted(s2.labels.items(), key=lambda kv: repr(kv[0])):
            if g(x1) == f(x2):
                labels[(x1, x2)] = alphabet.join(a1, a2)
    s3 = LabelledSet(labels, alphabet)
    return (
        s3,
        LSetMorphism(s3, s1, {p: p[0] for p in labels}),
        LSetMorphism(s3, s2, {p: p[1] for p in labels}),
    )


def free_label(elements: Iterable, alphabet: PosetG) -> LabelledSet:
    """Label every element with the greatest name."""
    return LabelledSet({x: alphabet.greatest for x in elements}, alphabet)


def forget(s: LabelledSet) -> frozenset:
    return s.carrier

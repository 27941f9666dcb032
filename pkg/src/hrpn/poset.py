"""Finite partial orders with a greatest element.

Label alphabets for places and transitions are posets of strings with a
designated top.  Besides the order queries (`leq`, `join`) this module
builds coproducts and the combined local/global name space, in which
every global name sits above its local copies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

TOP = "⊤"
SEP = "::"


class PosetError(ValueError):
    pass


class CycleError(PosetError):
    """The generating relation closes to a non-antisymmetric relation."""


class UnknownElement(PosetError, KeyError):
    pass


class NoJoin(PosetError):
    """Two elements have no unique least upper bound."""

    def __init__(self, a, b, candidates):
        self.a, self.b, self.candidates = a, b, sorted(candidates)
        super().__init__(f"no unique join of {a!r} and {b!r}: minimal upper bounds {self.candidates}")


class EmbeddingError(PosetError):
    pass


class MapError(PosetError):
    pass


def _transitive_closure(elements, pairs):
    up = {e: {e} for e in elements}
    for a, b in pairs:
        up[a].add(b)
    # Warshall over the successor sets; alphabets are small
    for k in elements:
        for e in elements:
            if k in up[e]:
                up[e] |= up[k]
    return up


@dataclass(frozen=True)
class PosetG:
    """A finite partial order with greatest element `greatest`.

    `relation` holds generator pairs ``(a, b)`` meaning ``a <= b``.  The
    closure is computed once at construction; it always contains
    reflexive pairs and ``a <= greatest`` for every element.
    """

    elements: frozenset
    relation: frozenset = frozenset()
    greatest: str = TOP
    _up: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        elements = frozenset(self.elements) | {self.greatest}
        relation = frozenset((a, b) for a, b in self.relation)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "relation", relation)
        for a, b in relation:
            for x in (a, b):
                if x not in elements:
                    raise UnknownElement(x)
        pairs = set(relation) | {(e, self.greatest) for e in elements}
        up = _transitive_closure(sorted(elements), pairs)
        for a in elements:
            for b in up[a]:
                if a != b and a in up[b]:
                    raise CycleError(f"{a!r} <= {b!r} <= {a!r}")
        object.__setattr__(self, "_up", {a: frozenset(s) for a, s in up.items()})

    @classmethod
    def build(cls, elements: Iterable[str], relation: Iterable[tuple[str, str]] = (), greatest: str = TOP):
        return cls(frozenset(elements), frozenset(map(tuple, relation)), greatest)

    def __contains__(self, x):
        return x in self.elements

    def __len__(self):
        return len(self.elements)

    def _check(self, x):
        if x not in self.elements:
            raise UnknownElement(x)

    def leq(self, a, b) -> bool:
        self._check(a)
        self._check(b)
        return b in self._up[a]

    def upset(self, a) -> frozenset:
        self._check(a)
        return self._up[a]

    def downset(self, a) -> frozenset:
        self._check(a)
        return frozenset(x for x in self.elements if a in self._up[x])

    def closure(self) -> frozenset:
        return frozenset((a, b) for a, ups in self._up.items() for b in ups)

    def join(self, a, b):
        if self.leq(a, b):
            return b
        if self.leq(b, a):
            return a
        common = self._up[a] & self._up[b]
        minimal = [u for u in common if not any(v != u and u in self._up[v] for v in common)]
        if len(minimal) != 1:
            raise NoJoin(a, b, minimal)
        return minimal[0]

    def restrict(self, keep: Iterable[str]) -> PosetG:
        """Induced subposet on `keep` (the greatest element is always kept)."""
        keep = frozenset(keep) | {self.greatest}
        rel = frozenset((a, b) for a, b in self.closure() if a in keep and b in keep and a != b)
        return PosetG(keep, rel, self.greatest)

    def rename(self, mapping: Mapping[str, str], greatest: str | None = None) -> PosetG:
        """Transport along an injective renaming (unmapped names are kept)."""
        g = greatest if greatest is not None else mapping.get(self.greatest, self.greatest)
        f = lambda x: g if x == self.greatest else mapping.get(x, x)
        elements = frozenset(f(x) for x in self.elements)
        if len(elements) != len(self.elements):
            raise EmbeddingError("renaming identifies distinct elements")
        rel = frozenset((f(a), f(b)) for a, b in self.relation)
        return PosetG(elements, rel, g)

    def hasse(self) -> list[tuple[str, str]]:
        strict = {(a, b) for a, b in self.closure() if a != b}
        return sorted(
            (a, b) for a, b in strict
            if not any((a, c) in strict and (c, b) in strict for c in self.elements)
        )

    def to_json(self) -> dict:
        return {
            "elements": sorted(self.elements),
            "relation": [list(p) for p in sorted(self.relation)],
            "greatest": self.greatest,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> PosetG:
        return cls.build(data.get("elements", ()), data.get("relation", ()), data.get("greatest", TOP))


def trivial(greatest: str = TOP) -> PosetG:
    return PosetG(frozenset([greatest]), frozenset(), greatest)


def union(posets: Sequence[PosetG], greatest: str = TOP) -> PosetG:
    """Union of posets whose names are already disjoint or deliberately shared.

    Greatest elements are identified; the result's relation is the union of
    the transported generator relations.
    """
    elements, rel = {greatest}, set()
    for p in posets:
        f = lambda x, p=p: greatest if x == p.greatest else x
        elements |= {f(x) for x in p.elements}
        rel |= {(f(a), f(b)) for a, b in p.relation}
    return PosetG(frozenset(elements), frozenset(rel), greatest)


# standalone forms of the queries

def closure(p: PosetG) -> frozenset:
    return p.closure()


def leq(p: PosetG, a, b) -> bool:
    return p.leq(a, b)


def join(p: PosetG, a, b):
    return p.join(a, b)


@dataclass(frozen=True)
class PosetMap:
    source: PosetG
    target: PosetG
    mapping: Mapping

    def __post_init__(self):
        m = dict(self.mapping)
        object.__setattr__(self, "mapping", m)
        for x in self.source.elements:
            if x not in m:
                raise MapError(f"map undefined on {x!r}")
            if m[x] not in self.target.elements:
                raise MapError(f"image {m[x]!r} of {x!r} not in target")
        if m[self.source.greatest] != self.target.greatest:
            raise MapError("greatest element not preserved")
        for a, b in self.source.closure():
            if not self.target.leq(m[a], m[b]):
                raise MapError(f"order not preserved: {a!r} <= {b!r}")

    def __call__(self, x):
        return self.mapping[x]

    def is_injective(self) -> bool:
        return len(set(self.mapping.values())) == len(self.mapping)

    def is_order_embedding(self) -> bool:
        """Injective and reflecting the order (x <= y iff f(x) <= f(y))."""
        if not self.is_injective():
            return False
        m = self.mapping
        return all(
            self.source.leq(a, b) == self.target.leq(m[a], m[b])
            for a in self.source.elements for b in self.source.elements
        )

    def compose(self, after: PosetMap) -> PosetMap:
        """``after ∘ self``."""
        return PosetMap(self.source, after.target, {x: after(y) for x, y in self.mapping.items()})

    @classmethod
    def inclusion(cls, source: PosetG, target: PosetG) -> PosetMap:
        m = {x: x for x in source.elements}
        m[source.greatest] = target.greatest
        return cls(source, target, m)


def coproduct(parts: Sequence[PosetG], ids: Sequence[str] | None = None) -> tuple[PosetG, list[PosetMap]]:
    """Disjoint union with all greatest elements identified into one ``⊤``.

    Non-greatest element ``x`` of part ``i`` becomes ``"<id_i>::x"``.
    """
    if ids is None:
        ids = [str(i) for i in range(len(parts))]
    if len(set(ids)) != len(ids):
        raise EmbeddingError(f"duplicate part ids {list(ids)}")
    elements, rel, maps = {TOP}, set(), []
    for pid, part in zip(ids, parts):
        m = {x: TOP if x == part.greatest else f"{pid}{SEP}{x}" for x in part.elements}
        elements |= set(m.values())
        rel |= {(m[a], m[b]) for a, b in part.relation}
        maps.append(m)
    result = PosetG(frozenset(elements), frozenset(rel), TOP)
    return result, [PosetMap(part, result, m) for part, m in zip(parts, maps)]


@dataclass(frozen=True)
class NameSpace:
    """The combined name space with its injections."""

    poset: PosetG
    local_maps: dict          # local id -> PosetMap into poset
    global_map: PosetMap


def name_space(
    global_: PosetG,
    locals_: Sequence[tuple[str, PosetG]],
    embeddings: Sequence[PosetMap] | None = None,
) -> NameSpace:
    """Coproduct of the local alphabets and the global one, with each global
    name placed above the local copies it embeds.

    Global names keep their spelling (the global top becomes ``⊤``); local
    copies are ``"<id>::x"``.  Without `embeddings`, each local alphabet is
    included into `global_` by name.
    """
    if embeddings is None:
        try:
            embeddings = [PosetMap.inclusion(p, global_) for _, p in locals_]
        except MapError as e:
            raise EmbeddingError(f"local alphabet does not embed into the global one: {e}") from e
    if len(embeddings) != len(locals_):
        raise EmbeddingError("one embedding per local alphabet required")
    for (lid, p), inc in zip(locals_, embeddings):
        if inc.source is not p and inc.source != p:
            raise EmbeddingError(f"embedding for {lid!r} has the wrong source")
        if inc.target != global_:
            raise EmbeddingError(f"embedding for {lid!r} does not land in the global alphabet")
        if not inc.is_order_embedding():
            raise EmbeddingError(f"local alphabet {lid!r} is not an order embedding into the global one")

    local_part, c_locals = coproduct([p for _, p in locals_], [lid for lid, _ in locals_])
    c_global = {x: TOP if x == global_.greatest else x for x in global_.elements}
    clash = (set(c_global.values()) - {TOP}) & local_part.elements
    if clash:
        raise EmbeddingError(f"global names collide with local copies: {sorted(clash)}")

    elements = set(local_part.elements) | set(c_global.values())
    rel = set(local_part.relation)
    rel |= {(c_global[a], c_global[b]) for a, b in global_.relation}
    for (lid, p), c_i, inc in zip(locals_, c_locals, embeddings):
        for x in p.elements:
            if x != p.greatest:
                rel.add((c_i(x), c_global[inc(x)]))
    poset = PosetG(frozenset(elements), frozenset(rel), TOP)

    local_maps = {
        lid: PosetMap(p, poset, c_i.mapping) for (lid, p), c_i in zip(locals_, c_locals)
    }
    return NameSpace(poset, local_maps, PosetMap(global_, poset, c_global))


@dataclass(frozen=True)
class NameSpacePair:
    places: PosetG = field(default_factory=trivial)
    transitions: PosetG = field(default_factory=trivial)

    def to_json(self) -> dict:
        return {"places": self.places.to_json(), "transitions": self.transitions.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> NameSpacePair:
        return cls(PosetG.from_json(data["places"]), PosetG.from_json(data["transitions"]))

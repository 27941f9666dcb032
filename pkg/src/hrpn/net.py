"""Labelled place/transition nets.

Multisets of places are plain ``dict[str, int]`` holding only positive
coefficients.  A `PTNet` is treated as an immutable value: firing and the
structural helpers return new nets.

Optional decorations: place capacities (absent = unbounded), transition
tags ``tlb`` drawn from ``tags`` and renewal functions ``rnw`` naming an
entry of ``endomorphisms`` (explicit tag -> tag mappings).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .lset import LabelledSet
from .poset import NameSpacePair

Multiset = dict


class NetError(ValueError):
    pass


class NegativeCoefficient(NetError):
    pass


class UnknownTransition(NetError, KeyError):
    pass


class NotEnabled(NetError):
    pass


class CapacityExceeded(NetError):
    pass


# multisets

def mset(items: Mapping[str, int] | Iterable[str] = ()) -> Multiset:
    """Normalise to a dict with positive coefficients only."""
    out: dict[str, int] = {}
    pairs = items.items() if isinstance(items, Mapping) else ((x, 1) for x in items)
    for k, n in pairs:
        if n < 0:
            raise NegativeCoefficient(f"{k}: {n}")
        if n:
            out[k] = out.get(k, 0) + n
    return out


def mset_leq(m1: Mapping[str, int], m2: Mapping[str, int]) -> bool:
    return all(n <= m2.get(p, 0) for p, n in m1.items())


def mset_add(m1: Mapping[str, int], m2: Mapping[str, int]) -> Multiset:
    out = dict(m1)
    for p, n in m2.items():
        out[p] = out.get(p, 0) + n
    return {p: n for p, n in out.items() if n}


def mset_sub(m1: Mapping[str, int], m2: Mapping[str, int]) -> Multiset:
    out = dict(m1)
    for p, n in m2.items():
        k = out.get(p, 0) - n
        if k < 0:
            raise NegativeCoefficient(f"{p}: {out.get(p, 0)} - {n}")
        out[p] = k
    return {p: n for p, n in out.items() if n}


def mset_scale(m: Mapping[str, int], k: int) -> Multiset:
    return {p: n * k for p, n in m.items() if n * k}


def mset_map(m: Mapping[str, int], f: Mapping[str, str]) -> Multiset:
    """Push a multiset forward along a place map (``f^⊕``)."""
    out: dict[str, int] = {}
    for p, n in m.items():
        q = f[p]
        out[q] = out.get(q, 0) + n
    return out


def mset_size(m: Mapping[str, int]) -> int:
    return sum(m.values())


def digest(m: Mapping[str, int]) -> list[str]:
    return [f"{p}:{n}" for p, n in sorted(m.items())]


@dataclass(frozen=True)
class PTNet:
    places: Mapping[str, str]                     # id -> label
    transitions: Mapping[str, str]                # id -> label
    pre: Mapping[str, Mapping[str, int]]
    post: Mapping[str, Mapping[str, int]]
    marking: Mapping[str, int] = field(default_factory=dict)
    names: NameSpacePair = field(default_factory=NameSpacePair)
    capacity: Mapping[str, int] = field(default_factory=dict)
    tags: frozenset = frozenset()
    endomorphisms: Mapping[str, Mapping[str, str]] = field(default_factory=dict)
    tlb: Mapping[str, str] = field(default_factory=dict)
    rnw: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "places", dict(self.places))
        object.__setattr__(self, "transitions", dict(self.transitions))
        object.__setattr__(self, "pre", {t: mset(self.pre.get(t, {})) for t in self.transitions})
        object.__setattr__(self, "post", {t: mset(self.post.get(t, {})) for t in self.transitions})
        object.__setattr__(self, "marking", mset(self.marking))
        object.__setattr__(self, "capacity", dict(self.capacity))
        object.__setattr__(self, "tags", frozenset(self.tags))
        object.__setattr__(self, "endomorphisms", {k: dict(v) for k, v in self.endomorphisms.items()})
        object.__setattr__(self, "tlb", dict(self.tlb))
        object.__setattr__(self, "rnw", dict(self.rnw))
        problems = self.diagnostics()
        if problems:
            raise NetError("; ".join(problems))

    # -- validation ------------------------------------------------------

    def diagnostics(self) -> list[str]:
        out = []
        P, T = self.places, self.transitions
        if set(P) & set(T):
            out.append(f"ids used for both places and transitions: {sorted(set(P) & set(T))}")
        for t in T:
            for side, arcs in (("pre", self.pre[t]), ("post", self.post[t])):
                for p in arcs:
                    if p not in P:
                        out.append(f"{side}({t}) mentions unknown place {p!r}")
        for p in self.marking:
            if p not in P:
                out.append(f"marking on unknown place {p!r}")
        for p, c in self.capacity.items():
            if p not in P:
                out.append(f"capacity on unknown place {p!r}")
            elif self.marking.get(p, 0) > c:
                out.append(f"marking of {p!r} exceeds capacity {c}")
        for t, w in self.tlb.items():
            if t not in T:
                out.append(f"tlb on unknown transition {t!r}")
            if w not in self.tags:
                out.append(f"tlb({t}) = {w!r} is not a declared tag")
        for name, fn in self.endomorphisms.items():
            if set(fn) != set(self.tags) or not set(fn.values()) <= set(self.tags):
                out.append(f"endomorphism {name!r} is not a total function on the tags")
        for t, name in self.rnw.items():
            if t not in T:
                out.append(f"rnw on unknown transition {t!r}")
            if name not in self.endomorphisms:
                out.append(f"rnw({t}) names unknown endomorphism {name!r}")
        return out

    def label_diagnostics(self) -> list[str]:
        """Labels outside the net's own name space."""
        out = []
        for p, a in sorted(self.places.items()):
            if a not in self.names.places:
                out.append(f"place {p!r} has label {a!r} outside the place alphabet")
        for t, a in sorted(self.transitions.items()):
            if a not in self.names.transitions:
                out.append(f"transition {t!r} has label {a!r} outside the transition alphabet")
        return out

    # -- views -----------------------------------------------------------

    @property
    def decorated(self) -> bool:
        return bool(self.capacity or self.tlb or self.rnw)

    def place_set(self) -> LabelledSet:
        return LabelledSet(self.places, self.names.places)

    def transition_set(self) -> LabelledSet:
        return LabelledSet(self.transitions, self.names.transitions)

    def preset(self, t) -> frozenset:
        return frozenset(self.pre[t])

    def postset(self, t) -> frozenset:
        return frozenset(self.post[t])

    def adjacent(self, p) -> set[str]:
        """Transitions with an arc to or from place `p`."""
        return {t for t in self.transitions if p in self.pre[t] or p in self.post[t]}

    def renewal(self, t):
        name = self.rnw.get(t)
        return self.endomorphisms[name] if name is not None else None

    def tokens(self) -> int:
        return mset_size(self.marking)

    def with_marking(self, marking) -> PTNet:
        return replace(self, marking=marking)

    def with_names(self, names: NameSpacePair) -> PTNet:
        return replace(self, names=names)

    def relabel(self, place_labels: Mapping[str, str], transition_labels: Mapping[str, str],
                names: NameSpacePair | None = None) -> PTNet:
        """Rename labels (not ids); unmapped labels are kept."""
        return replace(
            self,
            places={p: place_labels.get(a, a) for p, a in self.places.items()},
            transitions={t: transition_labels.get(a, a) for t, a in self.transitions.items()},
            names=names if names is not None else self.names,
        )

    def rename_ids(self, f: Mapping[str, str]) -> PTNet:
        """Rename element ids; unmapped ids are kept."""
        g = lambda x: f.get(x, x)
        return replace(
            self,
            places={g(p): a for p, a in self.places.items()},
            transitions={g(t): a for t, a in self.transitions.items()},
            pre={g(t): {g(p): n for p, n in m.items()} for t, m in self.pre.items()},
            post={g(t): {g(p): n for p, n in m.items()} for t, m in self.post.items()},
            marking={g(p): n for p, n in self.marking.items()},
            capacity={g(p): c for p, c in self.capacity.items()},
            tlb={g(t): w for t, w in self.tlb.items()},
            rnw={g(t): e for t, e in self.rnw.items()},
        )

    def restrict(self, places: Iterable[str], transitions: Iterable[str]) -> PTNet:
        """Subnet on the given elements; arcs to dropped places must not exist."""
        P, T = set(places), set(transitions)
        return replace(
            self,
            places={p: a for p, a in self.places.items() if p in P},
            transitions={t: a for t, a in self.transitions.items() if t in T},
            pre={t: self.pre[t] for t in T},
            post={t: self.post[t] for t in T},
            marking={p: n for p, n in self.marking.items() if p in P},
            capacity={p: c for p, c in self.capacity.items() if p in P},
            tlb={t: w for t, w in self.tlb.items() if t in T},
            rnw={t: e for t, e in self.rnw.items() if t in T},
        )

    def structure_key(self):
        """Hashable summary used for cheap inequality checks."""
        return (
            sorted(self.places.values()),
            sorted(self.transitions.values()),
            sorted((len(self.pre[t]), len(self.post[t]), mset_size(self.pre[t]), mset_size(self.post[t]))
                   for t in self.transitions),
            self.tokens(),
        )


def empty_net(names: NameSpacePair | None = None) -> PTNet:
    return PTNet({}, {}, {}, {}, names=names or NameSpacePair())


# firing

def _require(net: PTNet, t):
    if t not in net.transitions:
        raise UnknownTransition(t)


def enabled(net: PTNet, t) -> bool:
    _require(net, t)
    return mset_leq(net.pre[t], net.marking)


def enabled_transitions(net: PTNet) -> list[str]:
    return sorted(t for t in net.transitions if mset_leq(net.pre[t], net.marking))


def _check_capacity(net: PTNet, marking):
    for p, c in net.capacity.items():
        if marking.get(p, 0) > c:
            raise CapacityExceeded(f"{p!r} would hold {marking.get(p, 0)} > {c}")


def _renew(fn, tag, k):
    for _ in range(k):
        tag = fn[tag]
    return tag


def fire(net: PTNet, t) -> PTNet:
    if not enabled(net, t):
        raise NotEnabled(t)
    marking = mset_add(mset_sub(net.marking, net.pre[t]), net.post[t])
    _check_capacity(net, marking)
    tlb = net.tlb
    fn = net.renewal(t)
    if fn is not None and t in tlb:
        tlb = {**tlb, t: fn[tlb[t]]}
    return replace(net, marking=marking, tlb=tlb)


def fire_parallel(net: PTNet, v: Mapping[str, int]) -> PTNet:
    """Fire the vector ``v = Σ k_t·t`` in one step."""
    consumed, produced = {}, {}
    for t, k in v.items():
        _require(net, t)
        if k < 0:
            raise NegativeCoefficient(f"{t}: {k}")
        consumed = mset_add(consumed, mset_scale(net.pre[t], k))
        produced = mset_add(produced, mset_scale(net.post[t], k))
    if not mset_leq(consumed, net.marking):
        raise NotEnabled(dict(v))
    marking = mset_add(mset_sub(net.marking, consumed), produced)
    _check_capacity(net, marking)
    tlb = dict(net.tlb)
    for t, k in v.items():
        fn = net.renewal(t)
        if fn is not None and t in tlb:
            tlb[t] = _renew(fn, tlb[t], k)
    return replace(net, marking=marking, tlb=tlb)


def net_of_transition(net: PTNet, t) -> PTNet:
    """The transition with its pre- and post-places (and their marking)."""
    _require(net, t)
    return net.restrict(net.preset(t) | net.postset(t), {t})


def places_only(net: PTNet, places: Iterable[str]) -> PTNet:
    return net.restrict(places, ())

"""Double-pushout transformation of labelled nets.

A rule is a span ``L <-l- K -r-> R`` of strict injective net morphisms.
Applying it at an injective occurrence ``o: L -> N`` deletes ``o(L - l(K))``
(pushout complement ``D``) and glues in ``R - r(K)`` (second pushout ``M``).
Preserved items keep the host's labels, so abstract rules leave the more
specific host labels intact.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

from .match import NetMorphism, check_net_morphism, is_strict
from .net import PTNet, mset_add, mset_map, mset_sub
from .poset import NameSpacePair


class RuleError(ValueError):
    pass


class GluingViolation(ValueError):
    """Raised with ``reasons``: a list of ``(kind, pattern place)`` where
    kind is ``"dangling"`` or ``"marking"``."""

    def __init__(self, reasons):
        self.reasons = list(reasons)
        kinds = sorted({k for k, _ in self.reasons})
        super().__init__("gluing condition violated: " + ", ".join(
            f"{k} at {p!r}" for k, p in self.reasons))
        self.kinds = kinds


class AlphabetError(ValueError):
    pass


class NameCollision(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    name: str
    L: PTNet
    K: PTNet
    R: PTNet
    l: NetMorphism
    r: NetMorphism
    scope: str = "local"

    @classmethod
    def build(cls, name, L, K, R, l_maps, r_maps, scope="local") -> Rule:
        """`l_maps` and `r_maps` are ``(place map, transition map)`` pairs."""
        try:
            l = check_net_morphism(K, L, *l_maps)
            r = check_net_morphism(K, R, *r_maps)
        except ValueError as e:
            raise RuleError(f"rule {name!r}: {e}") from e
        for side, m in (("l", l), ("r", r)):
            if not is_strict(m):
                raise RuleError(f"rule {name!r}: {side} is not strict and injective")
        return cls(name, L, K, R, l, r, scope)

    @classmethod
    def identity(cls, name, net: PTNet, scope="local") -> Rule:
        ident = ({p: p for p in net.places}, {t: t for t in net.transitions})
        return cls.build(name, net, net, net, ident, ident, scope)

    def deleted_places(self) -> list[str]:
        kept = set(self.l.fP.values())
        return sorted(p for p in self.L.places if p not in kept)

    def deleted_transitions(self) -> list[str]:
        kept = set(self.l.fT.values())
        return sorted(t for t in self.L.transitions if t not in kept)

    def created_places(self) -> list[str]:
        kept = set(self.r.fP.values())
        return sorted(p for p in self.R.places if p not in kept)

    def created_transitions(self) -> list[str]:
        kept = set(self.r.fT.values())
        return sorted(t for t in self.R.transitions if t not in kept)

    def inverse(self, name=None) -> Rule:
        return Rule(name or f"{self.name}^-1", self.R, self.K, self.L, self.r, self.l, self.scope)

    def relabel(self, place_labels: Mapping, transition_labels: Mapping,
                names: NameSpacePair, name=None, scope=None) -> Rule:
        L, K, R = (n.relabel(place_labels, transition_labels, names) for n in (self.L, self.K, self.R))
        return Rule.build(
            name or self.name, L, K, R,
            (self.l.fP, self.l.fT), (self.r.fP, self.r.fT),
            scope if scope is not None else self.scope,
        )

    def nets(self):
        return self.L, self.K, self.R


@dataclass(frozen=True)
class TransformStep:
    rule: Rule
    occurrence: NetMorphism
    context: PTNet
    result: PTNet
    comatch: NetMorphism
    k_to_d: NetMorphism = field(repr=False)


def _check_occurrence(rule: Rule, o: NetMorphism) -> NetMorphism:
    if o.source != rule.L:
        raise RuleError(f"occurrence does not start at the left-hand side of {rule.name!r}")
    o = check_net_morphism(rule.L, o.target, o.fP, o.fT)
    if not o.is_injective():
        raise RuleError("only injective occurrences are supported")
    return o


def gluing_violations(rule: Rule, o: NetMorphism) -> list[tuple[str, str]]:
    N = o.target
    removed_t = {o.fT[t] for t in rule.deleted_transitions()}
    reasons = []
    for p in rule.deleted_places():
        q = o.fP[p]
        if any(u not in removed_t for u in N.adjacent(q)):
            reasons.append(("dangling", p))
        if N.marking.get(q, 0) > rule.L.marking.get(p, 0):
            reasons.append(("marking", p))
    return reasons


def gluing_condition(rule: Rule, o: NetMorphism) -> bool:
    return not gluing_violations(rule, o)


def pushout_complement(rule: Rule, o: NetMorphism) -> tuple[PTNet, NetMorphism, NetMorphism]:
    """Context net ``D`` with ``K -> D`` and the inclusion ``D -> N``."""
    reasons = gluing_violations(rule, o)
    if reasons:
        raise GluingViolation(reasons)
    N = o.target
    gone_p = {o.fP[p] for p in rule.deleted_places()}
    gone_t = {o.fT[t] for t in rule.deleted_transitions()}
    D = N.restrict((p for p in N.places if p not in gone_p), (t for t in N.transitions if t not in gone_t))
    kP = {k: o.fP[rule.l.fP[k]] for k in rule.K.places}
    kT = {k: o.fT[rule.l.fT[k]] for k in rule.K.transitions}
    # tokens the rule removes from preserved places (zero for strict spans)
    removed = {}
    for k, d in kP.items():
        delta = rule.L.marking.get(rule.l.fP[k], 0) - rule.K.marking.get(k, 0)
        if delta:
            removed[d] = delta
    if removed:
        D = D.with_marking(mset_sub(D.marking, removed))
    k_to_d = NetMorphism(rule.K, D, kP, kT)
    d_to_n = NetMorphism(D, N, {p: p for p in D.places}, {t: t for t in D.transitions})
    return D, k_to_d, d_to_n


def _default_naming(rule: Rule, taken: set) -> Callable[[str], str]:
    counter = [0]

    def fresh(_x):
        while True:
            cand = f"{rule.name}#{counter[0]}"
            counter[0] += 1
            if cand not in taken:
                return cand

    return fresh


def transform(N: PTNet, rule: Rule, o: NetMorphism,
              naming: Callable[[str], str] | None = None) -> TransformStep:
    """Apply `rule` at occurrence `o` (which must target `N`).

    `naming` maps a created element of R to its id in the result; the
    default is ``"<rule>#<n>"`` with the smallest free counters.
    """
    if o.target is not N and o.target != N:
        raise RuleError("occurrence does not target the given net")
    o = _check_occurrence(rule, o)
    R = rule.R
    for p in rule.created_places():
        if R.places[p] not in N.names.places:
            raise AlphabetError(f"place label {R.places[p]!r} of {rule.name!r} is not in the host name space")
    for t in rule.created_transitions():
        if R.transitions[t] not in N.names.transitions:
            raise AlphabetError(f"transition label {R.transitions[t]!r} of {rule.name!r} is not in the host name space")

    D, k_to_d, _ = pushout_complement(rule, o)
    taken = set(N.places) | set(N.transitions)
    fresh = naming or _default_naming(rule, taken)
    r_inv_p = {v: k for k, v in rule.r.fP.items()}
    r_inv_t = {v: k for k, v in rule.r.fT.items()}

    hP, hT = {}, {}
    for x in sorted(R.places):
        hP[x] = k_to_d.fP[r_inv_p[x]] if x in r_inv_p else fresh(x)
    for x in sorted(R.transitions):
        hT[x] = k_to_d.fT[r_inv_t[x]] if x in r_inv_t else fresh(x)
    new_ids = [hP[x] for x in rule.created_places()] + [hT[x] for x in rule.created_transitions()]
    existing = set(D.places) | set(D.transitions)
    if len(set(new_ids)) != len(new_ids) or existing & set(new_ids):
        raise NameCollision(f"created ids collide: {sorted(existing & set(new_ids)) or new_ids}")

    places = dict(D.places)
    marking = dict(D.marking)
    capacity = dict(D.capacity)
    for k, d in k_to_d.fP.items():
        delta = R.marking.get(rule.r.fP[k], 0) - rule.K.marking.get(k, 0)
        if delta:
            marking = mset_add(marking, {d: delta})
    for x in rule.created_places():
        places[hP[x]] = R.places[x]
        if R.marking.get(x):
            marking = mset_add(marking, {hP[x]: R.marking[x]})
        if x in R.capacity:
            capacity[hP[x]] = R.capacity[x]

    transitions, pre, post = dict(D.transitions), dict(D.pre), dict(D.post)
    tlb, rnw = dict(D.tlb), dict(D.rnw)
    endos = dict(D.endomorphisms)
    for x in rule.created_transitions():
        u = hT[x]
        transitions[u] = R.transitions[x]
        pre[u] = mset_map(R.pre[x], hP)
        post[u] = mset_map(R.post[x], hP)
        if x in R.tlb:
            tlb[u] = R.tlb[x]
        if x in R.rnw:
            name = R.rnw[x]
            if name in endos and endos[name] != R.endomorphisms[name]:
                raise NameCollision(f"endomorphism {name!r} differs between rule and host")
            endos[name] = R.endomorphisms[name]
            rnw[u] = name
    M = replace(
        D, places=places, transitions=transitions, pre=pre, post=post, marking=marking,
        capacity=capacity, tlb=tlb, rnw=rnw, endomorphisms=endos, tags=D.tags | R.tags,
    )
    comatch = NetMorphism(R, M, hP, hT)
    return TransformStep(rule, o, D, M, comatch, k_to_d)


def _images(rule: Rule, o: NetMorphism, left=True):
    """(all places, all transitions, kept places, kept transitions) of a match."""
    side = rule.l if left else rule.r
    P = set(o.fP.values())
    T = set(o.fT.values())
    KP = {o.fP[side.fP[k]] for k in rule.K.places}
    KT = {o.fT[side.fT[k]] for k in rule.K.transitions}
    return P, T, KP, KT


def parallel_independent(s1: tuple[Rule, NetMorphism], s2: tuple[Rule, NetMorphism], N: PTNet | None = None) -> bool:
    """Overlap of the two matches lies in items both rules preserve."""
    (r1, o1), (r2, o2) = s1, s2
    if N is not None and (o1.target != N or o2.target != N):
        raise RuleError("occurrences must target the same net")
    P1, T1, KP1, KT1 = _images(r1, o1)
    P2, T2, KP2, KT2 = _images(r2, o2)
    return (P1 & P2) <= (KP1 & KP2) and (T1 & T2) <= (KT1 & KT2)


def sequential_independent(step1: TransformStep, s2: tuple[Rule, NetMorphism]) -> bool:
    """The second match, taken in the first result, overlaps the first
    comatch only in items both sides preserve."""
    r2, o2 = s2
    P1, T1, KP1, KT1 = _images(step1.rule, step1.comatch, left=False)
    P2, T2, KP2, KT2 = _images(r2, o2)
    return (P1 & P2) <= (KP1 & KP2) and (T1 & T2) <= (KT1 & KT2)


def transport(o: NetMorphism, step: TransformStep) -> NetMorphism | None:
    """Carry an occurrence in a step's input over to its result, if it survives."""
    M = step.result
    if not (set(o.fP.values()) <= set(step.context.places)
            and set(o.fT.values()) <= set(step.context.transitions)):
        return None
    try:
        return check_net_morphism(o.source, M, o.fP, o.fT)
    except ValueError:
        return None

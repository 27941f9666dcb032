"""Net morphisms, injective occurrence search and net isomorphism."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

from .lset import SubtypeViolation
from .net import PTNet, mset_map
from .poset import PosetG, UnknownElement


class MorphismError(ValueError):
    pass


class StructureViolation(MorphismError):
    def __init__(self, t, msg=None):
        self.transition = t
        super().__init__(msg or f"pre/post not preserved at transition {t!r}")


class MarkingViolation(MorphismError):
    def __init__(self, p, msg=None):
        self.place = p
        super().__init__(msg or f"marking not preserved at place {p!r}")


class DecorationViolation(MorphismError):
    pass


@dataclass(frozen=True)
class NetMorphism:
    source: PTNet
    target: PTNet
    fP: Mapping[str, str]
    fT: Mapping[str, str]

    def is_injective(self) -> bool:
        return (len(set(self.fP.values())) == len(self.fP)
                and len(set(self.fT.values())) == len(self.fT))

    def image_places(self) -> frozenset:
        return frozenset(self.fP.values())

    def image_transitions(self) -> frozenset:
        return frozenset(self.fT.values())

    def key(self):
        return (tuple(self.fT[t] for t in sorted(self.fT)), tuple(self.fP[p] for p in sorted(self.fP)))

    def to_json(self) -> dict:
        return {"places": dict(sorted(self.fP.items())), "transitions": dict(sorted(self.fT.items()))}

    def inverse(self) -> NetMorphism:
        return NetMorphism(self.target, self.source,
                           {q: p for p, q in self.fP.items()}, {u: t for t, u in self.fT.items()})


Occurrence = NetMorphism


def _below(alpha: PosetG, lower, upper) -> bool:
    try:
        return alpha.leq(lower, upper)
    except UnknownElement:
        return False


def check_net_morphism(source: PTNet, target: PTNet, fP: Mapping, fT: Mapping) -> NetMorphism:
    """Validate a candidate morphism; raises on the first violated condition.

    Label comparisons use the target's alphabet.
    """
    for p in source.places:
        if p not in fP or fP[p] not in target.places:
            raise MorphismError(f"place map undefined or outside target at {p!r}")
    for t in source.transitions:
        if t not in fT or fT[t] not in target.transitions:
            raise MorphismError(f"transition map undefined or outside target at {t!r}")
    for t in sorted(source.transitions):
        u = fT[t]
        if (target.pre[u] != mset_map(source.pre[t], fP)
                or target.post[u] != mset_map(source.post[t], fP)):
            raise StructureViolation(t)
    for t in sorted(source.transitions):
        if not _below(target.names.transitions, target.transitions[fT[t]], source.transitions[t]):
            raise SubtypeViolation(t)
    for p in sorted(source.places):
        if not _below(target.names.places, target.places[fP[p]], source.places[p]):
            raise SubtypeViolation(p)
    for p in sorted(source.places):
        if source.marking.get(p, 0) > target.marking.get(fP[p], 0):
            raise MarkingViolation(p)
    if source.decorated and target.decorated:
        for p in source.places:
            if source.capacity.get(p) != target.capacity.get(fP[p]):
                raise DecorationViolation(f"capacity differs at {p!r}")
        for t in source.transitions:
            if source.tlb.get(t) != target.tlb.get(fT[t]) or source.renewal(t) != target.renewal(fT[t]):
                raise DecorationViolation(f"tlb/rnw differs at {t!r}")
    return NetMorphism(source, target, dict(fP), dict(fT))


def is_strict(f: NetMorphism) -> bool:
    if not f.is_injective():
        return False
    s, t = f.source, f.target
    return (
        all(t.transitions[f.fT[x]] == a for x, a in s.transitions.items())
        and all(t.places[f.fP[p]] == a for p, a in s.places.items())
        and all(s.marking.get(p, 0) == t.marking.get(f.fP[p], 0) for p in s.places)
    )


# occurrence search

class _Search:
    """Backtracking over transition images, solving place images from arcs."""

    def __init__(self, L: PTNet, N: PTNet, strict: bool, decorations: bool, anchor=None):
        self.L, self.N, self.strict = L, N, strict
        self.decor = decorations
        self.cand = {}
        for t in L.transitions:
            cs = [u for u in N.transitions if self._transition_ok(t, u)]
            if anchor and t in anchor:
                cs = [u for u in cs if u == anchor[t]]
            self.cand[t] = sorted(cs)
        self.order = self._order()
        touched = set()
        for t in L.transitions:
            touched |= set(L.pre[t]) | set(L.post[t])
        self.isolated = sorted(p for p in L.places if p not in touched)
        self.fP, self.fT = {}, {}
        self.usedP, self.usedT = set(), set()

    def _order(self):
        # fewest candidates first, then stay connected to already placed transitions
        left = set(self.L.transitions)
        order, seen_places = [], set()
        while left:
            def rank(t):
                arcs = set(self.L.pre[t]) | set(self.L.post[t])
                return (0 if arcs & seen_places else 1, len(self.cand[t]), t)
            t = min(left, key=rank)
            order.append(t)
            seen_places |= set(self.L.pre[t]) | set(self.L.post[t])
            left.remove(t)
        return order

    def _label(self, alpha, host, pattern):
        return host == pattern if self.strict else _below(alpha, host, pattern)

    def _transition_ok(self, t, u):
        L, N = self.L, self.N
        if not self._label(N.names.transitions, N.transitions[u], L.transitions[t]):
            return False
        sig = lambda net, x: (sorted(net.pre[x].values()), sorted(net.post[x].values()),
                              len(set(net.pre[x]) | set(net.post[x])))
        if sig(L, t) != sig(N, u):
            return False
        if self.decor and (L.tlb.get(t) != N.tlb.get(u) or L.renewal(t) != N.renewal(u)):
            return False
        return True

    def _place_ok(self, p, q):
        L, N = self.L, self.N
        if not self._label(N.names.places, N.places[q], L.places[p]):
            return False
        m, n = L.marking.get(p, 0), N.marking.get(q, 0)
        if (m != n) if self.strict else (m > n):
            return False
        if self.decor and L.capacity.get(p) != N.capacity.get(q):
            return False
        return True

    def _bijections(self, t, u):
        L, N = self.L, self.N
        supp_l = sorted(set(L.pre[t]) | set(L.post[t]))
        supp_n = set(N.pre[u]) | set(N.post[u])
        w = lambda net, x, p: (net.pre[x].get(p, 0), net.post[x].get(p, 0))
        added = []

        def go(i):
            if i == len(supp_l):
                yield
                return
            p = supp_l[i]
            if p in self.fP:
                q = self.fP[p]
                if q in supp_n and w(L, t, p) == w(N, u, q):
                    yield from go(i + 1)
                return
            for q in sorted(supp_n):
                if q in self.usedP or w(L, t, p) != w(N, u, q) or not self._place_ok(p, q):
                    continue
                self.fP[p] = q
                self.usedP.add(q)
                added.append(p)
                yield from go(i + 1)
                added.pop()
                self.usedP.discard(q)
                del self.fP[p]

        yield from go(0)

    def _isolated(self, i):
        if i == len(self.isolated):
            yield dict(self.fP), dict(self.fT)
            return
        p = self.isolated[i]
        for q in sorted(self.N.places):
            if q in self.usedP or not self._place_ok(p, q):
                continue
            self.fP[p] = q
            self.usedP.add(q)
            yield from self._isolated(i + 1)
            self.usedP.discard(q)
            del self.fP[p]

    def _isolated_greedy(self):
        # only valid when any compatible choice is as good as another (strict mode)
        fP = dict(self.fP)
        free = sorted(q for q in self.N.places if q not in self.usedP)
        for p in self.isolated:
            q = next((q for q in free if self._place_ok(p, q)), None)
            if q is None:
                return
            fP[p] = q
            free.remove(q)
        yield fP, dict(self.fT)

    def run(self, greedy_isolated=False) -> Iterator[tuple[dict, dict]]:
        def rec(i):
            if i == len(self.order):
                yield from (self._isolated_greedy() if greedy_isolated else self._isolated(0))
                return
            t = self.order[i]
            for u in self.cand[t]:
                if u in self.usedT:
                    continue
                self.fT[t] = u
                self.usedT.add(u)
                for _ in self._bijections(t, u):
                    yield from rec(i + 1)
                self.usedT.discard(u)
                del self.fT[t]

        yield from rec(0)


def iter_occurrences(L: PTNet, N: PTNet, anchor: Mapping | None = None) -> Iterator[NetMorphism]:
    """Injective morphisms ``L -> N`` in search order (not canonical)."""
    decor = L.decorated and N.decorated
    for fP, fT in _Search(L, N, strict=False, decorations=decor, anchor=anchor).run():
        yield NetMorphism(L, N, fP, fT)


def find_occurrences(L: PTNet, N: PTNet, anchor: Mapping | None = None) -> list[NetMorphism]:
    """All injective occurrences of `L` in `N`, sorted by image assignment.

    `anchor` optionally pins transition images (``{t_L: t_N}``).
    """
    return sorted(iter_occurrences(L, N, anchor), key=NetMorphism.key)


def isomorphic(N1: PTNet, N2: PTNet) -> NetMorphism | None:
    """A label-, marking- and decoration-exact bijection, or None."""
    if len(N1.places) != len(N2.places) or len(N1.transitions) != len(N2.transitions):
        return None
    if N1.structure_key() != N2.structure_key():
        return None
    for fP, fT in _Search(N1, N2, strict=True, decorations=True).run(greedy_isolated=True):
        return NetMorphism(N1, N2, fP, fT)
    return None

"""Hierarchical reconfigurable nets and their flattening.

A substitution transition ``t`` stands for a subnet.  Flattening rewrites
the neighbourhood of ``t`` into the subnet with a span whose interface is the
set of connecting places of ``t``: the transition disappears and the subnet
is glued in along those places.  Subnet elements other than connecting
places get the id prefix ``"t/"``; subnet labels get the same prefix unless
they name a connecting place of the enclosing level, so local rules stay
local.

Two independent routes produce the flat net:

* `flatten_recursive` flattens subnets first and then substitutes each level
  in canonical (sorted) order;
* `apply_as_long_as_possible` substitutes top-down, picking a random pending
  substitution transition at every step.

Both must agree up to isomorphism.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

from .dpo import Rule, RuleError, parallel_independent, transform
from .match import NetMorphism, check_net_morphism
from .net import PTNet, net_of_transition, places_only
from .poset import TOP, NameSpacePair, PosetError, name_space, union


class HierError(ValueError):
    pass


class NotSubstitution(HierError):
    pass


class CyclicHierarchy(HierError):
    pass


@dataclass(frozen=True)
class SubstRule:
    """Subnet for one substitution transition.

    `interface` maps each connecting place of the host to the subnet place
    it is fused with.
    """

    subnet: HierNet
    interface: Mapping[str, str]


@dataclass(frozen=True)
class HierNet:
    net: PTNet
    subst: Mapping[str, SubstRule] = field(default_factory=dict)
    local_rules: Sequence[Rule] = ()
    global_rules: Sequence[Rule] = ()
    name_space: NameSpacePair | None = None
    connecting_labels: frozenset = frozenset()
    subst_labels: frozenset = frozenset()
    name: str = "main"

    @property
    def subst_transitions(self) -> list[str]:
        return sorted(self.subst)

    @property
    def global_names(self) -> NameSpacePair:
        return self.name_space if self.name_space is not None else self.net.names

    def connecting_places(self) -> set[str]:
        out = set()
        for t in self.subst:
            if t in self.net.transitions:
                out |= self.net.preset(t) | self.net.postset(t)
        return out


class Substitution(NamedTuple):
    transition: str
    rule: Rule
    occurrence: NetMorphism


class Flat(NamedTuple):
    net: PTNet
    rules: list
    names: NameSpacePair


@dataclass
class Level:
    """One subnet instance inside a flattened hierarchy."""

    path: tuple
    hn: HierNet
    place_names: dict         # level label -> flat label
    transition_names: dict
    owned_places: set         # labels whose flat name belongs to this level
    owned_transitions: set

    @property
    def id(self) -> str:
        return "/".join(self.path)


def connecting_interface(hn: HierNet | PTNet, t: str) -> PTNet:
    """``CP(t)``: the pre- and post-places of `t`, without transitions.

    Given a `HierNet`, `t` must be one of its substitution transitions.
    """
    if isinstance(hn, HierNet):
        if t not in hn.subst:
            raise NotSubstitution(t)
        net = hn.net
    elif t not in hn.transitions:
        raise NotSubstitution(t)
    else:
        net = hn
    return places_only(net, net.preset(t) | net.postset(t))


# renaming subnets into host coordinates

def _child_maps(host: HierNet, host_places: Mapping, host_labels_p: Mapping,
                wt: str, sub: HierNet, interface: Mapping, sub_net: PTNet):
    """Id and label maps for inserting `sub_net` at working id `wt`.

    `host_places` maps host-level place ids to working ids and
    `host_labels_p` host-level place labels to flat labels.
    """
    fused = {y: host_places[h] for h, y in interface.items()}
    ids = {}
    for x in sub_net.places:
        ids[x] = fused.get(x, f"{wt}/{x}")
    for x in sub_net.transitions:
        ids[x] = f"{wt}/{x}"

    def label_map(alphabet, shared):
        m = {}
        for a in alphabet.elements:
            if a == alphabet.greatest:
                m[a] = TOP
            elif a in shared:
                m[a] = host_labels_p.get(a, a)
            else:
                m[a] = f"{wt}/{a}"
        return m

    lab_p = label_map(sub_net.names.places, host.connecting_labels)
    lab_t = label_map(sub_net.names.transitions, ())
    return ids, lab_p, lab_t


def _rename_names(names: NameSpacePair, lab_p, lab_t) -> NameSpacePair:
    return NameSpacePair(names.places.rename(lab_p, TOP), names.transitions.rename(lab_t, TOP))


def _substitution_rule(net: PTNet, t: str, sub_net: PTNet) -> Rule:
    """``Net(t) <- CP(t) -> sub_net`` with `sub_net` already in host ids."""
    L = net_of_transition(net, t)
    K = places_only(net, L.places)
    ident = {p: p for p in K.places}
    R = sub_net.with_names(net.names)
    return Rule.build(f"subst:{t}", L, K, R, (ident, {}), (ident, {}), scope="substitution")


def _anchored_occurrence(rule: Rule, net: PTNet, t: str) -> NetMorphism:
    # Net(t) is a sub-net of the host, so its inclusion is the occurrence.
    # Other anchored occurrences only permute look-alike connecting places,
    # which would glue the subnet to the wrong ones.
    try:
        return check_net_morphism(rule.L, net, {p: p for p in rule.L.places}, {t: t})
    except ValueError as e:
        raise HierError(f"Net({t}) does not embed into the host: {e}") from e


def _substitute(net: PTNet, t: str, sub_net: PTNet) -> PTNet:
    try:
        rule = _substitution_rule(net, t, sub_net)
    except RuleError as e:
        raise HierError(f"substitution of {t!r} is ill-formed: {e}") from e
    occ = _anchored_occurrence(rule, net, t)
    return transform(net, rule, occ, naming=lambda x: x).result


def _level_names(hn: HierNet) -> tuple[dict, dict]:
    ident = lambda alphabet: {a: (TOP if a == alphabet.greatest else a) for a in alphabet.elements}
    return ident(hn.net.names.places), ident(hn.net.names.transitions)


def _prefix_rule(rule: Rule, wt: str, lab_p, lab_t, names) -> Rule:
    return rule.relabel(lab_p, lab_t, names, name=f"{wt}/{rule.name}")


def substitutions(hn: HierNet) -> list[Substitution]:
    """One anchored occurrence per substitution transition of the top level.

    Subnets are inserted as they are (nested substitution transitions
    included).  Each occurrence is the inclusion of ``Net(t)``.
    """
    labels = _level_names(hn)[0]
    places = {p: p for p in hn.net.places}
    out = []
    pieces = {}
    for t in hn.subst_transitions:
        sr = hn.subst[t]
        ids, lab_p, lab_t = _child_maps(hn, places, labels, t, sr.subnet, sr.interface, sr.subnet.net)
        pieces[t] = (sr.subnet.net.rename_ids(ids), lab_p, lab_t)
    names = NameSpacePair(
        union([hn.net.names.places] + [_rename_names(n.names, lp, lt).places for n, lp, lt in pieces.values()]),
        union([hn.net.names.transitions] + [_rename_names(n.names, lp, lt).transitions for n, lp, lt in pieces.values()]),
    )
    net = hn.net.with_names(names)
    for t, (sub_net, lab_p, lab_t) in pieces.items():
        rule = _substitution_rule(net, t, sub_net.relabel(lab_p, lab_t))
        out.append(Substitution(t, rule, _anchored_occurrence(rule, net, t)))
    for a, b in itertools.combinations(out, 2):
        if not parallel_independent((a.rule, a.occurrence), (b.rule, b.occurrence)):
            raise HierError(f"substitutions of {a.transition!r} and {b.transition!r} overlap")
    return out


# bottom-up flattening

class _Result(NamedTuple):
    net: PTNet
    rules: list
    names: NameSpacePair
    levels: list


def _flatten(hn: HierNet, stack: tuple, orders: Mapping | None = None, path: tuple = ()) -> _Result:
    if any(h is hn for h in stack):
        raise CyclicHierarchy(" -> ".join(h.name for h in stack + (hn,)))
    stack = stack + (hn,)
    own_p, own_t = _level_names(hn)
    levels = [Level((), hn, own_p, own_t, set(own_p) - {hn.net.names.places.greatest},
                    set(own_t) - {hn.net.names.transitions.greatest})]
    place_alphabets = [hn.net.names.places]
    transition_alphabets = [hn.net.names.transitions]
    pieces = {}
    sub_rules = []
    ident_places = {p: p for p in hn.net.places}
    for t in hn.subst_transitions:
        sr = hn.subst[t]
        inner = _flatten(sr.subnet, stack, orders, path + (t,))
        ids, lab_p, lab_t = _child_maps(hn, ident_places, own_p, t, sr.subnet, sr.interface, inner.net)
        renamed = _rename_names(inner.names, lab_p, lab_t)
        place_alphabets.append(renamed.places)
        transition_alphabets.append(renamed.transitions)
        pieces[t] = inner.net.rename_ids(ids).relabel(lab_p, lab_t)
        sub_rules.append((t, inner.rules, lab_p, lab_t))
        for lv in inner.levels:
            owned_p = set(lv.owned_places)
            if not lv.path:
                owned_p -= set(hn.connecting_labels)
            levels.append(Level(
                (t,) + lv.path, lv.hn,
                {a: lab_p[b] for a, b in lv.place_names.items()},
                {a: lab_t[b] for a, b in lv.transition_names.items()},
                owned_p, set(lv.owned_transitions),
            ))
    names = NameSpacePair(union(place_alphabets), union(transition_alphabets))
    net = hn.net.with_names(names)
    order = (orders or {}).get("/".join(path))
    if order is not None and sorted(order) != hn.subst_transitions:
        raise HierError(f"order for level {'/'.join(path) or hn.name!r} must be a permutation of its substitution transitions")
    for t in (order if order is not None else hn.subst_transitions):
        net = _substitute(net, t, pieces[t])
    rules = [r.relabel({}, {}, names) for r in hn.local_rules]
    for t, inner_rules, lab_p, lab_t in sub_rules:
        rules += [_prefix_rule(r, t, lab_p, lab_t, names) for r in inner_rules]
    return _Result(net, rules, names, levels)


def flatten_once(hn: HierNet, order: Sequence[str] | None = None) -> PTNet:
    """Substitute every top-level substitution transition once.

    Subnets are inserted as given, so nested substitution transitions
    survive.  `order` overrides the canonical sorted order.
    """
    shallow = {t: SubstRule(_shallow(sr.subnet), sr.interface) for t, sr in hn.subst.items()}
    top = HierNet(hn.net, shallow, (), (), hn.name_space, hn.connecting_labels, hn.subst_labels, hn.name)
    return _flatten(top, (), {"": order} if order is not None else None).net


def _shallow(hn: HierNet) -> HierNet:
    return HierNet(hn.net, {}, (), (), None, hn.connecting_labels, hn.subst_labels, hn.name)


def flatten_recursive(hn: HierNet, orders: Mapping[str, Sequence[str]] | None = None) -> Flat:
    """Flat net, all local rules and the accumulated name space.

    `orders` optionally fixes the substitution order per level, keyed by the
    level's path (``""`` for the root, ``"T"``, ``"T/S"`` ...).
    """
    r = _flatten(hn, (), orders)
    return Flat(r.net, r.rules, r.names)


def flatten_levels(hn: HierNet) -> list[Level]:
    return _flatten(hn, ()).levels


def _combined_names(hn: HierNet, levels: list[Level]):
    """Name space with global names above their local copies, plus the
    relabelling from flat labels into it."""
    global_ = hn.global_names
    out = []
    for kind in ("places", "transitions"):
        locals_, renames = [], []
        for lv in levels:
            alphabet = getattr(lv.hn.net.names, kind)
            owned = lv.owned_places if kind == "places" else lv.owned_transitions
            lid = lv.id or hn.name
            locals_.append((lid, alphabet.restrict(owned)))
            names = lv.place_names if kind == "places" else lv.transition_names
            renames.append((lid, owned, names))
        ns = name_space(getattr(global_, kind), locals_)
        relabel = {TOP: TOP}
        for lid, owned, names in renames:
            c = ns.local_maps[lid]
            for a in owned:
                relabel[names[a]] = c(a)
        out.append((ns, relabel))
    (ns_p, rel_p), (ns_t, rel_t) = out
    return NameSpacePair(ns_p.poset, ns_t.poset), rel_p, rel_t, ns_p.global_map, ns_t.global_map


def flatten_full(hn: HierNet) -> Flat:
    """Flat net with local and global rules over the combined name space.

    Without global rules the result equals `flatten_recursive`.
    """
    r = _flatten(hn, ())
    if not hn.global_rules:
        return Flat(r.net, r.rules, r.names)
    names, rel_p, rel_t, g_p, g_t = _combined_names(hn, r.levels)
    net = r.net.relabel(rel_p, rel_t, names)
    rules = []
    for rule in r.rules:
        lid = rule.name.rsplit("/", 1)[0] if "/" in rule.name else hn.name
        rules.append(rule.relabel(rel_p, rel_t, names, scope=f"local:{lid}"))
    for rule in hn.global_rules:
        rules.append(rule.relabel(g_p.mapping, g_t.mapping, names, scope="global"))
    return Flat(net, rules, names)


def flat_names(hn: HierNet) -> NameSpacePair:
    """Accumulated flat name space, computed top-down from the hierarchy."""
    places, transitions = [], []
    for _, lab_p, lab_t, level in _walk(hn):
        n = _rename_names(level.net.names, lab_p, lab_t)
        places.append(n.places)
        transitions.append(n.transitions)
    return NameSpacePair(union(places), union(transitions))


def _walk(hn: HierNet):
    """Yield ``(working id map, place label map, transition label map, level)``
    for every subnet instance, top-down."""
    lab_p, lab_t = _level_names(hn)
    todo = [({p: p for p in hn.net.places}, lab_p, lab_t, hn, ())]
    while todo:
        ids, lp, lt, level, stack = todo.pop(0)
        if any(h is level for h in stack):
            raise CyclicHierarchy(level.name)
        yield ids, lp, lt, level
        for t in level.subst_transitions:
            sr = level.subst[t]
            wt = ids.get(t, t)
            cids, clp, clt = _child_maps(level, ids, lp, wt, sr.subnet, sr.interface, sr.subnet.net)
            todo.append((cids, clp, clt, sr.subnet, stack + (level,)))


def apply_as_long_as_possible(hn: HierNet, seed: int, trace: list | None = None) -> PTNet:
    """Substitute a randomly chosen pending substitution transition until none
    is left.  Nested subnets become pending once their parent is inserted."""
    rng = random.Random(seed)
    names = flat_names(hn)
    net = hn.net.with_names(names)
    root_ids = {x: x for x in list(hn.net.places) + list(hn.net.transitions)}
    lab_p, lab_t = _level_names(hn)
    pending = {t: (hn, t, root_ids, lab_p, (hn,)) for t in hn.subst_transitions}
    while True:
        ready = sorted(t for t in pending if t in net.transitions)
        if not ready:
            break
        wt = rng.choice(ready)
        level, t, ids, lp, stack = pending.pop(wt)
        sr = level.subst[t]
        if any(h is sr.subnet for h in stack):
            raise CyclicHierarchy(sr.subnet.name)
        cids, clp, clt = _child_maps(level, ids, lp, wt, sr.subnet, sr.interface, sr.subnet.net)
        piece = sr.subnet.net.rename_ids(cids).relabel(clp, clt)
        net = _substitute(net, wt, piece)
        if trace is not None:
            trace.append(wt)
        for s in sr.subnet.subst_transitions:
            pending[cids[s]] = (sr.subnet, s, cids, clp, stack + (sr.subnet,))
    return net


# well-definedness

_RESERVED = ("/", "::")


def _reserved(x) -> bool:
    return any(r in x for r in _RESERVED) or x == TOP


def _rule_diagnostics(rule: Rule, hn: HierNet, where: str) -> list[str]:
    out = []
    names = hn.net.names
    for part, net in zip("LKR", rule.nets()):
        for t, a in net.transitions.items():
            if a in hn.subst_labels:
                out.append(f"{where}: rule {rule.name!r} contains substitution transition {t!r} in {part}")
            elif a not in names.transitions:
                out.append(f"{where}: rule {rule.name!r} uses transition label {a!r} outside the level alphabet")
        for p, a in net.places.items():
            if a not in names.places:
                out.append(f"{where}: rule {rule.name!r} uses place label {a!r} outside the level alphabet")
    kept_l, kept_r = set(rule.l.fP.values()), set(rule.r.fP.values())
    for side, net, kept in (("deletes", rule.L, kept_l), ("adds", rule.R, kept_r)):
        for p, a in net.places.items():
            if a in hn.connecting_labels and p not in kept:
                out.append(f"{where}: rule {rule.name!r} {side} connecting place {p!r}")
    return out


def structure_diagnostics(hn: HierNet, path: str | None = None, stack: tuple = ()) -> list[str]:
    where = path or hn.name
    if any(h is hn for h in stack):
        return [f"{where}: cyclic hierarchy"]
    stack = stack + (hn,)
    out = []
    net = hn.net
    names = net.names
    for kind, alphabet in (("place", names.places), ("transition", names.transitions)):
        if alphabet.greatest != TOP:
            out.append(f"{where}: {kind} alphabet must use {TOP!r} as greatest element")
        for a in alphabet.elements:
            if a != alphabet.greatest and _reserved(a):
                out.append(f"{where}: label {a!r} uses a reserved separator")
    for x in list(net.places) + list(net.transitions):
        if _reserved(x):
            out.append(f"{where}: id {x!r} uses a reserved separator")
    out += [f"{where}: {d}" for d in net.label_diagnostics()]
    if not set(hn.subst_labels) <= names.transitions.elements:
        out.append(f"{where}: substitution labels outside the transition alphabet")
    if not set(hn.connecting_labels) <= names.places.elements:
        out.append(f"{where}: connecting-place labels outside the place alphabet")
    for t in hn.subst:
        if t not in net.transitions:
            out.append(f"{where}: substitution transition {t!r} is not a transition")
    st_labels = [net.transitions[t] for t in hn.subst if t in net.transitions]
    if len(set(st_labels)) != len(st_labels):
        out.append(f"{where}: substitution transitions share a label")
    for t, a in net.transitions.items():
        if t in hn.subst and a not in hn.subst_labels:
            out.append(f"{where}: substitution transition {t!r} is labelled {a!r}, not a substitution label")
        if t not in hn.subst and a in hn.subst_labels:
            out.append(f"{where}: ordinary transition {t!r} uses substitution label {a!r}")
    for p in sorted(hn.connecting_places()):
        if net.places[p] not in hn.connecting_labels:
            out.append(f"{where}: connecting place {p!r} is labelled {net.places[p]!r}, not a connecting label")
    for rule in hn.local_rules:
        out += _rule_diagnostics(rule, hn, where)
    for t in hn.subst_transitions:
        if t not in net.transitions:
            continue
        sr = hn.subst[t]
        sub = sr.subnet.net
        cp = net.preset(t) | net.postset(t)
        if set(sr.interface) != cp:
            out.append(f"{where}: interface of {t!r} is {sorted(sr.interface)}, connecting places are {sorted(cp)}")
        if len(set(sr.interface.values())) != len(sr.interface):
            out.append(f"{where}: interface of {t!r} is not injective")
        for h, y in sorted(sr.interface.items()):
            if y not in sub.places:
                out.append(f"{where}: subnet of {t!r} is missing connecting place {y!r}")
                continue
            if h not in net.places:
                continue
            if sub.places[y] != net.places[h]:
                out.append(f"{where}: connecting place {h!r} is labelled {net.places[h]!r} but {sub.places[y]!r} in the subnet of {t!r}")
            if sub.marking.get(y, 0) != net.marking.get(h, 0):
                out.append(f"{where}: connecting place {h!r} has a different marking in the subnet of {t!r}")
        out += structure_diagnostics(sr.subnet, f"{where}/{t}", stack)
    return out


def is_well_defined(hn: HierNet) -> tuple[bool, list[str]]:
    """Check the hierarchy, flatten it, and validate the flat result."""
    diags = structure_diagnostics(hn)
    for rule in hn.global_rules:
        for part, net in zip("LKR", rule.nets()):
            diags += [f"global rule {rule.name!r} {part}: {d}"
                      for d in net.with_names(hn.global_names).label_diagnostics()]
    if diags:
        return False, diags
    try:
        flat = flatten_full(hn)
    except (HierError, RuleError, PosetError, ValueError) as e:
        return False, [f"flattening failed: {e}"]
    diags += [f"flat net: {d}" for d in flat.net.label_diagnostics()]
    for rule in flat.rules:
        for part, net in zip("LKR", rule.nets()):
            diags += [f"rule {rule.name!r} {part}: {d}" for d in net.label_diagnostics()]
    if flat.net.transitions.keys() & _all_subst_ids(hn):
        diags.append("flat net still contains substitution transitions")
    return not diags, diags


def _all_subst_ids(hn: HierNet) -> set:
    out = set()
    for ids, _, _, level in _walk(hn):
        for t in level.subst:
            out.add(ids.get(t, t))
    return out

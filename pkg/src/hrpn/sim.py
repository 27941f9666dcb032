"""Seeded simulation mixing firing and rule application, and trace replay.

Each step picks uniformly among the enabled transitions and the applicable
(rule, occurrence) pairs.  Events record sorted ``place:count`` digests of
the marking before and after.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .dpo import AlphabetError, Rule, gluing_condition, transform
from .match import check_net_morphism, find_occurrences
from .net import CapacityExceeded, PTNet, digest, enabled_transitions, fire


class ReplayError(ValueError):
    pass


@dataclass
class Trace:
    seed: int
    events: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"seed": self.seed, "events": self.events}


def _fireable(net: PTNet) -> list[str]:
    out = []
    for t in enabled_transitions(net):
        try:
            fire(net, t)
        except CapacityExceeded:
            continue
        out.append(t)
    return out


def _creatable(net: PTNet, rule: Rule) -> bool:
    R = rule.R
    return (all(R.places[p] in net.names.places for p in rule.created_places())
            and all(R.transitions[t] in net.names.transitions for t in rule.created_transitions()))


def applicable(net: PTNet, rules: Sequence[Rule]) -> list[tuple[int, object]]:
    """``(rule index, occurrence)`` pairs whose gluing condition holds."""
    out = []
    for i, rule in enumerate(rules):
        if not _creatable(net, rule):
            continue
        for o in find_occurrences(rule.L, net):
            if gluing_condition(rule, o):
                out.append((i, o))
    return out


def choices(net: PTNet, rules: Sequence[Rule]) -> list:
    return [("fire", t) for t in _fireable(net)] + [("rule", i, o) for i, o in applicable(net, rules)]


def simulate(net: PTNet, rules: Sequence[Rule], steps: int, seed: int) -> tuple[Trace, PTNet]:
    if steps < 0:
        raise ValueError("steps must be non-negative")
    rng = random.Random(seed)
    trace = Trace(seed)
    for i in range(steps):
        options = choices(net, rules)
        if not options:
            break
        pick = options[rng.randrange(len(options))]
        before = digest(net.marking)
        if pick[0] == "fire":
            net = fire(net, pick[1])
            event = {"step": i, "kind": "fire", "transition": pick[1]}
        else:
            _, k, o = pick
            net = transform(net, rules[k], o).result
            event = {"step": i, "kind": "rule", "rule": rules[k].name, "occurrence": o.to_json()}
        event["pre"] = before
        event["post"] = digest(net.marking)
        trace.events.append(event)
    return trace, net


def replay(net: PTNet, rules: Sequence[Rule], events: Sequence[dict]) -> PTNet:
    """Re-execute recorded events; digests are checked along the way."""
    by_name = {r.name: r for r in rules}
    for event in events:
        if digest(net.marking) != event.get("pre", digest(net.marking)):
            raise ReplayError(f"marking differs before step {event.get('step')}")
        if event["kind"] == "fire":
            net = fire(net, event["transition"])
        elif event["kind"] == "rule":
            rule = by_name.get(event["rule"])
            if rule is None:
                raise ReplayError(f"unknown rule {event['rule']!r}")
            occ = event["occurrence"]
            try:
                o = check_net_morphism(rule.L, net, occ["places"], occ["transitions"])
                net = transform(net, rule, o).result
            except (ValueError, AlphabetError) as e:
                raise ReplayError(f"step {event.get('step')}: {e}") from e
        else:
            raise ReplayError(f"unknown event kind {event['kind']!r}")
        if digest(net.marking) != event.get("post", digest(net.marking)):
            raise ReplayError(f"marking differs after step {event.get('step')}")
    return net

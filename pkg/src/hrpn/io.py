"""JSON reading and writing for nets, rules and hierarchical nets.

Every loader reports problems as `ParseError` carrying a location such as
``$.subst.task2.interface``.  Labels default to the greatest name; a missing
``names`` block is inherited from the enclosing object or, at top level,
built from the labels in use (all incomparable, below the greatest).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from .dpo import Rule
from .hier import CyclicHierarchy, HierNet, SubstRule
from .net import PTNet
from .poset import TOP, NameSpacePair, PosetG


class ParseError(ValueError):
    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}")


def _expect(cond, loc, msg):
    if not cond:
        raise ParseError(loc, msg)


def _poset(data, loc) -> PosetG:
    _expect(isinstance(data, Mapping), loc, "expected an object")
    try:
        return PosetG.from_json(data)
    except (ValueError, TypeError) as e:
        raise ParseError(loc, str(e)) from e


def names_from_json(data, loc="$") -> NameSpacePair:
    _expect(isinstance(data, Mapping), loc, "expected an object with places and transitions")
    return NameSpacePair(
        _poset(data.get("places", {}), f"{loc}.places"),
        _poset(data.get("transitions", {}), f"{loc}.transitions"),
    )


def _elements(data, loc):
    if isinstance(data, Mapping):
        return {str(k): str(v) for k, v in data.items()}
    _expect(isinstance(data, list), loc, "expected a list of {id, label}")
    out = {}
    for i, item in enumerate(data):
        where = f"{loc}[{i}]"
        if isinstance(item, str):
            item = {"id": item}
        _expect(isinstance(item, Mapping) and "id" in item, where, "element needs an id")
        _expect(item["id"] not in out, where, f"duplicate id {item['id']!r}")
        out[str(item["id"])] = str(item.get("label", TOP))
    return out


def _inferred_names(places, transitions) -> NameSpacePair:
    return NameSpacePair(
        PosetG.build(set(places.values())),
        PosetG.build(set(transitions.values())),
    )


def net_from_json(data, loc="$", names: NameSpacePair | None = None) -> PTNet:
    _expect(isinstance(data, Mapping), loc, "expected a net object")
    places = _elements(data.get("places", []), f"{loc}.places")
    transitions = _elements(data.get("transitions", []), f"{loc}.transitions")
    pre = {t: {} for t in transitions}
    post = {t: {} for t in transitions}
    for i, arc in enumerate(data.get("arcs", [])):
        where = f"{loc}.arcs[{i}]"
        _expect(isinstance(arc, Mapping), where, "expected an arc object")
        t, p = arc.get("transition"), arc.get("place")
        _expect(t in transitions, where, f"unknown transition {t!r}")
        _expect(p in places, where, f"unknown place {p!r}")
        w = arc.get("weight", 1)
        _expect(isinstance(w, int) and w > 0, where, "weight must be a positive integer")
        d = arc.get("direction")
        _expect(d in ("in", "out"), where, "direction must be 'in' or 'out'")
        side = pre if d == "in" else post
        side[t][p] = side[t].get(p, 0) + w
    marking = data.get("marking", {})
    _expect(isinstance(marking, Mapping), f"{loc}.marking", "expected an object")
    for p, n in marking.items():
        _expect(isinstance(n, int) and n >= 0, f"{loc}.marking.{p}", "token counts are non-negative integers")
    if "names" in data:
        names = names_from_json(data["names"], f"{loc}.names")
    elif names is None:
        names = _inferred_names(places, transitions)
    dec = data.get("decorations", {}) or {}
    _expect(isinstance(dec, Mapping), f"{loc}.decorations", "expected an object")
    try:
        net = PTNet(
            places, transitions, pre, post, marking, names,
            capacity=dec.get("capacity", {}), tags=frozenset(dec.get("tags", ())),
            endomorphisms=dec.get("endomorphisms", {}), tlb=dec.get("tlb", {}), rnw=dec.get("rnw", {}),
        )
    except ValueError as e:
        raise ParseError(loc, str(e)) from e
    problems = net.label_diagnostics()
    _expect(not problems, loc, "; ".join(problems))
    return net


def net_to_json(net: PTNet, names=True) -> dict:
    arcs = []
    for t in sorted(net.transitions):
        for d, side in (("in", net.pre[t]), ("out", net.post[t])):
            for p, w in sorted(side.items()):
                arcs.append({"transition": t, "place": p, "weight": w, "direction": d})
    out = {}
    if names:
        out["names"] = net.names.to_json()
    out["places"] = [{"id": p, "label": a} for p, a in sorted(net.places.items())]
    out["transitions"] = [{"id": t, "label": a} for t, a in sorted(net.transitions.items())]
    out["arcs"] = arcs
    out["marking"] = dict(sorted(net.marking.items()))
    if net.decorated or net.tags or net.endomorphisms:
        out["decorations"] = {
            "capacity": dict(sorted(net.capacity.items())),
            "tags": sorted(net.tags),
            "endomorphisms": {k: dict(sorted(v.items())) for k, v in sorted(net.endomorphisms.items())},
            "tlb": dict(sorted(net.tlb.items())),
            "rnw": dict(sorted(net.rnw.items())),
        }
    return out


def _maps(data, loc):
    data = data or {}
    _expect(isinstance(data, Mapping), loc, "expected {places, transitions}")
    return dict(data.get("places", {})), dict(data.get("transitions", {}))


def rule_from_json(data, loc="$", names: NameSpacePair | None = None) -> Rule:
    _expect(isinstance(data, Mapping), loc, "expected a rule object")
    if "names" in data:
        names = names_from_json(data["names"], f"{loc}.names")
    if names is None:
        labels_p, labels_t = {}, {}
        for part in "LKR":
            part_data = data.get(part, {})
            labels_p.update(_elements(part_data.get("places", []), f"{loc}.{part}.places"))
            labels_t.update(_elements(part_data.get("transitions", []), f"{loc}.{part}.transitions"))
        names = _inferred_names(labels_p, labels_t)
    nets = {}
    for part in "LKR":
        _expect(part in data, loc, f"rule needs {part}")
        nets[part] = net_from_json(data[part], f"{loc}.{part}", names)
    l = _maps(data.get("l"), f"{loc}.l")
    r = _maps(data.get("r"), f"{loc}.r")
    if "l" not in data:
        l = ({p: p for p in nets["K"].places}, {t: t for t in nets["K"].transitions})
    if "r" not in data:
        r = ({p: p for p in nets["K"].places}, {t: t for t in nets["K"].transitions})
    try:
        return Rule.build(str(data.get("name", "rule")), nets["L"], nets["K"], nets["R"], l, r,
                          scope=str(data.get("scope", "local")))
    except ValueError as e:
        raise ParseError(loc, str(e)) from e


def rule_to_json(rule: Rule, names=True) -> dict:
    out = {"name": rule.name, "scope": rule.scope}
    if names:
        out["names"] = rule.L.names.to_json()
    out.update({
        "L": net_to_json(rule.L, names=False),
        "K": net_to_json(rule.K, names=False),
        "R": net_to_json(rule.R, names=False),
        "l": rule.l.to_json(),
        "r": rule.r.to_json(),
    })
    return out


def _interface(data, host: PTNet, t: str, loc) -> dict:
    if data is None:
        cp = host.preset(t) | host.postset(t)
        return {p: p for p in sorted(cp)}
    if isinstance(data, list):
        return {str(p): str(p) for p in data}
    _expect(isinstance(data, Mapping), loc, "interface is a list of places or a {host: subnet} object")
    return {str(k): str(v) for k, v in data.items()}


def hiernet_from_json(data, loc="$", layouts=None, stack=()) -> HierNet:
    _expect(isinstance(data, Mapping), loc, "expected a hierarchical net object")
    layouts = dict(layouts or {})
    for key, raw in (data.get("layouts") or {}).items():
        layouts[key] = (raw, f"{loc}.layouts.{key}")
    built = {}

    def layout(key, where):
        _expect(key in layouts, where, f"unknown layout {key!r}")
        if key in stack:
            raise CyclicHierarchy(" -> ".join(stack + (key,)))
        if key not in built:
            raw, lloc = layouts[key]
            built[key] = hiernet_from_json(raw, lloc, {k: v for k, v in layouts.items()}, stack + (key,))
        return built[key]

    _expect("net" in data, loc, "hierarchical net needs 'net'")
    net = net_from_json(data["net"], f"{loc}.net")
    subst_data = data.get("subst", {}) or {}
    _expect(isinstance(subst_data, Mapping), f"{loc}.subst", "expected an object")
    declared = data.get("subst_transitions")
    if declared is not None:
        _expect(sorted(declared) == sorted(subst_data), f"{loc}.subst_transitions",
                "must list exactly the keys of 'subst'")
    subst = {}
    for t, entry in subst_data.items():
        where = f"{loc}.subst.{t}"
        _expect(t in net.transitions, where, f"{t!r} is not a transition of the net")
        _expect(isinstance(entry, Mapping), where, "expected {subnet|layout, interface}")
        if "layout" in entry:
            sub = layout(entry["layout"], f"{where}.layout")
        else:
            _expect("subnet" in entry, where, "needs 'subnet' or 'layout'")
            sub = hiernet_from_json(entry["subnet"], f"{where}.subnet", {k: v for k, v in layouts.items()}, stack)
        subst[t] = SubstRule(sub, _interface(entry.get("interface"), net, t, f"{where}.interface"))

    name_space = None
    if data.get("name_space") is not None:
        name_space = names_from_json(data["name_space"], f"{loc}.name_space")
    local_rules = [rule_from_json(r, f"{loc}.local_rules[{i}]", net.names)
                   for i, r in enumerate(data.get("local_rules", []))]
    global_names = name_space or net.names
    global_rules = [rule_from_json(r, f"{loc}.global_rules[{i}]", global_names)
                    for i, r in enumerate(data.get("global_rules", []))]
    if "subst_labels" in data:
        subst_labels = frozenset(data["subst_labels"])
    else:
        subst_labels = frozenset(net.transitions[t] for t in subst)
    return HierNet(
        net, subst, local_rules, global_rules, name_space,
        frozenset(data.get("connecting_labels", ())), subst_labels,
        str(data.get("name", "main")),
    )


def hiernet_to_json(hn: HierNet) -> dict:
    out = {"name": hn.name, "net": net_to_json(hn.net)}
    if hn.subst:
        out["subst_transitions"] = hn.subst_transitions
        out["subst"] = {
            t: {"subnet": hiernet_to_json(sr.subnet), "interface": dict(sorted(sr.interface.items()))}
            for t, sr in sorted(hn.subst.items())
        }
    out["connecting_labels"] = sorted(hn.connecting_labels)
    out["subst_labels"] = sorted(hn.subst_labels)
    if hn.local_rules:
        out["local_rules"] = [rule_to_json(r, names=False) for r in hn.local_rules]
    if hn.name_space is not None:
        out["name_space"] = hn.name_space.to_json()
    if hn.global_rules:
        out["global_rules"] = [rule_to_json(r, names=False) for r in hn.global_rules]
    return out


def flat_to_json(net: PTNet, rules, names: NameSpacePair) -> dict:
    return {
        "name_space": names.to_json(),
        "net": net_to_json(net, names=False),
        "rules": [rule_to_json(r, names=False) for r in rules],
    }


def flat_from_json(data, loc="$"):
    _expect(isinstance(data, Mapping), loc, "expected a flat object")
    names = names_from_json(data.get("name_space", {}), f"{loc}.name_space")
    net = net_from_json(data.get("net", {}), f"{loc}.net", names)
    rules = [rule_from_json(r, f"{loc}.rules[{i}]", names) for i, r in enumerate(data.get("rules", []))]
    return net, rules, names


def load_json(path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(str(path), e.strerror or str(e)) from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}:{e.lineno}:{e.colno}", e.msg) from e


def load_model(path):
    """Read a file and return ``(kind, object)``.

    kind is ``"persisted"`` (``{"hierarchical", "flat"}``), ``"flat"`` (a
    flat component only), ``"hierarchical"`` or ``"net"``.
    """
    data = load_json(path)
    _expect(isinstance(data, Mapping), "$", "top level must be an object")
    if "hierarchical" in data:
        hn = hiernet_from_json(data["hierarchical"], "$.hierarchical")
        flat = flat_from_json(data["flat"], "$.flat") if "flat" in data else None
        return "persisted", (hn, flat)
    if "flat" in data:
        return "flat", flat_from_json(data["flat"], "$.flat")
    if "net" in data or "subst_transitions" in data:
        return "hierarchical", hiernet_from_json(data)
    return "net", net_from_json(data)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, sort_keys=False) + "\n"

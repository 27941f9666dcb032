"""Regenerate the JSON fixtures bundled under src/hrpn/fixtures/.

    python3 scripts/build_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "hrpn" / "fixtures"
TOP = "⊤"


def poset(elements, relation=(), greatest=TOP):
    return {"elements": sorted(set(elements) | {greatest}), "relation": [list(r) for r in relation],
            "greatest": greatest}


def names(places, transitions, place_rel=(), transition_rel=()):
    return {"places": poset(places, place_rel), "transitions": poset(transitions, transition_rel)}


def net(places, transitions, arcs, marking=None, ns=None, decorations=None):
    """places/transitions: {id: label}; arcs: "a -> b" or ("a", "b", weight)."""
    out = []
    for arc in arcs:
        if isinstance(arc, str):
            src, dst = (s.strip() for s in arc.split("->"))
            w = 1
        else:
            src, dst, w = arc
        if src in transitions:
            out.append({"transition": src, "place": dst, "weight": w, "direction": "out"})
        else:
            out.append({"transition": dst, "place": src, "weight": w, "direction": "in"})
    d = {}
    if ns is not None:
        d["names"] = ns
    d["places"] = [{"id": p, "label": a} for p, a in places.items()]
    d["transitions"] = [{"id": t, "label": a} for t, a in transitions.items()]
    d["arcs"] = out
    d["marking"] = marking or {}
    if decorations:
        d["decorations"] = decorations
    return d


def rule(name, L, K, R, l=None, r=None):
    out = {"name": name, "L": L, "K": K, "R": R}
    if l is not None:
        out["l"] = l
    if r is not None:
        out["r"] = r
    return out


def chain(*ids):
    return [f"{a} -> {b}" for a, b in zip(ids, ids[1:])]


# -- flattening of a single substitution transition ---------------------------

def single_subst():
    main = net(
        {"p0": "p0", "p1": "p1"}, {"t1": "t1", "st1": "st1"},
        ["t1 -> p0", "p0 -> st1", "st1 -> p1"], {"p0": 1},
        names(["p0", "p1"], ["t1", "st1"]),
    )
    sn = net(
        {"p0": "p0", "q": "q", "p1": "p1"}, {"sub_t1": "sub_t1", "sub_t2": "sub_t2"},
        chain("p0", "sub_t1", "q", "sub_t2", "p1"), {"p0": 1},
        names(["p0", "q", "p1"], ["sub_t1", "sub_t2"]),
    )
    return {
        "name": "MN", "net": main, "subst_transitions": ["st1"],
        "subst": {"st1": {"subnet": {"name": "SN", "net": sn}, "interface": ["p0", "p1"]}},
        "connecting_labels": ["p0", "p1"], "subst_labels": ["st1"],
    }


# -- the tasks and steps example ------------------------------------------------

STEPS = ["step1", "step2", "intermediate step", "parallel step"]


def tasks_steps():
    place_labels = ["start", "ready", "done", "s1", "a1", "a2", "b1", "b2", "c", "counter"]
    transition_labels = ["initialise", "task1", "task2", "task3", "fork", "join", "step"] + STEPS
    step_order = [(s, "step") for s in STEPS]
    global_names = names(place_labels, transition_labels, (), step_order)

    root = net(
        {"start": "start", "ready": "ready", "done": "done"},
        {"initialise": "initialise", "task1": "task1", "task2": "task2", "task3": "task3"},
        ["start -> initialise", "initialise -> ready"]
        + [a for t in ("task1", "task2", "task3") for a in (f"ready -> {t}", f"{t} -> done")],
        {"start": 1},
        names(["start", "ready", "done"], ["initialise", "task1", "task2", "task3"]),
    )

    sn1_names = names(["ready", "done", "s1"], ["step", "step1", "step2", "intermediate step"], (),
                      [("step1", "step"), ("step2", "step"), ("intermediate step", "step")])
    sn1 = net({"ready": "ready", "s1": "s1", "done": "done"}, {"step1": "step1", "step2": "step2"},
              chain("ready", "step1", "s1", "step2", "done"), ns=sn1_names)

    def swap(name, old, new):
        L = net({"p": TOP, "q": TOP}, {"x": old}, chain("p", "x", "q"))
        K = net({"p": TOP, "q": TOP}, {}, [])
        R = net({"p": TOP, "q": TOP}, {"y": new}, chain("p", "y", "q"))
        return rule(name, L, K, R)

    before = net({"p": TOP, "m": "s1", "q": TOP}, {"x": "step1", "y": "step2"},
                 chain("p", "x", "m", "y", "q"))
    after = net({"p": TOP, "m1": "s1", "m2": "s1", "q": TOP},
                {"x": "step1", "i": "intermediate step", "y": "step2"},
                chain("p", "x", "m1", "i", "m2", "y", "q"))
    ends = net({"p": TOP, "q": TOP}, {}, [])
    sn1_rules = [
        swap("r1", "step1", "step2"),
        swap("r2", "step2", "step1"),
        rule("r3", before, ends, after),
        rule("r4", after, ends, before),
    ]

    sn2_names = names(["ready", "done", "a1", "a2", "b1", "b2", "c"],
                      ["step", "fork", "join", "intermediate step", "parallel step"], (),
                      [("intermediate step", "step"), ("parallel step", "step")])
    sn2 = net(
        {"ready": "ready", "a1": "a1", "a2": "a2", "b1": "b1", "b2": "b2", "done": "done"},
        {"fork": "fork", "istep": "intermediate step", "pstep": "parallel step", "join": "join"},
        ["ready -> fork", "fork -> a1", "fork -> b1", "a1 -> istep", "istep -> a2",
         "b1 -> pstep", "pstep -> b2", "a2 -> join", "b2 -> join", "join -> done"],
        ns=sn2_names,
    )
    plain = net({"a1": "a1", "a2": "a2", "b1": "b1", "b2": "b2"},
                {"i": "intermediate step", "j": "parallel step"},
                ["a1 -> i", "i -> a2", "b1 -> j", "j -> b2"])
    extra = net({"a1": "a1", "a2": "a2", "b1": "b1", "b2": "b2", "c": "c"},
                {"i": "intermediate step", "j": "parallel step"},
                ["a1 -> i", "i -> a2", "i -> c", "b1 -> j", "c -> j", "j -> b2"])
    branch = net({"a1": "a1", "a2": "a2", "b1": "b1", "b2": "b2"}, {}, [])
    sn2_rules = [rule("r5", plain, branch, extra), rule("r6", extra, branch, plain)]

    counter = rule(
        "counter",
        net({"a": TOP, "b": TOP}, {"t": "step"}, chain("a", "t", "b")),
        net({"a": TOP, "b": TOP}, {}, []),
        net({"a": TOP, "b": TOP, "c": "counter"}, {"t": "step"}, chain("a", "t", "b") + ["t -> c"]),
    )
    return {
        "name": "main",
        "net": root,
        "subst_transitions": ["task2", "task3"],
        "subst": {
            "task2": {"subnet": {"name": "SN1", "net": sn1, "local_rules": sn1_rules}, "interface": ["ready", "done"]},
            "task3": {"subnet": {"name": "SN2", "net": sn2, "local_rules": sn2_rules}, "interface": ["ready", "done"]},
        },
        "connecting_labels": ["ready", "done"],
        "subst_labels": ["task2", "task3"],
        "name_space": global_names,
        "global_rules": [counter],
    }


# -- further hierarchies ----------------------------------------------------------

def shared_places():
    root = net({"p": "io", "q": "io", "r": "io"}, {"A": "A", "B": "B"},
               chain("p", "A", "q", "B", "r"), {"p": 1}, names(["io"], ["A", "B"]))
    a = net({"p": "io", "q": "io"}, {"a": "work"}, chain("p", "a", "q"), {"p": 1},
            names(["io"], ["work"]))
    b = net({"q": "io", "x": "buf", "r": "io"}, {"b1": "work", "b2": "work"},
            chain("q", "b1", "x", "b2", "r"), ns=names(["io", "buf"], ["work"]))
    return {
        "name": "shared", "net": root, "subst_transitions": ["A", "B"],
        "subst": {"A": {"subnet": {"name": "SA", "net": a}, "interface": ["p", "q"]},
                  "B": {"subnet": {"name": "SB", "net": b}, "interface": ["q", "r"]}},
        "connecting_labels": ["io"], "subst_labels": ["A", "B"],
    }


def three_subst():
    root = net({"src": "port", "dst": "port"}, {"s1": "S1", "s2": "S2", "s3": "S3", "back": "back"},
               ["src -> s1", "s1 -> dst", "src -> s2", "s2 -> dst", ("src", "s3", 2), "s3 -> dst",
                "dst -> back", "back -> src"],
               {"src": 2}, names(["port"], ["S1", "S2", "S3", "back"]))
    pipe = {"name": "pipe", "net": net({"in": "port", "m": "mid", "out": "port"}, {"u": "u", "v": "v"},
                                       chain("in", "u", "m", "v", "out"), {"in": 2},
                                       names(["port", "mid"], ["u", "v"]))}
    wide = net({"src": "port", "dst": "port", "k": "mid"}, {"w": "w"},
               [("src", "w", 2), "w -> dst", "w -> k"], {"src": 2}, names(["port", "mid"], ["w"]))
    return {
        "name": "three", "net": root, "subst_transitions": ["s1", "s2", "s3"],
        "layouts": {"pipe": pipe},
        "subst": {"s1": {"layout": "pipe", "interface": {"src": "in", "dst": "out"}},
                  "s2": {"layout": "pipe", "interface": {"src": "in", "dst": "out"}},
                  "s3": {"subnet": {"name": "wide", "net": wide}, "interface": ["src", "dst"]}},
        "connecting_labels": ["port"], "subst_labels": ["S1", "S2", "S3"],
    }


def nested():
    root = net({"a": "in", "b": "out", "z": "aux"}, {"T": "T", "U": "U"},
               ["a -> T", "T -> b", "b -> U", "U -> z"], {"a": 1},
               names(["in", "out", "aux"], ["T", "U"]))
    inner = net({"m": "mid", "n": "inner", "b": "out"}, {"y1": "y", "y2": "y"},
                chain("m", "y1", "n", "y2", "b"), ns=names(["mid", "inner", "out"], ["y"]))
    middle = net({"a": "in", "m": "mid", "b": "out", "k": "mid"}, {"x": "x", "S": "S", "S2": "S2"},
                 ["a -> x", "x -> m", "x -> k", "m -> S", "S -> b", "k -> S2", "S2 -> b"], {"a": 1},
                 names(["in", "mid", "out"], ["x", "S", "S2"]))
    inner2 = net({"k": "mid", "b": "out"}, {"y": "y"}, chain("k", "y", "b"), ns=names(["mid", "out"], ["y"]))
    tap = rule("tap",
               net({"m": "mid"}, {}, []), net({"m": "mid"}, {}, []),
               net({"m": "mid"}, {"drain": "x"}, ["m -> drain"]))
    t_level = {
        "name": "T", "net": middle, "subst_transitions": ["S", "S2"],
        "subst": {"S": {"subnet": {"name": "S", "net": inner, "local_rules": []}, "interface": ["m", "b"]},
                  "S2": {"subnet": {"name": "S2", "net": inner2}, "interface": ["k", "b"]}},
        "connecting_labels": ["mid", "out"], "subst_labels": ["S", "S2"],
        "local_rules": [tap],
    }
    u_level = {"name": "U", "net": net({"b": "out", "z": "aux"}, {"u": "u"}, chain("b", "u", "z"),
                                       ns=names(["out", "aux"], ["u"]))}
    return {
        "name": "nested", "net": root, "subst_transitions": ["T", "U"],
        "subst": {"T": {"subnet": t_level, "interface": ["a", "b"]},
                  "U": {"subnet": u_level, "interface": ["b", "z"]}},
        "connecting_labels": ["in", "out", "aux"], "subst_labels": ["T", "U"],
    }


def layout_reuse():
    root = net({"stock": "stock", "p": "pool", "q": "pool", "r": "pool"},
               {"feed": "feed", "t1": "W1", "t2": "W2"},
               chain("stock", "feed", "p", "t1", "q", "t2", "r"), {"stock": 3},
               names(["stock", "pool"], ["feed", "W1", "W2"]))
    worker_net = net({"in": "pool", "busy": "busy", "out": "pool"}, {"take": "take", "put": "put"},
                     chain("in", "take", "busy", "put", "out"), ns=names(["pool", "busy"], ["take", "put"]))
    ends = net({"a": "pool", "b": "pool"}, {}, [])
    retire = rule("retire",
                  net({"a": "pool", "x": "busy", "b": "pool"}, {"take": "take", "put": "put"},
                      chain("a", "take", "x", "put", "b")),
                  ends,
                  net({"a": "pool", "b": "pool"}, {"put": "put"}, chain("a", "put", "b")))
    worker = {"name": "worker", "net": worker_net, "local_rules": [retire]}
    return {
        "name": "reuse", "net": root, "subst_transitions": ["t1", "t2"],
        "layouts": {"worker": worker},
        "subst": {"t1": {"layout": "worker", "interface": {"p": "in", "q": "out"}},
                  "t2": {"layout": "worker", "interface": {"q": "in", "r": "out"}}},
        "connecting_labels": ["pool"], "subst_labels": ["W1", "W2"],
    }


# -- name spaces, firing, gluing --------------------------------------------------

def name_space_fixture():
    rel = [("a", "b"), ("c", "d"), ("e", "g"), ("f", "g")]
    g = poset("abcdefg", rel, "z")
    return {
        "global": g,
        "locals": {
            "A1": poset("abc", [("a", "b")], "z"),
            "A2": poset("bde", [], "z"),
            "A3": poset("aefg", [("e", "g"), ("f", "g")], "z"),
        },
    }


def producer_consumer():
    return net(
        {"idle": "p", "ready": "p", "buffer": "p", "waiting": "p", "done": "p"},
        {"produce": "t", "deliver": "t", "consume": "t", "reset": "t"},
        ["idle -> produce", "produce -> ready", "ready -> deliver", "deliver -> idle",
         ("deliver", "buffer", 2), "waiting -> consume", "buffer -> consume", "consume -> done",
         "done -> reset", "reset -> waiting"],
        {"idle": 1, "waiting": 2},
    )


def decorated():
    ends = {"on": "off", "off": "on"}
    cycle = {"a": "b", "b": "c", "c": "a", "on": "on", "off": "off"}
    return net(
        {"p": "p", "q": "p", "r": "p"}, {"t": "t", "u": "t", "v": "t"},
        ["p -> t", "t -> q", "q -> u", "u -> p", "p -> v", "v -> r", "r -> v"],
        {"p": 2, "r": 1},
        decorations={
            "capacity": {"q": 3, "r": 1},
            "tags": ["on", "off", "a", "b", "c"],
            "endomorphisms": {"swap": {**ends, "a": "a", "b": "b", "c": "c"}, "cycle": cycle},
            "tlb": {"t": "on", "u": "a", "v": "off"},
            "rnw": {"t": "swap", "u": "cycle", "v": "swap"},
        },
    )


def gluing():
    host = net({"p": "p", "q": "p", "r": "p"}, {"t": "t", "u": "t"},
               chain("p", "t", "q", "u", "r"), {"p": 1, "r": 2})
    drop = rule("drop", net({"x": "p"}, {}, []), net({}, {}, []), net({}, {}, []))
    return host, [drop]


def self_disabling():
    return net({"a": "p", "b": "p"}, {"t": "t"}, chain("a", "t", "b"), {"a": 2})


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    files = {
        "single_subst": single_subst(),
        "tasks_steps": tasks_steps(),
        "shared_places": shared_places(),
        "three_subst": three_subst(),
        "nested": nested(),
        "layout_reuse": layout_reuse(),
        "name_space": name_space_fixture(),
        "producer_consumer": producer_consumer(),
        "decorated": decorated(),
        "self_disabling": self_disabling(),
    }
    host, rules = gluing()
    files["gluing_net"] = host
    files["gluing_rules"] = rules
    for name, data in files.items():
        (OUT / f"{name}.json").write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"wrote {len(files)} fixtures to {OUT}")


if __name__ == "__main__":
    main()

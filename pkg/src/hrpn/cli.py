"""Command-line front end.

Exit codes: 0 success, 1 domain violation (validation, gluing, negative
check), 2 input error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import io
from .dpo import (AlphabetError, GluingViolation, NameCollision, gluing_violations,
                  parallel_independent, transform)
from .hier import CyclicHierarchy, HierError, HierNet, flatten_full, is_well_defined
from .match import find_occurrences, isomorphic
from .net import PTNet
from .sim import simulate


class InputError(Exception):
    pass


class Model:
    """A loaded input: optional hierarchy plus its flat net and rules."""

    def __init__(self, kind, hn: HierNet | None, net: PTNet, rules, names, cached: bool):
        self.kind, self.hn, self.net, self.rules, self.names = kind, hn, net, list(rules), names
        self.cached = cached


def _load(path, verify_cache=False) -> Model:
    kind, obj = io.load_model(path)
    if kind == "net":
        return Model(kind, None, obj, [], obj.names, False)
    if kind == "flat":
        net, rules, names = obj
        return Model(kind, None, net, rules, names, True)
    if kind == "hierarchical":
        flat = flatten_full(obj)
        return Model(kind, obj, flat.net, flat.rules, flat.names, False)
    hn, cached = obj
    if cached is None or verify_cache:
        flat = flatten_full(hn)
        if cached is not None:
            net, rules, _ = cached
            if isomorphic(net, flat.net) is None or sorted(r.name for r in rules) != sorted(r.name for r in flat.rules):
                raise InputError("cached flat component does not match the hierarchy")
        return Model(kind, hn, flat.net, flat.rules, flat.names, False)
    net, rules, names = cached
    return Model(kind, hn, net, rules, names, True)


def _rules(model: Model, rule_file) -> list:
    rules = list(model.rules)
    if rule_file:
        data = io.load_json(rule_file)
        items = data if isinstance(data, list) else data.get("rules", [data]) if isinstance(data, dict) else None
        if items is None:
            raise io.ParseError("$", "expected a rule or a list of rules")
        rules += [io.rule_from_json(r, f"$[{i}]", model.names) for i, r in enumerate(items)]
    return rules


def _rule(rules, name):
    for r in rules:
        if r.name == name:
            return r
    raise InputError(f"no rule named {name!r}; known: {', '.join(r.name for r in rules) or 'none'}")


def _occurrence(model: Model, rule, index):
    occ = find_occurrences(rule.L, model.net)
    if not 0 <= index < len(occ):
        raise InputError(f"rule {rule.name!r} has {len(occ)} occurrences, index {index} is out of range")
    return occ[index]


def _emit(args, payload: dict, text: str):
    out = io.dumps(payload) if args.format == "json" else text.rstrip("\n") + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


# commands

def cmd_validate(args) -> int:
    kind, obj = io.load_model(args.path)
    if kind == "net":
        diags = obj.label_diagnostics()
    elif kind == "flat":
        net, rules, _ = obj
        diags = net.label_diagnostics() + [
            f"rule {r.name!r}: {d}" for r in rules for n in r.nets() for d in n.label_diagnostics()]
    else:
        hn = obj if kind == "hierarchical" else obj[0]
        _, diags = is_well_defined(hn)
        if kind == "persisted" and args.verify_cache and not diags:
            try:
                _load(args.path, verify_cache=True)
            except InputError as e:
                diags = [str(e)]
    text = "ok" if not diags else "\n".join(diags)
    _emit(args, {"ok": not diags, "diagnostics": diags}, text)
    return 0 if not diags else 1


def flatten_document(model: Model) -> dict:
    hier = io.hiernet_to_json(model.hn) if model.hn is not None else None
    doc = {"hierarchical": hier} if hier is not None else {}
    doc["flat"] = io.flat_to_json(model.net, model.rules, model.names)
    return doc


def cmd_flatten(args) -> int:
    kind, obj = io.load_model(args.path)
    hn = obj if kind == "hierarchical" else obj[0] if kind == "persisted" else None
    if hn is not None:
        ok, diags = is_well_defined(hn)
        if not ok:
            sys.stderr.write("\n".join(diags) + "\n")
            return 1
    model = _load(args.path, args.verify_cache)
    doc = flatten_document(model)
    net = model.net
    text = f"{len(net.places)} places, {len(net.transitions)} transitions, {len(model.rules)} rules"
    if args.format == "json" or args.out:
        out = io.dumps(doc)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(out)
            sys.stdout.write(text + "\n")
        else:
            sys.stdout.write(out)
    else:
        sys.stdout.write(text + "\n")
    return 0


def cmd_simulate(args) -> int:
    model = _load(args.path, args.verify_cache)
    rules = _rules(model, args.rule_file)
    trace, final = simulate(model.net, rules, args.steps, args.seed)
    payload = {"seed": args.seed, "steps": args.steps, "trace": trace.events,
               "final": io.net_to_json(final, names=False)}
    lines = []
    for e in trace.events:
        what = e["transition"] if e["kind"] == "fire" else e["rule"]
        lines.append(f"{e['step']:>4} {e['kind']:<4} {what}  [{' '.join(e['post'])}]")
    lines.append(f"final marking: {' '.join(f'{p}:{n}' for p, n in sorted(final.marking.items())) or '(empty)'}")
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_match(args) -> int:
    model = _load(args.path, args.verify_cache)
    rules = _rules(model, args.rule_file)
    rule = _rule(rules, args.rule)
    occs = find_occurrences(rule.L, model.net)
    items = []
    for i, o in enumerate(occs):
        reasons = sorted({k for k, _ in gluing_violations(rule, o)})
        items.append({"index": i, **o.to_json(), "gluing": reasons or "ok"})
    lines = [f"{len(occs)} occurrences of {rule.name}"]
    for it in items:
        ts = ", ".join(f"{a}->{b}" for a, b in it["transitions"].items())
        ps = ", ".join(f"{a}->{b}" for a, b in it["places"].items())
        lines.append(f"[{it['index']}] {ts} | {ps} | gluing: {it['gluing'] if isinstance(it['gluing'], str) else ','.join(it['gluing'])}")
    _emit(args, {"rule": rule.name, "count": len(occs), "occurrences": items}, "\n".join(lines))
    return 0


def cmd_apply(args) -> int:
    model = _load(args.path, args.verify_cache)
    rules = _rules(model, args.rule_file)
    rule = _rule(rules, args.rule)
    o = _occurrence(model, rule, args.index)
    try:
        step = transform(model.net, rule, o)
    except GluingViolation as e:
        _emit(args, {"ok": False, "reason": e.kinds, "details": [list(r) for r in e.reasons]},
              f"not applicable: {', '.join(e.kinds)}")
        return 1
    except (AlphabetError, NameCollision) as e:
        _emit(args, {"ok": False, "reason": [type(e).__name__], "details": str(e)}, f"not applicable: {e}")
        return 1
    result = step.result
    text = f"applied {rule.name} at occurrence {args.index}: {len(result.places)} places, {len(result.transitions)} transitions"
    _emit(args, {"ok": True, "net": io.net_to_json(result)}, text)
    return 0


def _pair(spec: str):
    name, sep, idx = spec.rpartition("@")
    if not sep or not idx.isdigit():
        raise InputError(f"expected RULE@INDEX, got {spec!r}")
    return name, int(idx)


def cmd_independent(args) -> int:
    model = _load(args.path, args.verify_cache)
    rules = _rules(model, args.rule_file)
    picked = []
    for spec in (args.first, args.second):
        name, idx = _pair(spec)
        rule = _rule(rules, name)
        picked.append((rule, _occurrence(model, rule, idx)))
    ok = parallel_independent(picked[0], picked[1], model.net)
    _emit(args, {"independent": ok}, "independent" if ok else "not independent")
    return 0 if ok else 1


def cmd_isomorphic(args) -> int:
    a, b = _load(args.first, args.verify_cache), _load(args.second, args.verify_cache)
    w = isomorphic(a.net, b.net)
    if w is None:
        _emit(args, {"isomorphic": False}, "not isomorphic")
        return 1
    _emit(args, {"isomorphic": True, "witness": w.to_json()},
          "isomorphic\n" + "\n".join(f"{x} -> {y}" for x, y in sorted({**w.fP, **w.fT}.items())))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hrpn", description="Hierarchical reconfigurable Petri nets")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out=True):
        sp.add_argument("--format", choices=("json", "text"), default="text")
        sp.add_argument("--verify-cache", action="store_true",
                        help="re-flatten persisted inputs and compare with the cached flat net")
        if out:
            sp.add_argument("--out", help="write the result to this file")

    sp = sub.add_parser("validate", help="check well-definedness")
    sp.add_argument("path")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("flatten", help="flatten a hierarchy into net, rules and name space")
    sp.add_argument("path")
    common(sp)
    sp.set_defaults(func=cmd_flatten)

    sp = sub.add_parser("simulate", help="seeded run mixing firing and rule application")
    sp.add_argument("path")
    sp.add_argument("--steps", type=int, default=10)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--rule-file")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("match", help="list occurrences of a rule")
    sp.add_argument("path")
    sp.add_argument("--rule", required=True)
    sp.add_argument("--rule-file")
    common(sp)
    sp.set_defaults(func=cmd_match)

    sp = sub.add_parser("apply", help="apply a rule at an occurrence")
    sp.add_argument("path")
    sp.add_argument("--rule", required=True)
    sp.add_argument("--index", type=int, default=0, help="occurrence index as listed by 'match'")
    sp.add_argument("--rule-file")
    common(sp)
    sp.set_defaults(func=cmd_apply)

    sp = sub.add_parser("independent", help="parallel independence of two rule applications")
    sp.add_argument("path")
    sp.add_argument("first", help="RULE@INDEX")
    sp.add_argument("second", help="RULE@INDEX")
    sp.add_argument("--rule-file")
    common(sp)
    sp.set_defaults(func=cmd_independent)

    sp = sub.add_parser("isomorphic", help="compare two nets up to renaming")
    sp.add_argument("first")
    sp.add_argument("second")
    common(sp)
    sp.set_defaults(func=cmd_isomorphic)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "steps", 0) is not None and getattr(args, "steps", 0) < 0:
        parser.error("--steps must be non-negative")
    if getattr(args, "seed", 0) is not None and getattr(args, "seed", 0) < 0:
        parser.error("--seed must be non-negative")
    try:
        return args.func(args)
    except io.ParseError as e:
        sys.stderr.write(f"parse error at {e}\n")
        return 2
    except (InputError, CyclicHierarchy) as e:
        sys.stderr.write(f"input error: {e}\n")
        return 2
    except HierError as e:
        sys.stderr.write(f"{e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

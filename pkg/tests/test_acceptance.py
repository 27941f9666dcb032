"""Acceptance suite.  Each test records one PASS/FAIL line, printed in the
terminal summary and also to stdout (visible with ``-s``)."""

import itertools
import json
import random
import time

from hrpn import io, fixture_path
from hrpn.cli import main
from hrpn.dpo import gluing_condition, parallel_independent, transform
from hrpn.hier import apply_as_long_as_possible, flatten_full, flatten_recursive, substitutions
from hrpn.lset import is_M, pullback, pushout_along_M
from hrpn.match import find_occurrences, isomorphic
from hrpn.net import CapacityExceeded, NotEnabled, enabled_transitions, fire, fire_parallel, mset_add
from hrpn.poset import PosetG, name_space
from hrpn.sim import replay, simulate

from oracles import (
    ACCEPTANCE, brute_occurrences, church_rosser, minimal_lset, occurrence_keys, overlap_in_deleted,
    pullback_universal, pushout_universal, random_lset, random_m_span, random_morphism,
    set_pushout_size, square_commutes_pb, square_commutes_po, top_lset, tree_alphabet,
)

HIER = ["single_subst", "tasks_steps", "shared_places", "three_subst", "nested", "layout_reuse"]
NETS = ["producer_consumer", "decorated", "self_disabling"]


def load(name):
    return io.load_model(fixture_path(name))[1]


def report(n, title, ok, detail, elapsed, limit=None):
    in_time = limit is None or elapsed < limit
    status = "PASS" if ok and in_time else "FAIL"
    budget = f" (limit {limit:g} s)" if limit is not None else ""
    line = f"[{status}] {n}. {title}: {detail}; {elapsed:.2f} s{budget}"
    ACCEPTANCE[n] = line
    print(line)
    assert ok, line
    assert in_time, line


# 1 ---------------------------------------------------------------------------

def test_1_universal_properties():
    t0 = time.perf_counter()
    rng = random.Random(1)
    spans = cospans = 0
    ok = True
    po, pb = {}, {}
    while spans < 200:
        alpha = tree_alphabet(rng, rng.randint(2, 6))
        n0 = rng.randint(0, 3)
        span = random_m_span(rng, alpha, n0, rng.randint(n0, 5), rng.randint(1 if n0 else 0, 5))
        if span is None:
            continue
        f, g = span
        s3, f_, g_ = pushout_along_M(f, g)
        tests = [random_lset(rng, alpha, 2, "t"), minimal_lset(alpha)]
        ok &= (square_commutes_po(f, g, f_, g_) and is_M(f_).is_m
               and len(s3) == set_pushout_size(f, g) and pushout_universal(f, g, s3, f_, g_, tests, po))
        spans += 1
    while cospans < 200:
        alpha = tree_alphabet(rng, rng.randint(2, 6))
        s0 = random_lset(rng, alpha, rng.randint(1, 5), "o")
        s1 = random_lset(rng, alpha, rng.randint(0, 5), "a")
        s2 = random_lset(rng, alpha, rng.randint(0, 5), "b")
        in_m = rng.random() < 0.5
        g = random_morphism(rng, s1, s0)
        f = random_morphism(rng, s2, s0, injective=in_m, strict=in_m)
        if g is None or f is None:
            continue
        s3, f_, g_ = pullback(g, f)
        tests = [random_lset(rng, alpha, 2, "t"), top_lset(alpha, 2)]
        ok &= square_commutes_pb(g, f, f_, g_) and pullback_universal(g, f, s3, f_, g_, tests, pb)
        if is_M(f).is_m:
            ok &= is_M(f_).is_m
        cospans += 1
    report(1, "pushout/pullback universal properties", ok,
           f"{spans} spans ({po['cones']} cocones), {cospans} cospans ({pb['cones']} cones)",
           time.perf_counter() - t0, 10)


# 2 ---------------------------------------------------------------------------

def level_orders(hn, path=()):
    """Every combination of per-level substitution orders."""
    keyed = []

    def walk(h, p):
        if h.subst:
            keyed.append(("/".join(p), list(itertools.permutations(h.subst_transitions))))
        for t in h.subst_transitions:
            walk(h.subst[t].subnet, p + (t,))

    walk(hn, path)
    keys = [k for k, _ in keyed]
    for combo in itertools.product(*(perms for _, perms in keyed)):
        yield dict(zip(keys, (list(c) for c in combo)))


def max_subst_per_level(hn):
    return max([len(hn.subst)] + [max_subst_per_level(sr.subnet) for sr in hn.subst.values()])


def test_2_flattening_confluence():
    t0 = time.perf_counter()
    ok = True
    runs = 0
    nested = False
    for name in HIER:
        hn = load(name)
        assert max_subst_per_level(hn) <= 3
        nested |= any(sr.subnet.subst for sr in hn.subst.values())
        ref = flatten_recursive(hn).net
        for orders in level_orders(hn):
            ok &= isomorphic(flatten_recursive(hn, orders).net, ref) is not None
            runs += 1
        for seed in range(3):
            ok &= isomorphic(apply_as_long_as_possible(hn, seed), ref) is not None
            runs += 1
    ok &= nested
    report(2, "flattening confluence", ok, f"{len(HIER)} fixtures, {runs} flattenings",
           time.perf_counter() - t0, 30)


# 3 ---------------------------------------------------------------------------

def all_levels(hn):
    yield hn
    for t in hn.subst_transitions:
        yield from all_levels(hn.subst[t].subnet)


def test_3_substitution_independence():
    t0 = time.perf_counter()
    ok = True
    pairs = selfs = 0
    for name in HIER:
        for level in all_levels(load(name)):
            if not level.subst:
                continue
            subs = substitutions(level)
            for a, b in itertools.combinations(subs, 2):
                ok &= parallel_independent((a.rule, a.occurrence), (b.rule, b.occurrence))
                pairs += 1
            for s in subs:
                ok &= not parallel_independent((s.rule, s.occurrence), (s.rule, s.occurrence))
                selfs += 1
    report(3, "substitution independence", ok, f"{pairs} distinct pairs independent, {selfs} self-pairs rejected",
           time.perf_counter() - t0)


# 4 ---------------------------------------------------------------------------

def test_4_tasks_steps_example():
    t0 = time.perf_counter()
    hn = load("tasks_steps")
    flat = flatten_full(hn)
    net = flat.net
    rules = {r.name: r for r in flat.rules}
    ok = len([r for r in flat.rules if r.scope.startswith("local")]) == 6

    counter = rules["counter"]
    occ = find_occurrences(counter.L, net)
    brute = brute_occurrences(counter.L, net)
    ok &= occurrence_keys(occ, counter.L) == brute and len(brute) == 4
    hit = sorted(net.transitions[o.fT["t"]] for o in occ)
    ok &= hit == ["task2::step1", "task2::step2", "task3::intermediate step", "task3::parallel step"]
    for label in hit:
        ok &= flat.names.transitions.leq(label, label.split("::")[1])

    local_counts = {}
    for name, r in rules.items():
        if r.scope == "global":
            continue
        prefix = name.split("/")[0]
        cp = set(hn.subst[prefix].interface)
        occs = find_occurrences(r.L, net)
        ok &= occurrence_keys(occs, r.L) == brute_occurrences(r.L, net)
        for o in occs:
            ok &= all(t.startswith(prefix + "/") for t in o.fT.values())
            ok &= all(p.startswith(prefix + "/") or p in cp for p in o.fP.values())
        local_counts[name] = len(occs)
    ok &= local_counts == {"task2/r1": 1, "task2/r2": 1, "task2/r3": 1, "task2/r4": 0, "task3/r5": 1, "task3/r6": 0}

    (o3,) = find_occurrences(rules["task2/r3"].L, net)
    split = transform(net, rules["task2/r3"], o3).result
    (o4,) = find_occurrences(rules["task2/r4"].L, split)
    back = transform(split, rules["task2/r4"], o4).result
    ok &= isomorphic(back, net) is not None
    report(4, "tasks/steps example", ok,
           f"counter has {len(brute)} occurrences, local matches {local_counts}, r3;r4 round-trips",
           time.perf_counter() - t0)


# 5 ---------------------------------------------------------------------------

def rule_states(name, seed, depth):
    """Nets reached from a flattened fixture by random rule applications."""
    flat = flatten_full(load(name))
    rng = random.Random(seed)
    net = flat.net
    yield net, flat.rules
    for _ in range(depth):
        steps = [(r, o) for r in flat.rules for o in find_occurrences(r.L, net) if gluing_condition(r, o)]
        if not steps:
            return
        r, o = rng.choice(steps)
        net = transform(net, r, o).result
        yield net, flat.rules


def test_5_local_church_rosser():
    t0 = time.perf_counter()
    ok = True
    independent = dependent = 0
    for name, seed in itertools.product(("tasks_steps", "layout_reuse"), range(4)):
        for net, rules in rule_states(name, seed, 3):
            steps = [(r, o) for r in rules for o in find_occurrences(r.L, net) if gluing_condition(r, o)]
            for a, b in itertools.combinations(steps, 2):
                if overlap_in_deleted(net, a, b):
                    ok &= parallel_independent(a, b, net) and church_rosser(net, a, b)
                    independent += 1
                else:
                    ok &= not parallel_independent(a, b, net)
                    dependent += 1
    ok &= independent >= 50 and dependent >= 10
    report(5, "local Church-Rosser", ok, f"{independent} independent pairs commute, "
           f"{dependent} dependent pairs rejected", time.perf_counter() - t0)


# 6 ---------------------------------------------------------------------------

def power(fn, tag, k):
    for _ in range(k):
        tag = fn[tag]
    return tag


def firing_nets():
    nets = [load(n) for n in NETS]
    nets += [flatten_recursive(load(n)).net for n in HIER]
    return nets


def test_6_firing_semantics():
    t0 = time.perf_counter()
    rng = random.Random(6)
    ok = True
    steps = 0
    nets = firing_nets()
    while steps < 1000:
        net = rng.choice(nets)
        for _ in range(40):
            fireable = []
            for t in enabled_transitions(net):
                try:
                    fireable.append((t, fire(net, t)))
                except CapacityExceeded:
                    pass
            if not fireable:
                break
            t, nxt = rng.choice(fireable)
            ok &= mset_add(nxt.marking, net.pre[t]) == mset_add(net.marking, net.post[t])
            if t in net.rnw:
                ok &= nxt.tlb[t] == net.endomorphisms[net.rnw[t]][net.tlb[t]]
            ok &= all(nxt.tlb[u] == net.tlb[u] for u in net.tlb if u != t)
            net = nxt
            steps += 1

    # parallel steps against every linearisation
    vectors = 0
    for net in nets:
        if net.capacity:
            continue
        for _ in range(15):
            v = {t: rng.randint(0, 2) for t in net.transitions}
            try:
                par = fire_parallel(net, v)
            except NotEnabled:
                continue
            seq = [t for t, k in sorted(v.items()) for _ in range(k)]
            orders = {tuple(rng.sample(seq, len(seq))) for _ in range(6)}
            for order in orders:
                cur = net
                for t in order:
                    cur = fire(cur, t)
                ok &= cur.marking == par.marking
            vectors += 1

    # renewal through k parallel firings, including the involution
    dec = load("decorated").with_marking({"p": 6, "q": 3, "r": 1})
    swap = dec.endomorphisms["swap"]
    ok &= all(swap[swap[x]] == x for x in dec.tags)
    for k in range(4):
        after = fire_parallel(dec, {"u": k})
        ok &= after.tlb["u"] == power(dec.endomorphisms["cycle"], dec.tlb["u"], k)
        t_after = fire_parallel(dec.with_marking({"p": 3}), {"t": min(k, 3)})
        ok &= t_after.tlb["t"] == (dec.tlb["t"] if min(k, 3) % 2 == 0 else swap[dec.tlb["t"]])
    ok &= vectors > 0
    report(6, "firing semantics", ok, f"{steps} firing steps, {vectors} parallel vectors, renewal powers 0..3",
           time.perf_counter() - t0)


# 7 ---------------------------------------------------------------------------

def test_7_name_space_dominance():
    t0 = time.perf_counter()
    doc = io.load_json(fixture_path("name_space"))
    glob = PosetG.from_json(doc["global"])
    locals_ = [(k, PosetG.from_json(v)) for k, v in sorted(doc["locals"].items())]
    ns = name_space(glob, locals_)
    A = ns.poset
    ok = True
    for lid, local in locals_:
        c = ns.local_maps[lid]
        for x in local.elements - {local.greatest}:
            ok &= A.leq(c(x), ns.global_map(x))
            for y in local.elements - {local.greatest}:
                ok &= A.leq(c(x), c(y)) == local.leq(x, y)
    for (i, li), (j, lj) in itertools.combinations(locals_, 2):
        for x in li.elements - {li.greatest}:
            for y in lj.elements - {lj.greatest}:
                a, b = ns.local_maps[i](x), ns.local_maps[j](y)
                ok &= not A.leq(a, b) and not A.leq(b, a)
                common = {u for u in A.elements if A.leq(a, u) and A.leq(b, u)}
                ok &= all("::" not in u for u in common)
    expected = sum(len(l.elements) - 1 for _, l in locals_) + (len(glob.elements) - 1) + 1
    ok &= len(A.elements) == expected == 18
    report(7, "name-space dominance", ok, f"|A| = {len(A.elements)}, formula gives {expected}",
           time.perf_counter() - t0)


# 8 ---------------------------------------------------------------------------

def cli_out(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_8_determinism_and_replay(capsys, tmp_path):
    t0 = time.perf_counter()
    ok = True
    for name in HIER + NETS:
        path = str(fixture_path(name))
        a = cli_out(capsys, "simulate", path, "--steps", "30", "--seed", "7", "--format", "json")
        b = cli_out(capsys, "simulate", path, "--steps", "30", "--seed", "7", "--format", "json")
        ok &= a == b and a[0] == 0

        model = load(name)
        if name in HIER:
            flat = flatten_full(model)
            net, rules = flat.net, flat.rules
        else:
            net, rules = model, []
        for seed in range(3):
            trace, final = simulate(net, rules, 30, seed)
            again, _ = simulate(net, rules, 30, seed)
            ok &= json.dumps(trace.to_json()) == json.dumps(again.to_json())
            ok &= replay(net, rules, trace.events) == final

        once, twice, thrice = (tmp_path / f"{name}.{i}.json" for i in range(3))
        ok &= cli_out(capsys, "flatten", path, "--out", str(once))[0] == 0
        ok &= cli_out(capsys, "flatten", str(once), "--out", str(twice))[0] == 0
        ok &= once.read_bytes() == twice.read_bytes()
        flat_only = tmp_path / f"{name}.flat.json"
        flat_only.write_text(io.dumps({"flat": json.loads(once.read_text())["flat"]}))
        ok &= cli_out(capsys, "flatten", str(flat_only), "--out", str(thrice))[0] == 0
        ok &= json.loads(thrice.read_text())["flat"] == json.loads(once.read_text())["flat"]
    report(8, "determinism and replay", ok, f"{len(HIER + NETS)} fixtures: traces, replay, flatten idempotent",
           time.perf_counter() - t0)

import hashlib
import json

import pytest

from uspkit import (
    RunLimits,
    SplitMix64,
    UspRuntimeError,
    instantiate,
    parse,
    run,
    run_tick,
    validate,
)

FORCED = {"pArrival": 1.0, "pService": 1.0}


def _vm(source: str):
    result = parse(source, "engine-test.usp")
    assert result.ok, [d.render() for d in result.diagnostics]
    vr = validate(result.model)
    assert vr.ok, [d.render() for d in vr.diagnostics]
    return vr.validated


def _world(extra_attrs: str = "", extra_ops: str = "", init: str = ""):
    return _vm(
        "model M { "
        'class World «boundary» concept "w" { '
        f"{extra_attrs} "
        f"op Exist «Exist» {{ }} "
        f"{extra_ops} "
        + (f"op init «Rule» {{ {init} }} " if init else "")
        + "} }"
    )


def _eval(expr: str, attrs: str = "attr out «state» : Int;", ticks: int = 1):
    vm = _world(
        extra_attrs=attrs,
        extra_ops=f"op compute «Rule» {{ self.out := {expr}; }}",
    )
    state = instantiate(vm, "World", seed=0)
    state.dispatch(None, state.boundary, "compute", (), vm.boundary.source_span)
    return state.boundary.slots["out"]


# ---- interpreter core ----

def test_arithmetic():
    assert _eval("1 + 2") == 3
    assert _eval("2 * 3 + 4") == 10
    assert _eval("7 - 2 * 3") == 1
    assert _eval("6 / 2") == 3
    assert _eval("-4 + 1") == -3
    assert _eval("0.5 + 0.25", attrs="attr out «state» : Real;") == 0.75
    assert _eval("1 / 4.0", attrs="attr out «state» : Real;") == 0.25


def test_comparisons_and_booleans():
    assert _eval("1 < 2", attrs="attr out «state» : Bool;") is True
    assert _eval("2 <= 1", attrs="attr out «state» : Bool;") is False
    assert _eval("1 == 1 && !(2 == 3)", attrs="attr out «state» : Bool;") is True
    assert _eval("false || true", attrs="attr out «state» : Bool;") is True


def test_int_division_with_remainder_is_a_runtime_error():
    with pytest.raises(UspRuntimeError) as exc:
        _eval("7 / 2")
    assert exc.value.diagnostic.rule_id == "R002"


def test_division_by_zero():
    with pytest.raises(UspRuntimeError) as exc:
        _eval("1 / 0")
    assert exc.value.diagnostic.rule_id == "R003"
    with pytest.raises(UspRuntimeError):
        _eval("1.0 / 0.0", attrs="attr out «state» : Real;")


def test_rand_consumes_exactly_one_step_per_call():
    vm = _world(
        extra_attrs="attr a «state» : Real; attr b «state» : Real; "
        "attr c «state» : Real;",
        extra_ops="op draw «Rule» { self.a := rand(); self.b := rand(); "
        "self.c := rand(); }",
    )
    state = instantiate(vm, "World", seed=0)
    state.dispatch(None, state.boundary, "draw", (), vm.boundary.source_span)
    ref = SplitMix64(0)
    expected = [ref.next_float() for _ in range(3)]
    assert [
        state.boundary.slots[k] for k in ("a", "b", "c")
    ] == expected


def test_text_slots_and_equality():
    out = _eval('"ab"', attrs="attr out «state» : Text;")
    assert out == "ab"
    assert _eval('"x" == "x"', attrs="attr out «state» : Bool;") is True


# ---- instantiate ----

def test_corpus_instantiation(corpus_vm):
    state = instantiate(corpus_vm, "Node", seed=42, probes=("queue_length",))
    assert state.boundary.id == "Root#0"
    assert state.root.id == "Node#1"
    # engine wires the boundary/root «ref» slots both ways
    assert state.boundary.slots["office"] is state.root
    assert state.root.slots["boss"] is state.boundary
    # Fig. 3 initial state: two customers in the queue
    assert state.probe_series["queue_length"] == [2]
    clerk = state.root.slots["clerk"]
    assert clerk.id == "Leaf#2"
    assert clerk.slots["busy"] is False
    assert state.root.slots["list"] == [clerk]


def test_default_initialisation_without_init_hook():
    vm = _world(
        extra_attrs="attr n «state» : Int; attr x «state» : Real; "
        "attr flag «state» : Bool; attr note «state» : Text; "
        "attr peer «ref» : World?; attr kids «parts» : list<World>;"
    )
    state = instantiate(vm, "World", seed=5)
    slots = state.boundary.slots
    assert slots["n"] == 0
    assert slots["x"] == 0.0
    assert slots["flag"] is False
    assert slots["note"] == ""
    assert slots["peer"] is state.boundary  # root == boundary wires to itself
    assert slots["kids"] == []
    assert state.tick == 0


def test_same_seed_same_initial_state(corpus_vm):
    a = instantiate(corpus_vm, "Node", seed=9, probes=("queue_length",))
    b = instantiate(corpus_vm, "Node", seed=9, probes=("queue_length",))
    assert a.probe_series == b.probe_series
    assert [e.id for e in (a.boundary, a.root)] == ["Root#0", "Node#1"]
    assert a.entities_created == b.entities_created


def test_overrides_apply_after_init(corpus_vm):
    state = instantiate(corpus_vm, "Node", seed=0, overrides={"pArrival": 1})
    assert state.boundary.slots["pArrival"] == 1.0  # coerced Int -> Real
    assert state.boundary.slots["pService"] == 0.5  # init default kept


def test_override_unknown_slot(corpus_vm):
    with pytest.raises(UspRuntimeError) as exc:
        instantiate(corpus_vm, "Node", seed=0, overrides={"ghost": 1})
    assert exc.value.diagnostic.rule_id == "R011"


def test_bad_root_classes(corpus_vm):
    for name, fragment in [
        ("Ghost", "unknown root class"),
        ("Composite", "abstract"),
        ("QueueMember", "not a frame"),
    ]:
        with pytest.raises(UspRuntimeError) as exc:
            instantiate(corpus_vm, name, seed=0)
        assert exc.value.diagnostic.rule_id == "R009"
        assert fragment in exc.value.diagnostic.message


# ---- ticks and traces ----

def test_fig3_tick_ordering(corpus_vm):
    result = run(
        corpus_vm, "Node", seed=7, ticks=1, probes=("queue_length",),
        overrides=FORCED, collect_events=True,
    )
    tick1 = [e for e in result.trace.events if e.tick == 1]
    ops = [e.op for e in tick1]
    expected = ["enter", "standInQueue", "approachClerk", "shiftQueue",
                "serve", "leave"]
    it = iter(ops)
    assert all(op in it for op in expected), ops
    boundary_exists = [
        e for e in tick1 if e.op == "Exist" and e.receiver == "Root#0"
    ]
    assert len(boundary_exists) == 1


def test_quiescent_tick_still_advances_time(corpus_vm):
    # drain the two initial customers, then nothing arrives
    result = run(
        corpus_vm, "Node", seed=3, ticks=3,
        overrides={"pArrival": 0.0, "pService": 1.0},
        collect_events=True,
    )
    tick3 = [e for e in result.trace.events if e.tick == 3]
    assert {e.op for e in tick3} == {"Exist"}
    assert [e for e in tick3 if e.receiver == "Root#0"] != []
    assert result.stats.ticks == 3


def test_exactly_one_boundary_exist_per_tick(corpus_vm):
    result = run(
        corpus_vm, "Node", seed=11, ticks=20, overrides={"pArrival": 0.7},
        collect_events=True,
    )
    for t in range(1, 21):
        count = sum(
            1
            for e in result.trace.events
            if e.tick == t and e.op == "Exist" and e.receiver == "Root#0"
            and e.sender == "engine"
        )
        assert count == 1
    assert result.stats.ticks == 20


def test_seq_is_gapless_and_ticks_nondecreasing(corpus_vm):
    result = run(
        corpus_vm, "Node", seed=4, ticks=10, overrides={"pArrival": 0.9},
        collect_events=True,
    )
    events = result.trace.events
    assert [e.seq for e in events] == list(range(1, len(events) + 1))
    ticks = [e.tick for e in events]
    assert ticks == sorted(ticks)
    # per-tick events form contiguous seq ranges by construction of the order
    assert result.stats.total_messages == len(events)


def test_trace_file_bytes_are_the_hash_input(corpus_vm, tmp_path):
    path = tmp_path / "trace.jsonl"
    result = run(
        corpus_vm, "Node", seed=13, ticks=8, probes=("queue_length",),
        overrides={"pArrival": 0.8}, trace_path=str(path),
        collect_events=True,
    )
    data = path.read_bytes()
    assert hashlib.sha256(data).hexdigest() == result.trace.hash_hex
    lines = data.decode().splitlines()
    assert len(lines) == len(result.trace.events)
    first = json.loads(lines[0])
    assert list(first.keys()) == ["tick", "seq", "sender", "receiver", "op", "args"]
    for line, ev in zip(lines, result.trace.events):
        assert line == ev.to_json_line()


def test_determinism_same_inputs_same_hash(corpus_vm):
    hashes = {
        run(
            corpus_vm, "Node", seed=21, ticks=60,
            probes=("queue_length",),
        ).trace.hash_hex
        for _ in range(5)
    }
    assert len(hashes) == 1
    other = run(
        corpus_vm, "Node", seed=22, ticks=60, probes=("queue_length",)
    ).trace.hash_hex
    assert other not in hashes


def test_run_rejects_zero_ticks(corpus_vm):
    with pytest.raises(ValueError):
        run(corpus_vm, "Node", seed=1, ticks=0)


def test_run_tick_after_halt_refuses(corpus_vm):
    vm = _world(
        extra_ops="op boom «Rule» { popFront(self.kids); }",
        extra_attrs="attr kids «parts» : list<World>;",
    )
    state = instantiate(vm, "World", seed=0)
    with pytest.raises(UspRuntimeError):
        state.dispatch(None, state.boundary, "boom", (), vm.boundary.source_span)
    # dispatch outside run_tick does not halt; halting is run_tick's job
    vm2 = _vm(
        "model M { "
        'class W «boundary» concept "w" { '
        "attr kids «parts» : list<W>; "
        "op Exist «Exist» { popFront(self.kids); } "
        "} }"
    )
    state2 = instantiate(vm2, "W", seed=0)
    with pytest.raises(UspRuntimeError) as exc:
        run_tick(state2)
    assert exc.value.diagnostic.rule_id == "R005"
    assert state2.halted
    with pytest.raises(UspRuntimeError) as exc2:
        run_tick(state2)
    assert exc2.value.diagnostic.rule_id == "R012"


def test_partial_trace_flushed_on_runtime_error(tmp_path):
    vm = _vm(
        "model M { "
        'class W «boundary» concept "w" { '
        "attr kids «parts» : list<W>; attr n «state» : Int; "
        "op Exist «Exist» { send self.step(); popFront(self.kids); } "
        "op step «Rule» { self.n := self.n + 1; } "
        "} }"
    )
    path = tmp_path / "partial.jsonl"
    with pytest.raises(UspRuntimeError):
        run(vm, "W", seed=0, ticks=5, trace_path=str(path))
    lines = [json.loads(l) for l in path.read_text().splitlines()]
    # tick 1's Exist and the nested step were flushed before the abort
    assert [(e["tick"], e["op"]) for e in lines] == [
        (1, "Exist"), (1, "step"),
    ]


def test_conservation_from_events(corpus_vm):
    result = run(
        corpus_vm, "Node", seed=17, ticks=2000, probes=("queue_length",),
        overrides={"pArrival": 0.4, "pService": 0.45},
        collect_events=True,
    )
    entered = left = stood = shifted = approached = 0
    current_tick = 0
    series = result.stats.probe_series["queue_length"]
    for e in result.trace.events:
        if e.tick != current_tick:
            # end of tick boundary: entered = left + queued + in_service
            in_service = approached - left
            queued = stood - shifted - in_service
            assert entered == left + queued + in_service
            assert series[current_tick] == queued + in_service
            current_tick = e.tick
        if e.op == "enter":
            entered += 1
        elif e.op == "leave":
            left += 1
        elif e.op == "standInQueue":
            stood += 1
        elif e.op == "shiftQueue":
            shifted += 1
        elif e.op == "approachClerk":
            approached += 1
    in_service = approached - left
    queued = stood - shifted - in_service
    assert entered == left + queued + in_service


# ---- language semantics in the engine ----

def test_foreach_iterates_a_snapshot():
    vm = _vm(
        "model M { "
        'class W «boundary» concept "w" { '
        "attr kids «parts» : list<Item>; "
        "attr seen «state» : Int; "
        "op Exist «Exist» { } "
        "op init «Rule» { push(self.kids, new Item()); "
        "push(self.kids, new Item()); } "
        "op grow «Rule» { foreach k in self.kids { "
        "push(self.kids, k); self.seen := self.seen + 1; } } "
        "op shrink «Rule» { foreach k in self.kids { "
        "popFront(self.kids); self.seen := self.seen + 1; } } "
        "} "
        "class Item «link» { } "
        "}"
    )
    state = instantiate(vm, "W", seed=0)
    span = vm.boundary.source_span
    state.dispatch(None, state.boundary, "grow", (), span)
    assert state.boundary.slots["seen"] == 2       # snapshot had 2 items
    assert len(state.boundary.slots["kids"]) == 4  # but the list grew
    state.boundary.slots["seen"] = 0
    state.dispatch(None, state.boundary, "shrink", (), span)
    assert state.boundary.slots["seen"] == 4       # snapshot of 4 survives pops
    assert state.boundary.slots["kids"] == []


def test_call_depth_cap():
    vm = _vm(
        "model M { "
        'class W «boundary» concept "w" { '
        "op Exist «Exist» { } "
        "op spiral «Rule» { send self.spiral(); } "
        "} }"
    )
    state = instantiate(vm, "W", seed=0, limits=RunLimits(max_call_depth=16))
    with pytest.raises(UspRuntimeError) as exc:
        state.dispatch(None, state.boundary, "spiral", (), vm.boundary.source_span)
    assert exc.value.diagnostic.rule_id == "R004"
    assert exc.value.seq == 17  # 16 frames deep, the 17th message trips


def test_message_budget():
    vm = _vm(
        "model M { "
        'class W «boundary» concept "w" { '
        "attr kids «parts» : list<Item>; "
        "op Exist «Exist» { foreach k in self.kids { send self.noop(); } } "
        "op noop «Rule» { } "
        "op init «Rule» { push(self.kids, new Item()); "
        "push(self.kids, new Item()); push(self.kids, new Item()); } "
        "} "
        "class Item «link» { } "
        "}"
    )
    state = instantiate(vm, "W", seed=0, limits=RunLimits(max_messages_per_tick=3))
    with pytest.raises(UspRuntimeError) as exc:
        run_tick(state)
    assert exc.value.diagnostic.rule_id == "R006"


def test_null_dereference():
    vm = _vm(
        "model M { "
        'class World «boundary» concept "w" { '
        "attr peer «ref» : Other?; attr n «state» : Int; "
        "op Exist «Exist» { } "
        "op poke «Rule» { self.n := self.peer.n2; } "
        "} "
        'class Other «atom» concept "o" { attr n2 «state» : Int; } '
        "}"
    )
    state = instantiate(vm, "World", seed=0)
    with pytest.raises(UspRuntimeError) as exc:
        state.dispatch(None, state.boundary, "poke", (), vm.boundary.source_span)
    assert exc.value.diagnostic.rule_id == "R001"
    assert exc.value.seq >= 1


def test_len_counts_parts_lists():
    vm = _vm(
        "model M { "
        'class W «boundary» concept "w" { '
        "attr kids «parts» : list<Item>; attr n «state» : Int; "
        "op Exist «Exist» { } "
        "op init «Rule» { push(self.kids, new Item()); "
        "push(self.kids, new Item()); } "
        "op count «Rule» { self.n := len(self.kids); } "
        "} "
        "class Item «link» { } "
        "}"
    )
    state = instantiate(vm, "W", seed=0)
    state.dispatch(None, state.boundary, "count", (), vm.boundary.source_span)
    assert state.boundary.slots["n"] == 2


def test_new_assigns_sequential_ids():
    vm = _vm(
        "model M { "
        'class W «boundary» concept "w" { '
        "attr kids «parts» : list<Item>; "
        "op Exist «Exist» { } "
        "op init «Rule» { push(self.kids, new Item()); "
        "push(self.kids, new Item()); } "
        "} "
        "class Item «link» { } "
        "}"
    )
    state = instantiate(vm, "W", seed=0)
    assert [k.id for k in state.boundary.slots["kids"]] == ["Item#1", "Item#2"]


def test_send_returns_values_and_dispatches_dynamically():
    vm = _vm(
        "model M { "
        'class W «boundary» concept "w" { '
        "attr item «ref» : Base?; attr got «state» : Int; "
        "op Exist «Exist» { } "
        "op init «Rule» { self.item := new Derived(); } "
        "op ask «Rule» { self.got := send self.item.answer(); } "
        "} "
        'abstract class Base «atom» concept "b" '
        "{ op answer «Rule» : Int { return 1; } } "
        'class Derived «atom» extends Base concept "d" '
        "{ op answer «Rule» : Int { return 2; } } "
        "}"
    )
    state = instantiate(vm, "W", seed=0)
    state.dispatch(None, state.boundary, "ask", (), vm.boundary.source_span)
    assert state.boundary.slots["got"] == 2  # dynamic dispatch to the override


def test_stats_counts_equal_total_events(corpus_vm):
    result = run(
        corpus_vm, "Node", seed=5, ticks=40, probes=("queue_length",),
        overrides={"pArrival": 0.6}, collect_events=True,
    )
    stats = result.stats
    assert stats.total_messages == len(result.trace.events)
    assert sum(stats.message_counts.values()) == stats.total_messages
    assert len(stats.probe_series["queue_length"]) == 41  # tick 0 included
    doc = json.loads(stats.to_json(trace_hash=result.trace.hash_hex))
    assert list(doc.keys()) == sorted(doc.keys())


def test_probe_paths_and_errors(corpus_vm):
    # boss.pArrival is Real, so it is rejected as a probe
    with pytest.raises(UspRuntimeError) as exc:
        instantiate(corpus_vm, "Node", seed=0, probes=("boss.pArrival",))
    assert exc.value.diagnostic.rule_id == "R010"
    with pytest.raises(UspRuntimeError):
        instantiate(corpus_vm, "Node", seed=0, probes=("ghost",))
    # a Bool slot samples as 0/1 through an entity path
    result = run(
        corpus_vm, "Node", seed=1, ticks=5, probes=("clerk.busy",),
        overrides=FORCED,
    )
    assert set(result.stats.probe_series["clerk.busy"]) <= {0, 1}


def test_time_exist_equivalence(corpus_vm):
    ticks = 25
    result = run(
        corpus_vm, "Node", seed=2, ticks=ticks, collect_events=True,
    )
    engine_exists = [
        e
        for e in result.trace.events
        if e.sender == "engine" and e.op == "Exist"
    ]
    assert len(engine_exists) == ticks
    assert result.stats.ticks == ticks

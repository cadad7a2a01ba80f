import shutil
from collections import Counter

import pytest

from deadlistener.jsparse import parse_source
from deadlistener.miner import (
    DefUseAnalysis,
    MiningDiagnostics,
    extract_registrations,
    mine_project,
    mine_source,
)
from deadlistener.paths import parse_path, serialize_path

from conftest import REQ_PATH, RES_PATH


def mined(source, file_id="t.js"):
    diagnostics = MiningDiagnostics()
    occurrences = mine_source(source, file_id, "proj", diagnostics)
    return occurrences, diagnostics


def pair_multiset(occurrences):
    return Counter((serialize_path(o.path), o.event) for o in occurrences)


def test_fig2_golden_pairs(fig2_project):
    occurrences, diagnostics = mine_project(fig2_project)
    assert pair_multiset(occurrences) == Counter(
        {(RES_PATH, "data"): 1, (RES_PATH, "end"): 1, (RES_PATH, "timeout"): 1}
    )
    assert diagnostics.unresolved_receivers == 0
    assert diagnostics.files_parsed == 1
    by_event = {o.event: o for o in occurrences}
    assert by_event["data"].line == 5
    assert by_event["end"].line == 6
    assert by_event["timeout"].line == 9
    assert all(o.root_package == "http" for o in occurrences)


def test_fig2_req_and_res_resolution(fig2_project):
    text = (fig2_project / "index.js").read_text()
    analysis = DefUseAnalysis(parse_source(text, "index.js"))
    assert [serialize_path(p) for p in analysis.binding_paths("req")] == [REQ_PATH]
    assert [serialize_path(p) for p in analysis.binding_paths("res")] == [RES_PATH]


def test_chained_variant_same_pair_multiset(fig2_project, fig2_chained_project):
    plain, _ = mine_project(fig2_project)
    chained, _ = mine_project(fig2_chained_project)
    assert pair_multiset(plain) == pair_multiset(chained)


def test_variable_event_name_is_skipped():
    occurrences, diagnostics = mined("const e = require('x'); e.on(evName, () => {});")
    assert occurrences == []
    assert diagnostics.registrations_seen == 0


def test_chained_mixed_methods():
    occurrences, _ = mined(
        "const e = require('x'); e.once('x1', () => {}).prependListener('y1', () => {});"
    )
    assert pair_multiset(occurrences) == Counter(
        {("require(x)", "x1"): 1, ("require(x)", "y1"): 1}
    )


def test_callback_must_be_function_valued():
    occurrences, diagnostics = mined("const e = require('x'); e.on('evt', 42);")
    assert occurrences == []
    assert diagnostics.registrations_seen == 0
    occurrences, _ = mined("const e = require('x'); function h() {}\ne.on('evt', h);")
    assert pair_multiset(occurrences) == Counter({("require(x)", "evt"): 1})
    occurrences, _ = mined("const e = require('x'); const h = () => {};\ne.on('evt', h);")
    assert pair_multiset(occurrences) == Counter({("require(x)", "evt"): 1})


def test_named_callback_not_defined_in_file_is_skipped():
    occurrences, diagnostics = mined("const e = require('x'); e.on('evt', imported);")
    assert occurrences == []
    assert diagnostics.registrations_seen == 0


def test_destructured_import_resolves_to_property_read():
    occurrences, _ = mined(
        "const {request} = require('http');\nconst r = request(url);\nr.on('error', () => {});"
    )
    assert pair_multiset(occurrences) == Counter({("require(http).request()", "error"): 1})


def test_multiple_assignments_yield_all_candidates():
    occurrences, _ = mined(
        "var s = require('net').connect();\ns = s.setNoDelay();\ns.on('data', d => {});"
    )
    assert pair_multiset(occurrences) == Counter(
        {
            ("require(net).connect()", "data"): 1,
            ("require(net).connect().setNoDelay()", "data"): 1,
        }
    )


def test_computed_member_terminates_resolution():
    occurrences, diagnostics = mined("const e = require('x'); e[k].on('evt', () => {});")
    assert occurrences == []
    assert diagnostics.unresolved_receivers == 1


def test_reflective_calls_terminate_resolution():
    for source in (
        "const e = require('x'); e.make.call(null).on('evt', () => {});",
        "const e = require('x'); e.make.apply(null).on('evt', () => {});",
        "const e = require('x'); e.make.bind(null)().on('evt', () => {});",
    ):
        occurrences, diagnostics = mined(source)
        assert occurrences == []
        assert diagnostics.unresolved_receivers == 1


def test_spread_arguments_terminate_resolution():
    occurrences, diagnostics = mined(
        "const e = require('x'); e.open(...args).on('evt', () => {});"
    )
    assert occurrences == []
    assert diagnostics.unresolved_receivers == 1


def test_relative_imports_do_not_root_paths():
    occurrences, diagnostics = mined("const e = require('./local'); e.on('evt', () => {});")
    assert occurrences == []
    assert diagnostics.unresolved_receivers == 1


def test_callback_parameter_paths():
    occurrences, _ = mined(
        "const http = require('http');\n"
        "http.request(url, res => { res.on('data', d => {}); });"
    )
    assert pair_multiset(occurrences) == Counter({(RES_PATH, "data"): 1})


def test_callback_passed_by_name_gets_parameter_paths():
    occurrences, _ = mined(
        "const http = require('http');\n"
        "const handler = res => { res.on('data', d => {}); };\n"
        "http.request(url, handler);"
    )
    assert pair_multiset(occurrences) == Counter({(RES_PATH, "data"): 1})


def test_nested_callbacks_compose_argument_steps():
    occurrences, _ = mined(
        "const a = require('a');\n"
        "a.f(function(x) { x.g(function(y) { y.on('e', () => {}); }); });"
    )
    assert pair_multiset(occurrences) == Counter(
        {("require(a).f(0)(0).g(0)(0)", "e"): 1}
    )


def test_short_circuit_operators_flow_both_operands():
    occurrences, _ = mined(
        "const net = require('net');\n"
        "const sock = opts.socket || net.connect(opts);\n"
        "sock.on('error', e => {});"
    )
    assert pair_multiset(occurrences) == Counter({("require(net).connect()", "error"): 1})
    occurrences, _ = mined(
        "const ee = require('events');\nconst bus = globalThis.bus ?? new ee();\n"
        "bus.on('ping', () => {});"
    )
    assert pair_multiset(occurrences) == Counter({("require(events)[new]()", "ping"): 1})


def test_conditional_flows_branches_not_test():
    occurrences, _ = mined(
        "const h = require('http'), hs = require('https');\n"
        "const mod = secure ? hs : h;\n"
        "mod.get(u, res => res.on('data', d => {}));"
    )
    assert pair_multiset(occurrences) == Counter(
        {
            ("require(http).get(1)(0)", "data"): 1,
            ("require(https).get(1)(0)", "data"): 1,
        }
    )
    # the test expression must not leak into the value
    occurrences, diagnostics = mined(
        "const x = require('x');\nconst picked = x.enabled ? a : b;\npicked.on('e', () => {});"
    )
    assert occurrences == []
    assert diagnostics.unresolved_receivers == 1


def test_instance_step_via_new():
    occurrences, _ = mined(
        "const ws = require('ws');\nconst s = new ws.Server();\ns.on('open', () => {});"
    )
    assert pair_multiset(occurrences) == Counter(
        {("require(ws).Server[new]()", "open"): 1}
    )


def test_assignment_cycles_are_cut():
    occurrences, diagnostics = mined(
        "var a = require('x');\nvar b = a.next;\na = b.prev;\nb.on('e', () => {});"
    )
    # b resolves through a's first candidate only; resolution terminates.
    assert ("require(x).next", "e") in pair_multiset(occurrences)
    assert diagnostics.dropped_long_paths == 0


def test_self_referential_assignment_terminates():
    occurrences, _ = mined("var s = require('x');\ns = s.grow();\ns.on('e', () => {});")
    assert pair_multiset(occurrences) == Counter(
        {("require(x)", "e"): 1, ("require(x).grow()", "e"): 1}
    )


def test_long_paths_are_dropped_and_counted():
    chain = ".a" * 17
    occurrences, diagnostics = mined(f"const e = require('x'){chain};\ne.on('evt', f => {{}});")
    # the receiver itself resolves (17 steps > max 16) to nothing
    assert occurrences == []
    assert diagnostics.dropped_long_paths >= 1
    assert diagnostics.unresolved_receivers == 1


def test_parse_errors_are_collected_not_raised(tmp_path):
    good = tmp_path / "good.js"
    good.write_text("const e = require('x'); e.on('evt', () => {});\n")
    bad = tmp_path / "bad.js"
    bad.write_text("const = %%%\n")
    occurrences, diagnostics = mine_project(tmp_path)
    assert len(occurrences) == 1
    assert len(diagnostics.parse_errors) == 1
    assert diagnostics.files_scanned == 2
    assert diagnostics.files_parsed == 1


def test_duplicate_files_are_not_deduplicated(tmp_path, fig2_project):
    shutil.copy(fig2_project / "index.js", tmp_path / "one.js")
    shutil.copy(fig2_project / "index.js", tmp_path / "two.js")
    occurrences, _ = mine_project(tmp_path)
    assert len(occurrences) == 6
    counted = pair_multiset(occurrences)
    assert counted[(RES_PATH, "data")] == 2


def test_project_with_no_source_files(tmp_path):
    (tmp_path / "README.md").write_text("nothing here\n")
    occurrences, diagnostics = mine_project(tmp_path)
    assert occurrences == []
    assert diagnostics.files_scanned == 0


def test_node_modules_and_hidden_dirs_skipped(tmp_path):
    nested = tmp_path / "node_modules" / "dep"
    nested.mkdir(parents=True)
    (nested / "dep.js").write_text("require('x').on('evt', () => {});\n")
    hidden = tmp_path / ".cache"
    hidden.mkdir()
    (hidden / "c.js").write_text("require('x').on('evt', () => {});\n")
    (tmp_path / "app.js").write_text("require('y').on('evt', () => {});\n")
    occurrences, _ = mine_project(tmp_path)
    assert [o.root_package for o in occurrences] == ["y"]


def test_extension_filter(tmp_path):
    (tmp_path / "a.js").write_text("require('a').on('e', () => {});\n")
    (tmp_path / "b.mjs").write_text("require('b').on('e', () => {});\n")
    default_occurrences, _ = mine_project(tmp_path)
    assert {o.root_package for o in default_occurrences} == {"a"}
    both, _ = mine_project(tmp_path, extensions=(".js", ".mjs"))
    assert {o.root_package for o in both} == {"a", "b"}


def test_unreadable_root_raises(tmp_path):
    with pytest.raises(OSError):
        mine_project(tmp_path / "does-not-exist")


def test_statement_reordering_invariance():
    snippets = [
        "const a = require('a');\na.on('e1', () => {});",
        "const b = require('b');\nb.open().on('e2', () => {});",
        "const c = require('c');\nc.on('e3', () => {});",
    ]
    base, _ = mined("\n".join(snippets))
    for permutation in (
        [1, 0, 2],
        [2, 1, 0],
        [1, 2, 0],
    ):
        shuffled, _ = mined("\n".join(snippets[i] for i in permutation))
        assert pair_multiset(shuffled) == pair_multiset(base)


def test_extract_registrations_receiver_nodes(fig2_project):
    tree = parse_source((fig2_project / "index.js").read_text(), "index.js")
    registrations = extract_registrations(tree)
    assert [r.event_name for r in registrations] == ["data", "end", "timeout"]
    assert all(r.method_name == "on" for r in registrations)
    assert all(r.receiver_node.kind == "identifier" for r in registrations)
    assert registrations[2].location.line == 9


def test_occurrence_invariant_pkg_matches_root():
    occurrences, _ = mined("const e = require('x'); e.on('evt', () => {});")
    for occ in occurrences:
        assert occ.root_package == occ.path.root_package


def test_grammar_validity_via_reserialization():
    occurrences, _ = mined(
        "const http = require('http');\n"
        "http.request(url, res => { res.on('data', d => {}); });\n"
        "new (require('events').EventEmitter)().on('tick', () => {});"
    )
    for occ in occurrences:
        assert parse_path(serialize_path(occ.path)) == occ.path

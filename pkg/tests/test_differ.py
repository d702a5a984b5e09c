import json
import random
import shutil

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boundary_snap.differ import (
    Finding,
    compare_sets,
    compare_snapshot_sets,
    compare_snapshots,
    compare_snapshots_all,
    parse_report,
    render_report,
    write_report,
)
from boundary_snap.errors import FormatError, TestIdMismatch
from boundary_snap.model import Interaction, SExc, SInt, SList, SNull, SRef, SStr, Snapshot
from boundary_snap.snapstore import encode_snapshot, write_flaky

from conftest import GOLDEN
from gen import perturb, rand_snapshot, rename
from oracle import first_divergence

V1 = GOLDEN / "snapshots" / "tokenizer-v1"
V2 = GOLDEN / "snapshots" / "tokenizer-v2"


def snap(*interactions, status="passed", test="t::x"):
    inters = tuple(Interaction(n, *i) for n, i in enumerate(interactions, start=1))
    return Snapshot(test, "p", "l", inters, status)


def words(xs):
    return SList(tuple(SStr(x) for x in xs), False)


# -- worked examples -----------------------------------------------------------------


def test_fixed_list_is_a_value_change():
    old = snap(("T#get", "o1", (), words(["apple", "banana"])))
    new = snap(("T#get", "o1", (), SList(words(["apple", "banana"]).items, True)))
    f = compare_snapshots(old, new)
    assert (f.position, f.category, f.method) == (1, "VALUE_CHANGE", "T#get")
    assert '"fixed":false' in f.old and '"fixed":true' in f.new


def test_reflexive_example():
    s = snap(("f", None, (SInt(1),), SNull()))
    assert compare_snapshots(s, s) is None


def test_stack_trace_to_null():
    old = snap(("exceptions::getStackTrace", None, (SRef("o1", "c::IOException"),), SStr("IOException: disk\n  at x")))
    new = snap(("exceptions::getStackTrace", None, (SRef("o1", "c::IOException"),), SNull()))
    assert compare_snapshots(old, new).category == "VALUE_CHANGE"


# -- categories and priority ---------------------------------------------------------------


@pytest.mark.parametrize(
    "old, new, category",
    [
        (("f", None, (), SNull()), ("g", None, (), SNull()), "PROTOCOL_CHANGE"),
        (("f", "o1", (), SNull()), ("f", None, (), SNull()), "PROTOCOL_CHANGE"),
        (("f", None, (SInt(1),), SNull()), ("f", None, (SInt(2),), SNull()), "INPUT_CHANGE"),
        (("f", None, (), SInt(1)), ("f", None, (), SExc("E", "m")), "EXCEPTION_CHANGE"),
        (("f", None, (), SExc("E", "m")), ("f", None, (), SExc("E", "other")), "EXCEPTION_CHANGE"),
        (("f", None, (), SInt(1)), ("f", None, (), SInt(2)), "VALUE_CHANGE"),
        (("f", None, (SInt(1),), SInt(1)), ("g", None, (SInt(2),), SInt(2)), "PROTOCOL_CHANGE"),
        (("f", None, (SInt(1),), SInt(1)), ("f", None, (SInt(2),), SExc("E", "")), "INPUT_CHANGE"),
    ],
)
def test_category_priority(old, new, category):
    assert compare_snapshots(snap(old), snap(new)).category == category


def test_exc_type_only():
    old = snap(("f", None, (), SExc("E", "a")))
    new = snap(("f", None, (), SExc("E", "b")))
    assert compare_snapshots(old, new, exc_type_only=True) is None
    assert compare_snapshots(old, snap(("f", None, (), SExc("F", "a"))), exc_type_only=True).category == "EXCEPTION_CHANGE"


def test_length_change():
    a = snap(("f", None, (), SNull()))
    b = snap(("f", None, (), SNull()), ("g", None, (), SNull()), status="errored")
    f = compare_snapshots(a, b)
    assert (f.position, f.category, f.method, f.old, f.new) == (2, "LENGTH_CHANGE", "g", "1", "2")


def test_outcome_change():
    a = snap(("f", None, (), SNull()))
    b = snap(("f", None, (), SNull()), status="failed")
    f = compare_snapshots(a, b)
    assert (f.position, f.category, f.old, f.new) == (2, "OUTCOME_CHANGE", '"passed"', '"failed"')


def test_only_first_divergence_reported():
    a = snap(("f", None, (), SInt(1)), ("f", None, (), SInt(1)))
    b = snap(("f", None, (), SInt(2)), ("g", None, (), SInt(1)), status="failed")
    assert compare_snapshots(a, b).position == 1
    assert [(f.position, f.category) for f in compare_snapshots_all(a, b)] == [
        (1, "VALUE_CHANGE"), (2, "PROTOCOL_CHANGE"), (3, "OUTCOME_CHANGE")]


def test_test_id_mismatch():
    with pytest.raises(TestIdMismatch):
        compare_snapshots(snap(test="a::b"), snap(test="a::c"))


# -- object id bijection --------------------------------------------------------------


def test_consistent_renaming_is_invisible():
    a = snap(("C#init", None, (), SRef("o1", "C")), ("C#m", "o1", (SRef("o2", "D"),), SRef("o2", "D")))
    b = snap(("C#init", None, (), SRef("o5", "C")), ("C#m", "o5", (SRef("o3", "D"),), SRef("o3", "D")))
    assert compare_snapshots(a, b) is None


def test_identity_split_detected():
    # old returns the same object twice, new returns two distinct objects
    a = snap(("f", None, (), SRef("o1", "C")), ("f", None, (), SRef("o1", "C")))
    b = snap(("f", None, (), SRef("o1", "C")), ("f", None, (), SRef("o2", "C")))
    f = compare_snapshots(a, b)
    assert (f.position, f.category) == (2, "VALUE_CHANGE")


def test_identity_merge_detected():
    a = snap(("f", None, (), SRef("o1", "C")), ("f", None, (), SRef("o2", "C")))
    b = snap(("f", None, (), SRef("o1", "C")), ("f", None, (), SRef("o1", "C")))
    assert compare_snapshots(a, b).position == 2


def test_ref_class_matters():
    assert compare_snapshots(snap(("f", None, (), SRef("o1", "C"))), snap(("f", None, (), SRef("o1", "D"))))


# -- sets and directories --------------------------------------------------------------


def test_v1_vs_v2_golden_report():
    report = compare_sets(V1, V2)
    (f,) = report.findings
    assert (f.test, f.position, f.category, f.method) == (
        "products_test::fetch_products", 3, "VALUE_CHANGE", "tokenizer::StringTokenizer#getTokenList")
    assert render_report(report, "json") == (GOLDEN / "tokenizer-v1-v2.report.json").read_text()
    assert report.counts == {"compared": 3, "identical": 2, "differing": 1, "missing": 0, "extra": 0,
                             "flaky_excluded": 0}


def test_identical_dirs():
    report = compare_sets(V1, V1)
    assert report.findings == () and render_report(report) == "0 findings across 3 tests\n"


def test_missing_and_extra_tests(tmp_path):
    shutil.copytree(V1, tmp_path / "new")
    (tmp_path / "new" / "products_test__fetch_products.snap.jsonl").unlink()
    extra = snap(test="products_test::brand_new")
    (tmp_path / "new" / "products_test__brand_new.snap.jsonl").write_text(encode_snapshot(extra))
    report = compare_sets(V1, tmp_path / "new")
    assert [(f.test, f.position, f.category) for f in report.findings] == [
        ("products_test::brand_new", 0, "EXTRA_TEST"),
        ("products_test::fetch_products", 0, "MISSING_TEST"),
    ]
    assert report.counts["missing"] == 1 and report.counts["extra"] == 1


def test_flaky_tests_excluded(tmp_path):
    report = compare_sets(V1, V2, flaky=["products_test::fetch_products"])
    assert report.findings == () and report.counts["flaky_excluded"] == 1
    shutil.copytree(V2, tmp_path / "v2")
    write_flaky(tmp_path / "v2", ["products_test::fetch_products"])
    assert compare_sets(V1, tmp_path / "v2").findings == ()


def test_truncated_candidate(tmp_path):
    shutil.copytree(V1, tmp_path / "new")
    path = tmp_path / "new" / "products_test__fetch_products.snap.jsonl"
    lines = path.read_text().split("\n")
    path.write_text("\n".join(lines[:3]) + "\n")  # header + two interactions, no footer
    (f,) = compare_sets(V1, tmp_path / "new").findings
    assert (f.position, f.category, f.method) == (3, "PROTOCOL_CHANGE", "tokenizer::StringTokenizer#getTokenList")


def test_truncated_baseline_is_an_error(tmp_path):
    shutil.copytree(V1, tmp_path / "old")
    path = tmp_path / "old" / "products_test__fetch_products.snap.jsonl"
    path.write_text(path.read_text().rsplit("\n", 2)[0] + "\n")
    with pytest.raises(FormatError):
        compare_sets(tmp_path / "old", V1)


def test_unreadable_dir(tmp_path):
    with pytest.raises(FormatError):
        compare_sets(V1, tmp_path / "nope")


# -- rendering ---------------------------------------------------------------------------


def test_text_lines():
    text = render_report(compare_sets(V1, V2))
    first, last = text.splitlines()
    assert first.startswith("products_test::fetch_products :: 3 :: VALUE_CHANGE :: "
                            "tokenizer::StringTokenizer#getTokenList :: {")
    assert " -> " in first
    assert last == "1 finding across 3 tests"


def test_json_round_trip(tmp_path):
    report = compare_snapshot_sets(
        {"a::b": snap(("f", None, (), SInt(1)), test="a::b")},
        {"a::b": snap(("f", None, (), SInt(2)), test="a::b"), "a::c": snap(test="a::c")},
    )
    text = render_report(report, "json")
    assert json.loads(text)["version"] == 1
    assert parse_report(text) == report
    write_report(report, tmp_path / "r.json")
    assert parse_report((tmp_path / "r.json").read_text()) == report


@pytest.mark.parametrize("text", ["nope", "{}", '{"version": 1}'])
def test_bad_report_json(text):
    with pytest.raises(FormatError):
        parse_report(text)


def test_unknown_format():
    with pytest.raises(ValueError):
        render_report(compare_snapshot_sets({}, {}), "xml")


# -- properties (the acceptance suite runs these at full scale) -----------------------------


@settings(max_examples=300, deadline=None)
@given(st.randoms(use_true_random=False))
def test_properties_small_scale(rng):
    s = rand_snapshot(rng)
    assert compare_snapshots(s, s) is None
    r = rename(s, rng)
    assert compare_snapshots(s, r) is None
    p = perturb(r, rng)
    f, g = compare_snapshots(s, p), compare_snapshots(p, s)
    expected = first_divergence(s, p)
    assert (None if f is None else (f.position, f.category, f.old, f.new)) == expected
    if f is None:
        assert g is None
    else:
        assert (g.position, g.category, g.old, g.new) == (f.position, f.category, f.new, f.old)


def test_oracle_agrees_on_fixed_seed():
    rng = random.Random(3)
    for _ in range(500):
        s = rand_snapshot(rng)
        p = perturb(s, rng)
        f = compare_snapshots(s, p)
        assert (None if f is None else (f.position, f.category, f.old, f.new)) == first_divergence(s, p)
        assert f is None or isinstance(f, Finding)

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boundary_snap.errors import FormatError, TruncatedSnapshot
from boundary_snap.model import (
    Interaction,
    SBool,
    SExc,
    SFloat,
    SInt,
    SList,
    SNull,
    SRef,
    SStr,
    Snapshot,
    smap,
    srec,
)
from boundary_snap.snapstore import (
    canonical_decode,
    canonical_encode,
    decode_snapshot,
    encode_snapshot,
    read_flaky,
    read_snapshot,
    snapshot_filename,
    snapshot_paths,
    write_flaky,
    write_snapshot,
)

from conftest import GOLDEN
from gen import rand_snapshot, rand_value


@pytest.mark.parametrize(
    "value, text",
    [
        (SNull(), '{"t":"null"}'),
        (SBool(True), '{"t":"bool","v":true}'),
        (SInt(-3), '{"t":"int","v":-3}'),
        (SFloat(0.1), '{"t":"float","v":0.1}'),
        (SFloat(-0.0), '{"t":"float","v":-0.0}'),
        (SFloat(1e22), '{"t":"float","v":1e+22}'),
        (SStr("apple"), '{"t":"str","v":"apple"}'),
        (SStr('q"\\\n\x01é'), '{"t":"str","v":"q\\"\\\\\\n\\u0001é"}'),
        (SList((SInt(1),), True), '{"t":"list","fixed":true,"items":[{"t":"int","v":1}]}'),
        (smap([("b", SInt(1)), ("a", SInt(2))]),
         '{"t":"map","entries":[["a",{"t":"int","v":2}],["b",{"t":"int","v":1}]]}'),
        (srec("m::P", [("y", SNull()), ("x", SNull())]),
         '{"t":"rec","class":"m::P","fields":[["x",{"t":"null"}],["y",{"t":"null"}]]}'),
        (SRef("o1", "m::C"), '{"t":"ref","id":"o1","class":"m::C"}'),
        (SExc("TypeError", "bad delim"), '{"t":"exc","type":"TypeError","msg":"bad delim"}'),
    ],
)
def test_canonical_forms(value, text):
    assert canonical_encode(value) == text
    assert canonical_decode(text) == value


def test_float_decoding_is_bit_exact():
    for x in (0.1, -0.0, 5e-324, 1.7976931348623157e308, 2.0 / 3):
        assert canonical_decode(canonical_encode(SFloat(x))) == SFloat(x)
    assert SFloat(0.0) != SFloat(-0.0)


def test_map_keys_sorted_by_utf8_bytes():
    m = smap([("é", SNull()), ("z", SNull()), ("￿", SNull()), ("😀", SNull())])
    assert [k for k, _ in m.entries] == ["z", "é", "￿", "😀"]


@pytest.mark.parametrize(
    "text",
    [
        '{"t": "null"}',
        '{"v":1,"t":"int"}',
        '{"t":"int","v":1.0}',
        '{"t":"int","v":9223372036854775808}',
        '{"t":"float","v":1}',
        '{"t":"float","v":0.10}',
        '{"t":"bool","v":1}',
        '{"t":"map","entries":[["b",{"t":"null"}],["a",{"t":"null"}]]}',
        '{"t":"map","entries":[["a",{"t":"null"}],["a",{"t":"null"}]]}',
        '{"t":"ref","id":"x1","class":"C"}',
        '{"t":"str","v":"\\u00e9"}',
        '{"t":"nope"}',
        "[]",
        "",
    ],
)
def test_non_canonical_values_rejected(text):
    with pytest.raises(FormatError):
        canonical_decode(text)


@settings(max_examples=500, deadline=None)
@given(st.randoms(use_true_random=False))
def test_value_round_trip_property(rng):
    v = rand_value(rng, 3, [("o1", "m::C"), ("o7", "m::D")])
    assert canonical_decode(canonical_encode(v)) == v


# -- snapshot files ------------------------------------------------------------------

SNAP = Snapshot(
    test="t::x",
    project="p" * 64,
    library="l" * 64,
    interactions=(
        Interaction(1, "m::C#init", None, (SStr("a"),), SRef("o1", "m::C")),
        Interaction(2, "m::C#get", "o1", (), SList((SStr("a"),), False)),
    ),
    status="failed",
    detail="assert_eq: 1 != 2",
)


def test_snapshot_lines():
    assert encode_snapshot(SNAP).split("\n") == [
        '{"version":1,"test":"t::x","project":"' + "p" * 64 + '","library":"' + "l" * 64 + '"}',
        '{"seq":1,"method":"m::C#init","recv":null,"args":[{"t":"str","v":"a"}],'
        '"result":{"t":"ref","id":"o1","class":"m::C"}}',
        '{"seq":2,"method":"m::C#get","recv":"o1","args":[],'
        '"result":{"t":"list","fixed":false,"items":[{"t":"str","v":"a"}]}}',
        '{"end":true,"status":"failed","detail":"assert_eq: 1 != 2"}',
        "",
    ]


def test_write_read_round_trip(tmp_path):
    path = write_snapshot(SNAP, tmp_path)
    assert path.name == "t__x.snap.jsonl"
    assert read_snapshot(path) == SNAP
    assert encode_snapshot(read_snapshot(path)) == path.read_text()


def test_random_snapshots_round_trip():
    rng = random.Random(7)
    for _ in range(500):
        s = rand_snapshot(rng, max_len=5)
        assert decode_snapshot(encode_snapshot(s)) == s


@pytest.mark.parametrize("version", ["v1", "v2"])
def test_golden_files_round_trip(version):
    paths = snapshot_paths(GOLDEN / "snapshots" / f"tokenizer-{version}")
    assert len(paths) == 3
    for path in paths:
        assert encode_snapshot(read_snapshot(path)).encode() == path.read_bytes()


def test_missing_footer_is_truncation():
    text = encode_snapshot(SNAP)
    lines = text.split("\n")
    with pytest.raises(TruncatedSnapshot) as info:
        decode_snapshot("\n".join(lines[:2]) + "\n")
    assert info.value.partial.interactions == SNAP.interactions[:1]


def test_torn_last_line_is_truncation():
    text = encode_snapshot(SNAP)
    with pytest.raises(TruncatedSnapshot) as info:
        decode_snapshot(text[:-20])
    assert len(info.value.partial.interactions) == 2


def test_seq_gap_rejected():
    text = encode_snapshot(SNAP).replace('"seq":2', '"seq":3')
    with pytest.raises(FormatError, match="contiguity"):
        decode_snapshot(text)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda t: t.replace('"version":1', '"version":2'),
        lambda t: t.replace('"recv":null', '"recv": null'),
        lambda t: t + "{}\n",
        lambda t: t.replace('"status":"failed"', '"status":"weird"'),
        lambda t: t.replace('"recv":"o1"', '"recv":"q1"'),
        lambda t: "",
    ],
    ids=["version", "spacing", "after-footer", "status", "recv", "empty"],
)
def test_malformed_snapshots(mutate):
    with pytest.raises(FormatError) as info:
        decode_snapshot(mutate(encode_snapshot(SNAP)))
    assert not isinstance(info.value, TruncatedSnapshot)


def test_errors_name_the_path(tmp_path):
    path = tmp_path / "bad.snap.jsonl"
    path.write_text("{}\n")
    with pytest.raises(FormatError, match="bad.snap.jsonl"):
        read_snapshot(path)


def test_filename_convention():
    assert snapshot_filename("products_test::fetch_products") == "products_test__fetch_products.snap.jsonl"


def test_flaky_file(tmp_path):
    assert read_flaky(tmp_path) == []
    write_flaky(tmp_path, ["b::y", "a::x"])
    assert read_flaky(tmp_path) == ["a::x", "b::y"]
    (tmp_path / "flaky.json").write_text('{"version": 2, "flaky": []}')
    with pytest.raises(FormatError):
        read_flaky(tmp_path)


def test_atomic_writes_leave_no_temp_files(tmp_path):
    write_snapshot(SNAP, tmp_path)
    write_snapshot(SNAP, tmp_path)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["t__x.snap.jsonl"]


def test_snapshot_dir_must_exist(tmp_path):
    with pytest.raises(FormatError):
        snapshot_paths(tmp_path / "nope")


def test_rec_and_exc_inside_collections():
    v = SList((srec("m::P", [("e", SExc("E", ""))]), SFloat(-1.5)), False)
    assert canonical_decode(canonical_encode(v)) == v

import json

import pytest

from boundary_snap.minilang import LinkError, ManifestError, ParseError, load_project

from conftest import CORPUS, write_project

LIB = "export class T { init(s) { self.s = s; } get() { return helper(self.s); } }\n" \
      "export fn top() { return 1; }\nfn helper(x) { return x; }\n"


def test_corpus_tokenizer_api_symbols():
    project = load_project(CORPUS / "tokenizer")
    assert project.api_symbols == (
        "tokenizer::StringTokenizer#getTokenList",
        "tokenizer::StringTokenizer#init",
        "tokenizer::StringTokenizer#setDelimiter",
    )


def test_empty_library_has_no_api(make_project):
    project = make_project({"tests/t.mlt": 'test "t" { assert(true); }\n'})
    assert project.api_symbols == ()
    assert [t.test_id for t in project.tests()] == ["t::t"]


def test_api_table_skips_private_symbols(make_project):
    project = make_project({"lib/lib.mlt": LIB})
    assert project.api_symbols == ("lib::T#get", "lib::T#init", "lib::top")


def test_missing_manifest(tmp_path):
    with pytest.raises(ManifestError):
        load_project(tmp_path)


def test_manifest_listing_missing_dir(tmp_path):
    (tmp_path / "manifest.json").write_text(json.dumps(
        {"name": "x", "library_dirs": ["nope"], "client_dirs": [], "test_dirs": []}))
    with pytest.raises(ManifestError):
        load_project(tmp_path)


@pytest.mark.parametrize(
    "manifest",
    [
        "[]",
        "{not json",
        json.dumps({"name": "x", "library_dirs": [], "client_dirs": []}),
        json.dumps({"name": 1, "library_dirs": [], "client_dirs": [], "test_dirs": []}),
        json.dumps({"name": "x", "library_dirs": "lib", "client_dirs": [], "test_dirs": []}),
        json.dumps({"name": "x", "library_dirs": ["C:\\lib"], "client_dirs": [], "test_dirs": []}),
    ],
)
def test_invalid_manifests(tmp_path, manifest):
    (tmp_path / "manifest.json").write_text(manifest)
    with pytest.raises(ManifestError):
        load_project(tmp_path)


def test_parse_errors_propagate(make_project):
    with pytest.raises(ParseError):
        make_project({"client/c.mlt": "export fn f() {}\n"})


@pytest.mark.parametrize(
    "files",
    [
        {"lib/lib.mlt": LIB, "client/c.mlt": "fn f() { return helper(1); }\n"},
        {"lib/lib.mlt": LIB, "client/c.mlt": "fn f() { return nothing(1); }\n"},
        {"lib/lib.mlt": LIB, "client/c.mlt": "fn f() { return y; }\n"},
        {"lib/lib.mlt": LIB, "client/c.mlt": "fn top() { return 2; }\n"},
        {"lib/lib.mlt": LIB, "client/c.mlt": "fn len(x) { return 2; }\n"},
        {"lib/lib.mlt": "export fn f() { return g(); }\n", "client/c.mlt": "fn g() { return 1; }\n"},
    ],
    ids=["private-helper", "undeclared-call", "undeclared-name", "duplicate-global", "shadows-builtin",
         "library-sees-client"],
)
def test_link_errors(make_project, files):
    with pytest.raises(LinkError):
        make_project(files)


def test_tests_may_use_client_code(make_project):
    project = make_project({
        "lib/lib.mlt": LIB,
        "client/c.mlt": "fn wrap(v) { return T(v).get(); }\n",
        "tests/t.mlt": 'test "w" { assert_eq(wrap(3), 3); }\n',
    })
    assert [m.kind for m in project.modules] == ["client", "library", "test"]


def test_fingerprint_covers_client_and_tests_only(tmp_path):
    files = {"lib/lib.mlt": LIB, "tests/t.mlt": 'test "w" { assert_eq(top(), 1); }\n'}
    a = load_project(write_project(tmp_path / "a", files))
    b = load_project(write_project(tmp_path / "b", {**files, "lib/lib.mlt": LIB + "export fn extra() {}\n"}))
    c = load_project(write_project(tmp_path / "c", {**files, "tests/t.mlt": files["tests/t.mlt"] + "\n"}))
    assert a.fingerprint == b.fingerprint != c.fingerprint
    assert a.library_fingerprint != b.library_fingerprint
    assert a.library_fingerprint == c.library_fingerprint


def test_library_versions_share_client_fingerprint():
    v1, v2 = load_project(CORPUS / "tokenizer"), load_project(CORPUS / "tokenizer" / "v2")
    assert v1.fingerprint == v2.fingerprint
    assert v1.library_fingerprint != v2.library_fingerprint


def test_all_corpus_projects_load():
    for name in ("tokenizer", "issuer", "sideeffect", "htmltable", "collections"):
        project = load_project(CORPUS / name)
        assert project.tests(), name

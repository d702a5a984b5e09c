import json
from pathlib import Path

import pytest

from boundary_snap.minilang import load_project

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"
GOLDEN = Path(__file__).resolve().parent / "golden"
CORPUS_PROJECTS = ("tokenizer", "issuer", "sideeffect", "htmltable", "collections")


def write_project(root: Path, files: dict, name: str = "demo") -> Path:
    """Lay out ``files`` (``lib/x.mlt`` style paths) under ``root`` with a manifest."""
    for d in ("lib", "client", "tests"):
        (root / d).mkdir(parents=True, exist_ok=True)
    for rel, text in files.items():
        (root / rel).write_text(text, encoding="utf-8")
    manifest = {"name": name, "library_dirs": ["lib"], "client_dirs": ["client"], "test_dirs": ["tests"]}
    (root / "manifest.json").write_text(json.dumps(manifest), encoding="utf-8")
    return root


@pytest.fixture
def make_project(tmp_path):
    counter = iter(range(1_000))

    def make(files: dict, name: str = "demo"):
        return load_project(write_project(tmp_path / f"p{next(counter)}", files, name))

    return make


@pytest.fixture
def corpus():
    return CORPUS


# -- acceptance summary ------------------------------------------------------------

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed or (report.when == "setup" and report.skipped)
    if failed:
        _CRITERIA[number] = ("FAIL", title)
    elif report.when == "call" and number not in _CRITERIA:
        _CRITERIA[number] = ("PASS", title)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, title = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {status} - {title}")

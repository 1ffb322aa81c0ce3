from __future__ import annotations

import json
from pathlib import Path

import pytest

from hstar.polytope import LatticePolytope, from_json, from_vertices

CORPUS = Path(__file__).resolve().parents[1] / "src" / "hstar" / "corpus"

_RESULTS: dict[int, tuple[str, str]] = {}


def corpus_names() -> list[str]:
    return [e["name"] for e in json.loads((CORPUS / "manifest.json").read_text())]


def corpus_polytope(name: str) -> LatticePolytope:
    return from_json(json.loads((CORPUS / f"{name}.json").read_text()))


def reeve(k: int) -> LatticePolytope:
    return from_vertices([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, k)])


def unit(i: int, d: int) -> tuple[int, ...]:
    return tuple(int(j == i) for j in range(d))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    number, title = mark.args
    if rep.when == "setup" and rep.passed:
        return
    _RESULTS[number] = ("PASS" if rep.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        status, title = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title}")

from __future__ import annotations

import shutil
import sys
import time
from pathlib import Path

import pytest

from rapcensus.census import CensusDatabase, extend, init
from rapcensus.core import Polyhedron, parse_polyhedron
from rapcensus.surgery import double_lobell, edge_additions, lobell

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

# wall-clock seconds spent building the session censuses
TIMINGS: dict[str, float] = {}
# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def load_fixture(name: str) -> Polyhedron:
    return parse_polyhedron((FIXTURES / name).read_text(encoding="utf-8"))


def small_family(max_faces: int = 24) -> list[Polyhedron]:
    """Löbell polyhedra, L5 doubled, and a few generations of edge-children."""
    out = [lobell(n) for n in range(5, 10)] + [double_lobell(5)]
    frontier = [lobell(6), lobell(7)]
    seen = set()
    from rapcensus.canon import canonical_code

    for _ in range(3):
        nxt = []
        for p in frontier:
            for child, _site in edge_additions(p):
                c = canonical_code(child)
                if c in seen or child.num_faces > max_faces:
                    continue
                seen.add(c)
                nxt.append(child)
        out += nxt[:12]
        frontier = nxt[:6]
    return [p for p in out if p.num_faces <= max_faces]


@pytest.fixture(scope="session")
def family() -> list[Polyhedron]:
    return small_family()


@pytest.fixture(scope="session")
def census39(tmp_path_factory) -> CensusDatabase:
    path = tmp_path_factory.mktemp("census39") / "census.tsv"
    t0 = time.perf_counter()
    db = init(db_path=path)
    extend(db, 39)
    TIMINGS["census39"] = time.perf_counter() - t0
    return db


@pytest.fixture(scope="session")
def census100(tmp_path_factory, census39) -> CensusDatabase:
    """Resumes a copy of the 39-rank database from disk."""
    folder = tmp_path_factory.mktemp("census100")
    for f in census39.path.parent.iterdir():
        shutil.copy(f, folder / f.name)
    t0 = time.perf_counter()
    db = CensusDatabase.load(folder / "census.tsv")
    extend(db, 100 - (db.next_rank - 1))
    TIMINGS["census100"] = TIMINGS.get("census39", 0.0) + time.perf_counter() - t0
    return db


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

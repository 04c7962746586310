from __future__ import annotations

import pytest

from conftest import FIXTURES
from rapcensus.cli import (
    EXIT_CENSUS,
    EXIT_DB,
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_PARSE,
    SeedSpecError,
    main,
    parse_seed_spec,
)
from rapcensus.render import polyhedron_from_svg
from rapcensus.surgery import lobell_index


@pytest.fixture(scope="module")
def db(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "census.tsv"
    assert main(["init", "--db", str(path), "--seeds", "lobell:5..9,double:lobell:5"]) == EXIT_OK
    assert main(["extend", "--db", str(path), "-n", "8"]) == EXIT_OK
    return path


def test_seed_specs():
    assert [lobell_index(p) for p in parse_seed_spec("lobell:5..7")] == [5, 6, 7]
    assert [lobell_index(p) for p in parse_seed_spec("lobell:9")] == [9]
    assert len(parse_seed_spec(f"double:lobell:5,file:{FIXTURES / 'l6.rap'}")) == 2
    for bad in ("lobell:4", "lobell:x", "cube", "lobell:7..5", ""):
        with pytest.raises(SeedSpecError):
            parse_seed_spec(bad)


def test_show_lists_ranks(db, capsys):
    assert main(["show", "--db", str(db)]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 8
    assert lines[0].startswith("1\t4.3062")
    assert lines[6].startswith("7\t8.61241")


def test_show_family_tree(db, capsys):
    assert main(["show", "--db", str(db), "--rank", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "family tree:" in out and "seed" in out


def test_verify(db, capsys):
    assert main(["verify", "--db", str(db), "--reference", "table1", "--upto", "8"]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out
    assert main(["verify", "--db", str(db), "--reference", "table1", "--upto", "20"]) == EXIT_FAILURE


def test_render_single_and_sheet(db, tmp_path):
    out = tmp_path / "r.svg"
    assert main(["render", "--db", str(db), "--rank", "7", "-o", str(out)]) == EXIT_OK
    assert polyhedron_from_svg(out.read_bytes()).num_vertices == 30
    sheet = tmp_path / "s.svg"
    assert main(["render", "--db", str(db), "--sheet", "8", "--columns", "4", "-o", str(sheet)]) == EXIT_OK
    assert sheet.read_bytes().count(b"<text") == 8
    assert main(["render", "--seed", "lobell:6", "--outer", "99", "-o", str(out)]) == EXIT_PARSE


def test_reduce_double_dodecahedron(capsys):
    assert main(["reduce", "--seed", "double:lobell:5", "--volumes"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("step ") == 1
    assert "terminal: L5 L5" in out


def test_compose_pair(db, capsys):
    assert main(["compose", "--db", str(db), "--pair", "1", "1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("raw 1440 deduplicated 1")


def test_check(capsys):
    assert main(["check", "--seed", f"file:{FIXTURES / 'exceptional.rap'}"]) == EXIT_OK
    assert "volume 15.0703" in capsys.readouterr().out


def test_error_exit_codes(tmp_path, capsys):
    missing = tmp_path / "none.tsv"
    assert main(["extend", "--db", str(missing)]) == EXIT_DB
    bad = tmp_path / "bad.rap"
    bad.write_text("RAP1 4\n0: 1 2\n")
    assert main(["check", "--seed", f"file:{bad}"]) == EXIT_PARSE
    assert main(["check", "--seed", "lobell:x"]) == EXIT_PARSE
    corrupt = tmp_path / "c.tsv"
    corrupt.write_text("not a census\n")
    assert main(["show", "--db", str(corrupt)]) == EXIT_DB
    assert "database" in capsys.readouterr().err


def test_extend_stops_at_seed_bound(tmp_path, capsys):
    path = tmp_path / "db.tsv"
    assert main(["init", "--db", str(path), "--seeds", "lobell:5..6"]) == EXIT_OK
    assert main(["extend", "--db", str(path), "-n", "5"]) == EXIT_CENSUS
    assert "Löbell" in capsys.readouterr().err


def test_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["extend", "-n", "x"])
    assert info.value.code == 2


def test_extend_prints_first_ranks(tmp_path, capsys):
    path = tmp_path / "c.tsv"
    assert main(["init", "--db", str(path)]) == EXIT_OK
    capsys.readouterr()
    assert main(["extend", "--db", str(path), "-n", "2"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("rank 1:") and "volume 4.30620" in lines[0]
    assert lines[1].startswith("rank 2:") and "volume 6.0230460" in lines[1]


def test_reduce_rank_seven(db, capsys):
    assert main(["reduce", "--db", str(db), "--rank", "7"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("step ") == 1 and "decompose" in out
    assert "terminal: L5 L5" in out


def test_commands_are_deterministic(db, capsys):
    outs = []
    for _ in range(2):
        main(["show", "--db", str(db), "--rank", "8"])
        main(["render", "--db", str(db), "--rank", "8"])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]

import json

import pytest

from plexforge.cli import main
from plexforge.core import is_plex, read_entries, read_square


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    report = json.loads(out)
    assert set(report) >= {"command", "parameters", "elapsed_ms"}
    return code, report


def test_construct_cyclic_is_stable(tmp_path, capsys):
    code, a = run(capsys, "construct", "cyclic", "--n", "8", "--out", str(tmp_path))
    _, b = run(capsys, "construct", "cyclic", "--n", "8", "--out", str(tmp_path))
    assert code == 0
    assert a["result"]["files"]["square"]["sha256"] == b["result"]["files"]["square"]["sha256"]
    assert read_square(tmp_path / "B8.square")[3, 6] == 1


@pytest.mark.parametrize("argv,k", [
    (("kk2", "--k", "3", "--m", "2"), 3),
    (("special", "--n", "10"), 3),
    (("mod4", "--n", "8"), 3),
    (("mod10", "--m", "5"), 3),
    (("mod2", "--m", "6"), 3),
])
def test_construct_writes_verified_plex(tmp_path, capsys, argv, k):
    code, rep = run(capsys, "construct", *argv, "--out", str(tmp_path))
    assert code == 0
    files = rep["result"]["files"]
    sq = read_square(files["square"]["path"])
    assert is_plex(sq, read_entries(files["plex"]["path"]), k)


def _square(tmp_path, capsys, *argv):
    _, rep = run(capsys, "construct", *argv, "--out", str(tmp_path))
    return rep["result"]["files"]["square"]["path"]


def test_search_examples(tmp_path, capsys):
    b5 = _square(tmp_path, capsys, "cyclic", "--n", "5")
    code, rep = run(capsys, "search", b5, "--k", "1", "--count")
    assert code == 0 and rep["result"]["count"] == 15
    b8 = _square(tmp_path, capsys, "cyclic", "--n", "8")
    _, rep = run(capsys, "search", b8, "--k", "1", "--exists")
    assert rep["result"]["status"] == "ExhaustedNone"
    l2 = _square(tmp_path, capsys, "mod4", "--n", "8")
    wit = tmp_path / "w.txt"
    _, rep = run(capsys, "search", l2, "--k", "3", "--exists", "--witness-out", str(wit))
    assert rep["result"]["status"] == "Found"
    assert is_plex(read_square(l2), read_entries(wit), 3)


def test_search_jobs_deterministic(tmp_path, capsys):
    b9 = _square(tmp_path, capsys, "cyclic", "--n", "9")
    _, a = run(capsys, "search", b9, "--count", "--jobs", "1", "--seed", "4")
    _, b = run(capsys, "search", b9, "--count", "--jobs", "3", "--seed", "4")
    assert a["result"]["count"] == b["result"]["count"] == 2025
    assert a["result"]["witness"] == b["result"]["witness"]


def test_jobs_env_default(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("PLEXFORGE_JOBS", "2")
    b5 = _square(tmp_path, capsys, "cyclic", "--n", "5")
    _, rep = run(capsys, "search", b5, "--count")
    assert rep["parameters"]["jobs"] == 2


def _b8_rect(tmp_path):
    rows = [" ".join(str((i + j) % 8) for j in range(8)) for i in range(5)]
    path = tmp_path / "rect.txt"
    path.write_text("8\n" + "\n".join(rows) + "\n")
    return str(path)


def test_certify_exit_codes(tmp_path, capsys):
    from plexforge.construct import build_cyclic
    from plexforge.core import write_square
    from plexforge.search import enumerate_completions

    comp = next(iter(enumerate_completions(build_cyclic(8).rectangle(5))))
    path = tmp_path / "c.square"
    write_square(comp, path)
    code, rep = run(capsys, "certify", str(path), "--method", "botrows", "--k", "1", "--m", "1", "--r", "3")
    assert code == 0 and rep["result"]["conclusion"] == "Excluded"
    b8 = _square(tmp_path, capsys, "cyclic", "--n", "8")
    code, rep = run(capsys, "certify", b8, "--method", "botrows", "--k", "3", "--m", "1", "--r", "3")
    assert code == 10 and rep["result"]["conclusion"] == "Inconclusive"
    kk = _square(tmp_path, capsys, "kk2", "--k", "3", "--m", "2")
    code, rep = run(capsys, "certify", kk, "--method", "matching", "--k", "1", "--m", "1")
    assert code == 0 and set(rep["result"]) == {
        "method", "square_digest", "k", "m", "sum_lo", "sum_hi", "required_value", "required_modulus", "conclusion",
    }


def test_enumerate_b8(tmp_path, capsys):
    rect = _b8_rect(tmp_path)
    out = tmp_path / "all.txt"
    code, rep = run(capsys, "enumerate", rect, "--out", str(out), "--classify", "--transversal-check")
    res = rep["result"]
    assert code == 0 and res["completions"] == 264
    assert res["transversal_free"] == 264 and res["species_count"] == 9
    assert all(e["transversal_count"] == 0 for e in res["species"])
    blocks = out.read_text().split("\n\n")
    assert len(blocks) == 264


def test_bounds(capsys):
    _, rep = run(capsys, "bounds", "extension", "--n", "8", "--k", "5")
    assert abs(rep["result"]["log10_value"] - (-1.6324)) < 1e-4
    _, rep = run(capsys, "bounds", "extension", "--n", "8", "--k", "8")
    assert rep["result"]["log10_value"] == 0
    _, rep = run(capsys, "bounds", "stepcount", "--a", "1", "--m", "3")
    assert abs(rep["result"]["log10_value"] - (-14.094)) < 2e-3
    _, rep = run(capsys, "bounds", "species-floor", "--n", "8", "--mode", "ThreeHalves")
    assert rep["result"]["log10_value"] < 0


def test_usage_and_data_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["bounds", "extension", "--n", "8"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
    capsys.readouterr()
    bad = tmp_path / "bad.square"
    bad.write_text("2\n0 0\n1 1\n")
    code, rep = run(capsys, "search", str(bad))
    assert code == 3 and rep["error"]["type"] == "RowNotPermutation"
    code, rep = run(capsys, "search", str(tmp_path / "missing"))
    assert code == 3


def test_paper_suite_subset(capsys):
    code, rep = run(capsys, "paper-suite", "--only", "2", "10")
    assert code == 0 and rep["result"]["passed"]
    assert [c["number"] for c in rep["result"]["criteria"]] == [2, 10]

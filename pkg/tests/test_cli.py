import csv
import io
import json
import subprocess
import sys

import pytest

from p2race.cli import RACE_CSV_HEADER, SEARCH_CSV_HEADER, run
from p2race.search import enumerate_fundamental_discriminants
from p2race.sieve import read_prime_cache

from conftest import RECORD_D


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


SMALL = {
    "race": ["race", "--d", "-4", "--xs", "100,1e4", "--cutoff", "1e4"],
    "lsum": ["lsum", "--d", "5", "--cutoff", "1e4"],
    "l1": ["l1", "--preset", "euler", "--cutoff", "1e4"],
    "search": ["search", "--D", "200", "--cutoff", "1e4", "--top-k", "3", "--tau", "0", "--tau-l1", "1"],
    "hl": ["hl", "--A", "41", "--n", "1000", "--cutoff", "1e4"],
    "landau": ["landau", "--xs", "30,1e4"],
}


@pytest.mark.parametrize("cmd", sorted(SMALL))
@pytest.mark.parametrize("fmt", ["table", "csv", "json"])
def test_every_subcommand_and_format(cmd, fmt):
    code, out, err = call(*SMALL[cmd], "--output", fmt, "--threads", "1")
    assert code == 0, err
    assert out.strip()
    if fmt == "json":
        doc = json.loads(out)
        assert doc["schema_version"] == 1 and doc["subcommand"] == cmd
    if fmt == "csv":
        rows = list(csv.reader(io.StringIO(out)))
        assert len(rows) >= 2


def test_race_json_contents():
    code, out, _ = call("race", "--d", "-4", "--xs", "30", "--eta", "-1", "--cutoff", "1e4", "--output", "json")
    assert code == 0
    doc = json.loads(out)
    row = doc["rows"][0]
    assert row["counts"] == {"n_pp": 1, "n_pm": 1, "n_mp": 1, "n_mm": 3, "n_coprime": 6}
    assert row["r_exact"] == {"numerator": 12, "denominator": 6}
    assert row["r_reduced"] == [2, 1]
    assert row["r"] == 2.0
    assert row["predicted"] == row["predicted_minus"]
    assert set(doc["curly_l"]) == {"value", "cutoff", "oscillation"}


@pytest.mark.parametrize("cmd", sorted(SMALL))
def test_json_round_trip(cmd):
    code, out, _ = call(*SMALL[cmd], "--output", "json")
    assert code == 0
    assert json.dumps(json.loads(out), indent=2, ensure_ascii=False) + "\n" == out


def test_race_csv_header():
    code, out, _ = call(*SMALL["race"], "--output", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == RACE_CSV_HEADER
    assert ",".join(rows[0]) == "x,n_pp,n_pm,n_mp,n_mm,n_coprime,r_minus,r_plus,predicted_minus,cutoff,oscillation"
    assert [r[0] for r in rows[1:]] == ["100", "10000"]


def test_search_csv_streams_every_record():
    code, out, _ = call("search", "--D", "50", "--cutoff", "1000", "--output", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == SEARCH_CSV_HEADER
    assert [int(r[0]) for r in rows[1:]] == enumerate_fundamental_discriminants(50).tolist()


@pytest.mark.parametrize("cmd", sorted(SMALL))
@pytest.mark.parametrize("fmt", ["table", "csv", "json"])
def test_threads_byte_identical(cmd, fmt):
    one = call(*SMALL[cmd], "--output", fmt, "--threads", "1")
    eight = call(*SMALL[cmd], "--output", fmt, "--threads", "8")
    assert one == eight


def test_exit_codes():
    assert call("race", "--d", "0", "--xs", "100", "--cutoff", "100")[0] == 2
    code, _, err = call("race", "--d", "1", "--xs", "100", "--cutoff", "100")
    assert code == 2 and "d must be a fundamental discriminant ≠ 0, 1" in err
    code, _, err = call()
    assert code == 2 and "usage" in err
    assert call("race", "--d", "12x", "--xs", "100")[0] == 2
    assert call("race", "--d", "-4", "--xs", "10,x")[0] == 2
    assert call("race", "--d", "-4", "--xs", "100", "--bogus")[0] == 2
    assert call("race", "--d", "-4", "--xs", "100,50", "--cutoff", "100")[0] == 2
    assert call("race", "--d", "-4", "--xs", "5000", "--cutoff", "100", "--sieve-limit", "1000")[0] == 2
    assert call("race", "--d", "-12", "--xs", "100", "--cutoff", "100")[0] == 2
    assert call("search", "--D", "2", "--cutoff", "100")[0] == 2
    assert call("hl", "--A", "1", "--n", "10", "--cutoff", "100")[0] == 1
    assert call("hl", "--A", "41", "--n", "0", "--cutoff", "100")[0] == 1


def test_error_is_one_line():
    code, out, err = call("race", "--d", "0", "--xs", "100")
    assert code == 2 and out == "" and err.count("\n") == 1


def test_record_preset_matches_literal():
    a = call("lsum", "--preset", "dgk-record", "--cutoff", "1e4", "--output", "json")
    b = call("lsum", "--d", str(RECORD_D), "--cutoff", "1e4", "--output", "json")
    assert a[0] == 0 and a == b
    doc = json.loads(a[1])
    assert doc["d"] == str(RECORD_D) and doc["validation"] == "trial_checked"


def test_euler_preset_for_hl():
    code, out, _ = call("hl", "--preset", "euler", "--n", "39", "--cutoff", "1e4", "--output", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["A"] == "41" and doc["delta"] == "-163" and doc["P"] == 40


def test_prime_cache_env_and_flag(tmp_path, monkeypatch):
    env_path = tmp_path / "env.bin"
    flag_path = tmp_path / "flag.bin"
    monkeypatch.setenv("P2RACE_CACHE", str(env_path))
    assert call("landau", "--xs", "1000")[0] == 0
    assert read_prime_cache(env_path).limit == 1000
    assert call("landau", "--xs", "2000", "--prime-cache", str(flag_path))[0] == 0
    assert read_prime_cache(flag_path).limit == 2000
    assert read_prime_cache(env_path).limit == 1000
    # a larger cache is reused for a smaller request
    assert call("landau", "--xs", "500")[0] == 0
    assert read_prime_cache(env_path).limit == 1000


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "p2race.cli", "landau", "--xs", "30", "--output", "json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["rows"][0]["count"] == 17
    proc = subprocess.run([sys.executable, "-m", "p2race.cli"], capture_output=True, text=True)
    assert proc.returncode == 2

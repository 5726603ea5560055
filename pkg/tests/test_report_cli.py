import json
import os
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from krh.cli import EXIT_FAILED, EXIT_INVALID, EXIT_OK, EXIT_WINDOW, JobConfig, main, run
from krh.exactalg import GradedAbelianGroup
from krh.report import LinkHomologyReport, align_shift, emit_json, emit_text, parse_json

groups_st = st.integers(0, 3).flatmap(lambda free: st.tuples(
    st.just(free), st.lists(st.sampled_from([2, 4, 12]), max_size=2).map(
        lambda ts: tuple(sorted(ts, key=lambda t: (t != 2, t))))))


def make_group(case):
    free, ts = case
    return GradedAbelianGroup.from_factors(free, list(ts))


@given(st.dictionaries(st.tuples(st.integers(-3, 3), st.integers(0, 3), st.integers(0, 20)),
                       groups_st, max_size=8),
       st.booleans())
def test_json_round_trip(table, with_b):
    groups = {k + ((1,) if with_b else ()): make_group(g) for k, g in table.items()}
    rep = LinkHomologyReport("1 1", 2, "homfly", {"q_max": 20}, groups)
    back = parse_json(emit_json(rep))
    assert back == rep


def test_empty_report_json():
    assert json.loads(emit_json(None)) == {"groups": []}


def test_text_rendering():
    rep = LinkHomologyReport("", 1, "homfly", {"q_max": 2}, {(0, 0, 0): GradedAbelianGroup(1),
                                                           (0, 1, 1): GradedAbelianGroup(0, (2,))})
    text = emit_text(rep)
    assert "gr_v = 0" in text and "Z/2" in text
    assert "(no nonzero groups" in emit_text(LinkHomologyReport("", 1, "homfly", {}, {}))


def test_align_shift():
    a = {(0, 0, 0): GradedAbelianGroup(1), (0, 1, 3): GradedAbelianGroup(1)}
    b = {(1, 1, 2): GradedAbelianGroup(1), (1, 2, 5): GradedAbelianGroup(1)}
    assert align_shift(b, a, 10, 10) == (1, 1, 2)
    assert align_shift(a, {}, 10, 10) is None
    assert align_shift({}, {}, 10, 10) == (0, 0, 0)


def test_run_homfly_text():
    code, text, err = run(JobConfig("1", 2, "homfly", q_max=4))
    assert code == EXIT_OK and not err
    assert text.startswith("theory homfly")


def test_run_json_torsion():
    code, text, _ = run(JobConfig("", 1, "sln-raw:1", q_max=3, fmt="json"))
    data = json.loads(text)
    assert code == EXIT_OK
    assert {"gr_v": 0, "gr_h": 1, "gr_q": 3, "free_rank": 0, "torsion": [2]} in data["groups"]


def test_rational_coefficients_drop_torsion():
    _, text, _ = run(JobConfig("", 1, "sln-raw:1", q_max=3, coeff="Q", fmt="json"))
    data = json.loads(text)
    assert all(not row["torsion"] for row in data["groups"])
    assert data["window"]["coeff"] == "Q"


@pytest.mark.parametrize("cfg", [
    JobConfig("1 x", 2, "homfly"),
    JobConfig("3", 2, "homfly"),
    JobConfig("1", 2, "nonsense"),
    JobConfig("1", 2, "sln-raw:0"),
    JobConfig("1", 2, "equivariant:2", b_cap=0),
    JobConfig("1", 2, "homfly", coeff="R"),
    JobConfig("", 7, "schubert-selftest"),
])
def test_validation_errors(cfg):
    code, text, err = run(cfg)
    assert code == EXIT_INVALID and not text and err.startswith("error:")


def test_window_too_small_exit():
    assert run(JobConfig("1", 2, "homfly", q_max=-1))[0] == EXIT_WINDOW


def test_selftest_modes():
    code, text, _ = run(JobConfig("", 3, "schubert-selftest"))
    assert code == EXIT_OK and "FAIL" not in text and "PASS" in text
    code, text, _ = run(JobConfig("", 2, "schubert-selftest", fmt="json"))
    assert all(r["passed"] for r in json.loads(text)["results"])


def test_exit_code_constants_distinct():
    assert len({EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_WINDOW}) == 4


def test_main_writes_out_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["--braid", "1 1 1", "--strands", "2", "--theory", "sln:2", "--qmax", "6",
                 "--format", "json", "--out", str(out)])
    assert code == EXIT_OK
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["theory"] == "sln:2"


def test_main_bad_arguments():
    assert main(["--strands", "x"]) == EXIT_INVALID
    assert main(["--braid", "1", "--strands", "2", "--coeff", "R"]) == EXIT_INVALID


def test_jobs_do_not_change_output():
    args = ["--braid", "1 -2 1", "--strands", "3", "--theory", "homfly", "--qmax", "6", "--format", "json"]
    outs = []
    for jobs in ("1", "2"):
        res = subprocess.run([sys.executable, "-m", "krh.cli", *args, "--jobs", jobs],
                             capture_output=True, text=True)
        assert res.returncode == EXIT_OK
        outs.append(res.stdout)
    assert outs[0] == outs[1]


def test_env_jobs_default_and_console_exit_codes():
    env = dict(os.environ, KRH_JOBS="2")
    res = subprocess.run([sys.executable, "-m", "krh.cli", "--braid", "1", "--strands", "2", "--qmax", "4"],
                         capture_output=True, text=True, env=env)
    assert res.returncode == EXIT_OK
    res = subprocess.run([sys.executable, "-m", "krh.cli", "--braid", "1", "--strands", "2", "--qmax", "-1"],
                         capture_output=True, text=True)
    assert res.returncode == EXIT_WINDOW and "window too small" in res.stderr


def test_rational_theory_reports_rational_window():
    _, text, _ = run(JobConfig("", 1, "sln-rational:1", q_max=3, fmt="json"))
    assert json.loads(text)["window"]["coeff"] == "Q"

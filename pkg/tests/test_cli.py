import csv
import math

import numpy as np
import pytest

from mafoliation.cli import bundled_corpus_dir, main
from mafoliation.potential import format_potential


@pytest.fixture(scope="module")
def corpus():
    return bundled_corpus_dir()


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_analyze_ball_clean(corpus, tmp_path, capsys):
    rc = main(
        ["analyze", str(corpus / "ball2.pot"), "--samples", "300", "--out", str(tmp_path)]
    )
    out = capsys.readouterr().out
    assert rc == 0
    assert "seed = 1234" in out
    assert "strict" in out and "(100.0%)" in out
    rows = _read_csv(tmp_path / "ball2_analyze.csv")
    assert len(rows) == 300
    assert set(rows[0]) >= {
        "rho",
        "re_detH",
        "im_detH",
        "stratum",
        "ma_residual",
        "ma_residual_scaled",
        "euler_residual",
    }
    assert max(float(r["ma_residual"]) for r in rows) < 1e-10


def test_analyze_nonma_is_finding_not_failure(corpus, tmp_path, capsys):
    rc = main(
        ["analyze", str(corpus / "nonma.pot"), "--samples", "300", "--out", str(tmp_path)]
    )
    out = capsys.readouterr().out
    assert rc == 0  # non-MA is a finding, analysis still succeeds
    rows = _read_csv(tmp_path / "nonma_analyze.csv")
    assert max(float(r["ma_residual"]) for r in rows) > 1e-3


def test_analyze_malformed_file_exit2(tmp_path, capsys):
    bad = tmp_path / "bad.pot"
    bad.write_text("n = 2\nmonomial: a=[1,0 b=[1,0] c=1\n")
    rc = main(["analyze", str(bad)])
    err = capsys.readouterr().err
    assert rc == 2
    assert "line 2" in err


def test_analyze_missing_file_exit2(tmp_path, capsys):
    rc = main(["analyze", str(tmp_path / "nope.pot")])
    assert rc == 2


def test_trace_weighted_diagnostics_pass(corpus, tmp_path, capsys):
    rc = main(
        [
            "trace",
            str(corpus / "weighted24.pot"),
            "--base",
            "1+0i,1+0i",
            "--t-nodes",
            "5",
            "--s-nodes",
            "9",
            "--out",
            str(tmp_path),
        ]
    )
    out = capsys.readouterr().out
    assert rc == 0
    assert out.count("ok ") >= 3
    rows = _read_csv(tmp_path / "weighted24_trace.csv")
    assert set(rows[0]) == {
        "t",
        "s",
        "re_z1",
        "im_z1",
        "re_z2",
        "im_z2",
        "rho",
        "abs_detH",
        "stratum",
    }


def test_trace_from_origin_exit2(corpus, capsys):
    rc = main(["trace", str(corpus / "weighted24.pot"), "--base", "0+0i,0+0i"])
    assert rc == 2


def test_trace_failing_diagnostic_exit1(corpus, tmp_path, capsys):
    # the growth law rho = e^t rho0 only holds for Monge-Ampere potentials, so
    # log-linearity fails on the counterexample
    rc = main(
        [
            "trace",
            str(corpus / "nonma.pot"),
            "--base",
            "1+0i,1+0i",
            "--t-max",
            "1",
            "--t-nodes",
            "3",
            "--s-nodes",
            "3",
            "--out",
            str(tmp_path),
        ]
    )
    out = capsys.readouterr().out
    assert rc == 1
    assert "FAIL" in out


def test_trace_ball_exponential_growth(corpus, tmp_path, capsys):
    rc = main(
        [
            "trace",
            str(corpus / "ball2.pot"),
            "--base",
            "1+0i,0+0i",
            "--t-max",
            "2",
            "--t-nodes",
            "3",
            "--s-nodes",
            "1",
            "--out",
            str(tmp_path),
        ]
    )
    out = capsys.readouterr().out
    assert rc == 0
    final = float(out.split("final rho at (t_max, s=0):")[1].strip())
    assert final == pytest.approx(math.e**2, abs=1e-6)


def test_weights_weighted24(corpus, capsys):
    rc = main(["weights", str(corpus / "weighted24.pot"), "--samples", "100"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "c = (1, 0.5)" in out
    assert "unique" in out


def test_weights_nonma_certificate(corpus, capsys):
    rc = main(["weights", str(corpus / "nonma.pot")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "infeasible" in out
    assert "{c1 = 1, c2 = 1, c1 + c2 = 1}" in out


def test_weights_ball(corpus, capsys):
    rc = main(["weights", str(corpus / "ball2.pot"), "--samples", "50"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "c = (1, 1)" in out


def test_burns_pass_and_fail_both_exit0(corpus, tmp_path, capsys):
    rc = main(
        ["burns", str(corpus / "square_norm.pot"), "--grid-n", "10", "--out", str(tmp_path)]
    )
    out = capsys.readouterr().out
    assert rc == 0
    assert "verdict           : pass" in out

    rc = main(
        [
            "burns",
            str(corpus / "quartic_mixed.pot"),
            "--grid-n",
            "10",
            "--csv",
            "--out",
            str(tmp_path),
        ]
    )
    out = capsys.readouterr().out
    assert rc == 0  # a fail verdict is a finding, not an error
    assert "verdict           : fail" in out
    assert "(3,1): 0.5" in out
    rows = _read_csv(tmp_path / "quartic_mixed_burns.csv")
    assert max(float(r["ma_residual_scaled"]) for r in rows) > 1e-3


def test_suite_bundled_corpus(corpus, tmp_path, capsys):
    rc = main(["suite", str(corpus), "--samples", "200", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "OK: 0 failing checks" in out
    assert (tmp_path / "suite_summary.csv").exists()


def test_suite_empty_directory_exit2(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    rc = main(["suite", str(empty)])
    assert rc == 2


def test_suite_determinism(corpus, tmp_path, capsys):
    out1 = tmp_path / "r1"
    out2 = tmp_path / "r2"
    assert main(["suite", str(corpus), "--samples", "150", "--out", str(out1)]) == 0
    assert main(["suite", str(corpus), "--samples", "150", "--out", str(out2)]) == 0
    capsys.readouterr()
    b1 = (out1 / "suite_summary.csv").read_bytes()
    b2 = (out2 / "suite_summary.csv").read_bytes()
    assert b1 == b2


def test_suite_honors_expectation_metadata(tmp_path, capsys, nonma):
    # a corpus holding only the counterexample, declared expect-nonMA
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "nonma.pot").write_text(format_potential(nonma))
    (corpus / "expect.json").write_text('{"nonma.pot": {"ma": false, "weights": null}}')
    rc = main(["suite", str(corpus), "--samples", "150", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "ma_fails" in out and "weights_infeasible" in out


def test_suite_flags_wrong_expectation(tmp_path, capsys, nonma):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "nonma.pot").write_text(format_potential(nonma))
    (corpus / "expect.json").write_text('{"nonma.pot": {"ma": true}}')
    rc = main(["suite", str(corpus), "--samples", "150", "--out", str(tmp_path)])
    capsys.readouterr()
    assert rc == 1


def test_analyze_csv_determinism(corpus, tmp_path, capsys):
    out1 = tmp_path / "a1"
    out2 = tmp_path / "a2"
    for out in (out1, out2):
        assert (
            main(
                [
                    "analyze",
                    str(corpus / "weighted24.pot"),
                    "--samples",
                    "200",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
    capsys.readouterr()
    assert (out1 / "weighted24_analyze.csv").read_bytes() == (
        out2 / "weighted24_analyze.csv"
    ).read_bytes()

import dataclasses
import json

import pytest
from click.testing import CliRunner

from conftest import pipeline, quadric
from obstructio.barth import FAMILIES, sample_section, section_from_matrix
from obstructio.certify import (
    EXIT_CODES,
    SCHEMA,
    SurfaceAnalysis,
    batch,
    run_pipeline,
    summarize,
    verdict,
    write_batch,
)
from obstructio.cli import main


def zero_sampler(fam, ctx, seed):
    n = len(fam.bundle.atoms)
    return section_from_matrix(fam, [[ctx.ring.zero] * n for _ in range(n)], ctx, seed)


@pytest.mark.parametrize("tag, status", [("O2", "certified_obstruction"), ("O1", "no_certificate")])
def test_verdict(tag, status):
    v = verdict(pipeline(tag))
    assert v.status == status
    assert v.exit_code == EXIT_CODES[status]
    assert v.reasons


def test_no_certificate_is_not_a_proof():
    reasons = " ".join(verdict(pipeline("O1")).reasons)
    assert "not a proof" in reasons


def test_disagreeing_routes_are_inconsistent():
    a = dataclasses.replace(pipeline("O2"), defect_resolution=[1, 1])
    v = verdict(a)
    assert v.status == "inconsistent" and v.exit_code == 20
    assert any("disagree" in r for r in v.reasons)


@pytest.mark.parametrize(
    "change",
    [{"sing_equals_w": False}, {"node_count": 16}, {"hilbert_chi_check": False}, {"defect_groebner": -1}],
)
def test_other_contradictions(change):
    assert verdict(dataclasses.replace(pipeline("O2"), **change)).status == "inconsistent"


def test_verdict_needs_accepted_analysis():
    failed = run_pipeline("O1", seed=5, max_retries=0, sampler=zero_sampler, ctx=quadric())
    with pytest.raises(ValueError):
        verdict(failed)


def test_forced_sampling_failure():
    a = run_pipeline("O2", seed=5, max_retries=0, sampler=zero_sampler, ctx=quadric())
    assert a.status == "sampling_failure" and not a.accepted
    assert a.seeds == [5]
    assert a.attempts[0]["outcome"] == "rejected"


def test_retries_move_to_the_next_seed():
    def flaky(fam, ctx, seed):
        return zero_sampler(fam, ctx, seed) if seed < 2 else sample_section(fam, ctx, seed)

    a = run_pipeline("O1", seed=0, max_retries=3, sampler=flaky, ctx=quadric())
    assert a.accepted and a.seed == 2
    assert a.seeds == [0, 1, 2]
    assert [x["outcome"] for x in a.attempts] == ["rejected", "rejected", "accepted"]


def test_pipeline_is_deterministic():
    a = run_pipeline("O1", seed=3, ctx=quadric())
    assert a.to_json() == run_pipeline("O1", seed=3, ctx=quadric()).to_json()


@pytest.mark.parametrize("tag", ["E3", "O3"])
def test_spinor_runs(tag):
    a = pipeline(tag)
    fam = FAMILIES[tag]
    assert a.accepted
    assert a.node_count == fam.expected_nodes
    assert a.defect_groebner == fam.expected_defect
    assert a.reduced and a.sing_equals_w and a.hilbert_chi_check


def test_report_round_trip():
    a = pipeline("E2")
    text = a.to_json()
    assert json.loads(text)["schema"] == SCHEMA
    assert SurfaceAnalysis.from_json(text).to_json() == text


def test_report_schema_is_checked():
    record = pipeline("E2").to_dict()
    record["schema"] = "other/0"
    with pytest.raises(ValueError):
        SurfaceAnalysis.from_dict(record)


def test_batch_rejects_empty_count():
    with pytest.raises(ValueError):
        batch(["O1"], 0)


def test_batch_order_and_determinism(tmp_path):
    serial = batch(["O2", "O1"], 2, base_seed=1)
    parallel = batch(["O1", "O2"], 2, base_seed=1, parallelism=2)
    assert [(a.family, a.seeds[0]) for a in serial] == [("O1", 1), ("O1", 10), ("O2", 1), ("O2", 10)]
    write_batch(serial, tmp_path / "a")
    write_batch(parallel, tmp_path / "b")
    files = sorted(x.name for x in (tmp_path / "a").iterdir())
    assert "summary.json" in files and len(files) == 5
    for name in files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    summary = summarize(serial)["families"]
    assert summary["O2"] == {"runs": 2, "accepted": 2, "verdicts": {"certified_obstruction": 2}}


def test_cli_generate_analyze_certify(tmp_path):
    runner = CliRunner()
    section = tmp_path / "s.json"
    report = tmp_path / "r.json"
    r = runner.invoke(main, ["generate", "--family", "O2", "--seed", "1", "--out", str(section)])
    assert r.exit_code == 0
    r = runner.invoke(main, ["analyze", str(section), "--out", str(report)])
    assert r.exit_code == 0
    assert SurfaceAnalysis.from_json(report.read_text()).node_count == 20
    r = runner.invoke(main, ["certify", str(report)])
    assert r.exit_code == 0 and r.output.startswith("certified_obstruction")


def test_cli_exit_codes(tmp_path):
    runner = CliRunner()
    cases = {
        "none.json": (pipeline("O1"), 10),
        "bad.json": (dataclasses.replace(pipeline("O2"), defect_resolution=[1, 1]), 20),
        "fail.json": (run_pipeline("O2", seed=5, max_retries=0, sampler=zero_sampler, ctx=quadric()), 30),
    }
    for name, (analysis, code) in cases.items():
        path = tmp_path / name
        path.write_text(analysis.to_json())
        assert runner.invoke(main, ["certify", str(path)]).exit_code == code


def test_cli_analyze_degenerate_section(tmp_path):
    section = tmp_path / "zero.json"
    report = tmp_path / "r.json"
    section.write_text(zero_sampler(FAMILIES["O2"], quadric(), 0).to_json())
    runner = CliRunner()
    assert runner.invoke(main, ["analyze", str(section), "--out", str(report)]).exit_code == 0
    assert runner.invoke(main, ["certify", str(report)]).exit_code == 30


def test_cli_batch(tmp_path):
    runner = CliRunner()
    out = tmp_path / "runs"
    r = runner.invoke(main, ["batch", "--families", "O1", "--count", "1", "--out", str(out)])
    assert r.exit_code == 0 and "O1: 1/1 accepted" in r.output
    assert (out / "O1-0.json").exists()
    assert runner.invoke(main, ["batch", "--count", "0", "--out", str(out)]).exit_code == 2
    assert runner.invoke(main, ["batch", "--families", "X9", "--out", str(out)]).exit_code == 2


def test_cli_selftest():
    r = CliRunner().invoke(main, ["selftest"])
    assert r.exit_code == 0
    assert "FAIL" not in r.output

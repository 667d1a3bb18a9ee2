import json

import pytest

from mad.evalharness import (
    CorpusManifest,
    ManifestError,
    RecordedOutcomeStore,
    UnknownFormatError,
    format_rate,
    render_report,
    run_ablation,
    run_corpus,
    run_unit_tests,
)
from mad.llm import FixtureStore, ModelConfig
from mad.prompts import arm_config
from mad.verifier import CompileOutcome, ToolchainConfig


@pytest.fixture(scope="module")
def manifest(fixtures_dir):
    return CorpusManifest.load(fixtures_dir / "corpus" / "manifest.json")


@pytest.fixture(scope="module")
def outcome_stores(fixtures_dir):
    return {
        arm: RecordedOutcomeStore.load(fixtures_dir / "corpus" / f"outcomes_{arm}.json")
        for arm in ("full", "no-domain", "no-instructions", "no-fewshot")
    }


def _mock_model():
    return ModelConfig(backend="mock", model_id="mock-rewriter", max_parallel=8)


# manifest --------------------------------------------------------------------


def test_manifest_loads_30_entries(manifest):
    assert len(manifest.entries) == 30
    assert len({e.id for e in manifest.entries}) == 30


def test_manifest_rejects_duplicate_ids(tmp_path, fixtures_dir):
    src = fixtures_dir / "corpus" / "counter_0"
    doc = {
        "entries": [
            {"id": "a", "inputs": {"disassembly": "d.move", "low_level": "l.move"}},
            {"id": "a", "inputs": {"disassembly": "d.move", "low_level": "l.move"}},
        ]
    }
    (tmp_path / "d.move").write_text(src.joinpath("disassembly.move").read_text())
    (tmp_path / "l.move").write_text(src.joinpath("low_level.move").read_text())
    (tmp_path / "manifest.json").write_text(json.dumps(doc))
    with pytest.raises(ManifestError):
        CorpusManifest.load(tmp_path / "manifest.json")


def test_manifest_rejects_missing_paths(tmp_path):
    doc = {"entries": [{"id": "a", "inputs": {"disassembly": "nope", "low_level": "nope"}}]}
    (tmp_path / "manifest.json").write_text(json.dumps(doc))
    with pytest.raises(ManifestError):
        CorpusManifest.load(tmp_path / "manifest.json")


# rates -------------------------------------------------------------------------


def test_recorded_vectors_render_paper_rates(manifest, outcome_stores, assets):
    rows = run_ablation(manifest, _mock_model(), None, assets, outcome_stores=outcome_stores)
    rates = {arm: format_rate(report.success_rate) for arm, report in rows}
    assert rates == {
        "full": "73.3",
        "no-domain": "46.7",
        "no-instructions": "70.0",
        "no-fewshot": "70.0",
    }


def test_success_rate_matches_recomputation(manifest, outcome_stores, assets):
    report = run_corpus(
        manifest, _mock_model(), arm_config("full", assets),
        outcome_stores["full"], assets,
    )
    assert report.success_rate == report.recompute_rate()
    assert abs(report.success_rate - 22 / 30) < 1e-12


def test_empty_manifest_rate_is_na(tmp_path, assets):
    (tmp_path / "manifest.json").write_text(json.dumps({"entries": []}))
    manifest = CorpusManifest.load(tmp_path / "manifest.json")
    report = run_corpus(manifest, _mock_model(), arm_config("full", assets), None, assets)
    assert report.success_rate is None
    assert format_rate(report.success_rate) == "n/a"
    assert "n/a" in render_report(report)


def test_skipped_entries_leave_denominator(manifest, outcome_stores, assets, tmp_path):
    """Recorded backend with an empty store: every entry is a fixture miss,
    so nothing is attempted and the rate is undefined."""
    store = FixtureStore(tmp_path / "empty-store")
    model = ModelConfig(backend="recorded", model_id="m", max_parallel=8)
    report = run_corpus(
        manifest, model, arm_config("full", assets), outcome_stores["full"], assets,
        store=store,
    )
    assert all(r.status == "skipped" for r in report.per_entry.values())
    assert report.success_rate is None


def test_all_fail_vector_renders_zero(manifest, assets):
    outcomes = RecordedOutcomeStore(
        {e.id: CompileOutcome("fail", "Other") for e in manifest.entries}
    )
    report = run_corpus(manifest, _mock_model(), arm_config("full", assets), None, assets)
    report_failed = run_corpus(manifest, _mock_model(), arm_config("full", assets), outcomes, assets)
    assert format_rate(report_failed.success_rate) == "0.0"
    # without any toolchain everything is skipped -> n/a
    assert report.success_rate is None


def test_per_entry_isolation(tmp_path, assets, fixtures_dir):
    good = fixtures_dir / "corpus" / "counter_0"
    (tmp_path / "broken.move").write_text("module 0x1::broken {")
    doc = {
        "entries": [
            {"id": "good", "inputs": {
                "disassembly": str(good / "disassembly.move"),
                "low_level": str(good / "low_level.move")}},
            {"id": "broken", "inputs": {
                "disassembly": "broken.move", "low_level": "broken.move"}},
        ]
    }
    (tmp_path / "manifest.json").write_text(json.dumps(doc))
    manifest = CorpusManifest.load(tmp_path / "manifest.json")
    report = run_corpus(manifest, _mock_model(), arm_config("full", assets), None, assets)
    assert report.per_entry["good"].status == "ok"
    assert report.per_entry["broken"].status == "error"


# determinism --------------------------------------------------------------------


def test_recorded_backend_is_deterministic(manifest, outcome_stores, assets, tmp_path):
    store = FixtureStore(tmp_path / "recorded")
    model = _mock_model()
    small = CorpusManifest(entries=manifest.entries[:6], root=manifest.root)
    # record a mock run, then replay twice
    run_corpus(small, model, arm_config("full", assets), outcome_stores["full"], assets,
               record_to=store)
    replay_cfg = ModelConfig(backend="recorded", model_id="mock-rewriter", max_parallel=8)
    first = run_corpus(small, replay_cfg, arm_config("full", assets),
                       outcome_stores["full"], assets, store=store)
    second = run_corpus(small, replay_cfg, arm_config("full", assets),
                        outcome_stores["full"], assets, store=store)
    assert first.to_dict(include_timestamp=False) == second.to_dict(include_timestamp=False)
    decompiled_first = {k: r.decompiled for k, r in first.per_entry.items()}
    decompiled_second = {k: r.decompiled for k, r in second.per_entry.items()}
    assert decompiled_first == decompiled_second
    assert all(r.status == "ok" for r in first.per_entry.values())


# rendering ----------------------------------------------------------------------


def test_render_one_decimal(manifest, outcome_stores, assets):
    report = run_corpus(manifest, _mock_model(), arm_config("full", assets),
                        outcome_stores["full"], assets)
    text = render_report(report, "markdown")
    assert "| 73.3 |" in text


def test_render_rows_sorted_descending(manifest, outcome_stores, assets):
    rows = run_ablation(manifest, _mock_model(), None, assets, outcome_stores=outcome_stores)
    md = render_report(rows, "markdown")
    body = [l for l in md.splitlines() if l.startswith("| mock")]
    rates = [float(l.split("|")[3]) for l in body]
    assert rates == sorted(rates, reverse=True)


def test_csv_and_markdown_agree(manifest, outcome_stores, assets):
    rows = run_ablation(manifest, _mock_model(), None, assets, outcome_stores=outcome_stores)
    md = render_report(rows, "markdown")
    csv = render_report(rows, "csv")
    md_cells = [
        line.split("|")[3].strip() for line in md.splitlines() if line.startswith("| mock")
    ]
    csv_cells = [line.split(",")[2] for line in csv.splitlines()[1:]]
    assert md_cells == csv_cells


def test_unknown_format(manifest, outcome_stores, assets):
    report = run_corpus(manifest, _mock_model(), arm_config("full", assets),
                        outcome_stores["full"], assets)
    with pytest.raises(UnknownFormatError):
        render_report(report, "yaml")


def test_deterministic_table_on_identical_fixtures(manifest, outcome_stores, assets):
    rows1 = run_ablation(manifest, _mock_model(), None, assets, outcome_stores=outcome_stores)
    rows2 = run_ablation(manifest, _mock_model(), None, assets, outcome_stores=outcome_stores)
    assert render_report(rows1, "markdown") == render_report(rows2, "markdown")


# unit tests runner ---------------------------------------------------------------


def test_unit_tests_skipped_without_toolchain(manifest):
    entry = manifest.entries[0]
    outcome = run_unit_tests(entry, "module 0x1::m { fun f() {} }", None)
    assert outcome.status == "skipped"


def test_unit_tests_with_stub_toolchain(tmp_path, fixtures_dir):
    """A stand-in test runner proves substitution and count parsing."""
    package = tmp_path / "pkg"
    (package / "sources").mkdir(parents=True)
    (package / "Move.toml").write_text("[package]\nname = \"x\"\n")
    (package / "sources" / "mod.move").write_text("module 0x1::target { fun f() {} }")

    runner = tmp_path / "fakesui"
    runner.write_text(
        "#!/bin/sh\n"
        "grep -q 'decompiled marker' sources/mod.move || exit 9\n"
        "echo 'Test result: OK. Total tests: 3; passed: 3; failed: 0'\n"
    )
    runner.chmod(0o755)

    from mad.evalharness import CorpusEntry

    entry = CorpusEntry(
        id="x",
        disassembly=package / "sources" / "mod.move",
        low_level=package / "sources" / "mod.move",
        original_package=package,
    )
    decompiled = "module 0x1::target { fun f() { /* decompiled marker */ } }"
    outcome = run_unit_tests(entry, decompiled, ToolchainConfig(command=str(runner)))
    assert outcome.status == "ok"
    assert (outcome.passed, outcome.failed) == (3, 0)

import json
from fractions import Fraction

import pytest

from mddag.experiment import (
    CampaignConfig,
    CampaignError,
    bucket_of,
    config_from_dict,
    load_config,
    run_campaign,
    run_single,
    write_csv,
)
from mddag.workload import EmpiricalSpec, ExecTimeSampler


SMALL = CampaignConfig(n_runs=20, base_seed=100)


class TestBucketing:
    def test_nearest_multiple(self):
        assert bucket_of(Fraction(52, 100), Fraction(5, 100)) == Fraction(50, 100)

    def test_tie_rounds_up(self):
        assert bucket_of(Fraction(525, 1000), Fraction(5, 100)) == Fraction(55, 100)

    def test_exact_multiple(self):
        assert bucket_of(Fraction(1, 2), Fraction(5, 100)) == Fraction(1, 2)


class TestConfig:
    def test_defaults_match_protocol(self):
        cfg = CampaignConfig()
        assert cfg.n_runs == 5000
        assert cfg.cores == 7
        assert cfg.duration_us == 3_000_000
        assert cfg.policies == ("gedf_rad", "wc_fifo", "rm")

    def test_validation(self):
        with pytest.raises(CampaignError):
            CampaignConfig(n_runs=0)
        with pytest.raises(CampaignError):
            CampaignConfig(bucket_width=0)
        with pytest.raises(CampaignError):
            CampaignConfig(duration_us=0)

    def test_json_round_trip(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"n_runs": 10, "cores": 4, "duration_us": 600000,
                                    "policies": ["gedf_rad", "rm"], "base_seed": 7,
                                    "load_factor": [0.2, 0.8]}))
        cfg = load_config(path)
        assert cfg.n_runs == 10 and cfg.cores == 4
        assert cfg.policies == ("gedf_rad", "rm")
        assert cfg.load_factor == (0.2, 0.8)

    def test_unknown_field_rejected(self):
        with pytest.raises(CampaignError, match="frobnicate"):
            config_from_dict({"n_runs": 5, "frobnicate": True})


class TestCampaign:
    def test_trivially_feasible_single_run(self):
        cfg = CampaignConfig(n_runs=1, load_factor=(0.1, 0.1), base_seed=3)
        summary = run_campaign(cfg)
        rows = summary.bucket_rows()
        assert len(rows) == 3  # one bucket per policy
        assert all(r.acceptance_ratio == 1 for r in rows)

    def test_workload_identical_across_policies(self):
        summary = run_campaign(SMALL)
        by_run = {}
        for r in summary.records:
            by_run.setdefault(r.run_id, set()).add(r.workload_hash)
        assert all(len(hashes) == 1 for hashes in by_run.values())
        assert len(by_run) == SMALL.n_runs

    def test_bucket_counts_sum_to_n_runs(self):
        summary = run_campaign(SMALL)
        for policy in SMALL.policies:
            assert sum(b.runs for b in summary.bucket_rows() if b.policy == policy) \
                == SMALL.n_runs

    def test_rerun_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        write_csv(run_campaign(SMALL), a)
        write_csv(run_campaign(SMALL), b)
        assert (a / "runs.csv").read_bytes() == (b / "runs.csv").read_bytes()
        assert (a / "summary.csv").read_bytes() == (b / "summary.csv").read_bytes()

    def test_parallel_equals_sequential(self, tmp_path):
        a, b = tmp_path / "seq", tmp_path / "par"
        write_csv(run_campaign(SMALL, jobs=1), a)
        write_csv(run_campaign(SMALL, jobs=3), b)
        assert (a / "runs.csv").read_bytes() == (b / "runs.csv").read_bytes()
        assert (a / "summary.csv").read_bytes() == (b / "summary.csv").read_bytes()

    def test_errors_carry_run_index(self):
        bad_sampler = ExecTimeSampler({1: EmpiricalSpec((1,))})  # covers one vertex only
        with pytest.raises(CampaignError, match="run 0"):
            run_single(CampaignConfig(n_runs=1), 0, sampler=bad_sampler)


class TestCsvFormat:
    def test_headers_and_formatting(self, tmp_path):
        summary = run_campaign(CampaignConfig(n_runs=5, base_seed=50))
        runs_path, summary_path = write_csv(summary, tmp_path)
        runs_lines = open(runs_path).read().split("\n")
        assert runs_lines[0] == "policy,run_id,seed,realized_norm_util,bucket,misses,passed"
        assert runs_lines[-1] == ""  # trailing LF
        # 3 policies x 5 runs + header + trailing empty
        assert len(runs_lines) == 3 * 5 + 2

        summary_lines = open(summary_path).read().split("\n")
        assert summary_lines[0] == "policy,bucket,runs,passes,acceptance_ratio"
        for line in summary_lines[1:-1]:
            policy, bucket, runs, passes, ratio = line.split(",")
            assert len(bucket.split(".")[1]) == 6
            assert len(ratio.split(".")[1]) == 6
            assert int(passes) <= int(runs)

    def test_ratio_six_decimals(self, tmp_path):
        from mddag.experiment import BucketRow, CampaignSummary, _fmt
        assert _fmt(Fraction(17, 20)) == "0.850000"

    def test_policies_sorted(self, tmp_path):
        summary = run_campaign(CampaignConfig(n_runs=3, base_seed=9))
        _, summary_path = write_csv(summary, tmp_path)
        policies = [line.split(",")[0] for line in
                    open(summary_path).read().strip().split("\n")[1:]]
        assert policies == sorted(policies)

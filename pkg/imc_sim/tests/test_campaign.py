import numpy as np
import pytest

from imc_sim.campaign import (
    CSV_COLUMNS,
    RunRecord,
    Simulator,
    aggregate,
    campaign_cells,
    degradations,
    degradation_not_decreasing,
    emit_plot_data,
    format_table,
    input_seed,
    paired_not_worse,
    percentile,
    read_records_csv,
    run_campaign,
    tradeoff_table,
    write_records_csv,
    write_summaries_csv,
    write_summaries_json,
)
from imc_sim.errors import ConfigError, EmptyInput, MemoryFit, MissingBaseline
from imc_sim.storage import ArtifactStore
from imc_sim.tests.conftest import with_campaign


def make_record(ql, run, energy, metric="", value=None, value2=None, bench="b", mcu="m"):
    return RunRecord(
        benchmark=bench,
        mcu=mcu,
        ql=ql,
        seed=run,
        run=run,
        energy_total_pJ=energy,
        energy_compute_pJ=energy,
        energy_persist_pJ=0.0,
        energy_storage_pJ=0.0,
        cycles=0,
        mem_accesses=0,
        bits_written=0,
        metric=metric,
        qor_value=value,
        qor_value2=value2,
    )


def edge_config(cfg, **values):
    values = {"benchmarks": ["edge"], "mcus": {"edge": ["MSP430S"]}, "qls": ["Q0", "Q4"],
              "runs": 3, **values}
    return with_campaign(cfg, **values)


class TestRunRecord:
    def test_energy_must_sum(self):
        with pytest.raises(ValueError):
            RunRecord(
                benchmark="b", mcu="m", ql="Q0", seed=0, run=0,
                energy_total_pJ=10.0, energy_compute_pJ=1.0, energy_persist_pJ=1.0,
                energy_storage_pJ=1.0, cycles=0, mem_accesses=0, bits_written=0,
            )

    def test_qor_rebuilt_from_columns(self):
        record = make_record("Q1", 0, 1.0, metric="PrecisionRecall", value=0.9, value2=0.8)
        assert (record.qor.value, record.qor.value2) == (0.9, 0.8)
        assert make_record("Q1", 0, 1.0).qor is None


class TestInputSeed:
    def test_depends_on_benchmark_and_run(self):
        assert input_seed(1, "fft", 0) == input_seed(1, "fft", 0)
        assert input_seed(1, "fft", 0) != input_seed(1, "fft", 1)
        assert input_seed(1, "fft", 0) != input_seed(1, "codec", 0)
        assert input_seed(1, "fft", 0) != input_seed(2, "fft", 0)


class TestRunOnce:
    def test_q0_run_has_perfect_qor(self, sim_config):
        sim = Simulator(sim_config)
        record, _ = sim.run_once("fft", "MSP430L", "Q0", 0)
        assert record.metric == "ARE"
        assert record.qor_value == 0.0
        assert record.corrupted_bits == 0

    def test_ql_cells_share_input_seed(self, sim_config):
        sim = Simulator(sim_config)
        q0, _ = sim.run_once("edge", "MSP430S", "Q0", 4)
        q4, _ = sim.run_once("edge", "MSP430S", "Q4", 4)
        assert q0.seed == q4.seed
        assert q4.energy_total_pJ < q0.energy_total_pJ

    def test_memory_fit(self, sim_config):
        with pytest.raises(MemoryFit):
            Simulator(sim_config).run_once("fft", "MSP430G", "Q0", 0)


class TestRunCampaign:
    def test_only_writes_reaches_storage_limit(self, sim_config):
        sim_config.mcus["M33"].cycles_per_mem_access = 0.0
        cfg = with_campaign(
            sim_config, benchmarks=["only_writes"], mcus={"only_writes": ["M33"]},
            qls=["Q0", "Q2", "Q4"], runs=2,
        )
        summaries = {s.ql: s for s in aggregate(run_campaign(cfg))}
        assert summaries["Q0"].saving_pct == 0.0
        assert summaries["Q2"].saving_pct == pytest.approx(100 * (1 - 74 / 167))
        assert summaries["Q4"].saving_pct == pytest.approx(100 * (1 - 43 / 167))
        assert summaries["Q4"].metric == ""
        assert summaries["Q4"].qor_mean is None

    def test_records_are_sorted_and_complete(self, sim_config):
        records = run_campaign(edge_config(sim_config))
        assert len(records) == 2 * 3
        assert records == sorted(records, key=RunRecord.sort_key)
        assert all(r.qor_value2 is not None for r in records)

    def test_repeatable(self, sim_config):
        cfg = edge_config(sim_config)
        assert run_campaign(cfg) == run_campaign(cfg)

    def test_worker_count_does_not_change_records(self, sim_config):
        sequential = run_campaign(edge_config(sim_config, workers=1))
        parallel = run_campaign(edge_config(sim_config, workers=2))
        assert [r.csv_row() for r in parallel] == [r.csv_row() for r in sequential]

    def test_pair_that_does_not_fit_stops_campaign(self, sim_config):
        cfg = with_campaign(sim_config, benchmarks=["fft"], mcus={"fft": ["MSP430G"]}, runs=1)
        with pytest.raises(MemoryFit):
            run_campaign(cfg)

    def test_unlisted_benchmark_uses_every_mcu(self, sim_config):
        cfg = with_campaign(sim_config, benchmarks=["only_writes"], mcus={})
        assert len(campaign_cells(cfg)) == 7

    def test_default_cells_fit_memory(self, sim_config):
        sim = Simulator(sim_config)
        for bench, mcu in campaign_cells(sim_config):
            assert sim.benchmark(bench).footprint_bytes <= sim.mcus.get(mcu).main_memory_bytes


class TestAggregate:
    def test_energy_statistics(self):
        records = [make_record("Q0", i, e) for i, e in enumerate([2.0, 4.0, 6.0])]
        (summary,) = aggregate(records)
        assert summary.energy_mean_pJ == pytest.approx(4.0)
        assert summary.energy_std_pJ == pytest.approx(1.633, abs=1e-3)
        assert (summary.energy_p5_pJ, summary.energy_p95_pJ) == (2.0, 6.0)
        assert summary.saving_pct == 0.0

    def test_saving_against_baseline(self):
        records = [make_record("Q0", 0, 10.0), make_record("Q3", 0, 6.0)]
        summaries = {s.ql: s for s in aggregate(records)}
        assert summaries["Q3"].saving_pct == pytest.approx(40.0)

    def test_missing_baseline(self):
        with pytest.raises(MissingBaseline):
            aggregate([make_record("Q4", 0, 1.0)])

    def test_qor_statistics_and_threshold(self):
        records = [make_record("Q0", i, 1.0, "RMSE", 0.0) for i in range(4)]
        records += [make_record("Q4", i, 0.5, "RMSE", v) for i, v in enumerate([1.0, 3.0, 9.0, 11.0])]
        summaries = {s.ql: s for s in aggregate(records, {"RMSE": 8.0})}
        q4 = summaries["Q4"]
        assert q4.metric == "RMSE"
        assert q4.qor_mean == pytest.approx(6.0)
        assert q4.degradation_mean == pytest.approx(6.0)
        assert q4.beyond_threshold_frac == 0.5
        assert summaries["Q0"].beyond_threshold_frac == 0.0

    def test_percentile(self):
        assert percentile(range(1, 101), 5) == 5.0
        assert percentile(range(1, 101), 95) == 95.0
        with pytest.raises(EmptyInput):
            percentile([], 50)


class TestTradeoff:
    def setup_method(self):
        energies = {"Q0": 10.0, "Q1": 8.0, "Q2": 7.0, "Q3": 6.0, "Q4": 5.0}
        qors = {"Q0": 0.0, "Q1": 0.1, "Q2": 0.2, "Q3": 0.4, "Q4": 0.8}
        self.records = [
            make_record(ql, run, e, "ARE", qors[ql] * (1 + run))
            for ql, e in energies.items()
            for run in range(3)
        ]

    def test_plot_data_files(self, tmp_path):
        store = ArtifactStore(tmp_path)
        rows = tradeoff_table(aggregate(self.records))
        assert emit_plot_data(rows, store) == ["tradeoff_b_m.csv"]
        lines = store.get("tradeoff_b_m.csv").decode().splitlines()
        assert lines[0] == "ql,saving_pct,qor_mean,qor_p5,qor_p95"
        assert len(lines) == 6
        assert lines[1].startswith("Q0,0.0,")
        assert lines[5].startswith("Q4,50.0,")

    def test_table_lists_every_cell(self):
        text = format_table(tradeoff_table(aggregate(self.records)))
        assert len(text.splitlines()) == 2 + 5


class TestOutput:
    def test_records_csv_round_trip(self, sim_config, tmp_path):
        records = run_campaign(edge_config(sim_config, runs=2))
        store = ArtifactStore(tmp_path)
        path = write_records_csv(records, store)
        assert path.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)
        loaded = read_records_csv(path)
        assert [r.csv_row() for r in loaded] == [r.csv_row() for r in records]

    def test_bad_header(self, tmp_path):
        path = tmp_path / "records.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ConfigError):
            read_records_csv(path)

    def test_missing_records_file(self, tmp_path):
        with pytest.raises(ConfigError):
            read_records_csv(tmp_path / "none.csv")

    def test_summaries(self, tmp_path):
        store = ArtifactStore(tmp_path)
        summaries = aggregate([make_record("Q0", 0, 1.0), make_record("Q4", 0, 0.5)])
        write_summaries_csv(summaries, store)
        write_summaries_json(summaries, store)
        assert len(store.get("summary.csv").decode().splitlines()) == 3
        assert b'"saving_pct": 50.0' in store.get("summary.json")


def _are_records(by_ql: dict[str, list[float]]) -> list[RunRecord]:
    return [
        make_record(ql, run, 1.0, "ARE", value)
        for ql, values in by_ql.items()
        for run, value in enumerate(values)
    ]


class TestProperties:
    def test_identical_samples_are_not_worse(self):
        assert paired_not_worse([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])

    def test_clearly_worse(self):
        a = [5.0, 5.2, 4.9, 5.1, 5.3, 4.8]
        b = [1.0, 1.1, 0.9, 1.2, 1.0, 0.8]
        assert not paired_not_worse(a, b)
        assert paired_not_worse(b, a)

    def test_increasing_degradation(self):
        records = _are_records({
            "Q1": [0.0, 0.01, 0.0, 0.02, 0.01],
            "Q2": [0.05, 0.04, 0.06, 0.05, 0.07],
            "Q3": [0.2, 0.25, 0.18, 0.22, 0.3],
            "Q4": [0.6, 0.7, 0.55, 0.65, 0.8],
        })
        assert degradation_not_decreasing(records, "b", "m")

    def test_decreasing_degradation_is_flagged(self):
        records = _are_records({
            "Q1": [0.5, 0.6, 0.55, 0.52, 0.58],
            "Q2": [0.1, 0.12, 0.09, 0.11, 0.1],
            "Q3": [0.2, 0.25, 0.18, 0.22, 0.3],
            "Q4": [0.6, 0.7, 0.55, 0.65, 0.8],
        })
        assert not degradation_not_decreasing(records, "b", "m")

    def test_all_zero_degradation_passes(self):
        records = _are_records({ql: [0.0] * 4 for ql in ("Q1", "Q2", "Q3", "Q4")})
        assert degradation_not_decreasing(records, "b", "m")


@pytest.mark.slow
class TestStatistical:
    def test_edge_degradation_grows_with_error_rate(self, sim_config):
        cfg = edge_config(sim_config, qls=["Q0", "Q1", "Q2", "Q3", "Q4"], runs=40)
        records = run_campaign(cfg)
        assert degradation_not_decreasing(records, "edge", "MSP430S")
        summaries = {s.ql: s for s in aggregate(records)}
        savings = [summaries[ql].saving_pct for ql in ("Q0", "Q1", "Q2", "Q3", "Q4")]
        assert savings == sorted(savings)

    def test_codec_q4_mean_rmse_exceeds_q0(self, sim_config):
        cfg = with_campaign(
            sim_config, benchmarks=["codec"], mcus={"codec": ["MSP430S"]}, qls=["Q0", "Q4"], runs=30,
        )
        summaries = {s.ql: s for s in aggregate(run_campaign(cfg))}
        assert summaries["Q0"].qor_mean == 0.0
        assert summaries["Q4"].qor_mean > 0.0
        assert 0.0 < summaries["Q4"].saving_pct < 100.0
        assert np.isfinite(summaries["Q4"].energy_std_pJ)

    def test_fft_unusable_fraction_grows_with_error_rate(self, sim_config):
        qls = ["Q0", "Q1", "Q2", "Q3", "Q4"]
        cfg = with_campaign(sim_config, benchmarks=["fft"], mcus={"fft": ["MSP430S"]}, qls=qls, runs=200)
        records = run_campaign(cfg)
        summaries = {s.ql: s for s in aggregate(records, cfg.campaign.thresholds)}
        fractions = [summaries[ql].beyond_threshold_frac for ql in qls[1:]]
        assert fractions == sorted(fractions)
        assert fractions[1] > 0.0
        assert fractions[3] > 0.5
        assert degradation_not_decreasing(records, "fft", "MSP430S")

    def test_nn_agreement_from_q1_to_q4(self, sim_config):
        names = ["nn_q16", "nn_q32", "nn_f16"]
        cfg = with_campaign(
            sim_config, benchmarks=names, mcus={name: ["M33"] for name in names},
            qls=["Q0", "Q1", "Q2", "Q3", "Q4"], runs=200,
        )
        records = run_campaign(cfg)
        summaries = {(s.benchmark, s.ql): s for s in aggregate(records)}
        for name in names:
            assert summaries[(name, "Q1")].qor_mean >= 0.99
            # ten classes: chance agreement is 0.1
            assert summaries[(name, "Q4")].qor_mean <= 0.3
            assert degradation_not_decreasing(records, name, "M33")

        # larger inputs are not worse where errors are sparse, and both fail at Q4
        for ql in ("Q2", "Q3"):
            assert paired_not_worse(
                degradations(records, "nn_q32", "M33", ql), degradations(records, "nn_q16", "M33", ql)
            )
        gap = summaries[("nn_q32", "Q4")].qor_mean - summaries[("nn_q16", "Q4")].qor_mean
        assert abs(gap) < 0.15

import math

import pytest

from imc_sim.benchmarks import FftBenchmark
from imc_sim.config import cost_model, load_config, mcu_catalog
from imc_sim.energy import (
    Capacitor,
    CostModel,
    CostReport,
    EnergyBreakdown,
    McuCatalog,
    McuProfile,
    capacitor_sizing_plan,
    recharge_time_s,
    savings_vs_baseline,
    size_capacitor,
    total_energy,
)
from imc_sim.errors import (
    ConfigError,
    InconsistentCost,
    InvalidVoltages,
    NeverCharges,
    UnknownMcu,
    ZeroBaseline,
)
from imc_sim.nvm import QualityCatalog
from imc_sim.runtime import golden_run

ONE_BYTE = CostReport(cycles=0, mem_accesses=1, bits_written=8)


class TestTotalEnergy:
    def setup_method(self):
        self.mcus = McuCatalog()
        self.qls = QualityCatalog()

    def test_single_byte_on_m33(self):
        m33 = self.mcus.get("M33")
        q0 = total_energy(ONE_BYTE, m33, self.qls.get("Q0"))
        q4 = total_energy(ONE_BYTE, m33, self.qls.get("Q4"))
        assert q4.e_mcu_persist_pJ == pytest.approx(12.0)
        assert q4.e_storage_pJ == pytest.approx(344.0)
        assert q0.e_total_pJ == pytest.approx(1348.0)
        assert savings_vs_baseline(q4, q0) == pytest.approx(1 - 356 / 1348)

    def test_breakdown_sums(self):
        cost = CostReport(cycles=1000, mem_accesses=10, bits_written=80)
        e = total_energy(cost, self.mcus.get("MSP430G"), self.qls.get("Q2"))
        assert e.e_total_pJ == e.e_mcu_compute_pJ + e.e_mcu_persist_pJ + e.e_storage_pJ
        assert e.e_mcu_compute_pJ == pytest.approx(503 * 1000)

    def test_inconsistent_cost(self):
        with pytest.raises(InconsistentCost):
            total_energy(CostReport(0, 2, 15), self.mcus.get("M4"), self.qls.get("Q1"))

    def test_zero_baseline(self):
        with pytest.raises(ZeroBaseline):
            savings_vs_baseline(EnergyBreakdown(), EnergyBreakdown.zero())

    def test_savings_vs_itself(self):
        e = EnergyBreakdown(1.0, 2.0, 3.0)
        assert savings_vs_baseline(e, e) == 0.0

    def test_breakdown_addition(self):
        total = EnergyBreakdown(1.0, 2.0, 3.0) + EnergyBreakdown(0.5, 0.5, 0.5)
        assert total.e_total_pJ == pytest.approx(7.5)
        assert EnergyBreakdown(2.0, 2.0, 4.0).scaled(0.5).e_total_pJ == pytest.approx(4.0)

    def test_storage_only_limit(self):
        mcu = McuProfile("ideal", 16, 8, 100.0, cycles_per_mem_access=0.0)
        q0 = self.qls.baseline
        for ql in self.qls:
            e = total_energy(ONE_BYTE, mcu, ql)
            expected = 1 - ql.write_energy_per_bit_pJ / 167
            assert math.isclose(savings_vs_baseline(e, total_energy(ONE_BYTE, mcu, q0)), expected,
                                rel_tol=1e-9, abs_tol=1e-12)

    def test_upper_bound_ordered_by_active_power(self):
        q0, q4 = self.qls.get("Q0"), self.qls.get("Q4")
        savings = {
            mcu.name: savings_vs_baseline(total_energy(ONE_BYTE, mcu, q4), total_energy(ONE_BYTE, mcu, q0))
            for mcu in self.mcus
        }
        by_power = sorted(self.mcus, key=lambda m: m.active_power_uW_per_MHz)
        for lower, higher in zip(by_power, by_power[1:]):
            if higher.active_power_uW_per_MHz > lower.active_power_uW_per_MHz:
                assert savings[lower.name] > savings[higher.name]
        assert max(savings, key=savings.get) == "M33"
        assert min(savings, key=savings.get) == "MSP430G"
        assert savings["M33"] > 0.65

    def test_more_compute_dilutes_savings(self):
        mcu = self.mcus.get("MSP430S")
        q0, q4 = self.qls.get("Q0"), self.qls.get("Q4")
        previous = None
        for cycles in (0, 10, 100, 1000, 10_000):
            cost = CostReport(cycles=cycles, mem_accesses=64, bits_written=512)
            saving = savings_vs_baseline(total_energy(cost, mcu, q4), total_energy(cost, mcu, q0))
            if previous is not None:
                assert saving < previous
            previous = saving


class TestCostModel:
    def test_unlisted_ops_cost_one_cycle(self):
        model = CostModel({"mac": 2})
        mcu = McuProfile("plain", 16, 8, 10.0)
        assert model.cycles({"mac": 10, "add": 5}, mcu, "micro") == 25

    def test_isa_factor_applies_per_workload(self):
        m0 = McuCatalog().get("M0")
        model = CostModel({"mac": 2})
        assert model.cycles({"mac": 10}, m0, "nn_quant") == 400
        assert model.cycles({"mac": 10}, m0, "signal") == 20

    def test_accesses_round_up(self):
        mcu = McuProfile("wide", 16, 8, 10.0, access_width_bits=32)
        report = CostModel().report({}, [33, 64], mcu, "micro")
        assert report.mem_accesses == 2 + 2
        assert report.bits_written == 4 * 32

    def test_fft_saving_on_msp430g_is_small(self):
        cfg = load_config()
        mcu = mcu_catalog(cfg).get("MSP430G")
        qls = QualityCatalog()
        bench = FftBenchmark(n=256)
        golden = golden_run(bench.pipeline(1), mcu, qls.baseline, cost_model(cfg))
        saving = savings_vs_baseline(
            total_energy(golden.cost, mcu, qls.get("Q4")),
            total_energy(golden.cost, mcu, qls.get("Q0")),
        )
        assert 0.0 < saving < 0.05


class TestMcuCatalog:
    def test_unknown_mcu(self):
        with pytest.raises(UnknownMcu):
            McuCatalog().get("Z80")

    def test_zero_active_power_rejected(self):
        with pytest.raises(ConfigError):
            McuProfile("dead", 16, 8, 0.0)

    def test_memory_in_bytes(self):
        assert McuCatalog().get("MSP430L").main_memory_bytes == 2048


class TestCapacitor:
    def test_sizing_round_trip_covers_energy(self):
        for energy in (1.0, 1234.5, 8.2e6):
            cap = Capacitor(size_capacitor(energy, 3.0, 2.2), 3.0, 2.2)
            assert cap.covers(energy)
            assert cap.usable_energy_pJ == pytest.approx(energy)

    def test_margin_scales_capacitance(self):
        assert size_capacitor(100.0, 3.0, 2.2, margin=2.0) == pytest.approx(
            2 * size_capacitor(100.0, 3.0, 2.2)
        )

    def test_invalid_voltages(self):
        with pytest.raises(InvalidVoltages):
            Capacitor(1.0, 2.0, 2.5)
        with pytest.raises(InvalidVoltages):
            size_capacitor(1.0, 3.0, 0.0)

    def test_drain_and_brown_out(self):
        cap = Capacitor(1.0, 3.0, 2.2)
        cap.fill()
        usable = cap.usable_energy_pJ
        assert cap.drain(usable / 2)
        assert cap.stored_energy_pJ == pytest.approx(usable / 2)
        assert not cap.drain(usable)
        assert cap.v_now == cap.v_off

    def test_add_energy_saturates(self):
        cap = Capacitor(1.0, 3.0, 2.2)
        cap.add_energy(10 * cap.usable_energy_pJ)
        assert cap.v_now == pytest.approx(cap.v_on)

    def test_recharge_time(self):
        cap = Capacitor(1.0, 3.0, 2.2, leak_pW=100.0)
        assert recharge_time_s(cap, 1100.0) == pytest.approx(cap.usable_energy_pJ / 1000.0)
        with pytest.raises(NeverCharges):
            recharge_time_s(cap, 100.0)

    def test_sizing_plan_assigns_smallest_covering_buffer(self):
        plan = capacitor_sizing_plan({"a": 10.0, "b": 50.0, "c": 200.0}, 3.0, 2.2,
                                     leak_pW_per_uF=25.0)
        assert plan.assignment == {"a": "small", "b": "medium", "c": "large"}
        sizes = plan.capacitances_uF()
        assert sizes["small"] < sizes["medium"] < sizes["large"]
        assert plan["small"].leak_pW == 0.0
        assert plan["large"].leak_pW > 0.0
        for task, energy in {"a": 10.0, "b": 50.0, "c": 200.0}.items():
            assert plan.for_task(task).covers(energy)

    def test_smaller_buffer_recharges_faster(self):
        plan = capacitor_sizing_plan({"light": 10.0, "heavy": 1000.0}, 3.0, 2.2)
        assert recharge_time_s(plan["small"], 1e6) < recharge_time_s(plan["large"], 1e6)

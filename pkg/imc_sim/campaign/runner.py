"""
Monte Carlo sweeps over (benchmark, MCU, quality level, run index).

Every random draw is keyed by the master seed and the cell coordinates, so the
record set does not depend on worker count or completion order.
"""
import logging
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from imc_sim.benchmarks import Benchmark, create_benchmark
from imc_sim.campaign.records import RunRecord
from imc_sim.config.catalogs import (
    cost_model,
    failure_schedule,
    harvest_model,
    mcu_catalog,
    quality_catalog,
    segment_catalog,
)
from imc_sim.config.schemas import SimConfig
from imc_sim.energy.capacitor import CapacitorPlan, capacitor_sizing_plan
from imc_sim.energy.mcu import McuProfile
from imc_sim.errors import MemoryFit
from imc_sim.nvm.injection import WriteStream
from imc_sim.runtime.executor import GoldenResult, RuntimeContext, golden_run, run_pipeline
from imc_sim.runtime.tasks import TaskPipeline

logger = logging.getLogger(__name__)


def input_seed(master_seed: int, benchmark: str, run: int) -> int:
    """Input seed of one run; shared by every MCU and QL cell of the benchmark."""
    seq = np.random.SeedSequence(
        entropy=int(master_seed),
        spawn_key=(zlib.crc32(benchmark.encode("utf-8")), int(run)),
    )
    return int(seq.generate_state(1)[0])


def check_memory_fit(benchmark: Benchmark, mcu: McuProfile) -> None:
    if benchmark.footprint_bytes > mcu.main_memory_bytes:
        logger.warning(
            "%s needs %d B of main memory, %s has %d B",
            benchmark.name, benchmark.footprint_bytes, mcu.name, mcu.main_memory_bytes,
        )
        raise MemoryFit(
            f"benchmark '{benchmark.name}' ({benchmark.footprint_bytes} B) does not fit "
            f"MCU '{mcu.name}' ({mcu.main_memory_bytes} B main memory)"
        )


@dataclass
class GoldenEntry:
    pipeline: TaskPipeline
    result: GoldenResult


class Simulator:
    """
    Model objects built once from a config, plus per-process caches.

    Golden runs are cached per (benchmark, input seed, MCU) and shared by every
    QL cell; an entry is written once and never modified.
    """

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.qualities = quality_catalog(cfg)
        self.segments = segment_catalog(cfg)
        self.mcus = mcu_catalog(cfg)
        self.cost_model = cost_model(cfg)
        self.harvest = harvest_model(cfg)
        self.schedule = failure_schedule(cfg)
        self._benchmarks: dict[str, Benchmark] = {}
        self._golden: dict[tuple[str, int, str], GoldenEntry] = {}

    def benchmark(self, name: str) -> Benchmark:
        if name not in self._benchmarks:
            self._benchmarks[name] = create_benchmark(name, self.cfg.benchmark_settings(name))
        return self._benchmarks[name]

    def golden(self, benchmark: Benchmark, seed: int, mcu: McuProfile) -> GoldenEntry:
        key = (benchmark.name, seed, mcu.name)
        if key not in self._golden:
            pipeline = benchmark.pipeline(seed)
            result = golden_run(pipeline, mcu, self.qualities.baseline, self.cost_model)
            self._golden[key] = GoldenEntry(pipeline, result)
        return self._golden[key]

    def capacitor_plan(self, golden: GoldenResult) -> CapacitorPlan:
        """Fresh (uncharged) buffers sized from the golden Q0 per-task energies."""
        c = self.cfg.capacitor
        return capacitor_sizing_plan(
            golden.worst_case_energy_pJ(),
            v_on=c.v_on,
            v_off=c.v_off,
            margin=c.margin,
            leak_pW_per_uF=c.leak_pW_per_uF,
        )

    def run_once(
        self, benchmark: str, mcu: str, ql: str, run: int
    ) -> tuple[RunRecord, dict[str, np.ndarray]]:
        """
        Execute one cell's run.

        Returns:
            (record, committed buffers)
        """
        bench = self.benchmark(benchmark)
        profile = self.mcus.get(mcu)
        level = self.qualities.get(ql)
        check_memory_fit(bench, profile)

        seed = input_seed(self.cfg.campaign.seed, benchmark, run)
        golden = self.golden(bench, seed, profile)
        ctx = RuntimeContext(
            mcu=profile,
            segments=self.segments.with_quality(level),
            cost_model=self.cost_model,
            injection_mode=self.cfg.injection_mode,
            literal_baseline=self.cfg.nvm.literal_baseline_wer,
            drain_mode=self.cfg.runtime.drain_mode,
            recharge=self.cfg.runtime.recharge,
        )
        stream = WriteStream(self.cfg.campaign.seed, benchmark, mcu, level.id.value, run)
        buffers, trace = run_pipeline(
            golden.pipeline,
            self.capacitor_plan(golden.result),
            self.harvest,
            ctx,
            stream,
            schedule=self.schedule,
        )
        qor = bench.evaluate(buffers, golden.result.buffers)
        record = RunRecord.build(
            benchmark,
            mcu,
            level.id.value,
            seed,
            run,
            trace.energy,
            trace.cost,
            qor,
            failures=trace.power_failures,
            recharges=trace.recharges,
            sim_time_s=trace.sim_time_s,
            corrupted_bits=trace.corrupted_bits,
        )
        return record, buffers

    def run_group(self, benchmark: str, mcu: str, run: int, qls: list[str]) -> list[RunRecord]:
        """All QL cells of one (benchmark, MCU, run); they share one golden run."""
        return [self.run_once(benchmark, mcu, ql, run)[0] for ql in qls]


def run_once(
    cfg: SimConfig, benchmark: str, mcu: str, ql: str, run: int
) -> tuple[RunRecord, dict[str, np.ndarray]]:
    return Simulator(cfg).run_once(benchmark, mcu, ql, run)


def campaign_cells(cfg: SimConfig) -> list[tuple[str, str]]:
    """(benchmark, MCU) pairs of the campaign; all catalog MCUs when none are listed."""
    cells = []
    for bench in cfg.campaign.benchmarks:
        names = cfg.campaign.mcus.get(bench)
        if names is None:
            names = [m.name for m in mcu_catalog(cfg)]
        cells.extend((bench, name) for name in names)
    return cells


# Per-process simulator for pool workers
_worker: Simulator | None = None


def _init_worker(cfg: SimConfig) -> None:
    global _worker
    _worker = Simulator(cfg)


def _run_group(benchmark: str, mcu: str, run: int, qls: list[str]) -> list[RunRecord]:
    return _worker.run_group(benchmark, mcu, run, qls)


def run_campaign(cfg: SimConfig) -> list[RunRecord]:
    """
    Run every (benchmark, MCU, QL, run) of the campaign.

    Raises:
        MemoryFit: before any run, if a selected pair does not fit.

    Returns:
        Records sorted by (benchmark, mcu, ql, run).
    """
    sim = Simulator(cfg)
    cells = campaign_cells(cfg)
    for bench, mcu in cells:
        check_memory_fit(sim.benchmark(bench), sim.mcus.get(mcu))

    qls = list(cfg.campaign.qls)
    runs = cfg.campaign.runs
    jobs = [(bench, mcu, run) for bench, mcu in cells for run in range(runs)]
    logger.info(
        "campaign: %d cells x %d QLs x %d runs, %d workers",
        len(cells), len(qls), runs, cfg.campaign.workers,
    )

    records: list[RunRecord] = []
    if cfg.campaign.workers <= 1:
        for bench, mcu in cells:
            logger.info("cell %s/%s", bench, mcu)
            for run in range(runs):
                records.extend(sim.run_group(bench, mcu, run, qls))
    else:
        with ProcessPoolExecutor(
            max_workers=cfg.campaign.workers, initializer=_init_worker, initargs=(cfg,)
        ) as pool:
            futures = [pool.submit(_run_group, bench, mcu, run, qls) for bench, mcu, run in jobs]
            for future in futures:
                records.extend(future.result())

    records.sort(key=RunRecord.sort_key)
    logger.info("campaign: %d records", len(records))
    return records

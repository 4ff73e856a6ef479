"""
Command-line entry point.

Subcommands:
    characterize    print the quality-level and MCU catalogs
    run             execute one cell run, print its record, dump committed buffers
    campaign        run the configured sweep and write records, summaries, plot data
    tradeoff        re-aggregate a records CSV into the trade-off table
    size-capacitor  print the capacitor plan of a benchmark on an MCU

Exit codes: 0 success, 1 configuration error, 2 runtime or model error.
"""
import argparse
import json
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from imc_sim.campaign import (
    Simulator,
    aggregate,
    emit_plot_data,
    format_table,
    input_seed,
    read_records_csv,
    run_campaign,
    tradeoff_table,
    write_records_csv,
    write_summaries_csv,
    write_summaries_json,
)
from imc_sim.config import (
    CliOverrides,
    SimConfig,
    load_config,
    mcu_catalog,
    merge_config,
    quality_catalog,
)
from imc_sim.energy.capacitor import recharge_time_s
from imc_sim.errors import ConfigError, ModelError, NeverCharges
from imc_sim.nvm.quality import read_energy
from imc_sim.storage import ArtifactStore

logger = logging.getLogger("imc_sim")

EXIT_OK, EXIT_CONFIG, EXIT_MODEL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 1)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _names(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _extend(values: list[list[str]] | None) -> list[str] | None:
    if not values:
        return None
    return [name for group in values for name in group]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="config file (replaces the built-in defaults)")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v INFO, -vv DEBUG")
    common.add_argument("--benchmark", action="append", type=_names, help="benchmark name(s)")
    common.add_argument("--mcu", action="append", type=_names, help="MCU name(s)")
    common.add_argument("--ql", action="append", type=_names, help="quality level(s)")
    common.add_argument("--runs", type=int, help="runs per cell")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--mode", choices=["FlipNew", "RetainOld"], help="injection mode")
    common.add_argument("--out", help="output directory")
    common.add_argument("--workers", type=int, help="worker processes")

    parser = _Parser(prog="imc_sim", description="STT-MRAM intermittent-computing simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("characterize", parents=[common], help="print QL and MCU catalogs")
    run = sub.add_parser("run", parents=[common], help="execute one run of one cell")
    run.add_argument("--run", type=int, default=0, dest="run_index", help="run index")
    sub.add_parser("campaign", parents=[common], help="run the configured sweep")
    tradeoff = sub.add_parser("tradeoff", parents=[common], help="trade-off table from records")
    tradeoff.add_argument("--records", help="records CSV (default <out>/records.csv)")
    sub.add_parser("size-capacitor", parents=[common], help="capacitor plan for one benchmark")
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s"
    )


def _load(args) -> SimConfig:
    overrides = CliOverrides(
        ql=_extend(args.ql),
        mcu=_extend(args.mcu),
        benchmark=_extend(args.benchmark),
        runs=args.runs,
        seed=args.seed,
        mode=args.mode,
        out=args.out,
        workers=args.workers,
    )
    return merge_config(load_config(args.config), overrides)


def _first_cell(cfg: SimConfig) -> tuple[str, str]:
    if not cfg.campaign.benchmarks:
        raise ConfigError("no benchmark selected", key="campaign.benchmarks")
    bench = cfg.campaign.benchmarks[0]
    mcus = cfg.campaign.mcus.get(bench) or [m.name for m in mcu_catalog(cfg)]
    return bench, mcus[0]


def cmd_characterize(cfg: SimConfig, args) -> None:
    qualities = quality_catalog(cfg)
    out = sys.stdout
    out.write("Quality levels\n")
    out.write(f"{'ql':<4} {'wer':>8} {'I_set_uA':>9} {'E_bit_pJ':>9} {'ratio':>6}\n")
    for ql in qualities:
        out.write(
            f"{ql.id.value:<4} {ql.wer:>8.0e} {ql.set_current_uA:>9g} "
            f"{ql.write_energy_per_bit_pJ:>9g} {qualities.consumption_ratio(ql):>6.3f}\n"
        )
    out.write(f"read energy per bit: {read_energy(1, cfg.nvm.read_energy_pJ):g} pJ\n")
    out.write("\nMCUs\n")
    out.write(f"{'mcu':<8} {'clock_MHz':>9} {'memory_KiB':>10} {'uW_per_MHz':>10} {'k':>4} {'w':>3}\n")
    for mcu in mcu_catalog(cfg):
        out.write(
            f"{mcu.name:<8} {mcu.clock_MHz:>9g} {mcu.main_memory_KiB:>10g} "
            f"{mcu.active_power_uW_per_MHz:>10g} {mcu.cycles_per_mem_access:>4g} "
            f"{mcu.access_width_bits:>3d}\n"
        )


def cmd_run(cfg: SimConfig, args) -> None:
    bench, mcu = _first_cell(cfg)
    ql = cfg.campaign.qls[0] if args.ql else "Q0"
    sim = Simulator(cfg)
    record, buffers = sim.run_once(bench, mcu, ql, args.run_index)
    sys.stdout.write(record.model_dump_json() + "\n")

    store = ArtifactStore(Path(cfg.campaign.out) / f"run_{bench}_{mcu}_{ql}_{args.run_index}")
    for name, (kind, array) in sim.benchmark(bench).dumps(buffers).items():
        if kind == "pgm":
            store.save_pgm(f"{name}.pgm", array)
        else:
            store.save_array(f"{name}.txt", array)
    logger.info("committed buffers written to %s", store.base_dir)


def _report(cfg: SimConfig, records, store: ArtifactStore) -> None:
    summaries = aggregate(records, cfg.campaign.thresholds)
    write_summaries_csv(summaries, store)
    write_summaries_json(summaries, store)
    rows = tradeoff_table(summaries)
    emit_plot_data(rows, store)
    sys.stdout.write(format_table(rows))


def cmd_campaign(cfg: SimConfig, args) -> None:
    records = run_campaign(cfg)
    store = ArtifactStore(cfg.campaign.out)
    write_records_csv(records, store)
    _report(cfg, records, store)


def cmd_tradeoff(cfg: SimConfig, args) -> None:
    path = Path(args.records) if args.records else Path(cfg.campaign.out) / "records.csv"
    records = read_records_csv(path)
    _report(cfg, records, ArtifactStore(cfg.campaign.out))


def cmd_size_capacitor(cfg: SimConfig, args) -> None:
    bench_name, mcu_name = _first_cell(cfg)
    sim = Simulator(cfg)
    bench = sim.benchmark(bench_name)
    mcu = sim.mcus.get(mcu_name)
    golden = sim.golden(bench, input_seed(cfg.campaign.seed, bench_name, 0), mcu)
    plan = sim.capacitor_plan(golden.result)
    power_pW = sim.harvest.power_at(0.0)

    capacitors = {}
    for size, cap in plan.capacitors.items():
        try:
            recharge = recharge_time_s(cap, power_pW)
        except NeverCharges:
            recharge = None
        capacitors[size] = {
            "capacitance_uF": cap.capacitance_uF,
            "usable_energy_pJ": cap.usable_energy_pJ,
            "leak_pW": cap.leak_pW,
            "recharge_time_s": recharge,
        }
    data = {
        "benchmark": bench_name,
        "mcu": mcu_name,
        "task_energy_pJ": golden.result.worst_case_energy_pJ(),
        "capacitors": capacitors,
        "assignment": plan.assignment,
    }
    sys.stdout.write(json.dumps(data, indent=2) + "\n")


COMMANDS = {
    "characterize": cmd_characterize,
    "run": cmd_run,
    "campaign": cmd_campaign,
    "tradeoff": cmd_tradeoff,
    "size-capacitor": cmd_size_capacitor,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        cfg = _load(args)
        COMMANDS[args.command](cfg, args)
    except ConfigError as e:
        logger.error("%s", e)
        return EXIT_CONFIG
    except ValidationError as e:
        logger.error("invalid option: %s", e.errors()[0]["msg"])
        return EXIT_CONFIG
    except ModelError as e:
        logger.error("%s", e)
        return EXIT_MODEL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

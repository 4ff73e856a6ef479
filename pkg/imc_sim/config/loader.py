"""
Loading of the sectioned key-value config and merging of command-line overrides.

Section names are dotted paths ([ql.Q0], [mcu.M33], [campaign.mcus], ...); a
key `k` in section `[a.b]` is reported as `a.b.k` in errors.
"""
import configparser
import logging
import os
import re
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from imc_sim.config.schemas import CliOverrides, SimConfig
from imc_sim.errors import ConfigError, UnknownQualityLevel
from imc_sim.nvm.quality import QualityLevelId

logger = logging.getLogger(__name__)

CONFIG_DIR = Path(__file__).parent
DEFAULTS_PATH = CONFIG_DIR / "defaults.ini"
SEED_ENV = "IMC_SIM_SEED"

# section family -> path in SimConfig; "*" is the section's name suffix
_FAMILIES = {
    "ql": ("ql", "*"),
    "segment": ("segments", "*"),
    "mcu": ("mcus", "*"),
    "benchmark": ("benchmarks", "*"),
}
_SINGLE = {
    "nvm": ("nvm",),
    "cost": ("cost",),
    "capacitor": ("capacitor",),
    "harvest": ("harvest",),
    "runtime": ("runtime",),
    "campaign": ("campaign",),
    "campaign.mcus": ("campaign", "mcus"),
    "campaign.thresholds": ("campaign", "thresholds"),
}

_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^\s*([^=:#;\s\[][^=:]*?)\s*[=:]")


def _line_index(text: str) -> tuple[dict[str, int], dict[tuple[str, str], int]]:
    """Line numbers of section headers and of keys inside them."""
    sections, keys = {}, {}
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        match = _SECTION_RE.match(line)
        if match:
            current = match.group(1).strip()
            sections.setdefault(current, lineno)
            continue
        match = _KEY_RE.match(line)
        if match and current is not None:
            keys.setdefault((current, match.group(1).strip()), lineno)
    return sections, keys


def _section_path(section: str, line: int | None) -> tuple[str, ...]:
    if section in _SINGLE:
        return _SINGLE[section]
    family, _, name = section.partition(".")
    if family in _FAMILIES and name:
        top, _ = _FAMILIES[family]
        return (top, name)
    raise ConfigError(f"unknown section [{section}]", key=section, line=line)


def _parse(text: str, source: str) -> tuple[dict, dict, dict[str, int]]:
    """
    Parse config text into a nested dict shaped like SimConfig.

    Returns:
        (data, origins: path tuple -> (dotted key, line), section lines)
    """
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), strict=True
    )
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.ParsingError as e:
        lineno = e.errors[0][0] if e.errors else None
        raise ConfigError(f"syntax error in {source}", line=lineno) from None
    except configparser.DuplicateOptionError as e:
        raise ConfigError(
            f"duplicate key in {source}", key=f"{e.section}.{e.option}", line=e.lineno
        ) from None
    except configparser.DuplicateSectionError as e:
        raise ConfigError(f"duplicate section in {source}", key=e.section, line=e.lineno) from None
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError(f"key outside any section in {source}", line=e.lineno) from None

    section_lines, key_lines = _line_index(text)
    data: dict = {}
    origins: dict[tuple, tuple[str, int | None]] = {}
    section_paths: dict[tuple, tuple[str, int | None]] = {}

    for section in parser.sections():
        path = _section_path(section, section_lines.get(section))
        section_paths[path] = (section, section_lines.get(section))
        node = data
        for part in path:
            node = node.setdefault(part, {})
        for key, value in parser.items(section, raw=True):
            key_path = tuple(key.split(".")) if path[0] == "mcus" else (key,)
            leaf = node
            for part in key_path[:-1]:
                leaf = leaf.setdefault(part, {})
            leaf[key_path[-1]] = value
            origins[path + key_path] = (f"{section}.{key}", key_lines.get((section, key)))
    return data, origins, section_paths


def _locate(loc: tuple, origins: dict, section_paths: dict) -> tuple[str, int | None]:
    for end in range(len(loc), 0, -1):
        if loc[:end] in origins:
            return origins[loc[:end]]
    for end in range(len(loc), 0, -1):
        if loc[:end] in section_paths:
            section, line = section_paths[loc[:end]]
            rest = ".".join(str(p) for p in loc[end:])
            return (f"{section}.{rest}" if rest else section), line
    return ".".join(str(p) for p in loc), None


def parse_config(text: str, source: str = "<config>") -> SimConfig:
    """Parse and validate config text; errors name the offending key and line."""
    data, origins, section_paths = _parse(text, source)
    try:
        return SimConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        key, line = _locate(tuple(first["loc"]), origins, section_paths)
        raise ConfigError(f"{first['msg']} in {source}", key=key, line=line) from None


def load_config(path: str | Path | None = None) -> SimConfig:
    """
    Load a config file (the checked-in defaults when `path` is None).

    A file given here replaces the defaults entirely. The IMC_SIM_SEED
    environment variable overrides the campaign seed from the file.
    """
    path = Path(path) if path is not None else DEFAULTS_PATH
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    logger.info("loading config %s", path)
    config = parse_config(path.read_text(encoding="utf-8"), source=str(path))

    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None and env_seed.strip():
        try:
            seed = int(env_seed)
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got '{env_seed}'") from None
        if seed < 0:
            raise ConfigError(f"{SEED_ENV} must be >= 0, got {seed}")
        logger.info("seed %d from %s", seed, SEED_ENV)
        config.campaign.seed = seed

    # catalogs are validated eagerly so errors surface at load time
    from imc_sim.config.catalogs import validate_catalogs
    validate_catalogs(config)
    return config


def merge_config(
    config: Optional[SimConfig] = None,
    overrides: Optional[CliOverrides] = None,
) -> SimConfig:
    """
    Apply command-line overrides on top of a loaded config.

    Overrides win:
    - --benchmark / --ql / --mcu replace the campaign selections
    - --runs / --seed / --workers / --out replace the campaign values
    - --mode replaces the injection mode
    """
    if config is None:
        config = get_config()
    if overrides is None:
        overrides = CliOverrides()

    for ql in overrides.ql or []:
        try:
            QualityLevelId(ql)
        except ValueError:
            raise UnknownQualityLevel(f"unknown quality level '{ql}'") from None

    campaign = config.campaign.model_copy(deep=True)
    if overrides.benchmark:
        campaign.benchmarks = list(overrides.benchmark)
    if overrides.ql:
        campaign.qls = list(overrides.ql)
    if overrides.mcu:
        campaign.mcus = {name: list(overrides.mcu) for name in campaign.benchmarks}
    for field in ("runs", "seed", "workers", "out"):
        value = getattr(overrides, field)
        if value is not None:
            setattr(campaign, field, value)
    if overrides.mode is not None:
        campaign.injection_mode = overrides.mode

    merged = config.model_copy(update={"campaign": campaign}, deep=True)
    if overrides.model_dump(exclude_none=True):
        logger.info("config overrides: %s", overrides.model_dump(exclude_none=True))
    from imc_sim.config.catalogs import validate_catalogs
    validate_catalogs(merged)
    return merged


# Cached default config (reload on demand)
_cached_config: Optional[SimConfig] = None


def get_config(reload: bool = False) -> SimConfig:
    """Get the cached default config, optionally reloading from disk."""
    global _cached_config
    if _cached_config is None or reload:
        _cached_config = load_config()
    return _cached_config

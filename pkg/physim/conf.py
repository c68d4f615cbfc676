"""
Simulators and cost ledgers for physical matrix-multiplication machines.
"""
import logging
import os
from os.path import expandvars
from pathlib import Path
from types import SimpleNamespace
from typing import Any, Dict

import yaml

from .constants import CONF_DIR, DEFAULT_MAX_STEPS, ENV_SEED


Options = Dict[str, Any]

ENERGY_MODELS = ("kinetic", "optical")
OUTPUT_FORMATS = ("text", "json", "csv")


def default_config() -> Options:
    """Get default options."""
    return {
        "alpha": 1.0,
        "delta": 0.0,
        "density": 0.5,
        "energy_model": "kinetic",
        "eps_meas": 0.0,
        "max_steps": DEFAULT_MAX_STEPS,
        "output_format": "text",
        "s": 1 / 3,
        "seed": 0,
        "trials": 1,
        "workers": 1,
    }


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_count(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value >= 1


def read_config(folder: str = CONF_DIR) -> SimpleNamespace:
    """Read the configuration file."""
    file = Path(expandvars(str(folder))).expanduser() / "config.yml"

    try:
        file_config = yaml.safe_load(file.read_text(encoding="utf-8"))
    except FileNotFoundError:
        file_config = {}
    except yaml.YAMLError:
        logging.warning(f"Ignoring unparsable configuration file {file}")
        file_config = {}
    else:
        if not isinstance(file_config, dict):
            file_config = {}

    defaults = default_config()
    config = {**defaults, **file_config}

    # Ensure every value has a usable type and range, fallback on the default one on any issue
    if not isinstance(config["seed"], int) or isinstance(config["seed"], bool):
        config["seed"] = defaults["seed"]
    if not _is_number(config["alpha"]) or not 0 <= config["alpha"] <= 2:
        config["alpha"] = defaults["alpha"]
    if not _is_number(config["delta"]) or not 0 <= config["delta"] < 0.5:
        config["delta"] = defaults["delta"]
    if not _is_number(config["density"]) or not 0 <= config["density"] <= 1:
        config["density"] = defaults["density"]
    if not _is_number(config["eps_meas"]) or config["eps_meas"] < 0:
        config["eps_meas"] = defaults["eps_meas"]
    if not _is_number(config["s"]) or not 0 <= config["s"] <= 1:
        config["s"] = defaults["s"]
    for key in ("max_steps", "trials", "workers"):
        if not _is_count(config[key]):
            config[key] = defaults[key]
    if config["energy_model"] not in ENERGY_MODELS:
        config["energy_model"] = defaults["energy_model"]
    if config["output_format"] not in OUTPUT_FORMATS:
        config["output_format"] = defaults["output_format"]

    # The environment wins over the file for the seed
    env_seed = os.environ.get(ENV_SEED, "")
    if env_seed:
        try:
            config["seed"] = int(env_seed)
        except ValueError:
            logging.warning(f"Ignoring non-integer {ENV_SEED}={env_seed!r}")

    return SimpleNamespace(**config)


def save_config(config: SimpleNamespace, folder: str = CONF_DIR) -> Path:
    """Save options to the configuration file."""
    file = Path(expandvars(str(folder))).expanduser() / "config.yml"
    file.parent.mkdir(parents=True, exist_ok=True)

    with file.open(mode="w", encoding="utf-8") as fh:
        yaml.safe_dump(vars(config), fh)
    return file


CONF = read_config()

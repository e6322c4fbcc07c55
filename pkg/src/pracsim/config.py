"""INI config-file loading for full simulation setups.

Sections: [timing] (preset and/or explicit *_ns keys), [policy],
[mapping], and [sim] for controller-level knobs (cpi_base,
core_clock_mhz).  Values may be quoted.  Every section is optional;
omitted sections fall back to the defaults (default timing preset,
adaptive policy, stock mapping).
"""

from __future__ import annotations

import configparser
import os

from . import mapping as mapping_mod
from . import policy as policy_mod
from . import timing as timing_mod
from .controller import SimConfig
from .timing import ConfigError

ENV_CONFIG = "PRACSIM_CONFIG"


def load_sim_config(path: str | None = None,
                    timing: timing_mod.TimingParams | None = None,
                    policy: policy_mod.PolicyConfig | None = None) -> SimConfig:
    """Assemble a SimConfig from a config file plus explicit overrides.

    `timing` and `policy` arguments (e.g. from CLI flags) take precedence
    over the corresponding config sections.  When `path` is None the
    PRACSIM_CONFIG environment variable is consulted; if that is unset,
    pure defaults are used.
    """
    sections: dict[str, dict[str, str]] = {}
    if path is None:
        path = os.environ.get(ENV_CONFIG) or None
    if path is not None:
        sections = _read_ini(path)

    unknown = set(sections) - {"timing", "policy", "mapping", "sim"}
    if unknown:
        raise ConfigError(f"unknown config sections: {', '.join(sorted(unknown))}")

    if timing is None:
        if "timing" in sections:
            timing = timing_mod.from_config_section(sections["timing"])
        else:
            timing = timing_mod.preset("default")
    if policy is None:
        if "policy" in sections:
            policy = policy_mod.from_config_section(sections["policy"])
        else:
            policy = policy_mod.policy_preset("adaptive")
    if "mapping" in sections:
        mapping = mapping_mod.from_config_section(sections["mapping"])
    else:
        mapping = mapping_mod.AddressMapping()

    sim_keys = sections.get("sim", {})
    unknown = set(sim_keys) - {"cpi_base", "core_clock_mhz"}
    if unknown:
        raise ConfigError(f"unknown [sim] keys: {', '.join(sorted(unknown))}")
    kwargs = {}
    for key in ("cpi_base", "core_clock_mhz"):
        if key in sim_keys:
            try:
                kwargs[key] = float(sim_keys[key].strip().strip("\"'"))
            except ValueError:
                raise ConfigError(f"invalid number for [sim] {key}") from None

    return SimConfig(timing=timing, policy=policy, mapping=mapping, **kwargs)


def load_timing(path: str) -> timing_mod.TimingParams:
    """Read just the [timing] section of a config file."""
    sections = _read_ini(path)
    if "timing" not in sections:
        raise ConfigError(f"{path}: no [timing] section")
    return timing_mod.from_config_section(sections["timing"])


def _read_ini(path: str) -> dict[str, dict[str, str]]:
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc
    return {name: dict(parser[name]) for name in parser.sections()}

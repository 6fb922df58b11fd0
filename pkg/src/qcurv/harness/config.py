"""
Run Configuration
-----------------

:mod:`qcurv.harness.config`: Parse and validate the line-oriented run configuration
that drives :mod:`qcurv.harness.commands`.

The grammar is ``[section]`` headers, ``key = value`` entries and ``#`` comment lines.
Section ``run`` holds the problem (n, sigma, truncation, grid, seed, output directory),
section ``K`` the prescribed function (a registered family plus its parameters), and
each command has a section of its own; absent sections take their defaults.

.. code-block:: ini

    [run]
    n = 3
    sigma = 0.25
    L = 32

    [K]
    family = two-peak
    epsilon = 0.005

Every problem found is reported, each with its line number.
"""
from __future__ import annotations

import dataclasses
import json
import logging
import math
import pathlib
import re
from typing import Any, Callable, Dict, List, Optional, Tuple

import catalogue

from .. import errors, kfuncs, utils
from .._version import __version__

LOGGER = logging.getLogger(__name__)

_SECTION_RE = re.compile(r"^\[\s*([A-Za-z][\w-]*)\s*\]$")
_ENTRY_RE = re.compile(r"^([A-Za-z_][\w-]*)\s*=\s*(.*)$")
_BOOLEANS = {
    "true": True,
    "yes": True,
    "on": True,
    "1": True,
    "false": False,
    "no": False,
    "off": False,
    "0": False,
}


def _integer(text: str) -> int:
    return int(text)


def _real(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(text)
    return value


def _optional_real(text: str) -> Optional[float]:
    return None if text.lower() in ("", "none") else _real(text)


def _boolean(text: str) -> bool:
    try:
        return _BOOLEANS[text.lower()]
    except KeyError:
        raise ValueError(text)


def _reals(text: str) -> Tuple[float, ...]:
    return tuple(_real(item) for item in text.split(",") if item.strip())


def _integers(text: str) -> Tuple[int, ...]:
    return tuple(int(item) for item in text.split(",") if item.strip())


def _text(text: str) -> str:
    if not text:
        raise ValueError(text)
    return text


def _scalar(text: str) -> Any:
    """K parameters: numbers where possible, strings (e.g. file paths) otherwise."""
    for convert in (int, float):
        try:
            return convert(text)
        except ValueError:
            pass
    return text


Converter = Callable[[str], Any]

SCHEMA: Dict[str, Dict[str, Tuple[Converter, Any]]] = {
    "run": {
        "n": (_integer, None),
        "sigma": (_real, None),
        "L": (_integer, 32),
        "zonal": (_boolean, True),
        "seed": (_integer, 0),
        "out": (_text, "qcurv-out"),
    },
    "spectrum": {
        "kmax": (_integer, 10),
    },
    "bubble-residual": {
        "lambda": (_real, 2.0),
        "truncations": (_integers, (16, 32, 64)),
    },
    "expansion-verify": {
        "lambda_min": (_real, 8.0),
        "lambda_max": (_real, 64.0),
        "samples": (_integer, 6),
        "truncation": (_integer, 1024),
        "n_jobs": (_integer, 1),
    },
    "flow": {
        "tol": (_real, 1e-8),
        "max_iter": (_integer, 20000),
        "check_every": (_integer, 25),
        "concentration_lambda": (_optional_real, None),
        "perturbation": (_real, 0.1),
        "eps": (_reals, ()),
        "trace": (_boolean, True),
    },
    "existence": {
        "p_max": (_integer, 2),
        "starts": (_integer, 200),
        "n_jobs": (_integer, 1),
    },
}
COMMANDS = tuple(name for name in SCHEMA if name != "run")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """
    A validated run configuration.

    Attributes:
        n: Dimension of the sphere.
        sigma: Order of P_σ.
        L: Spectral truncation.
        zonal: Work with zonal (axially symmetric) fields.
        seed: Seed of every random choice; recorded in every output.
        out: Output directory.
        k_family: Registered name of the K family.
        k_params: Keyword parameters of the K family.
        sections: Options of every command section, defaults filled in.
        text: The configuration text as given.
    """

    n: int
    sigma: float
    L: int
    zonal: bool
    seed: int
    out: pathlib.Path
    k_family: str
    k_params: Dict[str, Any]
    sections: Dict[str, Dict[str, Any]]
    text: str = ""

    @property
    def digest(self) -> str:
        """SHA-256 of the canonical (sorted JSON) form of everything that affects results."""
        canonical = {
            "n": self.n,
            "sigma": self.sigma,
            "L": self.L,
            "zonal": self.zonal,
            "seed": self.seed,
            "K": {"family": self.k_family, **self.k_params},
            "sections": self.sections,
        }
        return utils.text_digest(json.dumps(canonical, sort_keys=True, default=str))

    def meta(self) -> Dict[str, Any]:
        return {"config_digest": self.digest, "seed": self.seed, "qcurv": __version__}

    def option(self, section: str, key: str) -> Any:
        return self.sections[section][key]

    def make_k(self) -> kfuncs.KFunction:
        return kfuncs.make_k(self.k_family, self.n, **self.k_params)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)


def _split(text: str, problems: List[str]):
    """Lines → {section: {key: (raw value, line number)}}, recording grammar problems."""
    raw: Dict[str, Dict[str, Tuple[str, int]]] = {}
    seen_sections: Dict[str, int] = {}
    section: Optional[str] = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith(("#", ";")):
            continue
        match = _SECTION_RE.match(line)
        if match:
            section = match.group(1)
            if section in seen_sections:
                problems.append(
                    f"line {lineno}: duplicate section [{section}] "
                    f"(first at line {seen_sections[section]})"
                )
            else:
                seen_sections[section] = lineno
            if section != "K" and section not in SCHEMA:
                problems.append(
                    f"line {lineno}: unknown section [{section}]; "
                    f"expected one of {['K', *SCHEMA]}"
                )
            raw.setdefault(section, {})
            continue
        match = _ENTRY_RE.match(line)
        if not match:
            problems.append(f"line {lineno}: expected '[section]' or 'key = value', got {line!r}")
            continue
        if section is None:
            problems.append(f"line {lineno}: key {match.group(1)!r} outside of any section")
            continue
        key, value = match.group(1), match.group(2).strip()
        if key in raw[section]:
            problems.append(
                f"line {lineno}: duplicate key {key!r} in [{section}] "
                f"(first set at line {raw[section][key][1]})"
            )
            continue
        raw[section][key] = (value, lineno)
    return raw


def _convert_section(
    name: str, entries: Dict[str, Tuple[str, int]], problems: List[str]
) -> Dict[str, Any]:
    schema = SCHEMA[name]
    values = {key: default for key, (_, default) in schema.items()}
    for key, (value, lineno) in entries.items():
        if key not in schema:
            problems.append(
                f"line {lineno}: unknown key {key!r} in [{name}]; expected one of {sorted(schema)}"
            )
            continue
        convert = schema[key][0]
        try:
            values[key] = convert(value)
        except ValueError:
            problems.append(f"line {lineno}: invalid value {value!r} for {key!r} in [{name}]")
    return values


def _check_run(run: Dict[str, Any], entries, command: Optional[str], problems: List[str]):
    def where(key):
        return f"line {entries[key][1]}" if key in entries else "[run]"

    for key in ("n", "sigma"):
        if run[key] is None and key not in entries:
            problems.append(f"[run]: missing required key {key!r}")
    n, sigma = run["n"], run["sigma"]
    if n is not None and n < 3:
        problems.append(f"{where('n')}: n = {n} is invalid; need n >= 3")
        n = None
    if n is not None and not run["zonal"] and n > 3:
        problems.append(f"{where('zonal')}: full (non-zonal) grids exist only for n <= 3")
    if run["L"] < 1:
        problems.append(f"{where('L')}: L = {run['L']} is invalid; need L >= 1")
    if n is not None and sigma is not None:
        if not 0.0 < sigma < n / 2:
            problems.append(
                f"{where('sigma')}: sigma = {sigma} is invalid; need 0 < sigma < n/2 = {n / 2}"
            )
        elif command == "existence" and not sigma < (n - 2) / 2:
            problems.append(
                f"{where('sigma')}: sigma = {sigma} is invalid for existence; "
                f"need 0 < sigma < (n-2)/2 = {(n - 2) / 2}"
            )


def _check_k(
    entries: Dict[str, Tuple[str, int]],
    n: Optional[int],
    problems: List[str],
    *,
    zonal_grid: bool = False,
):
    family, lineno = entries.get("family", ("constant", None))
    where = f"line {lineno}" if lineno else "[K]"
    try:
        factory = kfuncs.k_families.get(family)
    except catalogue.RegistryError:
        problems.append(
            f"{where}: unknown K family {family!r}; "
            f"expected one of {sorted(kfuncs.k_families.get_all())}"
        )
        return family, {}
    params = {}
    rejected = False
    accepted = utils.get_kwargs_for_func(
        factory, {key: None for key in entries if key != "family"}
    )
    for key, (value, key_line) in entries.items():
        if key == "family":
            continue
        if key not in accepted or key == "n":
            problems.append(f"line {key_line}: unknown key {key!r} for K family {family!r}")
            rejected = True
            continue
        params[key] = _scalar(value)
    if n is not None and not rejected:
        try:
            K = kfuncs.make_k(family, n, **params)
        except (errors.QcurvError, TypeError) as e:
            problems.append(f"{where}: K family {family!r} rejected its parameters: {e}")
        except OSError as e:
            problems.append(f"{where}: unreadable K file: {e}")
        else:
            if zonal_grid and not kfuncs.is_zonal(K):
                problems.append(
                    f"{where}: K family {family!r} is not axially symmetric about the poles; "
                    "the flow needs zonal = false"
                )
    return family, params


def parse_config(text: str, *, command: Optional[str] = None) -> RunConfig:
    """
    Parse and validate configuration ``text``.

    Args:
        text: Configuration text.
        command: The command the configuration will run; ``"existence"`` additionally
            requires sigma < (n-2)/2, and ``"flow"`` on zonal grids an axially
            symmetric K.

    Raises:
        ConfigurationError: listing every problem found (``.errors``), each prefixed by
            its line number.
    """
    problems: List[str] = []
    raw = _split(text, problems)
    run_entries = raw.get("run", {})
    run = _convert_section("run", run_entries, problems)
    _check_run(run, run_entries, command, problems)
    sections = {
        name: _convert_section(name, raw.get(name, {}), problems) for name in COMMANDS
    }
    n = run["n"] if run["n"] is not None and run["n"] >= 3 else None
    family, k_params = _check_k(
        raw.get("K", {}),
        n if not problems else None,
        problems,
        zonal_grid=command == "flow" and run["zonal"],
    )
    if problems:
        raise errors.ConfigurationError(
            f"{len(problems)} problem(s) in configuration:\n  " + "\n  ".join(problems),
            errors=problems,
        )
    config = RunConfig(
        n=run["n"],
        sigma=run["sigma"],
        L=run["L"],
        zonal=run["zonal"],
        seed=run["seed"],
        out=pathlib.Path(run["out"]),
        k_family=family,
        k_params=k_params,
        sections=sections,
        text=text,
    )
    LOGGER.debug("parsed configuration %s", config.digest[:12])
    return config


def read_config(filepath, *, command: Optional[str] = None) -> RunConfig:
    """Read and parse the configuration file at ``filepath``."""
    path = utils.to_path(filepath)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise errors.ConfigurationError(f"cannot read configuration {path}: {e}")
    return parse_config(text, command=command)

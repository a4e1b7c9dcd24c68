"""Flat ``key = value`` run configurations with a single ``[command]`` header.

Example::

    # rate study for a kinked function of the mean
    [rate]
    functional = paper_sgn
    model = normal(0,1)
    n_grid = 64,128,256,512
    replicates = 300
    master_seed = 7
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .errors import ConfigError, InvalidParams, MissingRequired, TypeMismatch, UnknownKey
from .experiments import CONTRASTS, SUMMARIES
from .functionals import parse_functional
from .sampling import parse_model

__all__ = ["RunConfig", "COMMANDS", "parse_config", "apply_overrides"]

COMMANDS = ("estimate", "rate", "normality", "compare-boot")

DEFAULT_REPLICATES = 200
DEFAULT_B = 500
DEFAULT_SEED = 0

# key -> commands accepting it
_KEYS = {
    "functional": COMMANDS,
    "model": COMMANDS,
    "input": ("estimate",),
    "n": ("estimate", "normality"),
    "n_grid": ("rate", "compare-boot"),
    "replicates": ("rate", "normality", "compare-boot"),
    "bootstrap": ("estimate",),
    "bootstrap_B": ("estimate", "rate", "compare-boot"),
    "summary": ("rate", "compare-boot"),
    "contrast": ("rate",),
    "master_seed": COMMANDS,
    "output": COMMANDS,
    "output_format": COMMANDS,
}

_SECTION = re.compile(r"^\[\s*([\w-]+)\s*\]$")


@dataclass(frozen=True)
class RunConfig:
    command: str
    functional: str
    model: Optional[str] = None
    input_file: Optional[str] = None
    n: Optional[int] = None
    n_grid: Optional[tuple] = None
    replicates: int = DEFAULT_REPLICATES
    bootstrap: bool = False
    bootstrap_B: int = DEFAULT_B
    summary: str = "median"
    contrast: str = "jack_vs_ijack"
    master_seed: int = DEFAULT_SEED
    output_path: Optional[str] = None
    output_format: str = "csv"

    @property
    def functional_spec(self):
        return parse_functional(self.functional)

    @property
    def population(self):
        return parse_model(self.model) if self.model else None

    def provenance(self) -> list:
        """Resolved ``key = value`` lines for the keys this command uses."""
        allowed = {k for k, cmds in _KEYS.items() if self.command in cmds}
        fields = {
            "functional": self.functional,
            "model": self.model,
            "input": self.input_file,
            "n": self.n,
            "n_grid": ",".join(map(str, self.n_grid)) if self.n_grid else None,
            "replicates": self.replicates,
            "bootstrap": str(self.bootstrap).lower(),
            "bootstrap_B": self.bootstrap_B,
            "summary": self.summary,
            "contrast": self.contrast,
            "master_seed": self.master_seed,
            "output": self.output_path,
            "output_format": self.output_format,
        }
        lines = [f"command = {self.command}"]
        for key in _KEYS:
            if key in allowed and fields[key] is not None:
                if key == "bootstrap_B" and self.command == "estimate" and not self.bootstrap:
                    continue
                lines.append(f"{key} = {fields[key]}")
        return lines


def _int(key, text):
    try:
        return int(text)
    except ValueError:
        raise TypeMismatch(key, f"expected an integer, got {text!r}") from None


def _bool(key, text):
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise TypeMismatch(key, f"expected true/false, got {text!r}")


def _choice(key, text, options):
    if text not in options:
        raise TypeMismatch(key, f"expected one of {', '.join(options)}, got {text!r}")
    return text


def _raw_pairs(text: str):
    section = None
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        m = _SECTION.match(line)
        if m:
            if section is not None:
                raise ConfigError("command", f"line {lineno}: only one [command] section is allowed")
            section = m.group(1)
            continue
        if "=" not in line:
            raise ConfigError(line, f"line {lineno}: expected key = value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in pairs:
            raise ConfigError(key, f"line {lineno}: duplicate key {key!r}")
        pairs[key] = value
    return section, pairs


def _build(command: str, pairs: dict, base_dir: Optional[Path]) -> RunConfig:
    for key in pairs:
        if key not in _KEYS or command not in _KEYS[key]:
            raise UnknownKey(key)

    if "functional" not in pairs:
        raise MissingRequired("functional")
    try:
        parse_functional(pairs["functional"])
    except InvalidParams as exc:
        raise TypeMismatch("functional", str(exc)) from None

    kw = {"command": command, "functional": pairs["functional"].replace(" ", "")}

    has_model, has_input = "model" in pairs, "input" in pairs
    if has_model and has_input:
        raise ConfigError("input", "give either 'model' or 'input', not both")
    if has_input:
        path = Path(pairs["input"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        kw["input_file"] = str(path)
    elif has_model:
        try:
            parse_model(pairs["model"])
        except InvalidParams as exc:
            raise TypeMismatch("model", str(exc)) from None
        kw["model"] = pairs["model"].replace(" ", "")
    else:
        raise MissingRequired("input" if command == "estimate" else "model")

    if command == "estimate" and has_model and "n" not in pairs:
        raise MissingRequired("n")
    if command == "normality" and "n" not in pairs:
        raise MissingRequired("n")
    if command in ("rate", "compare-boot") and "n_grid" not in pairs:
        raise MissingRequired("n_grid")

    if "n" in pairs:
        kw["n"] = _int("n", pairs["n"])
    if "n_grid" in pairs:
        kw["n_grid"] = tuple(_int("n_grid", p.strip()) for p in pairs["n_grid"].split(",") if p.strip())
    for key in ("replicates", "bootstrap_B", "master_seed"):
        if key in pairs:
            kw[key] = _int(key, pairs[key])
    if "bootstrap" in pairs:
        kw["bootstrap"] = _bool("bootstrap", pairs["bootstrap"])
    if "summary" in pairs:
        kw["summary"] = _choice("summary", pairs["summary"], SUMMARIES)
    if "contrast" in pairs:
        kw["contrast"] = _choice("contrast", pairs["contrast"], CONTRASTS)
    if "output" in pairs:
        kw["output_path"] = pairs["output"]
    kw["output_format"] = _choice(
        "output_format", pairs.get("output_format", "record" if command == "estimate" else "csv"),
        ("csv", "record"),
    )
    return RunConfig(**kw)


def parse_config(text: str, command: Optional[str] = None, base_dir=None,
                 overrides: Optional[dict] = None) -> RunConfig:
    """Parse and validate a configuration.

    ``command`` (e.g. from the CLI subcommand) must agree with the section
    header when both are present. ``overrides`` are applied as if they were
    extra lines of the file, replacing existing keys. Relative ``input``
    paths resolve against ``base_dir``.
    """
    section, pairs = _raw_pairs(text)
    if command is not None and section is not None and command != section:
        raise ConfigError("command", f"config section [{section}] does not match command {command!r}")
    command = command or section
    if command is None:
        raise MissingRequired("command")
    if command not in COMMANDS:
        raise ConfigError("command", f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    pairs.update(overrides or {})
    return _build(command, pairs, Path(base_dir) if base_dir is not None else None)


def apply_overrides(cfg: RunConfig, seed=None, out=None) -> RunConfig:
    changes = {}
    if seed is not None:
        changes["master_seed"] = int(seed)
    if out is not None:
        changes["output_path"] = str(out)
    return replace(cfg, **changes) if changes else cfg

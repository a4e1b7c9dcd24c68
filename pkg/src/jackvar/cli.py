"""Command-line front end.

::

    jackvar estimate --config est.cfg
    jackvar rate --config rate.cfg --seed 11 --out results/rate.csv
    jackvar normality --config norm.cfg
    jackvar compare-boot --config boot.cfg --out results/boot.csv

Exit status is 0 on success, 2 for configuration problems and 1 for any
other failure; the diagnostic goes to stderr.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import COMMANDS, RunConfig, apply_overrides, parse_config
from .empirical import read_sample_file
from .errors import ConfigError, JackvarError
from .estimators import bootstrap_variance, infinitesimal_jackknife_variance, jackknife_variance
from .experiments import (
    RateStudyConfig,
    compare_boot,
    fmt,
    format_fit_record,
    normality_csv_text,
    normality_study,
    rate_csv_text,
    rate_study,
    write_rate_csv,
)
from .functionals import evaluate
from .sampling import derive_seed, draw

log = logging.getLogger("jackvar")


def _header(cfg: RunConfig) -> list:
    return [f"jackvar-version: {__version__}"] + cfg.provenance()


def _with_suffix(path: Path, tag: str, ext: str) -> Path:
    return path.with_name(f"{path.stem}.{tag}{ext}")


def run_estimate(cfg: RunConfig, stdout) -> None:
    spec = cfg.functional_spec
    if cfg.input_file:
        sample = read_sample_file(cfg.input_file)
    else:
        sample = draw(cfg.population, cfg.n, derive_seed(cfg.master_seed, cfg.n, 0))
    result = {
        "n": sample.n,
        "T_n": evaluate(spec, sample),
        "v_jack": jackknife_variance(spec, sample).value,
        "v_ijack": infinitesimal_jackknife_variance(spec, sample).value,
    }
    if cfg.bootstrap:
        seed = derive_seed(cfg.master_seed, sample.n, 0, 1)
        result["v_boot"] = bootstrap_variance(spec, sample, cfg.bootstrap_B, seed).value

    head = "".join(f"# {h}\n" for h in _header(cfg))
    if cfg.output_format == "csv":
        body = ",".join(result) + "\n" + ",".join(fmt(v) for v in result.values()) + "\n"
    else:
        body = "".join(f"{k} = {fmt(v)}\n" for k, v in result.items())
    stdout.write(head + body)
    if cfg.output_path:
        Path(cfg.output_path).write_text(head + body)


def _rate_config(cfg: RunConfig, contrast: str) -> RateStudyConfig:
    return RateStudyConfig(
        spec=cfg.functional_spec,
        model=cfg.population,
        n_grid=cfg.n_grid,
        replicates=cfg.replicates,
        master_seed=cfg.master_seed,
        summary=cfg.summary,
        contrast=contrast,
        bootstrap_B=cfg.bootstrap_B,
    )


def _emit_fits(cfg: RunConfig, fits, stdout) -> None:
    header = _header(cfg)
    record = format_fit_record(fits, header)
    if cfg.output_path is None:
        for fit in fits:
            stdout.write(rate_csv_text(fit, [f"contrast = {fit.contrast}"]))
        stdout.write(record)
        return

    out = Path(cfg.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    if cfg.output_format == "record":
        out.write_text(record)
    else:
        if len(fits) == 1:
            write_rate_csv(out, fits[0], header)
        else:
            for fit in fits:
                write_rate_csv(_with_suffix(out, fit.contrast, out.suffix or ".csv"), fit,
                               header + [f"contrast = {fit.contrast}"])
        _with_suffix(out, "fit", ".txt").write_text(record)
    stdout.write(record)


def run_rate(cfg: RunConfig, stdout) -> None:
    fit = rate_study(_rate_config(cfg, cfg.contrast))
    if fit.excluded:
        log.warning("%d replicate(s) produced non-finite values and were excluded", fit.excluded)
    _emit_fits(cfg, [fit], stdout)


def run_compare_boot(cfg: RunConfig, stdout) -> None:
    fits = compare_boot(_rate_config(cfg, "jack_vs_ijack"))
    _emit_fits(cfg, list(fits), stdout)


def run_normality(cfg: RunConfig, stdout) -> None:
    report = normality_study(cfg.functional_spec, cfg.population, cfg.n, cfg.replicates, cfg.master_seed)
    text = normality_csv_text(report, _header(cfg))
    if cfg.output_path:
        out = Path(cfg.output_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    stdout.write(text)


RUNNERS = {
    "estimate": run_estimate,
    "rate": run_rate,
    "normality": run_normality,
    "compare-boot": run_compare_boot,
}


def run(cfg: RunConfig, stdout=None) -> int:
    RUNNERS[cfg.command](cfg, stdout or sys.stdout)
    return 0


def _parse_set(items):
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(item, f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jackvar",
        description="Jackknife, infinitesimal jackknife and bootstrap variance estimation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="key = value configuration file")
        p.add_argument("--seed", type=int, help="override master_seed")
        p.add_argument("--out", type=Path, help="override output path")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="set or override a configuration key (repeatable)")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None, stdout=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text, base = "", None
        if args.config is not None:
            text = args.config.read_text()
            base = args.config.parent
        cfg = parse_config(text, command=args.command, base_dir=base, overrides=_parse_set(args.set))
        cfg = apply_overrides(cfg, seed=args.seed, out=args.out)
        return run(cfg, stdout)
    except ConfigError as exc:
        print(f"jackvar {args.command}: configuration error: {exc}", file=sys.stderr)
        return 2
    except (JackvarError, OSError) as exc:
        print(f"jackvar {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Sectioned key-value config files.

Four sections, ``[system]``, ``[channel]``, ``[traffic]`` and ``[experiment]``;
arrays are comma-separated.  ``dists`` takes one row shared by all users,
or several rows separated by ``;`` that split the users into equal contiguous
groups (one row per user is the limiting case).  Giving ``dists`` selects
the finite-state channel; giving ``bandwidth_hz`` selects Jakes fading.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from ..model import (ChannelStateDistribution, ConfigError, JakesParams, RateTable, SystemConfig,
                     ValidatedConfig, validate_config)
from .stability import QUEUE_CAP, SLOPE_TOL

SECTIONS = {
    "system": {"n_users", "beta", "slot_seconds", "packet_bits", "policy", "p_min", "p_max"},
    "channel": {"rate_table", "dists", "bandwidth_hz", "snr_linear", "doppler_range_hz",
                "n_oscillators", "drift_std_db", "drift_clamp_db"},
    "traffic": {"lambda"},
    "experiment": {"horizon", "warmup", "seed", "slope_tol", "queue_cap"},
}
JAKES_KEYS = {"bandwidth_hz", "snr_linear", "doppler_range_hz", "n_oscillators", "drift_std_db",
              "drift_clamp_db"}
REQUIRED = {"system": {"n_users", "beta"}, "traffic": {"lambda"}, "experiment": {"horizon", "warmup", "seed"}}


@dataclass(frozen=True)
class ExperimentConfig:
    system: ValidatedConfig
    slope_tol: float = SLOPE_TOL
    queue_cap: float = QUEUE_CAP


def _floats(key: str, text: str):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(key, f"cannot parse numbers from {text!r}") from None


def _scalar(key: str, text: str, kind=float):
    try:
        if kind is int:
            value = float(text)
            if not value.is_integer():
                raise ValueError
            return int(text) if text.strip().lstrip("-").isdigit() else int(value)
        return kind(text)
    except ValueError:
        raise ConfigError(key, f"expected {kind.__name__}, got {text!r}") from None


def _expand_rows(key: str, rows, n_users: int):
    if not rows or n_users % len(rows):
        raise ConfigError(key, f"{len(rows)} rows cannot be split evenly over {n_users} users")
    per = n_users // len(rows)
    return [row for row in rows for _ in range(per)]


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"),
                                   inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("config", f"malformed file: {exc}") from None
    for section in cp.sections():
        if section not in SECTIONS:
            raise ConfigError(section, "unknown section")
        unknown = set(cp[section]) - SECTIONS[section]
        if unknown:
            raise ConfigError(f"{section}.{sorted(unknown)[0]}", "unknown key")
    for section, keys in REQUIRED.items():
        for key in keys:
            if not cp.has_option(section, key):
                raise ConfigError(f"{section}.{key}", "missing required key")

    sysd = cp["system"]
    n = _scalar("n_users", sysd["n_users"], int)
    kw = dict(n_users=n, beta=_scalar("beta", sysd["beta"]))
    for key in ("slot_seconds", "packet_bits", "p_min", "p_max"):
        if key in sysd:
            kw[key] = _scalar(key, sysd[key])
    if "policy" in sysd:
        kw["policy"] = sysd["policy"].strip()

    chan = cp["channel"] if cp.has_section("channel") else {}
    jakes_keys = JAKES_KEYS & set(chan)
    if jakes_keys and "dists" in chan:
        raise ConfigError("channel", "give either dists or Jakes parameters, not both")
    if jakes_keys:
        jp = {}
        for key in jakes_keys:
            if key == "doppler_range_hz":
                vals = _floats(key, chan[key])
                if len(vals) != 2:
                    raise ConfigError(key, "expected low,high")
                jp[key] = tuple(vals)
            elif key == "n_oscillators":
                jp[key] = _scalar(key, chan[key], int)
            else:
                jp[key] = _scalar(key, chan[key])
        if "rate_table" in chan:
            raise ConfigError("rate_table", "not used by the fading channel")
        kw.update(jakes=JakesParams(**jp), rate_table=None, dists=())
    else:
        if "rate_table" not in chan or "dists" not in chan:
            raise ConfigError("channel", "rate_table and dists are required for the finite-state channel")
        kw["rate_table"] = RateTable(tuple(_floats("rate_table", chan["rate_table"])))
        rows = [tuple(_floats("dists", r)) for r in chan["dists"].split(";") if r.strip()]
        kw["dists"] = tuple(ChannelStateDistribution(r) for r in _expand_rows("dists", rows, n))

    lam = _floats("lambda", cp["traffic"]["lambda"])
    kw["lam"] = tuple(lam * n) if len(lam) == 1 else tuple(lam)

    exp = cp["experiment"]
    kw["horizon"] = _scalar("horizon", exp["horizon"], int)
    kw["warmup"] = _scalar("warmup", exp["warmup"], int)
    kw["seed"] = _scalar("seed", exp["seed"], int)
    opts = {}
    for key in ("slope_tol", "queue_cap"):
        if key in exp:
            opts[key] = _scalar(key, exp[key])
    return ExperimentConfig(system=validate_config(SystemConfig(**kw)), **opts)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)


def _fmt(values) -> str:
    return ", ".join(repr(float(v)) for v in values)


def _group_rows(probs: np.ndarray):
    n = len(probs)
    for g in range(1, n + 1):
        if n % g == 0:
            per = n // g
            rows = probs[::per]
            if np.array_equal(np.repeat(rows, per, axis=0), probs):
                return rows
    return probs


def dump_config(exp: Union[ExperimentConfig, SystemConfig]) -> str:
    """Serialize back to the file format; ``parse_config(dump_config(x))`` round-trips."""
    if isinstance(exp, SystemConfig):
        exp = ExperimentConfig(system=validate_config(exp))
    c = exp.system
    lines = ["[system]", f"n_users = {c.n_users}", f"beta = {c.beta!r}", f"slot_seconds = {c.slot_seconds!r}",
             f"packet_bits = {c.packet_bits!r}", f"policy = {c.policy}", f"p_min = {c.p_min!r}",
             f"p_max = {c.p_max!r}", "", "[channel]"]
    if c.is_fading:
        j = c.jakes
        lines += [f"bandwidth_hz = {j.bandwidth_hz!r}", f"snr_linear = {j.snr_linear!r}",
                  f"doppler_range_hz = {_fmt(j.doppler_range_hz)}", f"n_oscillators = {j.n_oscillators}",
                  f"drift_std_db = {j.drift_std_db!r}", f"drift_clamp_db = {j.drift_clamp_db!r}"]
    else:
        rows = _group_rows(c.prob_matrix())
        lines += [f"rate_table = {_fmt(c.rate_table.rates)}", "dists = " + "; ".join(_fmt(r) for r in rows)]
    lam = c.lam if len(set(c.lam)) > 1 else c.lam[:1]
    lines += ["", "[traffic]", f"lambda = {_fmt(lam)}", "", "[experiment]", f"horizon = {c.horizon}",
              f"warmup = {c.warmup}", f"seed = {c.seed}", f"slope_tol = {exp.slope_tol!r}",
              f"queue_cap = {exp.queue_cap!r}", ""]
    return "\n".join(lines)

"""Deterministic experiment runner.

Subcommands (all take --config <ini>, --out <path>, --threads <n>):

    free-decay   CoherenceTrace CSV for the free single qubit
    gamma0       JSON record: quadrature vs closed-form stationary Gamma0
    bangbang     Fig.-1-style CSV: eta(tau) traces per protocol/temperature
    sweep        Fig.-2-style CSV: read-out error vs pulse frequency
    dfs-report   JSON record of the decoherence-free condition checks
    oracle       JSON record: truncated-Fock oracle vs discrete analytic eta

Configs are flat INI files; every key is validated against the subcommand
schema before any computation starts and unknown sections or keys are
rejected.  Output is written in one shot (never partially), with numbers at
17 significant digits so identical configs give byte-identical artifacts.

Exit codes: 0 success, 2 config error, 3 divergent outcome where a number
was requested, 4 oracle truncation unconverged.
"""

from __future__ import annotations

import argparse
import configparser
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .bath import BathSpec, FrequencyGrid, gamma0_closed_form, is_divergent
from .coherent import CoherenceTrace
from .fock import DiscreteBranch, FockOracleConfig, discrete_eta, fock_oracle_eta
from .pulses import PulseSchedule, eta_readout, gamma_continuous_many
from .registers import (
    IndividualLinear,
    SingleQubit,
    WeakCollective,
    branch_profiles,
    full_df_report,
    gamma0_pair,
)

__all__ = ["main", "ConfigError"]


class ConfigError(Exception):
    """Invalid or incomplete experiment configuration."""


def _fmt(value: float) -> str:
    return f"{value:.17g}"


# ---------------------------------------------------------------------------
# config schema and parsing

def _parse_floats(raw: str) -> list:
    try:
        return [float(tok) for tok in raw.split()]
    except ValueError as exc:
        raise ConfigError(f"expected a space-separated float list, got {raw!r}") from exc


def _parse_complexes(raw: str) -> list:
    try:
        return [complex(tok) for tok in raw.split()]
    except ValueError as exc:
        raise ConfigError(f"expected a space-separated complex list, got {raw!r}") from exc


_CONVERTERS = {
    "float": float,
    "int": int,
    "str": str,
    "floats": _parse_floats,
    "complexes": _parse_complexes,
    "strs": lambda raw: raw.split(),
}

# section -> key -> (type, required, default)
_COMMON = {
    "bath": {
        "d": ("int", True, None),
        "lambda": ("float", True, None),
        "theta": ("float", False, 0.0),
    },
    "grid": {
        "nodes": ("int", False, 4000),
        "x_max": ("float", False, None),
    },
    "output": {
        "path": ("str", False, None),
    },
}

_SCHEMAS = {
    "free-decay": {
        **_COMMON,
        "free_decay": {
            "tau_max": ("float", True, None),
            "n_samples": ("int", False, 201),
            "displacement": ("str", False, "thermal"),
        },
    },
    "gamma0": {
        **_COMMON,
        "gamma0": {
            "model": ("str", False, "single_qubit"),
            "j": ("int", False, 1),
        },
    },
    "bangbang": {
        **_COMMON,
        "bangbang": {
            "dt": ("float", True, None),
            "n_cycles": ("int", True, None),
            "points_per_segment": ("int", False, 40),
            "thetas": ("floats", False, None),
            "protocols": ("strs", False, ["standard", "sym_cp"]),
        },
    },
    "sweep": {
        **_COMMON,
        "sweep": {
            "total_time": ("float", True, None),
            "freq_min": ("float", True, None),
            "freq_max": ("float", True, None),
            "n_freq": ("int", False, 25),
            "thetas": ("floats", False, None),
        },
    },
    "dfs-report": {
        **_COMMON,
        "dfs": {
            "model": ("str", True, None),
            "labels": ("strs", True, None),
            "epsilon": ("float", False, 0.0),
            "n_qubits": ("int", False, None),
            "spins": ("str", False, None),
            "t_s": ("float", False, None),
            "displacements": ("str", False, None),
        },
    },
    "oracle": {
        **_COMMON,
        "oracle": {
            "mode_freqs": ("floats", True, None),
            "mode_weights": ("floats", True, None),
            "theta": ("float", False, 0.0),
            "tau": ("float", True, None),
            "n_max": ("int", False, None),
            "bra_m": ("complexes", True, None),
            "bra_b0": ("complexes", True, None),
            "brb_m": ("complexes", True, None),
            "brb_b0": ("complexes", True, None),
        },
    },
}


def load_config(path: str, command: str) -> dict:
    schema = _SCHEMAS[command]
    parser = configparser.ConfigParser(interpolation=None)
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    cfg: dict = {}
    for section in parser.sections():
        if section not in schema:
            raise ConfigError(f"unknown config section [{section}] for {command}")
        for key in parser[section]:
            if key not in schema[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
    for section, keys in schema.items():
        cfg[section] = {}
        for key, (typ, required, default) in keys.items():
            if parser.has_option(section, key):
                raw = parser.get(section, key)
                try:
                    cfg[section][key] = _CONVERTERS[typ](raw)
                except (ValueError, ConfigError) as exc:
                    raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc
            elif required:
                raise ConfigError(f"missing required key {key!r} in section [{section}]")
            else:
                cfg[section][key] = default
    return cfg


def _bath_from(cfg: dict, theta: float | None = None) -> BathSpec:
    b = cfg["bath"]
    try:
        return BathSpec(d=b["d"], lam=b["lambda"], theta=b["theta"] if theta is None else theta)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _grid_from(cfg: dict, theta_max: float, tau_max: float | None) -> FrequencyGrid:
    g = cfg["grid"]
    x_max = g["x_max"]
    if x_max is None:
        x_max = 40.0 + 20.0 * theta_max
        if tau_max is not None and tau_max > 0:
            x_max += 4.0 / max(tau_max / 10.0, 0.05)
    try:
        return FrequencyGrid.build(n_nodes=g["nodes"], x_max=x_max, tau_max=tau_max)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# subcommands: each returns (content, exit_code)

def cmd_free_decay(cfg: dict, threads: int):
    fd = cfg["free_decay"]
    if fd["displacement"] not in ("thermal", "stationary"):
        raise ConfigError("displacement must be 'thermal' or 'stationary'")
    if fd["tau_max"] <= 0 or fd["n_samples"] < 2:
        raise ConfigError("free_decay needs tau_max > 0 and n_samples >= 2")
    bath = _bath_from(cfg)
    grid = _grid_from(cfg, bath.theta, fd["tau_max"])
    model = SingleQubit()
    # thermal start: beta(0) = 0, so b0 = m; stationary start: b0 = 0
    disp = {"up": 1.0 + 0.0j, "down": -1.0 + 0.0j} if fd["displacement"] == "thermal" else None
    up, down = branch_profiles(model, ["up", "down"], disp)
    g0 = gamma0_pair(up, down, bath, grid) if fd["displacement"] == "stationary" else 0.0
    if is_divergent(g0):
        record = {
            "error": "divergent",
            "detail": "stationary single-qubit Gamma0 diverges for this bath",
            "bath": {"d": bath.d, "lambda": bath.lam, "theta": bath.theta},
        }
        return json.dumps(record, sort_keys=True), 3
    times = np.linspace(0.0, fd["tau_max"], fd["n_samples"])
    trace = CoherenceTrace.compute(up, down, times, bath, grid)
    buf = io.StringIO()
    trace.to_csv(buf)
    return buf.getvalue(), 0


def cmd_gamma0(cfg: dict, threads: int):
    g0cfg = cfg["gamma0"]
    bath = _bath_from(cfg)
    grid = _grid_from(cfg, bath.theta, None)
    if g0cfg["model"] == "single_qubit":
        model = SingleQubit()
        labels = ["up", "down"]
        jsq = 1
    elif g0cfg["model"] == "weak_collective":
        j = g0cfg["j"]
        if j < 1:
            raise ConfigError("weak_collective needs j >= 1")
        model = WeakCollective(n_qubits=j)
        labels = [j, -j]
        jsq = j * j
    else:
        raise ConfigError("gamma0 model must be single_qubit or weak_collective")
    pa, pb = branch_profiles(model, labels)
    numeric = gamma0_pair(pa, pb, bath, grid)
    record = {
        "model": g0cfg["model"],
        "labels": [str(l) for l in labels],
        "bath": {"d": bath.d, "lambda": bath.lam, "theta": bath.theta},
    }
    if is_divergent(numeric):
        record["gamma0"] = "divergent"
        return json.dumps(record, sort_keys=True), 3
    record["gamma0"] = numeric
    if bath.d == 3:
        closed = jsq * gamma0_closed_form(bath.theta, bath.lam)
        record["closed_form"] = closed
        record["difference"] = numeric - closed
    return json.dumps(record, sort_keys=True), 0


_TRACE_HEADER = "tau,gamma,eta_abs,protocol,dt,theta,d,lambda"


def cmd_bangbang(cfg: dict, threads: int):
    bb = cfg["bangbang"]
    thetas = bb["thetas"] if bb["thetas"] is not None else [cfg["bath"]["theta"]]
    protocols = bb["protocols"]
    for p in protocols:
        if p not in ("standard", "sym_cp", "free"):
            raise ConfigError(f"unknown protocol {p!r}")
    if bb["dt"] <= 0 or bb["n_cycles"] < 1 or bb["points_per_segment"] < 2:
        raise ConfigError("bangbang needs dt > 0, n_cycles >= 1, points_per_segment >= 2")
    tau_end = 2.0 * bb["n_cycles"] * bb["dt"]
    grid = _grid_from(cfg, max(thetas), tau_end)
    # continuous sampling: points_per_segment per inter-pulse interval
    n_seg = 2 * bb["n_cycles"]
    taus = np.unique(
        np.concatenate(
            [
                np.linspace(k * bb["dt"], (k + 1) * bb["dt"], bb["points_per_segment"])
                for k in range(n_seg)
            ]
        )
    )

    def one(args):
        protocol, theta = args
        bath = _bath_from(cfg, theta=theta)
        sched = PulseSchedule(protocol=protocol, dt=bb["dt"], n_cycles=bb["n_cycles"])
        gam = gamma_continuous_many(sched, taus, bath, grid)
        return protocol, theta, gam

    jobs = [(p, th) for p in protocols for th in thetas]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, jobs))
    else:
        results = [one(j) for j in jobs]
    results.sort(key=lambda r: (r[0], r[1]))
    lines = [_TRACE_HEADER]
    d = cfg["bath"]["d"]
    lam = cfg["bath"]["lambda"]
    for protocol, theta, gam in results:
        for tau, g in zip(taus, gam):
            lines.append(
                ",".join(
                    [
                        _fmt(tau),
                        _fmt(g),
                        _fmt(math.exp(-g)),
                        protocol,
                        _fmt(bb["dt"]),
                        _fmt(theta),
                        str(d),
                        _fmt(lam),
                    ]
                )
            )
    return "\n".join(lines) + "\n", 0


_SWEEP_HEADER = "freq_ratio,n_cycles,eta_strob,eta_sym,theta"


def cmd_sweep(cfg: dict, threads: int):
    sw = cfg["sweep"]
    thetas = sw["thetas"] if sw["thetas"] is not None else [cfg["bath"]["theta"]]
    if sw["freq_min"] <= 0 or sw["freq_max"] <= sw["freq_min"] or sw["n_freq"] < 2:
        raise ConfigError("sweep needs 0 < freq_min < freq_max and n_freq >= 2")
    if sw["total_time"] <= 0:
        raise ConfigError("sweep needs total_time > 0")
    freqs = np.geomspace(sw["freq_min"], sw["freq_max"], sw["n_freq"])
    grid = _grid_from(cfg, max(thetas), sw["total_time"])

    def one(args):
        freq, theta = args
        dt = 1.0 / freq
        n = max(1, round(sw["total_time"] / (2.0 * dt)))
        bath = _bath_from(cfg, theta=theta)
        std = PulseSchedule(protocol="standard", dt=dt, n_cycles=n)
        sym = PulseSchedule(protocol="sym_cp", dt=dt, n_cycles=n)
        return freq, n, eta_readout(std, n, bath, grid), eta_readout(sym, n, bath, grid), theta

    jobs = [(f, th) for th in thetas for f in freqs]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, jobs))
    else:
        rows = [one(j) for j in jobs]
    rows.sort(key=lambda r: (r[4], r[0]))
    lines = [_SWEEP_HEADER]
    for freq, n, es, ey, theta in rows:
        lines.append(
            ",".join([_fmt(freq), str(n), _fmt(es), _fmt(ey), _fmt(theta)])
        )
    return "\n".join(lines) + "\n", 0


def _parse_displacements(raw: str | None) -> dict:
    """label=re[,im] pairs separated by whitespace, e.g. 'up=0.3,-0.1 down=0'"""
    out: dict = {}
    if not raw:
        return out
    for item in raw.split():
        if "=" not in item:
            raise ConfigError(f"bad displacement entry {item!r}")
        label, val = item.split("=", 1)
        parts = val.split(",")
        try:
            re_part = float(parts[0])
            im_part = float(parts[1]) if len(parts) > 1 else 0.0
        except ValueError as exc:
            raise ConfigError(f"bad displacement value {val!r}") from exc
        out[label] = complex(re_part, im_part)
    return out


def cmd_dfs_report(cfg: dict, threads: int):
    dfs = cfg["dfs"]
    bath = _bath_from(cfg)
    grid = _grid_from(cfg, bath.theta, None)
    kind = dfs["model"]
    if kind == "single_qubit":
        model = SingleQubit(epsilon=dfs["epsilon"])
        labels = dfs["labels"]
    elif kind == "weak_collective":
        if dfs["n_qubits"] is None:
            raise ConfigError("weak_collective needs n_qubits")
        model = WeakCollective(n_qubits=dfs["n_qubits"], epsilon=dfs["epsilon"])
        try:
            labels = [int(l) for l in dfs["labels"]]
        except ValueError as exc:
            raise ConfigError("weak_collective labels must be integers") from exc
    elif kind == "individual_linear":
        if dfs["spins"] is None or dfs["t_s"] is None:
            raise ConfigError("individual_linear needs spins and t_s")
        spins = tuple(1 if c == "+" else -1 for c in dfs["spins"] if c in "+-")
        if len(spins) != len(dfs["spins"]):
            raise ConfigError("spins must be a string of + and - characters")
        model = IndividualLinear(spins=spins, t_s=dfs["t_s"], epsilon=dfs["epsilon"])
        labels = dfs["labels"]
    else:
        raise ConfigError(f"unknown dfs model {kind!r}")
    displacements = _parse_displacements(dfs["displacements"])
    try:
        report = full_df_report(model, labels, displacements, bath, grid)
    except KeyError as exc:
        raise ConfigError(f"unknown label: {exc}") from exc
    return report.to_json(), 0


def cmd_oracle(cfg: dict, threads: int):
    oc = cfg["oracle"]
    try:
        config = FockOracleConfig(
            mode_freqs=tuple(oc["mode_freqs"]),
            mode_weights=tuple(oc["mode_weights"]),
            theta=oc["theta"],
            n_max=oc["n_max"],
        )
        bra = DiscreteBranch(label="A", m=tuple(oc["bra_m"]), b0=tuple(oc["bra_b0"]))
        brb = DiscreteBranch(label="B", m=tuple(oc["brb_m"]), b0=tuple(oc["brb_b0"]))
        if len(bra.m) != config.n_modes or len(bra.b0) != config.n_modes:
            raise ValueError("branch A data must cover every mode")
        if len(brb.m) != config.n_modes or len(brb.b0) != config.n_modes:
            raise ValueError("branch B data must cover every mode")
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    result = fock_oracle_eta(config, bra, brb, oc["tau"])
    analytic = discrete_eta(config, bra, brb, oc["tau"])
    record = {
        "oracle_eta": [result.eta.real, result.eta.imag],
        "analytic_eta": [analytic.real, analytic.imag],
        "difference": abs(result.eta - analytic),
        "converged": result.converged,
        "n_max": result.n_max,
        "truncation_shift": result.shift,
    }
    return json.dumps(record, sort_keys=True), 0 if result.converged else 4


_COMMANDS = {
    "free-decay": cmd_free_decay,
    "gamma0": cmd_gamma0,
    "bangbang": cmd_bangbang,
    "sweep": cmd_sweep,
    "dfs-report": cmd_dfs_report,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spinboson", description="spin-boson register decoherence experiments"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="INI experiment config")
        p.add_argument("--out", default=None, help="output path (overrides [output] path)")
        p.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.command)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        content, code = _COMMANDS[args.command](cfg, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out_path = args.out or cfg["output"]["path"]
    if not content.endswith("\n"):
        content += "\n"
    if code == 3:
        # divergence record goes to stderr; no artifact is written
        sys.stderr.write(content)
        return code
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(content)
    else:
        sys.stdout.write(content)
    return code


if __name__ == "__main__":
    sys.exit(main())

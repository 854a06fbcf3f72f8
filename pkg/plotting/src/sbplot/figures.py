"""CSV-to-figure transforms for the spinboson experiment artifacts.

Two figure kinds, matching the producing CLI's CSV schemas:

* trace:  columns tau, eta_abs, protocol, theta (dt, when present, converts
          the time axis to read-out cycle units tau / (2 dt));
* sweep:  columns freq_ratio, n_cycles, eta_strob, eta_sym, theta, plotted
          as read-out error 1 - eta on a log axis against pulse frequency.

Marker convention: hollow symbols = standard protocol, solid = symmetrized;
squares = lowest temperature, circles = highest.  This module never
recomputes physics; it only reshapes and draws what the CSV contains.
"""

from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

__all__ = ["SchemaError", "load_csv", "plot_trace", "plot_sweep"]

TRACE_REQUIRED = ("tau", "eta_abs", "protocol", "theta")
SWEEP_REQUIRED = ("freq_ratio", "n_cycles", "eta_strob", "eta_sym", "theta")

# floor for 1 - eta on logarithmic axes
ERROR_FLOOR = 1e-16

_PROTOCOL_NAMES = {"standard": "standard", "sym_cp": "symmetrized"}


class SchemaError(Exception):
    """Input CSV does not match the declared schema."""


def load_csv(path: str, required: tuple) -> dict:
    """Read a CSV into column lists, validating the required columns."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file, no header")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return {name: [row[name] for row in rows] for name in reader.fieldnames}


def _theta_markers(thetas):
    """squares for the lowest temperature, circles for the highest."""
    uniq = sorted(set(thetas))
    markers = {}
    for i, th in enumerate(uniq):
        if len(uniq) == 1:
            markers[th] = "s"
        else:
            markers[th] = "s" if i == 0 else ("o" if i == len(uniq) - 1 else "^")
    return markers


def _series_style(protocol: str, marker: str) -> dict:
    hollow = protocol == "standard"
    return {
        "marker": marker,
        "markerfacecolor": "none" if hollow else None,
        "markersize": 4,
        "linewidth": 0.8,
    }


def plot_trace(in_path: str, out_path: str) -> int:
    """Render eta(tau) traces, one series per (protocol, theta).

    Returns the number of series drawn.  Writes nothing on schema errors.
    """
    data = load_csv(in_path, TRACE_REQUIRED)
    tau = np.array(data["tau"], dtype=float)
    eta = np.array(data["eta_abs"], dtype=float)
    theta = np.array(data["theta"], dtype=float)
    protocol = np.array(data["protocol"])
    if "dt" in data:
        cycles = tau / (2.0 * np.array(data["dt"], dtype=float))
        xlabel = "time  [read-out periods 2*dt]"
    else:
        cycles = tau
        xlabel = "time  [1/omega_c]"
    markers = _theta_markers(theta.tolist())

    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    n_series = 0
    for proto in sorted(set(protocol.tolist())):
        for th in sorted(set(theta.tolist())):
            sel = (protocol == proto) & (theta == th)
            if not np.any(sel):
                continue
            order = np.argsort(cycles[sel])
            x = cycles[sel][order]
            y = eta[sel][order]
            style = _series_style(proto, markers[th])
            style["linestyle"] = "-" if x.size > 1 else "none"
            label = f"{_PROTOCOL_NAMES.get(proto, proto)}, theta={th:g}"
            ax.plot(x, y, label=label, markevery=max(1, x.size // 25), **style)
            n_series += 1
    ax.set_xlabel(xlabel)
    ax.set_ylabel("coherence |eta|")
    ax.set_ylim(bottom=0.0)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return n_series


def plot_sweep(in_path: str, out_path: str) -> int:
    """Render read-out errors 1 - eta against pulse frequency, log-y.

    One series per (protocol, theta); returns the number of series drawn.
    """
    data = load_csv(in_path, SWEEP_REQUIRED)
    freq = np.array(data["freq_ratio"], dtype=float)
    theta = np.array(data["theta"], dtype=float)
    errs = {
        "standard": 1.0 - np.array(data["eta_strob"], dtype=float),
        "sym_cp": 1.0 - np.array(data["eta_sym"], dtype=float),
    }
    markers = _theta_markers(theta.tolist())

    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    n_series = 0
    for proto, err in errs.items():
        for th in sorted(set(theta.tolist())):
            sel = theta == th
            if not np.any(sel):
                continue
            order = np.argsort(freq[sel])
            x = freq[sel][order]
            y = np.maximum(err[sel][order], ERROR_FLOOR)
            style = _series_style(proto, markers[th])
            style["linestyle"] = "-" if x.size > 1 else "none"
            label = f"{_PROTOCOL_NAMES.get(proto, proto)}, theta={th:g}"
            ax.plot(x, y, label=label, **style)
            n_series += 1
    ax.set_xlabel("pulse frequency  [omega_c]")
    ax.set_ylabel("read-out error  1 - eta")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return n_series

"""Figure rendering for finished runs.

Renders matplotlib figures next to the delimited output, one file per
theme, skipping any figure whose columns were not computed at the run's
diagnostics level.  Uses the Agg backend so it works headless.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .diagnostics import riccati_envelope
from .persistence import read_diagnostics_csv


def _usable(columns: dict[str, np.ndarray], names: list[str]) -> list[str]:
    return [
        name
        for name in names
        if name in columns and np.any(np.isfinite(columns[name]))
    ]


def _save(fig, out_dir: Path, name: str, written: list[Path]) -> None:
    path = out_dir / name
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)


def _mark_resolution_loss(ax, t: np.ndarray, ok: np.ndarray) -> None:
    lost = np.flatnonzero(ok < 0.5)
    if lost.size:
        ax.axvline(t[lost[0]], color="0.6", linestyle=":", label="resolution lost")


def render_report(
    csv_path: str | Path, out_dir: str | Path, manifest: dict | None = None
) -> list[Path]:
    """Render all applicable figures for one diagnostics CSV.

    Returns the list of written figure paths, possibly empty for a CSV with
    no rows.
    """
    cols = read_diagnostics_csv(csv_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    t = cols["t"]
    if t.size == 0:
        return written
    ok = cols["resolution_ok"]

    # Enstrophy with its closed-form envelope.
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, cols["enstrophy"], label="enstrophy")
    e0 = float(cols["enstrophy"][0])
    envelope = np.array([riccati_envelope(e0, float(ti)) for ti in t])
    finite = np.isfinite(envelope)
    if e0 > 0 and np.any(finite):
        ax.plot(t[finite], envelope[finite], "--", label="Riccati envelope")
    _mark_resolution_loss(ax, t, ok)
    if manifest:
        claim = manifest.get("verdict", {}).get("claim", "")
        if claim:
            ax.set_title(claim, fontsize="small", wrap=True)
    ax.set_xlabel("t")
    ax.set_ylabel("squared L2 norm")
    ax.legend(loc="best")
    _save(fig, out, "enstrophy.png", written)

    # Sobolev norms.
    names = _usable(cols, ["enstrophy", "h1_sq", "h2_sq"])
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in names:
        ax.semilogy(t, np.abs(cols[name]), label=name)
    _mark_resolution_loss(ax, t, ok)
    ax.set_xlabel("t")
    ax.set_ylabel("squared norm")
    ax.legend(loc="best")
    _save(fig, out, "norms.png", written)

    # Enstrophy rate, three ways.
    names = _usable(cols, ["rate_measured", "rate_identity", "rate_vorticity"])
    if names:
        fig, ax = plt.subplots(figsize=(6, 4))
        for name in names:
            ax.plot(t, cols[name], label=name)
        _mark_resolution_loss(ax, t, ok)
        ax.set_xlabel("t")
        ax.set_ylabel("d/dt enstrophy")
        ax.legend(loc="best")
        _save(fig, out, "rates.png", written)

    # Regularity criteria: the perturbation ratio against its threshold,
    # and the criterion integrands.
    ratio_ok = "blowup_ratio" in cols and np.any(np.isfinite(cols["blowup_ratio"]))
    crit_names = _usable(
        cols, [name for name in cols if name.startswith(("crit_", "endpoint_ratio"))]
    )
    if ratio_ok or crit_names:
        nrows = int(ratio_ok) + int(bool(crit_names))
        fig, axes = plt.subplots(nrows, 1, figsize=(6, 3.2 * nrows), squeeze=False)
        row = 0
        if ratio_ok:
            ax = axes[row][0]
            ax.plot(t, cols["blowup_ratio"], label="perturbation ratio")
            ax.axhline(2.0, color="r", linestyle="--", label="threshold 2")
            _mark_resolution_loss(ax, t, ok)
            ax.set_ylabel("ratio")
            ax.legend(loc="best")
            row += 1
        if crit_names:
            ax = axes[row][0]
            for name in crit_names:
                ax.semilogy(t, np.abs(cols[name]), label=name)
            _mark_resolution_loss(ax, t, ok)
            ax.set_ylabel("criterion integrand")
            ax.legend(loc="best", fontsize="small")
        axes[-1][0].set_xlabel("t")
        _save(fig, out, "criteria.png", written)

    # Identity residuals (should sit at round-off).
    names = _usable(
        cols,
        [
            "ortho_resid",
            "cubic_resid_det",
            "cubic_resid_tr",
            "pairing_resid_adv",
            "pairing_resid_mix",
        ],
    )
    if names:
        fig, ax = plt.subplots(figsize=(6, 4))
        for name in names:
            ax.semilogy(t, np.maximum(np.abs(cols[name]), 1e-18), label=name)
        _mark_resolution_loss(ax, t, ok)
        ax.set_xlabel("t")
        ax.set_ylabel("normalised residual")
        ax.legend(loc="best", fontsize="small")
        _save(fig, out, "residuals.png", written)

    # Scale-selection infima and eigenvalue norms.
    names = _usable(
        cols,
        [
            name
            for name in cols
            if name.startswith(("inf_rho_", "lam2p_")) or name == "rho_star_l2"
        ],
    )
    if names:
        fig, ax = plt.subplots(figsize=(6, 4))
        for name in names:
            ax.semilogy(t, np.maximum(np.abs(cols[name]), 1e-18), label=name)
        _mark_resolution_loss(ax, t, ok)
        ax.set_xlabel("t")
        ax.set_ylabel("value")
        ax.legend(loc="best", fontsize="small")
        _save(fig, out, "infima.png", written)

    return written

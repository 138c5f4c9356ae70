"""SVG renderings of interval profiles.

The boundary behaviour is part of what the plots are for: the profile must
meet the axis at both ends of the moment interval with slopes +2 and -2, so
the figure draws those tangent segments alongside the curve.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .ansatz import _scalar_curvature_raw
from .errors import ParameterDomainError

_CHOICES = ("psi", "s_tilde", "both")


def plot_profile(profile, what: str = "both", path="profile.svg",
                 n: int = 400) -> None:
    """Write an SVG of the profile and/or its conformal scalar curvature."""
    if what not in _CHOICES:
        raise ParameterDomainError(f"unknown plot choice {what!r}; use {_CHOICES}")
    a, b = profile.t_min, profile.t_max
    ts = np.linspace(a, b, n + 2)[1:-1]

    fig, ax = plt.subplots(figsize=(7.0, 4.4))
    ax.set_xlabel("t")
    handles = []

    if what in ("psi", "both"):
        line, = ax.plot(ts, profile.psi_value(ts), color="tab:blue",
                        label="profile")
        handles.append(line)
        seg = 0.12 * (b - a)
        t_lo = np.array([a, a + seg])
        t_hi = np.array([b - seg, b])
        tangent, = ax.plot(t_lo, 2.0 * (t_lo - a), color="tab:red", lw=1.1,
                           ls="--", label="endpoint tangents, slopes +2 / -2")
        ax.plot(t_hi, -2.0 * (t_hi - b), color="tab:red", lw=1.1, ls="--")
        ax.plot([a, b], [0.0, 0.0], marker="o", ls="none", color="tab:red",
                ms=4.0)
        handles.append(tangent)
        ax.axhline(0.0, color="0.85", lw=0.8, zorder=0)
        ax.set_ylabel("profile value")

    if what == "s_tilde":
        line, = ax.plot(ts, _scalar_curvature_raw(profile, ts),
                        color="tab:green", label="scalar curvature")
        handles.append(line)
        ax.set_ylabel("scalar curvature")
    elif what == "both":
        twin = ax.twinx()
        line, = twin.plot(ts, _scalar_curvature_raw(profile, ts),
                          color="tab:green", label="scalar curvature")
        handles.append(line)
        twin.set_ylabel("scalar curvature")

    ax.legend(handles=handles, loc="upper right", fontsize=8)
    ax.set_title(f"m = {profile.m}, interval [{a:g}, {b:g}]")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)

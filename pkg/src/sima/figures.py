"""Figures rendered next to the delimited report outputs.

Both renderers draw onto the Agg backend and strip volatile PNG metadata so
repeated runs produce byte-identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from sima.estimator import Role, WorkloadEstimate
from sima.timeline import ARollMode, Timeline, Track

FIGURE_RC = {
    "figure.figsize": (11.0, 4.2),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
}

_MODE_COLORS = {
    ARollMode.FULL_SCREEN.value: "#4c72b0",
    ARollMode.HIDDEN.value: "#c8c8c8",
    ARollMode.OVERLAY_CIRCLE.value: "#dd8452",
    ARollMode.OVERLAY_RECT.value: "#55a868",
}

_ROLE_COLORS = {
    Role.HUMAN: "#4c72b0",
    Role.JUNIOR_AGENT: "#dd8452",
    Role.SENIOR_AGENT: "#55a868",
}


def save_figure(fig, path: str) -> None:
    """Write a figure as PNG with fixed metadata, then release it."""
    fig.savefig(path, metadata={"Software": "sima"})
    plt.close(fig)


def render_timeline_figure(timeline: Timeline, path: str) -> None:
    """Draw the four timeline tracks as horizontal bars (seconds on the x axis)."""
    rows = [
        ("Transition", timeline.transition_graphic, "#8172b3"),
        ("Image overlay", timeline.image_overlay, "#937860"),
        ("B-roll video", timeline.b_roll_video, "#55a868"),
        ("A-roll mode", timeline.a_roll_mode, None),
    ]
    with plt.rc_context(FIGURE_RC):
        fig, ax = plt.subplots()
        for y, (label, events, color) in enumerate(rows):
            for ev in events:
                span = ((ev.start_ms / 1000.0, (ev.end_ms - ev.start_ms) / 1000.0),)
                face = color
                if ev.track is Track.A_ROLL_MODE:
                    face = _MODE_COLORS.get(ev.payload.get("mode", ""), "#4c72b0")
                ax.broken_barh(span, (y + 0.1, 0.8), facecolors=face, edgecolors="white")
        ax.set_yticks([y + 0.5 for y in range(len(rows))])
        ax.set_yticklabels([label for label, _, _ in rows])
        ax.set_xlim(0, max(timeline.duration_ms / 1000.0, 1.0))
        ax.set_xlabel("seconds")
        ax.set_title(f"Split {timeline.split} timeline")
        handles = [
            plt.Rectangle((0, 0), 1, 1, facecolor=c, label=m) for m, c in _MODE_COLORS.items()
        ]
        ax.legend(handles=handles, loc="upper right", ncol=4, frameon=False, fontsize=7)
        fig.tight_layout()
        save_figure(fig, path)


def render_workload_figure(estimate: WorkloadEstimate, path: str) -> None:
    """Draw per-step hours as horizontal bars colored by role."""
    steps = [s for s in estimate.steps]
    with plt.rc_context(FIGURE_RC):
        fig, ax = plt.subplots(figsize=(9.0, 0.42 * len(steps) + 1.6))
        ys = range(len(steps))
        ax.barh(
            list(ys),
            [s.hours for s in steps],
            color=[_ROLE_COLORS[s.role] for s in steps],
        )
        ax.set_yticks(list(ys))
        ax.set_yticklabels([f"{s.step}. {s.name}" for s in steps])
        ax.invert_yaxis()
        ax.set_xlabel("hours")
        ax.set_title(
            f"Workload: {estimate.human_hours:.2f} h human,"
            f" wall clock {estimate.wall_clock_hours:.2f} h"
        )
        handles = [
            plt.Rectangle((0, 0), 1, 1, facecolor=c, label=role.value)
            for role, c in _ROLE_COLORS.items()
        ]
        ax.legend(handles=handles, loc="lower right", frameon=False, fontsize=7)
        fig.tight_layout()
        save_figure(fig, path)

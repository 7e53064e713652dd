"""Trial-report output: delimited records plus a rendered error figure."""
from __future__ import annotations

from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .pac import TrialReport
from .textio import serialize_query

FIELDS = (
    "seed",
    "sample_size_used",
    "hypothesis",
    "empirical_error",
    "oracle_calls",
    "wall_time",
)


def format_report_line(r: TrialReport) -> str:
    hyp = (
        serialize_query(r.hypothesis).replace("\n", " | ")
        if r.hypothesis is not None
        else "-"
    )
    return "\t".join(
        (
            r.seed,
            str(r.sample_size_used),
            hyp,
            f"{float(r.empirical_error):.6f}",
            str(r.oracle_calls),
            f"{r.wall_time:.4f}",
        )
    )


def write_reports(path: str, reports: Sequence[TrialReport]) -> None:
    with open(path, "w") as fh:
        fh.write("\t".join(FIELDS) + "\n")
        for r in reports:
            fh.write(format_report_line(r) + "\n")


def render_error_figure(
    path: str, reports: Sequence[TrialReport], epsilon: Optional[float] = None
) -> None:
    """Per-trial exact error with the epsilon threshold marked."""
    errors = [float(r.empirical_error) for r in reports]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(range(1, len(errors) + 1), errors, "o", markersize=4)
    if epsilon is not None:
        ax.axhline(epsilon, linestyle="--", linewidth=1, label=f"epsilon = {epsilon}")
        ax.legend(loc="upper right")
    ax.set_xlabel("trial")
    ax.set_ylabel("exact-mode error")
    ax.set_ylim(bottom=-0.02)
    ax.set_title("PAC trial errors")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)

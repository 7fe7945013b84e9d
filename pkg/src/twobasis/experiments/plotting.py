"""Success-rate curves rendered to static SVG with matplotlib."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .report import ReportIOError  # noqa: E402

__all__ = ["plot_success_curve"]

_RC = {
    "svg.hashsalt": "twobasis",
    "svg.fonttype": "path",
    "font.size": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def plot_success_curve(results, path, title=None) -> Path:
    """One success-rate polyline per result, ``x = (|T|+|Omega|)/N``.

    Each line carries the SVG id ``curve-n<N>`` (suffixed ``-<k>`` when two
    results share ``N``) so downstream tools can find it.
    """
    results = list(results)
    if not results:
        raise ValueError("plot_success_curve needs at least one result")
    if any(not r.rows for r in results):
        raise ValueError("cannot plot a sweep with no fractions")
    path = Path(path)
    seen = {}
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        for r in results:
            n = r.config.n
            seen[n] = seen.get(n, 0) + 1
            gid = f"curve-n{n}" if seen[n] == 1 else f"curve-n{n}-{seen[n]}"
            xs = [row.fraction for row in r.rows]
            ys = [row.success_rate for row in r.rows]
            (line,) = ax.plot(xs, ys, marker="o", markersize=3, label=f"N = {n}")
            line.set_gid(gid)
        ax.set_xlim(0.0, 1.0)
        ax.set_ylim(-0.02, 1.02)
        ax.set_xlabel("(|T| + |Omega|) / N")
        ax.set_ylabel("success rate")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False, loc="upper right")
        fig.tight_layout()
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise ReportIOError(f"cannot write plot to {path}: {exc.strerror or exc}") from exc
        finally:
            plt.close(fig)
    return path

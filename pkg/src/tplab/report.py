"""Plain-text corpus summary plus figure rendering.

The report path draws, per project, the distance-bucket chart (gray bars for
the share of methods at each distance, red line for the ineffective share)
and one variable-importance bar chart, alongside the delimited outputs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import metrics, mutation, stats


def _fmt_p(p):
    if p is None:
        return "-"
    return "<0.001" if p < 0.001 else f"{p:.3f}"


def summary_text(all_artifacts, correlations):
    """One table row per project, then per-project bucket tables."""
    corr = {}
    for project_id, method, result, _ in correlations:
        corr.setdefault(project_id, {})[method] = result
    lines = []
    header = (f"{'project':<12} {'methods':>7} {'covered':>7} {'eligible':>8} "
              f"{'ineff':>5} {'%ineff':>7} {'spearman':>9} {'p':>7} "
              f"{'kendall':>8} {'p':>7}")
    lines.append(header)
    lines.append("-" * len(header))
    for art in all_artifacts:
        covered = {r.method_id for r in art.log.traces}
        ineff = sum(1 for r in art.method_rows
                    if r.label == metrics.LABEL_INEFFECTIVE)
        analyzed = len(art.method_rows)
        pct = f"{100.0 * ineff / analyzed:.1f}%" if analyzed else "-"
        by_method = corr.get(art.project_id, {})
        sp = by_method.get(stats.METHOD_SPEARMAN)
        kd = by_method.get(stats.METHOD_KENDALL)
        lines.append(
            f"{art.project_id:<12} {len(art.methods):>7} {len(covered):>7} "
            f"{analyzed:>8} {ineff:>5} {pct:>7} "
            + (f"{sp.coefficient:+9.2f} {_fmt_p(sp.p_value):>7} "
               if sp else f"{'-':>9} {'-':>7} ")
            + (f"{kd.coefficient:+8.2f} {_fmt_p(kd.p_value):>7}"
               if kd else f"{'-':>8} {'-':>7}")
        )
    lines.append("")
    for art in all_artifacts:
        if not art.method_rows:
            continue
        buckets = stats.distance_bucket_report(art.method_rows)
        lines.append(f"{art.project_id}: ineffective share per stack distance")
        lines.append(f"  {'distance':>8} {'methods':>9} {'ineffective':>12}")
        for b in buckets:
            lines.append(f"  {b.distance:>8} {b.method_proportion:>9.3f} "
                         f"{b.ineffective_proportion:>12.3f}")
        events = mutation.kill_event_report(art.matrix)
        for label, level in (("methods", events.method_level),
                             ("pairs", events.pair_level)):
            if level.killed_count:
                lines.append(
                    f"  killed {label}: {level.killed_count} "
                    f"({level.exclusively_assertion:.0%} assertion-only, "
                    f"{level.exclusively_exception:.0%} exception-only, "
                    f"{level.mixed:.0%} mixed)")
        lines.append("")
    return "\n".join(lines) + "\n"


def bucket_figure(project_id, buckets, path):
    fig, ax = plt.subplots(figsize=(6, 3.2))
    xs = [b.distance for b in buckets]
    ax.bar(xs, [b.method_proportion for b in buckets],
           color="0.85", edgecolor="0.6", label="share of methods")
    ax.plot(xs, [b.ineffective_proportion for b in buckets],
            color="red", marker="o", label="ineffective share")
    ax.set_xlabel("minimal stack distance")
    ax.set_ylabel("proportion")
    ax.set_xticks(xs)
    ax.set_ylim(0.0, 1.05)
    ax.set_title(project_id)
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def importance_figure(report, path, title="variable importance"):
    names = [name for name, _ in report]
    values = [value for _, value in report]
    fig, ax = plt.subplots(figsize=(6, 0.3 * len(names) + 1.2))
    ypos = range(len(names))[::-1]
    ax.barh(list(ypos), values, color="0.4")
    ax.set_yticks(list(ypos))
    ax.set_yticklabels(names, fontsize=7)
    ax.set_xlabel("importance (max scaled to 1)")
    ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_figures(all_artifacts, importance, out_dir):
    """Bucket chart per project and one importance chart; returns paths."""
    fig_dir = Path(out_dir) / "figures"
    fig_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for art in all_artifacts:
        if not art.method_rows:
            continue
        buckets = stats.distance_bucket_report(art.method_rows)
        path = fig_dir / f"{art.project_id}_buckets.png"
        bucket_figure(art.project_id, buckets, path)
        written.append(path)
    if importance is not None:
        path = fig_dir / "importance_method.png"
        importance_figure(importance, path,
                          title="variable importance (method level)")
        written.append(path)
    return written

"""Deterministic text outputs (trace CSV, analysis report) and the
matplotlib figures rendered alongside them."""

from __future__ import annotations

import math

import numpy as np

from .bo import BestResult, OptimizationTrace
from .fea import FEAResult, method_of_joints
from .truss import MEMBER_NAMES, DerivedDesign, TrussGeometry

CSV_HEADER = (
    "index,phase,a,b,c,theta1,theta2,d,mass_kg,max_stress_mpa,"
    "feasible,failure_mode,best_so_far_kg"
)


def fmt(value: float) -> str:
    """Render a float with 6 significant digits; infinities become 'inf'."""
    return f"{value:.6g}"


def trace_csv(trace: OptimizationTrace) -> str:
    lines = [CSV_HEADER]
    for r in trace:
        p = r.params
        lines.append(
            ",".join(
                (
                    str(r.index),
                    r.phase.value,
                    fmt(p.a),
                    fmt(p.b),
                    fmt(p.c),
                    fmt(p.theta1),
                    fmt(p.theta2),
                    fmt(r.d),
                    fmt(r.mass),
                    fmt(r.max_abs_stress),
                    "true" if r.feasible else "false",
                    r.failure_mode.value,
                    fmt(r.best_so_far_mass),
                )
            )
        )
    return "\n".join(lines) + "\n"


def write_trace_csv(path, trace: OptimizationTrace) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(trace_csv(trace))


def analysis_report(design: DerivedDesign, result: FEAResult) -> str:
    """Fixed-field text report for a single design analysis."""
    p = design.params
    lines = [
        "truss analysis",
        f"  a      = {fmt(p.a):>12} mm",
        f"  b      = {fmt(p.b):>12} mm",
        f"  c      = {fmt(p.c):>12} mm",
        f"  d      = {fmt(design.d):>12} mm",
        f"  theta1 = {fmt(p.theta1):>12} deg",
        f"  theta2 = {fmt(p.theta2):>12} deg",
    ]
    if result.axial_forces is not None:
        lines.append("member      force_n     stress_mpa")
        for name, force, stress in zip(
            MEMBER_NAMES, result.axial_forces, result.axial_stresses
        ):
            lines.append(f"  {name:<8} {fmt(force):>12} {fmt(stress):>12}")
    lines += [
        f"max_abs_stress = {fmt(result.max_abs_stress)} MPa",
        f"mass           = {fmt(result.mass)} kg",
        f"feasible       = {'true' if result.feasible else 'false'}",
        f"failure_mode   = {result.failure_mode.value}",
    ]
    return "\n".join(lines) + "\n"


def best_result_report(best: BestResult) -> str:
    p = best.params
    lines = [
        "best design",
        f"  a      = {fmt(p.a):>12} mm",
        f"  b      = {fmt(p.b):>12} mm",
        f"  c      = {fmt(p.c):>12} mm",
        f"  d      = {fmt(best.d):>12} mm",
        f"  theta1 = {fmt(p.theta1):>12} deg",
        f"  theta2 = {fmt(p.theta2):>12} deg",
        f"  mass           = {fmt(best.mass)} kg",
        f"  max_abs_stress = {fmt(best.max_abs_stress)} MPa",
        f"  found at evaluation {best.found_at_index} of {best.evaluations_used}",
    ]
    return "\n".join(lines) + "\n"


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _draw_truss(ax, geometry: TrussGeometry, forces: np.ndarray | None) -> None:
    nodes = np.asarray(geometry.nodes)
    if forces is not None and len(forces):
        scale = max(float(np.abs(forces).max()), 1.0)
    else:
        scale = 1.0
    for k, (i, j) in enumerate(geometry.members):
        x = [nodes[i, 0], nodes[j, 0]]
        y = [nodes[i, 1], nodes[j, 1]]
        if forces is None:
            color, width = "0.3", 1.5
        else:
            f = forces[k]
            if abs(f) < 1e-9 * scale:
                color = "0.6"
            else:
                color = "tab:red" if f > 0 else "tab:blue"
            width = 1.0 + 3.0 * abs(f) / scale
        ax.plot(x, y, color=color, linewidth=width, solid_capstyle="round", zorder=1)
    ax.scatter(nodes[:, 0], nodes[:, 1], s=18, color="black", zorder=2)
    span = max(float(nodes[:, 0].max() - nodes[:, 0].min()), 1.0)
    for node, fix_x, fix_y in geometry.supports:
        marker = "^" if fix_x and fix_y else "o"
        ax.scatter(
            [nodes[node, 0]], [nodes[node, 1] - 0.01 * span], marker=marker, s=70,
            color="black", zorder=3,
        )
    for node, fx, fy in geometry.load_points:
        if fx == 0.0 and fy == 0.0:
            continue
        norm = math.hypot(fx, fy)
        ax.annotate(
            "",
            xy=(nodes[node, 0], nodes[node, 1]),
            xytext=(
                nodes[node, 0] - 0.06 * span * fx / norm,
                nodes[node, 1] - 0.06 * span * fy / norm,
            ),
            arrowprops=dict(arrowstyle="-|>", color="tab:green", lw=1.4),
            zorder=4,
        )
    ax.set_aspect("equal")
    ax.set_xlabel("x (mm)")
    ax.set_ylabel("y (mm)")


def render_truss_figure(path, geometry: TrussGeometry, forces=None, title: str = "") -> None:
    """Draw the truss with members colored by sense (red tension, blue
    compression) and width by force magnitude."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(9, 4))
    _draw_truss(ax, geometry, None if forces is None else np.asarray(forces))
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_trace_figure(
    path,
    trace: OptimizationTrace,
    best: BestResult | None,
    total_load: float | None = None,
) -> None:
    """Convergence figure for an optimization run: per-evaluation masses
    (feasible vs infeasible) with the best-so-far envelope, and the best
    truss layout (forces under ``total_load``) when one exists."""
    plt = _pyplot()
    if best is not None:
        fig, (ax, ax_truss) = plt.subplots(
            1, 2, figsize=(11, 4), gridspec_kw={"width_ratios": [3, 2]}
        )
    else:
        fig, ax = plt.subplots(figsize=(7, 4))
        ax_truss = None

    idx = np.array([r.index for r in trace])
    masses = np.array([r.mass for r in trace])
    feasible = np.array([r.feasible for r in trace])
    best_curve = np.array([r.best_so_far_mass for r in trace])
    ax.scatter(
        idx[feasible], masses[feasible], s=14, color="tab:blue", label="feasible",
    )
    if (~feasible).any():
        ax.scatter(
            idx[~feasible], masses[~feasible], s=14, marker="x", color="tab:red",
            label="infeasible",
        )
    has_best = np.isfinite(best_curve)
    if has_best.any():
        ax.step(
            idx[has_best], best_curve[has_best], where="post", color="black",
            label="best so far",
        )
    ax.set_xlabel("evaluation")
    ax.set_ylabel("mass (kg)")
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title("mass minimization trace")

    if ax_truss is not None and best is not None:
        from .truss import DEFAULT_TOTAL_LOAD_N, build_geometry, build_load_case, derive_design

        load = DEFAULT_TOTAL_LOAD_N if total_load is None else total_load
        design = derive_design(best.params)
        geometry = build_load_case(build_geometry(design), load)
        try:
            forces = method_of_joints(geometry)
        except Exception:
            forces = None
        _draw_truss(ax_truss, geometry, forces)
        ax_truss.set_title(f"best design, {fmt(best.mass)} kg")

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

"""Edge-stimulus trajectories: sharp line vs rounded ellipse.

The sharpest edge is the degenerate ellipse r_x = 0: the focus sweeps a
3 mm line down and back at 5 Hz, stepping at most 0.2 mm between positions.
Growing r_x rounds the edge. This script samples both, prints the numbers
the scheduler cares about, and plots the sampled points.

Run:  python3 demos/03_stimulus_trajectories.py
"""

import os

import numpy as np

from airhaptics import EllipseTrajectory, ellipse_perimeter, sample_trajectory

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

center = np.array([0.0, 0.0, 0.21])
EX, EY = np.array([1.0, 0, 0]), np.array([0.0, 1, 0])

cases = {
    "sharp edge (r_x = 0)": EllipseTrajectory(center=center, u_axis=EX, v_axis=EY,
                                              r_x=0.0, r_y=3e-3),
    "rounded edge (r_x = 1 mm)": EllipseTrajectory(center=center, u_axis=EX, v_axis=EY,
                                                   r_x=1e-3, r_y=3e-3),
    "circle (r_x = r_y = 3 mm)": EllipseTrajectory(center=center, u_axis=EX, v_axis=EY,
                                                   r_x=3e-3, r_y=3e-3),
}

sequences = {}
for name, traj in cases.items():
    seq = sample_trajectory(traj)
    sequences[name] = seq
    sp = seq.spacings()
    print(f"{name}:")
    print(f"  perimeter {ellipse_perimeter(traj.r_x, traj.r_y) * 1e3:7.3f} mm"
          f"  -> {len(seq)} points at {traj.lm_frequency} Hz")
    print(f"  dwell {seq.dwell * 1e3:.4f} ms, step max {sp.max() * 1e3:.4f} mm "
          f"(limit {traj.step_width * 1e3:.1f} mm)")

print("\nEvery loop closes in exactly 1/lm_frequency seconds; the sharp line")
print("visits each interior position twice per period (down and back).")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, len(sequences), figsize=(4 * len(sequences), 4))
    for ax, (name, seq) in zip(axes, sequences.items()):
        u = (seq.points - center) @ EX * 1e3
        v = (seq.points - center) @ EY * 1e3
        ax.plot(u, v, ".-", ms=3, lw=0.5)
        ax.plot(u[0], v[0], "o", color="crimson", label="start")
        ax.set_title(name, fontsize=9)
        ax.set_xlabel("x (mm)")
        ax.set_ylabel("y (mm)")
        ax.set_aspect("equal")
        ax.set_xlim(-4, 4)
        ax.set_ylim(-4, 4)
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(os.path.join(OUT, "trajectories.png"), dpi=130)
    print(f"\nwrote {OUT}/trajectories.png")
except ImportError:
    print("matplotlib not available; skipped the PNG")

"""Compile stimuli into timed per-transducer frames and round-trip the file.

A device driver consumes frames: (timestamp, phases[], amplitudes[]) at a
fixed control rate. Lateral modulation holds amplitude at 1 and steps the
focusing phases along the trajectory; amplitude modulation keeps phases
fixed and shapes the envelope. Both compile to the same binary format.

Run:  python3 demos/04_frame_schedules.py
"""

import os

import numpy as np

from airhaptics import (AmEnvelope, DeviceSpec, EllipseTrajectory, Medium,
                        build_array, compile_am, compile_lm, sample_trajectory)
from airhaptics.io import read_schedule_binary, write_schedule_binary

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

medium = Medium()
layout = build_array([DeviceSpec(rows=6, cols=8, pitch=10.16e-3)])
focus = np.array([0.0, 0.0, 0.15])

# --- lateral modulation: 3 mm line at 5 Hz, 1 kHz control rate --------------
traj = EllipseTrajectory(center=focus, u_axis=[1, 0, 0], v_axis=[0, 1, 0],
                         r_x=0.0, r_y=3e-3, lm_frequency=5.0, step_width=0.2e-3)
seq = sample_trajectory(traj)
lm = compile_lm(layout, seq, medium, control_rate=1000.0, quantize_bits=8)
holds = np.unique([np.sum((np.arange(len(lm)) * len(seq)) // len(lm) == j)
                   for j in range(len(seq))])
print(f"LM: {len(seq)} focus points -> {len(lm)} frames at {lm.control_rate:.0f} Hz")
print(f"    each point held for {holds.tolist()} consecutive frames")
print(f"    phases quantized to 8 bits: "
      f"{len(np.unique(np.round(lm.phases / (2 * np.pi / 256))))} distinct levels used")

path = os.path.join(OUT, "lm_schedule.fsch")
write_schedule_binary(lm, path)
back = read_schedule_binary(path)
print(f"    wrote {path} ({os.path.getsize(path)} bytes), "
      f"round-trip max phase error {np.max(np.abs(back.phases - lm.phases)):.2e} rad")

# --- amplitude modulation: 100 Hz sine at the same focus --------------------
am = compile_am(layout, focus, AmEnvelope(am_frequency=100.0, waveform="sine", depth=1.0),
                medium, control_rate=2000.0)
print(f"\nAM: {len(am)} frames per envelope period, amplitudes in "
      f"[{am.amplitudes.min():.3f}, {am.amplitudes.max():.3f}], phases static")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(2, 1, figsize=(8, 5), sharex=False)
    axes[0].step(lm.timestamps * 1e3, lm.phases[:, 0], where="post", lw=0.8)
    axes[0].set_title("LM: transducer 0 phase (zero-order hold)")
    axes[0].set_xlabel("time (ms)")
    axes[0].set_ylabel("phase (rad)")
    axes[1].step(am.timestamps * 1e3, am.amplitudes[:, 0], where="post", lw=0.8,
                 color="darkorange")
    axes[1].set_title("AM: amplitude envelope (100 Hz sine, depth 1)")
    axes[1].set_xlabel("time (ms)")
    axes[1].set_ylabel("amplitude")
    fig.tight_layout()
    fig.savefig(os.path.join(OUT, "schedules.png"), dpi=130)
    print(f"\nwrote {OUT}/schedules.png")
except ImportError:
    print("matplotlib not available; skipped the PNG")

"""Band capture on a medium with an isolated spectral ring.

The sparse-ring generator puts all of the coefficient's oscillation into
wavenumbers between k_min and k_max. That makes the bandwidth story
sharp: a raw low-pass filter is blind to the medium until the cutoff
reaches the ring, then captures everything at once. The homogenized
model feels the ring earlier, through eliminated-mode corrections that
land inside the coarse band.
"""

import tempfile
from pathlib import Path

from spechom.experiments import ExperimentConfig, run_sweep_1d


def main():
    out = Path(tempfile.mkdtemp(prefix="spechom_demo_"))
    n = 256
    config = ExperimentConfig(
        kind="sweep1d",
        n_x=n,
        generator="sparse_annulus",
        seed=7,
        water_level=0.5,
        amplitude=0.4,
        k_min=8,
        k_max=12,
        # cutoffs 0, 2, 4 sit below the ring, 8 touches its lower edge,
        # and 12, 13, 16 cover it entirely
        bandwidths=(0.0, 1.5625, 3.125, 6.25, 9.375, 10.15625, 12.5),
        out=str(out),
    )
    records = run_sweep_1d(config)

    by_percent: dict[float, dict[str, float]] = {}
    for record in records:
        by_percent.setdefault(record.bandwidth_pct, {})[record.method] = record.l2

    print("=== ring medium, oscillation confined to wavenumbers 8..12 ===")
    print("cutoff   homogenized      raw filtered     raw/homogenized")
    for percent in sorted(by_percent):
        row = by_percent[percent]
        cutoff = config.cutoff_for(percent)
        ratio = row["raw-filtered"] / row["homogenized"]
        marker = ""
        if cutoff < 8:
            marker = "  (below the ring)"
        elif cutoff >= 12:
            marker = "  (ring fully inside the band)"
        print(
            f"  {cutoff:4d}   {row['homogenized']:.6e}   "
            f"{row['raw-filtered']:.6e}   {ratio:8.2f}{marker}"
        )

    below = [
        by_percent[p]["raw-filtered"]
        for p in sorted(by_percent)
        if config.cutoff_for(p) < 8
    ]
    spread = (max(below) - min(below)) / min(below)
    print()
    print(f"raw error spread below the ring: {100 * spread:.2f}% "
          f"(the filter cannot see the medium there)")
    print("once the band swallows the ring the filtered coefficient is the")
    print("coefficient, so the raw model matches the truth to rounding while")
    print("elimination carries a small residual model error")
    print("sweep files written under", out)


if __name__ == "__main__":
    main()

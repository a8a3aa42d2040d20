"""Denoising a synthetic anatomical volume: same variance cut, very
different bias.

A deterministic brain phantom (white-matter core with a folded boundary,
gray-matter shell, CSF ribbon) is measured 10 times under heavy i.i.d.
noise (sigma 300 on a 0-1400 intensity scale).  Four treatments are
scored: leaving the data alone, 3-mm Gaussian smoothing, averaging with a
misregistered template, and 20 iterations of edge-preserving nonlinear
diffusion.

The punchline from the summary table: Gaussian smoothing and diffusion cut
variance by an order of magnitude, but only the Gaussian pays for it with
a bias an order of magnitude above the unbiased baseline.  Error
(correlation with truth) barely separates them, which is exactly why bias
needs its own metric.
"""

from pathlib import Path

from dgauge import ScenarioSpec, phantom_bundle, run_scenario
from dgauge.io import render_summary_svg, write_report, write_volume

out_dir = Path(__file__).parent / "output" / "anatomical"
out_dir.mkdir(parents=True, exist_ok=True)

bundle = phantom_bundle(n=48)
print(f"phantom: {bundle.volume.dims} voxels, "
      f"{int(bundle.brain_mask.sum())} inside the brain mask")
write_volume(out_dir / "phantom.dgv", bundle.volume, voxel_mm=0.8)
print(f"ground-truth volume written to {out_dir / 'phantom.dgv'}")

spec = ScenarioSpec(name="anatomical", seed=0, phantom_n=48)
report = run_scenario(spec, workers=4)

print(f"\nunbiased baseline for m=10: {report.baseline:.4f}")
print(f"{'method':<14} {'bias':>8} {'variance':>10} {'error':>8}")
for o in report.outcomes:
    s = o.summary
    print(f"{o.name:<14} {s.bias:>8.3f} {s.variance:>10.3f} {s.error:>8.4f}")

paths = write_report(report, out_dir)
render_summary_svg(report, out_dir / "report.svg")
print(f"\nreport: {paths['json']}")
print(f"chart:  {out_dir / 'report.svg'}")

"""Myopic deconvolution of a photograph instead of a prior draw.

Usage: ``python3 demos/natural_image.py photo.pgm [out_dir]``. Any grayscale
PGM works; other formats need Pillow. The image is cropped to a square,
blurred with the default PSF and restored with the PSF unknown.
"""

import sys
from pathlib import Path

from wienerhunt import analysis, cli
from wienerhunt.config import ExperimentConfig

if len(sys.argv) < 2:
    sys.exit(__doc__)
out = Path(sys.argv[2] if len(sys.argv) > 2 else "natural_out")
cfg = ExperimentConfig(from_image=sys.argv[1], out_dir=str(out), gamma_eps=0.5)

sim = cli.cmd_simulate(cfg)
print(f"{sim.truth.shape[0]}x{sim.truth.shape[0]} image, data error {sim.metadata['error_data']:.4f}")

# The smoothness prior is a poor model of edges and texture, so expect a
# larger residual error than on the synthetic phantom; the PSF should still
# be located inside its box.
dec = cli.cmd_deconvolve(cfg, sim.paths["data"])
s = dec.summary
print(f"estimate error {analysis.error_index(dec.result.estimate, sim.truth):.4f} "
      f"after {dec.result.chains.n_iter} iterations")
for name in ("w_alpha", "w_beta", "phi"):
    print(f"{name}: truth {getattr(cfg, name):.3f}, estimate {s.mean[name]:.3f} +/- {s.std[name]:.3f}")

"""Bob's two-pixel ghost images for every image Alice can prepare.

Alice holds detectors 1 and 2 and prepares one of the four binary images,
Bob reads detectors 3 and 4 after she post-selects on ground states.  Prints
the pixel intensities and writes a greyscale SVG panel.

    python scripts/four_pixel_image.py --out results/
"""

import argparse
import itertools
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from udwghost.protocol import Projector, ghost_image_2px, post_select  # noqa: E402
from udwghost.register import RegisterState, assemble_rho, g_table  # noqa: E402
from udwghost.scenario import load_scenario  # noqa: E402
from udwghost.spdc import GexpCache  # noqa: E402


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--theta", type=float)
    args = ap.parse_args(argv)

    s = load_scenario("table2").with_overrides(theta=args.theta)
    cache = GexpCache(s.model, s.spdc, s.detectors, s.tau, s.quadrature).warm()
    gt = g_table(s.n, cache)

    images = {}
    for alice in itertools.product("ge", repeat=2):
        rho = assemble_rho(RegisterState(alice + ("g", "g"), s.tau), gt, s.detectors)
        rho, p2 = post_select(rho, Projector(1, "g"))
        rho, p1 = post_select(rho, Projector(0, "g"))
        prob = p1 * p2
        img = ghost_image_2px(rho)
        images["".join(alice)] = img.pixels
        print(f"Alice {''.join(alice)}  post-selection p={prob:.6f}  Bob pixels {img.pixels[0]:.10f} {img.pixels[1]:.10f}")

    # rescale to the observed range so the tiny differences are visible
    flat = [x for px in images.values() for x in px]
    lo, hi = min(flat), max(flat)
    fig, axes = plt.subplots(2, 4, figsize=(8, 4))
    for k, (alice, px) in enumerate(images.items()):
        axes[0, k].imshow([[1.0 if c == "e" else 0.0 for c in alice]], cmap="gray", vmin=0, vmax=1)
        axes[0, k].set_title(f"Alice {alice}")
        axes[1, k].imshow([[(x - lo) / (hi - lo or 1.0) for x in px]], cmap="gray", vmin=0, vmax=1)
        axes[1, k].set_title("Bob (rescaled)")
        for ax in axes[:, k]:
            ax.set_xticks([])
            ax.set_yticks([])
    fig.tight_layout()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context({"svg.hashsalt": "udwghost"}):
        fig.savefig(out / "four_pixel_images.svg", format="svg", metadata={"Date": None})
    print(out / "four_pixel_images.svg")


if __name__ == "__main__":
    main()

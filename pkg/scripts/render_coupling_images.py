#!/usr/bin/env python3
"""Render detected-intensity images across a range of coupling strengths.

Reproduces the visual trend of the sequential train: a centered spot at zero
coupling that splits into four lobes of weight 1/16, 9/16, 3/16, 3/16 once
the conditional displacement clears the beam width.
"""

import argparse
from pathlib import Path

from seqweak.experiments import DEFAULT_SIGMA_MM, Scenario, ScenarioKind, scenario_intensity_image
from seqweak.grid import GridSpec, discrete_means, render_pgm


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=Path("images"))
    parser.add_argument("--sigma-mm", type=float, default=DEFAULT_SIGMA_MM)
    parser.add_argument("--grid-size", type=int, default=256)
    parser.add_argument("--pixel-um", type=float, default=13.5)
    parser.add_argument(
        "--deltas-mm", type=float, nargs="+", default=[0.0, 0.12, 0.24, 0.37],
        help="coupling strengths to render",
    )
    parser.add_argument(
        "--separated-lobes", action="store_true",
        help="add a delta = 10 sigma panel on a 1024^2 grid",
    )
    return parser.parse_args()


def render(scenario, delta_mm, grid, path):
    image = scenario_intensity_image(scenario, delta_mm, grid)
    path.write_bytes(render_pgm(image))
    means = discrete_means(image)
    print(
        f"delta = {delta_mm:.4f} mm -> {path}  "
        f"(x = {means.x_mm:.4f} mm, y = {means.y_mm:.4f} mm, xy = {means.xy_mm2:.5f} mm^2)"
    )


def main():
    args = parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    scenario = Scenario(ScenarioKind.SEQUENTIAL, sigma_mm=args.sigma_mm)
    grid = GridSpec(args.grid_size, args.grid_size, args.pixel_um)
    for delta in args.deltas_mm:
        render(scenario, delta, grid, args.out_dir / f"intensity_{delta:.3f}mm.pgm")
    if args.separated_lobes:
        delta = 10.0 * args.sigma_mm
        render(scenario, delta, GridSpec(1024, 1024, 13.5),
               args.out_dir / f"intensity_{delta:.3f}mm_lobes.pgm")


if __name__ == "__main__":
    main()

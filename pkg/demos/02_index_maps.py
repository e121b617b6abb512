"""Build the index maps that drive nearest-neighbor upscaling.

A 4-pixel strip upscaled to 7 pixels: each destination coordinate maps
back to a real source coordinate (dst * 4/7), which a rounding rule
snaps to an integer source index. Floor pushes the first coordinate to
0, outside the image, so it is clamped back to 1 (flagged below).
Run with: python3 demos/02_index_maps.py
"""

import numpy as np

from nnround import PixelBuffer, ScalePair, build_index_map, resize_nn
from nnround.rounding import RoundingRule

pair = ScalePair(src_length=4, dest_length=7)
rules = [RoundingRule.FLOOR, RoundingRule.CEIL, RoundingRule.HALF_AWAY_FROM_ZERO]
maps = {rule: build_index_map(pair, rule) for rule in rules}

print(f"{'dst':>3} | {'raw':>6} | " + " | ".join(f"{r.display_name:>5}" for r in rules))
for i in range(pair.dest_length):
    raw = maps[rules[0]].raw_coords[i]
    cells = []
    for rule in rules:
        m = maps[rule]
        flag = "*" if m.clamped[i] else " "
        cells.append(f"{m.src_indices[i]:>4}{flag}")
    print(f"{i + 1:>3} | {raw:>6.2f} | " + " | ".join(cells))
print("(* = rounded index fell outside [1, 4] and was clamped)")

strip = PixelBuffer(np.array([[10, 20, 30, 40]], dtype=np.uint8))
print("\nStrip [10, 20, 30, 40] upscaled to length 7:")
for rule in rules:
    out = resize_nn(strip, 7, 1, rule).data.ravel().tolist()
    print(f"  {rule.display_name:>5}: {out}")

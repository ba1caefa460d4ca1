# SPDX-FileCopyrightText: 2026 voxcraft contributors
# SPDX-License-Identifier: Apache-2.0
"""Writes the furnished sample room (world.json, poses.json) to a directory."""

import argparse
import json
from pathlib import Path

SIZE_X, SIZE_Y, SIZE_Z = 24, 7, 24

SOFA = [(0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0), (0, 0, 1), (0, 1, 0), (1, 1, 0), (2, 1, 0), (3, 1, 0)]
BED = [(x, 0, z) for x in range(2) for z in range(3)] + [(0, 1, 0), (1, 1, 0)]
TABLE = [(x, 1, z) for x in range(3) for z in range(2)] + [(0, 0, 0), (2, 0, 1)]
CHAIR = [(0, 0, 0), (0, 1, 0), (0, 0, 1)]


def turned(shape):
    """One clockwise quarter turn seen from above, shifted back to the origin."""
    moved = [(-z, y, x) for x, y, z in shape]
    lo = [min(v[i] for v in moved) for i in range(3)]
    return [(x - lo[0], y - lo[1], z - lo[2]) for x, y, z in moved]


def room():
    blocks = {}
    for x in range(SIZE_X):
        for z in range(SIZE_Z):
            blocks[(x, 0, z)] = "minecraft:oak_planks"
            blocks[(x, SIZE_Y - 1, z)] = "minecraft:white_concrete"
            if x in (0, SIZE_X - 1) or z in (0, SIZE_Z - 1):
                for y in range(1, SIZE_Y - 1):
                    blocks[(x, y, z)] = "minecraft:smooth_quartz"
    for x in range(9, 15):
        for y in (2, 3):
            blocks[(x, y, SIZE_Z - 1)] = "minecraft:glass"

    def place(shape, at, name):
        for dx, dy, dz in shape:
            blocks[(at[0] + dx, at[1] + dy, at[2] + dz)] = name

    place(turned(SOFA), (4, 1, 5), "minecraft:gray_wool")
    place(BED, (17, 1, 16), "minecraft:red_wool")
    place(TABLE, (10, 1, 10), "minecraft:spruce_planks")
    place(CHAIR, (14, 1, 10), "minecraft:oak_stairs")
    return blocks


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out", type=Path)
    out = ap.parse_args().out
    out.mkdir(parents=True, exist_ok=True)
    blocks = room()
    world = {
        "bounds": {"min": [0, 0, 0], "max": [SIZE_X - 1, SIZE_Y - 1, SIZE_Z - 1]},
        "blocks": [[x, y, z, name] for (x, y, z), name in sorted(blocks.items())],
    }
    (out / "world.json").write_text(json.dumps(world) + "\n")
    poses = [
        {"frame": "south", "pos": [12.5, 1.6, 1.5], "yaw_deg": 0, "pitch_deg": 20},
        {"frame": "north", "pos": [12.5, 1.6, 22.5], "yaw_deg": 180, "pitch_deg": 20},
        {"frame": "west", "pos": [1.5, 1.6, 12.5], "yaw_deg": -90, "pitch_deg": 20},
        {"frame": "east", "pos": [22.5, 1.6, 12.5], "yaw_deg": 90, "pitch_deg": 20},
        {"frame": "corner", "pos": [2.5, 1.6, 2.5], "yaw_deg": -45, "pitch_deg": 10},
    ]
    (out / "poses.json").write_text(json.dumps(poses, indent=2) + "\n")
    templates = [
        {"name": "sofa_l", "class": "sofa", "voxels": [list(v) for v in SOFA]},
        {"name": "bed_single", "class": "bed", "voxels": [list(v) for v in BED]},
        {"name": "table_3x2", "class": "table", "voxels": [list(v) for v in TABLE]},
        {"name": "chair", "class": "chair", "voxels": [list(v) for v in CHAIR],
         "blocks": [[0, 0, 0, "minecraft:oak_stairs[facing=north]"], [0, 1, 0, "minecraft:oak_planks"],
                    [0, 0, 1, "minecraft:oak_slab"]]},
    ]
    (out / "templates.json").write_text(json.dumps(templates, indent=2) + "\n")


if __name__ == "__main__":
    main()

"""Quick end-to-end check of the phasegeo_py extension module.

Build it first, e.g. `maturin develop -m crates/python/Cargo.toml`, or copy
target/release/libphasegeo_py.so next to this script as phasegeo_py.so.
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import phasegeo_py as pg


def check_distance():
    grid = pg.Grid(2, 64)
    d = pg.fast_march(pg.Field.constant(grid, 1.0), [[0.37, 0.52]])
    x = [0.7, 0.5]
    exact = math.dist(x, [0.37, 0.52])
    assert abs(d.value_at(x) - exact) < 2 * grid.h, d.value_at(x)
    line = d.backtrack(x)
    length = sum(math.dist(a, b) for a, b in zip(line, line[1:]))
    assert abs(length - exact) < 0.05 * exact, length


def check_isosurface():
    grid = pg.Grid(3, 32)
    r = [math.dist(p, [0.5, 0.5, 0.5]) for p in grid.nodes()]
    mesh = pg.Field(grid, r).isosurface(0.3)
    area = mesh.measure()
    assert abs(area - 4 * math.pi * 0.09) < 0.03, area
    assert len(mesh.components()) == 1


def check_solver():
    text = """
name = smoke
model = at
dim = 2
n = 32
max_iters = 60

[object 0]
type = point
at = 0.2, 0.5

[object 1]
type = point
at = 0.8, 0.5

[pair]
from = 1
to = 0
"""
    cfg = pg.Config.parse(text)
    assert pg.Config.parse(cfg.to_text()).to_text() == cfg.to_text()
    sol = cfg.solve()
    assert sol.iterations > 0
    assert abs(sol.extent - 0.6) < 0.06, sol.extent
    try:
        pg.Config.parse("bogus = 1")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown key accepted")


if __name__ == "__main__":
    check_distance()
    check_isosurface()
    check_solver()
    print("smoke test passed")

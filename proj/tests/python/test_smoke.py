"""Smoke tests for the python bindings."""

import os

import numpy as np
import pytest

import dcs

MASKS = os.path.join(os.environ.get("DCS_ROOT", "."), "masks")


def read_mask(name: str) -> "dcs.Mask":
    with open(os.path.join(MASKS, name)) as f:
        return dcs.Mask.parse(f.read())


def test_mask_surface():
    m = read_mask("box_r2.mask")
    assert m.rank == 2
    assert len(m.offsets) == 24
    assert not m.includes_center
    assert dcs.validate_mask_symmetry(m) is None
    balance = dcs.mask_parity_balance(m)
    assert (balance.even, balance.odd) == (12, 12)

    with pytest.raises(dcs.DcsError):
        dcs.Mask.parse("DIM 2\nRANK 1\n010\n111\n000\n")


def test_grid_roundtrip_and_numpy():
    g = dcs.random_initial([9, 7], 5, 123)
    counts = dcs.count_states(g)
    assert (counts.a, counts.b, counts.c) == (58, 5, 0)
    arr = g.to_array()
    assert arr.shape == (9, 7)
    assert (arr == 1).sum() == 5
    back = dcs.Grid.from_array(arr, "PP")
    assert back == g
    assert dcs.Grid.parse(g.to_text()) == g


def test_step_and_reversibility():
    m = read_mask("box_r1.mask")
    g = dcs.random_initial([12, 12], 6, 9)
    fwd = dcs.step_forward(g, m)
    assert dcs.step_backward(fwd, m) == g
    assert dcs.naive_step_forward(g, m) == fwd
    assert dcs.transliterate(dcs.transliterate(g)) == g


def test_run_and_analyses():
    m = read_mask("box_r1.mask")
    g = dcs.Grid([12, 12])
    for p in [(2, 3), (7, 7), (5, 10), (9, 1)]:
        g.set(list(p), dcs.Cell.B)
    out = dcs.run_to_mirror(g, m, 5000)
    assert out.returned and out.t_half == 349

    mcl = dcs.mcl_lambda(g, m, out.t_half)
    assert mcl.all_equal and mcl.divisible_by_4 and mcl.lambda_ == 7

    gs = dcs.compute_g_series(g, m, out.t_half)
    assert dcs.main_integral(gs, 0, out.t_half, out.t_half) == 4 * 7 * 144

    events = dcs.detect_local_reversals(out.nc_series)
    assert events[-1].t == out.t_half and events[-1].nc_value == 0

    run = dcs.Trajectory(g, m)
    w = dcs.frame_window(run, 0)
    af = dcs.a_filter(w)
    assert af.values.shape == (12, 12)
    assert (af.values % 2 == 0).all()


def test_filters_and_structures():
    m = read_mask("box_r2.mask")
    run = dcs.Trajectory(dcs.random_initial([16, 16], 6, 4), m)
    b = dcs.b_filter(run, 5, 1, 0)
    b0a = dcs.b_filter(run, 4, 0, 0)
    b0b = dcs.b_filter(run, 5, 0, 0)
    b0c = dcs.b_filter(run, 6, 0, 0)
    assert (b.values == b0a.values + b0b.values + b0c.values).all()

    marked = np.zeros((5, 6), dtype=np.uint8)
    marked[2, :] = 1
    comps = dcs.label_components(marked, "PP")
    assert len(comps) == 1 and comps[0].wraps == [False, True]


def test_sweep_determinism(tmp_path):
    cfg = dcs.SweepConfig()
    cfg.mask_paths = [os.path.join(MASKS, "box_r1.mask")]
    cfg.dims = [10, 10]
    cfg.n_points = 3
    cfg.seeds = [1, 2, 3]
    cfg.max_steps = 2000
    rows1 = dcs.sweep(cfg, 1)
    rows4 = dcs.sweep(cfg, 4)
    assert dcs.sweep_csv(rows1) == dcs.sweep_csv(rows4)
    assert len(rows1) == 3

    out = tmp_path / "rows.csv"
    dcs.write_sweep_outputs(rows1, str(out))
    assert out.read_text().startswith("mask_id,seed,dims,n_points,returned")
    assert (tmp_path / "rows.csv.timing.csv").exists()


def test_render(tmp_path):
    g = dcs.Grid([2, 2])
    g.set([0, 1], dcs.Cell.B)
    images = dcs.render_state(g, dcs.Palette.defaults(), 1, str(tmp_path / "s.ppm"))
    assert len(images) == 1
    ppm = images[0][1].to_ppm()
    assert ppm.startswith(b"P6\n2 2\n255\n")
    assert ppm[11:17] == bytes([255, 255, 255, 0, 0, 255])

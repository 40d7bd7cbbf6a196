import tracemalloc

import numpy as np
import pytest

from app.cube_io.models import GridField, GridMeta
from app.segmentation.gradient_service import ascent_pointers, segment_gradient_ascent
from app.segmentation.models import LabelVolume, SegmentationError
from app.segmentation.services import (
    nearest_atom,
    power_distance,
    segment_power_diagram,
    segment_stats,
    subgroup_labels,
    voxel_coordinates,
)
from app.synthetic import box_grid, gaussian_field, two_gaussian_pair
from factories import molecule


def _grid(counts, lo=-2.0, hi=2.0) -> GridMeta:
    origin, axes = box_grid(counts, lo, hi)
    return GridMeta(origin=origin, counts=tuple(counts), axes=axes)


def _brute_force_labels(grid: GridMeta, positions, radii) -> list[int]:
    nx, ny, nz = grid.counts
    out = []
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                x = grid.origin + i * grid.axes[0] + j * grid.axes[1] + k * grid.axes[2]
                dists = [power_distance(x, p, r) for p, r in zip(positions, radii)]
                out.append(dists.index(min(dists)))
    return out


@pytest.mark.parametrize(
    "x,p,r,expected",
    [
        ((0, 0, 0), (0, 0, 0), 1.0, -1.0),
        ((3, 4, 0), (0, 0, 0), 0.0, 25.0),
        ((1, 0, 0), (0, 0, 0), 2.0, -3.0),
    ],
)
def test_power_distance(x, p, r, expected):
    assert power_distance(x, p, r) == expected


def test_symmetric_pair_splits_at_midplane():
    grid = _grid((8, 5, 5))
    m = molecule([(-1, 0, 0), (1, 0, 0)])
    lv = segment_power_diagram(grid, m)
    x, _, _ = voxel_coordinates(grid)
    assert np.all(lv.labels[x < 0] == 0)
    assert np.all(lv.labels[x > 0] == 1)


def test_midplane_tie_goes_to_lower_index():
    grid = _grid((5, 3, 3))
    m = molecule([(-1, 0, 0), (1, 0, 0)])
    lv = segment_power_diagram(grid, m)
    x, _, _ = voxel_coordinates(grid)
    assert np.all(lv.labels[x == 0] == 0)


def test_single_atom_owns_everything():
    grid = _grid((4, 4, 4))
    lv = segment_power_diagram(grid, molecule([(0.3, 0, 0)]))
    assert lv.counts_per_label().tolist() == [64]


def test_larger_radius_pushes_boundary():
    grid = _grid((9, 1, 1))
    m = molecule([(-1, 0, 0), (1, 0, 0)], radii=[2.0, 1.0])
    lv = segment_power_diagram(grid, m)
    # ||x+1||² - 4 = ||x-1||² - 1  =>  x = 3/4
    x, _, _ = voxel_coordinates(grid)
    assert np.all(lv.labels[x < 0.75] == 0)
    assert np.all(lv.labels[x > 0.75] == 1)


def _argmin_oracle(grid: GridMeta, positions, radii) -> np.ndarray:
    pts = np.column_stack(voxel_coordinates(grid))
    diff = pts[:, None, :] - np.asarray(positions)[None, :, :]
    dist = np.einsum("pac,pac->pa", diff, diff) - np.asarray(radii)[None, :] ** 2
    return np.argmin(dist, axis=1)


def test_matches_brute_force_on_random_instances():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        counts = tuple(int(c) for c in rng.integers(1, 17, size=3))
        n_atoms = int(rng.integers(1, 6))
        lo = float(rng.uniform(-4, -1))
        grid = _grid(counts, lo, lo + float(rng.uniform(2, 6)))
        positions = rng.uniform(-3, 3, size=(n_atoms, 3))
        radii = rng.uniform(0.5, 2.0, size=n_atoms)
        m = molecule(positions, radii=list(radii))
        lv = segment_power_diagram(grid, m, chunk=997)
        assert np.array_equal(lv.labels, _argmin_oracle(grid, m.positions, m.radii))


def test_labels_are_translation_covariant():
    grid = _grid((5, 3, 3))
    positions = np.array([(-1.0, 0.0, 0.0), (1.0, 0.0, 0.0)])
    ref = segment_power_diagram(grid, molecule(positions)).labels
    for v in np.linspace(0.01, 3.0, 300):
        shift = np.array([v, 0.3 * v, 0.0])
        moved = GridMeta(origin=grid.origin + shift, counts=grid.counts, axes=grid.axes)
        lv = segment_power_diagram(moved, molecule(positions + shift))
        assert np.array_equal(lv.labels, ref), f"shift {v}"


def test_translation_covariance_with_skewed_axes_and_radii():
    rng = np.random.default_rng(5)
    axes = np.array([[0.4, 0.0, 0.0], [0.1, 0.35, 0.0], [0.0, 0.05, 0.3]])
    grid = GridMeta(origin=(-1.5, -1.2, -1.0), counts=(9, 8, 7), axes=axes)
    positions = rng.uniform(-1, 1, size=(4, 3))
    radii = [1.0, 1.2, 0.8, 1.1]
    ref = segment_power_diagram(grid, molecule(positions, radii=radii)).labels
    for shift in rng.uniform(-50, 50, size=(20, 3)):
        moved = GridMeta(origin=grid.origin + shift, counts=grid.counts, axes=axes)
        lv = segment_power_diagram(moved, molecule(positions + shift, radii=radii))
        assert np.array_equal(lv.labels, ref)


def test_labels_independent_of_workers_and_chunks():
    rng = np.random.default_rng(11)
    m = molecule(rng.uniform(-2, 2, size=(5, 3)), radii=list(rng.uniform(0.5, 1.5, 5)))
    grid = _grid((12, 11, 10))
    ref = segment_power_diagram(grid, m, workers=1)
    for workers, chunk in ((4, 100), (3, 7), (2, 1 << 16)):
        assert segment_power_diagram(grid, m, workers=workers, chunk=chunk).equals(ref)


def test_skewed_axes_use_full_affine_map():
    axes = np.array([[1.0, 0.0, 0.0], [0.5, 1.0, 0.0], [0.0, 0.0, 1.0]])
    grid = GridMeta(origin=(-2.0, -1.0, -1.0), counts=(5, 3, 3), axes=axes)
    m = molecule([(-1, 0, 0), (1.5, 0.5, 0)], radii=[1.0, 1.2])
    lv = segment_power_diagram(grid, m)
    assert lv.labels.tolist() == _brute_force_labels(grid, m.positions, m.radii)


@pytest.mark.parametrize(
    "atom_labels,groups,expected",
    [
        ([0, 1, 1, 0], {"G1": [0], "G2": [1]}, [0, 1, 1, 0]),
        ([0, 1, 2], {"G1": [0, 1], "G2": [2]}, [0, 0, 1]),
    ],
)
def test_subgroup_labels(atom_labels, groups, expected):
    n_atoms = max(max(v) for v in groups.values()) + 1
    m = molecule([(float(i), 0, 0) for i in range(n_atoms)], groups=groups)
    grid = GridMeta(origin=(0, 0, 0), counts=(len(atom_labels), 1, 1))
    lv = LabelVolume(grid=grid, labels=atom_labels, n_labels=n_atoms)
    merged = subgroup_labels(lv, m)
    assert merged.labels.tolist() == expected
    assert merged.kind == "subgroup"
    assert merged.counts_per_label().sum() == lv.counts_per_label().sum()


def test_subgroup_labels_rejects_subgroup_volume():
    m = molecule([(0, 0, 0), (1, 0, 0)], groups={"G": [0, 1]})
    grid = GridMeta(origin=(0, 0, 0), counts=(2, 1, 1))
    lv = LabelVolume(grid=grid, labels=[0, 0], n_labels=1, kind="subgroup")
    with pytest.raises(SegmentationError):
        subgroup_labels(lv, m)


def test_label_volume_validation():
    grid = GridMeta(origin=(0, 0, 0), counts=(2, 1, 1))
    with pytest.raises(SegmentationError, match="rótulos para grade"):
        LabelVolume(grid=grid, labels=[0], n_labels=1)
    with pytest.raises(SegmentationError, match="fora de"):
        LabelVolume(grid=grid, labels=[0, 3], n_labels=2)


def test_segment_stats_counts():
    grid = _grid((4, 2, 2))
    m = molecule([(-1, 0, 0), (1, 0, 0)], groups={"L": [0], "R": [1]})
    stats = segment_stats(segment_power_diagram(grid, m), m)
    assert stats == {"n_voxels": 16, "atoms": [8, 8], "subgroups": {"L": 8, "R": 8}}


def test_nearest_atom_breaks_ties_by_index():
    m = molecule([(-1, 0, 0), (1, 0, 0)])
    assert nearest_atom([(0, 0, 0), (0.9, 0, 0), (-3, 0, 0)], m).tolist() == [0, 1, 0]


def test_nearest_atom_is_independent_of_chunking():
    rng = np.random.default_rng(3)
    m = molecule(rng.uniform(-2, 2, size=(6, 3)))
    points = rng.uniform(-3, 3, size=(1000, 3))
    ref = nearest_atom(points, m, workers=1)
    assert np.array_equal(nearest_atom(points, m, workers=3, chunk=37), ref)
    assert nearest_atom(np.zeros((0, 3)), m).tolist() == []


def test_gradient_zero_plateau_keeps_memory_bounded():
    # cubes reais gravam ~5 algarismos: longe da molécula a densidade é 0.0 e
    # cada voxel do platô é um máximo isolado
    counts = (40, 40, 40)
    origin, axes = box_grid(counts, -6, 6)
    values = np.zeros(int(np.prod(counts)))
    center = (20 * 40 + 20) * 40 + 20
    values[center] = 1.0
    rho = GridField(origin=origin, counts=counts, axes=axes, values=values)
    rng = np.random.default_rng(8)
    m = molecule(rng.uniform(-5, 5, size=(97, 3)))
    tracemalloc.start()
    try:
        lv = segment_gradient_ascent(rho, m)
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    assert peak < 48 * 2**20
    plateau = ascent_pointers(rho) == np.arange(rho.n_voxels)
    plateau[center] = False
    grid = GridMeta.of(rho)
    expected = nearest_atom(np.column_stack(voxel_coordinates(grid)), m)
    assert np.array_equal(lv.labels[plateau], expected[plateau])


# --- subida de gradiente ---


def test_gradient_single_gaussian_is_one_basin():
    counts = (9, 9, 9)
    origin, axes = box_grid(counts, -2, 2)
    m = molecule([(0, 0, 0), (1.8, 1.8, 1.8)])
    rho = gaussian_field(counts, origin, axes, [(0, 0, 0)])
    lv = segment_gradient_ascent(rho, m)
    assert lv.counts_per_label().tolist() == [729, 0]


def test_gradient_uniform_density_is_nearest_atom():
    grid = _grid((5, 4, 3))
    rho = GridField(
        origin=grid.origin, counts=grid.counts, axes=grid.axes, values=np.ones(grid.n_voxels)
    )
    m = molecule([(-1, 0, 0), (1, 0.5, 0), (0, -1, 0.5)])
    assert np.array_equal(ascent_pointers(rho), np.arange(grid.n_voxels))
    lv = segment_gradient_ascent(rho, m)
    expected = nearest_atom(np.column_stack(voxel_coordinates(grid)), m)
    assert np.array_equal(lv.labels, expected)


def test_gradient_two_gaussians_agree_with_power_away_from_midplane():
    pair = two_gaussian_pair(counts=21, leak=1.0)
    m = molecule([(-2, 0, 0), (2, 0, 0)])
    rho = pair.hole.with_values(pair.hole.values**2)
    grad = segment_gradient_ascent(rho, m)
    power = segment_power_diagram(pair.hole, m)
    x, _, _ = voxel_coordinates(pair.hole)
    spacing = pair.hole.axes[0, 0]
    differ = grad.labels != power.labels
    assert np.all(np.abs(x[differ]) <= spacing + 1e-12)
    assert differ.sum() <= 21 * 21


def test_gradient_neighbour_ties_take_lowest_index():
    # dois vizinhos com o mesmo valor máximo: vence o de menor índice linear
    values = np.zeros(3)
    values[0] = values[2] = 1.0
    rho = GridField(origin=(0, 0, 0), counts=(1, 1, 3), axes=np.eye(3), values=values)
    assert ascent_pointers(rho).tolist() == [0, 0, 2]

import itertools

import numpy as np
import pytest

from brickphase.rotations import ROTATIONS, ROTATION_NAMES, axis_rotation, canonical_name, rotation_matrix, rotation_name
from brickphase.shapes import PART_DICTIONARY, PartShape, lookup_shape, normalize_shape_id


def test_group_has_24_distinct_proper_rotations():
    mats = list(ROTATIONS.values())
    assert len(mats) == 24 == len(ROTATION_NAMES)
    assert len({m.tobytes() for m in mats}) == 24
    for m in mats:
        assert np.array_equal(m.T @ m, np.eye(3))
        assert round(np.linalg.det(m)) == 1


def test_group_is_closed_under_composition():
    keys = {m.astype(int).tobytes() for m in ROTATIONS.values()}
    for a, b in itertools.product(ROTATIONS.values(), repeat=2):
        assert (a @ b).astype(int).tobytes() in keys


def test_identity_and_names_round_trip():
    assert np.array_equal(rotation_matrix("identity"), np.eye(3))
    for name, m in ROTATIONS.items():
        assert rotation_name(m) == name
        assert canonical_name(name) == name


def test_chained_names_compose_right_to_left():
    expected = axis_rotation("y", 90) @ axis_rotation("x", 90)
    assert np.array_equal(rotation_matrix("ry90_rx90"), expected)
    assert rotation_name(expected) == canonical_name("ry90_rx90")


def test_near_axis_aligned_matrix_is_snapped():
    noisy = ROTATIONS["ry90"] + 1e-8
    assert rotation_name(noisy) == "ry90"


@pytest.mark.parametrize("bad", [
    np.array([[np.cos(0.3), 0, np.sin(0.3)], [0, 1, 0], [-np.sin(0.3), 0, np.cos(0.3)]]),
    np.diag([1.0, 1.0, -1.0]),
    np.zeros((3, 3)),
])
def test_matrices_outside_the_group_are_rejected(bad):
    with pytest.raises(ValueError):
        rotation_name(bad)


def test_unknown_rotation_name():
    with pytest.raises(ValueError):
        rotation_matrix("rq45")


def test_brick_dimensions():
    assert PART_DICTIONARY["3001"].extent == (80, 40, 24)  # 2x4 brick
    assert PART_DICTIONARY["3005"].extent == (20, 20, 24)  # 1x1 brick
    assert PART_DICTIONARY["3023"].extent[2] == 8  # plate height
    assert len(PART_DICTIONARY) >= 20


def test_shape_id_normalisation_and_lookup():
    assert normalize_shape_id("3001.DAT") == "3001"
    assert normalize_shape_id("parts\\3001.dat") == "3001"
    assert lookup_shape("3001.dat") == PART_DICTIONARY["3001"]
    extra = {"custom": PartShape("custom", (10, 10, 10))}
    assert lookup_shape("custom", extra).extent == (10, 10, 10)
    with pytest.raises(KeyError):
        lookup_shape("99999")


def test_shape_extent_must_be_positive():
    with pytest.raises(ValueError):
        PartShape("flat", (20, 20, 0))

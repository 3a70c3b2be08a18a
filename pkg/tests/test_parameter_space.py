import numpy as np
import pytest

from core.space.parameter_space import (
    BoundViolationError,
    DepthOutOfRangeError,
    Dimension,
    DimensionMismatchError,
    ParameterSpace,
    SpaceDefinitionError,
    denormalize,
    make_point,
    normalize,
    point_rng,
    points_to_arrays,
    relevance,
    sample_points,
    with_depth,
)


class TestRelevance:
    def test_mask_follows_depth(self, small_space):
        assert relevance(small_space, [0, 0.5, 0.0, 5.0]).tolist() == [True, False, False]
        assert relevance(small_space, [1, 0.5, 0.0, 5.0]).tolist() == [True, True, False]
        assert relevance(small_space, [2, 0.5, 0.0, 5.0]).tolist() == [True, True, True]

    def test_depth_rounds_half_up(self, small_space):
        assert relevance(small_space, [1.4, 0.5, 0.0, 5.0]).tolist() == [True, True, False]
        assert relevance(small_space, [1.5, 0.5, 0.0, 5.0]).tolist() == [True, True, True]
        assert relevance(small_space, [0.5, 0.5, 0.0, 5.0]).tolist() == [True, True, False]

    def test_wrong_length(self, small_space):
        with pytest.raises(DimensionMismatchError):
            relevance(small_space, [1, 0.5, 0.0])

    @pytest.mark.parametrize("depth", [2.6, -0.6, float("nan")])
    def test_depth_out_of_range(self, small_space, depth):
        with pytest.raises(DepthOutOfRangeError):
            relevance(small_space, [depth, 0.5, 0.0, 5.0])

    def test_mask_is_monotone_in_depth(self, small_space):
        masks = [small_space.mask_for_depth(d) for d in range(small_space.max_depth + 1)]
        for shallow, deep in zip(masks, masks[1:]):
            assert np.all(deep[shallow])


class TestMakePoint:
    def test_relevant_bounds_checked(self, small_space):
        with pytest.raises(BoundViolationError):
            make_point(small_space, [1, 0.5, 1.5, 5.0])

    def test_irrelevant_values_unchecked(self, small_space):
        p = make_point(small_space, [0, 0.5, 99.0, -42.0])
        assert p.depth == 0
        assert p.relevant_values().tolist() == [0.5]

    def test_conditional_equality_ignores_irrelevant_values(self, small_space):
        p = make_point(small_space, [0, 0.5, 0.1, 1.0])
        q = make_point(small_space, [0, 0.5, -0.7, 9.0])
        r = make_point(small_space, [1, 0.5, 0.1, 1.0])
        assert p == q
        assert hash(p) == hash(q)
        assert p.key() == q.key()
        assert p != r

    def test_raw_layout(self, small_space):
        p = make_point(small_space, [2, 0.25, -0.5, 3.0])
        assert p.raw().tolist() == [2.0, 0.25, -0.5, 3.0]

    def test_point_values_are_read_only(self, small_space):
        p = with_depth(small_space, 1)
        with pytest.raises(ValueError):
            p.values[0] = 0.0


class TestNormalize:
    def test_normalize_zeroes_irrelevant(self, small_space):
        p = make_point(small_space, [1, 0.25, 0.0, 7.5])
        assert normalize(small_space, p).tolist() == [0.25, 0.5, 0.0]

    def test_denormalize_inverts_on_relevant_dims(self, small_space):
        p = make_point(small_space, [2, 0.25, -0.5, 7.5])
        assert np.allclose(denormalize(small_space, normalize(small_space, p)), p.values)

    def test_points_to_arrays_shapes(self, small_space, rng):
        points = sample_points(small_space, 7, rng)
        depths, unit, masks = points_to_arrays(small_space, points)
        assert depths.shape == (7,)
        assert unit.shape == masks.shape == (7, 3)
        assert np.all(unit[~masks] == 0.0)

    def test_points_to_arrays_empty(self, small_space):
        depths, unit, masks = points_to_arrays(small_space, [])
        assert depths.shape == (0,) and unit.shape == (0, 3) and masks.shape == (0, 3)


class TestSpaceDefinition:
    def test_layered_builder(self):
        space = ParameterSpace.layered(2, [("lr", 0.0, 1.0)], [("units", 1.0, 8.0), ("drop", 0.0, 0.5)])
        assert space.n_dims == 5
        assert space.cube_dimension == 6
        assert [d.name for d in space.dims] == ["lr", "units_1", "drop_1", "units_2", "drop_2"]
        assert space.layers.tolist() == [0, 1, 1, 2, 2]

    def test_missing_layer_rejected(self):
        with pytest.raises(SpaceDefinitionError):
            ParameterSpace(max_depth=2, dims=(Dimension("a", 0, 1, 0), Dimension("b", 0, 1, 2)))

    def test_duplicate_names_rejected(self):
        with pytest.raises(SpaceDefinitionError):
            ParameterSpace(max_depth=0, dims=(Dimension("a", 0, 1), Dimension("a", 0, 2)))

    def test_empty_bounds_rejected(self):
        with pytest.raises(SpaceDefinitionError):
            Dimension("a", 1.0, 1.0)

    def test_from_dict(self, small_space, small_space_dict):
        rebuilt = ParameterSpace.from_dict(small_space_dict)
        assert rebuilt == small_space

    def test_from_dict_missing_field(self):
        with pytest.raises(SpaceDefinitionError):
            ParameterSpace.from_dict({"dims": [{"name": "a", "lower": 0, "upper": 1}]})


class TestRandomStreams:
    def test_sample_points_cover_depths(self, small_space, rng):
        points = sample_points(small_space, 300, rng)
        assert {p.depth for p in points} == {0, 1, 2}
        for p in points:
            assert np.all(p.values >= small_space.lower) and np.all(p.values <= small_space.upper)

    def test_point_rng_keyed_by_conditional_key(self, small_space):
        p = make_point(small_space, [0, 0.5, 0.1, 1.0])
        q = make_point(small_space, [0, 0.5, -0.7, 9.0])
        assert point_rng(p, 3).uniform() == point_rng(q, 3).uniform()
        assert point_rng(p, 3).uniform() != point_rng(p, 4).uniform()
        assert point_rng(p, 3, salt=1).uniform() != point_rng(p, 3, salt=2).uniform()

    def test_point_rng_ignores_sign_of_zero(self, small_space):
        p = make_point(small_space, [1, 0.5, 0.0, 1.0])
        q = make_point(small_space, [1, 0.5, -0.0, 1.0])
        assert p == q
        assert point_rng(p, 3).uniform() == point_rng(q, 3).uniform()

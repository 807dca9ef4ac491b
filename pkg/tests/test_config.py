"""
Tests for PipelineConfig
"""

import json

import pytest

from bicarleman.config import PipelineConfig
from bicarleman.pipeline.constants import DEFAULT_I_MAX, DEFAULT_TOLERANCES
from bicarleman.pipeline.exceptions import DocumentParseError


def write_config(tmp_path, document):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


class TestDefaults:
    def test_defaults_are_valid(self):
        config = PipelineConfig()

        assert config.is_valid()
        assert config.i_max == DEFAULT_I_MAX
        assert config.tolerances == DEFAULT_TOLERANCES
        assert config.tolerances is not DEFAULT_TOLERANCES

    def test_tolerance_lookup(self):
        config = PipelineConfig(tolerances={'unitarity': 1e-3})

        assert config.tolerance('unitarity') == 1e-3
        assert config.tolerance('parseval') == DEFAULT_TOLERANCES['parseval']

    def test_with_overrides_ignores_none(self):
        config = PipelineConfig().with_overrides(i_max=1, seed=None, term_cap=4)

        assert config.i_max == 1
        assert config.seed == PipelineConfig().seed
        assert config.term_cap == 4

    def test_to_dict(self):
        document = PipelineConfig(i_max=1, ambient_dim=12).to_dict()

        assert document['i_max'] == 1
        assert document['ambient_dim'] == 12
        assert document['required_x'] == 0
        assert document['tolerances'] == DEFAULT_TOLERANCES
        assert PipelineConfig(**document) == PipelineConfig(i_max=1, ambient_dim=12)


class TestValidation:
    def test_frame_must_be_ordered(self):
        errors = PipelineConfig(frame_inner=64.0, frame_outer=48.0).validate()

        assert "frame_inner must be below frame_outer" in errors

    def test_negative_values(self):
        errors = PipelineConfig(i_max=-1, grid_extent=-1.0, term_cap=-2).validate()

        assert len(errors) == 3

    def test_unknown_and_negative_tolerances(self):
        config = PipelineConfig(tolerances={'made_up': 1.0, 'parseval': -1.0})

        assert len(config.validate()) == 2
        assert not config.is_valid()

    def test_infinite_tolerance(self):
        assert not PipelineConfig(tolerances={'parseval': float('inf')}).is_valid()

    def test_ambient_dim_and_required_x(self):
        assert PipelineConfig(ambient_dim=16, required_x=2).is_valid()
        assert not PipelineConfig(ambient_dim=0).is_valid()
        assert not PipelineConfig(required_x=-1).is_valid()


class TestFromFile:
    def test_partial_document(self, tmp_path):
        path = write_config(tmp_path, {'i_max': 1, 'grid_extent': 5, 'tolerances': {'smoothness': 1e-3}})
        config = PipelineConfig.from_file(path)

        assert config.i_max == 1
        assert config.grid_extent == 5
        assert config.tolerance('smoothness') == 1e-3
        assert config.tolerance('parseval') == DEFAULT_TOLERANCES['parseval']
        assert config.is_valid()

    def test_unknown_field(self, tmp_path):
        with pytest.raises(DocumentParseError) as info:
            PipelineConfig.from_file(write_config(tmp_path, {'colour': 'blue'}))
        assert info.value.field == 'colour'

    def test_wrong_types(self, tmp_path):
        for document, field in (
            ({'i_max': 1.5}, 'i_max'),
            ({'grid_extent': 'wide'}, 'grid_extent'),
            ({'tabulated_mother': 1}, 'tabulated_mother'),
            ({'term_cap': True}, 'term_cap'),
            ({'ambient_dim': 12.5}, 'ambient_dim'),
            ({'required_x': 'one'}, 'required_x'),
            ({'tolerances': [1.0]}, 'tolerances'),
        ):
            with pytest.raises(DocumentParseError) as info:
                PipelineConfig.from_file(write_config(tmp_path, document))
            assert info.value.field == field

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("{\n  'i_max': 1\n}", encoding="utf-8")

        with pytest.raises(DocumentParseError) as info:
            PipelineConfig.from_file(path)
        assert info.value.line == 2

    def test_null_term_cap_and_tabulation(self, tmp_path):
        config = PipelineConfig.from_file(write_config(tmp_path, {'term_cap': None, 'tabulated_mother': True}))

        assert config.term_cap is None
        assert config.tabulated_mother

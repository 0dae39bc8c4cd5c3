import json
import os

import jsonschema
import pytest
from testfixtures import TempDirectory

import ibsl_states.utils.config_utils as config_utils


def test_defaults():
    caps = config_utils.get_caps(environ={})
    assert caps == config_utils.DEFAULT_CAPS


def test_defaults_not_shared():
    caps = config_utils.get_caps(environ={})
    caps['max_carrier'] = 1
    assert config_utils.DEFAULT_CAPS['max_carrier'] == 64


def test_precedence():
    with TempDirectory() as tempdir:
        tempdir.write('caps.json', json.dumps(
            {'max_carrier': 10, 'max_forest_oracle': 5}).encode())
        config_path = os.path.join(tempdir.path, 'caps.json')
        caps = config_utils.get_caps(config_path, environ={})
        assert caps['max_carrier'] == 10
        assert caps['max_forest_oracle'] == 5
        caps = config_utils.get_caps(config_path,
                                     environ={'PLONKA_CAP': '20'})
        assert caps['max_carrier'] == 20
        caps = config_utils.get_caps(config_path, cap=30,
                                     environ={'PLONKA_CAP': '20'})
        assert caps['max_carrier'] == 30
        assert caps['max_forest_oracle'] == 5


def test_bad_env_cap():
    with pytest.raises(ValueError):
        config_utils.get_caps(environ={'PLONKA_CAP': 'many'})


def test_nonpositive_cap():
    with pytest.raises(ValueError):
        config_utils.get_caps(cap=0, environ={})


def test_unknown_key_in_config():
    with TempDirectory() as tempdir:
        tempdir.write('caps.json', json.dumps({'max_colors': 3}).encode())
        with pytest.raises(jsonschema.exceptions.ValidationError):
            config_utils.get_caps(os.path.join(tempdir.path, 'caps.json'),
                                  environ={})


def test_shipped_config_matches_defaults():
    config_path = os.path.join(os.path.dirname(__file__), '..', '..',
                               'config_caps.json')
    caps = config_utils.get_caps(config_path, environ={})
    assert caps == config_utils.DEFAULT_CAPS

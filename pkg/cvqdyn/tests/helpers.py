'''Test helper functions and classes.'''

import os

try:
    import tomllib
except ImportError:
    import tomli as tomllib

import cvqdyn.logic as logic


def fixture_path(path):
    path = os.path.join(os.path.split(__file__)[0], 'test-data', path)
    return os.path.abspath(path)


def load_fixture(path):
    with open(fixture_path(path), 'rb') as f:
        return tomllib.load(f)


def call_action(name, context=None, /, **kwargs):
    '''Call an action function by name, the way the command line does.'''
    return logic.get_action(name)(context or {}, kwargs)

import hashlib
import os
import tempfile
import unittest

import numpy as np

import cvqdyn.exceptions as exceptions
import cvqdyn.lib.util as util


class TestResourceName(unittest.TestCase):

    def test_it_slugifies(self):
        assert util.resource_name('Evolve Free', 'evolution') == \
            'evolve-free-evolution'

    def test_it_skips_empty_parts(self):
        assert util.resource_name('mond', None, '', 'witness') == 'mond-witness'

    def test_it_raises_on_nothing(self):
        with self.assertRaises(ValueError):
            util.resource_name('', None)


class TestEnsureFinite(unittest.TestCase):

    def test_it_returns_floats(self):
        values = util.ensure_finite('n', [1, 2])
        assert values.dtype == np.float64

    def test_it_raises_on_nan_and_inf(self):
        for bad in (np.nan, np.inf):
            with self.assertRaises(exceptions.InvariantViolationException) \
                    as cm:
                util.ensure_finite('E', [1.0, bad])
            assert cm.exception.check == 'finite_values'


class TestSha256(unittest.TestCase):

    def test_it_hashes_the_file(self):
        with tempfile.NamedTemporaryFile(delete=False) as f:
            f.write(b'scenario = "evolve"\n')
        try:
            assert util.sha256_of_file(f.name) == hashlib.sha256(
                b'scenario = "evolve"\n').hexdigest()
        finally:
            os.remove(f.name)


class TestThreadCount(unittest.TestCase):

    def test_explicit_requests_win(self):
        assert util.thread_count(3, {'CVQDYN_THREADS': '8'}) == 3

    def test_the_environment_is_read(self):
        assert util.thread_count(environ={'CVQDYN_THREADS': '4'}) == 4
        assert util.thread_count(environ={}) == 1

    def test_it_raises_on_bad_values(self):
        with self.assertRaises(exceptions.ValidationError):
            util.thread_count(environ={'CVQDYN_THREADS': 'many'})
        with self.assertRaises(exceptions.ValidationError):
            util.thread_count(0)

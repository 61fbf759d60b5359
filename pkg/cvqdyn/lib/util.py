'''Miscellaneous shared utility functions.

'''
import hashlib
import os

import numpy as np
from slugify import slugify

import cvqdyn.exceptions as exceptions

THREADS_VARIABLE = 'CVQDYN_THREADS'


def resource_name(*parts):
    '''Return a file-system and Data Package safe name built from ``parts``.

    Data Package resource names must be lowercase and may only contain
    alphanumerics, ``-``, ``_`` and ``.``.

    :rtype: string

    '''
    name = slugify('-'.join(str(p) for p in parts if p), separator='-')
    if not name:
        raise ValueError('cannot build a resource name from {0!r}'.format(parts))
    return name


def ensure_finite(name, values):
    '''Return ``values`` as a float array.

    :raises cvqdyn.exceptions.InvariantViolationException: if any value is
        NaN or infinite

    '''
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        bad = int(np.count_nonzero(~np.isfinite(values)))
        raise exceptions.InvariantViolationException(
            'finite_values', '{0} non-finite entries in column {1!r}'.format(
                bad, name))
    return values


def sha256_of_file(path):
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(65536), b''):
            digest.update(chunk)
    return digest.hexdigest()


def thread_count(requested=None, environ=None):
    '''``requested`` if given, else $CVQDYN_THREADS, else 1.'''
    if requested is not None:
        count = requested
    else:
        environ = os.environ if environ is None else environ
        raw = environ.get(THREADS_VARIABLE)
        try:
            count = int(raw) if raw else 1
        except ValueError:
            raise exceptions.ValidationError(
                {'threads': ['{0} must be an integer, got {1!r}'.format(
                    THREADS_VARIABLE, raw)]})
    if count < 1:
        raise exceptions.ValidationError(
            {'threads': ['must be at least 1']})
    return count

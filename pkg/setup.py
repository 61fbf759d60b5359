# encoding: utf-8

from setuptools import setup, find_packages
from codecs import open  # To use a consistent encoding
from os import path

here = path.abspath(path.dirname(__file__))

# Get the long description from the relevant file
with open(path.join(here, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

# Read the version without importing the package and its dependencies
about = {}
with open(path.join(here, 'cvqdyn', '__init__.py'), encoding='utf-8') as f:
    exec(f.read(), about)

setup(
    name='cvqdyn',
    version=about['__version__'],
    description="Continuous-variable quantum dynamics of two interacting "
                "particles: wave-packet propagation, Coulomb collisions and "
                "gravitationally induced entanglement.",
    long_description=long_description,
    long_description_content_type='text/markdown',

    # see http://pypi.python.org/pypi?%3Aaction=list_classifiers
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: GNU Affero General Public License v3 or later (AGPLv3+)',
        'Topic :: Scientific/Engineering :: Physics',
        'Programming Language :: Python :: 3',
    ],
    keywords='quantum entanglement schrodinger wave-packet gravity',
    license='AGPL',
    python_requires='>=3.8',
    packages=find_packages(exclude=['ez_setup', 'examples', 'tests']),
    include_package_data=True,
    zip_safe=False,
    install_requires=[
        'numpy>=1.20',
        'scipy>=1.6',
        'python-slugify',
        'datapackage>=1.0.0',
        'tomli; python_version < "3.11"',
    ],
    entry_points={
        'console_scripts': [
            'cvqdyn=cvqdyn.cli:main',
        ],
    },
)

"""A setuptools based setup module.

See:
https://packaging.python.org/guides/distributing-packages-using-setuptools/
"""

# Always prefer setuptools over distutils
from setuptools import setup, find_packages
from os import path

here = path.abspath(path.dirname(__file__))

# Get the long description from the README file
with open(path.join(here, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

# Get the requirements from the requirements.txt file
with open(path.join(here, "requirements.txt"), encoding='utf-8') as f:
    requirements = [line for line in f.read().splitlines() if line and not line.startswith('#')]

setup(
    name='soliton_forge',

    version='0.0.0',

    description='Construct the Bryant steady soliton and verify curvature identities along it',

    long_description=long_description,
    long_description_content_type='text/markdown',

    classifiers=[
        'Development Status :: 3 - Alpha',

        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',

        'License :: OSI Approved :: Apache Software License',

        'Programming Language :: Python :: 3.9',
    ],

    keywords='ricci soliton bryant differential geometry ode numerical verification',

    packages=find_packages(exclude=['contrib', 'docs', 'tests']),

    # Literal, get_origin and list[...] need 3.9
    python_requires='>=3.9, <4',

    install_requires=requirements,

    entry_points={
        'console_scripts': [
            'soliton_forge = soliton_forge.cli:cli'
        ],
    },

    include_package_data=True,
)

from setuptools import find_packages, setup

from scatterlen_cli import __version__

with open('requirements.txt') as f:
    requirements = [line.strip() for line in f if line.strip() and not line.startswith('#')]

setup(
    name='scatterlen',
    version=__version__,
    description='Length spectrum, pressure and pair correlations of open billiards',
    packages=find_packages(exclude=['tests']),
    install_requires=requirements,
    python_requires='>=3.9',
    entry_points={
        'console_scripts': [
            'scatterlen=scatterlen_cli.cli:cli',
        ],
    },
)

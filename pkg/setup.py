"""
setuptools setup file for the harmonic-swarm command-line tool
"""
from pathlib import Path

from setuptools import find_packages, setup

here = Path(__file__).parent


def read_requirements():
    """Runtime requirements, without the test-only block"""
    requirements = []
    for line in (here / 'requirements.txt').read_text().splitlines():
        line = line.strip()
        if line.startswith('# Tests'):
            break
        if line and not line.startswith('#'):
            requirements.append(line)
    return requirements


setup(
    name='harmonic-swarm',
    version='1.0.0',
    description='Harmonic attractor dynamics and shape formation for statistical robot swarms',
    long_description=(here / 'README.md').read_text(),
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=['tests', 'tests.*']),
    package_data={'swarm_app': ['resources/maps/*.txt', 'resources/presets/*.ini']},
    python_requires='>=3.10',
    install_requires=read_requirements(),
    extras_require={'test': ['pytest>=7.4.0']},
    entry_points={'console_scripts': ['harmonic-swarm=swarm_app.cli.main:main']},
)

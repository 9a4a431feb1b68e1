#!/usr/bin/env python3
"""
Setup script for affective_polarization package.
"""

from setuptools import setup, find_packages
import os

# Read the README file for long description
def read_readme():
    readme_path = os.path.join(os.path.dirname(__file__), 'README.md')
    if os.path.exists(readme_path):
        with open(readme_path, 'r', encoding='utf-8') as f:
            return f.read()
    return "Simulation and estimation toolkit for affective-polarization dynamics"

# Read version from package
def get_version():
    version_file = os.path.join(os.path.dirname(__file__), 'affective_polarization', '__init__.py')
    with open(version_file, 'r') as f:
        for line in f:
            if line.startswith('__version__'):
                return line.split('=')[1].strip().strip('"').strip("'")
    return "0.1.0"

setup(
    name="affective-polarization",
    version=get_version(),
    description="Stance dynamics under in-group love and out-group hate: network simulation, "
                "mean-field integration and logistic-regression estimation",
    long_description=read_readme(),
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "demos"]),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Sociology",
    ],
    python_requires=">=3.8",
    install_requires=[
        "numpy>=1.21",
        "scipy>=1.7",
        "pandas>=1.5",  # lineterminator keyword in DataFrame.to_csv
        "networkx>=2.6",
        "joblib>=1.1",
        "rich>=12.0.0",  # console, logging handler and report tables
    ],
    extras_require={
        "dev": [
            "pytest",
            "pytest-cov",
            "black",
            "flake8",
            "statsmodels",  # optional oracle for the logistic fit tests
        ],
    },
    entry_points={
        "console_scripts": [
            "affpol=affective_polarization.cli:main",
        ],
    },
    keywords="opinion dynamics, affective polarization, mean field, logistic regression, simulation",
)

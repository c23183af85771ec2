import setuptools

from brsfading._version import __version__

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="brsfading",
    version=__version__,
    description=(
        "Bivariate Rician shadowed fading: joint PDF, CDF, MGF, power correlation, "
        "outage, level crossing rate and fade duration, with a Monte Carlo oracle"
    ),
    install_requires=["numpy>=1.17", "scipy>=1.4"],
    extras_require={"yaml": "PyYAML>=5.1", "tests": ["pytest", "dill>=0.3.0"]},
    tests_require=["pytest", "dill>=0.3.0"],
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["examples", "examples.*"]),
    entry_points={"console_scripts": ["brsfading = brsfading.cli:main"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering",
    ],
    python_requires=">=3.7",
)

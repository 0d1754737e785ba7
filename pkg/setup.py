from setuptools import setup, find_packages

setup(
    name="driftflux",
    version="1.0.0",
    packages=find_packages(exclude=["tests", "examples*"]),
    package_data={
        "src.schemas": ["*.json"],
    },
    include_package_data=True,
    install_requires=[
        "sympy>=1.12",
        "numpy>=1.24",
        "scipy>=1.10",
        "jsonschema>=4.17",
    ],
    extras_require={
        "test": ["pytest>=7.4"],
        "bundle": ["pyinstaller>=6.3.0"],
    },
    python_requires=">=3.9",
    author="Your Name",
    description="Verification engine for the symmetries, conservation laws and "
                "Hamiltonian structures of the drift flux model",
    entry_points={
        "console_scripts": [
            "driftflux=src.main:main",
        ],
    },
)

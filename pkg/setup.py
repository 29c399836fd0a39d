"""Setup script for the ramp tunneling toolkit."""

from setuptools import setup, find_packages
from pathlib import Path

# Read the contents of README file
this_directory = Path(__file__).parent
long_description = (this_directory / "README.md").read_text(encoding='utf-8')

setup(
    name="ramp-tunneling",
    version="0.1.0",
    author="RampTunneling Team",
    author_email="",
    description="Bohmian-trajectory estimators and wave-packet simulations of ramp-barrier tunneling",
    long_description=long_description,
    long_description_content_type="text/markdown",
    url="https://github.com/ramp-tunneling/ramp-tunneling",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Physics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
    ],
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.21.0",
        "scipy>=1.9.0",
        "pandas>=1.5.0",
        "PyYAML>=6.0",
        "python-dotenv>=0.19.0",
        "pydantic>=2.0.0",
        "joblib>=1.2.0",
    ],
    extras_require={
        "dev": [
            "pytest>=7.0.0",
            "pytest-cov>=3.0.0",
            "hypothesis>=6.0.0",
            "black>=22.0.0",
            "flake8>=4.0.0",
            "mypy>=0.950",
        ],
    },
    entry_points={
        "console_scripts": [
            "ramp-tunnel=scripts.ramp_tunnel:main",
        ],
    },
    include_package_data=True,
    package_data={
        "ramp_tunneling": ["*.yaml", "*.json"],
    },
    zip_safe=False,
)

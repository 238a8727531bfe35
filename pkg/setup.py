from setuptools import setup, find_packages

setup(
    name="g2_poisson",
    version="0.1.0",
    packages=find_packages(exclude=["examples", "examples.*"]),
    python_requires=">=3.10",
    install_requires=[
        "python-dotenv>=1.0.0",
        "sympy>=1.12",
        "mpmath>=1.3.0",
    ],
    extras_require={
        "dev": ["pytest>=7.4.0", "pytest-mock>=3.11.0", "ruff>=0.0.291", "black>=23.9.0"],
    },
    entry_points={"console_scripts": ["g2-poisson=g2_poisson.app:main"]},
)

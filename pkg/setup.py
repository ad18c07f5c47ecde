from setuptools import setup, find_packages

version = {}
with open("./limtower_cli/version.py") as fp:
    exec(fp.read(), version)
VERSION = version["__version__"]

with open("README.md") as f:
    readme = f.read()

with open("requirements.txt") as f:
    requirements = [line.strip() for line in f.readlines() if line.strip()]

setup(
    name="limtower-cli",
    version=VERSION,
    description="A command line tool for inverse towers of abelian groups, lim¹ and Prüfer windows.",
    long_description=readme,
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    author="limtower developers",
    license="MIT",
    packages=find_packages(exclude=("docs", "tests")),
    include_package_data=True,
    install_requires=requirements,
    python_requires=">=3.9",
    entry_points={
        "console_scripts": [
            "limtower = limtower_cli.__main__:limtower_main",
        ],
    },
    zip_safe=False,
)

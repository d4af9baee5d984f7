from setuptools import find_packages, setup

setup(
    name="bbops",
    version="0.1.0",
    packages=find_packages(include=["bbops*"]),
    package_data={"bbops": ["templates/*.j2"]},
    install_requires=[
        "typer",
        "rich",
        "pydantic>=2",
        "pydantic-settings",
        "pyyaml",
        "jinja2",
        "numpy",
        "scipy",
    ],
    entry_points={
        "console_scripts": [
            "bbops=bbops.main:app"
        ]
    },
)

"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS
"""

import subprocess
import re
from setuptools import setup, find_packages


def get_version():
    """
    Version from git describe, see setup_pip.py.
    """
    try:
        version_git = subprocess.check_output(["git", "describe", "--tags", "--long", "--dirty"]).rstrip()
        match = re.search(r'(.*)-(\d+)-g([0-9,a-f]{7})-?(dirty)?', version_git.decode())
        if int(match[2]) == 0 and not match[4]:
            return match[1]
        return f"{match[1]}+{match[2]}.{match[3]}{'.' + match[4] if match[4] else ''}"
    except Exception:
        print("Error: Can not determine version from git. Using default value of '0.0.1'")
        return "0.0.1"


with open("README.md", 'r') as fh:
    long_description = fh.read()


setup(
    name="coneindex",
    version=get_version(),
    description="Stability, Morse index and density of free boundary minimal cones in Riemannian Schwarzschild space",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=['test']),
    package_data={'coneindex': ['cidx.cfg', 'view/*.json']},
    include_package_data=True,
    # dependencies come from conda_recipe/meta.yaml
    install_requires=[],
    entry_points={'console_scripts': ['cidx=coneindex.cidx:main']},
)

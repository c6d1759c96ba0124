"""
Entry point for `pip install .`; the package metadata lives in setup_pip.py.
"""

import os
import runpy

runpy.run_path(os.path.join(os.path.dirname(os.path.abspath(__file__)), 'setup_pip.py'), run_name='__main__')

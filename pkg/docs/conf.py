# Configuration file for the Sphinx documentation builder of tauberkit.
import os
import sys
sys.path.insert(0, os.path.abspath('../py'))

from tauberkit import __version__  # noqa: E402

# -- Project information -----------------------------------------------------

project = 'tauberkit'
copyright = "2023, Maurizio D'Addona"
author = "Maurizio D'Addona"
release = __version__

# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
    'sphinx.ext.intersphinx',
]

# The docstrings are written in the numpy style.
napoleon_google_docstring = False
napoleon_numpy_docstring = True
autodoc_member_order = 'bysource'

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
    'astropy': ('https://docs.astropy.org/en/stable/', None),
}

templates_path = ['_templates']
exclude_patterns = ['_build']

# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']

# -----------------------------------------------------------------------------
# Copyright 2025 by PyFracSieve Authors, see AUTHORS for more details.
#
# Distributed under the terms of the MIT/X11 license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
"""Sphinx configuration of the PyFracSieve documentation."""

from pyfracsieve.version import version_info

# -- General configuration ----------------------------------------------------

needs_sphinx = "2.0"

# napoleon reads the numpy style docstrings, mathjax renders the sieve
# formulas of the index and architecture pages.
extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
    "sphinx.ext.mathjax",
]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = "PyFracSieve"
copyright = "2025, PyFracSieve Authors"
author = "PyFracSieve Authors"

# The short X.Y version and the full version, including the status tag.
version = "{0}.{1}".format(*version_info)
release = (
    "{0}.{1}.{2}.{3}".format(*version_info)
    if version_info[3]
    else "{0}.{1}.{2}".format(*version_info)
)

language = "en"
exclude_patterns = []
pygments_style = "sphinx"

# -- Autodoc ------------------------------------------------------------------

autodoc_member_order = "bysource"
autodoc_default_options = {"members": True, "show-inheritance": True}
autoclass_content = "class"
napoleon_include_special_with_doc = False

# -- Output -------------------------------------------------------------------

html_theme = "sphinx_rtd_theme"
htmlhelp_basename = "PyFracSievedoc"

latex_documents = [
    (
        master_doc,
        "PyFracSieve.tex",
        "PyFracSieve Documentation",
        "PyFracSieve Authors",
        "manual",
    ),
]

man_pages = [(master_doc, "pyfracsieve", "PyFracSieve Documentation", [author], 1)]

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "mpmath": ("https://mpmath.org/doc/current/", None),
}

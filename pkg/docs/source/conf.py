#!/usr/bin/env python
import datetime

import recommonmark
import qcurv
from recommonmark.transform import AutoStructify

# -- General configuration ------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosectionlabel",
    "sphinx.ext.autosummary",
    "sphinx.ext.todo",
    "sphinx.ext.coverage",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "sphinx.ext.intersphinx",
    "sphinx.ext.napoleon",
    "recommonmark",
]

needs_extensions = {"recommonmark": "0.6"}

source_suffix = {
    ".rst": "restructuredtext",
    ".txt": "restructuredtext",
    ".md": "markdown",
}

master_doc = "index"

project = "qcurv"
copyright = "{year}, the qcurv developers".format(year=datetime.datetime.now().year)
author = "the qcurv developers"

# short X.Y version and full release version (including alpha/beta/rc tags)
version = qcurv.__version__.rsplit(".", 1)[0]
release = qcurv.__version__

templates_path = ["_templates"]

intersphinx_mapping = {
    "python": ("https://docs.python.org/3/", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/reference", None),
}

add_function_parentheses = True

pygments_style = "sphinx"

# -- Options for HTML output ----------------------------------------------

html_theme = "alabaster"

html_theme_options = {
    "logo_name": True,
    "sidebar_collapse": True,
    "show_relbar_bottom": True,
    "page_width": "1024px",
}

html_sidebars = {
    "**": [
        "about.html",
        "navigation.html",
        "relations.html",
        "searchbox.html",
    ]
}

html_short_title = "qcurv"

htmlhelp_basename = "qcurvdoc"

# -- Options for LaTeX output ---------------------------------------------

latex_documents = [
    (master_doc, "qcurv.tex", "qcurv Documentation", author, "manual")
]

# -- Options for manual page output ---------------------------------------

man_pages = [(master_doc, "qcurv", "qcurv Documentation", [author], 1)]

# -- Extension configuration -------------------------------------------------

# autodoc

autodoc_default_options = {
    "members": True,
}
autodoc_member_order = "bysource"

# autosectionlabel

# Prefix document path to section labels, otherwise autogenerated labels would look like 'heading'
# rather than 'path/to/file:heading'
autosectionlabel_prefix_document = True

# todo

todo_include_todos = False

# recommonmark

# app setup hook
def setup(app):
    app.add_config_value(
        "recommonmark_config",
        {
            "url_resolver": lambda url: url,
            "auto_toc_tree_section": "Contents",
        },
        True,
    )
    app.add_transform(AutoStructify)

import os
import sys
sys.path.insert(0, os.path.abspath('../..'))

# -- General configuration ---------------------------------------------
extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx_click.ext',
]

templates_path = ['_templates']

source_suffix = '.rst'

# The master toctree document.
master_doc = 'index'

# General information about the project.
project = 'Svetlichny Nonlocality Toolkit'
copyright = "2024, SVT Developers"
author = "SVT Developers"

# The short X.Y version.
version = '0.1'

# The full version, including alpha/beta/rc tags.
release = '0.1.0'

language = 'en'
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'
todo_include_todos = False

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
    'sqlalchemy': ('https://docs.sqlalchemy.org/en/14/', None),
}

# -- Options for HTML output -------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_static_path = []
htmlhelp_basename = 'svetlichnydoc'


# -- Options for LaTeX output ------------------------------------------

latex_elements = {}
latex_documents = [
    (master_doc, 'svetlichny.tex',
     'Svetlichny Nonlocality Toolkit Documentation',
     author, 'manual'),
]


# -- Options for manual page output ------------------------------------
man_pages = [
    (master_doc, 'svetlichny',
     'Svetlichny Nonlocality Toolkit Documentation',
     [author], 1)
]

texinfo_documents = [
    (master_doc, 'svetlichny',
     'Svetlichny Nonlocality Toolkit Documentation',
     author,
     'svetlichny',
     'Testing genuine three-particle nonlocality with Svetlichny\'s inequality.',
     'Miscellaneous'),
]

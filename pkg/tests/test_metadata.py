"""Tests for the package metadata."""
import configparser
from pathlib import Path

import svetlichny

ROOT = Path(__file__).resolve().parent.parent


def read_setup_cfg() -> configparser.ConfigParser:
    """Parse setup.cfg from the repository root."""
    parser = configparser.ConfigParser()
    parser.read(ROOT / 'setup.cfg', encoding='utf-8')
    return parser


def normalize(name: str) -> str:
    """Compare distribution names regardless of '-' or '_'."""
    return name.strip().lower().replace('_', '-')


class TestMetadata:
    """Tests for setup.cfg and the package attributes."""

    def test_author(self):
        """Test that the package and setup.cfg name the same author."""
        assert svetlichny.__author__ == read_setup_cfg()['metadata']['author']

    def test_docs_extras_match_tox(self):
        """Test that the docs extra installs exactly what the docs build uses."""
        extras = read_setup_cfg()['options.extras_require']['docs'].split()
        tox = configparser.ConfigParser()
        tox.read(ROOT / 'tox.ini', encoding='utf-8')
        deps = tox['testenv:docs']['deps'].split()
        assert sorted(map(normalize, extras)) == sorted(map(normalize, deps))

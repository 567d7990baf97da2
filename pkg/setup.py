"""Setup for Svetlichny Nonlocality Toolkit."""

from setuptools import setup

if __name__ == '__main__':
    setup()

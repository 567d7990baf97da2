"""A toolkit for testing genuine three-particle nonlocality with Svetlichny's inequality.

This package computes exact quantum predictions for three-qubit pure states and evaluates Svetlichny's inequality
both in its correlator form and as a frustrated network of correlation/anti-correlation bonds. It builds the
polytope of hybrid local/two-particle-nonlocal hidden variable models and decides whether a correlator table lies
inside it, optimizes measurement settings towards the quantum maximum of 4√2, simulates finite-shot experiments and
audits which measurement menus can certify genuine three-particle nonlocality at all.

To get started with the toolkit, you can install it using:
``pip install svetlichny``
"""

from svetlichny import defaults

__author__ = """SVT Developers"""
__version__ = '0.1.0'

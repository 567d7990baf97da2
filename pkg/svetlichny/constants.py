"""Defined constants."""

import numpy as np

# Strings
CAN_CERTIFY = 'can-certify'
CANNOT_CERTIFY = 'cannot-certify'
INSIDE = 'inside'
OUTSIDE = 'outside'

FULL_SPHERE = 'full_sphere'
PLANAR = 'planar'
FIXED_MENU = 'fixed_menu'
SEARCH_KINDS = (FULL_SPHERE, PLANAR, FIXED_MENU)

SIMPLEX = 'simplex'
HIGHS = 'highs'

PARTIES = ('A', 'B', 'C')
SETTING_NAMES = ('A', "A'", 'B', "B'", 'C', "C'")

# Partitions of the hybrid model: (pair, isolated party), parties numbered 0, 1, 2
PARTITION_12_3 = '(12)-3'
PARTITION_23_1 = '(23)-1'
PARTITION_13_2 = '(13)-2'
PARTITIONS = {
    PARTITION_12_3: ((0, 1), 2),
    PARTITION_23_1: ((1, 2), 0),
    PARTITION_13_2: ((0, 2), 1),
}

##########
# Pauli  #
##########

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

AXES = {
    'x': (1.0, 0.0, 0.0),
    'y': (0.0, 1.0, 0.0),
    'z': (0.0, 0.0, 1.0),
}

# Outcome index 0 <-> +1, index 1 <-> -1
OUTCOME_VALUES = (1, -1)

# Single-qubit basis labels, "up" encoded before "down"
UP_LABELS = ('u', '0', '+', 'H', '↑')
DOWN_LABELS = ('d', '1', '-', 'V', '↓')

##############
# Svetlichny #
##############

# Setting triples (x, y, z) for A, B, C in the order the inequality lists its terms
TRIPLES = ((0, 0, 0), (0, 0, 1), (1, 0, 0), (1, 0, 1), (0, 1, 0), (0, 1, 1), (1, 1, 0), (1, 1, 1))
TERM_NAMES = ("ABC", "ABC'", "A'BC", "A'BC'", "AB'C", "AB'C'", "A'B'C", "A'B'C'")
TERM_SIGNS = (1, 1, 1, -1, 1, -1, -1, -1)

# SIGN[x, y, z] = (-1)^(xy + yz + xz)
SIGN = np.zeros((2, 2, 2))
for _triple, _sign in zip(TRIPLES, TERM_SIGNS):
    SIGN[_triple] = _sign
del _triple, _sign

CLASSICAL_BOUND = 4.0
QUANTUM_BOUND = 4.0 * np.sqrt(2.0)

BOUND_SLACK = 1e-9
NORM_TOLERANCE = 1e-12
IMAGINARY_TOLERANCE = 1e-10

# Angles from the x axis that reach the quantum bound on the GHZ state
OPTIMAL_ANGLES = (0.0, -np.pi / 2, np.pi / 4, -np.pi / 4, 0.0, np.pi / 2)

########################
# Regression constants #
########################

# Sign produced by the conventions of this package at OPTIMAL_ANGLES
OPTIMAL_SIGNED_VALUE = -4.0 * np.sqrt(2.0)
OPTIMAL_S = 4.0 + 2.0 * np.sqrt(2.0)

# Exhaustive menu optima on the GHZ state
XZ_MENU_OPTIMUM = 2.0
XYZ_MENU_OPTIMUM = 4.0

NETWORK_MIN_BONDS = 2
NETWORK_MAX_BONDS = 6
POLYTOPE_VERTEX_COUNT = 64
POLYTOPE_RAW_VERTEX_COUNT = 192

"""Exact complex linear algebra for three qubits: states, spin observables, expectations and Born-rule probabilities.

Basis kets are indexed as ``4*s1 + 2*s2 + s3`` with qubit 1 the most significant and spin up (``s=0``) encoded before
spin down (``s=1``). Polarization labels map as H <-> up and V <-> down.
"""
import logging
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np

from svetlichny.constants import AXES, DOWN_LABELS, IDENTITY, IMAGINARY_TOLERANCE, NORM_TOLERANCE, OPTIMAL_ANGLES, \
    OUTCOME_VALUES, PAULIS, SETTING_NAMES, UP_LABELS
from svetlichny.exceptions import ConsistencyError, InputError, InvalidSettingError, ZeroNormError

logger = logging.getLogger(__name__)

NUM_QUBITS = 3
DIMENSION = 2 ** NUM_QUBITS


def _read_only(array: np.ndarray) -> np.ndarray:
    array = np.array(array)
    array.setflags(write=False)
    return array


def real_part(value, what: str = "expectation value", tolerance: float = IMAGINARY_TOLERANCE):
    """Return the real part of ``value`` after checking its imaginary residue is below ``tolerance``.

    Raises
    ------
    ConsistencyError
        If any imaginary part exceeds the tolerance, which signals a non-Hermitian construction.
    """
    value = np.asarray(value)
    residue = float(np.max(np.abs(value.imag))) if value.size else 0.0
    if residue > tolerance:
        raise ConsistencyError(f"Imaginary residue {residue:.3e} in {what} exceeds {tolerance:.1e}")
    return value.real


def basis_index(ket: str) -> int:
    """Map a ket label such as 'uud', '↑↑↓', '001' or 'HHV' to its index in the amplitude vector."""
    if len(ket) != NUM_QUBITS:
        raise InputError(f"Ket label '{ket}' must name exactly {NUM_QUBITS} qubits")

    index = 0
    for char in ket:
        if char in UP_LABELS:
            bit = 0
        elif char in DOWN_LABELS:
            bit = 1
        else:
            raise InputError(f"Unknown single-qubit label '{char}' in ket '{ket}'")
        index = 2 * index + bit

    return index


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of three qubits."""

    amplitudes: np.ndarray

    def __post_init__(self):
        """Validate shape and normalization, then freeze the amplitudes."""
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amplitudes.shape != (DIMENSION,):
            raise InputError(f"A three-qubit state needs {DIMENSION} amplitudes, got {amplitudes.size}")

        squared_norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(squared_norm - 1.0) > NORM_TOLERANCE:
            raise InputError(f"State is not normalized (squared norm {squared_norm!r}); build it with make_state")

        object.__setattr__(self, 'amplitudes', _read_only(amplitudes))

    @property
    def tensor(self) -> np.ndarray:
        """Amplitudes with one axis per qubit."""
        return self.amplitudes.reshape((2,) * NUM_QUBITS)

    def amplitude(self, ket: str) -> complex:
        """Return the amplitude of the basis ket with the given label."""
        return complex(self.amplitudes[basis_index(ket)])

    def with_global_phase(self, phase: float) -> 'StateVector':
        """Return the same physical state multiplied by exp(i*phase)."""
        return StateVector(self.amplitudes * np.exp(1j * phase))

    def __repr__(self):
        return f"StateVector({np.array2string(self.amplitudes, precision=6)})"


@dataclass(frozen=True)
class MeasurementSetting:
    """A ±1-valued spin measurement n·σ along a unit Bloch direction."""

    direction: Tuple[float, float, float]
    label: str = ""

    def __post_init__(self):
        """Validate the direction and generate a label if none was given."""
        direction = tuple(float(component) for component in np.asarray(self.direction, dtype=float).reshape(-1))
        if len(direction) != 3 or not all(np.isfinite(direction)):
            raise InvalidSettingError(f"Setting direction must be 3 finite reals, got {self.direction!r}")

        norm = float(np.linalg.norm(direction))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise InvalidSettingError(f"Setting direction {direction} is not a unit vector (norm {norm!r})")

        direction = tuple(component / norm for component in direction)
        object.__setattr__(self, 'direction', direction)
        if not self.label:
            object.__setattr__(self, 'label', "n=({:.6g} {:.6g} {:.6g})".format(*direction))


@dataclass(frozen=True, eq=False)
class Observable:
    """A 2x2 Hermitian involution (eigenvalues ±1) acting on one qubit."""

    matrix: np.ndarray

    def __post_init__(self):
        """Check Hermiticity and that the matrix squares to the identity."""
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (2, 2):
            raise InvalidSettingError(f"Observable must be a 2x2 matrix, got shape {matrix.shape}")
        if not np.allclose(matrix, matrix.conj().T, rtol=0.0, atol=NORM_TOLERANCE):
            raise InvalidSettingError("Observable is not Hermitian")
        if not np.allclose(matrix @ matrix, IDENTITY, rtol=0.0, atol=NORM_TOLERANCE):
            raise InvalidSettingError("Observable does not square to the identity")

        object.__setattr__(self, 'matrix', _read_only(matrix))


@dataclass(frozen=True)
class Scenario:
    """Two settings (unprimed, primed) for each of the three parties."""

    party_settings: Tuple[Tuple[MeasurementSetting, MeasurementSetting], ...]

    def __post_init__(self):
        """Check there are exactly three parties with two settings each."""
        party_settings = tuple(tuple(pair) for pair in self.party_settings)
        if len(party_settings) != NUM_QUBITS or any(len(pair) != 2 for pair in party_settings):
            raise InvalidSettingError("A scenario needs exactly 3 parties with 2 settings each")
        for pair in party_settings:
            for setting in pair:
                if not isinstance(setting, MeasurementSetting):
                    raise InvalidSettingError(f"Expected a MeasurementSetting, got {type(setting).__name__}")

        object.__setattr__(self, 'party_settings', party_settings)

    @classmethod
    def from_settings(cls, *settings: MeasurementSetting) -> 'Scenario':
        """Build a scenario from the six settings A, A', B, B', C, C'."""
        if len(settings) != 2 * NUM_QUBITS:
            raise InvalidSettingError(f"Expected 6 settings, got {len(settings)}")
        return cls(tuple((settings[2 * party], settings[2 * party + 1]) for party in range(NUM_QUBITS)))

    @property
    def settings(self) -> Tuple[MeasurementSetting, ...]:
        """The six settings in the order A, A', B, B', C, C'."""
        return tuple(setting for pair in self.party_settings for setting in pair)

    @property
    def labels(self) -> Tuple[str, ...]:
        """Labels of the six settings."""
        return tuple(setting.label for setting in self.settings)

    def setting(self, party: int, slot: int) -> MeasurementSetting:
        """Return the setting of ``party`` (0, 1, 2) in ``slot`` (0 unprimed, 1 primed)."""
        return self.party_settings[party][slot]

    def triple(self, x: int, y: int, z: int) -> Tuple[MeasurementSetting, MeasurementSetting, MeasurementSetting]:
        """Return the setting triple measured when A uses slot x, B slot y and C slot z."""
        return self.party_settings[0][x], self.party_settings[1][y], self.party_settings[2][z]

    def replace(self, party: int, slot: int, setting: MeasurementSetting) -> 'Scenario':
        """Return a copy with one setting swapped out."""
        settings = list(self.settings)
        settings[2 * party + slot] = setting
        return Scenario.from_settings(*settings)

    def observable_stacks(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return, per party, the (2, 2, 2) stack of its two observable matrices."""
        return tuple(
            np.stack([observable_from_setting(setting).matrix for setting in pair])
            for pair in self.party_settings
        )

    def describe(self) -> Mapping[str, str]:
        """Map setting names (A, A', ...) to labels."""
        return dict(zip(SETTING_NAMES, self.labels))


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Joint outcome probabilities for one setting triple, indexed [a, b, c] with index 0 <-> +1, 1 <-> -1."""

    probabilities: np.ndarray

    def __post_init__(self):
        """Validate the probability simplex."""
        probabilities = np.asarray(self.probabilities, dtype=float).reshape((2,) * NUM_QUBITS)
        if np.any(probabilities < -1e-15) or np.any(probabilities > 1.0 + NORM_TOLERANCE):
            raise InputError("Outcome probabilities must lie in [0, 1]")
        total = float(probabilities.sum())
        if abs(total - 1.0) > NORM_TOLERANCE:
            raise InputError(f"Outcome probabilities sum to {total!r}, not 1")

        object.__setattr__(self, 'probabilities', _read_only(probabilities))

    def probability(self, a: int, b: int, c: int) -> float:
        """Return P(A=a, B=b, C=c) for outcomes in {+1, -1}."""
        return float(self.probabilities[OUTCOME_VALUES.index(a), OUTCOME_VALUES.index(b), OUTCOME_VALUES.index(c)])

    def outcomes(self) -> Iterator[Tuple[Tuple[int, int, int], float]]:
        """Iterate over ((a, b, c), probability) in fixed index order, +1 before -1."""
        for index in np.ndindex(*self.probabilities.shape):
            yield tuple(OUTCOME_VALUES[i] for i in index), float(self.probabilities[index])

    @property
    def correlator(self) -> float:
        """Expectation of the outcome product abc."""
        return float(sum(a * b * c * p for (a, b, c), p in self.outcomes()))


def make_state(amplitudes: Sequence[complex]) -> StateVector:
    """Normalize eight amplitudes into a StateVector.

    Raises
    ------
    ZeroNormError
        If every amplitude is zero.
    """
    amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if amplitudes.shape != (DIMENSION,):
        raise InputError(f"A three-qubit state needs {DIMENSION} amplitudes, got {amplitudes.size}")
    if not np.all(np.isfinite(amplitudes)):
        raise InputError("State amplitudes must be finite")

    # Rescale by the largest modulus first so tiny or huge amplitudes neither underflow nor overflow
    largest = float(np.max(np.abs(amplitudes)))
    if largest == 0.0:
        raise ZeroNormError("Cannot normalize an all-zero amplitude vector")

    scaled = amplitudes / largest
    return StateVector(scaled / np.linalg.norm(scaled))


def basis_state(ket: str) -> StateVector:
    """Return the computational basis state with the given label, e.g. 'uuu' or 'HHV'."""
    amplitudes = np.zeros(DIMENSION, dtype=complex)
    amplitudes[basis_index(ket)] = 1.0
    return StateVector(amplitudes)


def superposition(terms: Mapping[str, complex]) -> StateVector:
    """Normalize a superposition given as {ket label: coefficient}."""
    amplitudes = np.zeros(DIMENSION, dtype=complex)
    for ket, coefficient in terms.items():
        amplitudes[basis_index(ket)] += coefficient
    return make_state(amplitudes)


def ghz_state() -> StateVector:
    """Return (|↑↑↓⟩ - |↓↓↑⟩)/√2, equivalently (|HHV⟩ - |VVH⟩)/√2."""
    amplitudes = np.zeros(DIMENSION, dtype=complex)
    amplitudes[basis_index('uud')] = np.sqrt(0.5)
    amplitudes[basis_index('ddu')] = -np.sqrt(0.5)
    return StateVector(amplitudes)


def product_state(*qubits: Sequence[complex]) -> StateVector:
    """Return the normalized tensor product of three single-qubit vectors."""
    if len(qubits) != NUM_QUBITS:
        raise InputError(f"A product state needs {NUM_QUBITS} single-qubit vectors")
    amplitudes = np.ones(1, dtype=complex)
    for qubit in qubits:
        amplitudes = np.kron(amplitudes, np.asarray(qubit, dtype=complex))
    return make_state(amplitudes)


def random_state(rng: np.random.Generator) -> StateVector:
    """Draw a pure state uniformly on the unit sphere by normalizing eight standard complex Gaussians."""
    return make_state(rng.standard_normal(DIMENSION) + 1j * rng.standard_normal(DIMENSION))


def planar_setting(angle: float, label: Optional[str] = None) -> MeasurementSetting:
    """Return the xy-plane setting (cos angle, sin angle, 0), angle measured from the x axis."""
    if not np.isfinite(angle):
        raise InvalidSettingError(f"Planar angle must be finite, got {angle!r}")
    return MeasurementSetting((np.cos(angle), np.sin(angle), 0.0), label or f"xy({angle:.12g})")


def bloch_setting(polar: float, azimuth: float, label: Optional[str] = None) -> MeasurementSetting:
    """Return the setting along (sin θ cos φ, sin θ sin φ, cos θ)."""
    direction = (np.sin(polar) * np.cos(azimuth), np.sin(polar) * np.sin(azimuth), np.cos(polar))
    return MeasurementSetting(direction, label or f"bloch({polar:.12g},{azimuth:.12g})")


def axis_setting(name: str) -> MeasurementSetting:
    """Return the Pauli setting along 'x', 'y' or 'z'."""
    try:
        return MeasurementSetting(AXES[name.lower()], name.lower())
    except KeyError:
        raise InvalidSettingError(f"Unknown axis '{name}'; expected one of {', '.join(AXES)}") from None


def planar_eigenvectors(angle: float) -> Tuple[np.ndarray, np.ndarray]:
    """Return the +1 and -1 eigenvectors (1/√2)(|↑⟩ ± e^{iθ}|↓⟩) of the planar setting at ``angle``."""
    phase = np.exp(1j * angle)
    plus = np.array([1.0, phase]) * np.sqrt(0.5)
    minus = np.array([1.0, -phase]) * np.sqrt(0.5)
    return plus, minus


def planar_scenario(angles: Sequence[float]) -> Scenario:
    """Build a scenario from six planar angles in the order A, A', B, B', C, C'."""
    if len(angles) != 2 * NUM_QUBITS:
        raise InvalidSettingError(f"Expected 6 angles, got {len(angles)}")
    return Scenario.from_settings(*(planar_setting(angle) for angle in angles))


def optimal_scenario() -> Scenario:
    """Return the planar scenario that violates the inequality maximally on the GHZ state."""
    return planar_scenario(OPTIMAL_ANGLES)


def observable_from_setting(setting: MeasurementSetting) -> Observable:
    """Return nx σx + ny σy + nz σz for the setting's direction."""
    direction = np.asarray(setting.direction, dtype=float)
    norm = float(np.linalg.norm(direction))
    if direction.shape != (3,) or abs(norm - 1.0) > NORM_TOLERANCE:
        raise InvalidSettingError(f"Setting '{setting.label}' does not have a unit direction (norm {norm!r})")

    return Observable(sum(component * pauli for component, pauli in zip(direction, PAULIS)))


def projectors(setting: MeasurementSetting) -> np.ndarray:
    """Return the stack [(I + n·σ)/2, (I - n·σ)/2] of outcome projectors, +1 first."""
    matrix = observable_from_setting(setting).matrix
    return np.stack([(IDENTITY + value * matrix) / 2 for value in OUTCOME_VALUES])


def correlation_tensor(state: StateVector, ops_a: np.ndarray, ops_b: np.ndarray, ops_c: np.ndarray) -> np.ndarray:
    """Evaluate ⟨ψ|A_x ⊗ B_y ⊗ C_z|ψ⟩ for every combination of three operator stacks.

    Parameters
    ----------
    state : StateVector
        Three-qubit state.
    ops_a, ops_b, ops_c : np.ndarray
        Stacks of shape (n, 2, 2) of single-qubit operators for each party.

    Returns
    -------
    np.ndarray
        Real array of shape (n_a, n_b, n_c).
    """
    psi = state.tensor
    raw = np.einsum('ijk,xia,yjb,zkc,abc->xyz', psi.conj(), ops_a, ops_b, ops_c, psi)
    return real_part(raw, what="three-party correlator")


def tensor_expectation(state: StateVector, a: Observable, b: Observable, c: Observable) -> float:
    """Return ⟨ψ| a ⊗ b ⊗ c |ψ⟩, which is real for Hermitian observables."""
    stacks = (a.matrix[np.newaxis], b.matrix[np.newaxis], c.matrix[np.newaxis])
    return float(correlation_tensor(state, *stacks)[0, 0, 0])


def outcome_distribution(state: StateVector, triple: Sequence[MeasurementSetting]) -> OutcomeDistribution:
    """Born-rule probabilities of every outcome triple when each party measures its setting in ``triple``."""
    if len(triple) != NUM_QUBITS:
        raise InvalidSettingError(f"Expected one setting per party, got {len(triple)}")

    probabilities = correlation_tensor(state, *(projectors(setting) for setting in triple))
    # Rounding can leave -1e-17 on impossible outcomes
    return OutcomeDistribution(np.clip(probabilities, 0.0, None))

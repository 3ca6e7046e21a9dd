"""Two-qubit spin Hamiltonian, its analytic spectrum, and transition operators.

Local product basis is ordered (|ee>, |eg>, |ge>, |gg>) with the first
slot qubit A and |e> the +1 eigenstate of sigma_z. All closed forms
below are written for

    H = eps_a sz (x) I  +  eps_b I (x) sz  +  2 kappa sx (x) sx,

whose spectrum splits into the {|ee>,|gg>} block (mixing angle phi1,
scale Omega = eps_a + eps_b) and the {|eg>,|ge>} block (mixing angle
phi2, scale Delta = eps_a - eps_b).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import InvalidParams

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)
IDENTITY_4 = np.eye(4, dtype=complex)

# sigma_minus = |g><e|, the de-excitation operator in the local basis
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)


@dataclass(frozen=True)
class SystemParams:
    """Qubit level splittings and the exchange coupling strength.

    Both splittings must be positive so that the small transition
    frequency eps_minus stays positive; kappa = 0 (decoupled qubits) is
    rejected as a degenerate configuration.
    """

    eps_a: float
    eps_b: float
    kappa: float

    def __post_init__(self) -> None:
        if not (self.eps_a > 0.0 and self.eps_b > 0.0):
            raise InvalidParams(f"energy levels must be positive, got ({self.eps_a}, {self.eps_b})")
        if self.kappa == 0.0:
            raise InvalidParams("coupling kappa must be nonzero")

    @property
    def omega(self) -> float:
        return self.eps_a + self.eps_b

    @property
    def delta(self) -> float:
        return self.eps_a - self.eps_b


@dataclass(frozen=True)
class Spectrum:
    """Analytic eigensystem: energies ascending, mixing angles, eigenvector columns."""

    energies: tuple[float, float, float, float]
    phi1: float
    phi2: float
    eigenbasis: np.ndarray  # columns |E1>..|E4> in the local basis


@dataclass(frozen=True)
class TransitionSet:
    """Eigenbasis jump operators of each qubit and their transition frequencies.

    eta_j hops within the (|E1>,|E2>) and (|E3>,|E4>) pairs at frequency
    eps_minus; xi_j within (|E1>,|E3>) and (|E2>,|E4>) at eps_plus. The
    operators are stored in the basis named by ``basis``.
    """

    eta_a: np.ndarray
    eta_b: np.ndarray
    xi_a: np.ndarray
    xi_b: np.ndarray
    eps_minus: float
    eps_plus: float
    basis: str = "local"


def qubit_a(op: np.ndarray) -> np.ndarray:
    """Embed a single-qubit operator on qubit A."""
    return np.kron(op, IDENTITY_2)


def qubit_b(op: np.ndarray) -> np.ndarray:
    """Embed a single-qubit operator on qubit B."""
    return np.kron(IDENTITY_2, op)


def build_hamiltonian(params: SystemParams) -> np.ndarray:
    """Traceless 4x4 Hamiltonian in the local product basis."""
    return (
        params.eps_a * qubit_a(SIGMA_Z)
        + params.eps_b * qubit_b(SIGMA_Z)
        + 2.0 * params.kappa * np.kron(SIGMA_X, SIGMA_X)
    )


def analytic_spectrum(params: SystemParams) -> Spectrum:
    """Closed-form spectrum and eigenbasis.

    Energies are (-R, -R', R', R) with R = sqrt(Omega^2 + 4 kappa^2) and
    R' = sqrt(Delta^2 + 4 kappa^2); the block mixing angles are

        phi1 = arctan(2 kappa / (Omega + R)),
        phi2 = arctan(2 kappa / (Delta + R')),

    equivalent to tan(2 phi1) = 2 kappa / Omega on the principal branch.
    """
    omega, delta, kappa = params.omega, params.delta, params.kappa
    big = math.sqrt(omega * omega + 4.0 * kappa * kappa)
    small = math.sqrt(delta * delta + 4.0 * kappa * kappa)
    phi1 = math.atan2(2.0 * kappa, omega + big)
    phi2 = math.atan2(2.0 * kappa, delta + small)
    s1, c1 = math.sin(phi1), math.cos(phi1)
    s2, c2 = math.sin(phi2), math.cos(phi2)
    eigenbasis = np.array(
        [
            [-s1, 0.0, 0.0, c1],
            [0.0, -s2, c2, 0.0],
            [0.0, c2, s2, 0.0],
            [c1, 0.0, 0.0, s1],
        ],
        dtype=complex,
    )
    return Spectrum(energies=(-big, -small, small, big), phi1=phi1, phi2=phi2, eigenbasis=eigenbasis)


def eigenprojector(spectrum: Spectrum, k: int) -> np.ndarray:
    """Projector |E_k><E_k| (k in 1..4) in the local basis."""
    col = spectrum.eigenbasis[:, k - 1 : k]
    return col @ col.conj().T


def transition_set(params: SystemParams) -> TransitionSet:
    """Jump operators of the qubit-bath couplings, in the local basis.

    With dyads written over the eigenbasis,

        eta_a = sin(phi1+phi2) (|E3><E4| - |E1><E2|)
        eta_b = cos(phi1-phi2) (|E3><E4| + |E1><E2|)
        xi_a  = cos(phi1+phi2) (|E2><E4| + |E1><E3|)
        xi_b  = sin(phi1-phi2) (|E2><E4| - |E1><E3|)

    these are the energy-lowering eigencomponents of each qubit's local
    sigma_x coupling operator: eta_j + xi_j + h.c. reassembles sigma_x
    on qubit j exactly, which pins every sign. Transition frequencies
    are taken from the eigenvalue gaps, eps_minus = E4 - E3 = R - R' and
    eps_plus = E4 - E2 = R + R'.
    """
    spec = analytic_spectrum(params)
    cols = [spec.eigenbasis[:, i : i + 1] for i in range(4)]

    def dyad(bra_idx: int, ket_idx: int) -> np.ndarray:
        return cols[bra_idx] @ cols[ket_idx].conj().T

    phi1, phi2 = spec.phi1, spec.phi2
    eta_a = math.sin(phi1 + phi2) * (dyad(2, 3) - dyad(0, 1))
    eta_b = math.cos(phi1 - phi2) * (dyad(2, 3) + dyad(0, 1))
    xi_a = math.cos(phi1 + phi2) * (dyad(1, 3) + dyad(0, 2))
    xi_b = math.sin(phi1 - phi2) * (dyad(1, 3) - dyad(0, 2))
    eps_minus = spec.energies[3] - spec.energies[2]
    eps_plus = spec.energies[3] - spec.energies[1]
    return TransitionSet(
        eta_a=eta_a,
        eta_b=eta_b,
        xi_a=xi_a,
        xi_b=xi_b,
        eps_minus=eps_minus,
        eps_plus=eps_plus,
        basis="local",
    )


def basis_transform(rho: np.ndarray, spectrum: Spectrum, direction: str) -> np.ndarray:
    """Rotate a state between the local and the Hamiltonian eigenbasis.

    ``direction`` is "to_eigen" (V^dag rho V) or "to_local" (V rho V^dag)
    with V the eigenbasis column matrix; the two are mutually inverse.
    """
    rho = np.asarray(rho, dtype=complex)
    v = spectrum.eigenbasis
    if direction == "to_eigen":
        return linalg.dag(v) @ rho @ v
    if direction == "to_local":
        return v @ rho @ linalg.dag(v)
    raise ValueError(f"direction must be 'to_eigen' or 'to_local', got {direction!r}")

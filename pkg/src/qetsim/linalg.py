"""Dense complex linear algebra for 4x4 operators and 16x16 superoperators.

Operators are plain ``complex128`` ndarrays. Superoperators act on
column-stacked operators: ``stack(rho)`` concatenates the columns of
``rho``, so the map ``rho -> A @ rho @ B`` is represented by the matrix
``kron(B.T, A)``. Every routine here sticks to that convention; mixing
conventions silently transposes the generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateKernel,
    DimensionMismatch,
    InvalidState,
    NoKernel,
    NonHermitianInput,
    NotConverged,
    ZeroTraceKernel,
)

HERMITICITY_TOL = 1e-12
KERNEL_RESIDUAL_TOL = 1e-10
KERNEL_GAP_MIN = 1e3
DENSITY_EIG_FLOOR = -1e-8


def stack(rho: np.ndarray) -> np.ndarray:
    """Column-stack an operator into a Liouville-space vector."""
    return np.asarray(rho, dtype=complex).flatten(order="F")


def unstack(vec: np.ndarray) -> np.ndarray:
    """Inverse of :func:`stack`."""
    v = np.asarray(vec, dtype=complex).ravel()
    n = math.isqrt(v.size)
    if n * n != v.size:
        raise DimensionMismatch(f"vector of length {v.size} is not a stacked square matrix")
    return v.reshape(n, n, order="F")


def superoperator_embed(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """16x16 matrix of the map rho -> a @ rho @ b on stacked operators."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (4, 4) or b.shape != (4, 4):
        raise DimensionMismatch(f"expected 4x4 factors, got {a.shape} and {b.shape}")
    return np.kron(b.T, a)


def dag(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(m).conj().T


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues and the matching orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def hermitian_eigendecomposition(m: np.ndarray) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises:
        NonHermitianInput: if any entry of ``m - m.conj().T`` exceeds 1e-12.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    defect = np.abs(m - dag(m)).max()
    if defect > HERMITICITY_TOL:
        raise NonHermitianInput(f"max |M - M^dag| entry {defect:.3e} exceeds {HERMITICITY_TOL}")
    values, vectors = np.linalg.eigh(m)
    return EigenDecomposition(values=values, vectors=vectors)


def null_vector(liouvillian: np.ndarray) -> tuple[np.ndarray, float]:
    """Trace-normalized kernel vector of a superoperator, plus the kernel-gap ratio.

    The full singular decomposition is cheap at 16x16 and supplies the
    uniqueness diagnostic for free: ``gap_ratio`` is the second-smallest
    singular value over the smallest one.

    Raises:
        NoKernel: smallest singular value is not small relative to ``||L||``.
        DegenerateKernel: ``gap_ratio`` below 1e3 (steady state not unique).
        ZeroTraceKernel: kernel vector unstacks to a traceless operator.
    """
    liou = np.asarray(liouvillian, dtype=complex)
    if liou.ndim != 2 or liou.shape[0] != liou.shape[1]:
        raise DimensionMismatch(f"expected a square superoperator, got shape {liou.shape}")
    _, sing, vh = np.linalg.svd(liou)
    if sing[0] == 0.0:
        raise DegenerateKernel("zero superoperator has a fully degenerate kernel")
    residual = sing[-1] / sing[0]
    if residual >= KERNEL_RESIDUAL_TOL:
        raise NoKernel(f"relative kernel residual {residual:.3e} >= {KERNEL_RESIDUAL_TOL}")
    if sing[-1] == 0.0:
        gap_ratio = math.inf if sing[-2] > 0.0 else 0.0
    else:
        gap_ratio = float(sing[-2] / sing[-1])
    if gap_ratio < KERNEL_GAP_MIN:
        raise DegenerateKernel(f"kernel gap ratio {gap_ratio:.3e} below {KERNEL_GAP_MIN:.0e}")
    vec = vh[-1].conj()
    trace = np.trace(unstack(vec))
    if abs(trace) < 1e-12:
        raise ZeroTraceKernel(f"kernel trace magnitude {abs(trace):.3e} below 1e-12")
    return vec / trace, gap_ratio


def _rk4_step_matrix(liou: np.ndarray, h: float) -> np.ndarray:
    # Classical RK4 on the linear system dv/dt = L v is exactly the
    # degree-4 Taylor polynomial of exp(h L).
    dim = liou.shape[0]
    step = np.eye(dim, dtype=complex)
    term = np.eye(dim, dtype=complex)
    for k in range(1, 5):
        term = term @ (h * liou) / k
        step = step + term
    return step


def integrate_generator(
    liouvillian: np.ndarray,
    rho0: np.ndarray,
    t_max: float,
    tol: float,
    *,
    stop_early: bool = True,
) -> np.ndarray:
    """Propagate d(stack rho)/dt = L stack(rho) with fixed-step classical RK4.

    The step is fixed at ``h`` with ``||L||_inf * h <= 0.1``. Steps are
    applied through powers of the one-step update matrix (identical
    arithmetic up to float reassociation) so long horizons stay cheap;
    the derivative norm is checked between chunks and propagation stops
    once ``||L stack(rho)|| < tol``. The endpoint is re-Hermitized as
    ``(rho + rho^dag)/2`` and trace-renormalized.

    Args:
        stop_early: when False, integrate the full horizon and return the
            endpoint without raising, useful for trajectory checks.

    Raises:
        NotConverged: ``t_max`` reached with derivative norm >= ``tol``
            (only with ``stop_early=True``).
    """
    liou = np.asarray(liouvillian, dtype=complex)
    if liou.shape != (16, 16):
        raise DimensionMismatch(f"expected a 16x16 generator, got shape {liou.shape}")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    rho0 = np.asarray(rho0, dtype=complex)
    validate_density(rho0)

    norm_inf = float(np.abs(liou).sum(axis=1).max())
    vec = stack(rho0)

    def finish(v: np.ndarray) -> np.ndarray:
        rho = unstack(v)
        rho = (rho + dag(rho)) / 2.0
        return rho / np.trace(rho).real

    n_steps = max(1, math.ceil(norm_inf * t_max / 0.1))
    h = t_max / n_steps
    step = _rk4_step_matrix(liou, h)

    if not stop_early:
        return finish(np.linalg.matrix_power(step, n_steps) @ vec)

    done = 0
    chunk = 1
    chunk_matrix = step
    while np.linalg.norm(liou @ vec) >= tol:
        if done >= n_steps:
            raise NotConverged(
                f"derivative norm {np.linalg.norm(liou @ vec):.3e} >= {tol:.3e} at t={t_max}"
            )
        take = min(chunk, n_steps - done)
        if take == chunk:
            vec = chunk_matrix @ vec
        else:
            vec = np.linalg.matrix_power(step, take) @ vec
        done += take
        if chunk < n_steps - done:
            chunk *= 2
            chunk_matrix = chunk_matrix @ chunk_matrix
    return finish(vec)


def validate_density(rho: np.ndarray, *, eig_floor: float = DENSITY_EIG_FLOOR) -> np.ndarray:
    """Check Hermiticity, unit trace, and eigenvalue floor of a density matrix.

    The floor defaults to -1e-8, the slack tolerated for Redfield steady
    states; admissible inputs are returned as-is, never clamped.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidState(f"density matrix must be square, got shape {rho.shape}")
    herm_defect = np.abs(rho - dag(rho)).max()
    if herm_defect > 1e-10:
        raise InvalidState(f"density matrix not Hermitian: max defect {herm_defect:.3e}")
    trace = np.trace(rho)
    if abs(trace - 1.0) > 1e-8:
        raise InvalidState(f"density matrix trace {trace} differs from 1")
    min_eig = float(np.linalg.eigvalsh((rho + dag(rho)) / 2).min())
    if min_eig < eig_floor:
        raise InvalidState(f"density matrix eigenvalue {min_eig:.3e} below {eig_floor:.1e}")
    return rho

"""Non-secular Bloch-Redfield generator for two independent reservoirs.

Each qubit couples to its own bosonic or fermionic bath through a flat
coupling spectrum (rate gamma independent of transition frequency; no
Lamb-shift terms). The dissipator expands over the eigenbasis jump
operators eta_j, xi_j at the two transition frequencies without any
secular approximation, so population and coherence dynamics stay
coupled. Two term orderings are provided behind ``variant``:

* ``"paper"`` (default) - asymmetric grouping in which the eta^dag..xi
  cross sandwich recurs under both absorption rates and the
  non-sandwich cross products carry mixed operator order;
* ``"standard"`` - the symmetric double sum over jump-operator pairs.

Their secular parts are identical; steady-state populations must agree
to 1e-3 at weak coupling (enforced by tests), while coherence-level
differences are reported, not asserted.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    InvalidParams,
    NonPositiveFrequency,
    NotXForm,
    PositivityViolation,
)
from .protocol import (
    ProtocolResult,
    _off_x_mask,
    e_out_closed_form,
    simulate_protocol,
)
from .system import (
    IDENTITY_4,
    SystemParams,
    analytic_spectrum,
    basis_transform,
    build_hamiltonian,
    transition_set,
)

DISSIPATOR_VARIANTS = ("paper", "standard")
THETA_POLICIES = ("optimal", "theta1", "theta2", "fixed")

OFF_X_TOL = 1e-6
MIN_EIG_SLACK = -1e-6


@dataclass(frozen=True)
class ReservoirSpec:
    """One bath: statistics, temperature, chemical potential, flat coupling rate.

    Bosonic baths must have mu = 0 (particle number not conserved).
    gamma = 0 means the bath is disconnected.
    """

    statistics: str
    temperature: float
    mu: float = 0.0
    gamma: float = 0.05

    def __post_init__(self) -> None:
        if self.statistics not in ("bose", "fermi"):
            raise InvalidParams(f"statistics must be 'bose' or 'fermi', got {self.statistics!r}")
        if not self.temperature > 0.0:
            raise InvalidParams(f"temperature must be positive, got {self.temperature}")
        if self.statistics == "bose" and self.mu != 0.0:
            raise InvalidParams("bosonic reservoirs require a vanishing chemical potential")
        if self.gamma < 0.0:
            raise InvalidParams(f"coupling rate gamma must be nonnegative, got {self.gamma}")


@dataclass(frozen=True)
class SteadyStateResult:
    """Steady state in both bases plus solver diagnostics.

    populations are the eigenbasis diagonal p1..p4; residual is
    ||L stack(rho)|| / ||L||; gap_ratio certifies kernel uniqueness.
    """

    rho_local: np.ndarray
    rho_eigen: np.ndarray
    populations: tuple[float, float, float, float]
    residual: float
    min_eigenvalue: float
    gap_ratio: float


def occupation(spec: ReservoirSpec, omega: float) -> float:
    """Mean occupation n(omega) of the bath mode at a positive frequency.

    Bose-Einstein 1/(e^{(w-mu)/T} - 1) or Fermi-Dirac
    1/(e^{(w-mu)/T} + 1), evaluated in overflow-safe form.
    """
    if not omega > 0.0:
        raise NonPositiveFrequency(f"occupation requires omega > 0, got {omega}")
    x = (omega - spec.mu) / spec.temperature
    if spec.statistics == "bose":
        # x > 0 is guaranteed by mu = 0 and omega > 0
        if x > 700.0:
            return math.exp(-x)
        return 1.0 / math.expm1(x)
    if x > 700.0:
        return math.exp(-x)
    if x < -700.0:
        return 1.0
    return 1.0 / (math.exp(x) + 1.0)


def rates(spec: ReservoirSpec, omega: float) -> tuple[float, float]:
    """Excitation and relaxation rates (alpha, beta) at a transition frequency.

    alpha = gamma n(omega); beta = gamma (1 + n) for bosons and
    gamma (1 - n) for fermions, so alpha/beta obeys detailed balance.
    """
    n = occupation(spec, omega)
    alpha = spec.gamma * n
    if spec.statistics == "bose":
        beta = spec.gamma * (1.0 + n)
    else:
        # 1 - n(x) = n(-x) for the Fermi function; evaluate stably
        x = (omega - spec.mu) / spec.temperature
        if x > 700.0:
            one_minus_n = 1.0
        elif x < -700.0:
            one_minus_n = math.exp(x)
        else:
            one_minus_n = 1.0 / (math.exp(-x) + 1.0)
        beta = spec.gamma * one_minus_n
    return alpha, beta


def _term_list_paper(eta: np.ndarray, xi: np.ndarray, am: float, ap: float, bm: float, bp: float):
    etad, xid = linalg.dag(eta), linalg.dag(xi)
    return [
        (am, etad, eta), (am, etad, xi), (-am, eta @ etad, None), (-am, xi @ etad, None),
        (ap, xid, xi), (ap, etad, xi), (-ap, xi @ xid, None), (-ap, eta @ xid, None),
        (bm, eta, etad), (bm, eta, xid), (-bm, etad @ eta, None), (-bm, xid @ eta, None),
        (bp, xi, xid), (bp, eta, xid), (-bp, xid @ xi, None), (-bp, etad @ xi, None),
    ]


def _term_list_standard(eta: np.ndarray, xi: np.ndarray, am: float, ap: float, bm: float, bp: float):
    terms = []
    for x_op, alpha, beta in ((eta, am, bm), (xi, ap, bp)):
        for y_op in (eta, xi):
            y_dag = linalg.dag(y_op)
            terms.append((alpha, y_dag, x_op))
            terms.append((-alpha, x_op @ y_dag, None))
            terms.append((beta, x_op, y_dag))
            terms.append((-beta, y_dag @ x_op, None))
    return terms


def single_bath_dissipator(
    eta: np.ndarray,
    xi: np.ndarray,
    alpha_minus: float,
    alpha_plus: float,
    beta_minus: float,
    beta_plus: float,
    variant: str = "paper",
) -> np.ndarray:
    """Dissipator of one bath from its jump operators and four rates.

    Every listed term X rho Y contributes embed(X, Y) plus the Hermitian
    conjugate of the whole map, so the result preserves trace and
    Hermiticity by construction in either variant.
    """
    if variant not in DISSIPATOR_VARIANTS:
        raise InvalidParams(f"variant must be one of {DISSIPATOR_VARIANTS}, got {variant!r}")
    term_list = _term_list_paper if variant == "paper" else _term_list_standard
    coefs: list[float] = []
    lefts: list[np.ndarray] = []
    rights: list[np.ndarray] = []
    for coef, left, right in term_list(eta, xi, alpha_minus, alpha_plus, beta_minus, beta_plus):
        if right is None:
            left, right = left, IDENTITY_4
        coefs.extend((coef, coef))
        lefts.extend((left, linalg.dag(right)))
        rights.extend((right, linalg.dag(left)))
    # batched embed: sum_n c_n kron(B_n.T, A_n), one einsum instead of 64 krons
    c = np.asarray(coefs, dtype=complex)
    a = np.asarray(lefts)
    b = np.asarray(rights)
    return np.einsum("n,nki,njl->ijkl", c, b, a).reshape(16, 16)


def build_dissipator(
    params: SystemParams,
    specs: tuple[ReservoirSpec, ReservoirSpec],
    variant: str = "paper",
) -> np.ndarray:
    """16x16 dissipation superoperator for the two baths, local basis."""
    if variant not in DISSIPATOR_VARIANTS:
        raise InvalidParams(f"variant must be one of {DISSIPATOR_VARIANTS}, got {variant!r}")
    trans = transition_set(params)
    operators = ((trans.eta_a, trans.xi_a), (trans.eta_b, trans.xi_b))
    dissipator = np.zeros((16, 16), dtype=complex)
    for spec, (eta, xi) in zip(specs, operators):
        if spec.gamma == 0.0:
            continue
        if spec.gamma > 0.1 * trans.eps_minus:
            warnings.warn(
                f"gamma={spec.gamma} above 0.1*eps_minus={0.1 * trans.eps_minus:.4g}; "
                "weak-coupling treatment is questionable",
                stacklevel=2,
            )
        alpha_minus, beta_minus = rates(spec, trans.eps_minus)
        alpha_plus, beta_plus = rates(spec, trans.eps_plus)
        dissipator += single_bath_dissipator(
            eta, xi, alpha_minus, alpha_plus, beta_minus, beta_plus, variant
        )
    return dissipator


def build_liouvillian(
    params: SystemParams,
    specs: tuple[ReservoirSpec, ReservoirSpec],
    variant: str = "paper",
) -> np.ndarray:
    """Full generator -i[H, .] plus the dissipator, on stacked operators."""
    hamiltonian = build_hamiltonian(params)
    coherent = -1j * (
        linalg.superoperator_embed(hamiltonian, IDENTITY_4)
        - linalg.superoperator_embed(IDENTITY_4, hamiltonian)
    )
    return coherent + build_dissipator(params, specs, variant)


def steady_state(
    params: SystemParams,
    specs: tuple[ReservoirSpec, ReservoirSpec],
    variant: str = "paper",
) -> SteadyStateResult:
    """Unique steady state of the generator with diagnostics.

    The kernel vector is trace-normalized, re-Hermitized as
    (rho + rho^dag)/2, and checked against the X pattern in the
    eigenbasis (entries outside the diagonal and anti-diagonal must
    vanish; anything above 1e-6 signals a construction bug).
    """
    liouvillian = build_liouvillian(params, specs, variant)
    vec, gap_ratio = linalg.null_vector(liouvillian)
    rho_local = linalg.unstack(vec)
    rho_local = (rho_local + linalg.dag(rho_local)) / 2.0
    rho_local = rho_local / np.trace(rho_local).real
    spectrum = analytic_spectrum(params)
    rho_eigen = basis_transform(rho_local, spectrum, "to_eigen")

    off_x = float(np.abs(rho_eigen[_off_x_mask()]).max())
    if off_x > OFF_X_TOL:
        raise NotXForm(f"steady state breaks the X pattern: off-pattern magnitude {off_x:.3e}")
    min_eigenvalue = float(np.linalg.eigvalsh(rho_local).min())
    if min_eigenvalue < MIN_EIG_SLACK:
        raise PositivityViolation(
            f"steady-state eigenvalue {min_eigenvalue:.3e} below slack {MIN_EIG_SLACK:.1e}"
        )
    residual = float(
        np.linalg.norm(liouvillian @ linalg.stack(rho_local)) / np.linalg.norm(liouvillian, 2)
    )
    populations = tuple(float(p) for p in np.real(np.diag(rho_eigen)))
    return SteadyStateResult(
        rho_local=rho_local,
        rho_eigen=rho_eigen,
        populations=populations,
        residual=residual,
        min_eigenvalue=min_eigenvalue,
        gap_ratio=gap_ratio,
    )


def qet_at_steady_state(
    params: SystemParams,
    specs: tuple[ReservoirSpec, ReservoirSpec],
    theta_policy: str = "optimal",
    fixed_theta: float | None = None,
    variant: str = "paper",
) -> tuple[SteadyStateResult, ProtocolResult]:
    """Solve the steady state and run the protocol on it.

    theta_policy picks the applied angle: "optimal" uses whichever
    stationary angle wins (so e_out equals e_max), "theta1"/"theta2"
    fix the branch, "fixed" applies ``fixed_theta`` as given.
    """
    if theta_policy not in THETA_POLICIES:
        raise InvalidParams(f"theta_policy must be one of {THETA_POLICIES}, got {theta_policy!r}")
    if theta_policy == "fixed" and fixed_theta is None:
        raise InvalidParams("theta_policy 'fixed' requires fixed_theta")
    steady = steady_state(params, specs, variant)
    probe = simulate_protocol(steady.rho_local, 0.0, params)
    theta = {
        "optimal": probe.theta_star,
        "theta1": probe.theta1,
        "theta2": probe.theta2,
        "fixed": fixed_theta,
    }[theta_policy]
    result = simulate_protocol(steady.rho_local, theta, params)
    return steady, result


def stationary_outputs(result: ProtocolResult) -> tuple[float, float]:
    """E_out at the two stationary angles, from the closed form."""
    return (
        e_out_closed_form(result.d_coef, result.f_coef, result.theta1),
        e_out_closed_form(result.d_coef, result.f_coef, result.theta2),
    )

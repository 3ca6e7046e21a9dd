"""Declarative parameter sweeps and the bundled figure presets.

A :class:`Scenario` names a base system, base baths, and one or two
axes. Axis names carry the parameter mapping:

    T     both bath temperatures set to the value
    mu    both chemical potentials set to the value
    eps   both qubit splittings set to the value
    dT    T_a = Tbar + v/2, T_b = Tbar - v/2 around the current mean
    dmu   mu_a/mu_b split the same way around the current mean
    deps  eps_a/eps_b split around the current mean splitting
    k     eigenstate index 1..4 (bath-free scenarios)
    theta fixed protocol angle (bath-free scenarios)

Axes are applied in order, so a preset may set an equal-bath value with
a discrete first axis and sweep the difference with the second. Grid
points that violate a domain guard (temperature floor 1e-3, positive
splittings) are emitted as skipped records with the reason in-band,
never dropped.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, EmptySweep, InvalidParams, QetError, UnknownPreset
from .protocol import e_out_closed_form, simulate_protocol
from .redfield import (
    ReservoirSpec,
    THETA_POLICIES,
    steady_state,
)
from .system import SystemParams, analytic_spectrum, eigenprojector

TEMPERATURE_FLOOR = 1e-3
DEFAULT_STEPS_1D = 101
DEFAULT_STEPS_2D = 41

AXIS_NAMES = ("T", "mu", "eps", "dT", "dmu", "deps", "k", "theta")
_BATH_AXES = ("T", "mu", "dT", "dmu")
_MU_AXES = ("mu", "dmu")


@dataclass(frozen=True)
class GridSpec:
    """One sweep axis: either a uniform range or an explicit value list."""

    name: str
    lo: float | None = None
    hi: float | None = None
    steps: int | None = None
    values: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.name not in AXIS_NAMES:
            raise ConfigError(f"unknown axis name {self.name!r}; known: {AXIS_NAMES}")
        if self.values is not None:
            if len(self.values) < 2:
                raise ConfigError(f"axis {self.name!r} needs at least 2 points")
            if any(b <= a for a, b in zip(self.values, self.values[1:])):
                raise ConfigError(f"axis {self.name!r} values must be strictly ascending")
        else:
            if self.lo is None or self.hi is None:
                raise ConfigError(f"axis {self.name!r} needs lo/hi or explicit values")
            if not self.lo < self.hi:
                raise ConfigError(f"axis {self.name!r} needs lo < hi")
            if self.steps is not None and self.steps < 2:
                raise ConfigError(f"axis {self.name!r} needs at least 2 steps")

    @property
    def is_discrete(self) -> bool:
        return self.values is not None

    def points(self, resolution: int | None = None) -> tuple[float, ...]:
        """Grid points; ``resolution`` overrides the step count of range axes only."""
        if self.values is not None:
            return self.values
        steps = resolution if resolution is not None else (self.steps or DEFAULT_STEPS_1D)
        return tuple(float(x) for x in np.linspace(self.lo, self.hi, steps))


@dataclass(frozen=True)
class Scenario:
    """A named sweep: base parameters, axis grids, and the reporting policy.

    ``defaulted_axes`` lists axes whose numeric range was chosen here
    rather than taken from the published parameterization.
    """

    name: str
    base_system: SystemParams
    base_baths: tuple[ReservoirSpec, ReservoirSpec] | None
    theta_policy: str
    axes: tuple[GridSpec, ...]
    fixed_theta: float | None = None
    dissipator_variant: str = "paper"
    defaulted_axes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError(f"scenario {self.name!r} needs 1 or 2 axes, got {len(self.axes)}")
        if self.theta_policy not in THETA_POLICIES:
            raise ConfigError(f"unknown theta_policy {self.theta_policy!r}")
        names = [axis.name for axis in self.axes]
        if len(set(names)) != len(names):
            raise ConfigError(f"scenario {self.name!r} repeats an axis name")
        if self.base_baths is None:
            bad = [n for n in names if n in _BATH_AXES]
            if bad:
                raise ConfigError(f"bath-free scenario {self.name!r} cannot sweep {bad}")
        else:
            for axis_name in names:
                if axis_name in _MU_AXES and any(b.statistics == "bose" for b in self.base_baths):
                    raise ConfigError(
                        f"scenario {self.name!r} sweeps {axis_name!r} but bosonic baths "
                        "carry no chemical potential"
                    )
            if self.theta_policy == "fixed" and self.fixed_theta is None and "theta" not in names:
                raise ConfigError(f"scenario {self.name!r}: fixed policy without a theta source")


@dataclass(frozen=True)
class SweepRecord:
    """Flat result of one grid point; numeric fields are None when skipped."""

    scenario: str
    axis1_name: str
    axis1: float
    axis2_name: str = ""
    axis2: float | None = None
    e_out_max: float | None = None
    e_out_theta1: float | None = None
    e_out_theta2: float | None = None
    theta_star: float | None = None
    d_coef: float | None = None
    f_coef: float | None = None
    e0: float | None = None
    e_a: float | None = None
    injected: float | None = None
    p1: float | None = None
    p2: float | None = None
    p3: float | None = None
    p4: float | None = None
    residual: float | None = None
    min_eigenvalue: float | None = None
    gap_ratio: float | None = None
    skipped: bool = False
    skip_reason: str = ""


class _SkipPoint(Exception):
    """Internal: a grid point violates a domain guard."""


def scenario_params_at(
    scenario: Scenario, values: dict[str, float]
) -> tuple[SystemParams, tuple[ReservoirSpec, ReservoirSpec] | None, float | None, int | None]:
    """Apply the axis mapping; returns (system, baths, fixed theta, eigenstate index).

    Raises:
        _SkipPoint: domain guard violated at this point (caller records a skip).
    """
    eps_a, eps_b = scenario.base_system.eps_a, scenario.base_system.eps_b
    kappa = scenario.base_system.kappa
    have_baths = scenario.base_baths is not None
    temps = [b.temperature for b in scenario.base_baths] if have_baths else [0.0, 0.0]
    mus = [b.mu for b in scenario.base_baths] if have_baths else [0.0, 0.0]
    theta = scenario.fixed_theta
    state_index: int | None = None

    for axis in scenario.axes:
        value = values[axis.name]
        if axis.name == "eps":
            eps_a = eps_b = value
        elif axis.name == "deps":
            mean = (eps_a + eps_b) / 2.0
            eps_a, eps_b = mean + value / 2.0, mean - value / 2.0
        elif axis.name == "T":
            temps = [value, value]
        elif axis.name == "dT":
            mean = (temps[0] + temps[1]) / 2.0
            temps = [mean + value / 2.0, mean - value / 2.0]
        elif axis.name == "mu":
            mus = [value, value]
        elif axis.name == "dmu":
            mean = (mus[0] + mus[1]) / 2.0
            mus = [mean + value / 2.0, mean - value / 2.0]
        elif axis.name == "theta":
            theta = value
        elif axis.name == "k":
            state_index = int(round(value))

    if min(eps_a, eps_b) <= 0.0:
        raise _SkipPoint(f"energy level not positive: eps_a={eps_a:.6g} eps_b={eps_b:.6g}")
    if have_baths and min(temps) < TEMPERATURE_FLOOR:
        raise _SkipPoint(f"temperature {min(temps):.6g} below floor {TEMPERATURE_FLOOR}")
    try:
        system = SystemParams(eps_a=eps_a, eps_b=eps_b, kappa=kappa)
        baths_out = (
            tuple(
                replace(base, temperature=t, mu=m)
                for base, t, m in zip(scenario.base_baths, temps, mus)
            )
            if have_baths
            else None
        )
    except InvalidParams as exc:
        raise _SkipPoint(str(exc)) from exc
    return system, baths_out, theta, state_index


def evaluate_point(scenario: Scenario, values: dict[str, float]) -> SweepRecord:
    """One grid point: steady state (or eigenstate), protocol outputs, diagnostics."""
    axis1 = scenario.axes[0]
    axis2 = scenario.axes[1] if len(scenario.axes) == 2 else None
    base = dict(
        scenario=scenario.name,
        axis1_name=axis1.name,
        axis1=float(values[axis1.name]),
        axis2_name=axis2.name if axis2 is not None else "",
        axis2=float(values[axis2.name]) if axis2 is not None else None,
    )
    try:
        system, baths, theta, state_index = scenario_params_at(scenario, values)
    except _SkipPoint as skip:
        return SweepRecord(**base, skipped=True, skip_reason=str(skip))

    try:
        if baths is None:
            spectrum = analytic_spectrum(system)
            rho = eigenprojector(spectrum, state_index if state_index is not None else 1)
            populations = tuple(
                1.0 if i + 1 == (state_index or 1) else 0.0 for i in range(4)
            )
            residual, min_eig, gap_ratio = 0.0, 0.0, 0.0
        else:
            steady = steady_state(system, baths, scenario.dissipator_variant)
            rho = steady.rho_local
            populations = steady.populations
            residual, min_eig, gap_ratio = steady.residual, steady.min_eigenvalue, steady.gap_ratio

        probe = simulate_protocol(rho, 0.0, system)
    except QetError as failure:
        # per-point solver failures (e.g. positivity violations at extreme
        # weak-coupling corners) are recorded as gaps, never fatal
        return SweepRecord(**base, skipped=True, skip_reason=f"solver: {failure}")
    out1 = e_out_closed_form(probe.d_coef, probe.f_coef, probe.theta1)
    out2 = e_out_closed_form(probe.d_coef, probe.f_coef, probe.theta2)
    if scenario.theta_policy == "fixed":
        # fixed-angle scenarios report the applied angle's output in all
        # three e_out columns; theta_star carries the applied angle
        applied = e_out_closed_form(probe.d_coef, probe.f_coef, theta)
        out1 = out2 = out_max = applied
        theta_star = float(theta)
    else:
        out_max = max(out1, out2)
        theta_star = probe.theta_star
    return SweepRecord(
        **base,
        e_out_max=out_max,
        e_out_theta1=out1,
        e_out_theta2=out2,
        theta_star=theta_star,
        d_coef=probe.d_coef,
        f_coef=probe.f_coef,
        e0=probe.e0,
        e_a=probe.e_a,
        injected=probe.e_a - probe.e0,
        p1=populations[0],
        p2=populations[1],
        p3=populations[2],
        p4=populations[3],
        residual=residual,
        min_eigenvalue=min_eig,
        gap_ratio=gap_ratio,
    )


def run_sweep(
    scenario: Scenario,
    resolution: int | None = None,
    max_workers: int | None = None,
) -> list[SweepRecord]:
    """Evaluate the full grid, row-major over axes, in deterministic order.

    Points are independent pure evaluations; ``QET_STEADY_THREADS`` (or
    ``max_workers``) caps optional thread parallelism, after which the
    record order is restored.
    """
    grids = [axis.points(resolution if not axis.is_discrete else None) for axis in scenario.axes]
    if len(grids) == 1:
        combos = [{scenario.axes[0].name: v} for v in grids[0]]
    else:
        combos = [
            {scenario.axes[0].name: v1, scenario.axes[1].name: v2}
            for v1 in grids[0]
            for v2 in grids[1]
        ]
    workers = max_workers if max_workers is not None else int(os.environ.get("QET_STEADY_THREADS", "1"))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda vals: evaluate_point(scenario, vals), combos))
    else:
        records = [evaluate_point(scenario, vals) for vals in combos]
    if records and all(r.skipped for r in records):
        raise EmptySweep(f"every point of scenario {scenario.name!r} was skipped")
    return records


def representative_values(scenario: Scenario) -> dict[str, float]:
    """One in-grid point per scenario: first value of discrete axes, midpoint of ranges."""
    values: dict[str, float] = {}
    for axis in scenario.axes:
        if axis.is_discrete:
            values[axis.name] = axis.values[0]
        else:
            values[axis.name] = (axis.lo + axis.hi) / 2.0
    return values


def _bose(temperature: float, gamma: float = 0.05) -> ReservoirSpec:
    return ReservoirSpec(statistics="bose", temperature=temperature, mu=0.0, gamma=gamma)


def _fermi(temperature: float, mu: float, gamma: float = 0.05) -> ReservoirSpec:
    return ReservoirSpec(statistics="fermi", temperature=temperature, mu=mu, gamma=gamma)


def _preset_fig1() -> Scenario:
    # bath-free: protocol output of each eigenstate versus the applied angle
    return Scenario(
        name="fig1",
        base_system=SystemParams(2.0, 2.0, 1.0),
        base_baths=None,
        theta_policy="fixed",
        axes=(
            GridSpec("k", values=(1.0, 2.0, 3.0, 4.0)),
            GridSpec("theta", 0.0, math.pi, DEFAULT_STEPS_1D),
        ),
        defaulted_axes=("theta",),
    )


def _preset_fig2a() -> Scenario:
    # equilibrium bosonic temperature sweep at four level splittings
    return Scenario(
        name="fig2a",
        base_system=SystemParams(2.0, 2.0, 1.0),
        base_baths=(_bose(1.0), _bose(1.0)),
        theta_policy="optimal",
        axes=(
            GridSpec("eps", values=(0.1, 1.0, 5.0, 10.0)),
            GridSpec("T", 0.1, 10.0, DEFAULT_STEPS_1D),
        ),
        defaulted_axes=("T",),
    )


def _preset_fig2b() -> Scenario:
    # equilibrium bosonic level sweep at four temperatures
    return Scenario(
        name="fig2b",
        base_system=SystemParams(2.0, 2.0, 1.0),
        base_baths=(_bose(1.0), _bose(1.0)),
        theta_policy="optimal",
        axes=(
            GridSpec("T", values=(0.1, 1.0, 5.0, 10.0)),
            GridSpec("eps", 0.1, 10.0, DEFAULT_STEPS_1D),
        ),
        defaulted_axes=("eps",),
    )


def _preset_fig3() -> Scenario:
    # equilibrium fermionic chemical-potential sweep; both stationary-angle
    # outputs are recorded per point, curves at two level splittings
    return Scenario(
        name="fig3",
        base_system=SystemParams(1.0, 1.0, 1.0),
        base_baths=(_fermi(1.0, 0.0), _fermi(1.0, 0.0)),
        theta_policy="optimal",
        axes=(
            GridSpec("eps", values=(1.0, 3.0)),
            GridSpec("mu", 0.0, 8.0, 81),
        ),
        defaulted_axes=("mu",),
    )


def _preset_fig4a1() -> Scenario:
    # bosonic temperature-difference sweep at three mean temperatures
    return Scenario(
        name="fig4a1",
        base_system=SystemParams(2.0, 2.0, 1.0),
        base_baths=(_bose(0.5), _bose(0.5)),
        theta_policy="optimal",
        axes=(
            GridSpec("T", values=(0.5, 2.0, 5.0)),
            GridSpec("dT", -3.8, 3.8, DEFAULT_STEPS_1D),
        ),
        defaulted_axes=("dT",),
    )


def _preset_fig4a2_heatmap() -> Scenario:
    # bosonic (dT, deps) grid around Tbar=0.5, mean splitting 2
    return Scenario(
        name="fig4a2_bosonic_heatmap",
        base_system=SystemParams(2.0, 2.0, 1.0),
        base_baths=(_bose(0.5), _bose(0.5)),
        theta_policy="optimal",
        axes=(
            GridSpec("dT", -0.9, 0.9, DEFAULT_STEPS_2D),
            GridSpec("deps", -3.8, 3.8, DEFAULT_STEPS_2D),
        ),
        defaulted_axes=("dT", "deps"),
    )


def _preset_fig5(mu: float, tag: str) -> Scenario:
    # fermionic temperature-difference sweep at mean temperature 1
    return Scenario(
        name=f"fig5{tag}",
        base_system=SystemParams(2.0, 2.0, 1.0),
        base_baths=(_fermi(1.0, mu), _fermi(1.0, mu)),
        theta_policy="optimal",
        axes=(GridSpec("dT", -1.9, 1.9, DEFAULT_STEPS_1D),),
        defaulted_axes=("dT",),
    )


def _preset_fig6(mu_bar: float, tag: str) -> Scenario:
    # fermionic chemical-potential-difference sweep at T=1
    return Scenario(
        name=f"fig6{tag}",
        base_system=SystemParams(2.0, 2.0, 1.0),
        base_baths=(_fermi(1.0, mu_bar), _fermi(1.0, mu_bar)),
        theta_policy="optimal",
        axes=(GridSpec("dmu", -6.0, 6.0, DEFAULT_STEPS_1D),),
        defaulted_axes=("dmu",),
    )


def _preset_fig7(mu: float, tag: str) -> Scenario:
    # fermionic detuning sweep around mean splitting 2 at T=1
    return Scenario(
        name=f"fig7{tag}",
        base_system=SystemParams(2.0, 2.0, 1.0),
        base_baths=(_fermi(1.0, mu), _fermi(1.0, mu)),
        theta_policy="optimal",
        axes=(GridSpec("deps", -3.8, 3.8, DEFAULT_STEPS_1D),),
        defaulted_axes=("deps",),
    )


def _preset_fig8(axes: tuple[GridSpec, GridSpec], mu: float, tag: str) -> Scenario:
    return Scenario(
        name=f"fig8{tag}",
        base_system=SystemParams(2.0, 2.0, 1.0),
        base_baths=(_fermi(0.5, mu), _fermi(0.5, mu)),
        theta_policy="optimal",
        axes=axes,
        defaulted_axes=tuple(a.name for a in axes),
    )


def _grid_dt() -> GridSpec:
    return GridSpec("dT", -0.9, 0.9, DEFAULT_STEPS_2D)


def _grid_dmu() -> GridSpec:
    return GridSpec("dmu", -6.0, 6.0, DEFAULT_STEPS_2D)


def _grid_deps() -> GridSpec:
    return GridSpec("deps", -3.8, 3.8, DEFAULT_STEPS_2D)


_PRESETS = {
    "fig1": _preset_fig1,
    "fig2a": _preset_fig2a,
    "fig2b": _preset_fig2b,
    "fig3": _preset_fig3,
    "fig4a1": _preset_fig4a1,
    "fig4a2_bosonic_heatmap": _preset_fig4a2_heatmap,
    "fig5a": lambda: _preset_fig5(1.0, "a"),
    "fig5b": lambda: _preset_fig5(2.0, "b"),
    "fig5c": lambda: _preset_fig5(8.0, "c"),
    "fig6a": lambda: _preset_fig6(1.0, "a"),
    "fig6b": lambda: _preset_fig6(6.0, "b"),
    "fig6c": lambda: _preset_fig6(8.0, "c"),
    "fig7a": lambda: _preset_fig7(1.0, "a"),
    "fig7b": lambda: _preset_fig7(8.0, "b"),
    "fig8a1": lambda: _preset_fig8((_grid_dt(), _grid_dmu()), 1.0, "a1"),
    "fig8a2": lambda: _preset_fig8((_grid_dt(), _grid_dmu()), 8.0, "a2"),
    "fig8b1": lambda: _preset_fig8((_grid_deps(), _grid_dt()), 1.0, "b1"),
    "fig8b2": lambda: _preset_fig8((_grid_deps(), _grid_dt()), 8.0, "b2"),
    "fig8c1": lambda: _preset_fig8((_grid_deps(), _grid_dmu()), 1.0, "c1"),
    "fig8c2": lambda: _preset_fig8((_grid_deps(), _grid_dmu()), 6.0, "c2"),
}


def preset_ids() -> tuple[str, ...]:
    """All registered figure preset ids."""
    return tuple(_PRESETS)


def figure_preset(figure_id: str) -> Scenario:
    """Scenario for one of the bundled figure presets."""
    try:
        builder = _PRESETS[figure_id]
    except KeyError:
        raise UnknownPreset(f"unknown figure preset {figure_id!r}; known: {sorted(_PRESETS)}") from None
    return builder()

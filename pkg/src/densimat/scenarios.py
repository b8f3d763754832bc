"""Named, config-driven regression scenarios with CSV/DMF1 artifacts and reports."""
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, ClassVar, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator
from scipy.special import erf

from . import em
from . import schrodinger as sch
from .dirac import (BoostSpec, ConjugatedFamily, XDIndependentFamily, apply_boost,
                    charge_conjugate, current_J, observables as dirac_observables,
                    residual_covariant, residual_free, rest_solution, swap_defect)
from .dirac.basis import dirac_basis
from .dirac.support import support_profile
from .errors import ConfigError, ContractViolation
from .grids import Grid3D, UniformGrid1D, dft2, lift_grids
from .io import format_float, write_csv, write_dmf1

REPORT_NAME = "report.json"


# -- configuration ---------------------------------------------------------------------------

def _even_grid(n):
    if n < 4 or n % 2:
        raise ValueError(f"grid size must be an even integer >= 4, got {n}")
    return n


class ScenarioConfig(BaseModel):
    """Common fields; each scenario adds its own physics and integrator parameters."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    scenario: str
    tolerances: Dict[str, float] = {}
    output: Optional[str] = None
    dump_fields: bool = False

    DEFAULT_TOL: ClassVar[Dict[str, float]] = {}
    GRID_FIELDS: ClassVar[Tuple[str, ...]] = ()

    @model_validator(mode="after")
    def _check(self):
        unknown = sorted(set(self.tolerances) - set(self.DEFAULT_TOL))
        if unknown:
            raise ValueError(f"unknown tolerance keys {unknown}; known: {sorted(self.DEFAULT_TOL)}")
        for k, v in self.tolerances.items():
            if not v > 0:
                raise ValueError(f"tolerance {k} must be positive")
        for name in self.GRID_FIELDS:
            _even_grid(getattr(self, name))
        return self

    def tol(self, name):
        return self.tolerances.get(name, self.DEFAULT_TOL[name])


def _positive(*names):
    @field_validator(*names)
    @classmethod
    def check(cls, v):
        if not v > 0:
            raise ValueError("must be positive")
        return v
    return check


class FreeLocalizedConfig(ScenarioConfig):
    n: int = 256
    L: float = 20.0
    n_D: int = 64
    L_D: float = 4 * np.pi
    sigma: float = 0.1
    x0: float = 0.0
    k0: float = 2.0
    mass: float = 1.0
    hbar: float = 1.0
    dt: float = 1e-3
    steps: int = 1000
    sample_every: int = 100

    GRID_FIELDS: ClassVar = ("n", "n_D")
    DEFAULT_TOL: ClassVar = {"Q": 1e-6, "P_drift": 1e-10, "E": 1e-6, "shape": 1e-8, "norm": 1e-10}
    positive_fields = _positive("L", "L_D", "sigma", "mass", "hbar", "dt", "steps", "sample_every")


class OscillatorBeatsConfig(ScenarioConfig):
    n: int = 64
    L: float = 16.0
    omega: float = 1.0
    mass: float = 1.0
    dt: float = 0.02
    order: int = 4
    sample_interval: float = 0.5
    samples: int = 20
    oracle_n: int = 512
    oracle_L: float = 20.0

    GRID_FIELDS: ClassVar = ("n", "oracle_n")
    DEFAULT_TOL: ClassVar = {"rate_rel": 1e-3, "static": 1e-8}
    positive_fields = _positive("L", "omega", "mass", "dt", "sample_interval", "samples", "oracle_L")


class MomentumSymmetryConfig(ScenarioConfig):
    n: int = 256
    L: float = 20.0
    n_D: int = 64
    L_D: float = 4 * np.pi
    sigma: float = 0.1
    x0: float = 0.5
    k0: float = 2.0

    GRID_FIELDS: ClassVar = ("n", "n_D")
    DEFAULT_TOL: ClassVar = {"P_match": 1e-8, "E_match": 1e-8, "transform_form": 1e-6}
    positive_fields = _positive("L", "L_D", "sigma")


class CommutatorConfig(ScenarioConfig):
    n: int = 96
    L: float = 24.0
    seed: int = 1
    degree: int = 5
    omega: float = 1.0
    dt: float = 1e-3
    steps: int = 1000

    GRID_FIELDS: ClassVar = ("n",)
    DEFAULT_TOL: ClassVar = {"qp_new": 1e-12, "qp_pure": 1e-10, "lift_evolution": 1e-8}
    positive_fields = _positive("L", "omega", "dt", "steps")


class DiracRestConfig(ScenarioConfig):
    n: int = 32
    L: float = 16.0
    sigma: float = 1.0
    mass: float = 1.0

    GRID_FIELDS: ClassVar = ("n",)
    DEFAULT_TOL: ClassVar = {"QEPS3": 1e-6, "S12": 1e-10, "free_residual": 1e-6}
    positive_fields = _positive("L", "sigma", "mass")


class _BoostBase(ScenarioConfig):
    L: float = 16.0
    sigma: float = 1.0
    mass: float = 1.0
    v: float = 0.5
    direction: Tuple[float, float, float] = (0.0, 0.0, 1.0)

    GRID_FIELDS: ClassVar = ("n",)
    positive_fields = _positive("L", "sigma", "mass")

    @field_validator("v")
    @classmethod
    def _v(cls, v):
        if not 0 <= v < 1:
            raise ValueError("speed must satisfy 0 <= v < 1")
        return v


class BoostObservablesConfig(_BoostBase):
    n: int = 32
    t_slice: float = 1.0

    DEFAULT_TOL: ClassVar = {"E_rel": 1e-4, "P_rel": 1e-4, "localization": 1e-6,
                             "covariant": 1e-10, "swap": 1e-10}


class SupportRegionConfig(_BoostBase):
    n: int = 40
    refine: int = 8
    x_D_offsets: Tuple[float, ...] = (1.0, 2.0, -2.0)
    thresholds: Tuple[float, ...] = (1e-4, 1e-6, 1e-8)
    kind: str = "A"

    DEFAULT_TOL: ClassVar = {"centroid": 1e-6}
    positive_extra = _positive("refine")


class ChargeConjugationConfig(ScenarioConfig):
    n: int = 32
    L: float = 16.0
    sigma: float = 1.0
    mass: float = 1.0
    v: float = 0.5
    n_1d: int = 64
    L_1d: float = 16.0
    seed: int = 3

    GRID_FIELDS: ClassVar = ("n", "n_1d")
    DEFAULT_TOL: ClassVar = {"pointwise": 1e-10, "current_flip": 1e-10, "invariants": 1e-8,
                             "lift_identity": 1e-12}
    positive_fields = _positive("L", "sigma", "mass", "L_1d")


class GaugeInvarianceConfig(ScenarioConfig):
    n: int = 64
    L: float = 16.0
    mass: float = 1.0
    e: float = 0.1
    T: float = 1.0
    dt: float = 0.05
    order: int = 4
    theta_amplitude: float = 0.5
    seed: int = 5

    GRID_FIELDS: ClassVar = ("n",)
    DEFAULT_TOL: ClassVar = {"gauge": 1e-6, "current": 1e-13, "field_strength": 1e-10}
    positive_fields = _positive("L", "mass", "T", "dt")

    @field_validator("e")
    @classmethod
    def _e(cls, v):
        if v == 0:
            raise ValueError("the gauge comparison needs e != 0")
        return v


class MaxwellVacuumConfig(ScenarioConfig):
    n: int = 256
    L: float = 20.0
    courant: float = 0.5
    T: float = 5.0
    mode: int = 1
    n3: int = 32
    L3: float = 16.0
    sigma: float = 1.0
    ramp_tau: float = 20.0
    interior_radius: float = 4.0
    n_matter: int = 64
    L_matter: float = 16.0
    e: float = 0.1
    matter_dt: float = 0.05
    matter_steps: int = 24

    GRID_FIELDS: ClassVar = ("n", "n3", "n_matter")
    DEFAULT_TOL: ClassVar = {"dispersion": 1e-4, "poisson": 1e-3, "continuity": 1e-4, "lorenz": 1e-6}
    positive_fields = _positive("L", "courant", "T", "mode", "L3", "sigma", "ramp_tau", "interior_radius",
                     "L_matter", "matter_dt", "matter_steps")


class CoupledSmokeConfig(ScenarioConfig):
    n: int = 64
    L: float = 16.0
    mass: float = 1.0
    e: float = 0.01
    dt: float = 0.05
    steps: int = 20
    sigma: float = 1.0

    GRID_FIELDS: ClassVar = ("n",)
    DEFAULT_TOL: ClassVar = {"charge_drift": 1e-4, "decoupled": 1e-14, "interacting_residual": 1e-4,
                             "conjugate_residual": 1e-4, "lift_oracle": 1e-6, "rest_drift": 1e-6,
                             "hermiticity": 1e-10}
    positive_fields = _positive("L", "mass", "dt", "steps", "sigma")


# -- reports -------------------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    value: float
    limit: float
    expected: Optional[float] = None
    passed: bool = False


@dataclass
class RunReport:
    scenario: str
    passed: bool
    checks: List[Check]
    artifacts: List[str]
    wall_clock: float = 0.0
    table: Optional[List[List]] = None

    def to_json(self):
        """Deterministic serialization; wall-clock is kept out of it."""
        def num(v):
            return None if v is None else format_float(v)
        body = {
            "scenario": self.scenario,
            "passed": self.passed,
            "checks": [{"name": c.name, "value": num(c.value), "expected": num(c.expected),
                        "limit": num(c.limit), "passed": c.passed} for c in self.checks],
            "artifacts": sorted(self.artifacts),
        }
        if self.table is not None:
            body["table"] = [[format_float(x) if isinstance(x, float) else x for x in row]
                             for row in self.table]
        return json.dumps(body, indent=2, sort_keys=True) + "\n"


class _Run:
    def __init__(self, cfg: ScenarioConfig, scale: float, out: Path):
        self.cfg, self.scale, self.out = cfg, scale, out
        self.checks: List[Check] = []
        self.artifacts: List[str] = []
        self.table = None

    def below(self, name, value, tol_key=None):
        lim = self.cfg.tol(tol_key or name) * self.scale
        v = float(value)
        self.checks.append(Check(name, v, lim, None, bool(abs(v) <= lim)))

    def close(self, name, value, expected, tol_key):
        lim = self.cfg.tol(tol_key) * self.scale
        v, x = float(value), float(expected)
        self.checks.append(Check(name, v, lim, x, bool(abs(v - x) <= lim)))

    def csv(self, name, header, rows):
        write_csv(self.out / name, header, rows)
        self.artifacts.append(name)

    def dmf1(self, name, samples, matrix_valued=None):
        if self.cfg.dump_fields:
            write_dmf1(self.out / name, samples, matrix_valued)
            self.artifacts.append(name)


# -- scenarios --------------------------------------------------------------------------------

def _free_localized(run: _Run):
    c: FreeLocalizedConfig = run.cfg
    gS, _ = lift_grids(UniformGrid1D.centered(c.n, c.L))
    gD = UniformGrid1D.centered(c.n_D, c.L_D)
    V = sch.PotentialSpec.zero()
    phi = sch.localized_solution(gS, gD, c.x0, c.k0, c.sigma, 0.0, c.hbar, c.mass)
    o0 = sch.observables(phi)
    rows = [[0.0, o0.Q, o0.P, o0.E]]
    p_drift = 0.0
    done = 0
    while done < c.steps:
        k = min(c.sample_every, c.steps - done)
        phi = sch.evolve_dm(phi, V, c.dt, k)
        done += k
        o = sch.observables(phi)
        p_drift = max(p_drift, abs(o.P - o0.P))
        rows.append([done * c.dt, o.Q, o.P, o.E])
    T = c.steps * c.dt
    v = c.hbar * c.k0 / c.mass
    ref = sch.localized_solution(gS, gD, c.x0, c.k0, c.sigma, T, c.hbar, c.mass)
    norm = float(np.sum(phi.samples[:, gD.zero_index()]).real * gS.dx)
    run.close("Q(T)", o.Q, c.x0 + v * T, "Q")
    run.below("P drift", p_drift, "P_drift")
    run.close("E(T)", o.E, 0.5 * c.mass * v**2, "E")
    run.below("shape error", np.max(np.abs(phi.samples - ref.samples)), "shape")
    run.close("norm", norm, 1.0, "norm")
    run.csv("observables.csv", ["t", "Q", "P", "E"], rows)
    line = phi.samples[:, gD.zero_index()]
    run.csv("slice.csv", ["x_S", "re", "im"], [[x, a.real, a.imag] for x, a in zip(gS.points, line)])
    run.dmf1("phi_T.dmf1", phi.samples)


def _oscillator_beats(run: _Run):
    c: OscillatorBeatsConfig = run.cfg
    g = UniformGrid1D.centered(c.n, c.L)
    V = sch.PotentialSpec.harmonic(c.omega, c.mass)
    sp = sch.eigensolve_1d(g, V, 2, mass=c.mass, stencil="spectral")
    oracle = sch.eigensolve_1d(UniformGrid1D.centered(c.oracle_n, c.oracle_L), V, 2, mass=c.mass)
    gap = float(oracle.energies[1] - oracle.energies[0])
    per = int(round(c.sample_interval / c.dt))
    p10, _ = sch.stationary_pair(sp.states[1], sp.states[0])
    p00, _ = sch.stationary_pair(sp.states[0], sp.states[0])
    # phi_10 rotates as exp(-i (E1 - E0) t), so the fitted phase rate is -(E1 - E0)
    rate, times, ov, _ = sch.phase_rate(p10, V, c.dt, per, c.samples, c.order)
    _, _, _, dev0 = sch.phase_rate(p00, V, c.dt, per, c.samples, c.order)
    run.close("beat rate / gap", -rate / gap, 1.0, "rate_rel")
    run.close("beat rate / omega", -rate / c.omega, 1.0, "rate_rel")
    run.below("phi_00 deviation", dev0, "static")
    run.csv("beats.csv", ["t", "re_overlap", "im_overlap"],
            [[t, z.real, z.imag] for t, z in zip(times, ov)])
    run.table = [["E0_oracle", float(oracle.energies[0])], ["E1_oracle", float(oracle.energies[1])],
                 ["rate", float(-rate)]]


def _momentum_symmetry(run: _Run):
    c: MomentumSymmetryConfig = run.cfg
    gS, _ = lift_grids(UniformGrid1D.centered(c.n, c.L))
    gD = UniformGrid1D.centered(c.n_D, c.L_D)
    phi = sch.localized_solution(gS, gD, c.x0, c.k0, c.sigma)
    F = dft2(phi.field)
    P_x = sch.observable_P(phi).real
    P_k = sch.observable_P_momentum(F, phi.hbar).real
    E_x = sch.observable_E(phi).real
    E_k = sch.observable_E_momentum(F, phi.hbar, phi.mass).real
    oracle = sch.localized_momentum_oracle(gS, gD, c.x0, c.k0, c.sigma)
    form = np.max(np.abs(F.samples - oracle)) / np.max(np.abs(oracle))
    run.close("P position vs momentum", P_x, P_k, "P_match")
    run.close("E position vs momentum", E_x, E_k, "E_match")
    run.below("transform form", form, "transform_form")
    j = int(round((c.k0 - F.grid_S.x0) / F.grid_S.dx))
    kD = F.grid_D.points
    row = F.samples[j]
    run.csv("transform_row.csv", ["k_D", "re", "im", "re_oracle", "im_oracle"],
            [[k, a.real, a.imag, b.real, b.imag] for k, a, b in zip(kD, row, oracle[j])])


def _commutator(run: _Run):
    c: CommutatorConfig = run.cfg
    g = UniformGrid1D.centered(c.n, c.L)
    rng = np.random.default_rng(c.seed)
    coef = rng.normal(size=c.degree + 1) + 1j * rng.normal(size=c.degree + 1)
    x = g.points
    psi = sch.WaveFunction1D(g, np.polyval(coef, x) * np.exp(-0.5 * x**2)).normalized()
    phi = sch.lift_pure(psi)
    qp = sch.apply_Q_gen(sch.apply_P_gen(phi)).samples - sch.apply_P_gen(sch.apply_Q_gen(phi)).samples
    run.below("[Q,P] new representation", np.max(np.abs(qp)), "qp_new")
    run.below("[Q,P] - i hbar pure", sch.pure_commutator_residual(psi), "qp_pure")
    V = sch.PotentialSpec.harmonic(c.omega)
    a = sch.evolve_dm(phi, V, c.dt, c.steps)
    b = sch.lift_pure(sch.evolve_pure(psi, V, c.dt, c.steps))
    run.below("lift-evolution commutation", np.max(np.abs(a.samples - b.samples)), "lift_evolution")
    line = a.samples[:, a.grid_D.zero_index()]
    run.csv("density.csv", ["x_S", "evolved_dm", "lifted_pure"],
            [[s, p.real, q.real] for s, p, q in zip(a.grid_S.points, line,
                                                   b.samples[:, b.grid_D.zero_index()])])


_REST_EXPECT = {"A": (1, 0.5), "B": (1, -0.5), "C": (-1, -0.5), "D": (-1, 0.5)}
_KINDS = ("A", "B", "C", "D")


def _dirac_rest_table(run: _Run):
    c: DiracRestConfig = run.cfg
    g = Grid3D.cube(c.n, c.L)
    rows = []
    for k in _KINDS:
        f = rest_solution(k, c.sigma, c.mass, g)
        o = dirac_observables(f, sigma=c.sigma)
        q, s3 = _REST_EXPECT[k]
        run.close(f"{k} Q", o.Q, q, "QEPS3")
        run.close(f"{k} E", o.E, c.mass, "QEPS3")
        run.below(f"{k} |P|", max(abs(p) for p in o.P), "QEPS3")
        run.close(f"{k} S3", o.S[2], s3, "QEPS3")
        run.below(f"{k} |S1|+|S2|", abs(o.S[0]) + abs(o.S[1]), "S12")
        run.below(f"{k} free residual", residual_free(f), "free_residual")
        rows.append([k, *o.as_row()])
    run.table = rows
    run.csv("rest_table.csv", ["kind", "Q", "E", "P1", "P2", "P3", "S1", "S2", "S3"], rows)


def _boost_observables(run: _Run):
    c: BoostObservablesConfig = run.cfg
    g = Grid3D.cube(c.n, c.L)
    spec = BoostSpec.from_velocity(c.v, c.direction)
    n = np.asarray(spec.n)
    E_exp, P_exp = c.mass * np.cosh(spec.xi), c.mass * np.sinh(spec.xi)
    rows = []
    for k in _KINDS:
        fam = apply_boost(rest_solution(k, c.sigma, c.mass, g), spec)
        o = dirac_observables(fam, sigma=c.sigma)
        P_par = float(np.dot(o.P, n))
        run.close(f"{k} E/(m cosh xi)", o.E / E_exp, 1.0, "E_rel")
        if P_exp > 0:
            run.close(f"{k} P/(m sinh xi)", P_par / P_exp, 1.0, "P_rel")
        j = fam.jet(c.t_slice)
        J0 = np.trace(j.phi, axis1=-2, axis2=-1).real
        centroid = float(np.sum((j.points @ n) * J0) / np.sum(J0))
        run.close(f"{k} centroid at v t", centroid, c.v * c.t_slice, "localization")
        r_left, r_right = residual_covariant(fam, 0.3, 0.2, tuple(0.4 * n + (0.1, -0.2, 0.0)))
        run.below(f"{k} covariant residual", max(r_left, r_right), "covariant")
        run.below(f"{k} swap defect", swap_defect(fam, 0.2, 0.3, (0.1, 0.0, 0.5)), "swap")
        rows.append([k, *o.as_row()])
    run.table = rows
    run.csv("boost_table.csv", ["kind", "Q", "E", "P1", "P2", "P3", "S1", "S2", "S3"], rows)


def _support_region(run: _Run):
    c: SupportRegionConfig = run.cfg
    g = Grid3D.cube(c.n, c.L)
    spec = BoostSpec.from_velocity(c.v, c.direction)
    fam = apply_boost(rest_solution(c.kind, c.sigma, c.mass, g), spec)
    slice_ = support_profile(fam, refine=c.refine)
    peak = slice_.peak
    ds = float(np.min(np.diff(slice_.s)))
    sigma_p = c.sigma / np.cosh(spec.xi)
    level3 = float(np.interp(3 * sigma_p, slice_.s, slice_.magnitude)) / peak
    run.below("slice centroid", slice_.centroid(), "centroid")
    cols = [slice_.s, slice_.magnitude]
    for off in c.x_D_offsets:
        prof = support_profile(fam, x_D_par=off, refine=c.refine)
        cone = c.v * abs(off) / 2
        # literal rule: support measured at the slice's 3 sigma' level
        ext = prof.extent(level3 * peak)
        lim = cone + 3 * sigma_p + ds
        run.checks.append(Check(f"x_D={off:g} extent at 3sigma' level", ext, lim, None, bool(ext <= lim)))
        for thr in c.thresholds:
            ext = prof.extent(thr * peak)
            lim = cone + slice_.extent(thr * peak) + ds
            run.checks.append(Check(f"x_D={off:g} extent at {thr:g}", ext, lim, None, bool(ext <= lim)))
        cols.append(prof.magnitude)
    header = ["s", "slice"] + [f"x_D={o:g}" for o in c.x_D_offsets]
    run.csv("support.csv", header, [list(r) for r in zip(*cols)])


def _charge_conjugation(run: _Run):
    c: ChargeConjugationConfig = run.cfg
    g = Grid3D.cube(c.n, c.L)
    fields = {k: rest_solution(k, c.sigma, c.mass, g) for k in _KINDS}
    for a, b in (("A", "D"), ("D", "A"), ("B", "C"), ("C", "B")):
        d = np.max(np.abs(charge_conjugate(fields[a]).samples - fields[b].samples))
        run.below(f"C({a}) - {b}", d, "pointwise")
    spec = BoostSpec.from_velocity(c.v, (0.0, 0.0, 1.0))
    fam = apply_boost(fields["A"], spec)
    conj = ConjugatedFamily(fam)
    J, Jc = current_J(fam.jet(0.0)), current_J(conj.jet(0.0))
    run.below("J + J_conjugated", np.max(np.abs(J + Jc)) / np.max(np.abs(J)), "current_flip")
    o, oc = dirac_observables(fam, sigma=c.sigma), dirac_observables(conj, sigma=c.sigma)
    run.close("Q conjugated", oc.Q, -o.Q, "invariants")
    run.close("E conjugated", oc.E, o.E, "invariants")
    for i in range(3):
        run.close(f"P{i + 1} conjugated", oc.P[i], o.P[i], "invariants")
        run.close(f"S{i + 1} conjugated", oc.S[i], o.S[i], "invariants")
    # lift(gamma^2 psi*) = -gamma^2 lift(psi)^T(y, x) gamma^2 on the reduced domain
    base = UniformGrid1D.centered(c.n_1d, c.L_1d)
    rng = np.random.default_rng(c.seed)
    z = base.points
    psi = np.stack([(rng.normal() + 1j * rng.normal()) * np.exp(-0.5 * (z - rng.uniform(-1, 1)) ** 2)
                    for _ in range(4)], axis=-1)
    g2 = dirac_basis().gamma[2]
    lhs = em.reduced_lift(psi.conj() @ g2.T, base, c.mass).samples
    rhs = -em.charge_conjugate_reduced(em.reduced_lift(psi, base, c.mass)).samples
    run.below("lift identity", np.max(np.abs(lhs - rhs)), "lift_identity")
    run.table = [["original", *o.as_row()], ["conjugated", *oc.as_row()]]
    run.csv("conjugation.csv", ["field", "Q", "E", "P1", "P2", "P3", "S1", "S2", "S3"], run.table)


def _smooth_spinor(base: UniformGrid1D, sigma=1.0, k=0.5):
    z = base.points
    psi = np.zeros((base.n, 4), dtype=complex)
    psi[:, 0] = np.exp(-0.5 * (z / sigma) ** 2 + 1j * k * z)
    psi[:, 2] = 0.3 * np.exp(-0.5 * ((z - 0.5) / sigma) ** 2)
    return psi / np.sqrt(np.sum(np.abs(psi) ** 2) * base.dx)


def _static_potential(base: UniformGrid1D):
    z = base.points
    A = np.zeros((4, base.n))
    A[0] = 0.5 * np.exp(-z**2 / 4)
    A[3] = 0.3 * np.exp(-(z - 1) ** 2 / 3)
    return A


def _gauge_invariance(run: _Run):
    c: GaugeInvarianceConfig = run.cfg
    base = UniformGrid1D.centered(c.n, c.L)
    z = base.points
    rng = np.random.default_rng(c.seed)
    ph = rng.uniform(0, 2 * np.pi, size=2)
    theta = c.theta_amplitude * (np.sin(2 * np.pi * z / c.L + ph[0])
                                 + 0.5 * np.cos(4 * np.pi * z / c.L + ph[1]))
    A = em.FourPotential.static(base, _static_potential(base), c.dt)
    Ag = em.gauge_transform_A(A, em.GaugeFunction(base, theta), c.e)
    phi0 = em.reduced_lift(_smooth_spinor(base), base, c.mass)
    steps = int(round(c.T / c.dt))
    phi = em.evolve_interacting(phi0, A.cur, c.e, c.dt, steps, order=c.order)
    phig = em.evolve_interacting(em.gauge_phase_reduced(phi0, theta), Ag.cur, c.e, c.dt, steps,
                                 order=c.order)
    back = em.gauge_phase_reduced(phi, theta)
    scale = np.max(np.abs(phi.samples))
    run.below("gauge comparison", np.max(np.abs(phig.samples - back.samples)) / scale, "gauge")
    J = em.current_density(phi, c.e)
    Jg = em.current_density(back, c.e)
    run.below("current invariance", np.max(np.abs(J - Jg)) / np.max(np.abs(J)), "current")
    dF = np.max(np.abs(em.field_strength(Ag) - em.field_strength(A)))
    run.below("field strength change", dF, "field_strength")
    gS, _ = phi.grids
    Jt = em.current_density(phig, c.e)
    run.csv("currents.csv", ["x_S", "J0", "J3", "J0_gauged", "J3_gauged"],
            [[s, a, b, p, q] for s, a, b, p, q in zip(gS.points, J[0], J[3], Jt[0], Jt[3])])
    run.dmf1("phi_T.dmf1", phi.samples, True)


def _maxwell_vacuum(run: _Run):
    c: MaxwellVacuumConfig = run.cfg
    # vacuum plane wave
    g = UniformGrid1D.centered(c.n, c.L)
    z = g.points
    dt = c.courant * g.dx
    k = 2 * np.pi * c.mode / c.L
    cur, prev = np.zeros((4, c.n)), np.zeros((4, c.n))
    cur[1], prev[1] = np.cos(k * z), np.cos(k * (z + dt))
    A = em.FourPotential(g, cur, prev, dt)
    steps = int(round(c.T / dt))
    for _ in range(steps):
        A = em.maxwell_step(A, np.zeros((4, c.n)))
    exact = np.cos(k * (z - steps * dt))
    run.below("vacuum dispersion", np.max(np.abs(A.cur[1] - exact)), "dispersion")
    run.csv("vacuum.csv", ["z", "A1", "exact"], [[a, b, e] for a, b, e in zip(z, A.cur[1], exact)])
    # static source switched on smoothly, against the lattice Poisson solution
    G = Grid3D.cube(c.n3, c.L3)
    r2 = np.sum(G.mesh() ** 2, axis=-1)
    rho = np.exp(-0.5 * r2 / c.sigma**2) / (2 * np.pi * c.sigma**2) ** 1.5
    rho -= rho.mean()
    dt3 = 0.5 * G.axes[0].dx / np.sqrt(3)
    tc = 3 * c.ramp_tau
    A3 = em.FourPotential.zeros(G, dt3)
    J = np.zeros((4,) + G.shape)
    nsteps = int(np.ceil((tc + 3 * c.ramp_tau) / dt3))
    for i in range(nsteps):
        J[0] = rho * 0.5 * (1 + erf((i * dt3 - tc) / c.ramp_tau))
        A3 = em.maxwell_step(A3, J)
    u = em.poisson_solve(rho, G)
    inner = r2 < c.interior_radius**2
    run.below("static source vs Poisson", np.max(np.abs(A3.cur[0] - u)[inner]) / np.max(np.abs(u)),
              "poisson")
    mid = c.n3 // 2
    run.csv("coulomb.csv", ["z", "A0", "poisson"],
            [[a, b, p] for a, b, p in zip(G.axes[2].points, A3.cur[0, mid, mid], u[mid, mid])])
    # Lorenz residual with a source obeying the discrete continuity equation
    J1 = np.zeros((4, c.n))
    A1 = em.FourPotential.zeros(g, dt)
    j0_prev, j0_cur = np.zeros(c.n), np.zeros(c.n)
    worst = 0.0
    for i in range(steps):
        t = i * dt
        J1[3] = np.exp(-(z - 0.3 * t) ** 2) * np.sin(t)
        J1[0] = j0_cur
        A1 = em.maxwell_step(A1, J1)
        worst = max(worst, A1.lorenz)
        j0_prev, j0_cur = j0_cur, j0_prev - 2 * dt * em.divergence(J1[1:], g)
    run.below("Lorenz residual", worst, "lorenz")
    # continuity of the currents sourcing the field in a coupled run
    base = UniformGrid1D.centered(c.n_matter, c.L_matter)
    st = em.CoupledState(em.reduced_lift(_smooth_spinor(base), base),
                         em.FourPotential.zeros(base, c.matter_dt), c.e)
    Js = []
    for _ in range(c.matter_steps + 1):
        Js.append(em.current_density(st.phi, c.e))
        st = em.coupled_step(st)
    run.below("sourced current continuity",
              em.continuity_defect(Js, c.matter_dt, st.phi.grids[0]), "continuity")


def _coupled_smoke(run: _Run):
    c: CoupledSmokeConfig = run.cfg
    base = UniformGrid1D.centered(c.n, c.L)
    psi = _smooth_spinor(base, c.sigma)
    phi0 = em.reduced_lift(psi, base, c.mass)
    z = base.points
    # coupled trace
    A0 = em.FourPotential.zeros(base, c.dt)
    st = em.CoupledState(phi0, A0, c.e)
    q0 = em.total_charge(phi0, c.e)
    rows, drift, herm = [], 0.0, 0.0
    for i in range(c.steps + 1):
        q = em.total_charge(st.phi, c.e)
        hd = st.phi.swap_defect()
        drift, herm = max(drift, abs(q - q0) / abs(q0)), max(herm, hd)
        rows.append([st.t, q, st.A.energy_proxy(), st.A.lorenz, hd])
        if i < c.steps:
            st = em.coupled_step(st)
    run.below("charge drift", drift, "charge_drift")
    run.below("hermiticity defect", herm, "hermiticity")
    run.csv("trace.csv", ["t", "charge", "field_energy", "lorenz_residual", "hermiticity_defect"], rows)
    run.dmf1("A_T.dmf1", st.A.cur)
    run.dmf1("phi_T.dmf1", st.phi.samples, True)
    # e = 0 decouples: matter and field match separate runs
    Aw = np.zeros((4, c.n))
    Aw[1] = np.cos(2 * np.pi * z / c.L)
    Ainit = em.FourPotential.static(base, Aw, c.dt)
    s0 = em.CoupledState(phi0, Ainit, 0.0)
    a_sep = Ainit
    for _ in range(c.steps):
        s0 = em.coupled_step(s0)
        a_sep = em.maxwell_step(a_sep, np.zeros((4, c.n)))
    free = em.evolve_interacting(phi0, np.zeros((4, c.n)), 0.0, c.dt, c.steps)
    run.below("e=0 matter vs free run", np.max(np.abs(s0.phi.samples - free.samples)), "decoupled")
    run.below("e=0 field vs vacuum run", np.max(np.abs(s0.A.cur - a_sep.cur)), "decoupled")
    # static potential: spinor oracle, interacting residuals and the conjugate trajectory
    A = _static_potential(base)
    e = 1.0
    phi = em.evolve_interacting(phi0, A, e, c.dt, c.steps)
    spin = em.spinor_evolve(psi, base, A, e, c.mass, c.dt, c.steps)
    ref = em.reduced_lift(spin, base, c.mass)
    run.below("lift vs spinor oracle", np.max(np.abs(phi.samples - ref.samples)), "lift_oracle")
    r_x, r_y = em.interacting_residuals(phi, A, e)
    run.below("residual x-equation", r_x, "interacting_residual")
    run.below("residual y-equation", r_y, "interacting_residual")
    d_ty = em.side_time_derivative(phi, A, e, "right")
    conj = em.charge_conjugate_reduced(phi)
    d_tx_c = em.charge_conjugate_reduced(phi.with_samples(d_ty)).samples
    run.below("conjugate residual with -e", np.max(np.abs(em.residual_x(conj, d_tx_c, A, -e))),
              "conjugate_residual")
    # x_D-independent rest data stays put when A = 0
    rest = em.reduced_rest_solution("A", c.sigma, c.mass, base)
    moved = em.evolve_interacting(rest, np.zeros((4, c.n)), 0.0, c.dt, c.steps)
    run.below("rest data drift", np.max(np.abs(moved.samples - rest.samples)), "rest_drift")


# -- registry ------------------------------------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    config: type
    runner: Callable


_ENTRIES = [
    Scenario("boost-observables", "boosted rest fields: energy, momentum, localization and "
             "covariant residuals", BoostObservablesConfig, _boost_observables),
    Scenario("charge-conjugation", "rest-kind exchange, current flip, invariants and the lift "
             "identity", ChargeConjugationConfig, _charge_conjugation),
    Scenario("commutator", "generator commutators and lift-evolution commutation",
             CommutatorConfig, _commutator),
    Scenario("coupled-smoke", "z-reduced matter and Maxwell coupling, oracle and residual "
             "checks", CoupledSmokeConfig, _coupled_smoke),
    Scenario("dirac-rest-table", "charge, energy, momentum and spin of the four rest kinds",
             DiracRestConfig, _dirac_rest_table),
    Scenario("free-localized", "non-spreading localized free solution",
             FreeLocalizedConfig, _free_localized),
    Scenario("gauge-invariance", "interacting evolution under a static gauge change",
             GaugeInvarianceConfig, _gauge_invariance),
    Scenario("maxwell-vacuum", "wave stepper dispersion, static source, gauge residual and "
             "current continuity", MaxwellVacuumConfig, _maxwell_vacuum),
    Scenario("momentum-symmetry", "momentum-space observables and transform form",
             MomentumSymmetryConfig, _momentum_symmetry),
    Scenario("oscillator-beats", "stationary pairs of the oscillator and their beat "
             "frequency", OscillatorBeatsConfig, _oscillator_beats),
    Scenario("support-region", "off-slice support of a boosted field inside the t_D cone",
             SupportRegionConfig, _support_region),
]
REGISTRY: Dict[str, Scenario] = {s.name: s for s in sorted(_ENTRIES, key=lambda s: s.name)}


def list_scenarios():
    """(name, description) pairs in lexicographic order."""
    return [(s.name, s.description) for s in REGISTRY.values()]


def parse_config(data) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    name = data.get("scenario")
    if name not in REGISTRY:
        raise ConfigError(f"unknown scenario {name!r}; known: {', '.join(REGISTRY)}")
    try:
        return REGISTRY[name].config.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid config for {name}: {exc}") from None


def load_config(path) -> ScenarioConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(data)


def default_config(name) -> ScenarioConfig:
    return parse_config({"scenario": name})


def run_scenario(cfg: ScenarioConfig, out_dir, tolerance_scale=1.0, dump_fields=None) -> RunReport:
    """Run one scenario, write its artifacts and report under ``out_dir/<name>``.

    Contract violations raised while setting up the run are config errors.
    """
    if not tolerance_scale > 0:
        raise ConfigError("tolerance scale must be positive")
    if dump_fields is not None and dump_fields != cfg.dump_fields:
        cfg = cfg.model_copy(update={"dump_fields": bool(dump_fields)})
    out = Path(out_dir) / cfg.scenario
    out.mkdir(parents=True, exist_ok=True)
    run = _Run(cfg, float(tolerance_scale), out)
    t0 = time.perf_counter()
    try:
        REGISTRY[cfg.scenario].runner(run)
    except ContractViolation as exc:
        raise ConfigError(f"{cfg.scenario}: {exc}") from exc
    report = RunReport(cfg.scenario, all(c.passed for c in run.checks), run.checks,
                       run.artifacts + [REPORT_NAME], time.perf_counter() - t0, run.table)
    (out / REPORT_NAME).write_text(report.to_json())
    return report

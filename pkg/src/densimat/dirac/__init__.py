"""Dirac density-matrix fields: basis, rest solutions, families and observables."""
from .basis import DiracBasis, dirac_basis
from .families import (BoostedFamily, ConjugatedFamily, GaugedFamily, Jet, LiftFamily,
                       XDIndependentFamily, apply_boost, gauge_phase, propagate_tD)
from .fields import (BoostSpec, MatrixField, RotationSpec, apply_rotation, charge_conjugate,
                     lift_spinor_slice, rest_solution, residual_free)
from .observables import DiracObservables, charge_Q, continuity_defect, current_J, observables
from .residuals import residual_time_fd, residual_covariant, swap_defect

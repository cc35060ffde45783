"""Curvature energies of polygonals and their convergence to smooth-curve energies."""
from .curves import (CurveEvaluator, CurveSpec, EnergyReport, arclength, closed_form_energy,
                     el_residual, make_curve, p_energy, total_curvature)
from .estimators import PRotation, check_polygonals
from .inscription import (Inscription, inscribe, inscribe_equilateral_exact,
                          inscribe_equilateral_greedy, inscribe_uniform, refinement_sequence)
from .lab import (ExperimentConfig, ExperimentReport, emit_report, fuzz_langle,
                  run_convergence, run_corner_divergence)
from .oracles import corner_rate, minimize_1d, ngon_kp, pmin1, pmin2_lambda, rhombus_kp
from .polyline import (Polygonal, discrete_frechet, modulus, polyline_length, rotation,
                       turning_angles, validate_polygonal)
from .smoothing import (build_gamma, curvature_profile, generalized_rotation, kstar_rotation,
                        p_rotation)

__version__ = "0.1.0"

__all__ = [
    "Polygonal", "validate_polygonal", "turning_angles", "rotation", "polyline_length",
    "modulus", "discrete_frechet",
    "build_gamma", "curvature_profile", "p_rotation", "generalized_rotation", "kstar_rotation",
    "CurveSpec", "CurveEvaluator", "EnergyReport", "make_curve", "arclength", "p_energy",
    "total_curvature", "closed_form_energy", "el_residual",
    "Inscription", "inscribe", "inscribe_uniform", "inscribe_equilateral_greedy",
    "inscribe_equilateral_exact", "refinement_sequence",
    "pmin1", "pmin2_lambda", "rhombus_kp", "ngon_kp", "corner_rate", "minimize_1d",
    "ExperimentConfig", "ExperimentReport", "run_convergence", "run_corner_divergence",
    "fuzz_langle", "emit_report",
    "PRotation", "check_polygonals",
]

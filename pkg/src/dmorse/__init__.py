"""Ground-state resource measures of the double-Morse oscillator.

Non-Gaussianity, Wigner negativity, beam-splitter entanglement potential and
Fisher information, all functions of A = 2 exp(-alpha x0).
"""
from .errors import ConsistencyError, ConvergenceError, DomainError, EvaluationError
from .model import DMParams, ground_energy, psi0, schrodinger_residual
from .specfun import SpecFunOptions, k_imag, k_order_deriv2_at0, k_real
from .gaussianity import CovarianceMatrix, covariance, eta_ng
from .wigner import NegativityResult, negativity, wigner0, wigner_grid, wigner_norm
from .entangle import EPResult, FockAmplitudes, beam_splitter_5050, entanglement_entropy, ep, fock_expand
from .metrology import FisherResult, cfi_position, crb, fisher, qfi_A, qfi_closed, qfi_numeric
from .fitmodel import FitResult, fit_nc_vs_ng

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError", "ConvergenceError", "DomainError", "EvaluationError",
    "DMParams", "ground_energy", "psi0", "schrodinger_residual",
    "SpecFunOptions", "k_imag", "k_order_deriv2_at0", "k_real",
    "CovarianceMatrix", "covariance", "eta_ng",
    "NegativityResult", "negativity", "wigner0", "wigner_grid", "wigner_norm",
    "EPResult", "FockAmplitudes", "beam_splitter_5050", "entanglement_entropy", "ep", "fock_expand",
    "FisherResult", "cfi_position", "crb", "fisher", "qfi_A", "qfi_closed", "qfi_numeric",
    "FitResult", "fit_nc_vs_ng",
]

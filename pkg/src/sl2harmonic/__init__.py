"""Generalized m-spherical harmonic analysis on SL(2, R).

Spherical functions of K-type m, the Harish-Chandra c-function, the type-m
spherical transform with its inversion and Plancherel formulas, heat and
resolvent kernels in weighted L^1 algebras, and direct group convolution.
"""
from .convolution import (BiTypeProfile, IntertwineResult, convolve, convolve_at, fejer_sum,
                          intertwine, k_expand, k_project, load_bitype, save_bitype)
from .errors import DomainError, PoleError, PreconditionError, ResolutionError
from .group import (CartanCoords, GroupElement, IwasawaCoords, Weight, a, cartan_decompose,
                    haar_density, iwasawa_decompose, k, n, op_norm, random_elements, weight_eval)
from .kernels import (SpectralCutoffs, approx_identity_gap, approx_identity_symbol,
                      generator_reconstruct, heat_kernel, heat_pde_check, multiplier_synthesize,
                      resolvent_kernel)
from .special import (DiscreteSpectrum, Pole, SpectralParam, c_function, c_inv_poles, c_inverse,
                      discrete_spectrum, hyp2f1, in_discrete, log_gamma, plancherel_density,
                      residue_exact, residue_stated)
from .spherical import DecayProfile, decay_profile, phi, phi_big, phi_near_one
from .transform import (KAPPA, PaleyWienerReport, RadialProfile, SphericalSymbol, Strip, Tail,
                        compact_transform_symbol, forward_transform, heat_symbol, invert_axis,
                        invert_contour, l1_weighted_norm, load_profile, load_symbol,
                        paley_wiener_report, plancherel_check, profile_from_function,
                        radial_grid, rational_symbol, resolvent_symbol, save_profile, save_symbol,
                        tabulated_symbol)

__version__ = "0.1.0"

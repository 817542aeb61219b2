"""Boundary currents of holomorphic functions of polynomial growth on products of planar domains."""

from .geometry import ProductDomain, disc, ellipse, parse_domain, unit_disc
from .holofunc import (HoloFunction, constant, growth_order_estimate, inv_pole, inv_sum, monomial,
                       polynomial, tensor, translate, zbar_perturbed)
from .forms import (BoxBump, Cutoff, DomainCutoff, FaceForm, RadialBump, TestForm, dbar, dbar_factor,
                    make_weinstock_form, pullback_to_face, sigma_apply)
from .pairing import (DEFAULT, FaceDistributionProxy, PairingConfig, PairingResult, bc_pair, bc_pair_many,
                      cauchy_reconstruct, ce_pair_ibp, ce_pair_limit, face_pair, face_pair_ce, silov_pair)
from .verify import CHECKS, CheckReport

__version__ = "0.1.0"

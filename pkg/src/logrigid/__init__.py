"""Gross-Stark units of real quadratic fields from p-adic Eisenstein measures."""
from .padic import (PAdic, Unramified, inert_check, iwasawa_log, padic_exp, rational_reconstruct,
                    teichmuller)
from .quadfield import Form, Ideal, NarrowClassGroup, QuadraticField
from .zeta import class_zeta, delta_c, dirichlet_oracle, siegel_partial_zeta
from .measure import EisensteinMeasure, build_auxiliary_measure, build_measure, refine_consistency
from .lfun import LpResult, desmooth, lp_at, lp_derivative0
from .gsunit import GrossStarkRecord, Pipeline, reconstruct_unit, st_integral, unit_min_poly

__version__ = "0.1.0"

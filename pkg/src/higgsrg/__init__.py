"""One-loop RG running of Standard Model couplings and a Higgs-mass prediction
from boundary conditions imposed at a critical scale."""

from .bounds import BoundsReport, ComparisonCoefficients, compute_bounds, lower_bound, upper_bound
from .errors import DomainError, HiggsRGError, InputError, NumericalFailure
from .inputs import ExperimentalValue, InputSet, TopMode, load_config, dump_config
from .predictor import Conventions, ErrorMethod, PredictionReport, mass_from_lambda, predict
from .relations import (
    BoundaryConvention,
    HyperchargeContent,
    critical_scale,
    lambda_boundary,
    solve_commutant,
)
from .rgflow import CouplingState, FlowTrajectory, IntegratorOptions, integrate
from .scenarios import ScenarioResult, Verdict, ccm_ratio, gravity_estimate, gut_scale

__version__ = "0.1.0"

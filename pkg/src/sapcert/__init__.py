"""Certificates for sparse recovery: sparse approximation, null space and
restricted isometry constants, plus recovery solvers and an experiment harness."""
from .certify import (
    CheckReport,
    NspCertificate,
    RipCertificate,
    SapCertificate,
    convert_certificate,
    converse_check,
    lower_frame_check,
    min_right_inverse_l1,
    nsp_constant_l1,
    nsp_from_sap_check,
    rip_constant,
    sap_beta_lower_bound,
    sap_from_nsp,
    sap_from_rip,
    verify_sap_inequality,
)
from .errors import ConvergenceError, InputError
from .recovery import RecoveryProblem, RecoveryResult, recover

__version__ = "0.1.0"

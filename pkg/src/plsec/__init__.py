"""Secrecy outage analysis for random wireless deployments.

A source S, a user U and an attacker A lie in a disk of radius R.  The
attacker either eavesdrops (effective when S is within range r) or jams U.
The package provides the distance and SNR laws of this deployment, exact
and high-SNR secrecy outage probabilities, QoS design solvers and a seeded
Monte Carlo engine that checks all of them.
"""

from .design import (
    DesignResult,
    DesignTarget,
    solve_d_th,
    solve_pj_th,
    solve_ps_th,
    threshold_d_o,
    threshold_d_sat,
    threshold_r_sat,
)
from .mc import McConfig, McReport, mc_fading_dth, mc_pdf, mc_sop
from .model import (
    AttackMode,
    DerivedConstants,
    ParameterError,
    SystemParams,
    Topology,
    derive,
    reference_defaults,
)
from .sop import SopResult, sop_asym_eav, sop_asym_jam, sop_exact_eav, sop_exact_jam, sop_ineffective

__version__ = "0.1.0"

__all__ = [
    "AttackMode",
    "DerivedConstants",
    "DesignResult",
    "DesignTarget",
    "McConfig",
    "McReport",
    "ParameterError",
    "SopResult",
    "SystemParams",
    "Topology",
    "derive",
    "mc_fading_dth",
    "mc_pdf",
    "mc_sop",
    "reference_defaults",
    "solve_d_th",
    "solve_pj_th",
    "solve_ps_th",
    "sop_asym_eav",
    "sop_asym_jam",
    "sop_exact_eav",
    "sop_exact_jam",
    "sop_ineffective",
    "threshold_d_o",
    "threshold_d_sat",
    "threshold_r_sat",
]

"""Evaluation protocol: horizon MSE, SSIM, alignment audit, interval bounds."""

from .alignment import (
    ALIGNED_EQUIVARIANT,
    ALIGNED_INVARIANT,
    CLASSES,
    MISALIGNED_EQUIVARIANT,
    MISALIGNED_INVARIANT,
    AlignmentVerdict,
    AuditPair,
    alignment_audit,
    classify,
)
from .horizon import HorizonReport, aggregate_reports, horizon_state_mse, window_errors
from .ibp import (
    BoundBox,
    interval_bound_propagate,
    mc_containment,
    stages_of,
    verification_scaling_report,
)
from .plots import emit_plots
from .reports import (
    REFERENCE_TABLE,
    TableRow,
    out_of_mask_energy,
    render_table,
    table1_report,
)
from .ssim import ssim

__all__ = [
    "ALIGNED_EQUIVARIANT",
    "ALIGNED_INVARIANT",
    "CLASSES",
    "MISALIGNED_EQUIVARIANT",
    "MISALIGNED_INVARIANT",
    "AlignmentVerdict",
    "AuditPair",
    "alignment_audit",
    "classify",
    "HorizonReport",
    "aggregate_reports",
    "horizon_state_mse",
    "window_errors",
    "BoundBox",
    "interval_bound_propagate",
    "mc_containment",
    "stages_of",
    "verification_scaling_report",
    "emit_plots",
    "REFERENCE_TABLE",
    "TableRow",
    "out_of_mask_energy",
    "render_table",
    "table1_report",
    "ssim",
]

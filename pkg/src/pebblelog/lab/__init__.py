"""Class oracles, closure checks, the example gallery and experiments."""

from .closure import PreconditionError, SimPartition, hom_closure_check, joint_hom_check, sim_partition
from .gallery import gallery, gallery_programs
from .oracle import ClassOracle

__all__ = [
    "ClassOracle",
    "PreconditionError",
    "SimPartition",
    "gallery",
    "gallery_programs",
    "hom_closure_check",
    "joint_hom_check",
    "sim_partition",
]

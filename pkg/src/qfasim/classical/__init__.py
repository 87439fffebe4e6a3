"""Multi-head probabilistic machines: exact propagation, subroutines, determinant generators."""

from .gap import (CombinedMachine, GapCheck, GapPair, assemble_gap_pair, build_det_generator, combined_gap,
                  cutpoint_combine)
from .generator import DET, MINORS, SCALED, GeneratorMachine, evaluate, step_bound
from .propagate import DistributionState, PfaRun, pfa_run_exact, run_kernel, tape_of
from .subroutines import (build_comparator, build_copy, build_counter, build_equiprob, build_offset, build_zero,
                          counter_certificate, counter_length, equiprob_kernel, generation_probability)

__all__ = [
    "CombinedMachine", "DET", "DistributionState", "GapCheck", "GapPair", "GeneratorMachine", "MINORS",
    "PfaRun", "SCALED", "assemble_gap_pair", "build_comparator", "build_copy", "build_counter",
    "build_det_generator", "build_equiprob", "build_offset", "build_zero", "combined_gap", "counter_certificate",
    "counter_length", "cutpoint_combine", "equiprob_kernel", "evaluate", "generation_probability",
    "pfa_run_exact", "run_kernel", "step_bound", "tape_of",
]

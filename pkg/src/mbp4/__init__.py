"""MBP4 decoders for stabilizer codes, with code constructions, energy diagnostics and a Monte-Carlo harness."""

__version__ = "0.1.0"

from .channel import ChannelPrior, depolarizing_prior, sample_error
from .codes import (
    CheckMatrix,
    Code,
    CodeFormatError,
    CodeValidationError,
    code_from_spec,
    gen_bicycle,
    gen_five_qubit,
    gen_surface,
    gen_toric,
    load_check_matrix,
    save_check_matrix,
)
from .decoder import DecodeResult, DecoderConfig, decode, decode_adaptive, decode_linear, run_decoder
from .pauli import Pauli1, PauliString
from .verify import Outcome, classify, in_stabilizer_group

__all__ = [
    "ChannelPrior",
    "CheckMatrix",
    "Code",
    "CodeFormatError",
    "CodeValidationError",
    "DecodeResult",
    "DecoderConfig",
    "Outcome",
    "Pauli1",
    "PauliString",
    "classify",
    "code_from_spec",
    "decode",
    "decode_adaptive",
    "decode_linear",
    "depolarizing_prior",
    "gen_bicycle",
    "gen_five_qubit",
    "gen_surface",
    "gen_toric",
    "in_stabilizer_group",
    "load_check_matrix",
    "run_decoder",
    "sample_error",
    "save_check_matrix",
]

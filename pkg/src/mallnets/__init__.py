"""Incremental construction and checking of MALL bipolar proof nets."""
from .formulas import parse_formula, to_text
from .bipolarizer import make_scheme, universal_program, inference_schemes
from .proofnet import ProofStructure, is_proof_net, parse_net, net_to_text

__all__ = [
    "parse_formula", "to_text", "make_scheme", "universal_program", "inference_schemes",
    "ProofStructure", "is_proof_net", "parse_net", "net_to_text",
]
__version__ = "0.1.0"

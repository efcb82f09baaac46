"""Prehistoric relations in G3s and G3lp proofs: checking, search, transforms and analysis."""

from .families import classify_and_annotate, find_cycle, prehistoric_graph
from .lp_analysis import classify_selfref, extract_selfref_chain, inputs_of
from .proofs import check_proof, load_proof, parse_sequent, proof_from_json, proof_to_json
from .prover import decide_g3s, find_cycle_free_proof, search_g3lp
from .syntax import parse, render
from .transforms import eliminate_all, eliminate_boxcut, eliminate_cut, project_proof

__version__ = "0.1.0"

__all__ = [
    "check_proof", "classify_and_annotate", "classify_selfref", "decide_g3s", "eliminate_all", "eliminate_boxcut",
    "eliminate_cut", "extract_selfref_chain", "find_cycle", "find_cycle_free_proof", "inputs_of", "load_proof",
    "parse", "parse_sequent", "prehistoric_graph", "project_proof", "proof_from_json", "proof_to_json", "render",
    "search_g3lp",
]

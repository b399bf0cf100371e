"""Lexicographic safety/LTL/return reinforcement learning on labeled MDPs.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.
"""

from ._lexirl import (  # noqa: F401
    Environment,
    LabeledMdp,
    Ldba,
    LtlFormula,
    ProductMdp,
    ProductPolicy,
    SafetyAutomaton,
    TrainOutput,
    build_product,
    evaluate,
    exact_policy_value,
    fixture_example1,
    ldba_from_safety,
    load_environment,
    max_combined_prob,
    oracle,
    parse_environment,
    parse_hoa,
    parse_ltl,
    safety_to_automaton,
    train,
    __version__,
)

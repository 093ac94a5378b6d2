from .builders import (
    STRICT,
    TRY_ALL,
    flatten,
    full_reduction,
    initial_chain,
    reduce_chain,
    reduction_steps,
    thm22_chain,
    thm43_chain,
    thm44_chain,
)
from .types import ChainContext, LabeledStep, NLNChain, WitnessChain
from .validate import ChainReport, validate_chain, validate_nln

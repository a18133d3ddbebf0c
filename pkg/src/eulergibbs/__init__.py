"""Exact sampling of uniform Eulerian paths and count-conditioned Markov chains.

Finite digraphs get BEST counting, enumeration and uniform sampling built on
Wilson's algorithm; lazily generated sourced Eulerian digraphs get Wilson's
algorithm rooted at infinity and a sampler for the first steps of the
Eulerian path to infinity.
"""

from .arborescence import (
    InArboretum,
    OracleArboretum,
    check_one_ended,
    count_in_arborescences,
    enumerate_in_arborescences,
    past,
    validate_in_arborescence,
)
from .digraph import (
    BOUNDARY,
    Digraph,
    EulerianKind,
    LazyDigraph,
    build_digraph,
    classify_eulerian,
    classify_sourced_eulerian_prefix,
    communicating_classes,
    contract_boundary,
    ladder_family,
)
from .errors import (
    EulerGibbsError,
    GraphError,
    DuplicateEdgeId,
    EmptyGraph,
    OracleInconsistency,
    ExhaustionUnavailable,
    GraphFormatError,
    NotEulerianInput,
    RootUnreachable,
    CapExceeded,
    StackExhausted,
    EmptySequence,
    NoEulerianEndpoint,
    DisconnectedCounts,
    InsufficientSamples,
)
from .estimators import (
    ArborescenceSampler,
    CountConditionedSampler,
    EulerianPathSampler,
    GibbsPrefixSampler,
    TransitionFrequencies,
)
from .euler import (
    count_eulerian_paths,
    decode_path,
    encode_path,
    enumerate_eulerian_paths,
    is_eulerian_stack,
    prefix_law,
    require_sourced_eulerian,
    sample_eulerian_batch,
    sample_eulerian_finite,
    sample_gibbs_prefix,
    sample_gibbs_prefix_batch,
)
from .graphio import read_counts, read_graph, read_sequence
from .pex import (
    TransitionCounts,
    condition_on_counts,
    condition_on_counts_batch,
    digraph_from_counts,
    pex_class_members,
    pex_equivalent,
    test_gibbs_property,
    test_partial_exchangeability,
    transition_counts,
    transition_frequencies,
)
from .walks import (
    FixedLength,
    HitSet,
    LeaveSet,
    Path,
    StackConfiguration,
    estimate_return_probability,
    follow_stacks,
    last_exit_arboretum,
    loop_erase,
    random_walk,
    stacks_of_path,
)
from .wilson import (
    decode_arborescence,
    encode_arborescence,
    horizon_doubling,
    sample_ua_exhaustion,
    sample_ua_exhaustion_batch,
    wilson_coupled,
    wilson_finite,
    wilson_finite_batch,
    wilson_infinity,
    wilson_infinity_batch,
)

__version__ = "0.1.0"

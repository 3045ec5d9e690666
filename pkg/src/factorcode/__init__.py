"""Combinatorial invariants of factor codes between shifts of finite type:
degrees, class degrees, transition blocks and classes over periodic points,
and entropy bounds relative to Markov measures on the image."""

from .core import (
    Block,
    BlockRecoding,
    EmptyShiftError,
    FactorCodeError,
    FactorTriple,
    MeasureParseError,
    PeriodicPoint,
    PreconditionError,
    Sft,
    TripleParseError,
    canonical_orbit_word,
    enumerate_blocks,
    essentialize,
    essentialize_triple,
    higher_block,
    is_irreducible,
    least_rotation,
    make_sft,
    parse_triple,
    primitive_root,
    triple_to_text,
)
from .codes import (
    MagicWitness,
    PairGraph,
    PreimageProfile,
    SoficImage,
    apply_code,
    backward_sets,
    d_star,
    degree,
    exact_backward_sweep,
    exact_forward_sweep,
    forward_sets,
    image_blocks,
    image_irreducible,
    is_finite_to_one,
    pair_graph,
    periodic_image_points,
    preimage_blocks,
    preimage_profile,
    preimage_profiles,
    sofic_image,
)
from .classdegree import (
    DepthSearchResult,
    TransitionBlock,
    class_count_for_measure,
    find_minimal_transition_block,
    is_transition_block,
    minimal_depth_at,
    routable_symbols,
    transition_block,
)
from .fiber import (
    ExtractionResult,
    FiberGraph,
    SynchronizingExtension,
    TransitionClass,
    TransitionClassReport,
    build_fiber_graph,
    class_of_preimage,
    enumerate_periodic_preimages,
    extract_transition_block,
    synchronizing_extension,
    transition_classes,
    window_blocks,
)
from . import fixtures
from .measures import (
    MarkovMeasure,
    RelativeEntropyBound,
    entropy_rate,
    image_word_measure,
    markov_measure,
    orbit_measure,
    parry_measure,
    parse_measure,
    pqs_bound,
    relative_entropy_upper_bound,
    spectral_entropy,
    uniform_conditional_diagnostic,
)

__version__ = "0.1.0"

__all__ = [
    "Block",
    "BlockRecoding",
    "DepthSearchResult",
    "EmptyShiftError",
    "ExtractionResult",
    "FactorCodeError",
    "FactorTriple",
    "FiberGraph",
    "MagicWitness",
    "MarkovMeasure",
    "MeasureParseError",
    "PairGraph",
    "PeriodicPoint",
    "PreconditionError",
    "PreimageProfile",
    "RelativeEntropyBound",
    "Sft",
    "SoficImage",
    "SynchronizingExtension",
    "TransitionBlock",
    "TransitionClass",
    "TransitionClassReport",
    "TripleParseError",
    "apply_code",
    "backward_sets",
    "build_fiber_graph",
    "canonical_orbit_word",
    "class_count_for_measure",
    "class_of_preimage",
    "d_star",
    "degree",
    "entropy_rate",
    "enumerate_blocks",
    "enumerate_periodic_preimages",
    "essentialize",
    "essentialize_triple",
    "exact_backward_sweep",
    "exact_forward_sweep",
    "extract_transition_block",
    "find_minimal_transition_block",
    "fixtures",
    "forward_sets",
    "higher_block",
    "image_blocks",
    "image_irreducible",
    "image_word_measure",
    "is_finite_to_one",
    "is_irreducible",
    "is_transition_block",
    "least_rotation",
    "make_sft",
    "markov_measure",
    "minimal_depth_at",
    "orbit_measure",
    "pair_graph",
    "parry_measure",
    "parse_measure",
    "parse_triple",
    "periodic_image_points",
    "pqs_bound",
    "preimage_blocks",
    "preimage_profile",
    "preimage_profiles",
    "primitive_root",
    "relative_entropy_upper_bound",
    "routable_symbols",
    "sofic_image",
    "spectral_entropy",
    "synchronizing_extension",
    "transition_block",
    "transition_classes",
    "triple_to_text",
    "window_blocks",
    "uniform_conditional_diagnostic",
]

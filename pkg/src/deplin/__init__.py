"""deplin: random dependency-tree linearization experiments.

Generates the four random tree families (unrestricted, continuous,
chunked, chunked-continuous), measures mean dependency distance and
arc crossings, sweeps the chunk-size and sentence-length grids, and
computes the same statistics over CoNLL treebanks for comparison.
"""

from .model import (
    ChunkedTree,
    ChunkPartition,
    DepTree,
    MetricsRecord,
    RngStream,
    SweepRow,
    derive_seed,
    format_head_line,
    parse_head_line,
    validate_tree,
)
from .generate import (
    ChunkConfig,
    count_projective,
    gen_chunked_projective_tree,
    gen_chunked_tree,
    gen_family,
    gen_projective_tree,
    gen_random_tree,
    segment_chunks,
)
from .metrics import (
    aggregate,
    count_type1,
    count_type2,
    is_continuous,
    mdd_chunked,
    mdd_plain,
    measure,
    pearson,
)

__version__ = "0.1.0"

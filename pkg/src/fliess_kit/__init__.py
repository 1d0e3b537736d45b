"""fliess-kit: truncated noncommutative power series for system interconnection.

Core objects: words over {x0..xm}, sparse truncated series, the shuffle /
composition / mixed-composition / pre-Lie products, the shuffle unit group
and the output-feedback group, growth-bound verification experiments,
numerical Chen-Fliess evaluation, and the group evolution equations.
"""

from .errors import (
    ComponentMismatch,
    DuplicateWordError,
    FliessKitError,
    GridTooCoarse,
    LoopDiverged,
    NonConvergence,
    OracleMismatch,
    OrderCapExceeded,
    PreconditionUnsatisfiable,
    ProperSeriesError,
    QueryBeyondTruncation,
    SeriesSyntaxError,
    TriangularityViolation,
    TruncationMismatch,
    UnsupportedArity,
)
from .words import (
    EMPTY_WORD,
    degree,
    enumerate_words,
    format_word,
    parse_word,
    shuffle_words,
    words_up_to,
)
from .series import (
    GrowthEstimate,
    Series,
    add,
    coefficient,
    linf_norm,
    max_abs_coefficient,
    negate,
    parse_series,
    random_ball_series,
    random_rational_series,
    scale,
    serialize_series,
    subtract,
    worst_case_series,
)
from .products import compose, lie_bracket, mixed_compose, pre_lie, shuffle, shuffle_power
from .groups import (
    UnitalSeries,
    feedback,
    group_inverse,
    group_product,
    inverse_x0_profile,
    shuffle_inverse,
    shuffle_quotient,
)

__version__ = "0.1.0"

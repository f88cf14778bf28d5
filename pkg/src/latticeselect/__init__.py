"""Optimal object-selection predicate synthesis over product lattices.

Labeled objects (positive/negative) become atoms of a per-class product of
set and interval lattices; search finds the fewest, most general lattice
maximals that cover every positive and no negative, and the result is
emitted as an executable selection program.
"""

from ._backend import backend_name, warmup
from .dataset import (
    AttributeSchema,
    ClassSchema,
    Dataset,
    EditRequest,
    LabelSet,
    ObjectRecord,
    Region,
    Specification,
    build_specification,
    load_dataset,
    load_labels,
    partition_by_class,
    resolve_clicks,
    serialize_dataset,
)
from .dsl import (
    Action,
    AllObjects,
    And,
    ClassIs,
    Cover,
    EditPlan,
    FalsePred,
    Filter,
    Inpaint,
    Interval,
    IntervalUnion,
    Membership,
    Not,
    Or,
    Predicate,
    Program,
    ProgramMetrics,
    Recolor,
    Remove,
    SymbolSet,
    TruePred,
    ast_metrics,
    build_program,
    check_correctness,
    element_to_predicate,
    eval_predicate,
    parse_action,
    parse_predicate,
    parse_program,
    print_program,
    run_program,
)
from .errors import (
    ContextTooLargeError,
    CoverInfeasibleError,
    DatasetError,
    LatticeDomainError,
    ProgramParseError,
    SpecificationError,
    SynthesisTimeout,
    UnknownNameError,
    UserError,
)
from .lattice import (
    LatticeContext,
    LatticeElement,
    atom_of,
    bottom,
    build_context,
    element_diff,
    format_element,
    join,
    lattice_size,
    leq,
    materialize,
    meet,
    successors,
    top,
)
from .cover import CoverInstance, min_cover
from .reps import Representative, find_representatives
from .search import Deadline, SearchProblem, concretize_representative, find_maximals, is_maximal
from .synth import (
    ClassStats,
    OracleResult,
    SynthesisMode,
    SynthesisReport,
    oracle_synthesize,
    synthesize,
    synthesize_by_class,
    synthesize_predicate,
)

__version__ = "0.1.0"

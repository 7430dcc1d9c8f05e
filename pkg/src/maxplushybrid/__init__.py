"""Max-plus automata, switching max-plus linear systems and max-algebraic
hybrid automata, with constructive translations and equivalence checks."""

from .tropical import (
    EPS,
    TOP,
    UNIT,
    TropicalMatrix,
    Weight,
    oplus,
    oplus_dual,
    otimes,
    otimes_dual,
)
from .expressions import (
    ConjunctiveForm,
    Const,
    InputVar,
    MatrixForm,
    Max,
    MaxPlusProjection,
    Min,
    MmpsExpression,
    Plus,
    Scale,
    TransitionGraph,
    Var,
    eval_expr,
    is_max_min_plus,
    to_conjunctive,
    to_matrix_form,
    transition_graph_f,
    transition_graph_h,
)
from .finite import FiniteAutomaton, Word
from .mpa import (
    MaxPlusAutomaton,
    accepts,
    eval_output,
    eval_state,
    language_upto,
    to_finite_abstraction,
)
from .smpl import (
    ControllerHook,
    MatrixMode,
    ExpressionMode,
    NoSuccessorMode,
    SmplDims,
    SmplSystem,
    SmplTrace,
    StepInput,
    SwitchingKind,
    SwitchingRule,
    classify_switching,
    from_mpa,
    simulate,
    static_feedback,
    step,
)
from .hybrid import (
    HybridAutomaton,
    HybridState,
    finite_abstraction,
    from_smpl_closed,
    from_smpl_open,
    hybrid_step,
    mpa_chain_abstraction,
    run,
)
from .equivalence import (
    BehaviourTrace,
    SimulationWitness,
    behavioural_inclusion_upto,
    bisimulation,
    greatest_simulation,
    language_equal_exact,
    language_equal_upto,
)
from .serialization import ModelDocument, parse_model, serialize_model

__version__ = "0.1.0"

"""Analysis of state-based transition systems over a grammar of shape
functors: well-foundedness, finite well-founded subsystem extraction,
structural recursion, term realization, and colimits of finite diagrams,
with register-style (nominal) and convex-branching back-ends."""

from .containers import (
    Const,
    ConstVal,
    Container,
    Exp,
    FinPow,
    FunOf,
    HStructure,
    Identity,
    InL,
    InR,
    Pair,
    PairNeq,
    Product,
    SetOf,
    Star,
    StateRef,
    Sum,
    TupleOf,
    fun_of,
    hmap,
    interpret,
    make_pair,
    set_of,
    support,
    validate,
)
from .coalgebras import (
    Algebra,
    BudgetExhausted,
    FiniteCoalgebra,
    LazyCoalgebra,
    canonical_graph,
    coproduct_extension,
    count_algebra,
    induction_algebra,
    is_cartesian_subcoalgebra,
    is_subcoalgebra,
    least_subcoalgebra,
    unfold_algebra,
    verify_coalgebra_morphism,
)
from .wellfounded import (
    KoenigFamily,
    WfReport,
    extend_recursion_solution,
    integer_ladder,
    integer_ladder_recursion,
    integer_ladder_window,
    is_well_founded,
    koenig_extract,
    koenig_family,
    solve_recursion,
    verify_solution,
    well_founded_part,
)
from .initial_algebra import (
    DiagramSpec,
    Signature,
    Term,
    diagram_colimit,
    enumerate_terms,
    parse_term,
    realize_hstructure,
    signature_container,
    term_algebra,
    term_realization_report,
    unfold_to_term,
)
from .nominal import (
    NLTSSpec,
    NState,
    Rule,
    Template,
    nominal_is_well_founded,
    nominal_koenig_extract,
    nominal_step,
    orbit_graph,
)
from .convex import (
    ConvexSpec,
    CPoint,
    CPolytope,
    convex_path_witness,
    convex_wf_fixpoint,
    mix,
    mix_sets,
    successors,
)

__version__ = "0.1.0"

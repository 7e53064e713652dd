"""Workbench for learning conjunctive queries from labeled examples and
membership queries, with the hard-instance families that separate fitting
from PAC learning."""

from .model import (
    CQ,
    UCQ,
    Atom,
    Example,
    Fact,
    Instance,
    Label,
    LabeledExampleSet,
    Schema,
    atom_count,
    bit_size,
    canonical_cq,
    canonical_instance,
    example_size,
    is_path_cq,
)
from .homs import (
    Homomorphism,
    all_answers,
    connected_components,
    evaluate,
    evaluate_tree,
    evaluate_ucq,
    find_homomorphism,
    verify_homomorphism,
)
from .trees import LevelAssignment, TreeReduction, check_tree_shaped, quotient_to_tree
from .products import ILL_FORMED, product_examples, product_instances
from .fitting import (
    FittingReport,
    fitting_exists,
    smallest_fitting_enumeration,
    verify_fit,
)
from .learn import (
    LearnerOutput,
    MembershipOracle,
    TargetOracle,
    learn_cq,
    learn_ucq,
    minimize_critical,
)
from .pac import (
    Distribution,
    PacParams,
    TrialReport,
    draw_sample,
    estimate_error,
    exact_error,
    fitting_via_pac,
    run_pac_experiment,
    sample_size,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

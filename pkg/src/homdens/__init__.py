"""Homomorphism densities of bipartite multigraphs in step kernels.

The package computes t(F, W) exactly (rationals) or in floats, screens a
registry of signed-kernel density inequalities by seeded sampling, and
certifies that kernels close to the constant-1 kernel satisfy
t(F, W) >= 1 through an exact spanning-subgraph expansion.
"""

__version__ = "0.1.0"

from .bigraph import (
    ACYCLIC,
    Bigraph,
    BigraphError,
    FamilySpec,
    PlainGraph,
    bigraph,
    bigraph_from_json,
    bigraph_to_json,
    bipartite_from_edges,
    canonical_form,
    complete_bipartite,
    complete_graph,
    construct_family,
    cycle_graph,
    disjoint_union,
    empty_graph,
    glue_product,
    is_isomorphic,
    path_graph,
    plain_graph,
    plain_graph_from_json,
    plain_graph_to_json,
    spanning_terms,
    square,
    star_product,
    structure_queries,
    subdivide,
    transpose,
    unlabel,
)
from .density import (
    ContractionPlan,
    DensityError,
    EdgeFactorModel,
    ExpansionTerm,
    density,
    density_naive,
    edge_factor_model,
    edge_factor_value,
    expansion,
    expansion_total,
    factor_l2_norm,
    hom_count,
    plan_contraction,
    rooted_density,
)
from .harness import (
    DensityExpr,
    HarnessError,
    InequalityEntry,
    KernelSampler,
    builtin_registry,
    check_entry,
    cube_graph,
    dfactor,
    dprod,
    dsum,
    evaluate,
    get_entry,
    pendant_cycle,
    rank_one_sign_kernel,
    run_registry,
    spider_graph,
    theta_graph,
    two_cycles_shared_node,
)
from .kernels import (
    CutNormResult,
    KernelError,
    Partition,
    StepKernel,
    affine,
    add_kernels,
    common_refinement,
    compose,
    constant_kernel,
    cut_norm,
    identity_partition,
    in_w1,
    kernel_bounds,
    kernel_from_graph,
    kernel_from_json,
    kernel_to_json,
    l2_norm,
    linf_norm,
    norm,
    sample_kernel,
    schatten_norm,
    single_class_partition,
    square_grid,
    step_average,
    step_kernel,
    sub_kernels,
    transpose_kernel,
)
from .local_sidorenko import (
    Certificate,
    VerifierError,
    WeakRegularityResult,
    certify_graph,
    verify_c4,
    verify_close,
    verify_infty,
    verify_reg,
    verify_variant,
    weak_regularity_partition,
)
from .structure import (
    HangingPathSystem,
    RootedTree,
    StructureError,
    TermClass,
    classify_term,
    double_tree,
    double_tree_hps,
    find_hanging_path_system,
    make_hps,
    rooted_tree,
    tree_stats,
    validate_hps,
)

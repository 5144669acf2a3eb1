from .constants import Side, BranchName, Dominance, GeometryConstants
from .centerline import Centerline, CoronaryTree, Bifurcation, BifurcationGeometry, \
    arc_length_parameterize, kernel_tangent, bifurcation_geometry, orientation_vector, \
    cosine_similarity, pair_bifurcation, find_bifurcations, load_tree, save_tree, \
    tree_from_dict, tree_to_dict
from .classification import Classification, LcaSplit, BranchSelection, classify_rca, \
    split_lca_candidates, classify_lad, classify_lcx, classify_lca, classify_tree, \
    apply_overrides, load_overrides, save_classification

"""Dense hypercubic tensor algebra.

Products and contractions, inversion through the normal unfolding,
(anti)symmetrizers with explicit normalization, wedge/vee tensors,
permutation tensors, H-eigenpairs and CP-rank evidence.
"""

from htensor.core import (
    DenseTensor,
    NormalizationMode,
    add,
    delinearize,
    frobenius_norm,
    identity_tensor,
    inner,
    linearize,
    max_abs_diff,
    scale,
    zeros,
)
from htensor.cp import CPModel, cp_als, matricization_rank_bound, rank_estimate
from htensor.errors import (
    EntryCountError,
    FormatError,
    HTensorError,
    MalformedHeaderError,
    NonFiniteEntryError,
    NotAntisymmetricError,
    ShapeMismatchError,
    SingularError,
    SizeLimitError,
)
from htensor.inversion import NSMatrix, invert, normal_fold, normal_unfold, ns_det
from htensor.io import decode_bin, decode_text, encode_bin, encode_text, read_tensor, write_tensor
from htensor.permutation import Permutation
from htensor.products import (
    ContractionSpec,
    bowtie,
    contract_k,
    mode_product,
    outer_chain,
    outer_product,
    s_product,
    t_product,
)
from htensor.spectra import (
    EigenPair,
    ProbeReport,
    apply_permutation_tensor,
    commutation_tensor,
    definiteness_probe,
    eigen_residual,
    permutation_tensor,
    permuted_family_rank,
    poly_eval,
    sshopm,
    tvp,
)
from htensor.symmetry import (
    NotDecomposable,
    SeparableWitness,
    antisym_matrix_separability,
    fixed_subspace_dim,
    gram_inner_identities,
    is_antisymmetric,
    is_sign_symmetric,
    is_symmetric,
    permanent,
    permute_modes,
    sas_decompose,
    standard_sas,
    symmetrize,
    vee,
    wedge,
    wedge_norm,
)

__version__ = "0.1.0"

__all__ = [
    "CPModel",
    "ContractionSpec",
    "DenseTensor",
    "EigenPair",
    "EntryCountError",
    "FormatError",
    "HTensorError",
    "MalformedHeaderError",
    "NSMatrix",
    "NonFiniteEntryError",
    "NormalizationMode",
    "NotAntisymmetricError",
    "NotDecomposable",
    "Permutation",
    "ProbeReport",
    "SeparableWitness",
    "ShapeMismatchError",
    "SingularError",
    "SizeLimitError",
    "add",
    "antisym_matrix_separability",
    "apply_permutation_tensor",
    "bowtie",
    "commutation_tensor",
    "contract_k",
    "cp_als",
    "decode_bin",
    "decode_text",
    "definiteness_probe",
    "delinearize",
    "eigen_residual",
    "encode_bin",
    "encode_text",
    "fixed_subspace_dim",
    "frobenius_norm",
    "gram_inner_identities",
    "identity_tensor",
    "inner",
    "invert",
    "is_antisymmetric",
    "is_sign_symmetric",
    "is_symmetric",
    "linearize",
    "matricization_rank_bound",
    "max_abs_diff",
    "mode_product",
    "normal_fold",
    "normal_unfold",
    "ns_det",
    "outer_chain",
    "outer_product",
    "permanent",
    "permutation_tensor",
    "permute_modes",
    "permuted_family_rank",
    "poly_eval",
    "rank_estimate",
    "read_tensor",
    "s_product",
    "sas_decompose",
    "scale",
    "sshopm",
    "standard_sas",
    "symmetrize",
    "t_product",
    "tvp",
    "vee",
    "wedge",
    "wedge_norm",
    "write_tensor",
    "zeros",
]

"""Calibrationless joint transmit/receive low-rank k-space completion.

Reconstructs undersampled multi-channel (receive x transmit) k-space
tensors by rank-constrained completion of block-Hankel tensor unfoldings,
with a synthetic-data harness for error-vs-acceleration experiments.
"""

from .hankel import (
    hankel_adjoint,
    hankel_pinv,
    hankel_shape,
    hankel_transform,
    multiplicity,
    refold_rx,
    refold_tx,
    refold_vc,
    swap_rx_tx,
    unfold_rx,
    unfold_tx,
    unfold_vc,
)
from .kten import read_kten, write_kten
from .metrics import (
    RelativeTxMaps,
    SingularSpectrum,
    map_rmse,
    random_spectrum,
    relative_tx_maps,
    rmse,
    singular_spectrum,
)
from .phantom import (
    SensitivitySet,
    crop_kspace,
    dft2_centered,
    generate_phantom,
    generate_sensitivities,
    idft2_centered,
    simulate_kspace,
)
from .sampling import (
    NoiseModel,
    NoiseSpec,
    SamplingMask,
    add_noise,
    apply_mask,
    estimate_sigma,
    mask_variants_per_tx,
    poisson_disc_mask,
)
from .solver import (
    ReconReport,
    SolverConfig,
    SolverDivergenceError,
    admm_reconstruct,
    chi_square_stat,
    svt,
    z_update,
)
from .experiment import ExperimentConfig, ResultRow, run_experiment

__version__ = "0.1.0"

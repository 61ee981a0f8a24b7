"""Planted ranked subgraphs: sampling, detection, recovery and small exact oracles."""

__version__ = "0.1.0"

from prs.model import (  # noqa: E402
    DirectedAdjacency,
    ModelParams,
    PlantedInstance,
    load_graph,
    load_instance,
    sample_null,
    sample_planted,
    sample_planted_given,
    save_graph,
    save_instance,
)
from prs.metrics import RankingEstimate, alignment, hamming, inversions, kendall_tau  # noqa: E402
from prs.spectral import ConvergenceError, EigenPair, analytic_A_eigs, sigma_max, top_eigenpair  # noqa: E402
from prs.detect import (  # noqa: E402
    DetectionReport,
    degree2_statistic,
    degree2_threshold,
    exhaustive_detect_statistic,
    run_detection,
    spectral_statistic,
)
from prs.recover import (  # noqa: E402
    max_acyclic_ordering_dp,
    mle_recover,
    ordered_clique_recover,
    ordered_clique_recover_enhanced,
    ranking_by_wins,
    spectral_recover,
)

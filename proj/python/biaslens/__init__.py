import json

from ._core import (
    AnalysisError,
    IngestError,
    __version__,
    chi_square_2x2,
    gamma_p,
    gamma_q,
    in_kcore,
    kolmogorov_sf,
    ks_two_sample,
    porter_stem,
    solve_mixing,
    spearman,
    synth,
    tokenize,
    wilcoxon_rank_sum,
)
from ._core import analyze_json


def analyze(bundle, **kwargs):
    """Run the full pipeline on a bundle directory and return the report as a dict."""
    return json.loads(analyze_json(str(bundle), **kwargs))

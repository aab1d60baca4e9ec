"""Longest common weakly increasing subsequences of two random words: exact lengths,
the deterministic limit analysis, and Monte Carlo sampling of the limit laws."""

from .analysis import (CASE_A, CASE_A_SYM, CASE_B1, CASE_B2, AnalysisReport, PolytopeGrid,
                       blocks_analysis, classify_case, compute_emax, compute_I,
                       emax_grid_oracle, grid_J, grid_K, pair_score, truncate_alphabet,
                       two_letter_rule)
from .config import TOL, Tolerances
from .core import (Instance, Pmf, RngConfig, Word, format_word, instance_from_json,
                   load_instance, parse_word, sample_word, uniform_instance, validate_pmf)
from .errors import *  # noqa: F401,F403
from .exact import (BlockOrder, composition_value, lc_b_blocks, lc_blocks_length,
                    lci_bruteforce, lci_length, lcs_length)
from .harness import (EmpiricalZSet, KsResult, converge, ks_critical, ks_two_sample, replay,
                      simulate_zn)
from .lp import LpProblem, LpResult, lp_solve
from .mfunc import Perturbation, m_closed, m_lp_oracle
from .sampler import (BrownianGrid, LimitSampleSet, eval_za, eval_zb, read_samples_csv,
                      sample_brownian, sample_limit, sample_limit_blocks, write_samples_csv)

__version__ = "0.1.0"

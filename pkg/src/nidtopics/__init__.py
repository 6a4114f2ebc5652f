"""Spectral moment-matching toolkit for simplex-prior (normalized
infinitely divisible) topic models."""

from .corpus import Corpus, corpus_from_docs
from .decompose import (
    DecompositionResult, LearnConfig, PowerMethodConfig, RankDeficiencyError,
    StageError, TopicModel, decompose, learn, recover, whiten,
)
from .evaluate import perplexity, pmi, top_words
from .families import (
    IDFamily, custom_family, gamma_family, invgauss_family, parse_family,
    psi, psi_deriv, stable_family,
)
from .mcmc import ChainResult, ChainState, log_posterior, posterior_mean_h, run_chain
from .moments import MomentSet, accumulate, build_m2, build_whitened_m3, exact_moment_set
from .nid import (
    NIDModel, bell_complete, centered_moment_matrix, centered_moment_tensor,
    correlation_profile, density, ig_mean_correlation_profile, moment,
    moment_matrix, moment_tensor, moment_vector, sample,
)
from .synth import SynthConfig, TopicAssignment, generate
from .tuner import TuneCandidate, TuneReport, tune, tune_direct
from .weights import OmegaSpec, Weights, compute_weights, omega

__all__ = [
    "Corpus", "corpus_from_docs",
    "DecompositionResult", "LearnConfig", "PowerMethodConfig",
    "RankDeficiencyError", "StageError", "TopicModel",
    "decompose", "learn", "recover", "whiten",
    "perplexity", "pmi", "top_words",
    "IDFamily", "custom_family", "gamma_family", "invgauss_family",
    "parse_family", "psi", "psi_deriv", "stable_family",
    "ChainResult", "ChainState", "log_posterior", "posterior_mean_h", "run_chain",
    "MomentSet", "accumulate", "build_m2", "build_whitened_m3", "exact_moment_set",
    "NIDModel", "bell_complete", "centered_moment_matrix", "centered_moment_tensor",
    "correlation_profile", "density", "ig_mean_correlation_profile", "moment",
    "moment_matrix", "moment_tensor", "moment_vector", "sample",
    "SynthConfig", "TopicAssignment", "generate",
    "TuneCandidate", "TuneReport", "tune", "tune_direct",
    "OmegaSpec", "Weights", "compute_weights", "omega",
]

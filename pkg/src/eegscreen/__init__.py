"""Screening features for short frontal EEG recordings.

The package covers band limiting, wavelet and Kalman ocular-artifact
removal, spectral and nonlinear features (correlation dimension, Renyi
entropy, C0 complexity), KNN / SVM / logistic-regression classifiers with
leave-one-out evaluation, synthetic cohorts, and a batch CLI.

Hot loops run under numba; set ``EEGSCREEN_BACKEND=numpy`` before import
to use the pure-numpy kernels instead.
"""
__version__ = "0.1.0"

from .errors import (
    DegeneracyWarning,
    DegenerateInputError,
    EEGScreenError,
    EstimationFailedError,
    IntegrationFailedError,
    InvalidArgumentError,
    TrainingFailedError,
)
from .signal_core import Psd, Spectrum, TimeSeries, WelchConfig, as_series, fft, ifft, inverse_dft, welch_psd
from .preprocess import FilterSpec, OcularConfig, bandlimit, dwt_decompose, dwt_reconstruct, remove_ocular
from .features_linear import spectral_features
from .features_nonlinear import (
    EmbeddingConfig,
    RenyiConfig,
    c0_complexity,
    correlation_dimension,
    correlation_integral,
    embed,
    renyi_entropy,
)
from .classify import FeatureMatrix, knn_predict, logreg_train, svm_train
from .evaluation import grid_search, group_summary, loocv, metrics
from .synth import CohortSpec, LorenzParams, lorenz, noise, synth_cohort
from .config import PipelineConfig, preset
from .pipeline import extract_matrix

"""Speech-based depression-screening pipeline with a synthetic cohort simulator."""

from .audio_io import AudioBuffer, CANONICAL_RATE_HZ, frame_signal, load_wav, resample, write_wav
from .cohort import CohortConfig, VoiceParams, class_params, generate_cohort, synth_voice
from .evaluation import (
    DEFAULT_SWEEP_CELLS,
    ConfusionCounts,
    PipelineConfig,
    compute_metrics,
    majority_vote,
    make_participant_folds,
    run_cross_validation,
    run_sweep,
)
from .featureset import (
    FeatureVector,
    apply_functionals,
    extract_egemaps_lite,
    extract_features,
    extract_is09,
    load_embedding_matrix,
    pool_mean,
    write_fvec,
)
from .manifest import DatasetManifest, ParticipantRecord, parse_manifest, write_manifest
from .models import (
    LinearSvmClassifier,
    MlpClassifier,
    Standardizer,
    TrainConfig,
    load_model,
    mlp_gradient_check,
    save_model,
)
from .segmenter import Clip, ClipSamplingConfig, detect_voiced_regions, sample_clips

__version__ = "0.1.0"

"""Emotion-distribution profiling for conversations and corpora.

Builds simplex-valued emotional profiles from sampled emotion labels,
compares them with KL/JS divergence and cosine similarity, and screens
profiles against named reference distributions.
"""

from .backends import (
    BackendConfig,
    MockLexiconBackend,
    RemoteCompletionBackend,
    ScriptedBackend,
    create_backend,
    generate_reply,
    sample_emotions,
)
from .codec import (
    ConversationTurn,
    encode_emotion_query,
    encode_reply_query,
    parse_conversation,
)
from .emotions import (
    EMOTION_LABELS,
    VOCABULARY,
    EmotionDistribution,
    EmotionSampleSet,
    EmotionVocabulary,
    argmax_emotion,
    delta_distribution,
    distribution_from_counts,
    mix,
    uniform_distribution,
)
from .metrics import (
    DistanceRow,
    cosine_similarity,
    distance_table,
    js_divergence,
    kl_divergence,
    pairwise_matrix,
)
from .references import (
    CorpusPost,
    ReferenceProfile,
    ReferenceRegistry,
    build_reference,
    load_registry,
    post_embedding,
    save_registry,
    segment_sentences,
    uniform_reference,
)
from .screening import (
    ScreeningResult,
    classification_report,
    evaluate_emotion_classification,
    evaluate_screening,
    screen,
)
from .sessions import ConversationSession, EmotionalProfile, SessionStore

__version__ = "0.1.0"

__all__ = [
    "BackendConfig",
    "ConversationSession",
    "ConversationTurn",
    "CorpusPost",
    "DistanceRow",
    "EMOTION_LABELS",
    "EmotionDistribution",
    "EmotionSampleSet",
    "EmotionVocabulary",
    "EmotionalProfile",
    "MockLexiconBackend",
    "ReferenceProfile",
    "ReferenceRegistry",
    "RemoteCompletionBackend",
    "ScreeningResult",
    "ScriptedBackend",
    "SessionStore",
    "VOCABULARY",
    "argmax_emotion",
    "build_reference",
    "classification_report",
    "cosine_similarity",
    "create_backend",
    "delta_distribution",
    "distance_table",
    "distribution_from_counts",
    "encode_emotion_query",
    "encode_reply_query",
    "evaluate_emotion_classification",
    "evaluate_screening",
    "generate_reply",
    "js_divergence",
    "kl_divergence",
    "load_registry",
    "mix",
    "pairwise_matrix",
    "parse_conversation",
    "post_embedding",
    "sample_emotions",
    "save_registry",
    "screen",
    "segment_sentences",
    "uniform_distribution",
    "uniform_reference",
]

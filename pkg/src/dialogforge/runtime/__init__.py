"""Reference bot runtime: intent model, session engine, chat service."""

from .intent_model import (
    EmptyTrainingSet,
    IntentModel,
    accuracy,
    classify,
    evaluate,
    macro_f1,
    train_intent_model,
)
from .service import BindError, EmbeddedServer, create_app, serve
from .session import (
    FALLBACK_MESSAGE,
    BotRuntime,
    ErrorInjectionConfig,
    InProcessClient,
    RuntimeSession,
    SessionClosed,
    extract_entity,
)

__all__ = [
    "BindError",
    "BotRuntime",
    "EmbeddedServer",
    "EmptyTrainingSet",
    "ErrorInjectionConfig",
    "FALLBACK_MESSAGE",
    "InProcessClient",
    "IntentModel",
    "RuntimeSession",
    "SessionClosed",
    "accuracy",
    "classify",
    "create_app",
    "evaluate",
    "extract_entity",
    "macro_f1",
    "serve",
    "train_intent_model",
]

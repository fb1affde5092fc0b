from ._chatda import (
    DataError,
    UsageError,
    annotate,
    cohen_kappa,
    detect,
    evaluate,
    evaluate_model,
    generate_corpus,
    gini,
    main,
    map_user_da,
    train,
)

__all__ = [
    "DataError",
    "UsageError",
    "annotate",
    "cohen_kappa",
    "detect",
    "evaluate",
    "evaluate_model",
    "generate_corpus",
    "gini",
    "main",
    "map_user_da",
    "train",
]

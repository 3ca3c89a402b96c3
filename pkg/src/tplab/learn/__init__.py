from .data import (
    CLASS_LABELS, FEATURE_NAMES, NUMERIC_FEATURES, RETURN_CATEGORIES,
    Dataset, from_feature_vectors,
)
from .forest import (
    ForestConfig, ForestModel, SchemaMismatchError, SingleClassDatasetError,
    model_to_json, predict, train_forest, variable_importance_report,
    write_importance_csv,
)
from .smote import TooFewMinoritySamplesError, smote
from .evaluate import (
    EvalReport, SingleProjectError, TARGET_INEFFECTIVE, TARGET_WEIGHTED,
    confusion_matrix, cross_project_eval, cross_validate, derive_seed,
    metrics_from_confusion, stratified_folds, within_corpus_eval,
)

__all__ = [
    "CLASS_LABELS", "FEATURE_NAMES", "NUMERIC_FEATURES", "RETURN_CATEGORIES",
    "Dataset", "from_feature_vectors",
    "ForestConfig", "ForestModel", "SchemaMismatchError",
    "SingleClassDatasetError", "model_to_json", "predict", "train_forest",
    "variable_importance_report", "write_importance_csv",
    "TooFewMinoritySamplesError", "smote",
    "EvalReport", "SingleProjectError", "TARGET_INEFFECTIVE", "TARGET_WEIGHTED",
    "confusion_matrix", "cross_project_eval", "cross_validate", "derive_seed",
    "metrics_from_confusion", "stratified_folds", "within_corpus_eval",
]

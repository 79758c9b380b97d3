# coldstart_kode/app/services/__init__.py

# ⚠️ Não importar dependencies aqui (dependencies importa os serviços).

# ========== DADOS E PROTOCOLO ==========
from .dataset_service import load_dataset, binarize, dataset_stats
from .split_service import split_users, split_answers, training_ratings, answer_ratings

# ========== MODELOS ==========
from .mf_service import mf_predict, mf_train, mf_train_coldstart_baseline, MfPredictor
from .iam_service import (
    l1_clip_step,
    iam_representation,
    iam_update,
    iam_predict,
    iam_train,
    iam_train_warm,
    iam_train_cold,
    iam_train_csw,
    interview_items,
    IamPredictor,
)
from .neighbors_service import pearson, build_similarity, train_itemknn, itemknn_predict, ItemKnnPredictor
from .selection_service import select_pop, select_helf, select_interview

# ========== AVALIAÇÃO ==========
from .evaluation_service import (
    rmse,
    accuracy,
    LeakageGuard,
    MajorityPredictor,
    run_cold_eval,
    run_warm_eval,
    run_interview_curve,
    run_csw_sweep,
)
from .grid_search import build_space, grid_search, results_table

__all__ = [
    "load_dataset",
    "binarize",
    "dataset_stats",
    "split_users",
    "split_answers",
    "training_ratings",
    "answer_ratings",
    "mf_predict",
    "mf_train",
    "mf_train_coldstart_baseline",
    "MfPredictor",
    "l1_clip_step",
    "iam_representation",
    "iam_update",
    "iam_predict",
    "iam_train",
    "iam_train_warm",
    "iam_train_cold",
    "iam_train_csw",
    "interview_items",
    "IamPredictor",
    "pearson",
    "build_similarity",
    "train_itemknn",
    "itemknn_predict",
    "ItemKnnPredictor",
    "select_pop",
    "select_helf",
    "select_interview",
    "rmse",
    "accuracy",
    "LeakageGuard",
    "MajorityPredictor",
    "run_cold_eval",
    "run_warm_eval",
    "run_interview_curve",
    "run_csw_sweep",
    "build_space",
    "grid_search",
    "results_table",
]

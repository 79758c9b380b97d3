# coldstart_kode/app/dependencies.py

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from .core.exceptions import CapabilityError
from .interfaces import CellRunner, EvalFn, RatingPredictor, TrainFn
from .models.data_models import DatasetSplit, SparseRatings
from .models.schemas import (
    Hyperparams,
    Interview,
    MetricsReport,
    Method,
    ModelMode,
    SelectionMethod,
    TrainingReport,
    UserSet,
)
from .services.dataset_service import binarize, load_dataset
from .services.evaluation_service import MajorityPredictor, run_cold_eval, run_warm_eval
from .services.iam_service import IamPredictor, iam_train, interview_items
from .services.mf_service import MfPredictor, mf_train_coldstart_baseline
from .services.neighbors_service import ItemKnnPredictor, train_itemknn
from .services.selection_service import select_interview
from .services.split_service import answer_ratings, split_answers, split_users, training_ratings
from .utilities.logging_config import logger

# "alpha" na CLI = entrevista aprendida por um CS-IAM treinado com o mesmo hyper
ALPHA_SELECTION = "alpha"
DEFAULT_IAMPOP_QUESTIONS = 10


# ========== CONTEXTO DO EXPERIMENTO ==========

class ExperimentSpec(BaseModel):
    """
    Descrição primitiva (serializável) de um experimento: como reconstruir o
    dataset e o split e qual método avaliar. É o payload das tarefas Celery.
    """
    model_config = ConfigDict(frozen=True)

    dataset_path: str
    separator: str = "\t"
    threshold: Optional[float] = None
    min_user_ratings: int = 0
    split_seed: int = 42
    answer_seed: Optional[int] = None
    manifest_path: Optional[str] = None
    method: Method = Method.iam
    questions: Optional[int] = None
    select: Optional[str] = None
    max_items: Optional[int] = None


@dataclass
class ExperimentContext:
    data: SparseRatings
    split: DatasetSplit
    dataset: str = ""
    max_items: Optional[int] = None
    _train: Optional[SparseRatings] = field(default=None, repr=False)

    @property
    def train(self) -> SparseRatings:
        if self._train is None:
            self._train = training_ratings(self.data, self.split)
        return self._train


def build_context(spec: ExperimentSpec) -> ExperimentContext:
    data = binarize(
        load_dataset(spec.dataset_path, spec.separator, min_user_ratings=spec.min_user_ratings),
        spec.threshold,
    )
    if spec.manifest_path:
        from .database.text_exports import read_split_manifest
        split = read_split_manifest(spec.manifest_path, data)
    else:
        split = split_users(data, spec.split_seed)
    if not split.has_answers:
        answer_seed = spec.answer_seed if spec.answer_seed is not None else split.seed
        split = split_answers(data, split, answer_seed)
    return ExperimentContext(data=data, split=split, dataset=spec.dataset_path, max_items=spec.max_items)


@lru_cache(maxsize=4)
def get_context(spec: ExperimentSpec) -> ExperimentContext:
    """Contexto com cache: células do grid search reaproveitam dataset e split."""
    return build_context(spec)


def clear_context_cache() -> None:
    get_context.cache_clear()


# ========== TREINO POR MÉTODO ==========

@dataclass
class TrainedMethod:
    method: Method
    hyper: Hyperparams
    predictor: RatingPredictor
    interview: Optional[Interview]
    model: Any = None
    report: TrainingReport = field(default_factory=TrainingReport)
    target_size: Optional[int] = None


def resolve_interview(
    context: ExperimentContext,
    hyper: Hyperparams,
    questions: int,
    select: Optional[str],
) -> Interview:
    """Entrevista estática (POP/HELF) ou aprendida (alpha) com `questions` itens."""
    select = select or SelectionMethod.pop.value
    if select == ALPHA_SELECTION:
        cold = iam_train(context.train, hyper, ModelMode.cold)
        return interview_items(cold).truncated(questions)
    return select_interview(context.train, SelectionMethod(select), questions)


def train_method(
    context: ExperimentContext,
    method: Method,
    hyper: Hyperparams,
    questions: Optional[int] = None,
    select: Optional[str] = None,
    audit: bool = False,
    fixed_interview: Optional[Interview] = None,
) -> TrainedMethod:
    """
    Treina o método pedido e decide o protocolo:
    - sem `questions`: warm (mf/iam/itemknn/majority) ou entrevista aprendida completa (csiam/cswiam);
    - com `questions`: cold-start com entrevista POP/HELF/alpha, ou a aprendida truncada;
    - com `fixed_interview` (lida de arquivo): cold-start com essa entrevista.
    """
    method = Method(method)
    report = TrainingReport()
    interview: Optional[Interview] = None

    if method == Method.iampop and questions is None and fixed_interview is None:
        logger.warning(f"⚠️ iampop sem --questions: usando {DEFAULT_IAMPOP_QUESTIONS}")
        questions = DEFAULT_IAMPOP_QUESTIONS

    if method in (Method.csiam, Method.cswiam):
        if fixed_interview is not None:
            raise CapabilityError(f"{method.value} aprende a própria entrevista; entrevista fixa não se aplica.")
        mode = ModelMode.cold if method == Method.csiam else ModelMode.csw
        model = iam_train(context.train, hyper, mode, report=report, audit=audit)
        interview = interview_items(model)
        if questions is not None:
            interview = interview.truncated(questions)
        predictor: RatingPredictor = IamPredictor(model, name=method.value)

    else:
        if fixed_interview is not None:
            interview = fixed_interview
        elif questions is not None:
            interview = resolve_interview(context, hyper, questions, select)

        if method == Method.mf:
            model = mf_train_coldstart_baseline(context.data, context.split, interview, hyper, report=report)
            predictor = MfPredictor(model, name=method.value)
        elif method in (Method.iam, Method.iampop):
            model = iam_train(context.train, hyper, ModelMode.warm, report=report, audit=audit)
            predictor = IamPredictor(model, name=method.value)
        elif method == Method.itemknn:
            allowed = None if interview is None else interview.items
            knn_data = answer_ratings(context.data, context.split, allowed_items=allowed)
            model = train_itemknn(knn_data, k=hyper.neighbors, max_items=context.max_items)
            predictor = ItemKnnPredictor(model, name=method.value)
        elif method == Method.majority:
            model = None
            predictor = MajorityPredictor(context.train, name=method.value)
        else:
            raise CapabilityError(f"Método sem treinador: {method.value}")

    return TrainedMethod(
        method=method,
        hyper=hyper,
        predictor=predictor,
        interview=interview,
        model=model,
        report=report,
        target_size=questions if fixed_interview is None else fixed_interview.size,
    )


def evaluate_trained(
    context: ExperimentContext,
    trained: TrainedMethod,
    user_set: UserSet = UserSet.valid,
) -> MetricsReport:
    if trained.interview is None:
        report = run_warm_eval(trained.predictor, context.split, user_set)
    else:
        report = run_cold_eval(trained.predictor, context.split, trained.interview, user_set)
    return report.model_copy(update={
        "config": trained.hyper,
        "seeds": [trained.hyper.seed],
        "dataset": context.dataset,
        "target_size": trained.target_size,
    })


def build_train_eval(
    context: ExperimentContext,
    method: Method,
    questions: Optional[int] = None,
    select: Optional[str] = None,
) -> Tuple[TrainFn, EvalFn]:
    """Par (train_fn, eval_fn) para o grid search local."""
    def train_fn(hyper: Hyperparams) -> TrainedMethod:
        return train_method(context, method, hyper, questions=questions, select=select)

    def eval_fn(trained: TrainedMethod, user_set: UserSet) -> MetricsReport:
        return evaluate_trained(context, trained, user_set)

    return train_fn, eval_fn


def build_cell_runner(spec: ExperimentSpec) -> CellRunner:
    """Despacha cada célula (config, semente) como tarefa Celery."""
    from .workers.tasks import run_sweep_cell

    def runner(hyper: Hyperparams, user_set: UserSet) -> MetricsReport:
        result = run_sweep_cell.delay(
            spec.model_dump(mode="json"), hyper.model_dump(mode="json"), UserSet(user_set).value
        )
        return MetricsReport.model_validate(result.get())

    return runner


__all__ = [
    "ALPHA_SELECTION",
    "ExperimentSpec",
    "ExperimentContext",
    "build_context",
    "get_context",
    "clear_context_cache",
    "TrainedMethod",
    "resolve_interview",
    "train_method",
    "evaluate_trained",
    "build_train_eval",
    "build_cell_runner",
]

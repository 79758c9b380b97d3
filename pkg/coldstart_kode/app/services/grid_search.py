# coldstart_kode/app/services/grid_search.py

from itertools import product
from typing import Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..core.exceptions import ColdStartError, NoDataError
from ..interfaces import CellRunner, EvalFn, TrainFn
from ..models.schemas import GridCell, GridSearchResult, Hyperparams, UserSet
from ..utilities.constants import GRID_SEEDS
from ..utilities.logging_config import logger


def build_space(
    latent_dims: Iterable[int],
    learning_rates: Iterable[float],
    lambda1s: Iterable[float],
    lambda2s: Iterable[float] = (0.0,),
    epochs: int = 20,
    neighbors: Iterable[int] = (0,),
) -> List[Hyperparams]:
    """Produto cartesiano das grades, em ordem estável."""
    return [
        Hyperparams(latent_dim=n, learning_rate=lr, lambda1=l1, lambda2=l2, epochs=epochs, neighbors=k)
        for n, lr, l1, l2, k in product(latent_dims, learning_rates, lambda1s, lambda2s, neighbors)
    ]


def _run_cell(
    index: int,
    hyper: Hyperparams,
    train_fn: Optional[TrainFn],
    eval_fn: Optional[EvalFn],
    cell_runner: Optional[CellRunner],
) -> GridCell:
    try:
        if cell_runner is not None:
            report = cell_runner(hyper, UserSet.valid)
        else:
            report = eval_fn(train_fn(hyper), UserSet.valid)
        return GridCell(config_index=index, seed=hyper.seed, hyper=hyper, report=report)
    except (ColdStartError, ValueError, ArithmeticError) as e:
        logger.warning(f"⚠️ Célula config={index} seed={hyper.seed} falhou: {e}")
        return GridCell(config_index=index, seed=hyper.seed, hyper=hyper, error=f"{type(e).__name__}: {e}")


def grid_search(
    space: Sequence[Hyperparams],
    train_fn: Optional[TrainFn] = None,
    eval_fn: Optional[EvalFn] = None,
    seeds: Sequence[int] = GRID_SEEDS,
    cell_runner: Optional[CellRunner] = None,
) -> GridSearchResult:
    """
    Treina/avalia cada config com cada semente nos usuários de validação,
    ordena pela acurácia média (empates: menor λ2, menor N, menor índice) e
    reavalia a melhor uma vez nos usuários de teste.
    """
    if not space:
        raise ValueError("Espaço de busca vazio.")
    if cell_runner is None and (train_fn is None or eval_fn is None):
        raise ValueError("Informe train_fn e eval_fn, ou um cell_runner.")

    logger.info(f"🚀 Grid search: {len(space)} configs × {len(seeds)} sementes")
    cells: List[GridCell] = []
    for index, hyper in enumerate(space):
        for seed in seeds:
            cells.append(_run_cell(index, hyper.with_seed(seed), train_fn, eval_fn, cell_runner))

    means: List[Optional[float]] = []
    for index in range(len(space)):
        accs = [c.report.accuracy for c in cells if c.config_index == index and not c.failed]
        means.append(float(np.mean(accs)) if accs else None)

    ranked = [i for i in range(len(space)) if means[i] is not None]
    if not ranked:
        raise NoDataError("Todas as células do grid search falharam.")
    ranked.sort(key=lambda i: (-means[i], space[i].lambda2, space[i].latent_dim, i))
    best = ranked[0]
    logger.info(f"✅ Melhor config #{best}: acc média={means[best]:.4f} ({space[best]})")

    best_hyper = space[best].with_seed(seeds[0])
    if cell_runner is not None:
        test_report = cell_runner(best_hyper, UserSet.test)
    else:
        test_report = eval_fn(train_fn(best_hyper), UserSet.test)
    logger.info(f"✅ Teste: acc={test_report.accuracy:.4f} rmse={test_report.rmse:.4f}")

    return GridSearchResult(
        best_index=best,
        best_config=space[best],
        mean_accuracy=means,
        cells=cells,
        test_report=test_report,
    )


def results_table(result: GridSearchResult) -> pd.DataFrame:
    """Uma linha por célula (config, semente), mais a linha de teste da melhor config."""
    rows = []
    for cell in result.cells:
        row = {"config": cell.config_index, "seed": cell.seed, "user_set": UserSet.valid.value}
        row.update(cell.hyper.model_dump(exclude={"seed"}))
        if cell.report is not None:
            row.update(
                method=cell.report.method,
                interview_size=cell.report.interview_size,
                rmse=cell.report.rmse,
                accuracy=cell.report.accuracy,
                error="",
            )
        else:
            row.update(method="", interview_size=np.nan, rmse=np.nan, accuracy=np.nan, error=cell.error)
        rows.append(row)

    test = result.test_report
    if test is not None:
        row = {
            "config": result.best_index,
            "seed": test.seeds[0] if test.seeds else np.nan,
            "user_set": UserSet.test.value,
        }
        row.update(result.best_config.model_dump(exclude={"seed"}))
        row.update(
            method=test.method,
            interview_size=test.interview_size,
            rmse=test.rmse,
            accuracy=test.accuracy,
            error="",
        )
        rows.append(row)
    return pd.DataFrame(rows)


__all__ = ["build_space", "grid_search", "results_table"]

# coldstart_kode/app/workers/tasks.py

from celery import Celery

from ..core.config import settings
from ..models.schemas import Hyperparams, UserSet
from ..utilities.logging_config import logger

# 🔹 Inicializa o Celery sem `broker`
celery_app = Celery("coldstart_kode")


def configure_celery(eager: bool = settings.CELERY_EAGER, broker_url=settings.CELERY_BROKER_URL) -> None:
    """
    Modo eager (padrão): células rodam no próprio processo, em ordem.
    Com broker e eager=False, as células vão para workers externos.
    """
    if eager or not broker_url:
        celery_app.conf.update(
            task_always_eager=True,
            task_eager_propagates=True,
        )
        logger.debug("🔄 Celery em modo eager (sem broker)")
        return

    celery_app.conf.update(
        broker_url=broker_url,
        result_backend=broker_url,
        task_always_eager=False,
        task_serializer="json",
        result_serializer="json",
        accept_content=["json"],
    )
    logger.info(f"✅ Celery configurado com broker {broker_url}")


configure_celery()


@celery_app.task(name="coldstart_kode.run_sweep_cell")
def run_sweep_cell(spec_data: dict, hyper_data: dict, user_set: str) -> dict:
    """
    Treina e avalia uma célula (config, semente) do sweep. Payload e retorno
    são primitivos (JSON) para poder cruzar o broker.
    """
    from ..dependencies import ExperimentSpec, evaluate_trained, get_context, train_method

    spec = ExperimentSpec.model_validate(spec_data)
    hyper = Hyperparams.model_validate(hyper_data)
    logger.info(f"🔹 Célula {spec.method.value} seed={hyper.seed} ({user_set})")

    context = get_context(spec)
    trained = train_method(context, spec.method, hyper, questions=spec.questions, select=spec.select)
    report = evaluate_trained(context, trained, UserSet(user_set))
    return report.model_dump(mode="json")

# coldstart_kode/app/main.py

import argparse
from pathlib import Path
from typing import Any, List, Optional, Sequence, Tuple

from coldstart_kode.app.core.config import Settings, load_settings
from coldstart_kode.app.core.error_handlers import handle_command
from coldstart_kode.app.core.exceptions import CapabilityError, ModelFormatError
from coldstart_kode.app.database.model_store import load_model, save_model
from coldstart_kode.app.database.text_exports import (
    metrics_frame,
    read_interview,
    read_names,
    write_interview,
    write_metrics,
    write_ratings,
    write_split_manifest,
    write_table,
)
from coldstart_kode.app.dependencies import (
    ALPHA_SELECTION,
    ExperimentContext,
    ExperimentSpec,
    build_cell_runner,
    build_context,
    build_train_eval,
    evaluate_trained,
    get_context,
    resolve_interview,
    train_method,
)
from coldstart_kode.app.interfaces import RatingPredictor
from coldstart_kode.app.models.data_models import IamModel, MfModel
from coldstart_kode.app.models.schemas import (
    Hyperparams,
    Interview,
    Method,
    MetricsReport,
    ModelKind,
    ModelMode,
    SelectionMethod,
    UserSet,
)
from coldstart_kode.app.services.dataset_service import binarize, dataset_stats, load_dataset, resolve_separator
from coldstart_kode.app.services.evaluation_service import (
    run_cold_eval,
    run_csw_sweep,
    run_interview_curve,
    run_warm_eval,
)
from coldstart_kode.app.services.grid_search import build_space, grid_search, results_table
from coldstart_kode.app.services.iam_service import IamPredictor, interview_items
from coldstart_kode.app.services.interview_session import InterviewSession
from coldstart_kode.app.services.mf_service import MfPredictor
from coldstart_kode.app.services.neighbors_service import ItemKnnPredictor
from coldstart_kode.app.services.pca_export import export_pca
from coldstart_kode.app.services.synth_service import SCALES, planted_frame, write_synthetic
from coldstart_kode.app.utilities import constants
from coldstart_kode.app.utilities.helpers import log_space, parse_float_list, parse_int_list
from coldstart_kode.app.utilities.logging_config import configure_logging, logger

# `train --model <tipo>` → método treinado
TRAIN_KINDS = {
    ModelKind.mf.value: Method.mf,
    ModelKind.iam_warm.value: Method.iam,
    ModelKind.iam_cold.value: Method.csiam,
    ModelKind.iam_csw.value: Method.cswiam,
    ModelKind.itemknn.value: Method.itemknn,
}

IAM_METHOD_NAMES = {
    ModelMode.warm: Method.iam.value,
    ModelMode.cold: Method.csiam.value,
    ModelMode.csw: Method.cswiam.value,
}

SELECT_CHOICES = [SelectionMethod.pop.value, SelectionMethod.helf.value, ALPHA_SELECTION]


# ========== FUNÇÕES AUXILIARES ==========

def _lambda2_grid(text: str) -> List[float]:
    """Aceita `baixo:alto:pontos` (log-espaçado) ou uma lista `a,b,c`."""
    if ":" in text:
        low, high, points = text.split(":")
        return log_space(float(low), float(high), int(points))
    return parse_float_list(text)


def _experiment_spec(
    args: argparse.Namespace,
    settings: Settings,
    method: Method = Method.iam,
    questions: Optional[int] = None,
    select: Optional[str] = None,
) -> ExperimentSpec:
    return ExperimentSpec(
        dataset_path=str(args.dataset),
        separator=resolve_separator(args.format or settings.SEPARATOR),
        threshold=settings.THRESHOLD,
        min_user_ratings=settings.MIN_USER_RATINGS,
        split_seed=settings.DEFAULT_SEED,
        answer_seed=args.answer_seed,
        manifest_path=args.split,
        method=method,
        questions=questions,
        select=select,
        max_items=settings.ITEMKNN_MAX_ITEMS,
    )


def _hyper(args: argparse.Namespace, settings: Settings) -> Hyperparams:
    neighbors = getattr(args, "neighbors", None)
    return Hyperparams(
        latent_dim=settings.LATENT_DIM,
        learning_rate=settings.LEARNING_RATE,
        lambda1=settings.LAMBDA1,
        lambda2=settings.LAMBDA2,
        epochs=settings.EPOCHS,
        seed=settings.DEFAULT_SEED,
        neighbors=settings.ITEMKNN_K if neighbors is None else neighbors,
    )


def _names(args: argparse.Namespace) -> Optional[dict]:
    path = getattr(args, "names", None)
    return read_names(path) if path else None


def _annotate(report: MetricsReport, context: ExperimentContext, hyper: Hyperparams) -> MetricsReport:
    return report.model_copy(update={
        "config": hyper,
        "seeds": report.seeds or [hyper.seed],
        "dataset": context.dataset,
    })


def _print_reports(reports: Sequence[MetricsReport]) -> None:
    frame = metrics_frame(reports)
    columns = [
        c for c in ("method", "user_set", "target_size", "interview_size", "added_fraction",
                    "seeds", "accuracy", "rmse", "users_evaluated")
        if c in frame.columns
    ]
    print(frame[columns].to_string(index=False))


def _load_predictor(path: str, context: ExperimentContext) -> Tuple[RatingPredictor, Optional[Interview], Any]:
    """Preditor a partir de um arquivo de modelo; modelos cold/csw trazem a entrevista aprendida."""
    model = load_model(path)
    if isinstance(model, Interview):
        raise CapabilityError(f"{path} contém uma entrevista, não um modelo treinado.")
    if model.num_items != context.data.num_items:
        raise ModelFormatError(
            f"{path}: modelo com {model.num_items} itens, dataset com {context.data.num_items}"
        )

    interview: Optional[Interview] = None
    if isinstance(model, IamModel):
        predictor: RatingPredictor = IamPredictor(model, name=IAM_METHOD_NAMES[model.mode])
        if model.mode != ModelMode.warm:
            interview = interview_items(model)
    elif isinstance(model, MfModel):
        predictor = MfPredictor(model)
    else:
        predictor = ItemKnnPredictor(model)
    return predictor, interview, model


# ========== COMANDOS ==========

def cmd_ingest(args: argparse.Namespace, settings: Settings) -> int:
    """Lê, normaliza e binariza um dataset; grava mapas de ids e ratings normalizados."""
    separator = resolve_separator(args.format or settings.SEPARATOR)
    data = load_dataset(
        args.dataset, separator, min_user_ratings=settings.MIN_USER_RATINGS, id_map_dir=args.out,
    )
    data = binarize(data, settings.THRESHOLD)
    if args.out:
        write_ratings(data, Path(args.out) / "ratings.tsv")
    for key, value in dataset_stats(data).items():
        print(f"{key}\t{value}")
    return constants.EXIT_OK


def cmd_split(args: argparse.Namespace, settings: Settings) -> int:
    spec = _experiment_spec(args, settings).model_copy(update={"manifest_path": None})
    context = build_context(spec)
    write_split_manifest(context.split, context.data, args.out)
    return constants.EXIT_OK


def cmd_train(args: argparse.Namespace, settings: Settings) -> int:
    """
    Treina um modelo e grava o arquivo binário. Modelos com entrevista
    (iam-cold, iam-csw ou --questions) também gravam a lista da entrevista.
    """
    method = TRAIN_KINDS[args.model]
    context = build_context(_experiment_spec(args, settings, method))
    hyper = _hyper(args, settings)

    trained = train_method(context, method, hyper, questions=args.questions, select=args.select, audit=args.audit)
    out = Path(args.out)
    save_model(trained.model, out)

    if trained.interview is not None:
        interview_out = Path(args.interview_out) if args.interview_out else out.with_suffix(".interview.tsv")
        write_interview(trained.interview, interview_out, item_ids=context.data.item_ids, names=_names(args))

    report = trained.report
    logger.info(
        f"🔹 Treino {args.model}: épocas={len(report.epoch_losses)}, clips={report.clip_events}, "
        f"auto-contribuições={report.self_contributions}, leituras proibidas={report.forbidden_reads}"
    )
    return constants.EXIT_OK


def _evaluate_method(
    context: ExperimentContext,
    method: Method,
    hyper: Hyperparams,
    sizes: Optional[List[int]],
    select: Optional[str],
    user_set: UserSet,
    fixed: Optional[Interview] = None,
) -> List[MetricsReport]:
    if fixed is not None:
        chosen = [fixed.truncated(m) for m in sizes] if sizes else [fixed]
        return [
            evaluate_trained(context, train_method(context, method, hyper, fixed_interview=c), user_set)
            for c in chosen
        ]
    if method in (Method.csiam, Method.cswiam) and sizes:
        # Entrevista aprendida uma vez; a curva usa os m primeiros itens.
        trained = train_method(context, method, hyper)
        curve = run_interview_curve(trained.predictor, context.split, trained.interview, sizes, user_set)
        return [_annotate(r, context, hyper) for r in curve]
    if not sizes:
        return [evaluate_trained(context, train_method(context, method, hyper, select=select), user_set)]
    return [
        evaluate_trained(context, train_method(context, method, hyper, questions=m, select=select), user_set)
        for m in sizes
    ]


def _evaluate_file(
    context: ExperimentContext,
    args: argparse.Namespace,
    hyper: Hyperparams,
    user_set: UserSet,
    seeds: List[int],
    fixed: Optional[Interview] = None,
) -> List[MetricsReport]:
    predictor, interview, model = _load_predictor(args.model_file, context)
    learned = interview is not None
    if fixed is not None:
        interview = fixed
    sizes = args.questions

    if args.add_fractions is not None:
        if not learned:
            raise CapabilityError("--add-fractions requer um modelo IAM cold ou csw.")
        if sizes:
            interview = interview.truncated(sizes[0])
        reports = run_csw_sweep(model, context.split, interview, args.add_fractions, seeds, user_set, predictor.name)
    elif interview is not None:
        if sizes:
            reports = run_interview_curve(predictor, context.split, interview, sizes, user_set)
        else:
            reports = [run_cold_eval(predictor, context.split, interview, user_set)]
    elif sizes:
        reports = []
        for m in sizes:
            chosen = resolve_interview(context, hyper, m, args.select)
            report = run_cold_eval(predictor, context.split, chosen, user_set)
            reports.append(report.model_copy(update={"target_size": m}))
    else:
        reports = [run_warm_eval(predictor, context.split, user_set)]

    model_hyper = getattr(model, "hyper", None) or hyper
    return [_annotate(r, context, model_hyper) for r in reports]


def cmd_evaluate(args: argparse.Namespace, settings: Settings) -> int:
    """
    Avalia um método (treinando-o) ou um arquivo de modelo no protocolo:
    warm sem --questions; cold-start com entrevista de cada tamanho pedido
    (ou a lida de --interview); varredura CSW com --add-fractions.
    """
    method = Method(args.method)
    context = build_context(_experiment_spec(args, settings, method))
    hyper = _hyper(args, settings)
    user_set = UserSet(args.user_set)
    seeds = args.seeds or [hyper.seed]
    fixed = read_interview(args.interview, item_ids=context.data.item_ids) if args.interview else None

    if args.model_file:
        reports = _evaluate_file(context, args, hyper, user_set, seeds, fixed)
    elif args.add_fractions is not None:
        if method not in (Method.csiam, Method.cswiam) or fixed is not None:
            raise CapabilityError("--add-fractions requer --method csiam ou cswiam.")
        questions = args.questions[0] if args.questions else None
        trained = train_method(context, method, hyper, questions=questions)
        reports = run_csw_sweep(
            trained.model, context.split, trained.interview, args.add_fractions, seeds, user_set, method.value,
        )
        reports = [_annotate(r, context, hyper) for r in reports]
    else:
        reports = []
        for seed in seeds:
            reports.extend(
                _evaluate_method(
                    context, method, hyper.with_seed(seed), args.questions, args.select, user_set, fixed
                )
            )

    _print_reports(reports)
    if args.out:
        write_metrics(reports, args.out)
    return constants.EXIT_OK


def cmd_select(args: argparse.Namespace, settings: Settings) -> int:
    """Entrevista estática (pop/helf) ou aprendida (alpha) sobre os usuários de treino."""
    context = build_context(_experiment_spec(args, settings))
    interview = resolve_interview(context, _hyper(args, settings), args.questions, args.select)
    write_interview(interview, args.out, item_ids=context.data.item_ids, names=_names(args))
    return constants.EXIT_OK


def cmd_sweep(args: argparse.Namespace, settings: Settings) -> int:
    """
    Grid search semeado: cada (config, semente) nos usuários de validação,
    melhor config reavaliada no teste. Com --celery, células viram tarefas.
    """
    method = Method(args.method)
    spec = _experiment_spec(args, settings, method, questions=args.questions, select=args.select)

    latent_free = method in (Method.itemknn, Method.majority)
    learned_interview = method in (Method.csiam, Method.cswiam)
    space = build_space(
        latent_dims=[settings.LATENT_DIM] if latent_free else (args.latent_dims or constants.DEFAULT_LATENT_DIMS),
        learning_rates=[settings.LEARNING_RATE] if latent_free else (args.lrs or constants.DEFAULT_LEARNING_RATES),
        lambda1s=[settings.LAMBDA1] if latent_free else (args.lambda1s or constants.DEFAULT_LAMBDA1S),
        lambda2s=args.lambda2_grid or (
            log_space(1e-4, 1.0, constants.DEFAULT_LAMBDA2_POINTS) if learned_interview else [settings.LAMBDA2]
        ),
        epochs=settings.EPOCHS,
        neighbors=args.neighbors_grid or (constants.ITEMKNN_K_GRID if method == Method.itemknn else [0]),
    )
    seeds = args.seeds or list(constants.GRID_SEEDS)

    if args.celery:
        from coldstart_kode.app.workers.tasks import configure_celery

        configure_celery(eager=settings.CELERY_EAGER, broker_url=settings.CELERY_BROKER_URL)
        result = grid_search(space, seeds=seeds, cell_runner=build_cell_runner(spec))
    else:
        train_fn, eval_fn = build_train_eval(get_context(spec), method, args.questions, args.select)
        result = grid_search(space, train_fn, eval_fn, seeds=seeds)

    table = results_table(result)
    if args.out:
        write_table(table, args.out)
        logger.info(f"✅ Resultados do sweep gravados em {args.out}")
    print(table.to_string(index=False))
    return constants.EXIT_OK


def cmd_interview(args: argparse.Namespace, settings: Settings) -> int:
    model = load_model(args.model_file)
    if not isinstance(model, IamModel):
        raise CapabilityError(f"{args.model_file} não é um modelo IAM.")
    interview = interview_items(model)
    if args.questions is not None:
        interview = interview.truncated(args.questions)
    session = InterviewSession(
        model, interview, top_k=args.top_k, names=_names(args), save_path=args.save_rep,
    )
    session.run()
    return constants.EXIT_OK


def cmd_export_pca(args: argparse.Namespace, settings: Settings) -> int:
    model = load_model(args.model_file)
    if not isinstance(model, IamModel):
        raise CapabilityError(f"{args.model_file} não é um modelo IAM.")
    export_pca(model, args.out)
    return constants.EXIT_OK


def cmd_synth(args: argparse.Namespace, settings: Settings) -> int:
    frame = planted_frame(
        args.users,
        args.items,
        args.per_user,
        rank=args.rank,
        noise=args.noise,
        scale=args.scale,
        popularity_skew=args.popularity_skew,
        seed=settings.DEFAULT_SEED,
    )
    write_synthetic(args.out, frame, separator=resolve_separator(args.format or "tab"))
    return constants.EXIT_OK


# ========== PARSER ==========

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="arquivo key=value com configurações")
    common.add_argument("--seed", type=int, help="semente da execução (split e treino)")
    common.add_argument("--log-level", help="nível de log do console")
    common.add_argument("--log-dir", help="diretório do log rotativo (vazio desativa)")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--dataset", required=True, help="arquivo user<sep>item<sep>rating[<sep>ts]")
    data.add_argument("--format", help="tab, comma, colons ou o próprio separador")
    data.add_argument("--threshold", type=float, help="limiar de binarização (padrão: pela escala)")
    data.add_argument("--min-user-ratings", type=int)
    data.add_argument("--split", help="manifesto de split gerado pelo comando split")
    data.add_argument("--answer-seed", type=int, help="semente dos Answer Sets (padrão: --seed)")

    hyper = argparse.ArgumentParser(add_help=False)
    hyper.add_argument("--latent-dim", type=int)
    hyper.add_argument("--lr", type=float)
    hyper.add_argument("--lambda1", type=float)
    hyper.add_argument("--lambda2", type=float)
    hyper.add_argument("--epochs", type=int)
    hyper.add_argument("--neighbors", type=int, help="k do ItemKNN (0 = todos)")

    parser = argparse.ArgumentParser(
        prog="coldstart-kode",
        description="Filtragem colaborativa com modelo aditivo indutivo para cold-start de usuários",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("ingest", parents=[common, data], help="estatísticas e normalização do dataset")
    p.add_argument("--out", help="diretório para mapas de ids e ratings normalizados")
    p.set_defaults(handler=cmd_ingest)

    p = commands.add_parser("split", parents=[common, data], help="grava o manifesto de split")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_split)

    p = commands.add_parser("train", parents=[common, data, hyper], help="treina e grava um modelo")
    p.add_argument("--model", required=True, choices=list(TRAIN_KINDS))
    p.add_argument("--questions", type=int, help="tamanho da entrevista (mf/itemknn: cold-start)")
    p.add_argument("--select", choices=SELECT_CHOICES)
    p.add_argument("--out", required=True)
    p.add_argument("--interview-out", help="lista da entrevista (padrão: <out>.interview.tsv)")
    p.add_argument("--names", help="mapa itemId<sep>título")
    p.add_argument("--audit", action="store_true", help="treino IAM instrumentado")
    p.set_defaults(handler=cmd_train)

    p = commands.add_parser("evaluate", parents=[common, data, hyper], help="avalia no protocolo de simulação")
    p.add_argument("--method", default=Method.iam.value, choices=[m.value for m in Method])
    p.add_argument("--model-file", help="avalia um modelo gravado em vez de treinar")
    p.add_argument(
        "--questions", type=parse_int_list, nargs="?", const=list(constants.INTERVIEW_SIZES),
        help="tamanhos de entrevista, ex. 0,5,10,20 (sem valor: 5,10,20)",
    )
    p.add_argument("--interview", help="entrevista fixa (TSV com itemId, como a saída de select)")
    p.add_argument("--select", choices=SELECT_CHOICES)
    p.add_argument("--user-set", default=UserSet.valid.value, choices=[u.value for u in UserSet])
    p.add_argument(
        "--add-fractions", type=parse_float_list, nargs="?", const=list(constants.CSW_ADD_FRACTIONS),
        help="varredura CSW, ex. 0,0.1,0.5 (sem valor: 0,0.1,0.25,0.5)",
    )
    p.add_argument("--seeds", type=parse_int_list, help="sementes de treino/amostragem, ex. 1,2,3")
    p.add_argument("--out", help="TSV de métricas (append)")
    p.set_defaults(handler=cmd_evaluate)

    p = commands.add_parser("select", parents=[common, data, hyper], help="grava uma entrevista pop/helf/alpha")
    p.add_argument("--select", default=SelectionMethod.pop.value, choices=SELECT_CHOICES)
    p.add_argument("--questions", type=int, required=True)
    p.add_argument("--names", help="mapa itemId<sep>título")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_select)

    p = commands.add_parser("sweep", parents=[common, data], help="grid search semeado")
    p.add_argument("--method", default=Method.iam.value, choices=[m.value for m in Method])
    p.add_argument("--questions", type=int)
    p.add_argument("--select", choices=SELECT_CHOICES)
    p.add_argument("--latent-dims", type=parse_int_list)
    p.add_argument("--lrs", type=parse_float_list)
    p.add_argument("--lambda1s", type=parse_float_list)
    p.add_argument("--lambda2-grid", type=_lambda2_grid, help="baixo:alto:pontos ou a,b,c")
    p.add_argument("--neighbors-grid", type=parse_int_list)
    p.add_argument("--epochs", type=int)
    p.add_argument("--seeds", type=parse_int_list)
    p.add_argument("--celery", action="store_true", help="despacha células como tarefas Celery")
    p.add_argument("--out", help="TSV com uma linha por célula")
    p.set_defaults(handler=cmd_sweep)

    p = commands.add_parser("interview", parents=[common], help="sessão interativa de entrevista")
    p.add_argument("--model-file", required=True)
    p.add_argument("--questions", type=int, help="usa só as m primeiras perguntas")
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--names", help="mapa itemId<sep>título")
    p.add_argument("--save-rep", help="grava a representação final")
    p.set_defaults(handler=cmd_interview)

    p = commands.add_parser("export-pca", parents=[common], help="PCA das translações α_iΨ_i")
    p.add_argument("--model-file", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_export_pca)

    p = commands.add_parser("synth", parents=[common], help="gera um dataset planted de posto baixo")
    p.add_argument("--users", type=int, default=200)
    p.add_argument("--items", type=int, default=50)
    p.add_argument("--per-user", type=int, default=20)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--scale", default="stars", choices=list(SCALES))
    p.add_argument("--popularity-skew", type=float, default=0.8)
    p.add_argument("--format", help="separador de saída (padrão: tab)")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_synth)

    return parser


@handle_command
def run_command(args: argparse.Namespace) -> int:
    settings = load_settings(
        args.config,
        DEFAULT_SEED=args.seed,
        LOG_LEVEL=args.log_level,
        LOG_DIR=args.log_dir,
        THRESHOLD=getattr(args, "threshold", None),
        MIN_USER_RATINGS=getattr(args, "min_user_ratings", None),
        LATENT_DIM=getattr(args, "latent_dim", None),
        LEARNING_RATE=getattr(args, "lr", None),
        LAMBDA1=getattr(args, "lambda1", None),
        LAMBDA2=getattr(args, "lambda2", None),
        EPOCHS=getattr(args, "epochs", None),
    )
    configure_logging(settings.LOG_LEVEL, settings.LOG_DIR)
    logger.info(f"🚀 coldstart-kode {args.command} (seed={settings.DEFAULT_SEED})")
    return args.handler(args, settings)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse: 0 para --help, 2 para flag desconhecida
        return e.code if isinstance(e.code, int) else constants.EXIT_USAGE
    return run_command(args)


if __name__ == "__main__":
    raise SystemExit(main())

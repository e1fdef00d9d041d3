import argparse
import logging
import os
import sys
from datetime import datetime
from typing import List, Optional

from .classifiers.grid_search import GridSearchSpec
from .config import Config
from .errors import MiaeError
from .pipeline.commands import (
    cmd_arch_sweep,
    cmd_encode,
    cmd_evaluate,
    cmd_quality,
    cmd_rank,
    cmd_reconstruct,
    cmd_run,
    cmd_sweep,
    cmd_train,
)
from .pipeline.schemas import ErrorResponse, load_config, with_overrides


def setup_logging():
    """Setup logging with timestamped file output"""
    run_dir = os.path.join(Config.LOG_DIR, "runs")
    os.makedirs(run_dir, exist_ok=True)

    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_filename = os.path.join(run_dir, f"run_{timestamp}.log")

    # File plus console on stdout; stderr is reserved for the error JSON line
    logging.basicConfig(
        level=getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.FileHandler(log_filename), logging.StreamHandler(sys.stdout)],
        force=True,
    )

    logging.info(f"Run started - logging to {log_filename}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="miae",
        description="Multi-input auto-encoder representation learning and feature selection",
    )
    verbs = parser.add_subparsers(dest="command", required=True)

    def verb(name: str, help_text: str, config: bool = False) -> argparse.ArgumentParser:
        sub = verbs.add_parser(name, help=help_text)
        sub.add_argument(
            "--config", required=config, help="Pipeline YAML file" + ("" if config else " (classifier section)")
        )
        sub.add_argument("--out", help="Output directory")
        sub.add_argument("--seed", type=int, help="Override every seed")
        sub.add_argument("--label-column", help="Label column name")
        return sub

    for name, help_text in (
        ("train", "Train an MIAE or MIAEFS model"),
        ("arch-sweep", "Train and score one model per architecture"),
        ("run", "Full pipeline: train, encode, evaluate, quality, sweep"),
    ):
        sub = verb(name, help_text, config=True)
        sub.add_argument("--beta", type=float, help="Share of ranked features kept")
        sub.add_argument("--normal-class", help="Benign class name for FAR/MDR")

    sub = verb("encode", "Write the latent representation of a dataset")
    sub.add_argument("--model", required=True, help="Model file")
    sub.add_argument("--data", required=True, help="Dataset CSV")
    sub.add_argument("--beta", type=float, help="Keep the top beta share (miaefs)")

    sub = verb("evaluate", "Grid-search a classifier and report test metrics")
    sub.add_argument("--train", required=True, help="Training representation CSV")
    sub.add_argument("--test", required=True, help="Test representation CSV")
    sub.add_argument("--normal-class", help="Benign class name for FAR/MDR")

    sub = verb("quality", "Between/within-class quality of a representation")
    sub.add_argument("--data", required=True, help="Representation CSV")

    sub = verb("sweep", "Metrics for each retained feature count")
    sub.add_argument("--model", required=True, help="MIAEFS model file")
    sub.add_argument("--train", required=True, help="Training dataset CSV")
    sub.add_argument("--test", required=True, help="Test dataset CSV")
    sub.add_argument("--normal-class", help="Benign class name for FAR/MDR")
    group = sub.add_mutually_exclusive_group()
    group.add_argument("--ks", type=_int_list, help="Feature counts, e.g. 1,2,5")
    group.add_argument("--betas", type=_float_list, help="Betas, e.g. 0.1,0.5,0.9")

    sub = verb("reconstruct", "Reconstruct rows from their top-beta latent features")
    sub.add_argument("--model", required=True, help="MIAEFS model file")
    sub.add_argument("--data", required=True, help="Dataset CSV")
    sub.add_argument("--beta", type=float, required=True, help="Share of ranked features kept")

    sub = verb("rank", "Write latent feature importance scores")
    sub.add_argument("--model", required=True, help="MIAEFS model file")

    return parser


def _classifier_spec(args) -> GridSearchSpec:
    spec = load_config(args.config).classifier if args.config else GridSearchSpec()
    if args.seed is not None:
        spec = GridSearchSpec.model_validate({**spec.model_dump(), "seed": args.seed})
    return spec


def _normal_class(args) -> Optional[str]:
    if args.normal_class is not None:
        return args.normal_class
    if args.config:
        return load_config(args.config).dataset.normal_class
    return None


def dispatch(args) -> None:
    out = args.out or "output"
    label = args.label_column or "label"

    if args.command in ("train", "arch-sweep", "run"):
        config = with_overrides(
            load_config(args.config),
            seed=args.seed,
            beta=args.beta,
            out=args.out,
            label_column=args.label_column,
            normal_class=args.normal_class,
        )
        {"train": cmd_train, "arch-sweep": cmd_arch_sweep, "run": cmd_run}[args.command](config)
    elif args.command == "encode":
        cmd_encode(args.model, args.data, out, label, beta=args.beta)
    elif args.command == "evaluate":
        cmd_evaluate(args.train, args.test, out, _classifier_spec(args), _normal_class(args), label)
    elif args.command == "quality":
        cmd_quality(args.data, out, label)
    elif args.command == "sweep":
        cmd_sweep(
            args.model,
            args.train,
            args.test,
            out,
            _classifier_spec(args),
            _normal_class(args),
            label,
            ks=args.ks,
            betas=args.betas,
        )
    elif args.command == "reconstruct":
        cmd_reconstruct(args.model, args.data, out, args.beta, label)
    elif args.command == "rank":
        cmd_rank(args.model, out)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging()
    try:
        dispatch(args)
    except MiaeError as e:
        error = ErrorResponse(error=type(e).__name__, detail=str(e))
        print(error.model_dump_json(), file=sys.stderr)
        return 1
    except Exception as e:
        logging.error(f"Unexpected error in {args.command}: {e}", exc_info=True)
        error = ErrorResponse(error="InternalError", detail=str(e))
        print(error.model_dump_json(), file=sys.stderr)
        return 2
    logging.info(f"{args.command} completed")
    return 0


if __name__ == "__main__":
    sys.exit(main())

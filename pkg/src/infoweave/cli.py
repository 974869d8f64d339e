"""Command-line driver for the pipeline and its individual stages.

Exit codes: 0 success, 2 input/file problems, 3 document parse errors,
4 frame validation failures, 5 provider errors, 6 solve/build/render errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .blueprint import BlueprintError, Canvas, default_canvas, make_blueprint
from .docio import (
    DocumentError,
    parse_blueprint,
    parse_frame,
    serialize_blueprint,
    serialize_frame,
    serialize_metrics,
    serialize_ranking,
)
from .model import InvalidFrameError, compute_metrics, parse_layout_kind
from .pipeline import build_frame, collect_icons, run_pipeline
from .placement import PlacementError
from .providers import ProviderConfig, ProviderError, make_provider
from .recommend import score_layouts
from .render import RenderError, render

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_PROVIDER = 5
EXIT_BUILD = 6

ENV_ENDPOINT = "INFOWEAVE_ENDPOINT"
ENV_API_KEY = "INFOWEAVE_API_KEY"
ENV_MODEL = "INFOWEAVE_MODEL"
ENV_ICON_ENDPOINT = "INFOWEAVE_ICON_ENDPOINT"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _provider_config(args: argparse.Namespace) -> ProviderConfig:
    if args.provider == "mock":
        return ProviderConfig(kind="mock", seed=args.seed)
    endpoint = args.endpoint or os.environ.get(ENV_ENDPOINT)
    if not endpoint:
        raise CliError(EXIT_INPUT, f"http provider needs --endpoint or {ENV_ENDPOINT}")
    return ProviderConfig(
        kind="http",
        endpoint=endpoint,
        icon_endpoint=os.environ.get(ENV_ICON_ENDPOINT),
        api_key=os.environ.get(ENV_API_KEY),
        model_name=args.model or os.environ.get(ENV_MODEL),
        timeout=args.timeout,
        seed=args.seed,
    )


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"cannot read {path}: {exc}")


def _write(path: Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8", newline="\n")


def _load_frame(path: str):
    try:
        return parse_frame(_read_text(path))
    except DocumentError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}")


def _canvas(args: argparse.Namespace, layout) -> Canvas:
    if args.width and args.height:
        return Canvas(float(args.width), float(args.height))
    if args.width or args.height:
        raise CliError(EXIT_INPUT, "--width and --height must be given together")
    return default_canvas(layout)


def _add_provider_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--provider", choices=["mock", "http"], default="mock")
    parser.add_argument("--seed", type=int, default=0, help="mock provider seed")
    parser.add_argument("--endpoint", help=f"http provider endpoint (or {ENV_ENDPOINT})")
    parser.add_argument("--model", help=f"http provider model name (or {ENV_MODEL})")
    parser.add_argument("--timeout", type=float, default=30.0)


def _add_canvas_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--width", type=float, help="canvas width in pixels")
    parser.add_argument("--height", type=float, help="canvas height in pixels")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="infoweave", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_extract = sub.add_parser("extract", help="turn raw text into a storyframe document")
    p_extract.add_argument("input", help="plain-text source file")
    p_extract.add_argument("--goal", required=True)
    p_extract.add_argument("-o", "--output", help="output path (default: stdout)")
    _add_provider_flags(p_extract)

    p_metrics = sub.add_parser("metrics", help="print the scoring metrics of a storyframe")
    p_metrics.add_argument("frame", help="storyframe document")

    p_recommend = sub.add_parser("recommend", help="rank the six layouts for a storyframe")
    p_recommend.add_argument("frame", help="storyframe document")
    p_recommend.add_argument("--explain", action="store_true", help="print the firing rules")
    p_recommend.add_argument("-o", "--output", help="output path (default: stdout)")

    p_blueprint = sub.add_parser("blueprint", help="solve a blueprint for a storyframe")
    p_blueprint.add_argument("frame", help="storyframe document")
    p_blueprint.add_argument("--layout", help="layout kind (default: recommender's top pick)")
    p_blueprint.add_argument("-o", "--output", help="output path (default: stdout)")
    _add_canvas_flags(p_blueprint)

    p_render = sub.add_parser("render", help="render a storyframe against a blueprint")
    p_render.add_argument("frame", help="storyframe document")
    p_render.add_argument("blueprint", help="blueprint document")
    p_render.add_argument("-o", "--output", help="output path (default: stdout)")
    _add_provider_flags(p_render)

    p_pipeline = sub.add_parser("pipeline", help="extract, recommend, solve, and render in one run")
    p_pipeline.add_argument("input", help="plain-text source file")
    p_pipeline.add_argument("--goal", required=True)
    p_pipeline.add_argument("--layout", help="layout kind override")
    p_pipeline.add_argument("--out-dir", default=".", help="directory for the four output files")
    p_pipeline.add_argument("--explain", action="store_true", help="print the firing rules")
    _add_provider_flags(p_pipeline)
    _add_canvas_flags(p_pipeline)

    p_serve = sub.add_parser("serve", help="run the project service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8040, help="0 picks a free port")
    p_serve.add_argument("--data-dir", default="./infoweave-data")
    _add_provider_flags(p_serve)

    return parser


def _emit(args: argparse.Namespace, content: str) -> None:
    if getattr(args, "output", None):
        _write(Path(args.output), content)
    else:
        sys.stdout.write(content)


def _explain(ranking) -> str:
    lines = [f"{f.rule_id}→{f.layout.value}" for f in ranking.firings]
    return "\n".join(lines) + ("\n" if lines else "")


def _cmd_extract(args: argparse.Namespace) -> int:
    provider = make_provider(_provider_config(args))
    frame = build_frame(_read_text(args.input), args.goal, provider, seed=args.seed)
    _emit(args, serialize_frame(frame))
    return EXIT_OK


def _cmd_metrics(args: argparse.Namespace) -> int:
    frame = _load_frame(args.frame)
    sys.stdout.write(serialize_metrics(compute_metrics(frame)))
    return EXIT_OK


def _cmd_recommend(args: argparse.Namespace) -> int:
    frame = _load_frame(args.frame)
    ranking = score_layouts(compute_metrics(frame))
    if args.explain:
        sys.stdout.write(_explain(ranking))
    _emit(args, serialize_ranking(ranking))
    return EXIT_OK


def _cmd_blueprint(args: argparse.Namespace) -> int:
    frame = _load_frame(args.frame)
    if args.layout:
        layout = parse_layout_kind(args.layout)
    else:
        layout = score_layouts(compute_metrics(frame)).top
    blueprint = make_blueprint(frame, layout, canvas=_canvas(args, layout))
    _emit(args, serialize_blueprint(blueprint))
    return EXIT_OK


def _cmd_render(args: argparse.Namespace) -> int:
    frame = _load_frame(args.frame)
    try:
        blueprint, overrides = parse_blueprint(_read_text(args.blueprint))
    except DocumentError as exc:
        raise CliError(EXIT_PARSE, f"{args.blueprint}: {exc}")
    provider = make_provider(_provider_config(args))
    assets = collect_icons(frame, provider)
    svg = render(frame, blueprint, frame.stylization, assets, overrides=overrides)
    _emit(args, svg)
    return EXIT_OK


def _cmd_pipeline(args: argparse.Namespace) -> int:
    provider = make_provider(_provider_config(args))
    layout = parse_layout_kind(args.layout) if args.layout else None
    text = _read_text(args.input)
    canvas = None
    if args.width or args.height:
        if not (args.width and args.height):
            raise CliError(EXIT_INPUT, "--width and --height must be given together")
        canvas = Canvas(float(args.width), float(args.height))
    result = run_pipeline(text, args.goal, provider, layout=layout, canvas=canvas, seed=args.seed)

    out_dir = Path(args.out_dir)
    _write(out_dir / "storyframe.json", serialize_frame(result.frame))
    _write(out_dir / "ranking.json", serialize_ranking(result.ranking))
    _write(out_dir / "blueprint.json", serialize_blueprint(result.blueprint))
    _write(out_dir / "infographic.svg", result.svg)
    if args.explain:
        sys.stdout.write(_explain(result.ranking))
    for warning in result.warnings:
        sys.stderr.write(f"warning: {warning}\n")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import socket

    import uvicorn

    from .service import ServiceSettings, create_app

    port = args.port
    if port == 0:
        with socket.socket() as probe:
            probe.bind((args.host, 0))
            port = probe.getsockname()[1]

    app = create_app(ServiceSettings(data_dir=Path(args.data_dir), provider_config=_provider_config(args)))
    sys.stdout.write(f"SERVICE_LISTENING host={args.host} port={port}\n")
    sys.stdout.flush()
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return EXIT_OK


_COMMANDS = {
    "extract": _cmd_extract,
    "metrics": _cmd_metrics,
    "recommend": _cmd_recommend,
    "blueprint": _cmd_blueprint,
    "render": _cmd_render,
    "pipeline": _cmd_pipeline,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except DocumentError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except InvalidFrameError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except ProviderError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PROVIDER
    except (BlueprintError, PlacementError, RenderError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_BUILD
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

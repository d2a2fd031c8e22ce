"""Command line entry points: serve the API, report a session, run the demo."""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from .config import ServiceConfig
from .errors import CatalystError
from .llm import ProviderConfig
from .store import SessionStore


def _add_data_dir(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--data-dir",
        type=Path,
        default=None,
        help="session snapshot directory (default: CC_DATA_DIR or ./data)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="concept-catalyst",
        description="Authoring service for LLM-assisted scaffolding questions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the HTTP API (and UI, if bundled)")
    p_serve.add_argument("--bind", default=None, help="host:port (default: CC_BIND or 127.0.0.1:8080)")
    _add_data_dir(p_serve)

    p_report = sub.add_parser(
        "report", help="write questions.txt/.pdf/.csv and concept_map.png for a session"
    )
    p_report.add_argument("session_id")
    p_report.add_argument("--out-dir", type=Path, default=Path("report"))
    p_report.add_argument(
        "--timestamp",
        default=None,
        help="ISO timestamp to embed instead of now (reproducible output)",
    )
    _add_data_dir(p_report)

    p_sessions = sub.add_parser("sessions", help="list session ids in the data directory")
    _add_data_dir(p_sessions)

    p_demo = sub.add_parser(
        "demo", help="run a scripted authoring session against the mock provider"
    )
    p_demo.add_argument("--out-dir", type=Path, default=Path("demo-report"))
    _add_data_dir(p_demo)

    return parser


def _config(args: argparse.Namespace) -> ServiceConfig:
    cfg = ServiceConfig.from_env()
    if getattr(args, "data_dir", None):
        cfg.data_dir = args.data_dir
    if getattr(args, "bind", None):
        host, _, port = args.bind.rpartition(":")
        cfg.host = host or "127.0.0.1"
        cfg.port = int(port)
    return cfg


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app

    cfg = _config(args)
    cfg.ensure_data_dir()
    app = create_app(cfg)
    try:
        uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="info")
    except SystemExit as exc:  # uvicorn exits nonzero on bind failure
        return int(exc.code or 1)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    from .report import write_report

    cfg = _config(args)
    store = SessionStore(cfg.data_dir)
    generated_at = (
        datetime.fromisoformat(args.timestamp).astimezone(timezone.utc)
        if args.timestamp
        else None
    )
    paths = write_report(
        store,
        args.session_id,
        args.out_dir,
        include_summary=cfg.export_include_summary,
        page_size=cfg.page_size,
        generated_at=generated_at,
    )
    for path in paths:
        print(path)
    return 0


def cmd_sessions(args: argparse.Namespace) -> int:
    cfg = _config(args)
    store = SessionStore(cfg.data_dir)
    for sid in store.session_ids():
        state = store.get_session(sid)
        print(
            f"{sid}  stage={state.stage.value}  concepts={len(state.graph.concepts)}"
            f"  groups={len(state.groups)}  bank={len(state.bank())}"
        )
    return 0


def cmd_demo(args: argparse.Namespace) -> int:
    """Author one full session programmatically, then write its report."""
    from . import graph, ingest, synthesis
    from .report import write_report

    cfg = _config(args)
    if cfg.provider.kind != "mock":
        cfg.provider = ProviderConfig(kind="mock", seed=cfg.provider.seed)
    store = SessionStore(cfg.data_dir)
    state = store.create_session()
    sid = state.id

    summary = (
        "Students design and build a cardboard bridge that spans 40 centimeters and "
        "holds a 1 kilogram load. Teams sketch designs, compare trusses and beams, "
        "test prototypes, and iterate after each failure."
    )
    ingest.set_summary_text(store, sid, summary)
    ingest.approve_summary(store, sid)

    spans = [(0, 8), (25, 41), (53, 72), (81, 97)]
    concepts = [graph.create_concept_from_highlight(store, sid, s, e) for s, e in spans]
    concepts.append(graph.create_custom_concept(store, sid, "trade-offs"))
    for i, concept in enumerate(concepts):
        graph.place_concept(store, sid, concept.id, 120.0 + 90.0 * i, 80.0 + 40.0 * (i % 2))
    graph.connect_concepts(store, sid, concepts[0].id, concepts[1].id)
    graph.connect_concepts(store, sid, concepts[1].id, concepts[2].id)
    graph.connect_concepts(store, sid, concepts[3].id, concepts[4].id)

    group_a = synthesis.create_group(store, sid)
    for concept in concepts[:2]:
        synthesis.toggle_concept_in_group(store, sid, group_a.id, concept.id)
    group_b = synthesis.create_group(store, sid)
    for concept in concepts[2:]:
        synthesis.toggle_concept_in_group(store, sid, group_b.id, concept.id)

    questions = []
    for gid in (group_a.id, group_b.id):
        questions.extend(synthesis.generate_questions(store, sid, gid, cfg.provider, cfg.questions_per_group))
    for q in questions[:-2]:
        synthesis.review_question(store, sid, q.id, "accept")
    for q in questions[-2:]:
        synthesis.review_question(store, sid, q.id, "reject")

    paths = write_report(
        store,
        sid,
        args.out_dir,
        include_summary=cfg.export_include_summary,
        page_size=cfg.page_size,
        generated_at=datetime(2026, 1, 1, tzinfo=timezone.utc),
    )
    print(json.dumps({"session_id": sid, "bank_size": len(store.get_session(sid).bank())}))
    for path in paths:
        print(path)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "serve": cmd_serve,
        "report": cmd_report,
        "sessions": cmd_sessions,
        "demo": cmd_demo,
    }
    try:
        return handlers[args.command](args)
    except CatalystError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

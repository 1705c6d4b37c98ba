"""Command-line interface.

Machine-readable results go to stdout, diagnostics to stderr.  Exit codes:
0 success, 1 data error, 2 backend error.  The global --seed flag threads
into the mock backend so every run is reproducible.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .backends import BackendConfig, create_backend, generate_reply, sample_emotions
from .codec import ConversationTurn
from .datasets import read_corpus, read_dialogues
from .emotions import argmax_emotion
from .errors import (
    AllSamplesDiscardedError,
    BackendUnavailableError,
    DataError,
    EmoprofileError,
)
from .metrics import (
    KL_ANCHOR_CANDIDATE,
    KL_CANDIDATE_ANCHOR,
    distance_table,
    distance_table_json,
    pairwise_matrix,
    render_distance_table,
    rows_to_csv,
)
from .references import (
    CorpusPost,
    ReferenceRegistry,
    build_reference,
    load_registry,
    post_embedding,
    save_registry,
    uniform_reference,
)
from .screening import (
    evaluate_emotion_classification,
    evaluate_screening,
    render_classification_report,
    render_screening_report,
    screen,
)
from .sessions import SessionStore

_POLARITY_ALIASES = {"pos": "positive", "neg": "negative"}


def _polarity(value: str) -> str:
    return _POLARITY_ALIASES.get(value, value)


def _add_backend_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--backend", choices=["mock", "remote"], default="mock")
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="mock backend RNG seed (also accepted before the subcommand)")
    parser.add_argument("--endpoint", help="remote backend URL (or set EMOPROFILE_ENDPOINT)")
    parser.add_argument("--samples-per-prompt", type=int, default=10)
    parser.add_argument("--top-k", type=int, default=10)
    parser.add_argument("--temperature", type=float, default=1.0)
    parser.add_argument("--timeout-ms", type=int, default=30_000)
    parser.add_argument("--max-retries", type=int, default=2)
    parser.add_argument("--max-history-turns", type=int, default=None)


def _backend_from_args(args: argparse.Namespace):
    config = BackendConfig(
        kind=args.backend,
        endpoint=args.endpoint,
        top_k=args.top_k,
        samples_per_prompt=args.samples_per_prompt,
        temperature=args.temperature,
        timeout_ms=args.timeout_ms,
        max_retries=args.max_retries,
        max_history_turns=args.max_history_turns,
        seed=args.seed,
    )
    return create_backend(config)


def _kl_direction_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--kl-direction",
        choices=[KL_CANDIDATE_ANCHOR, KL_ANCHOR_CANDIDATE],
        default=KL_CANDIDATE_ANCHOR,
        help="argument order for KL rows (candidate-anchor computes kl(reference, anchor))",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emoprofile")
    parser.add_argument("--seed", type=int, default=0, help="mock backend RNG seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-ref", help="build a reference profile from a corpus")
    p.add_argument("--name", required=True)
    p.add_argument("--polarity", required=True, type=_polarity,
                   choices=["positive", "negative", "unused"])
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--samples-per-segment", type=int, default=10)
    p.add_argument("--per-segment-normalize", action="store_true",
                   help="normalize each segment before summing (variant aggregation)")
    p.add_argument("--min-post-chars", type=int, default=20)
    p.add_argument("--max-post-chars", type=int, default=10_000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--source", default="")
    p.add_argument("--include-uniform", action="store_true",
                   help="also add the built-in uniform control reference")
    _add_backend_args(p)
    p.set_defaults(func=cmd_build_ref)

    p = sub.add_parser("screen", help="screen a single post")
    p.add_argument("--registry", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--text")
    group.add_argument("--input", help="JSONL/CSV of posts; screens each line")
    p.add_argument("--include-all-references", action="store_true")
    _kl_direction_arg(p)
    _add_backend_args(p)
    p.set_defaults(func=cmd_screen)

    p = sub.add_parser("eval", help="evaluation harnesses")
    eval_sub = p.add_subparsers(dest="eval_command", required=True)

    ps = eval_sub.add_parser("screening", help="binary screening metrics over a labeled corpus")
    ps.add_argument("--dataset", required=True)
    ps.add_argument("--registry", required=True)
    ps.add_argument("--positive-label", default="positive")
    ps.add_argument("--negative-label", default="negative")
    ps.add_argument("--checkpoint")
    ps.add_argument("--include-all-references", action="store_true")
    ps.add_argument("--json", action="store_true", dest="as_json")
    _kl_direction_arg(ps)
    _add_backend_args(ps)
    ps.set_defaults(func=cmd_eval_screening)

    pe = eval_sub.add_parser("emotions", help="emotion prediction accuracy on dialogue sets")
    pe.add_argument("--dataset", required=True)
    pe.add_argument("--json", action="store_true", dest="as_json")
    _add_backend_args(pe)
    pe.set_defaults(func=cmd_eval_emotions)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--registry")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--session-dir", help="JSONL event-log directory for session recovery")
    p.add_argument("--ui-dir", help="static chat UI build to serve at /ui")
    p.add_argument("--config", help="JSON config file; flags and env vars override it")
    _add_backend_args(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("export-distances", help="distance table against an anchor reference")
    p.add_argument("--registry", required=True)
    p.add_argument("--anchor", help="anchor reference name (required unless --pairwise)")
    p.add_argument("--format", choices=["table", "csv", "json"], default="table")
    p.add_argument("--pairwise", action="store_true",
                   help="export the full reference-vs-reference matrix as JSON")
    _kl_direction_arg(p)
    p.set_defaults(func=cmd_export_distances)

    p = sub.add_parser("repl", help="interactive chat loop against a backend")
    p.add_argument("--registry")
    p.add_argument("--export", help="where to write the session export on EOF")
    _add_backend_args(p)
    p.set_defaults(func=cmd_repl)

    return parser


def cmd_build_ref(args: argparse.Namespace) -> int:
    backend = _backend_from_args(args)
    corpus = read_corpus(args.corpus)
    out_path = Path(args.out)
    registry = load_registry(out_path) if out_path.exists() else ReferenceRegistry()
    ref = build_reference(
        args.name,
        args.polarity,
        corpus,
        backend,
        samples_per_segment=args.samples_per_segment,
        normalize_per_segment=args.per_segment_normalize,
        min_post_chars=args.min_post_chars,
        max_post_chars=args.max_post_chars,
        workers=args.workers,
        source=args.source or str(args.corpus),
    )
    registry.add(ref)
    if args.include_uniform and "uniform" not in registry:
        registry.add(uniform_reference())
    save_registry(out_path, registry)
    print(json.dumps({
        "name": ref.name,
        "polarity": ref.polarity,
        "post_count": ref.post_count,
        "segment_count": ref.segment_count,
        "sampled": ref.sampled_count,
        "discarded": ref.discarded_count,
        "out": str(out_path),
    }))
    return 0


def cmd_screen(args: argparse.Namespace) -> int:
    backend = _backend_from_args(args)
    registry = load_registry(args.registry)
    if args.text is not None:
        posts = [CorpusPost(id="stdin", text=args.text)]
    else:
        posts = read_corpus(args.input)
    for post in posts:
        embedding = post_embedding(post, backend)
        result = screen(
            embedding,
            registry,
            include_unused=args.include_all_references,
            kl_direction=args.kl_direction,
        )
        doc = result.to_json()
        doc["id"] = post.id
        print(json.dumps(doc))
    return 0


def cmd_eval_screening(args: argparse.Namespace) -> int:
    backend = _backend_from_args(args)
    registry = load_registry(args.registry)
    posts = read_corpus(args.dataset)
    dataset = []
    for post in posts:
        if post.label == args.positive_label:
            dataset.append((post, "positive"))
        elif post.label == args.negative_label:
            dataset.append((post, "negative"))
        else:
            print(f"skipping post {post.id}: unknown label {post.label!r}", file=sys.stderr)
    report = evaluate_screening(
        dataset,
        registry,
        backend,
        include_unused=args.include_all_references,
        kl_direction=args.kl_direction,
        checkpoint_path=args.checkpoint,
    )
    if args.as_json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(render_screening_report(report))
    return 0


def cmd_eval_emotions(args: argparse.Namespace) -> int:
    backend = _backend_from_args(args)
    conversations = read_dialogues(args.dataset)
    report = evaluate_emotion_classification(conversations, backend)
    if args.as_json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(render_classification_report(report.prompt_level, "individual prompts"))
        print()
        print(render_classification_report(report.conversation_level, "conversations"))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    settings = {}
    if args.config:
        settings = json.loads(Path(args.config).read_text(encoding="utf-8"))
    # Precedence: explicit flag, then environment, then config file, then default.
    registry_path = (
        args.registry or os.environ.get("EMOPROFILE_REGISTRY") or settings.get("registry")
    )
    port = int(args.port or os.environ.get("EMOPROFILE_PORT") or settings.get("port") or 8000)
    host = args.host or settings.get("host") or "127.0.0.1"
    endpoint = args.endpoint or os.environ.get("EMOPROFILE_ENDPOINT") or settings.get("endpoint")
    kind = settings.get("backend", "mock") if args.backend == "mock" else args.backend
    config = BackendConfig(
        kind=kind,
        endpoint=endpoint,
        samples_per_prompt=args.samples_per_prompt,
        top_k=args.top_k,
        temperature=args.temperature,
        timeout_ms=args.timeout_ms,
        max_retries=args.max_retries,
        max_history_turns=args.max_history_turns,
        seed=args.seed,
    )
    backend = create_backend(config)
    registry = load_registry(registry_path) if registry_path else None
    store = SessionStore(args.session_dir or settings.get("session_dir"))
    ui_dir = args.ui_dir or settings.get("ui_dir")
    app = create_app(backend, registry, store=store, ui_dir=ui_dir)
    print(f"serving on http://{host}:{port}", file=sys.stderr)
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


def cmd_export_distances(args: argparse.Namespace) -> int:
    registry = load_registry(args.registry)
    pairs = [(r.name, r.distribution) for r in registry.all()]
    if args.pairwise:
        print(json.dumps(pairwise_matrix(pairs, kl_direction=args.kl_direction), indent=2))
        return 0
    if not args.anchor:
        raise DataError("--anchor is required unless --pairwise is set")
    anchor = registry.get(args.anchor)
    if anchor is None:
        raise DataError(f"anchor {args.anchor!r} not in registry")
    rows = distance_table(anchor.distribution, pairs, kl_direction=args.kl_direction)
    if args.format == "csv":
        sys.stdout.write(rows_to_csv(rows))
    elif args.format == "json":
        print(distance_table_json(rows))
    else:
        print(render_distance_table(rows))
    return 0


def cmd_repl(args: argparse.Namespace) -> int:
    backend = _backend_from_args(args)
    registry = load_registry(args.registry) if args.registry else None
    store = SessionStore()
    session = store.create()
    print(f"session {session.id}; empty line re-prompts, EOF exits", file=sys.stderr)
    while True:
        print("> ", end="", file=sys.stderr, flush=True)
        line = sys.stdin.readline()
        if not line:
            break
        text = line.strip()
        if not text:
            continue
        try:
            history = session.completed_turns()
            samples = sample_emotions(backend, history, text)
            emotion = argmax_emotion(samples)
            reply = generate_reply(backend, history, text, emotion)
        except (BackendUnavailableError, AllSamplesDiscardedError) as exc:
            print(f"backend error: {exc}", file=sys.stderr)
            continue
        store.add_turn(session.id, ConversationTurn(text, emotion, reply), samples)
        profile = session.profile()
        top = sorted(profile.distribution.as_mapping().items(), key=lambda kv: -kv[1])[:5]
        print(f"emotion: {emotion}")
        print(f"reply: {reply}")
        print("profile: " + ", ".join(f"{label} {weight:.2f}" for label, weight in top))
        if registry is not None:
            result = screen(profile, registry)
            print(f"screening: {result.combined_label}")
    export_path = Path(args.export) if args.export else Path(f"session-{session.id}.json")
    export_path.write_text(json.dumps(session.export(), indent=2), encoding="utf-8")
    print(f"session export written to {export_path}", file=sys.stderr)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BackendUnavailableError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return 2
    except (EmoprofileError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

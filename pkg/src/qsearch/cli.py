"""Command-line interface.

Subcommands: gen, order, sweep, session, online, check, serve. Every
randomised command is a pure function of its flags and --seed; re-running
with identical arguments writes byte-identical files. Entropy values and
budgets are in nats (natural log), echoed in output headers.

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import __version__
from .constraints import ConstraintSet, load_queries, save_queries
from .errors import QSearchError
from .gallery import (
    GalleryConfig,
    default_schema,
    generate_gallery,
    load_gallery,
    save_gallery,
    truthful_queries,
)
from .online import load_stream, online_search, report_to_csv
from .ordering import (
    brute_force_oracle,
    check_submodularity,
    greedy_order,
    load_sequence,
    save_sequence,
)
from .scorer import ScorerSpec
from .session import (
    abort_session,
    simulate_session,
    start_session,
    submit_answer,
    sweep_budgets,
    sweep_to_csv,
)

__all__ = ["main"]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    parser.add_argument("--scorer", choices=["ideal", "noisy"], default="ideal")
    parser.add_argument("--epsilon", type=float, default=0.1, help="noisy scorer error rate")
    parser.add_argument(
        "--tie", choices=["expected", "optimistic", "pessimistic"], default="expected"
    )
    parser.add_argument(
        "--log-base", choices=["e"], default="e",
        help="entropy log base; only natural log is supported",
    )


def _scorer(args: argparse.Namespace) -> ScorerSpec:
    if args.scorer == "noisy":
        return ScorerSpec("noisy", epsilon=args.epsilon)
    return ScorerSpec("ideal")


def _parse_order(value: str) -> list[int]:
    try:
        return [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise QSearchError(f"--order expects comma-separated integers, got {value!r}") from None


def _resolve_order(args: argparse.Namespace, gallery) -> list[int]:
    if getattr(args, "sequence", None):
        return list(load_sequence(args.sequence).order)
    if getattr(args, "order", None):
        return _parse_order(args.order)
    return list(gallery.schema.question_ids)


def _echo_config(args: argparse.Namespace, command: str) -> None:
    fields = {k: v for k, v in sorted(vars(args).items()) if k != "func" and v is not None}
    print(f"# qsearch {command} version={__version__} log_base=e {json.dumps(fields, default=str)}")


def _cmd_gen(args: argparse.Namespace) -> int:
    weights = None
    if args.weights:
        raw = json.loads(args.weights)
        weights = {int(k): [float(w) for w in v] for k, v in raw.items()}
    config = GalleryConfig(
        n=args.n, n_identities=args.identities, schema=default_schema(),
        value_distributions=weights,
    )
    gallery = generate_gallery(config, args.seed)
    save_gallery(gallery, args.out)
    _echo_config(args, "gen")
    print(f"wrote gallery: n={gallery.n} identities={gallery.n_identities} -> {args.out}")
    if args.queries_out:
        identities = list(range(1, gallery.n_identities + 1))[: args.num_queries]
        save_queries(truthful_queries(gallery, identities), args.queries_out, seed=args.seed)
        print(f"wrote {len(identities)} truthful queries -> {args.queries_out}")
    return 0


def _cmd_order(args: argparse.Namespace) -> int:
    gallery = load_gallery(args.gallery)
    queries = load_queries(args.queries)
    scorer = _scorer(args)
    sequence = greedy_order(queries, gallery, scorer, args.tie)
    extra = None
    if args.oracle == "brute":
        oracle = brute_force_oracle(queries, gallery, scorer, args.tie, mode="best_sequence")
        extra = {
            "oracle": {
                "mode": "best_sequence",
                "order": list(oracle.order),
                "mean_rank_curve": list(oracle.mean_rank_curve),
            }
        }
    save_sequence(sequence, args.out, scorer, args.tie, seed=args.seed, extra=extra)
    _echo_config(args, "order")
    print(f"greedy order: {list(sequence.order)} curve={list(sequence.mean_rank_curve)}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    gallery = load_gallery(args.gallery)
    queries = load_queries(args.queries)
    order = _resolve_order(args, gallery)
    budgets = [float(b) for b in args.budgets.split(",") if b.strip()]
    rows = sweep_budgets(
        gallery, _scorer(args), order, queries, budgets,
        answer_noise=args.delta, seed=args.seed, tie_policy=args.tie, k_display=args.k,
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(sweep_to_csv(rows))
    _echo_config(args, "sweep")
    for row in rows:
        print(f"budget={row.budget} mean_rank={row.mean_rank} total_queries={row.total_queries}")
    return 0


def _print_topk(state) -> None:
    scores = state.affinities
    for image_id in state.topk():
        record = state.gallery.record(image_id)
        score = scores[image_id - 1] if scores is not None else 1.0
        values = ", ".join(
            f"{state.gallery.schema.facet(fid).name}={tok}"
            for fid, tok in sorted(record.facet_values.items())
        )
        print(f"  #{image_id} (identity {record.identity}, score {score:.4f}): {values}")


def _run_interactive(args: argparse.Namespace, gallery, order) -> int:
    state = start_session(
        gallery, _scorer(args), order, args.budget, k_display=args.k,
        target_identity=args.target, seed=args.seed,
    )
    print("answer each question by picking one option per facet (blank = unknown, q = abort)")
    while not state.done:
        question = gallery.schema.question(state.pending_question)
        print(f"\nQ{question.id}: {question.prompt}")
        answer: dict[int, str] = {}
        aborted = False
        for fid in question.facet_ids:
            facet = gallery.schema.facet(fid)
            options = " ".join(f"[{i + 1}] {tok}" for i, tok in enumerate(facet.domain))
            try:
                line = input(f"  {facet.name}: {options} > ").strip()
            except EOFError:
                line = "q"
            if line.lower() == "q":
                aborted = True
                break
            if line:
                try:
                    choice = int(line)
                except ValueError:
                    print("  (not a number, treated as unknown)")
                    continue
                if 1 <= choice <= len(facet.domain):
                    answer[fid] = facet.domain[choice - 1]
        if aborted:
            abort_session(state)
            break
        submit_answer(state, ConstraintSet.of(answer) if answer else ConstraintSet.empty())
        print(f"entropy: {state.entropy_trace[-1]:.4f} nats (budget {state.budget})")
        _print_topk(state)
    print(f"\nsession done: {state.stop_reason} after {len(state.asked)} question(s)")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(state.transcript.to_jsonl())
        print(f"wrote transcript -> {args.out}")
    return 0


def _cmd_session(args: argparse.Namespace) -> int:
    gallery = load_gallery(args.gallery)
    order = _resolve_order(args, gallery)
    _echo_config(args, "session")
    if args.interactive:
        return _run_interactive(args, gallery, order)
    if args.target is None:
        raise QSearchError("--simulate requires --target")
    transcript = simulate_session(
        gallery, _scorer(args), order, args.budget, args.target,
        answer_noise=args.delta, seed=args.seed, k_display=args.k,
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(transcript.to_jsonl())
    answered = sum(1 for e in transcript.events if e["event"] == "answer")
    rank = transcript.final_rank.rank if transcript.final_rank else float("nan")
    print(f"simulated session: {transcript.stop_reason()} after {answered} question(s), "
          f"final rank {rank}")
    if args.out:
        print(f"wrote transcript -> {args.out}")
    return 0


def _cmd_online(args: argparse.Namespace) -> int:
    from .online import PoiDescription

    stream = load_stream(args.stream)
    queries = load_queries(args.queries)
    descriptions = [
        PoiDescription(
            poi_id=q.target_identity,
            constraints=q.fused(sorted(q.answers)),
        )
        for q in queries
    ]
    report = online_search(
        stream, descriptions, _scorer(args), threshold=args.threshold,
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(report_to_csv(report))
    _echo_config(args, "online")
    for frame, size, counts in report.frame_counts():
        print(f"frame={frame} gallery={size} top1={counts.get(1, 0)} top10={counts.get(10, 0)}")
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    if not args.submodularity:
        raise QSearchError("check requires --submodularity")
    gallery = load_gallery(args.gallery)
    queries = load_queries(args.queries)
    violations = check_submodularity(
        gallery, queries, trials=args.trials, seed=args.seed,
        scorer=_scorer(args), tie_policy=args.tie,
    )
    doc = {
        "version": __version__,
        "seed": args.seed,
        "trials": args.trials,
        "scorer": _scorer(args).to_json(),
        "violations": [dataclasses.asdict(v) for v in violations],
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    _echo_config(args, "check")
    print(f"trials={args.trials} violations={len(violations)}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    serve(port=args.port, host=args.host, transcript_dir=args.transcripts_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsearch", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qsearch {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic gallery (and optional truthful queries)")
    p.add_argument("--n", type=int, required=True, help="number of records")
    p.add_argument("--identities", type=int, required=True, help="number of identities")
    p.add_argument("--out", required=True, help="gallery JSON output path")
    p.add_argument("--weights", help='per-facet weights, e.g. \'{"3": [5,1,1,1,1,1]}\'')
    p.add_argument("--queries-out", help="also write truthful queries here")
    p.add_argument("--num-queries", type=int, default=20, help="queries to write (default 20)")
    _add_common(p)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("order", help="fit a greedy question order to training queries")
    p.add_argument("--gallery", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--oracle", choices=["brute"], help="also run the exhaustive oracle")
    p.add_argument("--out", required=True, help="sequence JSON output path")
    _add_common(p)
    p.set_defaults(func=_cmd_order)

    p = sub.add_parser("sweep", help="sweep uncertainty budgets over simulated sessions")
    p.add_argument("--gallery", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--budgets", required=True, help="comma-separated budgets in nats")
    p.add_argument("--sequence", help="sequence JSON with the question order")
    p.add_argument("--order", help="inline question order, e.g. 2,5,1,3,4")
    p.add_argument("--delta", type=float, default=0.0, help="per-facet answer noise")
    p.add_argument("--k", type=int, default=5, help="top-k snapshot size")
    p.add_argument("--out", required=True, help="CSV output path")
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("session", help="run one session, interactive or simulated")
    p.add_argument("--gallery", required=True)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--interactive", action="store_true")
    mode.add_argument("--simulate", action="store_true")
    p.add_argument("--budget", type=float, required=True, help="uncertainty budget in nats")
    p.add_argument("--sequence", help="sequence JSON with the question order")
    p.add_argument("--order", help="inline question order, e.g. 2,5,1,3,4")
    p.add_argument("--target", type=int, help="target identity (required for --simulate)")
    p.add_argument("--delta", type=float, default=0.0, help="per-facet answer noise")
    p.add_argument("--k", type=int, default=5, help="top-k snapshot size")
    p.add_argument("--out", help="transcript JSONL output path")
    _add_common(p)
    p.set_defaults(func=_cmd_session)

    p = sub.add_parser("online", help="stream frames and match watched descriptions")
    p.add_argument("--stream", required=True, help="frame JSONL input path")
    p.add_argument("--queries", required=True, help="queries whose fused answers to watch")
    p.add_argument("--threshold", type=float, default=0.95, help="minimum match score")
    p.add_argument("--out", required=True, help="CSV output path")
    _add_common(p)
    p.set_defaults(func=_cmd_online)

    p = sub.add_parser("check", help="sample for diminishing-returns violations")
    p.add_argument("--submodularity", action="store_true")
    p.add_argument("--gallery", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--out", help="JSON report output path")
    _add_common(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("serve", help="run the HTTP JSON API")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--transcripts-dir", help="directory for flushed session transcripts")
    _add_common(p)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except QSearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

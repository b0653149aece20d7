"""Command-line interface.

Exit status: 0 for a definite answer, 2 for ``unknown``, 1 for errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .compression import AutoSolver, BfsSolver, CompletionSolver, GrammarSolver, compress, compress_chain, word_equal
from .grammars.automata import Nfa
from .grammars.cfg import Cfg, GrammarTooLarge, accepts, set_production_guard
from .pipeline import build_wp_chain, build_wp_grammar, rational_membership
from .presentations import MARKER, Answer, MonoidPresentation, PresentationError, classify, has_nontrivial_idempotent, spell
from .rewriting import Verdict

EXIT_OK, EXIT_ERROR, EXIT_UNKNOWN = 0, 1, 2


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _presentation(path: str) -> MonoidPresentation:
    return MonoidPresentation.from_text(_read(path))


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print(text)


def cmd_classify(args) -> int:
    p = _presentation(args.presentation)
    info = classify(p)
    lines = [f"{k}: {v}" for k, v in info.as_dict().items()]
    _emit(args, info.as_dict(), "\n".join(lines))
    return EXIT_OK


def cmd_compress(args) -> int:
    p = _presentation(args.presentation)
    if args.chain:
        chain = compress_chain(p)
        text = [f"steps: {len(chain)}"]
        for i, step in enumerate(chain.steps, 1):
            text.append(f"step {i}: alpha = {spell(step.alpha)}; pieces = {', '.join(spell(w) for w in step.sigma)}")
            text.append(f"  {step.target}")
        text.append(f"terminal: {chain.terminal}")
        _emit(args, chain.as_dict(), "\n".join(text))
        return EXIT_OK
    step = compress(p)
    text = f"alpha = {spell(step.alpha)}\npieces = {', '.join(spell(w) for w in step.sigma)}\n{step.target}"
    _emit(args, step.as_dict(), text)
    return EXIT_OK


def _solver(choice: str, maxlen: int):
    if choice == "auto":
        return AutoSolver(maxlen)
    if choice == "completion":
        return CompletionSolver()
    if choice == "bfs":
        return BfsSolver(maxlen)
    if choice.startswith("grammar:"):
        return GrammarSolver(Cfg.from_text(_read(choice[len("grammar:"):])))
    raise PresentationError(f"unknown base solver {choice!r}")


def cmd_eq(args) -> int:
    p = _presentation(args.presentation)
    u, v = p.alphabet.tokenize(args.u), p.alphabet.tokenize(args.v)
    verdict = word_equal(p, u, v, _solver(args.base, args.maxlen))
    _emit(args, {"u": spell(u), "v": spell(v), "verdict": verdict.value}, verdict.value)
    return EXIT_UNKNOWN if verdict is Verdict.UNKNOWN else EXIT_OK


def cmd_build_wp(args) -> int:
    p = _presentation(args.presentation)
    if args.base_wp == "auto":
        _, bundles = build_wp_chain(p)
        bundle = bundles[0]
    else:
        base = Cfg.from_text(_read(args.base_wp))
        bundle = build_wp_grammar(p, base)
    out = bundle.save(Path(args.out))
    (out / "built_wp.cfg").write_text(bundle.built_wp.to_text(), encoding="utf-8")
    manifest = bundle.manifest()
    manifest["directory"] = str(out)
    text = "\n".join([f"wrote {out}"] + [f"  {k}: {v['productions']} productions" for k, v in manifest["stages"].items()])
    _emit(args, manifest, text)
    return EXIT_OK


def _bundle(directory: str) -> tuple[MonoidPresentation, Cfg]:
    d = Path(directory)
    p = MonoidPresentation.from_text(_read(str(d / "presentation.pres")))
    return p, Cfg.from_text(_read(str(d / "built_wp.cfg")))


def cmd_member(args) -> int:
    p, wp = _bundle(args.bundle)
    w = p.alphabet.tokenize(args.word, extra=(MARKER,))
    result = accepts(wp, w)
    _emit(args, {"word": " ".join(w), "member": result}, str(result).lower())
    return EXIT_OK


def cmd_ratmem(args) -> int:
    p, wp = _bundle(args.bundle)
    w = p.alphabet.tokenize(args.word)
    r = Nfa.from_text(_read(args.nfa))
    result = rational_membership(wp, w, r)
    _emit(args, {"word": spell(w), "member": result}, str(result).lower())
    return EXIT_OK


def cmd_idempotent(args) -> int:
    p = _presentation(args.presentation)
    answer = has_nontrivial_idempotent(p, args.bound)
    _emit(args, {"idempotent": answer.value}, answer.value)
    return EXIT_UNKNOWN if answer is Answer.UNKNOWN else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--guard", type=int, default=200_000, help="production guard for grammar stages")

    parser = argparse.ArgumentParser(prog="weakcomp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="special / subspecial / weakly compressible")
    c.add_argument("presentation")
    c.set_defaults(run=cmd_classify)

    c = sub.add_parser("compress", parents=[common], help="one compression step, or the whole chain")
    c.add_argument("presentation")
    c.add_argument("--chain", action="store_true")
    c.set_defaults(run=cmd_compress)

    c = sub.add_parser("eq", parents=[common], help="decide u = v")
    c.add_argument("presentation")
    c.add_argument("u")
    c.add_argument("v")
    c.add_argument("--base", default="auto", help="auto, completion, bfs or grammar:FILE")
    c.add_argument("--maxlen", type=int, default=12, help="length bound for the bounded search")
    c.set_defaults(run=cmd_eq)

    c = sub.add_parser("build-wp", parents=[common], help="build a word-problem grammar bundle")
    c.add_argument("presentation")
    c.add_argument("--base-wp", default="auto", help="grammar file for the compressed monoid, or auto")
    c.add_argument("--out", required=True, help="bundle directory")
    c.set_defaults(run=cmd_build_wp)

    c = sub.add_parser("member", parents=[common], help="is u#v^rev in the bundle's grammar")
    c.add_argument("bundle")
    c.add_argument("word")
    c.set_defaults(run=cmd_member)

    c = sub.add_parser("ratmem", parents=[common], help="rational subset membership")
    c.add_argument("bundle")
    c.add_argument("word")
    c.add_argument("nfa")
    c.set_defaults(run=cmd_ratmem)

    c = sub.add_parser("idempotent", parents=[common], help="non-trivial idempotent test")
    c.add_argument("presentation")
    c.add_argument("--bound", type=int, default=8)
    c.set_defaults(run=cmd_idempotent)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    old = set_production_guard(args.guard)
    try:
        return args.run(args)
    except (GrammarTooLarge, PresentationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    finally:
        set_production_guard(old)


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry points.

Subcommands: gen (write a canonical game script), run (headless session),
verify (delay law / rate bound checks), serve (live WebSocket sessions),
replay (re-run a recorded input trace against its log), analyze (per-block
norms and movement times).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analysis, verify
from .engine import (
    ReplayDivergenceError,
    ReplayHashError,
    SessionConfig,
    SubjectFailure,
    read_log,
    replay,
    run_headless,
    write_log,
)
from .script import GAME_IDS, ScriptError, build_game, read_script, save_script
from .service import ServeConfig, serve
from .subjects import SubjectConfigError, build_subject
from .units import DEFAULT_MAX_ANGLE, DEFAULT_SENSITIVITY


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="steertrack")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="write a canonical game script")
    g.add_argument("--game", required=True, help="1..5 or fitts")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, type=Path)

    r = sub.add_parser("run", help="run a script headlessly with a synthetic subject")
    r.add_argument("--script", required=True, type=Path)
    r.add_argument("--subject", default="noisy-human",
                   help="kind[:k=v,...], e.g. delayed-inverter:T=0.3")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", required=True, type=Path)
    r.add_argument("--mode", choices=("game", "model"), default=None,
                   help="default: script metadata mode, else game")
    r.add_argument("--sensitivity", type=float, default=DEFAULT_SENSITIVITY)
    r.add_argument("--max-angle", type=float, default=DEFAULT_MAX_ANGLE)

    v = sub.add_parser("verify", help="check the delay law / rate bound on this build")
    v.add_argument("what", choices=("delay", "rate"))
    v.add_argument("--max-delay", type=int, default=10, help="delay law: max delay, ticks")
    v.add_argument("--bits", default="1,2", help="rate bound: comma list of bit widths")
    v.add_argument("--horizon", type=int, default=6)

    s = sub.add_parser("serve", help="host live sessions over WebSocket")
    s.add_argument("--script", action="append", required=True, type=Path,
                   help="repeatable; script id is the file stem")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    s.add_argument("--out-dir", type=Path, default=Path("logs"))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--ui", type=Path, default=None, help="static UI directory to mount at /")

    q = sub.add_parser("replay", help="re-run a log's input trace; verify records match")
    q.add_argument("--log", required=True, type=Path)
    q.add_argument("--script", required=True, type=Path)

    a = sub.add_parser("analyze", help="per-block norms (and movement times for fitts)")
    a.add_argument("--log", required=True, type=Path)
    a.add_argument("--script", required=True, type=Path)
    a.add_argument("--trim", type=float, default=analysis.DEFAULT_TRIM_S)
    a.add_argument("--out", type=Path, default=None, help="also export CSV here")
    return p


def _cmd_gen(args) -> int:
    game = int(args.game) if args.game.isdigit() else args.game
    try:
        sched = build_game(game, args.seed)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    save_script(sched, args.out)
    print(f"wrote {args.out} ({len(sched)} rows, {sched.duration_s:g} s)")
    return 0


def _cmd_run(args) -> int:
    try:
        sched = read_script(args.script)
    except ScriptError as e:
        print(f"script error: {e}", file=sys.stderr)
        return 2
    mode = args.mode or ("model" if sched.metadata.get("mode") == "model" else "game")
    try:
        subject = build_subject(args.subject)
    except SubjectConfigError as e:
        print(f"subject error: {e}", file=sys.stderr)
        return 2
    config = SessionConfig(
        schedule=sched, mode=mode, seed=args.seed, subject=args.subject,
        sensitivity=args.sensitivity, max_angle=args.max_angle,
    )
    try:
        log = run_headless(config, subject)
    except SubjectFailure as e:
        path = write_log(e.partial_log, args.out)
        print(f"subject failed: {e}; partial log (marked aborted) at {path}", file=sys.stderr)
        return 3
    except SubjectConfigError as e:
        print(f"subject error: {e}", file=sys.stderr)
        return 2
    path = write_log(log, args.out)
    t, x, _ = log.arrays()
    nm = analysis.norms(x)
    print(f"wrote {path} ({len(log.records)} records)")
    print(f"norms: L1={nm.l1:.6g} L2={nm.l2:.6g} Linf={nm.linf:.6g}")
    print("diagnostics: " + " ".join(f"{k}={v}" for k, v in sorted(log.header.items())
                                     if k in ("late_inputs", "clamped_inputs", "vision_clamps")))
    return 0


def _cmd_verify(args) -> int:
    if args.what == "delay":
        rows = verify.check_delay_law(max_delay_ticks=args.max_delay)
        print("delay  sup|x|  sup|u|  telescoped  seeded_sup|x|  ok")
        for r in rows:
            print(f"{r.delay_ticks:5d}  {r.sup_x:6.3f}  {r.sup_u:6.3f}  "
                  f"{str(r.matches_telescoped):>10}  {r.seeded_sup_x:13.3f}  {r.ok}")
        ok = all(r.ok for r in rows)
        print(f"delay law: {'PASS' if ok else 'FAIL'}")
        return 0 if ok else 1
    bits = [int(b) for b in args.bits.split(",") if b]
    rows = verify.check_rate_certificate(bits_list=bits, horizon=args.horizon)
    print("bits  scale     value     floor     sup|u|   effort_floor(diag)  ok")
    for r in rows:
        print(f"{r.bits:4d}  {r.scale:8.5f}  {r.value:8.5f}  {r.floor:8.5f}  "
              f"{r.sup_u:7.4f}  {r.effort_floor:18.4f}  {r.ok}")
    ok = all(r.ok for r in rows)
    print(f"rate bound: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def _cmd_serve(args) -> int:
    scripts = {}
    for path in args.script:
        try:
            scripts[path.stem] = read_script(path)
        except ScriptError as e:
            print(f"script error in {path}: {e}", file=sys.stderr)
            return 2
    cfg = ServeConfig(scripts=scripts, out_dir=args.out_dir, seed=args.seed, ui_dir=args.ui)
    print(f"serving {sorted(scripts)} on ws://{args.host}:{args.port}/session")
    serve(cfg, host=args.host, port=args.port)
    return 0


def _cmd_replay(args) -> int:
    log = read_log(args.log)
    try:
        sched = read_script(args.script)
    except ScriptError as e:
        print(f"script error: {e}", file=sys.stderr)
        return 2
    try:
        out = replay(log, sched)
    except (ReplayHashError, ReplayDivergenceError) as e:
        print(f"replay: FAIL ({e})", file=sys.stderr)
        return 1
    print(f"replay: exact match ({len(out.records)} records)")
    return 0


def _cmd_analyze(args) -> int:
    log = read_log(args.log)
    try:
        sched = read_script(args.script)
    except ScriptError as e:
        print(f"script error: {e}", file=sys.stderr)
        return 2
    rows = analysis.block_norms(log, sched, trim_s=args.trim)
    print("block  label                      n      L1        L2        Linf")
    for r in rows:
        nm = r.norms
        if nm.n:
            print(f"{r.index:5d}  {r.label:<24} {nm.n:6d}  {nm.l1:8.4f}  {nm.l2:8.4f}  {nm.linf:8.4f}")
        else:
            print(f"{r.index:5d}  {r.label:<24} {nm.n:6d}  {'-':>8}  {'-':>8}  {'-':>8}")
    if args.out:
        analysis.export_block_norms(rows, args.out)
        print(f"wrote {args.out}")
    fitts = sched.fitts
    if fitts:
        moves = analysis.movement_times(log, fitts)
        done = [m.mt_s for m in moves if m.mt_s is not None]
        print(f"movements: {len(moves)} jumps, {len(moves) - len(done)} unreached")
        if done:
            print(f"movement time: mean={sum(done) / len(done):.3f}s "
                  f"min={min(done):.3f}s max={max(done):.3f}s")
        if args.out:
            mpath = args.out.with_suffix(".moves.csv")
            analysis.export_movements(moves, mpath)
            print(f"wrote {mpath}")
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    return {
        "gen": _cmd_gen,
        "run": _cmd_run,
        "verify": _cmd_verify,
        "serve": _cmd_serve,
        "replay": _cmd_replay,
        "analyze": _cmd_analyze,
    }[args.cmd](args)


if __name__ == "__main__":
    sys.exit(main())

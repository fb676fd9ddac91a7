"""Command-line front end.

Subcommands: ``gen`` writes a hash instance file, ``attack`` runs the
kernel-recovery attack and writes a report, ``verify`` re-checks a
report against its instance by pure re-computation, ``audit`` tests the
sampler distribution against the brute-forced support.

Exit codes are a stable contract: 0 success/verified, 1 verification or
audit failure, 2 incomplete attack (unsaturated or trivial kernel),
64 usage or parameter error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import serialize
from .attack import AttackConfig, run_attack
from .errors import ParameterError, ResourceLimitError, ToolkitError
from .hashes import canonical_family, gen_params, hash_eval
from .oracle import distribution_audit, kernel_bruteforce
from .simulator import (
    BACKEND_COSET,
    BACKEND_STATEVECTOR,
    sample_orthogonal,
    write_state_dump,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INCOMPLETE = 2
EXIT_USAGE = 64

_BACKEND_CHOICES = {"statevector": BACKEND_STATEVECTOR, "coset": BACKEND_COSET}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="qcollide", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a hash instance file")
    gen.add_argument(
        "--family",
        required=True,
        help="xor-matrix | xor-crc | kfm | rsa | constant-zero",
    )
    gen.add_argument("--m", type=int, help="input size (bits or vector length)")
    gen.add_argument("--n", type=int, help="output size (bits)")
    gen.add_argument("--p", type=int, help="prime modulus (kfm) or prime factor (rsa)")
    gen.add_argument("--q", type=int, help="prime exponent order (kfm) or factor (rsa)")
    gen.add_argument("--e", type=int, help="power-map exponent (rsa)")
    gen.add_argument("--orders", help="comma-separated cyclic orders (constant-zero)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="instance file to write")

    attack = sub.add_parser("attack", help="run the kernel-recovery attack")
    attack.add_argument("instance", nargs="?", help="instance file")
    attack.add_argument("--config", help="run-config file (alternative to an instance path)")
    attack.add_argument("--seed", type=int, default=0)
    attack.add_argument("--backend", choices=sorted(_BACKEND_CHOICES), default="coset")
    attack.add_argument("--patience", type=int, default=5)
    attack.add_argument("--max-samples", type=int, default=200)
    attack.add_argument("--collision-limit", type=int, default=8)
    attack.add_argument("--forge-count", type=int, default=3)
    attack.add_argument("--early-exit", action="store_true")
    attack.add_argument("--kfm-block-bits", type=int, default=None)
    attack.add_argument("--timing", action="store_true", help="include wall time in the report")
    attack.add_argument("--dump-states", help="debug: dump statevectors of one pipeline run")
    attack.add_argument("--out", help="report file to write")

    verify = sub.add_parser("verify", help="re-verify a report against its instance")
    verify.add_argument("instance", help="instance file")
    verify.add_argument("report", help="report file")

    audit = sub.add_parser("audit", help="chi-square audit of the sampler distribution")
    audit.add_argument("instance", help="instance file")
    audit.add_argument("--draws", type=int, help="default: 50 per support element")
    audit.add_argument("--backend", choices=sorted(_BACKEND_CHOICES), default="coset")
    audit.add_argument("--seed", type=int, default=0)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = {
        "gen": _cmd_gen,
        "attack": _cmd_attack,
        "verify": _cmd_verify,
        "audit": _cmd_audit,
    }[args.command]
    try:
        return handler(args)
    except (ParameterError, ResourceLimitError, FileNotFoundError, ValueError) as exc:
        print(f"qcollide {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ToolkitError as exc:
        print(f"qcollide {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _cmd_gen(args: argparse.Namespace) -> int:
    family = canonical_family(args.family)
    orders = None
    if args.orders:
        orders = tuple(int(tok) for tok in args.orders.split(",") if tok.strip())
    h = gen_params(
        family,
        seed=args.seed,
        m=args.m,
        n=args.n,
        p=args.p,
        q=args.q,
        e=args.e,
        orders=orders,
    )
    provenance = {"generator_seed": args.seed}
    for key in ("m", "n", "p", "q", "e"):
        value = getattr(args, key)
        if value is not None:
            provenance[key] = value
    if orders is not None:
        provenance["orders"] = list(orders)
    serialize.save_json(args.out, serialize.instance_payload(h, provenance))
    print(f"wrote {family} instance ({h.input_group} -> {h.output_group}) to {args.out}")
    return EXIT_OK


def _attack_config_from_args(args: argparse.Namespace) -> AttackConfig:
    return AttackConfig(
        backend=_BACKEND_CHOICES[args.backend],
        seed=args.seed,
        patience=args.patience,
        max_samples=args.max_samples,
        collision_limit=args.collision_limit,
        forge_count=args.forge_count,
        early_exit=args.early_exit,
        kfm_block_bits=args.kfm_block_bits,
    )


def _cmd_attack(args: argparse.Namespace) -> int:
    out_path = args.out
    if args.config is not None:
        if args.instance is not None:
            raise ParameterError("pass either an instance path or --config, not both")
        run_cfg = serialize.run_config_from_payload(serialize.load_json(args.config))
        if isinstance(run_cfg.instance, str):
            h = serialize.load_instance(run_cfg.instance)
        else:
            h = serialize.instance_from_payload(run_cfg.instance)
        cfg = run_cfg.attack
        out_path = out_path or run_cfg.report_path
    elif args.instance is not None:
        h = serialize.load_instance(args.instance)
        cfg = _attack_config_from_args(args)
    else:
        raise ParameterError("an instance path or --config is required")

    if args.dump_states:
        if cfg.backend != BACKEND_STATEVECTOR:
            raise ParameterError("--dump-states requires --backend statevector")
        states: list = []
        sample_orthogonal(
            h, cfg.backend, np.random.default_rng(cfg.seed), collect_states=states
        )
        with open(args.dump_states, "w", encoding="utf-8") as fp:
            for label, state in states:
                write_state_dump(state, fp, label=label)
        print(f"dumped {len(states)} pipeline states to {args.dump_states}")

    report = run_attack(h, cfg)
    payload = serialize.report_payload(report, include_timing=args.timing)
    if out_path:
        serialize.save_json(out_path, payload)
        print(f"wrote report to {out_path}")
    else:
        sys.stdout.write(serialize.canonical_json(payload))

    print(
        f"status={report.status} kernel_order={report.kernel_order} "
        f"samples={report.samples_used} forged_pairs={len(report.forged_pairs)} "
        f"wall_time={report.wall_time:.3f}s"
    )
    if report.verified:
        return EXIT_OK
    print("attack incomplete: " + _incomplete_reason(report.status), file=sys.stderr)
    return EXIT_INCOMPLETE


def _incomplete_reason(status: str) -> str:
    return {
        "trivial_kernel": "kernel is trivial (hash is injective on this group)",
        "unsaturated": "sample budget exhausted before saturation",
        "verification_failed": "forged pairs failed re-verification",
    }.get(status, status)


def _cmd_verify(args: argparse.Namespace) -> int:
    h = serialize.load_instance(args.instance)
    payload = serialize.load_json(args.report)
    failures: list[str] = []

    embedded = payload.get("instance")
    if embedded != serialize.instance_payload(h):
        failures.append("embedded instance does not match the instance file")
        contents = None
    else:
        try:
            contents = serialize.parse_report(payload, h)
        except ParameterError as exc:
            failures.append(str(exc))
            contents = None

    if contents is not None:
        out_identity = h.output_group.identity()
        for i, gen in enumerate(contents.kernel_generators):
            if hash_eval(h, gen) != out_identity:
                failures.append(f"kernel generator #{i} {gen} does not hash to identity")
        for i, (x, x_prime, claimed) in enumerate(contents.forged_pairs):
            if x == x_prime:
                failures.append(f"forged pair #{i} has x == x'")
                continue
            hx = hash_eval(h, x)
            if hx != claimed:
                failures.append(f"forged pair #{i}: recorded hash value is wrong")
            if hash_eval(h, x_prime) != hx:
                failures.append(f"forged pair #{i}: H(x') != H(x)")
        if contents.collision_base is not None:
            base_hash = hash_eval(h, contents.collision_base)
            for i, value in enumerate(contents.collisions):
                if value == contents.collision_base:
                    failures.append(f"collision #{i} equals its base input")
                elif hash_eval(h, value) != base_hash:
                    failures.append(f"collision #{i}: H(value) != H(base)")

    if failures:
        for line in failures:
            print(f"FAIL: {line}")
        print(f"verification failed with {len(failures)} problem(s)")
        return EXIT_VERIFY_FAILED
    print("verification passed: kernel generators and forged pairs all re-check")
    return EXIT_OK


def _cmd_audit(args: argparse.Namespace) -> int:
    h = serialize.load_instance(args.instance)
    backend = _BACKEND_CHOICES[args.backend]
    rng = np.random.default_rng(args.seed)
    support_size = len(kernel_bruteforce(h).orthogonal_elements)
    draws = args.draws if args.draws is not None else 50 * support_size
    verdict = distribution_audit(h, backend, draws, rng)
    p_str = "n/a" if verdict.p_value is None else f"{verdict.p_value:.6f}"
    print(
        f"audit backend={backend} draws={verdict.draws} support={verdict.support_size} "
        f"out_of_support={verdict.out_of_support} p_value={p_str} "
        f"verdict={'pass' if verdict.passed else 'fail'}"
    )
    return EXIT_OK if verdict.passed else EXIT_VERIFY_FAILED


if __name__ == "__main__":
    raise SystemExit(main())

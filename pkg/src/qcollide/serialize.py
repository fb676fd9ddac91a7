"""JSON file formats for hash instances, attack reports and run configs.

All files carry ``schema_version`` and a ``kind`` discriminator and are
written in a canonical form (sorted keys, two-space indent, trailing
newline) so fixtures diff cleanly and reruns are byte-identical.
Conventions: arbitrary-size integers are decimal strings, bit rows are
hex strings next to an explicit bit width, residue tuples are JSON
arrays of small ints.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .attack import AttackConfig, AttackReport
from .errors import ParameterError
from .groups import GroupElement
from .hashes import (
    ConstantZeroParams,
    HomomorphicHash,
    KfmParams,
    RsaParams,
    XorCrcParams,
    XorMatrixParams,
    canonical_family,
    constant_zero_hash,
    input_representative,
    kfm_hash,
    output_representative,
    rsa_hash,
    xor_crc_hash,
    xor_matrix_hash,
)

SCHEMA_VERSION = 1

KIND_INSTANCE = "hash_instance"
KIND_REPORT = "attack_report"
KIND_RUN_CONFIG = "run_config"


def canonical_json(payload: dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def save_json(path: str | Path, payload: dict[str, Any]) -> None:
    Path(path).write_text(canonical_json(payload), encoding="utf-8")


def load_json(path: str | Path) -> dict[str, Any]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(payload, dict):
        raise ParameterError(f"{path}: expected a JSON object at top level")
    return payload


def _expect_kind(payload: dict[str, Any], kind: str) -> None:
    if payload.get("kind") != kind:
        raise ParameterError(f"expected kind={kind!r}, found {payload.get('kind')!r}")
    if payload.get("schema_version") != SCHEMA_VERSION:
        raise ParameterError(
            f"unsupported schema_version {payload.get('schema_version')!r}"
        )


def _hex_row(value: int, width_bits: int) -> str:
    digits = max(1, (width_bits + 3) // 4)
    return f"{value:0{digits}x}"


# ---------------------------------------------------------------------------
# hash instances


def instance_payload(
    h: HomomorphicHash, provenance: dict[str, Any] | None = None
) -> dict[str, Any]:
    body: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "kind": KIND_INSTANCE,
        "family": h.family,
        "input_group": {"orders": list(h.input_group.orders)},
        "output_group": {"orders": list(h.output_group.orders)},
        "params": _params_payload(h),
    }
    if provenance:
        body["provenance"] = provenance
    return body


def _params_payload(h: HomomorphicHash) -> dict[str, Any]:
    p = h.params
    if isinstance(p, XorMatrixParams):
        return {
            "width": p.width,
            "rows": [_hex_row(r, p.width) for r in p.rows],
        }
    if isinstance(p, XorCrcParams):
        return {
            "degree": p.degree,
            "generator_poly": _hex_row(p.generator_poly, p.degree + 1),
            "message_bits": len(h.input_group.orders),
        }
    if isinstance(p, KfmParams):
        return {
            "p": str(p.p),
            "q": str(p.q),
            "generators": [str(g) for g in p.generators],
        }
    if isinstance(p, RsaParams):
        return {
            "p": str(p.p),
            "q": str(p.q),
            "e": str(p.e),
            "unit_gen_p": str(p.unit_gen_p),
            "unit_gen_q": str(p.unit_gen_q),
        }
    if isinstance(p, ConstantZeroParams):
        return {}
    raise ParameterError(f"unhandled params {type(p).__name__}")  # pragma: no cover


def instance_from_payload(payload: dict[str, Any]) -> HomomorphicHash:
    _expect_kind(payload, KIND_INSTANCE)
    family = canonical_family(payload["family"])
    params = payload.get("params", {})
    try:
        if family == "xor_matrix":
            width = int(params["width"])
            rows = [int(r, 16) for r in params["rows"]]
            h = xor_matrix_hash(rows, width)
        elif family == "xor_crc":
            h = xor_crc_hash(
                int(params["generator_poly"], 16),
                int(params["degree"]),
                int(params["message_bits"]),
            )
        elif family == "kfm_exponential":
            h = kfm_hash(
                int(params["p"]), int(params["q"]), [int(g) for g in params["generators"]]
            )
        elif family == "rsa_modular":
            h = rsa_hash(int(params["p"]), int(params["q"]), int(params["e"]))
            expected = (int(params["unit_gen_p"]), int(params["unit_gen_q"]))
            actual = (h.params.unit_gen_p, h.params.unit_gen_q)
            if expected != actual:
                raise ParameterError(
                    f"unit generators {expected} do not match derived {actual}"
                )
        elif family == "constant_zero":
            h = constant_zero_hash(payload["input_group"]["orders"])
        else:  # pragma: no cover
            raise ParameterError(f"unhandled family {family}")

        if list(h.input_group.orders) != list(payload["input_group"]["orders"]) or list(
            h.output_group.orders
        ) != list(payload["output_group"]["orders"]):
            raise ParameterError("instance file group orders do not match its parameters")
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"malformed {family} instance params: {exc}") from exc
    return h


def load_instance(path: str | Path) -> HomomorphicHash:
    return instance_from_payload(load_json(path))


# ---------------------------------------------------------------------------
# attack configs


def attack_config_payload(cfg: AttackConfig) -> dict[str, Any]:
    return {
        "backend": cfg.backend,
        "seed": cfg.seed,
        "patience": cfg.patience,
        "max_samples": cfg.max_samples,
        "collision_limit": cfg.collision_limit,
        "forge_count": cfg.forge_count,
        "early_exit": cfg.early_exit,
        "kfm_block_bits": cfg.kfm_block_bits,
    }


def attack_config_from_payload(payload: dict[str, Any]) -> AttackConfig:
    known = {
        "backend",
        "seed",
        "patience",
        "max_samples",
        "collision_limit",
        "forge_count",
        "early_exit",
        "kfm_block_bits",
    }
    extra = set(payload) - known
    if extra:
        raise ParameterError(f"unknown attack config keys: {sorted(extra)}")
    return AttackConfig(**payload)


# ---------------------------------------------------------------------------
# attack reports


def report_payload(report: AttackReport, *, include_timing: bool = False) -> dict[str, Any]:
    h = report.instance
    pairs = []
    for pair in report.forged_pairs:
        entry: dict[str, Any] = {
            "x": list(pair.x.residues),
            "x_prime": list(pair.x_prime.residues),
            "hash_value": list(pair.hash_value.residues),
        }
        x_rep = input_representative(h, pair.x)
        if x_rep is not None:
            entry["x_rep"] = str(x_rep)
            entry["x_prime_rep"] = str(input_representative(h, pair.x_prime))
        hash_rep = output_representative(h, pair.hash_value)
        if hash_rep is not None:
            entry["hash_rep"] = str(hash_rep)
        pairs.append(entry)

    body: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "kind": KIND_REPORT,
        "instance": instance_payload(h),
        "config": attack_config_payload(report.config),
        "status": report.status,
        "verified": report.verified,
        "samples_used": report.samples_used,
        "kernel": {
            "generators": [list(g.residues) for g in report.kernel_basis.generators],
            "order": report.kernel_order,
        },
        "sample_traces": [
            {
                "backend": t.backend_tag,
                "hash_value": list(t.measured_hash_value.residues),
                "orthogonal_sample": list(t.orthogonal_sample.residues),
            }
            for t in report.sample_traces
        ],
        "forged_pairs": pairs,
        "collision_base": (
            list(report.collision_base.residues) if report.collision_base else None
        ),
        "collisions": [
            {"value": list(c.value.residues), "valid_block": c.valid_block}
            for c in report.collisions
        ],
    }
    if include_timing:
        body["timing"] = {"wall_time_s": report.wall_time}
    return body


@dataclass(frozen=True)
class ReportContents:
    """Report fields parsed back into group elements for re-verification."""

    kernel_generators: tuple[GroupElement, ...]
    kernel_order: int
    forged_pairs: tuple[tuple[GroupElement, GroupElement, GroupElement], ...]
    collision_base: GroupElement | None
    collisions: tuple[GroupElement, ...]
    status: str
    verified: bool


def parse_report(payload: dict[str, Any], h: HomomorphicHash) -> ReportContents:
    _expect_kind(payload, KIND_REPORT)
    in_group = h.input_group
    out_group = h.output_group
    try:
        gens = tuple(in_group.element(r) for r in payload["kernel"]["generators"])
        pairs = tuple(
            (
                in_group.element(p["x"]),
                in_group.element(p["x_prime"]),
                out_group.element(p["hash_value"]),
            )
            for p in payload["forged_pairs"]
        )
        base = payload.get("collision_base")
        collision_base = in_group.element(base) if base is not None else None
        collisions = tuple(
            in_group.element(c["value"]) for c in payload.get("collisions", [])
        )
        return ReportContents(
            kernel_generators=gens,
            kernel_order=int(payload["kernel"]["order"]),
            forged_pairs=pairs,
            collision_base=collision_base,
            collisions=collisions,
            status=str(payload["status"]),
            verified=bool(payload["verified"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterError(f"malformed attack report: {exc}") from exc


# ---------------------------------------------------------------------------
# run configs


@dataclass(frozen=True)
class RunConfig:
    """File-backed bundle: instance (inline payload or path) plus attack
    settings and an optional report destination."""

    instance: dict[str, Any] | str
    attack: AttackConfig
    report_path: str | None = None


def run_config_payload(cfg: RunConfig) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": KIND_RUN_CONFIG,
        "instance": cfg.instance,
        "attack": attack_config_payload(cfg.attack),
        "report_path": cfg.report_path,
    }


def run_config_from_payload(payload: dict[str, Any]) -> RunConfig:
    _expect_kind(payload, KIND_RUN_CONFIG)
    instance = payload["instance"]
    if not isinstance(instance, (dict, str)):
        raise ParameterError("run config 'instance' must be a payload object or a path")
    return RunConfig(
        instance=instance,
        attack=attack_config_from_payload(payload["attack"]),
        report_path=payload.get("report_path"),
    )

"""Command-line interface and file format round-trips."""

import json

import pytest

from qcollide.attack import AttackConfig
from qcollide.cli import EXIT_INCOMPLETE, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED, main
from qcollide.hashes import (
    constant_zero_hash,
    gen_params,
    kfm_hash,
    rsa_hash,
    xor_crc_hash,
    xor_matrix_hash,
)
from qcollide.serialize import (
    RunConfig,
    attack_config_from_payload,
    attack_config_payload,
    instance_from_payload,
    instance_payload,
    load_json,
    run_config_from_payload,
    run_config_payload,
    save_json,
)


@pytest.mark.parametrize(
    "maker",
    [
        lambda: xor_matrix_hash((0b0101, 0b1010), 4),
        lambda: xor_crc_hash(0b10011, 4, 9),
        lambda: kfm_hash(23, 11, (4, 9)),
        lambda: rsa_hash(13, 11, 3),
        lambda: constant_zero_hash((2, 3, 4)),
        lambda: gen_params("xor_matrix", seed=3, m=12, n=7),
    ],
)
def test_instance_payload_roundtrip(maker):
    h = maker()
    assert instance_from_payload(instance_payload(h)) == h


def test_attack_config_roundtrip():
    cfg = AttackConfig(seed=9, patience=7, max_samples=50, early_exit=True)
    assert attack_config_from_payload(attack_config_payload(cfg)) == cfg


def test_run_config_roundtrip(tmp_path):
    cfg = RunConfig(
        instance=instance_payload(xor_matrix_hash((0b01, 0b10), 2)),
        attack=AttackConfig(seed=4),
        report_path=str(tmp_path / "r.json"),
    )
    path = tmp_path / "run.json"
    save_json(path, run_config_payload(cfg))
    assert run_config_from_payload(load_json(path)) == cfg


# ---------------------------------------------------------------------------
# subcommand flows


def test_gen_attack_verify_audit_flow(tmp_path):
    inst = tmp_path / "inst.json"
    report = tmp_path / "report.json"
    assert main(
        ["gen", "--family", "xor-matrix", "--m", "8", "--n", "4",
         "--seed", "7", "--out", str(inst)]
    ) == EXIT_OK

    # deterministic generation
    inst2 = tmp_path / "inst2.json"
    main(["gen", "--family", "xor-matrix", "--m", "8", "--n", "4",
          "--seed", "7", "--out", str(inst2)])
    assert inst.read_bytes() == inst2.read_bytes()

    assert main(["attack", str(inst), "--seed", "3", "--out", str(report)]) == EXIT_OK
    assert main(["verify", str(inst), str(report)]) == EXIT_OK
    assert main(["audit", str(inst), "--seed", "1"]) == EXIT_OK

    # same seed twice: byte-identical reports
    report2 = tmp_path / "report2.json"
    main(["attack", str(inst), "--seed", "3", "--out", str(report2)])
    assert report.read_bytes() == report2.read_bytes()


def test_gen_kfm_and_divisibility_error(tmp_path):
    ok = tmp_path / "kfm.json"
    assert main(
        ["gen", "--family", "kfm", "--p", "23", "--q", "11", "--m", "2",
         "--seed", "1", "--out", str(ok)]
    ) == EXIT_OK
    h = instance_from_payload(load_json(ok))
    assert all(pow(g, 11, 23) == 1 for g in h.params.generators)

    bad = tmp_path / "bad.json"
    assert main(
        ["gen", "--family", "kfm", "--p", "23", "--q", "7", "--m", "2",
         "--seed", "1", "--out", str(bad)]
    ) == EXIT_USAGE


def test_attack_injective_instance_exits_incomplete(tmp_path, injective_xor):
    inst = tmp_path / "inj.json"
    save_json(inst, instance_payload(injective_xor))
    report = tmp_path / "report.json"
    assert main(["attack", str(inst), "--out", str(report)]) == EXIT_INCOMPLETE
    payload = load_json(report)
    assert payload["status"] == "trivial_kernel"
    assert payload["verified"] is False


def test_verify_detects_tampered_pair(tmp_path, xor24):
    inst = tmp_path / "inst.json"
    save_json(inst, instance_payload(xor24))
    report = tmp_path / "report.json"
    assert main(["attack", str(inst), "--seed", "5", "--out", str(report)]) == EXIT_OK

    payload = json.loads(report.read_text())
    payload["forged_pairs"][0]["x_prime"][0] ^= 1
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(payload))
    assert main(["verify", str(inst), str(tampered)]) == EXIT_VERIFY_FAILED


def test_verify_detects_non_kernel_generator(tmp_path, xor24):
    inst = tmp_path / "inst.json"
    save_json(inst, instance_payload(xor24))
    report = tmp_path / "report.json"
    main(["attack", str(inst), "--seed", "5", "--out", str(report)])

    payload = json.loads(report.read_text())
    payload["kernel"]["generators"].append([1, 0, 0, 0])  # hashes to (1, 0)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(payload))
    assert main(["verify", str(inst), str(bad)]) == EXIT_VERIFY_FAILED


def test_verify_detects_instance_mismatch(tmp_path, xor24, kfm_small):
    inst_a = tmp_path / "a.json"
    inst_b = tmp_path / "b.json"
    save_json(inst_a, instance_payload(xor24))
    save_json(inst_b, instance_payload(kfm_small))
    report = tmp_path / "report.json"
    main(["attack", str(inst_a), "--out", str(report)])
    assert main(["verify", str(inst_b), str(report)]) == EXIT_VERIFY_FAILED


def test_attack_with_run_config(tmp_path, xor24):
    inst = tmp_path / "inst.json"
    save_json(inst, instance_payload(xor24))
    report = tmp_path / "from_config.json"
    cfg = RunConfig(
        instance=str(inst), attack=AttackConfig(seed=6), report_path=str(report)
    )
    cfg_path = tmp_path / "run.json"
    save_json(cfg_path, run_config_payload(cfg))
    assert main(["attack", "--config", str(cfg_path)]) == EXIT_OK
    assert report.exists()

    # flags and config are mutually exclusive ways to name the instance
    assert main(["attack", str(inst), "--config", str(cfg_path)]) == EXIT_USAGE


def test_attack_dump_states(tmp_path, xor24):
    inst = tmp_path / "inst.json"
    save_json(inst, instance_payload(xor24))
    dump = tmp_path / "states.txt"
    report = tmp_path / "report.json"
    assert main(
        ["attack", str(inst), "--backend", "statevector",
         "--dump-states", str(dump), "--out", str(report)]
    ) == EXIT_OK
    labels = [l for l in dump.read_text().splitlines() if l.startswith("#")]
    assert labels == ["# uniform", "# oracle", "# collapsed", "# fourier"]

    # the dump needs the statevector backend
    assert main(
        ["attack", str(inst), "--dump-states", str(dump), "--out", str(report)]
    ) == EXIT_USAGE


def test_attack_timing_flag_is_the_only_nondeterminism(tmp_path, xor24):
    inst = tmp_path / "inst.json"
    save_json(inst, instance_payload(xor24))
    with_timing = tmp_path / "t.json"
    main(["attack", str(inst), "--seed", "3", "--timing", "--out", str(with_timing)])
    payload = load_json(with_timing)
    assert "timing" in payload and payload["timing"]["wall_time_s"] >= 0
    without = tmp_path / "p.json"
    main(["attack", str(inst), "--seed", "3", "--out", str(without)])
    assert "timing" not in load_json(without)


def test_audit_honours_draw_floor(tmp_path, xor24):
    inst = tmp_path / "inst.json"
    save_json(inst, instance_payload(xor24))
    # |K^perp| = 4 needs >= 200 draws
    assert main(["audit", str(inst), "--draws", "100"]) == EXIT_USAGE
    assert main(["audit", str(inst), "--draws", "400", "--seed", "2"]) == EXIT_OK


def test_usage_errors(tmp_path):
    assert main(["gen", "--family", "sha3", "--out", str(tmp_path / "x.json")]) == EXIT_USAGE
    assert main(["attack", str(tmp_path / "missing.json")]) == EXIT_USAGE
    assert main(["attack"]) == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_USAGE


def test_gen_constant_zero_with_orders(tmp_path):
    inst = tmp_path / "cz.json"
    assert main(
        ["gen", "--family", "constant-zero", "--orders", "2,3,4", "--out", str(inst)]
    ) == EXIT_OK
    h = instance_from_payload(load_json(inst))
    assert h.input_group.orders == (2, 3, 4)

"""Command-line interface: subcommands, formats, exit codes."""

import csv
import json

import pytest

from gmkp.cli import (
    EXIT_BUDGET,
    EXIT_INPUT,
    EXIT_OK,
    canonical_item_order,
    instance_from_json,
    instance_to_json,
    main,
)
from gmkp.model import Instance


def make(caps, weights, groups, rewards):
    return Instance(tuple(caps), tuple(weights), tuple(groups), tuple(rewards))


def write_instance(path, instance):
    path.write_text(json.dumps(instance_to_json(instance)))


@pytest.fixture
def sample(tmp_path):
    inst = make([10, 10], [6, 4, 5, 3], [(0, 1), (2,), (3,)], [10, 5, 3])
    path = tmp_path / "inst.json"
    write_instance(path, inst)
    return inst, path


class TestSerialization:
    def test_round_trip_canonical_instance(self):
        inst = make([10, 10], [6, 4, 5], [(0, 1), (2,)], [10, 5])
        assert instance_from_json(instance_to_json(inst)) == inst

    def test_canonical_item_order(self):
        scrambled = make([10, 10], [5, 6, 4], [(1, 2), (0,)], [10, 5])
        canon = canonical_item_order(scrambled)
        assert canon.item_weights == (6, 4, 5)
        assert canon.groups == ((0, 1), (2,))
        assert instance_from_json(instance_to_json(canon)) == canon
        # semantics preserved
        assert canon.group_weights() == scrambled.group_weights()
        assert canon.rewards == scrambled.rewards

    def test_serialized_text_round_trips_bit_exactly(self, tmp_path):
        inst = make([7, 9], [3, 3, 4], [(0,), (1, 2)], [3, 7])
        doc = instance_to_json(inst)
        text = json.dumps(doc, indent=2, sort_keys=True)
        again = json.dumps(
            instance_to_json(instance_from_json(json.loads(text))),
            indent=2,
            sort_keys=True,
        )
        assert text == again

    def test_bad_schema_rejected(self):
        with pytest.raises(Exception):
            instance_from_json({"schema": "gmkp/99", "capacities": [], "groups": []})


class TestGenerate:
    def test_writes_instances_and_manifest(self, tmp_path, capsys):
        out = tmp_path / "gen"
        code = main(
            ["generate", "--count", "3", "--seed", "9", "--out-dir", str(out)]
        )
        assert code == EXIT_OK
        files = sorted(p.name for p in out.glob("*.json"))
        assert files == [
            "inst_9_0.json",
            "inst_9_1.json",
            "inst_9_2.json",
            "manifest_9.json",
        ]
        manifest = json.loads((out / "manifest_9.json").read_text())
        assert manifest["schema"] == "gmkp-manifest/1"
        assert len(manifest["instances"]) == 3
        doc = json.loads((out / "inst_9_0.json").read_text())
        assert doc["schema"] == "gmkp/1"

    def test_regeneration_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        main(["generate", "--count", "2", "--seed", "4", "--out-dir", str(a)])
        main(["generate", "--count", "2", "--seed", "4", "--out-dir", str(b)])
        for name in ("inst_4_0.json", "inst_4_1.json", "manifest_4.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()


class TestSolve:
    def test_solve_writes_result(self, sample, tmp_path):
        _, path = sample
        out = tmp_path / "r.json"
        code = main(["solve", str(path), "--algo", "3mkp", "--swap-opt", "--out", str(out)])
        assert code == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["schema"] == "gmkp-result/1"
        assert doc["algorithm"] == "3mkp"
        assert doc["swap_opt"] is True
        assert isinstance(doc["reward"], int) and isinstance(doc["max_exceeded"], int)
        assert set(doc["timings_ms"]) == {"selection", "assignment", "swap_opt"}
        # assignment triples reference real items of selected groups
        inst, _ = sample
        for l, pos, i in doc["assignment"]:
            assert l in doc["selection"]
            assert 0 <= pos < len(inst.groups[l]) and 0 <= i < inst.m

    def test_missing_file_is_input_error(self, tmp_path, capsys):
        code = main(["solve", str(tmp_path / "nope.json")])
        assert code == EXIT_INPUT

    def test_corrupt_json_is_input_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["solve", str(bad)]) == EXIT_INPUT

    def test_invalid_instance_is_input_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(
            json.dumps(
                {
                    "schema": "gmkp/1",
                    "capacities": [5, -2],
                    "groups": [{"reward": 1, "items": [3]}],
                }
            )
        )
        assert main(["solve", str(bad)]) == EXIT_INPUT

    def test_mkpd_without_d_set_is_input_error(self, sample, capsys):
        _, path = sample
        assert main(["solve", str(path), "--algo", "mkpd"]) == EXIT_INPUT

    def test_mkpd_with_d_set(self, sample, tmp_path):
        _, path = sample
        out = tmp_path / "r.json"
        code = main(
            ["solve", str(path), "--algo", "mkpd", "--d-set", "10/2,10/3", "--out", str(out)]
        )
        assert code == EXIT_OK

    def test_d_set_canonical_keyword(self, sample, tmp_path):
        _, path = sample
        out = tmp_path / "r.json"
        code = main(
            ["solve", str(path), "--algo", "mkpd", "--d-set", "canonical", "--out", str(out)]
        )
        assert code == EXIT_OK

    def test_hundred_mkp_alias(self, sample, tmp_path):
        _, path = sample
        out = tmp_path / "r.json"
        assert main(["solve", str(path), "--algo", "100mkp", "--out", str(out)]) == EXIT_OK
        assert json.loads(out.read_text())["algorithm"] == "mkpd"

    def test_best_algo(self, sample, tmp_path):
        _, path = sample
        out = tmp_path / "r.json"
        assert main(["solve", str(path), "--algo", "best", "--out", str(out)]) == EXIT_OK
        assert json.loads(out.read_text())["algorithm"] in ("lp", "kp", "2mkp", "3mkp")


class TestFeasible:
    def test_feasible_result(self, sample, tmp_path):
        _, path = sample
        out = tmp_path / "f.json"
        code = main(["feasible", str(path), "--algo", "2mkp", "--out", str(out)])
        assert code == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["max_exceeded"] <= 0
        assert doc["probes"] >= 1 and doc["aborted_early"] is False


class TestSweep:
    def test_eleven_rows_with_schema(self, sample, tmp_path):
        _, path = sample
        out = tmp_path / "sweep.csv"
        code = main(["sweep", str(path), "--algo", "2mkp", "--out", str(out)])
        assert code == EXIT_OK
        rows = list(csv.DictReader(out.open()))
        assert len(rows) == 11
        assert all(r["schema"] == "gmkp-sweep/1" for r in rows)
        assert all(r["dominated"] in ("0", "1") for r in rows)

    def test_custom_factors(self, sample, tmp_path):
        _, path = sample
        out = tmp_path / "sweep.csv"
        main(["sweep", str(path), "--factors", "1/2,1", "--out", str(out)])
        rows = list(csv.DictReader(out.open()))
        assert [r["factor"] for r in rows] == ["1/2", "1"]


class TestExact:
    def test_exact_optimum(self, sample, tmp_path):
        inst, path = sample
        out = tmp_path / "e.json"
        code = main(["exact", str(path), "--out", str(out)])
        assert code == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["optimal_reward"] == 18  # all groups fit: 10+5+3
        assert doc["max_exceeded"] <= 0

    def test_budget_exit_code(self, tmp_path, capsys):
        # many identical heavy items force a deep packing search
        inst = make(
            [17, 19, 23],
            [11, 11, 11, 9, 9, 7],
            [tuple(range(6))],
            [58],
        )
        path = tmp_path / "hard.json"
        write_instance(path, inst)
        assert main(["exact", str(path), "--node-budget", "2"]) == EXIT_BUDGET


class TestBench:
    def test_serial_and_concurrent_identical(self, tmp_path):
        gen_dir = tmp_path / "gen"
        main(["generate", "--count", "2", "--seed", "11", "--out-dir", str(gen_dir)])
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        code = main(
            ["bench", "--instances", str(gen_dir), "--algos", "lp,kp",
             "--out", str(out1), "--workers", "1"]
        )
        assert code == EXIT_OK
        main(
            ["bench", "--instances", str(gen_dir), "--algos", "lp,kp",
             "--out", str(out2), "--workers", "4"]
        )

        def stable(path):
            rows = list(csv.DictReader(path.open()))
            return [
                (r["schema"], r["instance"], r["algo"], r["reward"], r["max_exceeded"])
                for r in rows
            ]

        assert stable(out1) == stable(out2)
        summary = list(csv.DictReader((tmp_path / "a_summary.csv").open()))
        assert [r["algo"] for r in summary] == ["lp", "kp"]
        assert all(r["schema"] == "gmkp-bench-summary/1" for r in summary)

    def test_empty_dir_is_input_error(self, tmp_path, capsys):
        empty = tmp_path / "none"
        empty.mkdir()
        assert (
            main(["bench", "--instances", str(empty), "--out", str(tmp_path / "o.csv")])
            == EXIT_INPUT
        )

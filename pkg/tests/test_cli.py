"""Golden-file tests for every ``davar-label`` command.

Goldens live in ``tests/golden``; rebuild them with
``python3 tests/test_cli.py --regen`` and review the diff before committing.
"""

import json
import os
import subprocess
import sys
from collections import Counter
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
FIX = "tests/fixtures"
GOLDEN = ROOT / "tests" / "golden"

# name, argv, exit code; "{out}" is replaced by a fresh output directory
CASES = [
    ("validate_clean", ["validate", f"{FIX}/clean.json"], 0),
    ("validate_empty", ["validate", f"{FIX}/empty.json"], 0),
    ("validate_length_mismatch", ["validate", f"{FIX}/length_mismatch.json"], 1),
    ("validate_length_mismatch_pretty", ["validate", f"{FIX}/length_mismatch.json", "--pretty"], 1),
    ("validate_oob", ["validate", f"{FIX}/out_of_bounds.json"], 0),
    ("validate_oob_strict", ["validate", f"{FIX}/out_of_bounds.json", "--strict"], 1),
    ("validate_malformed", ["validate", f"{FIX}/malformed.json"], 2),
    ("validate_missing_file", ["validate", f"{FIX}/no_such_file.json"], 2),
    ("stats_clean", ["stats", f"{FIX}/clean.json"], 0),
    ("stats_clean_pretty", ["stats", f"{FIX}/clean.json", "--pretty"], 0),
    ("stats_empty", ["stats", f"{FIX}/empty.json"], 0),
    ("convert_coco", ["convert", f"{FIX}/clean.json", "--to", "coco", "--out", "{out}"], 0),
    ("convert_coco_subtask1", ["convert", f"{FIX}/clean.json", "--to", "coco", "--subtask", "1", "--out", "{out}"], 0),
    ("convert_coco_no_labels", ["convert", f"{FIX}/spotting.json", "--to", "coco", "--out", "{out}"], 1),
    ("convert_icdar", ["convert", f"{FIX}/spotting.json", "--to", "icdar", "--out", "{out}"], 0),
    ("convert_conll", ["convert", f"{FIX}/ner.json", "--to", "conll", "--out", "{out}"], 0),
    ("convert_conll_not_ner", ["convert", f"{FIX}/clean.json", "--to", "conll", "--out", "{out}"], 1),
    ("convert_bad_format", ["convert", f"{FIX}/clean.json", "--to", "voc", "--out", "{out}"], 2),
    ("project_kie", ["project", f"{FIX}/clean.json", "--task", "kie"], 0),
    ("project_layout", ["project", f"{FIX}/clean.json", "--task", "layout_analysis"], 0),
    ("project_ner_missing", ["project", f"{FIX}/clean.json", "--task", "ner"], 1),
    ("project_unknown_task", ["project", f"{FIX}/clean.json", "--task", "vqa"], 2),
    ("pipeline_trie", ["pipeline", f"{FIX}/clean.json", "--config", f"{FIX}/trie_kie.json"], 0),
    ("pipeline_geometric", ["pipeline", f"{FIX}/clean.json", "--config", f"{FIX}/geometric.json"], 0),
    ("pipeline_bad_stage", ["pipeline", f"{FIX}/clean.json", "--config", f"{FIX}/bad_stage.json"], 2),
    ("pipeline_missing_config", ["pipeline", f"{FIX}/clean.json", "--config", f"{FIX}/none.json"], 2),
    ("chargrid_ab", ["chargrid", f"{FIX}/ab.json", "--vocab", f"{FIX}/vocab_ab.txt", "--size", "4x2"], 0),
    ("chargrid_ab_pretty", ["chargrid", f"{FIX}/ab.json", "--vocab", f"{FIX}/vocab_ab.txt", "--size", "4x2", "--pretty"], 0),
    ("chargrid_bad_size", ["chargrid", f"{FIX}/ab.json", "--vocab", f"{FIX}/vocab_ab.txt", "--size", "0x2"], 2),
    ("chargrid_no_texts", ["chargrid", f"{FIX}/layout_gt.json", "--vocab", f"{FIX}/vocab_ab.txt", "--size", "4x4"], 1),
    ("eval_kie_identical", ["eval", f"{FIX}/kie_gt.json", f"{FIX}/kie_gt.json", "--task", "kie"], 0),
    ("eval_kie", ["eval", f"{FIX}/kie_gt.json", f"{FIX}/kie_pred.json", "--task", "kie"], 0),
    ("eval_kie_pretty", ["eval", f"{FIX}/kie_gt.json", f"{FIX}/kie_pred.json", "--task", "kie", "--pretty"], 0),
    ("eval_layout", ["eval", f"{FIX}/layout_gt.json", f"{FIX}/layout_pred.json", "--task", "layout"], 0),
    ("eval_detection", ["eval", f"{FIX}/layout_gt.json", f"{FIX}/layout_pred.json", "--task", "detection"], 0),
    ("eval_order", ["eval", f"{FIX}/order_gt.json", f"{FIX}/order_pred.json", "--task", "reading_order"], 0),
    ("eval_bad_iou", ["eval", f"{FIX}/kie_gt.json", f"{FIX}/kie_pred.json", "--task", "kie", "--iou", "2"], 2),
    ("eval_unsupported_task", ["eval", f"{FIX}/kie_gt.json", f"{FIX}/kie_pred.json", "--task", "ner"], 1),
    ("no_command", [], 2),
]


def run_cli(argv, out_dir=None, env_extra=None):
    argv = [a.replace("{out}", str(out_dir)) for a in argv]
    env = {k: v for k, v in os.environ.items() if k != "DAVAR_LABEL_THREADS"}
    env.update(env_extra or {})
    proc = subprocess.run([sys.executable, "-m", "davar_label", *argv], cwd=ROOT, env=env,
                          capture_output=True)
    return proc.returncode, proc.stdout, proc.stderr


def _tree(path: Path) -> dict:
    if not path.exists():
        return {}
    return {p.relative_to(path).as_posix(): p.read_bytes() for p in sorted(path.rglob("*")) if p.is_file()}


def _golden_stdout(name):
    return (GOLDEN / f"{name}.out").read_bytes()


@pytest.mark.parametrize("name,argv,code", CASES, ids=[c[0] for c in CASES])
def test_cli_golden(name, argv, code, tmp_path):
    rc, out, err = run_cli(argv, tmp_path / "out")
    assert rc == code, err.decode()
    assert out == _golden_stdout(name)
    if code:
        assert err.strip(), "failures must explain themselves on stderr"
    else:
        assert err == b""
    if name.startswith("convert_"):
        assert _tree(tmp_path / "out") == _tree(GOLDEN / name)


@pytest.mark.parametrize("name,argv,code", [c for c in CASES if c[2] == 0], ids=[c[0] for c in CASES if c[2] == 0])
def test_cli_repeatable_and_thread_independent(name, argv, code, tmp_path):
    first = run_cli(argv, tmp_path / "a")
    second = run_cli(argv, tmp_path / "b", {"DAVAR_LABEL_THREADS": "4"})
    assert first[:2] == second[:2]
    assert _tree(tmp_path / "a") == _tree(tmp_path / "b")


def test_bad_thread_setting(tmp_path):
    rc, _, err = run_cli(["validate", f"{FIX}/clean.json"], env_extra={"DAVAR_LABEL_THREADS": "zero"})
    assert rc == 2 and b"DAVAR_LABEL_THREADS" in err


# golden values checked against independent computations

def _json(name):
    return json.loads(_golden_stdout(name))


def test_golden_kie_values():
    assert _json("eval_kie_identical")["aggregate"]["F1-Score"] == 1.0
    assert _json("eval_kie")["aggregate"]["F1-Score"] == 2 / 3


def test_golden_layout_matches_oracle():
    from oracles import coco_map_brute

    gt = json.loads((ROOT / FIX / "layout_gt.json").read_text())
    pred = json.loads((ROOT / FIX / "layout_pred.json").read_text())
    gts = {p: list(zip(r["content_ann"]["bboxes"], (v[0] for v in r["content_ann"]["labels"]))) for p, r in gt.items()}
    preds = {p: list(zip(r["content_ann"]["bboxes"], r["content_ann"]["scores"], (v[0] for v in r["content_ann"]["labels"])))
             for p, r in pred.items()}
    assert abs(_json("eval_layout")["aggregate"]["mAP"] - coco_map_brute(preds, gts)) <= 1e-12


def test_golden_chargrid_matches_oracle():
    from oracles import chargrid_per_cell

    got = _json("chargrid_ab")["ab.png"]
    assert got["cells"] == chargrid_per_cell(4, 2, [[0, 0, 4, 2]], ["AB"], ["A", "B"], 4, 2)
    assert got["cells"] == [1, 1, 2, 2, 1, 1, 2, 2]


def test_golden_stats_tallies():
    data = json.loads((ROOT / FIX / "clean.json").read_text())
    tally = Counter()
    boxes = 0
    for rec in data.values():
        boxes += len(rec["content_ann"]["bboxes"])
        for vector in rec["content_ann"]["labels"]:
            for k, cat in enumerate(vector):
                tally[(str(k), cat)] += 1
    stats = _json("stats_clean")
    assert stats["num_instances"] == boxes == 6
    assert {(k, c): n for k, cats in stats["categories"].items() for c, n in cats.items()} == dict(tally)
    assert sum(stats["box_area_histogram"]["counts"]) == boxes
    assert _json("stats_empty")["num_images"] == 0
    assert sum(_json("stats_empty")["box_area_histogram"]["counts"]) == 0


def test_golden_validate_lines():
    assert _golden_stdout("validate_clean") == b""
    lines = _golden_stdout("validate_length_mismatch").decode().splitlines()
    assert len(lines) == 1 and json.loads(lines[0])["code"] == "LENGTH_MISMATCH"


def regenerate():
    import shutil
    import tempfile

    GOLDEN.mkdir(exist_ok=True)
    for name, argv, code in CASES:
        with tempfile.TemporaryDirectory() as tmp:
            out_dir = Path(tmp) / "out"
            rc, out, err = run_cli(argv, out_dir)
            if rc != code:
                raise SystemExit(f"{name}: exit {rc}, expected {code}: {err.decode()}")
            (GOLDEN / f"{name}.out").write_bytes(out)
            if name.startswith("convert_"):
                target = GOLDEN / name
                shutil.rmtree(target, ignore_errors=True)
                if out_dir.exists():
                    shutil.copytree(out_dir, target)
    print(f"wrote {len(CASES)} goldens to {GOLDEN}")


if __name__ == "__main__":
    if sys.argv[1:] == ["--regen"]:
        regenerate()
    else:
        raise SystemExit("usage: python3 tests/test_cli.py --regen")

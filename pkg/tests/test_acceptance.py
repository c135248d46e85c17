"""Acceptance gate: one test per criterion, reported as PASS/FAIL lines at the end of the run."""

import json
import random
import time

import pytest

from davar_label import (
    AnnotationSet,
    ContentAnn,
    GeoBox,
    ImageRecord,
    parse_annotation_file,
    serialize_canonical,
    validate_set,
)
from davar_label.converters import (
    CocoDetectionDoc,
    conll_from,
    from_coco_detection,
    from_icdar_spotting,
    ner_to_conll,
    to_coco_detection,
    to_icdar_spotting,
)
from davar_label.metrics import (
    Prediction,
    average_precision,
    coco_map,
    detection_prf,
    kie_macro_f1,
    match_detections,
    polygon_iou,
    reading_order_tau,
)
from davar_label.schema import load_annotation_file
from davar_label.transforms import (
    PipelineConfig,
    apply_hflip,
    apply_resize,
    apply_rotate90,
    build_pipeline,
    chargrid_rasterize,
    run_pipeline,
)
from davar_label.validator import Severity

from factories import (
    coco_representable_set,
    conll_representable_record,
    convex_polygon,
    icdar_representable_set,
    random_chargrid_case,
    random_record,
    random_set,
    rect_box,
)
from mutations import MUTATIONS, mutate_set
from oracles import (
    ap_by_envelope,
    chargrid_per_cell,
    coco_map_brute,
    greedy_matching_by_search,
    kendall_tau_pairs,
    macro_f1_by_confusion,
    rect_iou,
)
from test_cli import CASES, GOLDEN, ROOT, _golden_stdout, _tree, run_cli


def _errors(report):
    return sum(1 for d in report.diagnostics if d.severity is Severity.ERROR)


@pytest.mark.acceptance("A1 schema round-trip: 1000 sets, identity + idempotence, < 30 s")
def test_schema_round_trip(request):
    rng = random.Random(20240101)
    start = time.perf_counter()
    for _ in range(1000):
        s = random_set(rng, max_images=20, max_boxes=10)
        text = serialize_canonical(s)
        again = parse_annotation_file(text)
        assert again == s
        assert serialize_canonical(again) == text
    elapsed = time.perf_counter() - start
    request.node.acceptance_detail = f"{elapsed:.1f} s"
    assert elapsed < 30.0


@pytest.mark.acceptance("A2 validator mutation suite: 6 codes, exact detection, zero false positives")
def test_validator_mutations(request):
    clean_file = load_annotation_file(ROOT / "tests" / "fixtures" / "clean.json")
    rng = random.Random(7)
    corpus = [clean_file] + [s for s in (random_set(rng, max_images=6) for _ in range(200)) if len(s)]
    false_positives = sum(len(validate_set(s).diagnostics) for s in corpus)
    assert false_positives == 0

    mutants = 0
    for code in sorted(MUTATIONS):
        mrng = random.Random(code)
        for i in range(100):
            clean = corpus[i % len(corpus)]
            mutant, path = mutate_set(mrng, clean, code)
            diags = validate_set(parse_annotation_file(serialize_canonical(mutant))).diagnostics
            assert [(d.code, d.image_path) for d in diags] == [(code, path)]
            mutants += 1
    request.node.acceptance_detail = f"{mutants} mutants over {len(corpus)} clean sets, 0 false positives"


def _rand_preds(rng, n, w=8, h=8, cats=("",)):
    return [Prediction(rect_box(rng, w, h), rng.choice([0.25, 0.5, 0.75, 1.0]), rng.choice(cats)) for _ in range(n)]


@pytest.mark.acceptance("A3 metric oracles: 500 instances per metric within 1e-9, fixtures exact")
def test_metric_oracles(request):
    # hand-computable fixtures
    assert polygon_iou(GeoBox((0, 0, 2, 2)), GeoBox((1, 0, 3, 2))) == 1 / 3
    m = match_detections([Prediction(GeoBox((0, 0, 2, 2)), 1.0)], [GeoBox((0, 0, 2, 2)), GeoBox((4, 4, 6, 6))])
    s = detection_prf([m])
    assert (s.precision, s.recall, s.hmean) == (1.0, 0.5, 2 / 3)
    assert kie_macro_f1(["A", "A", "B"], ["A", "B", "B"]) == 2 / 3

    rng = random.Random(99)
    worst = 0.0
    for _ in range(500):
        # match_detections
        gts = [rect_box(rng, 8, 8) for _ in range(rng.randint(0, 5))]
        preds = _rand_preds(rng, rng.randint(0, 5))
        thresh = rng.choice([0.1, 0.3, 0.5, 0.75])
        got = match_detections(preds, gts, thresh)
        if preds and gts:
            ious = [[rect_iou(p.box.points, g.points) for g in gts] for p in preds]
            flags, rank = greedy_matching_by_search([p.score for p in preds], ious, thresh)
        else:
            flags, rank = [False] * len(preds), sorted(range(len(preds)), key=lambda i: -preds[i].score)
        assert list(got.order) == rank and list(got.tp) == flags

        # average_precision
        flags = [rng.random() < 0.5 for _ in range(rng.randint(0, 5))]
        num_gt = sum(flags) + rng.randint(0, 3)
        diff = abs(average_precision(flags, num_gt) - ap_by_envelope(flags, num_gt))
        worst = max(worst, diff)
        assert diff <= 1e-9

        # coco_map: up to 3 images, 5 boxes each, 3 classes
        cats = ("a", "b", "c")
        gt_map, pred_map = {}, {}
        for i in range(rng.randint(1, 3)):
            gt_map[f"{i}.png"] = [(rect_box(rng, 8, 8), rng.choice(cats)) for _ in range(rng.randint(0, 5))]
            near = [Prediction(b, rng.choice([0.3, 0.6, 0.9]), c) for b, c in gt_map[f"{i}.png"] if rng.random() < 0.5]
            pred_map[f"{i}.png"] = (near + _rand_preds(rng, rng.randint(0, 3), cats=cats))[:5]
        got_map = coco_map(pred_map, gt_map)
        want_map = coco_map_brute(
            {k: [(p.box.points, p.score, p.category) for p in v] for k, v in pred_map.items()},
            {k: [(b.points, c) for b, c in v] for k, v in gt_map.items()},
        )
        worst = max(worst, abs(got_map - want_map))
        assert abs(got_map - want_map) <= 1e-9

        # kie_macro_f1
        n = rng.randint(0, 5)
        g = [rng.choice(cats) for _ in range(n)]
        p = [rng.choice(cats) for _ in range(n)]
        diff = abs(kie_macro_f1(p, g) - macro_f1_by_confusion(p, g))
        worst = max(worst, diff)
        assert diff <= 1e-9

        # reading_order_tau
        a = list(range(n))
        b = list(range(n))
        rng.shuffle(a)
        rng.shuffle(b)
        diff = abs(reading_order_tau(a, b) - kendall_tau_pairs(a, b))
        worst = max(worst, diff)
        assert diff <= 1e-9
    request.node.acceptance_detail = f"max deviation {worst:.1e}"


@pytest.mark.acceptance("A4 IoU properties: 1000 convex pairs, symmetry, self = 1, range, scale within 1e-12")
def test_iou_properties(request):
    rng = random.Random(4242)
    worst = 0.0
    for _ in range(1000):
        a = convex_polygon(rng, 100, 100, integer=rng.random() < 0.5)
        b = convex_polygon(rng, 100, 100, integer=rng.random() < 0.5)
        if rng.random() < 0.3:  # push some pairs into heavy overlap
            dx = rng.uniform(-5, 5)
            b = GeoBox(tuple(c + dx if i % 2 == 0 else c for i, c in enumerate(a.points)))
        iou = polygon_iou(a, b)
        assert 0.0 <= iou <= 1.0
        assert polygon_iou(b, a) == iou
        assert polygon_iou(a, a) == 1.0 and polygon_iou(b, b) == 1.0
        s = 10 ** rng.uniform(-3, 3)
        scaled = polygon_iou(GeoBox(tuple(c * s for c in a.points)), GeoBox(tuple(c * s for c in b.points)))
        worst = max(worst, abs(scaled - iou))
        assert abs(scaled - iou) <= 1e-12
    request.node.acceptance_detail = f"max scale deviation {worst:.1e}"


def _int_record(rng):
    w, h = rng.randint(4, 300), rng.randint(4, 300)
    n = rng.randint(1, 8)
    boxes = tuple(rect_box(rng, w, h) if rng.random() < 0.5 else convex_polygon(rng, w, h) for _ in range(n))
    return ImageRecord(h, w, ContentAnn(bboxes=boxes))


@pytest.mark.acceptance("A5 transform coherence: no new Errors, resize inverse < 1e-9, exact involutions")
def test_transform_coherence(request):
    rng = random.Random(555)
    worst = 0.0
    for _ in range(300):
        rec = random_record(rng)
        stages = []
        for _ in range(rng.randint(1, 6)):
            kind = rng.choice(["Resize", "HFlip", "Rotate90"])
            if kind == "Resize":
                stages.append({"type": kind, "width": rng.randint(1, 2000), "height": rng.randint(1, 2000)})
            elif kind == "Rotate90":
                stages.append({"type": kind, "k": rng.randint(1, 3)})
            else:
                stages.append({"type": kind})
        assert _errors(validate_set(AnnotationSet({"x": rec}))) == 0
        out = run_pipeline(build_pipeline(PipelineConfig.from_json({"stages": stages})), rec)
        assert _errors(validate_set(AnnotationSet({"x": out}))) == 0

        back = apply_resize(apply_resize(rec, rng.randint(1, 2000), rng.randint(1, 2000)), rec.width, rec.height)
        for level_a, level_b in zip(rec.levels(), back.levels()):
            for a, b in zip(level_a[1].bboxes, level_b[1].bboxes):
                err = max(abs(p - q) for p, q in zip(a.points, b.points))
                worst = max(worst, err)
                assert err < 1e-9

        ints = _int_record(rng)
        assert apply_hflip(apply_hflip(ints)) == ints
        r = ints
        for _ in range(4):
            r = apply_rotate90(r, 1)
        assert r == ints
    request.node.acceptance_detail = f"max resize round-trip error {worst:.1e}"


@pytest.mark.acceptance("A6 chargrid oracle: 200 fixtures up to 64x64 with overlaps")
def test_chargrid_oracle(request):
    rng = random.Random(6464)
    overlaps = 0
    for _ in range(200):
        rec, vocab, out_w, out_h = random_chargrid_case(rng)
        boxes = rec.content_ann.bboxes
        overlaps += len(set(boxes)) < len(boxes)
        grid = chargrid_rasterize(rec, vocab, out_w, out_h)
        want = chargrid_per_cell(rec.width, rec.height, [b.points for b in boxes],
                                 rec.content_ann.texts, vocab, out_w, out_h)
        assert list(grid.cells) == want
    assert overlaps > 0
    request.node.acceptance_detail = f"{overlaps} cases with repeated boxes"


@pytest.mark.acceptance("A7 converter round-trips: COCO, ICDAR, CoNLL, 200 sets each")
def test_converter_round_trips(request):
    rng = random.Random(777)
    for _ in range(200):
        s = coco_representable_set(rng)
        doc = CocoDetectionDoc.loads(json.dumps(to_coco_detection(s).to_json()))
        assert from_coco_detection(doc) == s
    for _ in range(200):
        s = icdar_representable_set(rng)
        sizes = {p: (r.width, r.height) for p, r in s.items()}
        assert from_icdar_spotting(to_icdar_spotting(s), sizes) == s
    for _ in range(200):
        rec = conll_representable_record(rng)
        assert conll_from(ner_to_conll(rec)) == rec


@pytest.mark.acceptance("A8 CLI contract: goldens for every command, repeatable output, exit codes")
def test_cli_contract(request, tmp_path):
    commands = set()
    for i, (name, argv, code) in enumerate(CASES):
        runs = []
        for j in range(2):
            out_dir = tmp_path / f"{i}_{j}"
            rc, out, err = run_cli(argv, out_dir)
            runs.append((rc, out, _tree(out_dir)))
        assert runs[0] == runs[1], name
        rc, out, files = runs[0]
        assert rc == code, name
        assert out == _golden_stdout(name), name
        if name.startswith("convert_"):
            assert files == _tree(GOLDEN / name), name
        if argv:
            commands.add(argv[0])
    assert commands == {"validate", "stats", "convert", "project", "pipeline", "chargrid", "eval"}
    request.node.acceptance_detail = f"{len(CASES)} golden cases, 7 commands"

import dataclasses
import json

import numpy as np
import pytest

from potholeval.boxgeom import NormBox
from potholeval.dataio import Annotation, Detection, serialize_annotations, serialize_detections
from potholeval.errors import ParseError, ValidationError
from potholeval.metrics import PRCurve
from potholeval.pipeline import (
    RunConfig,
    TimingSource,
    TrainingProvenance,
    bench_command,
    compare_runs,
    comparison_figure,
    emit_comparison,
    emit_pr_plot,
    emit_report,
    load_config,
    parse_report,
    run_evaluation,
    upscale_dir,
)
from potholeval.pipeline.bench import TimingStats
from potholeval.srcore import init_generator, save_generator

import synth


def write_corpus(root, entries):
    """entries: {image_id: (annotations, detections)}"""
    gt = root / "gt"
    det = root / "det"
    gt.mkdir(parents=True, exist_ok=True)
    det.mkdir(parents=True, exist_ok=True)
    for image_id, (annotations, detections) in entries.items():
        (gt / f"{image_id}.txt").write_text(serialize_annotations(annotations))
        if detections is not None:
            (det / f"{image_id}.txt").write_text(serialize_detections(detections))
    synth.write_manifest_for(root, sorted(entries))
    return RunConfig(
        manifest=str(root / "manifest.json"),
        ground_truth_dir=str(gt),
        detections_dir=str(det),
    )


def ann(cx, cy, w, h):
    return Annotation(0, NormBox(cx, cy, w, h))


def det(conf, cx, cy, w, h):
    return Detection(0, conf, NormBox(cx, cy, w, h))


class TestRunEvaluation:
    def test_perfect_detections(self, tmp_path):
        ids = synth.make_corpus(tmp_path, n_images=10, jitter=0.0, with_images=False)
        synth.write_manifest_for(tmp_path, ids)
        config = RunConfig(
            manifest=str(tmp_path / "manifest.json"),
            ground_truth_dir=str(tmp_path / "gt"),
            detections_dir=str(tmp_path / "det"),
        )
        report = run_evaluation(config)
        assert report.map_50 == 1.0
        assert report.map_range.mean == 1.0
        assert report.operating_point.precision == 1.0
        assert report.operating_point.recall == 1.0
        assert report.f1 == 1.0
        assert report.timing is None

    def test_empty_detections_everywhere(self, tmp_path):
        boxes = [ann(0.3, 0.3, 0.2, 0.2), ann(0.7, 0.7, 0.2, 0.2)]
        config = write_corpus(tmp_path, {
            "a": (boxes, []),
            "b": (boxes[:1], []),
        })
        report = run_evaluation(config)
        assert report.map_50 == 0.0
        assert report.f1 == 0.0
        assert sum(e.fn for e in report.per_image) == 3
        assert report.operating_point.degenerate

    def test_three_image_fixture_with_one_jittered_box(self, tmp_path):
        # jitter of 1/4 box width gives overlap 0.75/1.25 = 0.6 exactly
        base = ann(0.4, 0.4, 0.2, 0.2)
        jittered = det(0.55, 0.4 + 0.25 * 0.2, 0.4, 0.2, 0.2)
        config = write_corpus(tmp_path, {
            "a": ([base], [det(0.95, 0.4, 0.4, 0.2, 0.2)]),
            "b": ([base], [det(0.85, 0.4, 0.4, 0.2, 0.2)]),
            "c": ([base], [jittered]),
        })
        report = run_evaluation(config)
        assert report.map_range.per_threshold[0.5] == 1.0
        # ranked [TP, TP, FP] against 3 ground truths at 0.75
        assert report.map_range.per_threshold[0.75] == pytest.approx(2 / 3, abs=1e-12)

    def test_missing_equals_empty_detection_file(self, tmp_path):
        boxes = [ann(0.5, 0.5, 0.2, 0.2)]
        config_missing = write_corpus(tmp_path / "m", {"a": (boxes, None), "b": (boxes, [])})
        config_empty = write_corpus(tmp_path / "e", {"a": (boxes, []), "b": (boxes, [])})
        report_a = run_evaluation(config_missing)
        report_b = run_evaluation(config_empty)
        dict_a = json.loads(emit_report(report_a, "json"))
        dict_b = json.loads(emit_report(report_b, "json"))
        dict_a["config"] = dict_b["config"] = None  # paths necessarily differ
        assert dict_a == dict_b

    def test_order_independence(self, tmp_path):
        ids = synth.make_corpus(tmp_path, n_images=8, jitter=0.1, with_images=False)
        manifest = tmp_path / "manifest.json"
        payload = {"seed": 0, "train": [], "val": [], "test": list(ids)}
        manifest.write_text(json.dumps(payload))
        config = RunConfig(
            manifest=str(manifest),
            ground_truth_dir=str(tmp_path / "gt"),
            detections_dir=str(tmp_path / "det"),
        )
        first = emit_report(run_evaluation(config), "json")
        payload["test"] = list(reversed(ids))
        manifest.write_text(json.dumps(payload))
        assert emit_report(run_evaluation(config), "json") == first

    def test_missing_gt_file_is_partial_failure(self, tmp_path):
        config = write_corpus(tmp_path, {"a": ([ann(0.5, 0.5, 0.2, 0.2)], [])})
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        manifest["test"].append("ghost")
        (tmp_path / "manifest.json").write_text(json.dumps(manifest))
        report = run_evaluation(config)
        assert report.partial
        entries = {e.image_id: e for e in report.per_image}
        assert entries["ghost"].error is not None
        assert entries["a"].error is None

    def test_malformed_gt_aborts_with_diagnostics(self, tmp_path):
        config = write_corpus(tmp_path, {"a": ([ann(0.5, 0.5, 0.2, 0.2)], [])})
        (tmp_path / "gt" / "a.txt").write_text("0 0.5 NOPE 0.2 0.2\n")
        with pytest.raises(ParseError, match="a.txt.*line 1"):
            run_evaluation(config)

    def test_fixed_confidence_operating_point(self, tmp_path):
        boxes = [ann(0.5, 0.5, 0.2, 0.2)]
        config = write_corpus(tmp_path, {
            "a": (boxes, [det(0.9, 0.5, 0.5, 0.2, 0.2)]),
            "b": (boxes, [det(0.4, 0.9, 0.9, 0.1, 0.1)]),
        })
        config = dataclasses.replace(
            config, operating_point_mode="fixed", operating_point_confidence=0.8
        )
        report = run_evaluation(config)
        assert report.operating_point.confidence == 0.9
        assert report.operating_point.recall == 0.5

    def test_missing_paths_fail_fast(self, tmp_path):
        config = RunConfig(
            manifest=str(tmp_path / "nope.json"),
            ground_truth_dir=str(tmp_path),
            detections_dir=str(tmp_path),
        )
        with pytest.raises(ValidationError, match="manifest"):
            run_evaluation(config)


class TestTiming:
    def test_command_timing_populates_stats(self, tmp_path):
        ids = synth.make_corpus(tmp_path, n_images=3, with_images=True)
        synth.write_manifest_for(tmp_path, ids)
        config = RunConfig(
            manifest=str(tmp_path / "manifest.json"),
            ground_truth_dir=str(tmp_path / "gt"),
            detections_dir=str(tmp_path / "det"),
            image_dir=str(tmp_path / "img"),
            timing=TimingSource(kind="command", command="true {image}"),
        )
        report = run_evaluation(config)
        assert report.timing is not None
        assert len(report.timing.samples) == 3
        assert report.timing.mean == pytest.approx(
            sum(report.timing.samples) / 3, rel=1e-9
        )

    def test_internal_upscaler_timing(self, tmp_path):
        ids = synth.make_corpus(tmp_path, n_images=2, with_images=True)
        synth.write_manifest_for(tmp_path, ids)
        config = RunConfig(
            manifest=str(tmp_path / "manifest.json"),
            ground_truth_dir=str(tmp_path / "gt"),
            detections_dir=str(tmp_path / "det"),
            image_dir=str(tmp_path / "img"),
            timing=TimingSource(kind="upscaler", method="nearest", factor=2),
        )
        report = run_evaluation(config)
        assert report.timing is not None and len(report.timing.samples) == 2

    def test_timing_requires_image_dir(self, tmp_path):
        ids = synth.make_corpus(tmp_path, n_images=1, with_images=False)
        synth.write_manifest_for(tmp_path, ids)
        config = RunConfig(
            manifest=str(tmp_path / "manifest.json"),
            ground_truth_dir=str(tmp_path / "gt"),
            detections_dir=str(tmp_path / "det"),
            timing=TimingSource(kind="command", command="true {image}"),
        )
        with pytest.raises(ValidationError, match="image_dir"):
            run_evaluation(config)


class TestBench:
    def test_fixed_duration_command(self, tmp_path):
        images = [tmp_path / f"x{i}.ppm" for i in range(3)]
        for p in images:
            p.write_bytes(b"")
        result = bench_command("sh -c 'sleep 0.01' bench {image}", images, repetitions=1)
        assert not result.failures
        assert len(result.stats.samples) == 3
        assert 0.010 <= result.stats.mean <= 0.030

    def test_zero_images_empty_stats(self):
        result = bench_command("true {image}", [])
        assert result.stats.empty
        assert result.stats.mean is None

    def test_mean_times_count_equals_sum(self, tmp_path):
        images = [tmp_path / "a", tmp_path / "b"]
        for p in images:
            p.write_bytes(b"")
        stats = bench_command("true {image}", images, repetitions=3).stats
        assert stats.mean * len(stats.samples) == pytest.approx(
            sum(stats.samples), rel=1e-9
        )

    def test_failures_excluded_and_reported(self, tmp_path):
        good = tmp_path / "good"
        bad = tmp_path / "bad"
        good.write_bytes(b"")  # 'bad' intentionally missing
        result = bench_command("test -f {image}", [good, bad])
        assert len(result.stats.samples) == 1
        assert result.failures[0]["image"].endswith("bad")

    def test_template_needs_placeholder(self):
        with pytest.raises(ValidationError):
            bench_command("true", ["x"])


class TestUpscaleDir:
    def test_nearest_factor_4(self, tmp_path):
        synth.make_corpus(tmp_path, n_images=2, with_images=True)
        result = upscale_dir(tmp_path / "img", tmp_path / "up", method="nearest", factor=4)
        assert len(result.written) == 2
        from potholeval.dataio import read_image

        up = read_image(result.written[0])
        assert (up.dims.width, up.dims.height) == (synth.IMG_W * 4, synth.IMG_H * 4)
        assert len(result.stats.samples) == 2

    def test_factor_1_nearest_is_byte_identical(self, tmp_path):
        synth.make_corpus(tmp_path, n_images=1, with_images=True)
        src = next((tmp_path / "img").iterdir())
        upscale_dir(tmp_path / "img", tmp_path / "up", method="nearest", factor=1)
        assert (tmp_path / "up" / src.name).read_bytes() == src.read_bytes()

    def test_zero_weight_generator_gives_constant_image(self, tmp_path):
        synth.make_corpus(tmp_path, n_images=1, with_images=True)
        params = init_generator(
            n_features=4, growth_channels=2, n_rrdb_blocks=1, zero=True, tail_bias=0.5
        )
        weights = tmp_path / "gen.bin"
        weights.write_bytes(save_generator(params))
        result = upscale_dir(
            tmp_path / "img", tmp_path / "up", method="rrdb", factor=4, weights_path=weights
        )
        from potholeval.dataio import read_image

        up = read_image(result.written[0])
        assert (up.dims.width, up.dims.height) == (synth.IMG_W * 4, synth.IMG_H * 4)
        assert np.all(up.pixels == 128)  # 0.5 * 255 rounds half away to 128

    def test_unreadable_image_skipped(self, tmp_path):
        synth.make_corpus(tmp_path, n_images=1, with_images=True)
        (tmp_path / "img" / "broken.ppm").write_bytes(b"P6\n9 9\n255\nshort")
        result = upscale_dir(tmp_path / "img", tmp_path / "up", method="nearest", factor=2)
        assert len(result.written) == 1
        assert result.errors and result.errors[0]["image"] == "broken.ppm"

    def test_factor_weights_mismatch_aborts(self, tmp_path):
        synth.make_corpus(tmp_path, n_images=1, with_images=True)
        params = init_generator(n_features=4, growth_channels=2, n_rrdb_blocks=1, zero=True)
        weights = tmp_path / "gen.bin"
        weights.write_bytes(save_generator(params))
        with pytest.raises(ValidationError, match="upscale by"):
            upscale_dir(
                tmp_path / "img", tmp_path / "up", method="rrdb", factor=2,
                weights_path=weights,
            )


def quick_report(tmp_path, name, jitter=0.0, n_images=4):
    root = tmp_path / name
    ids = synth.make_corpus(root, n_images=n_images, jitter=jitter, with_images=False)
    synth.write_manifest_for(root, ids)
    config = RunConfig(
        manifest=str(root / "manifest.json"),
        ground_truth_dir=str(root / "gt"),
        detections_dir=str(root / "det"),
    )
    return run_evaluation(config)


class TestCompare:
    def test_identical_reports_zero_deltas(self, tmp_path):
        report = quick_report(tmp_path, "same")
        comparison = compare_runs(report, report, label="x")
        assert all(pair.delta == 0.0 for pair in comparison.metrics.values()
                   if pair.delta is not None)

    def test_sr_minus_lr(self, tmp_path):
        lr = quick_report(tmp_path, "lr", jitter=0.3)
        sr = quick_report(tmp_path, "sr", jitter=0.0)
        comparison = compare_runs(lr, sr)
        pair = comparison.metrics["map_range_mean"]
        assert pair.delta == pair.sr - pair.lr
        assert pair.delta > 0

    def test_mismatched_scoring_config_rejected(self, tmp_path):
        lr = quick_report(tmp_path, "a")
        sr = quick_report(tmp_path, "b")
        sr = dataclasses.replace(sr, config=dict(sr.config, iou_threshold=0.75))
        with pytest.raises(ValidationError, match="not comparable"):
            compare_runs(lr, sr)


class TestReportSerialization:
    def test_emit_parse_emit_byte_identical(self, tmp_path):
        report = quick_report(tmp_path, "rt", jitter=0.1)
        blob = emit_report(report, "json")
        assert emit_report(parse_report(blob), "json") == blob

    def test_json_key_order(self, tmp_path):
        report = quick_report(tmp_path, "keys")
        payload = json.loads(emit_report(report, "json"))
        assert list(payload) == [
            "schema_version", "config", "per_image", "curve", "map_50",
            "map_range", "operating_point", "f1", "timing", "version",
        ]

    def test_csv_summary_row(self, tmp_path):
        report = quick_report(tmp_path, "csv")
        lines = emit_report(report, "csv", label="run1").decode().splitlines()
        assert lines[0].startswith("label,images,gt_boxes,detections,map_50")
        assert len(lines) == 2
        assert lines[1].startswith("run1,4,")

    def test_comparison_csv_shape(self, tmp_path):
        lr = quick_report(tmp_path, "clr", jitter=0.2)
        sr = quick_report(tmp_path, "csr", jitter=0.0)
        comparison = compare_runs(lr, sr, label="combined")
        lines = emit_comparison(comparison, "csv").decode().splitlines()
        assert len(lines) == 4  # header + LR + SR + delta
        assert lines[1].startswith("combined LR,")
        assert lines[2].startswith("combined SR,")

    def test_config_file_round_trip(self, tmp_path):
        config = RunConfig(
            manifest="m.json",
            ground_truth_dir="gt",
            detections_dir="det",
            iou_range=(0.5, 0.9, 0.05),
            ap_mode="interp",
            timing=TimingSource(kind="command", command="true {image}"),
            training_provenance=TrainingProvenance(
                learning_rate=0.01, momentum=0.934, weight_decay=0.0005,
                warmup_epochs=3, warmup_momentum=0.8, warmup_bias_lr=0.1,
                batch_size=12, epochs=150,
            ),
        )
        path = tmp_path / "config.json"
        path.write_text(json.dumps(config.to_dict()))
        assert load_config(path) == config


class TestPlots:
    def make_curve(self, tmp_path):
        return quick_report(tmp_path, "plot", jitter=0.1, n_images=6).curve

    def test_svg_and_csv(self, tmp_path):
        curve = self.make_curve(tmp_path)
        plot = emit_pr_plot(curve)
        assert plot.svg.startswith(b"<?xml")
        assert plot.warning is None
        lines = plot.csv.decode().splitlines()
        assert lines[0] == "confidence,recall,precision"
        assert len(lines) == len(curve.points) + 1

    def test_rendering_is_deterministic(self, tmp_path):
        curve = self.make_curve(tmp_path)
        assert emit_pr_plot(curve).svg == emit_pr_plot(curve).svg

    def test_empty_curve_placeholder(self):
        plot = emit_pr_plot(PRCurve((), total_gt=0, iou_threshold=0.5))
        assert plot.warning is not None
        assert plot.svg.startswith(b"<?xml")
        assert plot.csv.decode().splitlines() == ["confidence,recall,precision"]

    def test_comparison_figure(self, tmp_path):
        lr = quick_report(tmp_path, "flr", jitter=0.2)
        sr = quick_report(tmp_path, "fsr", jitter=0.0)
        svg = comparison_figure(compare_runs(lr, sr, label="exp"))
        assert svg.startswith(b"<?xml")


class TestTimingStats:
    def test_from_samples(self):
        stats = TimingStats.from_samples([0.2, 0.1, 0.3])
        assert stats.mean == pytest.approx(0.2)
        assert stats.median == 0.2
        assert (stats.min, stats.max) == (0.1, 0.3)

    def test_round_trip(self):
        stats = TimingStats.from_samples([0.5, 0.25])
        assert TimingStats.from_dict(stats.to_dict()) == stats

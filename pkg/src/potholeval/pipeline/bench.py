"""Wall-clock timing of per-image commands.

Invocations are strictly serialized and one warm-up run (the first image)
is excluded from the statistics, so first-run noise (loader caches, JIT,
page faults) does not skew the per-image mean.
"""

from __future__ import annotations

import shlex
import statistics
import subprocess
import time
from dataclasses import dataclass, field

from ..errors import ValidationError

IMAGE_PLACEHOLDER = "{image}"


@dataclass(frozen=True)
class TimingStats:
    """Per-invocation wall seconds plus summary statistics."""

    samples: tuple[float, ...]
    mean: float | None
    median: float | None
    min: float | None
    max: float | None

    @classmethod
    def from_samples(cls, samples) -> "TimingStats":
        samples = tuple(float(s) for s in samples)
        if not samples:
            return cls((), None, None, None, None)
        return cls(
            samples,
            mean=statistics.fmean(samples),
            median=statistics.median(samples),
            min=min(samples),
            max=max(samples),
        )

    @property
    def empty(self) -> bool:
        return not self.samples

    def to_dict(self) -> dict:
        return {
            "samples": list(self.samples),
            "mean": self.mean,
            "median": self.median,
            "min": self.min,
            "max": self.max,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TimingStats":
        return cls(
            samples=tuple(data["samples"]),
            mean=data["mean"],
            median=data["median"],
            min=data["min"],
            max=data["max"],
        )


@dataclass(frozen=True)
class BenchResult:
    stats: TimingStats
    failures: tuple[dict, ...] = field(default_factory=tuple)


def _timed_call(argv) -> tuple[float, int]:
    start = time.perf_counter()
    proc = subprocess.run(argv, capture_output=True)
    return time.perf_counter() - start, proc.returncode


def bench_command(template: str, images, repetitions: int = 1) -> BenchResult:
    """Time an external command once per image per repetition.

    ``template`` must contain the ``{image}`` placeholder; it is split
    shell-style and run without a shell. Failing invocations (nonzero
    exit) are excluded from the statistics and reported separately.
    """
    if IMAGE_PLACEHOLDER not in template:
        raise ValidationError(f"command template must contain {IMAGE_PLACEHOLDER!r}")
    if repetitions < 1:
        raise ValidationError(f"repetitions {repetitions} must be >= 1")
    images = [str(p) for p in images]
    if not images:
        return BenchResult(TimingStats.from_samples([]))
    argv_template = shlex.split(template)

    def argv_for(image):
        return [arg.replace(IMAGE_PLACEHOLDER, image) for arg in argv_template]

    _timed_call(argv_for(images[0]))  # warm-up, excluded
    samples = []
    failures = []
    for _ in range(repetitions):
        for image in images:
            elapsed, code = _timed_call(argv_for(image))
            if code == 0:
                samples.append(elapsed)
            else:
                failures.append({"image": image, "exit_code": code})
    return BenchResult(TimingStats.from_samples(samples), tuple(failures))

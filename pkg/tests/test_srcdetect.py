"""Extension-whitelist heuristic, including the strict threshold boundary."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repominer.srcdetect import (
    DEFAULT_EXTENSIONS,
    SourceDetectConfig,
    classify_file,
    detect,
    load_config,
)


class TestClassifyFile:
    @pytest.mark.parametrize(
        "path,expected",
        [
            ("src/bot.c", True),
            ("README.md", False),
            ("LOADER.PY", True),
            ("payload.ASM", True),
            ("scripts/run.sh", True),
            ("attack.ps1", True),
            ("matrix.m", True),
            ("notes.txt", False),
            ("Makefile", False),
            (".gitignore", False),
            ("archive.tar.gz", False),
            ("deep/path/to/inject.cpp", True),
        ],
    )
    def test_extension_whitelist(self, path, expected):
        assert classify_file(path) is expected

    def test_empty_path_rejected(self):
        with pytest.raises(ValueError):
            classify_file("")

    def test_whitelist_covers_all_stated_languages(self):
        assert {"asm", "s", "c", "h", "cpp", "hpp", "cc", "bat", "sh", "ps1",
                "java", "py", "cs", "m", "pas", "vb", "php", "js", "go"} == set(DEFAULT_EXTENSIONS)


class TestDetect:
    def test_four_of_five_detected(self):
        verdict = detect(["a.c", "b.c", "c.py", "d.go", "README.md"])
        assert verdict.source_ratio == pytest.approx(0.8)
        assert verdict.is_source is True

    def test_exact_threshold_not_detected(self):
        # 3/4 = 0.75 exactly; "more than 75%" is strict
        verdict = detect(["a.c", "b.c", "c.py", "README.md"])
        assert verdict.source_ratio == 0.75
        assert verdict.is_source is False

    def test_empty_repo(self):
        verdict = detect([])
        assert verdict == detect([])
        assert verdict.is_source is False and verdict.source_ratio == 0.0

    def test_directories_excluded(self):
        verdict = detect(["src/", "src/a.c"])
        assert verdict.total_file_count == 1
        assert verdict.is_source is True

    def test_custom_threshold(self):
        config = SourceDetectConfig(threshold=0.5)
        assert detect(["a.c", "b.md"], config).is_source is False  # 0.5 not > 0.5
        assert detect(["a.c", "b.c", "c.md"], config).is_source is True

    def test_bad_threshold_rejected(self):
        with pytest.raises(ValueError):
            SourceDetectConfig(threshold=0.0)
        with pytest.raises(ValueError):
            SourceDetectConfig(threshold=1.5)
        with pytest.raises(ValueError):
            SourceDetectConfig(extensions=frozenset())


source_files = st.lists(st.sampled_from(["a.c", "b.py", "c/d.go", "x.java"]), max_size=30)
other_files = st.lists(st.sampled_from(["r.md", "notes.txt", "img.png", "Makefile"]), max_size=30)


@given(source_files, other_files)
@settings(max_examples=200, deadline=None)
def test_ratio_monotonicity(src, other):
    base = detect(src + other)
    more_src = detect(src + other + ["extra.c"])
    fewer = detect(src + other + ["extra.doc"])
    assert more_src.source_ratio >= base.source_ratio
    assert fewer.source_ratio <= base.source_ratio


@given(st.integers(1, 40))
@settings(max_examples=60, deadline=None)
def test_strictness_boundary(n):
    # exactly 3/4 of files whitelisted -> never source at the default threshold
    files = [f"s{i}.c" for i in range(3 * n)] + [f"d{i}.md" for i in range(n)]
    verdict = detect(files)
    assert verdict.source_ratio == pytest.approx(0.75)
    assert verdict.is_source is False


def test_load_config(tmp_path):
    path = tmp_path / "detect.conf"
    path.write_text("# overrides\nthreshold = 0.6\nextensions = c, PY , .go\n")
    config = load_config(path)
    assert config.threshold == 0.6
    assert config.extensions == frozenset({"c", "py", "go"})
    bad = tmp_path / "bad.conf"
    bad.write_text("nonsense\n")
    with pytest.raises(ValueError):
        load_config(bad)

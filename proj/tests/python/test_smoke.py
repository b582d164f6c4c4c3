import json
from pathlib import Path

import pytest

import colorgpt

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="module")
def namer():
    return colorgpt.ColorNamer(str(colorgpt.default_dictionary()))


def test_color_conversions():
    assert colorgpt.hex_to_rgb("#ff7f00") == (255, 127, 0)
    assert colorgpt.rgb_to_hex((255, 127, 0)) == "#ff7f00"
    l, a, b = colorgpt.rgb_to_lab((255, 255, 255))
    assert l == pytest.approx(100, abs=0.1) and abs(a) < 0.1 and abs(b) < 0.1
    assert colorgpt.lab_to_rgb(l, a, b) == (255, 255, 255)
    assert colorgpt.delta_e("#ffffff", "#000000") == pytest.approx(100, abs=0.5)


def test_errors_map_to_python_exceptions():
    with pytest.raises(colorgpt.ParseError):
        colorgpt.hex_to_rgb("#12345")
    with pytest.raises(colorgpt.ValidationError):
        colorgpt.rgb_to_hex((256, 0, 0))
    with pytest.raises(colorgpt.Error):
        colorgpt.palette_diversity(["#ffffff"])
    with pytest.raises(colorgpt.IoError):
        colorgpt.ColorNamer("/nonexistent/dict.txt")


def test_naming(namer):
    assert len(namer) == 949
    assert namer.hex_to_word("#ffffff") == "white"
    assert namer.word_to_hex("white") == "#ffffff"
    assert namer.word_to_hex("ocean breeze") == "#43856a"


def test_metrics():
    assert colorgpt.bin_accuracy([(["#123456"], ["#1f3f5f"]), (["#123456"], ["#ff0000"])]) == 50.0
    assert colorgpt.distribution(["#000000", "#010101"]) == 0.0
    assert colorgpt.palette_similarity(["#ff0000", "#00ff00"], ["#00ff00", "#ff0000"]) == 0.0
    assert colorgpt.palette_similarity(["#ffffff"], ["#000000"], space="rgb") == pytest.approx(255 * 3 ** 0.5)
    assert colorgpt.palette_diversity(["#ffffff", "#000000"]) == pytest.approx(100, abs=0.5)


def test_documents_and_masking():
    line = (FIXTURES / "corpus.jsonl").read_text().splitlines()[0]
    doc = colorgpt.normalize_document(line)
    assert doc["id"] == "doc-00"
    masked, record = colorgpt.mask_document(doc, 2, seed=3)
    assert json.dumps(masked).count("[MASK]") == 2
    assert record["k"] == 2 and len(record["masked"]) == 2
    assert colorgpt.mask_document(doc, 2, seed=3) == (masked, record)


def test_extract_json():
    assert colorgpt.extract_json('Sure!\n```json\n["#ffffff"]\n```') == ["#ffffff"]
    assert colorgpt.extract_json("no json here") is None


def test_extract_palette():
    assert colorgpt.extract_palette(str(FIXTURES / "stripes.png"))[0] == "#1f3a93"


def test_run_benchmark(tmp_path):
    report = colorgpt.run_benchmark(FIXTURES / "completion_echo.json", tmp_path)
    assert [m["accuracy"] for m in report["arms"][0]["by_mask_count"]] == [100.0, 100.0, 100.0]
    assert (tmp_path / "report.json").exists()
    gen = colorgpt.run_benchmark(FIXTURES / "generation_echo.json")
    assert gen["arms"][0]["similarity"]["mean"] == 0.0


def test_service():
    service = colorgpt.Service(FIXTURES / "service.json")
    status, health = service.health()
    assert status == 200 and health["dict_size"] == 949
    line = (FIXTURES / "corpus.jsonl").read_text().splitlines()[12]
    masked, _ = colorgpt.mask_document(line, 1, seed=1)
    status, reply = service.complete(masked)
    assert status == 200
    assert reply["colors"] == ["#123456"]
    status, reply = service.generate("green grass", representation="hex")
    assert status == 200 and len(reply["palette"]) == 5
    status, reply = service.generate("   ")
    assert status == 400 and "error" in reply

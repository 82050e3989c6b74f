import json
from pathlib import Path

from fastapi.testclient import TestClient

from slidegen.cli import main
from slidegen.derivability import ForestConfig, fit, save_forest
from slidegen.embedding import load_embedder
from slidegen.service import ServiceConfig, create_app

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
PAPER = str(FIXTURES / "sample_paper.json")
DECK = str(FIXTURES / "sample_deck.json")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_ingest_summary(capsys, manifest):
    code, out, _ = run(capsys, "ingest", "--paper", PAPER)
    assert code == 0
    assert f"{manifest['paper']['section_count']} sections" in out
    assert f"{manifest['paper']['total_sentences']} sentences" in out


def test_unknown_flag_is_usage_error(capsys):
    code, _, err = run(capsys, "ingest", "--nope")
    assert code == 1
    assert "usage" in err


def test_unknown_command_is_usage_error(capsys):
    code, _, _ = run(capsys, "frobnicate")
    assert code == 1


def test_missing_file_is_data_error(capsys):
    code, _, err = run(capsys, "ingest", "--paper", "does-not-exist.json")
    assert code == 2
    assert "error" in err


def test_bad_paper_is_data_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"title": "no ids here"}')
    code, _, err = run(capsys, "ingest", "--paper", str(bad))
    assert code == 2
    assert "SchemaError" in err


def test_generate_markdown(capsys):
    code, out, _ = run(capsys, "generate", "--paper", PAPER, "--title", "Results")
    assert code == 0
    assert out.startswith("# Results\n")
    assert "\n- " in out


def test_generate_remote_needs_endpoint(capsys, monkeypatch):
    monkeypatch.delenv("D2S_GEN_URL", raising=False)
    code, _, err = run(
        capsys, "generate", "--paper", PAPER, "--title", "Results",
        "--generator", "remote",
    )
    assert code == 2
    assert "D2S_GEN_URL" in err


def test_service_config_reads_env(monkeypatch):
    from slidegen.service import ServiceConfig

    monkeypatch.setenv("D2S_EMBED_URL", "http://embed.test")
    monkeypatch.setenv("D2S_GEN_URL", "http://gen.test")
    config = ServiceConfig.from_env(port=9999)
    assert config.embed_url == "http://embed.test"
    assert config.gen_url == "http://gen.test"
    assert config.port == 9999


def test_generate_json_matches_api_bytes(capsys, paper_bytes):
    code, out, _ = run(
        capsys, "generate", "--paper", PAPER, "--title", "Results", "--json",
        "--dim", "64", "--seed", "0",
    )
    assert code == 0

    app = create_app(ServiceConfig(embed_dim=64, seed=0))
    client = TestClient(app)
    assert client.post("/papers", content=paper_bytes).status_code == 201
    resp = client.post(
        "/papers/gauge-forecast-demo/slides", json={"title": "Results", "k": 10}
    )
    assert out.strip().encode() == resp.content


def test_retrieve_json(capsys):
    code, out, _ = run(capsys, "retrieve", "--paper", PAPER, "--title", "Datasets", "--k", "3")
    assert code == 0
    payload = json.loads(out)
    assert len(payload["candidates"]) == 3
    assert {"snippet_id", "score", "text"} <= set(payload["candidates"][0])


def test_figures_json(capsys):
    code, out, _ = run(capsys, "figures", "--paper", PAPER, "--title", "Results")
    assert code == 0
    assert len(json.loads(out)["figures"]) == 5


def test_index_build_and_reuse(tmp_path, capsys):
    index_path = tmp_path / "paper.idx"
    code, out, _ = run(capsys, "index", "--paper", PAPER, "--out", str(index_path))
    assert code == 0 and index_path.exists()

    code, fresh, _ = run(capsys, "retrieve", "--paper", PAPER, "--title", "Results")
    assert code == 0
    code, cached, _ = run(
        capsys, "retrieve", "--paper", PAPER, "--title", "Results", "--index", str(index_path)
    )
    assert code == 0
    assert fresh == cached


def test_stats(capsys, manifest):
    code, out, _ = run(capsys, "stats", "--decks", DECK, "--papers", PAPER)
    assert code == 0
    assert f"slides {manifest['deck']['slide_count']}" in out
    assert "novel n-grams" in out


def test_eval_writes_reports(tmp_path, capsys):
    code, out, _ = run(
        capsys, "eval", "--papers", PAPER, "--decks", DECK,
        "--report-dir", str(tmp_path), "--dim", "64",
    )
    assert code == 0
    assert "retrieval" in out
    report = json.loads((tmp_path / "report.json").read_text())
    assert set(report["retrieval"]) == {"bm25", "dense_text", "dense_keyword", "dense_mix"}
    assert (tmp_path / "report.txt").exists()


def test_eval_report_matches_harness_golden(tmp_path, capsys):
    from test_evaluation import assert_reports_close

    code, _, _ = run(
        capsys, "eval", "--papers", PAPER, "--decks", DECK,
        "--report-dir", str(tmp_path),
    )
    assert code == 0
    golden = json.loads(
        (Path(__file__).resolve().parent / "golden" / "fixture_eval.json").read_text()
    )
    report = json.loads((tmp_path / "report.json").read_text())
    assert_reports_close(report, golden)


def test_train_embedder(tmp_path, capsys):
    out_path = tmp_path / "emb.bin"
    code, out, _ = run(
        capsys, "train-embedder", "--decks", DECK, "--papers", PAPER,
        "--out", str(out_path), "--dim", "64", "--epochs", "5",
    )
    assert code == 0 and out_path.exists()
    assert "loss" in out
    emb = load_embedder(out_path)
    assert emb.dim == 64


def test_serve_subprocess():
    import socket
    import subprocess
    import sys
    import time

    import requests

    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]

    proc = subprocess.Popen(
        [sys.executable, "-m", "slidegen.cli", "serve",
         "--port", str(port), "--papers", PAPER],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
    )
    try:
        base = f"http://127.0.0.1:{port}"
        for _ in range(100):
            try:
                if requests.get(base + "/health", timeout=1).status_code == 200:
                    break
            except requests.RequestException:
                time.sleep(0.1)
        else:
            raise AssertionError("service never became healthy")
        outline = requests.get(base + "/papers/gauge-forecast-demo/outline", timeout=5)
        assert outline.status_code == 200
        assert outline.json()["children"]
    finally:
        proc.terminate()
        proc.wait(timeout=10)


def test_filter_cli(tmp_path, capsys, paper, deck):
    from test_derivability import fixture_annotations
    from slidegen.derivability import annotation_samples

    samples = annotation_samples(fixture_annotations(deck), [deck], [paper])
    forest = fit(samples, ForestConfig(n_trees=60, seed=21))
    model_path = tmp_path / "forest.bin"
    save_forest(forest, model_path)

    out_dir = tmp_path / "filtered"
    code, out, _ = run(
        capsys, "filter", "--decks", DECK, "--papers", PAPER,
        "--model", str(model_path), "--out-dir", str(out_dir),
    )
    assert code == 0
    report = json.loads(out)
    assert report["lines_removed"] == 2
    filtered = json.loads((out_dir / "gauge-forecast-demo.json").read_text())
    assert len(filtered["slides"]) == 8

"""HTTP service: routes, error mapping, and parity with direct calls."""

import json

import pytest
from fastapi.testclient import TestClient

from speechrisk import __version__
from speechrisk.service.app import create_app

FAST_BODY = {"c_grid": [1.0, 0.01], "seed": 0}


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    resp = client.get("/v1/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok", "version": __version__}


class TestStatsRoute:
    def test_ok(self, client, tiny_cohort):
        resp = client.post("/v1/stats", json={
            "manifests_dir": str(tiny_cohort.layout.manifests_dir)})
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["rows"][-1]["label"] == "Total"
        assert "Sample Type" in doc["rendered"]
        assert doc["report_path"] is None

    def test_missing_dir_404(self, client, tmp_path):
        resp = client.post("/v1/stats", json={
            "manifests_dir": str(tmp_path / "missing")})
        assert resp.status_code == 404
        assert resp.json()["detail"]["error"] == "MissingFileError"

    def test_malformed_manifest_422(self, client, tmp_path):
        (tmp_path / "rec.json").write_text(json.dumps({"recording_id": "rec"}))
        resp = client.post("/v1/stats", json={"manifests_dir": str(tmp_path)})
        assert resp.status_code == 422
        assert "SchemaViolation" in resp.json()["detail"]["error"]


class TestEvaluateRoute:
    def test_ok(self, client, tiny_cohort):
        resp = client.post("/v1/evaluate", json={
            "features_dir": str(tiny_cohort.features_dir),
            "metadata_path": str(tiny_cohort.layout.metadata_path),
            "config": FAST_BODY,
        })
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["source"] == "compact"
        assert doc["n_subjects"] == 4
        assert 0.0 <= doc["subject_balanced_accuracy"] <= 1.0
        assert len(doc["subjects"]) == 4
        assert {s["subject_id"] for s in doc["subjects"]} == {
            "subj-000", "subj-001", "subj-002", "subj-003"}

    def test_matches_cli_result(self, client, tiny_cohort, tmp_path):
        # same request through both clients lands on the same numbers
        resp = client.post("/v1/evaluate", json={
            "features_dir": str(tiny_cohort.features_dir),
            "metadata_path": str(tiny_cohort.layout.metadata_path),
            "config": FAST_BODY,
            "out_dir": str(tmp_path / "service_report"),
        })
        assert resp.status_code == 200
        from speechrisk.cli import main
        config = tmp_path / "run.json"
        config.write_text(json.dumps(FAST_BODY))
        assert main([
            "evaluate",
            "--features", str(tiny_cohort.features_dir),
            "--metadata", str(tiny_cohort.layout.metadata_path),
            "--config", str(config),
            "--out", str(tmp_path / "cli_report"),
        ]) == 0
        service_files = sorted(p.name for p in
                               (tmp_path / "service_report").iterdir())
        for name in service_files:
            a = (tmp_path / "service_report" / name).read_bytes()
            b = (tmp_path / "cli_report" / name).read_bytes()
            assert a == b, f"{name} differs between service and CLI"

    def test_unknown_source_400(self, client, tiny_cohort):
        resp = client.post("/v1/evaluate", json={
            "features_dir": str(tiny_cohort.features_dir),
            "metadata_path": str(tiny_cohort.layout.metadata_path),
            "source": "bogus",
        })
        assert resp.status_code == 400
        assert resp.json()["detail"]["error"] == "ValueError"

    def test_metadata_only(self, client, tiny_cohort):
        resp = client.post("/v1/evaluate", json={
            "features_dir": str(tiny_cohort.features_dir),
            "metadata_path": str(tiny_cohort.layout.metadata_path),
            "metadata_only": True,
            "metadata_level": 3,
            "config": FAST_BODY,
        })
        assert resp.status_code == 200
        assert resp.json()["source"] == "metadata_only"

    def test_body_validation_is_fastapi_422(self, client):
        resp = client.post("/v1/evaluate", json={
            "features_dir": "x", "metadata_path": "y",
            "metadata_level": 99})
        assert resp.status_code == 422
        # pydantic validation shape, not the domain error mapping
        assert isinstance(resp.json()["detail"], list)


class TestSynthRoute:
    def test_ok_then_stats(self, client, tmp_path):
        resp = client.post("/v1/synth", json={
            "out_dir": str(tmp_path / "cohort"),
            "n_subjects": 4,
            "n_text_recordings": 0,
            "n_picdesc_recordings": 0,
            "seed": 21,
        })
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["subject_ids"] == ["subj-000", "subj-001", "subj-002",
                                      "subj-003"]
        assert doc["n_recordings"] == 20
        stats = client.post("/v1/stats", json={
            "manifests_dir": doc["manifests_dir"]})
        assert stats.status_code == 200
        rows = stats.json()["rows"]
        assert [r["label"] for r in rows] == [
            "Pic. Desc.", "Neut. Texts", "Vowels", "Total"]
        assert rows[2]["count"] == 20
        assert rows[0]["count"] == 0

    def test_invalid_spec_rejected_by_model(self, client, tmp_path):
        resp = client.post("/v1/synth", json={
            "out_dir": str(tmp_path), "n_subjects": 2})
        assert resp.status_code == 422
        assert isinstance(resp.json()["detail"], list)


class TestSegmentExtractRoutes:
    def test_segment_then_extract(self, client, tmp_path):
        from .test_pipeline import _speech_like
        _speech_like(tmp_path / "audio" / "s1" / "rec.wav")
        seg = client.post("/v1/segment", json={
            "audio_dir": str(tmp_path / "audio"),
            "manifests_dir": str(tmp_path / "manifests"),
            "kind": "neutral_text",
        })
        assert seg.status_code == 200
        assert seg.json()["n_spans"] == 2
        assert seg.json()["errors"] == []
        ext = client.post("/v1/extract", json={
            "audio_dir": str(tmp_path / "audio"),
            "manifests_dir": str(tmp_path / "manifests"),
            "features_dir": str(tmp_path / "features"),
            "sources": ["compact"],
        })
        assert ext.status_code == 200
        assert ext.json()["n_segments"] == 2
        assert ext.json()["n_files"] == 2

    def test_extract_missing_audio_404(self, client, tmp_path):
        (tmp_path / "manifests").mkdir()
        resp = client.post("/v1/extract", json={
            "audio_dir": str(tmp_path / "audio"),
            "manifests_dir": str(tmp_path / "manifests"),
            "features_dir": str(tmp_path / "features"),
        })
        assert resp.status_code == 404

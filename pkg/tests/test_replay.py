import pytest

from sentinel.errors import ParseError
from sentinel.ingest.replay import MetricUpdate, ReplayBatch, replay_load, replay_record


def sample_batches(count=50):
    return [
        ReplayBatch(
            ts=float(i),
            updates=(
                MetricUpdate("pod-1", "cpu_usage", 0.1 * i),
                MetricUpdate("pod-2", "mem_usage", 1e8 + i),
            ),
        )
        for i in range(count)
    ]


class TestRoundTrip:
    def test_record_then_load_is_identity(self, tmp_path):
        path = str(tmp_path / "stream.jsonl")
        batches = sample_batches(50)
        replay_record(path, batches)
        loaded = list(replay_load(path))
        assert loaded == batches

    def test_empty_file_yields_empty_iterator(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        assert list(replay_load(str(path))) == []

    def test_batches_come_back_in_timestamp_order(self, tmp_path):
        path = str(tmp_path / "out-of-order.jsonl")
        batches = sample_batches(10)
        replay_record(path, reversed(batches))
        loaded = list(replay_load(path))
        assert [b.ts for b in loaded] == sorted(b.ts for b in batches)


class TestParseErrors:
    def test_malformed_line_reports_line_number(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        lines = ['{"ts": %d, "updates": []}' % i for i in range(1, 10)]
        lines[6] = "{not json"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError) as exc:
            list(replay_load(str(path)))
        assert exc.value.line == 7

    def test_missing_key_is_parse_error(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"ts": 1}\n')
        with pytest.raises(ParseError) as exc:
            list(replay_load(str(path)))
        assert exc.value.line == 1

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "gaps.jsonl"
        path.write_text('{"ts": 1, "updates": []}\n\n{"ts": 2, "updates": []}\n')
        assert len(list(replay_load(str(path)))) == 2

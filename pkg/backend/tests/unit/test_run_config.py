"""
Unit tests for run configurations and the time-grid grammar.
"""
import pytest
from pydantic import ValidationError

from src.models.run_config import RunConfig, parse_points, parse_time_grid


class TestGrids:
    def test_linear(self):
        assert parse_time_grid("0:1:5") == [0.0, 0.25, 0.5, 0.75, 1.0]

    def test_log(self):
        assert parse_time_grid("0.01:1:3:log") == pytest.approx([0.01, 0.1, 1.0])

    def test_list(self):
        assert parse_time_grid(" 0.5, 1 ,") == [0.5, 1.0]

    @pytest.mark.parametrize("text", ["1:2", "1:2:3:lin", "0:1:3:log", "0:1:0"])
    def test_rejects(self, text):
        with pytest.raises(ValueError):
            parse_time_grid(text)

    def test_points(self):
        assert parse_points("0.1;0.2,0.3;") == [(0.1,), (0.2, 0.3)]


class TestRunConfig:
    def test_defaults(self):
        config = RunConfig(command="kernel")
        assert config.group == "su2"
        assert config.times == [1.0]
        assert config.tail == 1e-12
        assert config.points is None

    def test_text_round_trip(self):
        config = RunConfig(
            command="kernel",
            group="torus:2",
            exponent="family=cauchy sigma=1.0",
            times="0.1:0.3:3",
            points="0.1,0.2;0.0,0.5",
            as_json=True,
            window="0.001:0.01",
            only="zeta,karamata",
        )
        text = config.to_text()
        assert text.startswith("command=kernel\ngroup=torus:2\n")
        assert "json=true" in text
        assert RunConfig.from_text(text) == config

    def test_comments_and_overrides(self):
        text = "# kernel run\ncommand=kernel\nt=0.5  # one time\njson=yes\n"
        config = RunConfig.from_text(text, times="2.0", group=None)
        assert config.times == [2.0]
        assert config.group == "su2"
        assert config.as_json

    @pytest.mark.parametrize("text", ["command=kernel\nnonsense\n", "command=kernel\ncolour=red\n",
                                      "command=kernel\njson=maybe\n"])
    def test_bad_text(self, text):
        with pytest.raises(ValueError):
            RunConfig.from_text(text)

    @pytest.mark.parametrize(
        "fields",
        [
            {"command": "bogus"},
            {"command": "kernel", "times": "-1"},
            {"command": "kernel", "times": ""},
            {"command": "classify", "level": "Ck"},
            {"command": "classify", "level": "C7"},
            {"command": "fit", "window": "0.1:0.01"},
            {"command": "fit", "window": "0.1"},
            {"command": "fit", "samples": 3},
            {"command": "explore", "alpha": 2.0},
            {"command": "kernel", "tail": 0.0},
        ],
    )
    def test_validation(self, fields):
        with pytest.raises(ValidationError):
            RunConfig(**fields)

    def test_ck_with_order(self):
        config = RunConfig(command="classify", level="Ck", k=3)
        assert config.k == 3

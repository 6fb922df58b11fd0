import textwrap

import pytest

from qcurv import errors, kfuncs
from qcurv.harness import parse_config, read_config

MINIMAL = textwrap.dedent(
    """
    [run]
    n = 3
    sigma = 0.25
    """
)


def _problems(text, **kwargs):
    with pytest.raises(errors.ConfigurationError) as excinfo:
        _ = parse_config(textwrap.dedent(text), **kwargs)
    return excinfo.value.errors


class TestParseConfig:
    def test_minimal(self):
        config = parse_config(MINIMAL)
        assert (config.n, config.sigma, config.L, config.zonal, config.seed) == (3, 0.25, 32, True, 0)
        assert config.k_family == "constant"
        assert config.k_params == {}
        assert config.option("spectrum", "kmax") == 10
        assert config.option("flow", "eps") == ()
        assert isinstance(config.make_k(), kfuncs.ConstantK)

    def test_k_section(self):
        config = parse_config(
            MINIMAL + "\n# prescribed function\n[K]\nfamily = two-peak\nepsilon = 0.01\n"
        )
        assert config.k_family == "two-peak"
        assert config.k_params == {"epsilon": 0.01}

    def test_command_options(self):
        config = parse_config(
            MINIMAL + "[flow]\neps = 0.1, 0.05\ntrace = no\n[bubble-residual]\ntruncations = 8,16\n"
        )
        assert config.option("flow", "eps") == (0.1, 0.05)
        assert config.option("flow", "trace") is False
        assert config.option("bubble-residual", "truncations") == (8, 16)


class TestProblems:
    def test_existence_needs_small_sigma(self):
        text = """
        [run]
        n = 3
        sigma = 0.6
        """
        assert parse_config(textwrap.dedent(text)).sigma == 0.6
        problems = _problems(text, command="existence")
        assert len(problems) == 1
        assert problems[0].startswith("line 4:")
        assert "(n-2)/2" in problems[0]

    def test_sigma_out_of_range(self):
        problems = _problems("[run]\nn = 3\nsigma = 1.5\n")
        assert problems == [
            "line 3: sigma = 1.5 is invalid; need 0 < sigma < n/2 = 1.5"
        ]

    def test_duplicate_key(self):
        problems = _problems("[run]\nn = 3\nsigma = 0.25\nn = 4\n")
        assert len(problems) == 1
        assert problems[0].startswith("line 4: duplicate key 'n'")
        assert "line 2" in problems[0]

    def test_every_problem_reported(self):
        text = "[run]\nn = 3\nsigma = 0.25\nsize = 3\nL = many\n[plots]\n[K]\nfamily = linear\nc = 1\n"
        problems = _problems(text)
        assert len(problems) == 4
        assert problems[0].startswith("line 6: unknown section [plots]")
        assert any(p.startswith("line 4: unknown key 'size'") for p in problems)
        assert any(p.startswith("line 5: invalid value 'many'") for p in problems)
        assert any(p.startswith("line 9: unknown key 'c' for K family 'linear'") for p in problems)

    @pytest.mark.parametrize(
        "text, fragment",
        [
            ("[run]\nsigma = 0.25\n", "missing required key 'n'"),
            ("[run]\nn = 2\nsigma = 0.25\n", "need n >= 3"),
            ("[run]\nn = 4\nsigma = 0.25\nzonal = false\n", "only for n <= 3"),
            ("[run]\nn = 3\nsigma = 0.25\nL = 0\n", "need L >= 1"),
            ("n = 3\n", "outside of any section"),
            ("[run]\nn: 3\n", "expected '[section]' or 'key = value'"),
            ("[run]\nn = 3\nsigma = 0.25\n[K]\nfamily = bumpy\n", "unknown K family 'bumpy'"),
        ],
    )
    def test_single_problem(self, text, fragment):
        problems = _problems(text)
        assert any(fragment in p for p in problems)

    def test_k_rejects_parameters(self):
        problems = _problems(MINIMAL + "[K]\nfamily = constant\nvalue = -1\n")
        assert len(problems) == 1
        assert "rejected its parameters" in problems[0]


class TestDigest:
    def test_deterministic(self):
        assert parse_config(MINIMAL).digest == parse_config(MINIMAL).digest

    def test_ignores_output_directory(self):
        config = parse_config(MINIMAL)
        assert config.replace(out=config.out / "elsewhere").digest == config.digest

    def test_tracks_seed(self):
        config = parse_config(MINIMAL)
        assert config.replace(seed=1).digest != config.digest

    def test_meta(self):
        meta = parse_config(MINIMAL).meta()
        assert set(meta) == {"config_digest", "seed", "qcurv"}


class TestReadConfig:
    def test_read(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(MINIMAL, encoding="utf-8")
        assert read_config(path).digest == parse_config(MINIMAL).digest

    def test_missing_file(self, tmp_path):
        with pytest.raises(errors.ConfigurationError):
            _ = read_config(tmp_path / "missing.cfg")

import pytest

from arbc.config_file import load_config, parse_config_text, resolve_config_path, resolve_workers, write_config
from arbc.core import ConfigError
from arbc.models import DiodeParams, LinkConfig, MppLinearCoeffs, SqrtFitCoeffs


def test_empty_text_gives_defaults():
    assert parse_config_text("") == LinkConfig()


def test_load_config_without_path_gives_defaults():
    assert load_config(None) == LinkConfig()


def test_partial_file_overrides_only_named_keys():
    config = parse_config_text(
        "# transmitter refit\n"
        "transmitter.c1 = -12.5\n"
        "channel.visibility_km = 11\n"
        "receiver.eta_dc = 0.95\n"
    )
    assert config.sqrt_coeffs == SqrtFitCoeffs(a1=3.331, b1=10.2, c1=-12.5)
    assert config.channel.visibility_km == 11.0
    assert config.eta_dc == 0.95
    assert config.eta_ce == 0.99


def test_mpp_entries_replace_the_whole_table():
    config = parse_config_text(
        "receiver.mpp.20.a2 = 0.5\n"
        "receiver.mpp.20.b2 = -0.29\n"
        "receiver.mpp.-10.a2 = 0.56\n"
        "receiver.mpp.-10.b2 = -0.27\n"
    )
    assert config.mpp_coeffs_by_temp == {
        -10.0: MppLinearCoeffs(a2=0.56, b2=-0.27),
        20.0: MppLinearCoeffs(a2=0.5, b2=-0.29),
    }


def test_default_round_trip():
    config = LinkConfig()
    assert parse_config_text(write_config(config)) == config


def test_calibrated_round_trip_is_exact():
    config = LinkConfig(
        pv=DiodeParams(area_factor=0.11337629471836157),
        sqrt_coeffs=SqrtFitCoeffs(a1=3.3310000001, b1=10.2, c1=-11.99),
    )
    text = write_config(config)
    assert "pv.area_factor = 0.11337629471836157" in text
    assert parse_config_text(text) == config


def test_written_keys_are_in_fixed_order():
    lines = write_config(LinkConfig()).splitlines()
    assert lines[0] == "transmitter.a1 = 3.331"
    assert lines[3] == "channel.wavelength_nm = 1550.0"
    assert "receiver.mpp.0.0.a2 = 0.5434" in lines
    assert not any(line.startswith("pv.area_factor") for line in lines)


def test_manifest_keys_are_ignored():
    config = parse_config_text("manifest.command = 'sweep'\ntransmitter.a1 = 3.0\n")
    assert config.sqrt_coeffs.a1 == 3.0


@pytest.mark.parametrize(
    "text, message",
    [
        ("transmitter.d1 = 1.0\n", "unknown config key 'transmitter.d1'"),
        ("laser.power = 1.0\n", "unknown config key"),
        ("receiver.mpp.25.c2 = 1.0\n", "unknown config key"),
        ("receiver.mpp.hot.a2 = 0.5\n", "non-numeric temperature"),
        ("transmitter.a1 = fast\n", "is not a number"),
        ("transmitter.a1\n", "has no value"),
        ("pv.n_series = 72.5\n", "is not a number"),
    ],
)
def test_malformed_entries_raise_config_error(text, message):
    with pytest.raises(ConfigError, match=message):
        parse_config_text(text)


def test_invariant_violations_are_collected():
    with pytest.raises(ConfigError) as excinfo:
        parse_config_text("receiver.eta_dc = 1.5\ntransmitter.b1 = -2\n")
    fields = {v.field for v in excinfo.value.violations}
    assert fields == {"eta_dc", "sqrt_coeffs.b1"}


def test_incomplete_mpp_pair_is_a_violation():
    with pytest.raises(ConfigError):
        parse_config_text("receiver.mpp.25.a2 = 0.5\n")


def test_load_config_reads_file(tmp_path):
    path = tmp_path / "link.conf"
    path.write_text("receiver.eta_ce = 1.0\n", encoding="utf-8")
    assert load_config(path).eta_ce == 1.0


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.conf")


def test_cli_path_wins_over_environment(monkeypatch):
    monkeypatch.setenv("ARBC_CONFIG", "/env/link.conf")
    assert resolve_config_path("cli.conf") == "cli.conf"
    assert resolve_config_path(None) == "/env/link.conf"
    monkeypatch.delenv("ARBC_CONFIG")
    assert resolve_config_path(None) is None


def test_cli_worker_count_wins_over_environment(monkeypatch):
    monkeypatch.setenv("ARBC_WORKERS", "8")
    assert resolve_workers(2) == 2
    assert resolve_workers(None) == 8
    monkeypatch.delenv("ARBC_WORKERS")
    assert resolve_workers(None) == 1


@pytest.mark.parametrize("value", ["four", "1.5", "0", "-2"])
def test_invalid_worker_count_is_a_config_error(monkeypatch, value):
    monkeypatch.setenv("ARBC_WORKERS", value)
    with pytest.raises(ConfigError):
        resolve_workers(None)

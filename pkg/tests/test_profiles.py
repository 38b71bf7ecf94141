from pathlib import Path

import pytest

from app.models.profiles import RunProfiles

CONFIG = Path(__file__).parent.parent / "config" / "profiles.yaml"


def test_shipped_profiles():
    profiles = RunProfiles(str(CONFIG))
    assert profiles.default == "flagship"
    assert profiles.names() == ["dnls-limit", "flagship", "spot-check", "two-pairs"]

    flagship = profiles.get_profile()
    assert (flagship.prime, flagship.nu, flagship.order, flagship.t_order) == (5, "5", 10, 8)
    assert flagship.variant == "derived"

    two = profiles.get_profile("two-pairs")
    assert two.pairs == 2


def test_profile_context():
    ctx = RunProfiles(str(CONFIG)).get_profile("spot-check").context()
    assert (ctx.p, ctx.D, ctx.Dt) == (7, 10, 8)


def test_unknown_profile():
    with pytest.raises(ValueError):
        RunProfiles(str(CONFIG)).get_profile("nope")


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        RunProfiles(str(tmp_path / "absent.yaml"))


def test_environment_substitution(tmp_path, monkeypatch):
    monkeypatch.setenv("PADIC_TEST_PRIME", "3")
    config = tmp_path / "profiles.yaml"
    config.write_text(
        "default: local\n"
        "profiles:\n"
        "  local:\n"
        "    prime: ${PADIC_TEST_PRIME}\n"
        "    nu: \"1/3\"\n"
        "    order: 4\n"
        "    t_order: 3\n"
    )
    profile = RunProfiles(str(config)).get_profile()
    assert profile.prime == 3
    assert profile.nu == "1/3"
    assert profile.pairs == 1


def test_bad_coupling_is_rejected(tmp_path):
    config = tmp_path / "profiles.yaml"
    config.write_text("profiles:\n  bad:\n    prime: 5\n    nu: \"0.5\"\n    order: 4\n    t_order: 3\n")
    with pytest.raises(ValueError):
        RunProfiles(str(config))

import pytest

from brickphase.config import ConfigError, build_configs, load_config, parse_assignments
from brickphase.sequencer import SequencerConfig
from brickphase.tracking import TrackerParams


def test_defaults_without_a_file():
    assert load_config() == (SequencerConfig(), TrackerParams())


def test_shared_key_sets_both_structures(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# tolerances\nT_max = 12\nocclusion_limit=0.5  # tighter\n\ncap_final_phase = no\n")
    seq, trk = load_config(path)
    assert seq.t_max == trk.t_max == 12
    assert trk.occlusion_limit == 0.5
    assert seq.cap_final_phase is False


def test_overrides_win_over_the_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("seed = 4\n")
    seq, _ = load_config(path, ["seed=9"])
    assert seq.seed == 9


@pytest.mark.parametrize("line, fragment", [
    ("t_max 12", "expected key=value"),
    ("colour = red", "unknown key"),
    ("t_max = twelve", "expected int"),
    ("cap_final_phase = maybe", "boolean"),
])
def test_bad_lines_name_source_and_line(line, fragment):
    with pytest.raises(ConfigError) as info:
        parse_assignments(["# ok", line], "run.cfg")
    assert "run.cfg:2" in str(info.value) and fragment in str(info.value)


def test_out_of_range_values_are_config_errors():
    with pytest.raises(ConfigError, match="theta_iou"):
        build_configs({"theta_iou": 2.0})

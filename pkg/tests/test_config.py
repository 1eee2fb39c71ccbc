"""Configuration grammar: defaults, round trips and line-numbered errors."""

import pytest

from strainlab import ConfigError, load_config, parse_config, render_config

MINIMAL = "[equation]\nmu = 1.0\n"


def _err(text):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    return info.value


def test_minimal_config_defaults():
    rc = parse_config(MINIMAL)
    sim = rc.sim
    assert sim.mu == 1.0
    assert sim.advection is False
    assert sim.grid_n == 32
    assert sim.dealias_cutoff == 0 and sim.grid().dealias_cutoff == 10
    assert sim.dt is None and sim.cfl_factor == 0.5
    assert sim.t_end == 1.0
    assert sim.sample_every == 10
    assert sim.initial.kind == "taylor_green"
    assert sim.blowup_threshold == 1e6
    assert sim.diagnostics_level == "standard"
    assert rc.directory == "." and rc.final_snapshot and not rc.plots


def test_full_config_round_trip():
    text = """
; run description
[equation]
mu = 0.6666666666666666
advection = yes

[grid]
n = 16
dealias_cutoff = 4

[time]
dt = 0.002
t_end = 0.25
sample_every = 5

[initial]
type = random_band
amplitude = 0.5
seed = 42
band = 3

[output]
directory = out
blowup_threshold = 100.0
diagnostics = full
alphas = 0.0, 1.0
qs = 2.0 3.0
final_snapshot = false
plots = true
"""
    rc = parse_config(text)
    assert rc.sim.advection is True
    assert rc.sim.alphas == (0.0, 1.0)
    assert rc.sim.qs == (2.0, 3.0)
    assert rc.plots and not rc.final_snapshot
    # the canonical rendering parses back to the same configuration
    again = parse_config(render_config(rc))
    assert again == rc


def test_render_emits_dt_or_cfl():
    rc = parse_config(MINIMAL)
    assert "cfl_factor = 0.5" in render_config(rc)
    rc2 = parse_config(MINIMAL + "[time]\ndt = 0.001\n")
    assert "dt = 0.001" in render_config(rc2)
    assert "cfl_factor" not in render_config(rc2)


def test_comments_and_blank_lines_ignored():
    rc = parse_config("# top comment\n\n; alt comment\n[equation]\nmu = 0\n")
    assert rc.sim.mu == 0.0


def test_missing_mu():
    err = _err("[equation]\nadvection = true\n")
    assert "mu required" in str(err)
    assert err.line == 1


def test_mu_required_without_equation_section():
    err = _err("[grid]\nn = 16\n")
    assert "mu required" in str(err)


def test_unknown_section_line_number():
    err = _err("[equation]\nmu = 1\n[fluids]\n")
    assert err.line == 3
    assert "unknown section" in str(err)


def test_unknown_key_line_number():
    err = _err("[equation]\nmu = 1\nviscosity = 2\n")
    assert err.line == 3
    assert "unknown key" in str(err)


def test_duplicate_key():
    err = _err("[equation]\nmu = 1\nmu = 2\n")
    assert err.line == 3
    assert "duplicate" in str(err)


def test_key_before_section():
    err = _err("mu = 1\n")
    assert err.line == 1


def test_empty_value():
    err = _err("[equation]\nmu =\n")
    assert err.line == 2
    assert "empty value" in str(err)


def test_unterminated_section():
    err = _err("[equation\nmu = 1\n")
    assert err.line == 1


def test_not_a_number():
    err = _err("[equation]\nmu = fast\n")
    assert err.line == 2
    assert "must be a number" in str(err)


def test_bad_bool():
    err = _err(MINIMAL + "[output]\nplots = maybe\n")
    assert err.line == 4
    assert "true or false" in str(err)


def test_bad_grid_size():
    err = _err(MINIMAL + "[grid]\nn = 48\n")
    assert err.line == 4
    assert "power of two" in str(err)


def test_bad_cutoff():
    err = _err(MINIMAL + "[grid]\nn = 16\ndealias_cutoff = 9\n")
    assert err.line == 5


def test_dt_and_cfl_conflict():
    err = _err(MINIMAL + "[time]\ndt = 0.001\ncfl_factor = 0.5\n")
    assert err.line == 5
    assert "not both" in str(err)


def test_negative_t_end():
    err = _err(MINIMAL + "[time]\nt_end = -0.5\n")
    assert err.line == 4


def test_bad_initial_type():
    err = _err(MINIMAL + "[initial]\ntype = vortex\n")
    assert err.line == 4


def test_snapshot_requires_path():
    err = _err(MINIMAL + "[initial]\ntype = snapshot\n")
    assert "path" in str(err)


def test_bad_margin_for_amplified_seed():
    err = _err(MINIMAL + "[initial]\ntype = amplified_band\nmargin = 1.0\n")
    assert err.line == 5


def test_threshold_must_exceed_one():
    err = _err(MINIMAL + "[output]\nblowup_threshold = 1.0\n")
    assert err.line == 4


def test_bad_diagnostics_level():
    err = _err(MINIMAL + "[output]\ndiagnostics = verbose\n")
    assert err.line == 4


def test_q_below_endpoint():
    err = _err(MINIMAL + "[output]\nqs = 1.5\n")
    assert err.line == 4
    assert "3/2" in str(err)


def test_negative_alpha():
    err = _err(MINIMAL + "[output]\nalphas = -1.0\n")
    assert err.line == 4


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "absent.toml"))


def test_load_config_reads_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(MINIMAL)
    assert load_config(str(path)).sim.mu == 1.0

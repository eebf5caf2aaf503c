import json
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from exnarrow import io
from exnarrow.analytic import analytic_monomer_spectrum
from exnarrow.cli import main
from exnarrow.config import parse_config
from exnarrow.errors import ConfigurationError
from exnarrow.model import LorentzianBath


def write(tmp_path, body, name="run.ini"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(body))
    return path


AGGREGATE = """\
    [physical]
    bath = lorentzian
    n_monomers = 1, 2
    coupling = 0, -1
    huang_rhys = 0.3
    width = 0.4
    [numerical]
    max_quanta = auto
    [output]
    formats = csv, json
    dump_traces = yes
"""


def test_validate_echoes_defaults(tmp_path, capsys):
    cfg = write(tmp_path, AGGREGATE)
    assert main(["validate", str(cfg)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["numerical"]["tol"] == 1e-6
    assert out["numerical"]["max_quanta"] is None
    assert out["physical"]["n_monomers"] == [1, 2]


def test_aggregate_outputs_and_byte_identical_rerun(tmp_path):
    cfg = write(tmp_path, AGGREGATE)
    a = tmp_path / "a"
    assert main(["aggregate", str(cfg), "--out", str(a)]) == 0
    first = {p.name: p.read_bytes() for p in a.iterdir()}
    assert main(["aggregate", str(cfg), "--out", str(a)]) == 0
    second = {p.name: p.read_bytes() for p in a.iterdir()}
    assert first == second
    assert any(f.startswith("trace_") for f in first)
    stats = next(a.glob("stats_*.csv"))
    assert stats.read_text().startswith("# config: ")
    header, data = io.read_csv(stats)
    assert header == list(io.STATS_COLUMNS)
    assert data.shape == (4, len(io.STATS_COLUMNS))
    spectrum = a / "spectrum_lorentzian_X0.3_gamma0.4_Omega1_N2_V-1_eps0.json"
    record = json.loads(spectrum.read_text())
    assert record["config"]["physical"]["coupling"] == [0.0, -1.0]
    assert record["provenance"]["C"] == -1.0


def test_monomer_pipeline_equals_analytic(tmp_path):
    cfg = write(tmp_path, AGGREGATE.replace("n_monomers = 1, 2", "n_monomers = 1").replace("0, -1", "0"))
    assert main(["aggregate", str(cfg), "--out", str(tmp_path / "o")]) == 0
    _, data = io.read_csv(tmp_path / "o" / "spectrum_lorentzian_X0.3_gamma0.4_Omega1_N1_V0_eps0.csv")
    ref = analytic_monomer_spectrum(LorentzianBath(0.3, 0.4), 0.0, data[:, 0])
    assert np.max(np.abs(data[:, 1] - ref)) < 1e-3 * ref.max()


def test_monomer_analytic_command(tmp_path):
    cfg = write(tmp_path, """\
        [physical]
        huang_rhys = 0, 0.3, 2.5
        width = 0.4
        [output]
        formats = json
    """)
    assert main(["monomer-analytic", str(cfg), "--out", str(tmp_path / "o")]) == 0
    recs = {p.name: json.loads(p.read_text()) for p in (tmp_path / "o").iterdir()}
    assert len(recs) == 3
    delta = recs["monomer_analytic_lorentzian_X0_gamma0.4_Omega1_eps0.json"]
    assert delta["kind"] == "delta-line limit"
    assert abs(delta["stats"]["peak_position"]) < 1e-3


def test_markovian_narrowing_is_flat(tmp_path):
    cfg = write(tmp_path, """\
        [physical]
        bath = markovian
        markovian_rate = 0.5
        n_monomers = 2, 3
        coupling = 0, -2, -20
        [output]
        formats = json
    """)
    assert main(["narrowing", str(cfg), "--out", str(tmp_path / "o")]) == 0
    rec = json.loads(next((tmp_path / "o").glob("narrowing_*.json")).read_text())
    for curve in rec["curves"]:
        assert np.allclose(curve["fwhm"], 1.0, rtol=5e-3)


def test_markovian_command_needs_markovian_bath(tmp_path):
    cfg = write(tmp_path, AGGREGATE)
    assert main(["markovian", str(cfg)]) == 2


@pytest.mark.parametrize("body,needle", [
    ("[physical]\nwidth = -0.4\n", "run.ini:2: [physical] width"),
    ("[physical]\nbath = lorentzian\nfoo = 1\n", "run.ini:3: [physical] foo: unknown key"),
    ("[numerical]\ndt = abc\n", "run.ini:2: [numerical] dt"),
    ("[physical]\nbath = markovian\n", "markovian_rate"),
    ("[physical]\nn_monomers = 2\nboundary = ring\n", "boundary"),
    ("[extra]\nx = 1\n", "unknown section"),
])
def test_config_errors_exit_2(tmp_path, capsys, body, needle):
    cfg = write(tmp_path, body)
    assert main(["validate", str(cfg)]) == 2
    assert needle in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["validate", str(tmp_path / "nope.ini")]) == 2


def test_resource_error_exit_4(tmp_path):
    cfg = write(tmp_path, """\
        [physical]
        n_monomers = 12
        coupling = -1
        [numerical]
        max_quanta = 4
        max_dimension = 1000
    """)
    assert main(["aggregate", str(cfg), "--out", str(tmp_path / "o")]) == 4


def test_convergence_error_exit_3(tmp_path):
    cfg = write(tmp_path, """\
        [physical]
        n_monomers = 1
        huang_rhys = 2.5
        width = 0.4
        [numerical]
        m_start = 2
        m_limit = 4
    """)
    assert main(["aggregate", str(cfg), "--out", str(tmp_path / "o")]) == 3


def test_parse_config_auto_keys():
    cfg = parse_config("[numerical]\ndt = auto\nmax_quanta = 6\nworkers = 2\n")
    assert cfg.numerics.dt is None
    assert cfg.numerics.max_quanta == 6
    assert cfg.workers == 2
    with pytest.raises(ConfigurationError):
        parse_config("[numerical]\ntol = 0\n")


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, AGGREGATE)
    res = subprocess.run([sys.executable, "-m", "exnarrow", "validate", str(cfg)], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["physical"]["bath"] == "lorentzian"

"""Experiment harness tests: determinism, invariants, reports, and CLI."""

import json
import math
import subprocess
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from pwosc.harness import (
    EXPERIMENT_NAMES,
    ExperimentConfig,
    cell_rng,
    config_from_json,
    negative_band_terms,
    resolve_config,
    run_experiment,
    twisted_symbol_terms,
    _random_atomic_symbol,
)
from pwosc.commutators import negative_band_symbol
from pwosc.lattice import Lattice
from pwosc.operators import standard_symbol_eval

REPO_ROOT = Path(__file__).resolve().parents[1]


def tiny_band_config(out_dir, seed=9, a=math.pi):
    return ExperimentConfig(
        experiment="toeplitz_besov_band",
        a=a,
        p_values=(0.5, 2.0),
        seed=seed,
        symbols_per_cell=2,
        atoms_per_symbol=2,
        out_dir=str(out_dir),
    )


# ---------------------------------------------------------------------------
# per-cell streams


def test_cell_rng_counter_based():
    ref = cell_rng(7, "toeplitz_besov_band", 3).standard_normal(5)
    again = cell_rng(7, "toeplitz_besov_band", 3).standard_normal(5)
    assert np.array_equal(ref, again)
    other_cell = cell_rng(7, "toeplitz_besov_band", 4).standard_normal(5)
    other_seed = cell_rng(8, "toeplitz_besov_band", 3).standard_normal(5)
    other_exp = cell_rng(7, "commutator_band", 3).standard_normal(5)
    assert not np.array_equal(ref, other_cell)
    assert not np.array_equal(ref, other_seed)
    assert not np.array_equal(ref, other_exp)


def test_cell_rng_order_independent():
    # Drawing for cell 5 first must not perturb cell 2's stream.
    first = cell_rng(11, "band_symbol_lp", 2).standard_normal(4)
    _ = cell_rng(11, "band_symbol_lp", 5).standard_normal(400)
    second = cell_rng(11, "band_symbol_lp", 2).standard_normal(4)
    assert np.array_equal(first, second)


# ---------------------------------------------------------------------------
# exact pole representations used for the certified oscillation side


@pytest.mark.parametrize("a", [math.pi, 1.0])
def test_twisted_terms_match_direct_samples(a):
    rng = cell_rng(3, "toeplitz_besov_band", 0)
    sym = _random_atomic_symbol(rng, a, 3)
    terms = twisted_symbol_terms(sym)
    lat = Lattice(4.0 * a)
    for k in range(-25, 26):
        x = lat.point(k)
        direct = (-1.0) ** k * standard_symbol_eval(sym, x)
        via_terms = sum(g / (x - pole) for g, pole in terms)
        assert abs(direct - via_terms) <= 1e-12 * max(1.0, abs(direct))


@pytest.mark.parametrize("a", [math.pi, 1.0])
def test_negative_band_terms_match_samples(a):
    atoms = [(0.8 - 0.3j, 0.4 + 1.1j), (-0.5j, -1.2 + 0.7j)]
    f = negative_band_symbol(atoms, a, halfwidth=50)
    terms = negative_band_terms(atoms, a)
    lat = Lattice(a)
    xs = lat.points(f.k_min, f.k_min + len(f.values) - 1)
    via_terms = np.zeros(xs.size, dtype=complex)
    for g, pole in terms:
        via_terms += g / (xs - pole)
    err = np.max(np.abs(np.asarray(f.values) - via_terms))
    assert err <= 1e-12


# ---------------------------------------------------------------------------
# config validation and defaults


def test_config_rejects_bad_fields():
    with pytest.raises(ValueError, match="unknown experiment"):
        ExperimentConfig(experiment="nope")
    with pytest.raises(ValueError, match="tolerances"):
        ExperimentConfig(experiment="commutator_band", tolerance=0.0)
    with pytest.raises(ValueError, match="64-bit"):
        ExperimentConfig(experiment="commutator_band", seed=-1)
    with pytest.raises(ValueError, match="64-bit"):
        ExperimentConfig(experiment="commutator_band", seed=2**64)
    with pytest.raises(ValueError, match="nonnegative"):
        ExperimentConfig(experiment="commutator_band", window=-2)
    with pytest.raises(ValueError, match="positive"):
        ExperimentConfig(experiment="commutator_band", p_values=(0.5, -1.0))


def test_resolve_config_fills_defaults():
    cfg = resolve_config(ExperimentConfig(experiment="multiplication_growth"))
    assert cfg.p_values == (0.5, 0.75)
    assert cfg.symbols_per_cell > 0
    assert cfg.window_limit > 0
    # explicit values survive resolution
    cfg2 = resolve_config(
        ExperimentConfig(
            experiment="multiplication_growth",
            p_values=(1.0,),
            symbols_per_cell=4,
        )
    )
    assert cfg2.p_values == (1.0,)
    assert cfg2.symbols_per_cell == 4


def test_config_from_json_roundtrip_and_errors(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(
        json.dumps(
            {
                "experiment": "toeplitz_besov_band",
                "p_values": [1.0],
                "symbols_per_cell": 2,
            }
        )
    )
    cfg = config_from_json(good)
    assert cfg.experiment == "toeplitz_besov_band"
    assert cfg.p_values == (1.0,)

    with pytest.raises(ValueError, match="different experiment|names experiment"):
        config_from_json(good, experiment="commutator_band")

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"experiment": "commutator_band", "bogus": 1}))
    with pytest.raises(ValueError, match="bogus"):
        config_from_json(bad)

    nonobj = tmp_path / "nonobj.json"
    nonobj.write_text("[1, 2]")
    with pytest.raises(ValueError, match="JSON object"):
        config_from_json(nonobj)


def test_shipped_configs_parse():
    cfg_dir = REPO_ROOT / "configs"
    files = sorted(cfg_dir.glob("*.json"))
    assert {f.stem for f in files} == set(EXPERIMENT_NAMES)
    for f in files:
        cfg = config_from_json(f, experiment=f.stem)
        assert cfg.experiment == f.stem


# ---------------------------------------------------------------------------
# determinism of the written reports


def test_reports_are_byte_deterministic(tmp_path):
    r1 = run_experiment(tiny_band_config(tmp_path / "one"))
    r2 = run_experiment(tiny_band_config(tmp_path / "two"))
    b1 = (tmp_path / "one" / "cells.csv").read_bytes()
    b2 = (tmp_path / "two" / "cells.csv").read_bytes()
    assert b1 == b2
    s1 = json.loads((tmp_path / "one" / "summary.json").read_text())
    s2 = json.loads((tmp_path / "two" / "summary.json").read_text())
    s1.pop("runtime"), s2.pop("runtime")
    assert s1 == s2
    assert r1["invariants_pass"] and r2["invariants_pass"]

    r3 = run_experiment(tiny_band_config(tmp_path / "three", seed=10))
    b3 = (tmp_path / "three" / "cells.csv").read_bytes()
    assert b3 != b1
    assert r3["invariants_pass"]


# ---------------------------------------------------------------------------
# one small run per experiment


def test_toeplitz_besov_band_small(tmp_path):
    report = run_experiment(tiny_band_config(tmp_path))
    assert report["invariants_pass"]
    assert report["failures"] == 0
    names = {inv["name"] for inv in report["invariants"]}
    assert "single_atom_unit_quasinorm" in names
    assert "dilation_invariance" in names
    singles = [c for c in report["cells"] if c.get("group") == "single"]
    assert singles and all(abs(c["lhs"] - 1.0) <= 1e-9 for c in singles)
    header = (tmp_path / "cells.csv").read_text().splitlines()[0]
    assert header.split(",") == list(report["cells"][0].keys())
    summary = json.loads((tmp_path / "summary.json").read_text())
    for key in ("experiment", "band", "failures", "runtime"):
        assert key in summary
    assert "cells" not in summary or isinstance(summary["cells"], int)


def test_toeplitz_besov_band_at_unit_bandwidth(tmp_path):
    report = run_experiment(tiny_band_config(tmp_path, a=1.0))
    assert report["invariants_pass"]
    assert report["failures"] == 0


def test_multiplication_growth_small(tmp_path):
    cfg = ExperimentConfig(
        experiment="multiplication_growth",
        p_values=(0.5,),
        seed=2,
        symbols_per_cell=4,
        window_limit=128,
        out_dir=str(tmp_path),
    )
    report = run_experiment(cfg)
    assert report["invariants_pass"]
    assert report["slopes"]["p=0.5"] == pytest.approx(0.5, abs=0.05)
    assert report["growth"]["p=0.5"] > 10.0
    by_name = {inv["name"]: inv for inv in report["invariants"]}
    assert by_name["truncation_nonstabilizing_p=0.5"]["passed"]
    assert by_name["besov_bounded_p=0.5"]["passed"]
    # the honestly-unstable truncated cell is reported as a failure count
    assert report["failures"] >= 1


def test_commutator_band_small(tmp_path):
    cfg = ExperimentConfig(
        experiment="commutator_band",
        p_values=(1.0,),
        seed=5,
        symbols_per_cell=2,
        window=16,
        window_limit=128,
        out_dir=str(tmp_path),
    )
    report = run_experiment(cfg)
    assert report["invariants_pass"]
    by_name = {inv["name"]: inv for inv in report["invariants"]}
    assert by_name["sampled_matrix_matches_half_i_commutator"]["passed"]
    assert by_name["constant_symbol_annihilated"]["passed"]
    assert report["excluded"] >= 1  # the constant symbol contributes no ratio


def test_band_symbol_lp_small(tmp_path):
    cfg = ExperimentConfig(
        experiment="band_symbol_lp",
        p_values=(2.0,),
        seed=1,
        symbols_per_cell=2,
        window=64,
        out_dir=str(tmp_path),
    )
    report = run_experiment(cfg)
    assert report["invariants_pass"]
    assert report["failures"] == 0
    by_name = {inv["name"]: inv for inv in report["invariants"]}
    assert by_name["single_kernel_mass_closed_form"]["passed"]


# ---------------------------------------------------------------------------
# command-line interface


def test_cli_end_to_end(tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(
        json.dumps(
            {
                "experiment": "toeplitz_besov_band",
                "p_values": [2.0],
                "symbols_per_cell": 2,
                "atoms_per_symbol": 2,
            }
        )
    )
    out = tmp_path / "cli_out"
    proc = subprocess.run(
        [
            sys.executable, "-m", "pwosc", "run", "toeplitz_besov_band",
            "--config", str(cfg_file), "--out", str(out), "--seed", "4",
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "[PASS]" in proc.stdout
    assert (out / "cells.csv").is_file()
    assert (out / "summary.json").is_file()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["experiment"] == "toeplitz_besov_band"

    # the same configuration run in-process reproduces the CSV bytes
    cfg = replace(config_from_json(cfg_file), seed=4, out_dir=str(tmp_path / "inproc"))
    run_experiment(cfg)
    assert (tmp_path / "inproc" / "cells.csv").read_bytes() == (
        out / "cells.csv"
    ).read_bytes()


def test_cli_rejects_mismatched_config(tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"experiment": "toeplitz_besov_band"}))
    proc = subprocess.run(
        [
            sys.executable, "-m", "pwosc", "run", "commutator_band",
            "--config", str(cfg_file), "--out", str(tmp_path / "x"),
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    assert "experiment" in proc.stderr

"""Import-level smoke test for the python bindings."""
import json
import sys

import numpy as np

import ghostlab


def main():
    # unitary transform round trip
    rng = np.random.default_rng(3)
    field = rng.normal(size=64) + 1j * rng.normal(size=64)
    spec = ghostlab.dft_centered(field)
    assert np.isclose(np.sum(np.abs(spec) ** 2), np.sum(np.abs(field) ** 2))
    back = ghostlab.idft_centered(spec)
    assert np.allclose(back, field)

    assert ghostlab.hash_seed(1, 2) == ghostlab.hash_seed(1, 2)
    assert ghostlab.hash_seed(1, 2) != ghostlab.hash_seed(1, 3)

    s = ghostlab.envelope_std_for_coherence_length(2048, 8.7e-6, 34e-6)
    assert s > 0

    cfg = """
scenario = characterization
sites = 256
pitch = 8.7um
wavelength = 0.532um
focal = 80mm
coherence_near = 34um
diaphragm = 1mm
frames = 400
seed = 5
"""
    echo = ghostlab.validate_config(cfg)
    assert echo["scenario"] == "characterization"

    result = ghostlab.run_scenario(cfg)
    assert "metrics" in result and "profiles" in result
    names = {m["name"] for m in result["metrics"]}
    assert "near_baseline_minus_1" in names
    assert "auto_cross_max_rel_diff" in names
    for m in result["metrics"]:
        if m["name"] == "auto_cross_max_rel_diff":
            assert m["value"] == 0.0

    summary = json.loads(result["summary_json"])
    assert summary["scenario"] == "characterization"
    assert summary["seed"] == 5

    x, y = result["profiles"]["autocorr_near"]
    assert len(x) == len(y) > 0
    assert y[0] == max(y)  # g2 peaks at zero separation

    # reruns are deterministic, frames/seed overrides apply
    again = ghostlab.run_scenario(cfg, workers=4)
    assert json.loads(again["summary_json"]) == summary
    other = ghostlab.run_scenario(cfg, seed=9, frames=300)
    assert json.loads(other["summary_json"])["seed"] == 9

    mask = ghostlab.double_slit_mask(2048, 8.7e-6, 690e-6, 160e-6)
    assert mask.shape == (2048,)
    fx, fy = ghostlab.fraunhofer_pattern(mask, 8.7e-6, 0.532e-6, 80e-3)
    assert np.isclose(ghostlab.fringe_period(fx, fy), 100.1e-6, rtol=0.01)

    print("python smoke test ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())

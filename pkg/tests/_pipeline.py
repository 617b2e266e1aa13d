"""Shared end-to-end CLI driver for the CLI and acceptance tests."""

import os

from yieldsurv.cli import main
from yieldsurv.ingest import Recording, save_geometry, write_recording
from yieldsurv.synthetic import demo_geometry, synthetic_recording


def write_inputs(directory, recording=None, seed=0):
    recording = recording or synthetic_recording(60, random_state=seed)
    tracks, meta, rec_meta = write_recording(recording, directory)
    geom = os.path.join(directory, "geometry.json")
    save_geometry(demo_geometry(), geom)
    return ["--tracks", tracks, "--tracks-meta", meta, "--recording-meta", rec_meta,
            "--geometry", geom]


def run_pipeline(directory, seed=0):
    """extract, describe, fitdist, km, fit, select, predict, report; returns exit codes."""
    inputs = write_inputs(os.path.join(directory, "in"), seed=seed)
    out = os.path.join(directory, "out")
    common = ["--out", out, "--seed", str(seed)]
    scen = ["--scenarios", os.path.join(out, "scenarios.csv")]
    codes = [
        main(["extract", *common, *inputs]),
        main(["describe", *common, *scen]),
        main(["fitdist", *common, *scen]),
        main(["km", *common, *scen]),
        main(["fit", *common, *scen, "--formula", "srt ~ v_m + lv_i + dav + mtype"]),
        main(["select", *common, *scen, "--formula", "srt ~ v_m + lv_i + lv_m + dav + mtype"]),
        main(["predict", *common, "--model", os.path.join(out, "model.json"),
              "--set", "v_m=2.5", "--set", "mtype=turning_left", "--quantiles", "0.25", "0.75"]),
        main(["report", *common]),
    ]
    return codes, out


def read_tree(directory):
    return {name: open(os.path.join(directory, name), "rb").read()
            for name in sorted(os.listdir(directory))}

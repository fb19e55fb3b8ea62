"""A full run on generated REGPAT-style files.

The generator writes the three input files, a small concordance and a
truth.json sidecar holding the exact frequency tables it drew.  The
pipeline reads the files back (cleaning up spacing, duplicates, bad rows
and dangling CPC links) and should land on the same tables.
"""
import json
import sys
import tempfile
from pathlib import Path

from techineq.pipeline import RunConfig, run
from techineq.synth import SKEWED, SyntheticProfile, generate_synthetic

work = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="techineq-"))
paths = generate_synthetic(work / "input", seed=1, profile=SyntheticProfile(patents=3000, **SKEWED))

cfg = RunConfig(ipc=str(paths["ipc"]), app_reg=str(paths["app_reg"]), cpc=str(paths["cpc"]),
                concordance=str(paths["concordance"]), lorenz_years=(2000,), out=str(work / "out"))
manifest = run(cfg)
print("outputs in", work / "out")
print("rows:", json.dumps(manifest.row_counts, indent=1))
print("rejected input rows:", manifest.ingest["rejected_rows"])

print("\ninequality.tsv")
print((work / "out" / "inequality.tsv").read_text())
print("decomposition.tsv")
print((work / "out" / "decomposition.tsv").read_text())

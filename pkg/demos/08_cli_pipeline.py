# %% [markdown]
# # The command-line pipeline
#
# `regionlab synth` writes a scenario as GeoJSON plus CSV. `regionlab
# pipeline` then runs every stage and writes JSON, CSV and SVG files. The
# same seed gives byte-identical files, whatever `REGIONLAB_THREADS` is set
# to.

# %%
import hashlib
import subprocess
import sys
from pathlib import Path

OUT = Path(__file__).parent / "out" / "cli"


def regionlab(*args):
    subprocess.run([sys.executable, "-m", "regionlab.cli", *map(str, args)], check=True)


regionlab("synth", "--out", OUT / "input", "--seed", 3)
regionlab("pipeline", "--geometry", OUT / "input" / "geometry.geojson",
          "--attributes", OUT / "input" / "attributes.csv", "--out", OUT / "run", "--seed", 0)

# %%
for p in sorted((OUT / "run").iterdir()):
    if p.suffix in (".json", ".csv"):
        print(f"{p.name:28s} {hashlib.sha256(p.read_bytes()).hexdigest()[:16]}")
print(len(list((OUT / "run").glob("*.svg"))), "SVG plots")

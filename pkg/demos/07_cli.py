"""
Driving gibbslab from the shell
===============================

Every report is JSON (or CSV) on stdout. Stochastic runs leave a manifest
that replays them exactly.
"""

# %%
import json
import subprocess
import sys
import tempfile
from pathlib import Path

work = Path(tempfile.mkdtemp())


def gibbslab(*args):
    out = subprocess.run([sys.executable, "-m", "gibbslab.cli", *map(str, args)],
                         capture_output=True, text=True, cwd=work)
    return out.returncode, out.stdout


# %%
print(gibbslab("count", "--n", "3", "--x", "10", "--convention", "fermi")[1])

# %%
(work / "mix.cfg").write_text("""
left.species = A
left.N = 10000
left.V = 1.0
right.species = A
right.N = 10000
right.V = 1.0
policy = by-origin
""")
print(gibbslab("mix", "mix.cfg", "--format", "csv")[1])

# %%
(work / "demon.cfg").write_text("n_per_side = 100\nspeed_factor = 0.01\n")
status, out = gibbslab("demon", "demon.cfg", "--seed", "5", "--output-dir", "runs")
print(json.dumps(json.loads(out)["records"][0], indent=1))
print(gibbslab("replay", "runs/demon-5.manifest.json")[1])

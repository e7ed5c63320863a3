"""
Driving the calculations from the command line
==============================================

Each subcommand reads a JSON run file and writes CSV or JSON.  Flags beat
environment variables, which beat the file.  Here the entry point is
called in-process with the same argument lists a shell would pass.
"""

import pathlib
import tempfile

from spherical_landau.cli import main

configs = pathlib.Path(__file__).parent / "configs"
out = pathlib.Path(tempfile.mkdtemp())

# A single magnetization value, written as JSON
main(["magnetization", "--config", str(configs / "magnetization.json"), "--out", str(out / "m.json")])
print((out / "m.json").read_text())

# The dHvA peaks of a sweep uniform in 1/b; threads never change the bytes
for threads in ("1", "4"):
    main(["dhva", "--config", str(configs / "dhva.json"), "--threads", threads,
          "--out", str(out / f"dhva_{threads}.json")])
print((out / "dhva_1.json").read_text())
print("identical across thread counts:", (out / "dhva_1.json").read_bytes() == (out / "dhva_4.json").read_bytes())

# Override a single setting from the command line
main(["magnetization", "--config", str(configs / "magnetization.json"), "--bracket", "printed",
      "--out", str(out / "m_printed.json")])
print((out / "m_printed.json").read_text())

# A classical orbit with its confinement diagnostic on stderr
status = main(["orbit", "--config", str(configs / "orbit.json"), "--out", str(out / "orbit.csv")])
print("orbit exit status:", status)
print("".join((out / "orbit.csv").read_text().splitlines(keepends=True)[:3]))

# An unknown key is rejected with exit status 1
bad = out / "bad.json"
bad.write_text('{"point": {"b": 100.0, "temperature": 3}}')
print("exit status for a bad file:", main(["spectrum", "--config", str(bad)]))

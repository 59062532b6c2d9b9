"""Scenario files and the command line.

A scenario JSON file names partitions, points, trees, and covers, then
wires them into construction requests.  Running one executes every
request and verifies all witnesses.  The same machinery backs the
``treesum`` command:

    treesum run my-scenario.json --deterministic
    treesum selftest
    treesum list-ops
"""

import json
from importlib import resources

from treesum import RunFlags, run
from treesum.scenario import load_bundled, bundled_scenario_names

print("bundled scenarios:", ", ".join(bundled_scenario_names()))

scenario = load_bundled("silver-meager")
print("\nrunning", scenario.name, "at horizon", scenario.horizon)
report = run(scenario, RunFlags(deterministic=True))
print("overall pass:", report.passed)

entry = report.data["requests"][0]
print("operation:", entry["op"])
print("result tree leaves:", entry["tree"]["leaf_count"],
      "| free:", entry["tree"]["free"])
for witness in entry["witnesses"]:
    cert = witness["certificate"]
    print(f"witness {witness['label']}: certificate passed={cert['passed']} "
          f"over {cert['checks']} checks, exhaustive={witness['exhaustive']}")

# the raw scenario document is plain JSON
text = (resources.files("treesum") / "scenarios" / "silver-meager.json").read_text()
print("\nscenario source:")
print(json.dumps(json.loads(text), indent=2)[:400], "...")

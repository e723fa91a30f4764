import time

from restaurant_reader.corpus import (
    bundled_corpus_path,
    distribution,
    load_corpus,
    run_entry,
)
from restaurant_reader.reasoner import Config

entries = load_corpus(bundled_corpus_path())
dist = distribution(entries)
print("entries:", len(entries))
print("by_type:", dict(dist["by_type"]))
print("by_source:", dict(dist["by_source"]))
for key in sorted(dist["by_source_and_type"]):
    print("  %-14s %-10s %d" % (key[0], key[1], dist["by_source_and_type"][key]))

print()
total = 0.0
bad = []
for e in entries:
    r = run_entry(e, Config(), timeout_s=60.0)
    total += r.wall_time
    flag = ""
    if r.verdict != "models-found":
        flag = "  <-- %s (%s)" % (r.verdict, r.reason)
        bad.append(e.id)
    print(
        "%-14s %-10s models=%-4d max=%-3d %6.2fs%s"
        % (e.id, e.scenario_type, r.model_count, r.max_step, r.wall_time, flag)
    )
print()
print("total %.1fs, failing: %r" % (total, bad))

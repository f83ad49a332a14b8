"""Regenerate the bundled 60-record demo export and its word vectors.

Construction (the expected counts in the tests follow from it):
  54 distinct usable records + 3 duplicates + 2 empty abstracts + 1 record from 1999
  survivors by country: usa 20, uk 12, germany 8, netherlands 2, none 12
  planted co-authorship: berg-li x5, triangle costa/de vries/smit x4 per pair, ruiz-hale x3
  three planted topics, assigned round-robin over survivors
"""
import csv
import io
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "bibliopipe" / "data" / "fixture"

TOPICS = [
    ["path", "planning", "algorithm", "optimization", "trajectory", "formation", "obstacle", "task"],
    ["network", "communication", "protocol", "routing", "channel", "link", "jamming", "interference"],
    ["control", "vehicle", "controller", "sensor", "guidance", "flight", "navigation", "tracking"],
]
PLURAL = {"path": "paths", "algorithm": "algorithms", "network": "networks", "protocol": "protocols",
          "link": "links", "vehicle": "vehicles", "sensor": "sensors", "controller": "controllers",
          "obstacle": "obstacles", "task": "tasks", "channel": "channels"}
COMMON = ["drone", "military", "present", "propose", "improve", "show", "swarm", "system", "uav"]


def abstract(rng, topic):
    w = [TOPICS[topic][i] for i in rng.choice(8, 7)]
    other = (topic + 1 + int(rng.integers(2))) % 3
    w.insert(int(rng.integers(8)), TOPICS[other][int(rng.integers(8))])
    pl = lambda x: PLURAL.get(x, x)
    return (f"This paper presents a {w[0]} {w[1]} approach for military UAV swarms. "
            f"The proposed {w[2]} improves {pl(w[3])} and {w[4]} of drones, "
            f"while {pl(w[5])} support the {w[6]}. Results show robust {pl(w[7])}.")


def main():
    rng = np.random.default_rng(20221115)
    countries = ["United States"] * 20 + ["United Kingdom"] * 12 + ["Germany"] * 8 + ["Netherlands"] * 2 + [""] * 12
    countries = [countries[i] for i in rng.permutation(54)]
    # planted authors on fixed survivor slots; countries forced to match the story
    planted = {}
    for s in (1, 7, 13, 19, 25):
        planted[s] = ["  Antonia Berg", "Chen  Li."]
    tri = ["Maria Costa", "Jan de Vries", "Ivo Smit"]
    for s in (4, 10, 16, 22):
        planted[s] = list(tri)
    for s in (31, 37, 43):
        planted[s] = ["Ana Ruiz", "Tom Hale"]
    # swap the wanted countries into the planted slots; the multiset stays intact
    for s in (1, 7, 13, 19, 25):
        if countries[s] != "United States":
            j = next(i for i, c in enumerate(countries) if c == "United States" and i not in (1, 7, 13, 19, 25))
            countries[s], countries[j] = countries[j], countries[s]
    for s, c in zip((4, 10, 16, 22), ("Netherlands", "Germany", "Netherlands", "Germany")):
        if countries[s] != c:
            j = next(i for i, x in enumerate(countries) if x == c and i not in (1, 7, 13, 19, 25, 4, 10, 16, 22))
            countries[s], countries[j] = countries[j], countries[s]

    survivors = []
    for s in range(54):
        topic = s % 3
        year = "" if s == 50 else str(2005 + (s * 7) % 18)
        authors = planted.get(s, [f"Filler Author {s:02d}{c}" for c in "ab"[: 1 + s % 2]])
        title = f"S{s:02d} " + ["Swarm path planning", "Swarm network communication", "Swarm vehicle control"][topic] \
            + " for military drones"
        if s == 3:
            title = 'S03 Swarm vehicle control, "robust" variant\nfor military drones'
        survivors.append({"Lens ID": f"L{s:03d}", "Title": title, "Abstract": abstract(rng, topic),
                          "Author/s": ", ".join(authors), "Source Country": countries[s], "Publication Year": year})

    rows = list(survivors)
    # duplicates: same key within 40 chars, inserted after their originals
    d1 = dict(survivors[5], **{"Lens ID": "D001", "Title": survivors[5]["Title"].upper()})
    d2 = dict(survivors[20], **{"Lens ID": "D002", "Abstract": survivors[20]["Abstract"] + " Extended version."})
    d3 = dict(survivors[33], **{"Lens ID": "D003", "Title": survivors[33]["Title"] + " (extended)", "Source Country": "China"})
    empty1 = {"Lens ID": "E001", "Title": "E01 Drone swarm doctrine without abstract", "Abstract": "",
              "Author/s": "Empty Author", "Source Country": "United States", "Publication Year": "2016"}
    empty2 = {"Lens ID": "E002", "Title": "E02 Armed UAV swarms overview", "Abstract": "   ",
              "Author/s": "", "Source Country": "", "Publication Year": "2019"}
    old = {"Lens ID": "O001", "Title": "O01 Early cooperative UAV control", "Abstract": abstract(rng, 2),
           "Author/s": "Old Author", "Source Country": "United States", "Publication Year": "1999"}
    for pos, rec in sorted([(34, d3), (21, d2), (6, d1)], reverse=True):
        rows.insert(pos, rec)
    rows.insert(12, empty1)
    rows.insert(40, empty2)
    rows.insert(50, old)
    assert len(rows) == 60

    header = ["Lens ID", "Title", "Publication Year", "Author/s", "Source Country", "Abstract"]
    buf = io.StringIO(newline="")
    w = csv.DictWriter(buf, header, lineterminator="\r\n")
    w.writeheader()
    w.writerows(rows)
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "export.csv").write_text(buf.getvalue(), encoding="utf-8", newline="")

    vrng = np.random.default_rng(7)
    dim = 8
    lines = []
    for t, words in enumerate(TOPICS):
        for word in words:
            v = vrng.normal(0, 0.08, dim)
            v[t] += 1.0
            lines.append(word + " " + " ".join(f"{x:.5f}" for x in v))
    for word in COMMON + ["robust", "variant", "extended", "version", "cooperative", "early"]:
        v = vrng.normal(0, 0.08, dim)
        lines.append(word + " " + " ".join(f"{x:.5f}" for x in v))
    (OUT / "vectors.txt").write_text(f"{len(lines)} {dim}\n" + "\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()

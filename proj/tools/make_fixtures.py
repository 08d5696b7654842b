#!/usr/bin/env python3
"""Writes the hand-designed scene fixtures under fixtures/scenes/.

Run from the repository root: python3 tools/make_fixtures.py
"""

import json
import pathlib

CELL = 0.05
OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "scenes"


def blank(w, h):
    return [["#"] * w for _ in range(h)]


def carve(g, r0, c0, r1, c1):
    for r in range(r0, r1 + 1):
        for c in range(c0, c1 + 1):
            g[r][c] = "."


def rect_object(oid, category, r0, c0, r1, c1, **attrs):
    cells = [[r, c] for r in range(r0, r1 + 1) for c in range(c0, c1 + 1)]
    center = [(c0 + c1 + 1) * 0.5 * CELL, (r0 + r1 + 1) * 0.5 * CELL]
    return {"id": oid, "category": category, "attributes": attrs, "cells": cells, "center": center}


def pose(r, c, deg):
    return [(c + 0.5) * CELL, (r + 0.5) * CELL, deg]


def dump(name, doc):
    doc["grid"] = ["".join(row) for row in doc["grid"]]
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")


def corridor():
    # 8 m x 1 m hallway, a bench at the east end
    w, h = 164, 24
    g = blank(w, h)
    carve(g, 2, 2, 21, 161)
    return {
        "id": "corridor",
        "cell_size": CELL,
        "grid": g,
        "objects": [rect_object("bench1", "bench", 6, 150, 17, 159, color="green")],
        "rooms": [{"label": "hallway", "rect": [2, 2, 21, 161]}],
        "qa": [
            {
                "question": "What color is the bench in the hallway?",
                "answer": "green",
                "target_id": "bench1",
                "end_pose": pose(11, 140, 0),
                "type": "color",
            }
        ],
    }


def two_room(sealed=False):
    # kitchen (west) and living room (east), 2.5 m x 3 m each, joined by a
    # 0.9 m door; in the sealed variant the door is bricked up and the agent
    # starts in the living room.
    w, h = 104, 64
    g = blank(w, h)
    carve(g, 2, 2, 61, 50)  # kitchen
    carve(g, 2, 53, 61, 101)  # living room
    if not sealed:
        carve(g, 22, 51, 39, 52)
    objects = [
        rect_object("cab1", "cabinet", 2, 14, 9, 23, color="brown"),
        rect_object("vase1", "vase", 6, 24, 9, 27, color="white", on="cab1"),
        rect_object("table1", "table", 40, 14, 49, 29, color="black"),
        rect_object("cab2", "cabinet", 54, 66, 61, 81, color="white"),
        rect_object("sofa1", "sofa", 2, 70, 11, 93, color="blue"),
        rect_object("chair1", "chair", 36, 92, 43, 101, color="red"),
        rect_object("chair2", "chair", 47, 92, 54, 101, color="red"),
    ]
    qa = [
        {
            "question": "What color are the cabinets in the kitchen?",
            "answer": "brown",
            "target_id": "cab1",
            "end_pose": pose(16, 19, 270),
            "type": "color",
        },
        {
            "question": "What room is the blue sofa located in?",
            "answer": "living room",
            "target_id": "sofa1",
            "end_pose": pose(18, 81, 270),
            "type": "room",
        },
        {
            "question": "Where is the black table?",
            "answer": "room kitchen",
            "target_id": "table1",
            "end_pose": pose(33, 21, 90),
            "type": "location",
        },
        {
            "question": "What is on the cabinet in the kitchen?",
            "answer": "vase",
            "target_id": "cab1",
            "end_pose": pose(16, 19, 270),
            "type": "what_is",
        },
        {
            "question": "How many chairs are in the living room?",
            "answer": "2",
            "target_id": "chair1",
            "end_pose": pose(45, 84, 0),
            "type": "count",
        },
    ]
    doc = {
        "id": "sealed_room" if sealed else "two_room",
        "cell_size": CELL,
        "grid": g,
        "objects": objects,
        "rooms": [
            {"label": "kitchen", "rect": [2, 2, 61, 50]},
            {"label": "living room", "rect": [2, 53, 61, 101]},
        ],
        "qa": qa[:1] if sealed else qa,
    }
    return doc


def main():
    dump("corridor", corridor())
    dump("two_room", two_room())
    dump("sealed_room", two_room(sealed=True))


if __name__ == "__main__":
    main()

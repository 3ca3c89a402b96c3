#!/usr/bin/env python3
"""Regenerate the synthetic corpus projects (monotone, shift_a, shift_b).

Each project is built from call-chain "lanes": a test invokes lane_d1, which
calls lane_d2, and so on to depth 5, so the method at depth j sits at stack
distance j from the test. A lane's "blind point" K is the depth at which the
chain's return value stops being folded into the asserted total: the method
at K discards its callee's value, so everything deeper is ineffectively
tested while depths 1..K stay effectively tested.

monotone / shift_a: ineffectiveness grows with distance; effective methods
get padded bodies (more statements and branches) so the label is learnable
from cheap measures. shift_b inverts both signals: shallow methods are long
and ineffective, the depth-5 worker is a one-liner kept effective by an
assert inside the depth-4 method.

Output is deterministic; run from the repository root:
    python tools/make_corpus.py
"""

import json
from pathlib import Path

CORPUS = Path(__file__).resolve().parents[1] / "src" / "tplab" / "corpus"

DEPTH = 5


PAD_ITERATIONS = 25
PAD_TOTAL = 4 * ((PAD_ITERATIONS + 1) // 2) + 2 * (PAD_ITERATIONS // 2)


def padded_body(const, tail_lines):
    # evaluates acc to exactly `const`, with loops and branches; the
    # iteration count only adds interpreted work, not statements
    lines = [
        f"    let acc = {const};",
        "    let i = 0;",
        f"    while i < {PAD_ITERATIONS} {{",
        "        if i % 2 == 0 {",
        "            acc = acc + 4;",
        "        } else {",
        "            acc = acc + 2;",
        "        }",
        "        i = i + 1;",
        "    }",
        f"    if acc > {const} {{",
        f"        acc = acc - {PAD_TOTAL};",
        "    }",
    ]
    return lines + tail_lines


def lane_const(base, lane, depth):
    return base + 5 * lane + 3 * depth


def forward_project(project_id, n_lanes, blind_points, const_base):
    """Project where value flow stops at each lane's blind point.

    Each lane gets two equivalent tests so that a killed mutant leaves work
    for the full matrix after early abort stops.
    """
    chunks = []
    tests = []
    for lane in range(n_lanes):
        k = blind_points[lane]
        for j in range(1, DEPTH + 1):
            name = f"{project_id}_l{lane}_d{j}"
            nxt = f"{project_id}_l{lane}_d{j + 1}"
            const = lane_const(const_base, lane, j)
            if j < k:
                body = padded_body(const, [f"    return acc + {nxt}();"])
            elif j == k:
                tail = [f"    {nxt}();", "    return acc;"] if j < DEPTH \
                    else ["    return acc;"]
                body = padded_body(const, tail)
            elif j < DEPTH:
                body = [f"    return {const} + {nxt}();"]
            else:
                body = [f"    return {const};"]
            chunks.append("\n".join([f"fn {name}() -> int {{"] + body + ["}"]))
        total = sum(lane_const(const_base, lane, j) for j in range(1, k + 1))
        for suffix in ("t", "t2"):
            tests.append("\n".join([
                f"test {project_id}_l{lane}_{suffix} {{",
                f"    assert {project_id}_l{lane}_d1() == {total};",
                "}",
            ]))
    return chunks, tests


def shift_b_project(project_id, n_lanes, const_base):
    """Inverted signal: depths 1..4 are long and ineffective, the depth-5
    one-liner is kept effective by an assert inside the depth-4 method."""
    chunks = []
    tests = []
    for lane in range(n_lanes):
        worker = f"{project_id}_l{lane}_w"
        worker_value = const_base + 4 * lane
        for j in range(1, DEPTH):
            name = f"{project_id}_l{lane}_d{j}"
            nxt = f"{project_id}_l{lane}_d{j + 1}"
            const = lane_const(const_base, lane, j)
            if j < DEPTH - 1:
                body = padded_body(const, [f"    return acc + {nxt}();"])
            else:
                body = padded_body(const, [
                    f"    assert {worker}() == {worker_value};",
                    "    return acc;",
                ])
            chunks.append("\n".join([f"fn {name}() -> int {{"] + body + ["}"]))
        chunks.append("\n".join([
            f"fn {worker}() -> int {{",
            f"    return {worker_value};",
            "}",
        ]))
        tests.append("\n".join([
            f"test {project_id}_l{lane}_t {{",
            f"    {project_id}_l{lane}_d1();",
            "}",
        ]))
    return chunks, tests


SATELLITES = """\
fn sat_note() -> str {
    return "note";
}

fn sat_tag() -> str {
    return "tag";
}

fn sat_list() -> arr {
    return [4, 5];
}

fn sat_pair() -> arr {
    return [1];
}

fn sat_ping() -> void {
    let x = 1;
}

fn sat_pong() -> void {
    assert true;
}

test sat_t1 {
    assert str_cat(sat_note(), "!") == "note!";
    assert len(sat_list()) == 2;
}

test sat_t2 {
    sat_tag();
    sat_pair();
    sat_ping();
    sat_pong();
}"""


def write_project(project_id, chunks, tests):
    directory = CORPUS / project_id
    directory.mkdir(parents=True, exist_ok=True)
    source = "\n\n".join(chunks + tests) + "\n"
    (directory / f"{project_id}.tl").write_text(source, encoding="utf-8")
    manifest = {"project_id": project_id, "sources": [f"{project_id}.tl"]}
    (directory / "project.json").write_text(
        json.dumps(manifest, indent=4) + "\n", encoding="utf-8")
    print(f"wrote {project_id}: {source.count('fn ')} functions,"
          f" {source.count('test ')} tests")


def main():
    # 16 lanes, blind points 1,1,1,1,2,...: per-distance ineffective
    # proportions 0, .25, .5, .75, 1
    blind = [1] * 4 + [2] * 4 + [3] * 4 + [4] * 4
    chunks, tests = forward_project("monotone", 16, blind, 7)
    write_project("monotone", chunks, tests)

    blind = [1] * 2 + [2] * 3 + [3] * 3 + [4] * 2
    chunks, tests = forward_project("shift_a", 10, blind, 11)
    chunks.append(SATELLITES)
    write_project("shift_a", chunks, tests)

    chunks, tests = shift_b_project("shift_b", 10, 13)
    write_project("shift_b", chunks, tests)


if __name__ == "__main__":
    main()

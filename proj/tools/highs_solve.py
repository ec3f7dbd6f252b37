#!/usr/bin/env python3
# Copyright 2026 The OptVerifier Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Solve an LP file and write a solution file for optverifier.

Usage: highs_solve.py MODEL.lp SOLUTION [--format generic_json|cbc_sol]

Uses highspy when importable, else scipy.optimize.milp with a reader for
the LP subset optverifier emits.
"""

import argparse
import json
import math
import re
import sys


def solve_highspy(lp_path):
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    if h.readModel(lp_path) != highspy.HighsStatus.kOk:
        return {"status": "error", "message": "HiGHS could not read the model"}
    h.run()
    st = h.getModelStatus()
    M = highspy.HighsModelStatus
    if st == M.kUnboundedOrInfeasible:
        # Decide by solving the feasibility problem alone.
        lp = h.getLp()
        h.changeColsCost(lp.num_col_, list(range(lp.num_col_)), [0.0] * lp.num_col_)
        h.run()
        st = M.kUnbounded if h.getModelStatus() == M.kOptimal else M.kInfeasible
    if st == M.kOptimal:
        names = h.getLp().col_names_
        vals = h.getSolution().col_value
        return {
            "status": "optimal",
            "objective": h.getInfo().objective_function_value,
            "values": {n: float(v) for n, v in zip(names, vals)},
        }
    if st == M.kInfeasible:
        return {"status": "infeasible"}
    if st == M.kUnbounded:
        return {"status": "unbounded"}
    return {"status": "error", "message": h.modelStatusToString(st)}


SECTIONS = {
    "maximize": "obj", "minimize": "obj", "subject to": "rows",
    "bounds": "bounds", "generals": "gen", "binaries": "bin", "end": "end",
}


def parse_lp(text):
    sense, obj, const = 1, {}, 0.0
    rows, bounds, integer, names = [], {}, set(), []
    section, buf = None, []

    def note(v):
        if v not in bounds:
            bounds[v] = [0.0, math.inf]
            names.append(v)

    def linear(expr):
        coefs, c = {}, 0.0
        expr = expr.replace(" ", "")
        for sign, num, name in re.findall(r"([+-]?)([0-9.]+(?:[eE][+-]?[0-9]+)?)?([A-Za-z_][A-Za-z0-9_]*)?", expr):
            if not num and not name:
                continue
            k = float(num) if num else 1.0
            if sign == "-":
                k = -k
            if name:
                note(name)
                coefs[name] = coefs.get(name, 0.0) + k
            else:
                c += k
        return coefs, c

    def flush():
        if not buf:
            return
        stmt = " ".join(buf)
        buf.clear()
        body = stmt.split(":", 1)[1] if ":" in stmt else stmt
        if section == "obj":
            nonlocal obj, const
            obj, const = linear(body)
        elif section == "rows":
            m = re.match(r"(.*?)(<=|>=|=)(.*)", body)
            coefs, c = linear(m.group(1))
            rows.append((coefs, m.group(2), float(m.group(3)) - c))

    for raw in text.splitlines():
        line = raw.strip()
        key = line.lower()
        if key in SECTIONS:
            flush()
            if key == "minimize":
                sense = -1
            section = SECTIONS[key]
            continue
        if not line:
            continue
        if section in ("obj", "rows"):
            if raw.startswith("  ") and buf:
                buf.append(line)
            else:
                flush()
                buf.append(line)
        elif section == "bounds":
            parts = line.split()
            if len(parts) == 2 and parts[1] == "free":
                note(parts[0])
                bounds[parts[0]] = [-math.inf, math.inf]
            elif len(parts) == 3:
                note(parts[0])
                bounds[parts[0]][0] = float(parts[2])
            elif len(parts) == 5:
                note(parts[2])
                bounds[parts[2]] = [float(parts[0]), float(parts[4])]
        elif section in ("gen", "bin"):
            for v in line.split():
                note(v)
                integer.add(v)
                if section == "bin":
                    bounds[v] = [max(bounds[v][0], 0.0), min(bounds[v][1], 1.0)]
    flush()
    return sense, obj, const, rows, bounds, integer, names


def solve_scipy(lp_path):
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp

    with open(lp_path) as f:
        sense, obj, const, rows, bounds, integer, names = parse_lp(f.read())
    idx = {n: i for i, n in enumerate(names)}
    n = len(names)
    c = np.zeros(n)
    for k, v in obj.items():
        c[idx[k]] = -sense * v
    cons = []
    if rows:
        A = np.zeros((len(rows), n))
        lo = np.full(len(rows), -np.inf)
        hi = np.full(len(rows), np.inf)
        for r, (coefs, op, rhs) in enumerate(rows):
            for k, v in coefs.items():
                A[r, idx[k]] = v
            if op in ("<=", "="):
                hi[r] = rhs
            if op in (">=", "="):
                lo[r] = rhs
        cons.append(LinearConstraint(A, lo, hi))
    integrality = np.array([1 if nm in integer else 0 for nm in names])
    b = Bounds([bounds[nm][0] for nm in names], [bounds[nm][1] for nm in names])
    res = milp(c, constraints=cons, integrality=integrality, bounds=b)
    if res.status == 0:
        return {
            "status": "optimal",
            "objective": float(sense * -res.fun + const) if n else const,
            "values": {nm: float(v) for nm, v in zip(names, res.x)},
        }
    if res.status == 2:
        return {"status": "infeasible"}
    if res.status == 3:
        return {"status": "unbounded"}
    return {"status": "error", "message": res.message}


def write_cbc(result, path):
    with open(path, "w") as f:
        st = result["status"]
        if st == "optimal":
            f.write("Optimal - objective value %.12g\n" % result["objective"])
            for i, (k, v) in enumerate(result["values"].items()):
                f.write("%7d %-24s %15.12g %15g\n" % (i, k, v, 0.0))
        elif st == "infeasible":
            f.write("Infeasible - objective value 0\n")
        elif st == "unbounded":
            f.write("Unbounded - objective value 0\n")
        else:
            f.write("Error - %s\n" % result.get("message", ""))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("lp")
    ap.add_argument("sol")
    ap.add_argument("--format", choices=["generic_json", "cbc_sol"], default="generic_json")
    ap.add_argument("--backend", choices=["auto", "highspy", "scipy"], default="auto")
    args = ap.parse_args()
    result = None
    if args.backend in ("auto", "highspy"):
        try:
            result = solve_highspy(args.lp)
        except ImportError:
            if args.backend == "highspy":
                raise
    if result is None:
        result = solve_scipy(args.lp)
    if args.format == "cbc_sol":
        write_cbc(result, args.sol)
    else:
        with open(args.sol, "w") as f:
            json.dump(result, f)
    return 0


if __name__ == "__main__":
    sys.exit(main())

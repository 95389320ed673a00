#!/usr/bin/env python3
"""Writes the Maxwell system on J^1 of T*M and its reduced target for n = 2, 3, 4."""

import argparse
import itertools
import pathlib

BASE = ["t", "x", "y", "z"]


def metric(i):
    return -1 if i == 0 else 1


def F(i, j):
    if i == j:
        return "0"
    if i < j:
        return f"F{i}{j}"
    return f"(-F{j}{i})"


def jet_system(n):
    base = BASE[:n]
    fields = [f"A{i}" for i in range(n)]
    jets = [f"A{i}_{j}" for i in range(n) for j in range(n)]
    terms = []
    for i, j in itertools.product(range(n), repeat=2):
        if i == j:
            continue
        c = metric(i) * metric(j)
        sign = "-" if c < 0 else "+"
        terms.append(f"{sign} (dA{j}_{i} - dA{i}_{j}) * ((1/2) * A{i}_{j} * vol - dA{i} * vol[{base[j]}])")
    body = "\n        ".join(terms)
    maps = "\n  ".join(f"F{i}{j} = A{j}_{i} - A{i}_{j}" for i in range(n) for j in range(i + 1, n))
    return (
        f"# Maxwell field on {n}-dimensional Minkowski space, first-order form on J^1.\n"
        f"# Ai = A_i, Ai_j = A_(i,j).\n"
        f"bundle {{ base: {', '.join(base)}  fiber: {', '.join(fields + jets)} }}\n\n"
        f"form omega deg 2 {{\n  wedge = {body.lstrip('+ ')}\n}}\n\n"
        f"map p -> maxwell_reduced_n{n} {{\n  {maps}\n}}\n"
    )


def reduced_system(n):
    base = BASE[:n]
    fields = [f"A{i}" for i in range(n)]
    strengths = [f"F{i}{j}" for i in range(n) for j in range(i + 1, n)]
    terms = []
    for i, j in itertools.product(range(n), repeat=2):
        if i == j:
            continue
        c = metric(i) * metric(j)
        sign = "-" if c < 0 else "+"
        terms.append(f"{sign} d({F(i, j)}) * ((1/4) * {F(j, i)} * vol - dA{i} * vol[{base[j]}])")
    body = "\n        ".join(terms)
    return (
        f"# Reduced Maxwell system in terms of the potential and field strength, n = {n}.\n"
        f"bundle {{ base: {', '.join(base)}  fiber: {', '.join(fields + strengths)} }}\n\n"
        f"form omega deg 2 {{\n  wedge = {body.lstrip('+ ')}\n}}\n"
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", type=pathlib.Path)
    args = ap.parse_args()
    for n in (2, 3, 4):
        (args.outdir / f"maxwell_n{n}.pdh").write_text(jet_system(n))
        (args.outdir / f"maxwell_reduced_n{n}.pdh").write_text(reduced_system(n))


if __name__ == "__main__":
    main()

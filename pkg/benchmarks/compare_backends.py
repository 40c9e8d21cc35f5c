"""Compare the compiled scan kernel with the pure-Python fallback.

Runs the area benchmark once per available backend on the same seeded pool
and users, checks that both backends agree on every verdict, and prints the
mean scan time per list length side by side.

    python benchmarks/compare_backends.py [--iterations N] [--seed S] [--lengths 25,100,400]
"""
import argparse
import sys

from geolocdns import bench


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--lengths", default=",".join(map(str, bench.DEFAULT_LENGTHS)))
    p.add_argument("--iterations", type=int, default=bench.DEFAULT_ITERATIONS)
    p.add_argument("--seed", type=int, default=42)
    args = p.parse_args(argv)
    lengths = [int(x) for x in args.lengths.split(",")]

    results = bench.compare_backends(lengths, args.iterations, args.seed)
    names = sorted(results)
    if len(names) < 2:
        print(f"only {names[0]!r} is available; build the extension to compare", file=sys.stderr)

    verdicts = {n: results[n].verdicts for n in names}
    agree = all(verdicts[n] == verdicts[names[0]] for n in names)

    header = f"{'length':>6} " + " ".join(f"{n + ' ms':>14}" for n in names)
    if len(names) == 2:
        header += f" {'speedup':>8}"
    print(header)
    for i, length in enumerate(lengths):
        means = [results[n].rows[i].mean_ms for n in names]
        line = f"{length:>6} " + " ".join(f"{m:14.5f}" for m in means)
        if len(names) == 2:
            compiled, python = results["compiled"].rows[i].mean_ms, results["python"].rows[i].mean_ms
            line += f" {python / compiled:7.1f}x"
        print(line)
    print(f"verdicts identical across backends: {agree}")
    return 0 if agree else 1


if __name__ == "__main__":
    sys.exit(main())

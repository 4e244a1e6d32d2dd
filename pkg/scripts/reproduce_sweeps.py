#!/usr/bin/env python3
"""Run every config under configs/ and collect the CSVs under one results tree.

Each config lands in its own subdirectory:

    results/
      distance/           distance.csv, summary.json
      distance_far_feed/  ...
      angle/              ...
      gain/               ...
      patterns/           boresight.csv, steered_50.csv, steered_60.csv, ...
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from rislink.experiments import run_config  # noqa: E402

HERE = os.path.dirname(os.path.abspath(__file__))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--configs", default=os.path.join(HERE, "..", "configs"),
                        help="directory of .cfg files to run")
    parser.add_argument("--out", default=os.path.join(HERE, "..", "results"),
                        help="output tree (one subdirectory per config)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    cfgs = sorted(f for f in os.listdir(args.configs) if f.endswith(".cfg"))
    if not cfgs:
        print(f"no .cfg files in {args.configs}", file=sys.stderr)
        return 2
    for name in cfgs:
        stem = name[:-len(".cfg")]
        out_dir = os.path.join(args.out, stem)
        summary = run_config(os.path.join(args.configs, name), out_dir, args.seed)
        for entry in summary["sweeps"]:
            line = f"{stem}/{entry['csv']}: {entry['rows']} rows"
            m = entry.get("metrics", {})
            if "peak_angle_deg" in m:
                line += (f", peak {m['peak_angle_deg']:g} deg"
                         f", hpbw {m['hpbw_deg']:.2f} deg")
            elif "path_loss_span_db" in m:
                line += f", path loss span {m['path_loss_span_db']:.2f} dB"
            print(line)
    print(f"results under {os.path.abspath(args.out)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

#!/usr/bin/env python3
"""Re-read every pcap of a run with dpkt and compare against its manifest.

Usage: pcap_reference_check.py RUN_DIR [RUN_DIR ...]

Prints one JSON object per run and exits 0 only if every capture parses,
every record is a well-formed IPv4 datagram of the recorded length, and the
per-file record counts equal the manifest's.
"""

import json
import pathlib
import sys

import dpkt


def check_run(run_dir):
    run_dir = pathlib.Path(run_dir)
    manifest = json.loads((run_dir / "manifest.json").read_text())
    files = bad = records = 0
    problems = []
    for entry in manifest["files"]:
        if "packets" not in entry:
            continue
        files += 1
        path = run_dir / entry["path"]
        try:
            with open(path, "rb") as fh:
                reader = dpkt.pcap.Reader(fh)
                if reader.datalink() != 101 or reader.snaplen != 65535:
                    raise ValueError("unexpected linktype or snaplen")
                n = 0
                for _ts, buf in reader:
                    ip = dpkt.ip.IP(buf)
                    if ip.v != 4 or ip.len != len(buf):
                        raise ValueError("record %d is not a complete IPv4 datagram" % n)
                    n += 1
        except Exception as exc:  # dpkt raises a mix of types on bad input
            bad += 1
            problems.append("%s: %s" % (entry["path"], exc))
            continue
        records += n
        if n != entry["packets"]:
            bad += 1
            problems.append("%s: dpkt read %d records, manifest says %d" % (entry["path"], n, entry["packets"]))
    return {"run": str(run_dir), "pcaps": files, "records": records, "bad": bad, "problems": problems[:10]}


def main(argv):
    if len(argv) < 2:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    ok = True
    for d in argv[1:]:
        res = check_run(d)
        print(json.dumps(res))
        ok = ok and res["bad"] == 0 and res["pcaps"] > 0
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv))

"""Assigning IPC codes to NACE divisions.

Lookup is by longest matching prefix; codes with no match fall into the
Co_IPC residual group.  Some chemistry subclasses belong to division 20
(or 32 for C12M) when the same patent also carries an A61K 8/ code, and
to division 21 otherwise.
"""
import io

from techineq import PatentCodeEvent, Scheme, classify, load_concordance, partition

table = load_concordance(io.StringIO(
    "ipc_prefix,nace_division\n"
    "C07C,21\nC12M,21\nA61K,21\nA61K 8/,20\nG06F,26\nG06F 3/,62\n"))

print("G06F 3/048 ->", table.lookup("G06F 3/048"))
print("G06F 17/30 ->", table.lookup("G06F 17/30"))
print("Y10S 1/00  ->", table.lookup("Y10S 1/00"))


def patent(pid, *codes):
    return [PatentCodeEvent(pid, 2000, Scheme.IPC, c) for c in codes]


patents = [
    patent("WO1", "C07C 5/00", "A61K 8/02"),
    patent("WO2", "C07C 5/00"),
    patent("WO3", "C12M 1/00", "A61K 8/02"),
    patent("WO4", "C12M 1/00"),
]
classified = set()
for p in patents:
    out = classify(p, table)
    classified |= out
    print(p[0].patent_id, sorted((e.code, e.division) for e in out))

for split in (True, False):
    part = partition(classified, 2000, split_dual=split)
    print(f"\nsplit_dual={split}")
    for div, d in part.subsets.items():
        print(f"  {div}: {dict(d.counts)}")

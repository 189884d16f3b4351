"""Regenerate data/usage.csv from the wordfreq package (English, 'best' wordlist).

Run once; the package itself only reads the resulting CSV.
"""
import csv
import sys
from pathlib import Path

from wordfreq import top_n_list, word_frequency

DATA = Path(__file__).resolve().parents[1] / "src" / "wordlediff" / "data"


def main() -> None:
    words = (DATA / "sgb-words.txt").read_text().split()
    # cover answers outside the SGB list (e.g. past contest words)
    extra = [w for w in top_n_list("en", 200_000) if len(w) == 5 and w.isascii() and w.isalpha()]
    extra += sys.argv[1:]
    with open(DATA / "usage.csv", "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["word", "frequency"])
        for w in sorted(set(words) | set(extra)):
            out.writerow([w, repr(word_frequency(w, "en"))])


if __name__ == "__main__":
    main()

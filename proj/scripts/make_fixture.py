#!/usr/bin/env python3
"""Regenerates tests/data/fixture (parallel corpora + pipeline config).

Deterministic: a fixed-seed RNG drives every choice, so reruns are
byte-identical. The corpora mix well-formed segments with known dirt
(duplicates, identical pairs, number mismatches, length-ratio and
token-length violations) for the cleaner to count.
"""

import json
import pathlib
import random

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "fixture"

# Inuktitut UCAS codepoints with ICI romanizations (vowels, CV series, finals).
SYLLABICS = [
    0x1403, 0x1404, 0x1405, 0x1406, 0x140A, 0x140B,
    0x1431, 0x1432, 0x1433, 0x1434, 0x1438, 0x1439, 0x1449,
    0x144E, 0x144F, 0x1450, 0x1451, 0x1455, 0x1456, 0x1466,
    0x146D, 0x146E, 0x146F, 0x1470, 0x1472, 0x1473, 0x1483,
    0x148B, 0x148C, 0x148D, 0x148E, 0x1490, 0x1491, 0x14A1,
    0x14A5, 0x14A6, 0x14A7, 0x14A8, 0x14AA, 0x14AB, 0x14BB,
    0x14C2, 0x14C3, 0x14C4, 0x14C5, 0x14C7, 0x14C8, 0x14D0,
    0x14D5, 0x14D6, 0x14D7, 0x14D8, 0x14DA, 0x14DB, 0x14EA,
    0x14EF, 0x14F0, 0x14F1, 0x14F2, 0x14F4, 0x14F5, 0x1505,
    0x1528, 0x1529, 0x152A, 0x152B, 0x152D, 0x152E, 0x153E,
    0x1546, 0x1547, 0x1548, 0x1549, 0x154B, 0x154C, 0x1550,
    0x1555, 0x1556, 0x1557, 0x1558, 0x1559, 0x155A, 0x155D,
    0x157F, 0x1580, 0x1581, 0x1582, 0x1583, 0x1584, 0x1585,
    0x158F, 0x1590, 0x1591, 0x1592, 0x1593, 0x1594, 0x1595,
    0x1671, 0x1672, 0x1673, 0x1674, 0x1675, 0x1676, 0x1596,
    0x15A0, 0x15A1, 0x15A2, 0x15A3, 0x15A4, 0x15A5, 0x15A6,
    0x157C,
]

EN_WORDS = """
the of land people house water winter summer hunting community assembly member
question answer minister spoke report northern region school children language
support program budget year travel ice snow road airport health service elder
together work food country camp river family morning evening meeting agreed
new old strong small large good many letter committee motion speaker table
""".split()

FI_WORDS = """
maa vesi talvi kesä kylä koulu lapsi kieli tuki ohjelma vuosi matka tie
terveys perhe aamu ilta kokous uusi vanha vahva pieni suuri hyvä moni kirje
valiokunta puhuja pöytä kansa talo metsä järvi lumi jää kala lintu päivä
""".split()

ET_WORDS = """
maa vesi talv suvi küla kool laps keel toetus programm aasta reis tee
tervis pere hommik õhtu koosolek uus vana tugev väike suur hea mitu kiri
komisjon kõneleja laud rahvas maja mets järv lumi jää kala lind päev
""".split()


def en_sentence(rng, n_lo=4, n_hi=12):
    return " ".join(rng.choice(EN_WORDS) for _ in range(rng.randint(n_lo, n_hi)))


def word_sentence(rng, words, n_lo=4, n_hi=12):
    return " ".join(rng.choice(words) for _ in range(rng.randint(n_lo, n_hi)))


def iu_word(rng, lo=2, hi=6):
    return "".join(chr(rng.choice(SYLLABICS)) for _ in range(rng.randint(lo, hi)))


def iu_sentence(rng, n_lo=3, n_hi=10):
    return " ".join(iu_word(rng) for _ in range(rng.randint(n_lo, n_hi)))


def build_dataset(rng, n_clean, other_side, dirt):
    """Returns (src_lines, tgt_lines); src is English, tgt per other_side."""
    pairs = []
    for i in range(n_clean):
        src = en_sentence(rng)
        tgt = other_side(rng)
        if i % 7 == 3:  # matching numbers on both sides
            num = str(rng.randint(2, 9999))
            src += " " + num
            tgt += " " + num
        pairs.append((src, tgt))

    for _ in range(dirt["duplicates"]):
        pairs.append(pairs[rng.randrange(len(pairs))])
    for _ in range(dirt["identical"]):
        text = en_sentence(rng)
        pairs.append((text, text))
    for _ in range(dirt["number_mismatch"]):
        n = rng.randint(2, 999)
        pairs.append((en_sentence(rng) + f" {n}", other_side(rng) + f" {n + 1}"))
    for _ in range(dirt["char_ratio"]):
        pairs.append((rng.choice(EN_WORDS), other_side(rng) + " " + other_side(rng)
                      + " " + other_side(rng) + " " + other_side(rng)))
    for _ in range(dirt["avg_token_len"]):
        pairs.append(("x" * rng.randint(45, 60), other_side(rng)))

    rng.shuffle(pairs)
    return [p[0] for p in pairs], [p[1] for p in pairs]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20200042)

    datasets = [
        ("hansard", "iu", iu_sentence, 182,
         dict(duplicates=6, identical=4, number_mismatch=5, char_ratio=2, avg_token_len=1)),
        ("wiki", "fi", lambda r: word_sentence(r, FI_WORDS), 138,
         dict(duplicates=4, identical=3, number_mismatch=3, char_ratio=1, avg_token_len=1)),
        ("news", "et", lambda r: word_sentence(r, ET_WORDS), 140,
         dict(duplicates=3, identical=2, number_mismatch=3, char_ratio=1, avg_token_len=1)),
    ]

    config = {
        "seed": 42,
        "output_dir": "out",
        "stages": ["romanize", "clean", "bpe", "mix"],
        "datasets": [],
        "romanize": {"langs": ["iu"]},
        "clean": {
            "min_avg_token_len": 1.0,
            "max_avg_token_len": 40.0,
            "max_char_ratio": 9.0,
            "rules": ["avg_token_len", "identical", "number_mismatch", "char_ratio"],
            "global_dedup": False,
        },
        "bpe": {"merges": 200, "marker": "⟨/w⟩"},
        "mix": {
            "directions": [["en", "iu"], ["iu", "en"], ["en", "fi"],
                           ["fi", "en"], ["en", "et"], ["et", "en"]],
            "tag_format": "⟨2{lang}⟩",
            "exhaustion_policy": "restart",
            "shuffle": True,
            "cycles": 40,
        },
        "shard_size": 100,
    }
    weights = {"hansard": 3, "wiki": 2, "news": 1}

    for name, lang, side, n_clean, dirt in datasets:
        src, tgt = build_dataset(rng, n_clean, side, dirt)
        (OUT / f"{name}.en").write_text("\n".join(src) + "\n", encoding="utf-8")
        (OUT / f"{name}.{lang}").write_text("\n".join(tgt) + "\n", encoding="utf-8")
        config["datasets"].append({
            "name": name,
            "source": f"{name}.en",
            "target": f"{name}.{lang}",
            "src_lang": "en",
            "tgt_lang": lang,
            "weight": weights[name],
        })

    (OUT / "config.json").write_text(
        json.dumps(config, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    total = sum(n + sum(d.values()) for _, _, _, n, d in datasets)
    print(f"wrote {total} segments across {len(datasets)} datasets to {OUT}")


if __name__ == "__main__":
    main()

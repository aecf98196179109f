#!/usr/bin/env python3
"""Regenerates the bundled fixture corpora and held-out test set.

Sentences are produced from small templates over hand-picked Hindi and
Magahi vocabulary with a fixed seed, so the output is reproducible:

    python3 scripts/make_fixtures.py crates/core/data/fixtures
"""

import random
import sys
from pathlib import Path

SEED = 20181016

MAG = {
    "subj": ["हम", "हमनी", "ऊ", "तू", "तोहनी", "रमवा", "सितवा", "लइकवा", "लइकिया",
             "बेटवा", "बेटिया", "भइया", "माई", "बाबूजी", "दीदी", "ओकर बेटवा", "हमर भइया"],
    "obj": ["अमवा", "भतवा", "रोटिया", "दुधवा", "किताबिया", "गइया", "कुकुरवा", "पनिया",
            "कपड़वा", "सगवा", "मछरिया", "चिठिया"],
    "pverb": ["देलक", "कहलक", "खइलक", "पीलक", "देखलक", "कइलक", "लइलक", "बोललक",
              "देलकइ", "धइलक", "बेचलक", "किनलक"],
    "ivp": ["गेल", "अइलन", "गेलन", "गेलथिन", "अइलथिन", "सुतलो", "भागलक", "बइठलक"],
    "fverb": ["जइबइ", "खइबउ", "देखबे", "सुतबे", "जइबो", "करबइ", "अइबइ", "किनबइ"],
    "pres": ["जा हे", "खा हे", "जा हथिन", "जा ही", "कर हे", "सुत हे", "बइठल हे"],
    "place": ["बजार", "गाँव", "खेतवा", "पटना", "घरवा", "नदिया", "इसकुलवा", "मेलवा"],
    "num": ["एगो", "दुगो", "तीनगो", "चारगो", "पाँचगो"],
    "noun": ["लइका", "आम", "रोटी", "गाय", "किताब", "कपड़ा", "मछरी"],
    "adjn": ["करिका लइकवा", "करिकी लइकिया", "करिकन लइकवन", "बड़का भइया", "छोटकी बहिनिया",
             "निम्मन लइकवा", "बुढ़वा बाबा"],
    "q": ["काहे", "कहिया", "कइसे", "का"],
    "when": ["कल", "आज", "अभी", "बिहान", "रतिया"],
}

HIN = {
    "subj": ["मैं", "हम", "वह", "तुम", "आप", "राम", "सीता", "लड़का", "लड़की", "मेरा भाई",
             "उसकी बहन", "किसान", "मजदूर", "पुलिस", "हम लोग", "डॉक्टर"],
    "erg": ["राम ने", "सीता ने", "उसने", "तुम ने", "मैंने", "किसान ने", "लड़के ने",
            "मेरी माँ ने", "सरकार ने", "शिक्षक ने"],
    "obj": ["आम", "खाना", "रोटी", "पानी", "किताब", "दूध", "चिट्ठी", "फल", "कपड़े", "अखबार"],
    "tverb": ["खाया", "दिया", "देखा", "किया", "लिखा", "पढ़ा", "पिया", "खरीदा", "बेचा", "भेजा"],
    "ivp": ["गया", "आया", "सोया", "पहुंच गया", "चला गया", "बैठ गया", "लौट आया", "भाग गया"],
    "fut": ["जाएगा", "जाएगी", "खाएगा", "देखेगा", "करेंगे", "आएंगे", "पढ़ेगी", "लौटेगा"],
    "prog": ["जा रहा है", "जा रही है", "जा रहे हैं", "खा रहा है", "कर रहे हैं", "सो रही है",
             "पढ़ रहा है"],
    "place": ["बाजार", "गांव", "खेत", "दिल्ली", "दफ्तर", "नदी", "स्कूल", "मेला", "शहर"],
    "num": ["एक", "दो", "तीन", "चार", "पांच"],
    "noun": ["लड़के", "आम", "रोटियां", "गायें", "किताबें", "कपड़े", "मछलियां"],
    "adjn": ["काला लड़का", "काली लड़की", "काले लड़के", "बड़ा भाई", "छोटी बहन",
             "अच्छा लड़का", "बूढ़े बाबा"],
    "q": ["क्यों", "कब", "कैसे", "क्या"],
    "when": ["कल", "आज", "अभी", "सुबह", "रात को"],
}

MAG_TEMPLATES = [
    "{subj} {obj} {pverb} ।",
    "{subj} {place} {ivp} ।",
    "{subj} {num} {noun} {pverb} आउ घर {ivp} ।",
    "{subj} {when} {place} {fverb} ।",
    "{adjn} {pres} ।",
    "हमरा जरूर {place} जाय के हलइ ।",
    "ऊ कलेजा काढ़ के {pverb} ।",
    "{subj} ओकरा {obj} देलक ।",
    "{q} {subj} {place} {ivp} ?",
    "{subj} {when} {pres} आउ {obj} {pverb} ।",
    "{num} {noun} {place} में हलइ ।",
    "{subj} बहुत निम्मन हथिन ।",
]

HIN_TEMPLATES = [
    "{erg} {obj} {tverb} ।",
    "{subj} {place} {ivp} ।",
    "{subj} {prog} ।",
    "{subj} {when} {place} {fut} ।",
    "{num} {noun} {place} में हैं ।",
    "ठेका मजदूरों के लिए {obj} नहीं है ।",
    "बच्चे बैठकर खाने का इंतजार कर रहे हैं ।",
    "{subj} समय पर {place} पहुंच गया ।",
    "{q} {subj} {place} गया था ?",
    "{erg} {when} {obj} {tverb} था ।",
    "{adjn} {place} {prog} ।",
    "{subj} अपने घर में {prog} ।",
]

# words never seen in training; they reach the suffix/rule stage
MAG_OOV = {
    "obj": ["टेबुलवा", "मोबइलवा", "कुरसिया", "बकरिया", "सड़कवा", "बसवा", "गड़िया"],
    "ivp": ["नाचलक", "हँसलक", "दउड़लक"],
}
HIN_OOV = {
    "obj": ["मोबाइल", "कुर्सी", "बकरी", "गाड़ी", "मेज", "टोकरी"],
    "tverb": ["तोड़ा", "बनाया", "सजाया"],
}

# sentences made only of unseen words
MAG_ALL_OOV = ["मोबइलवा टुटलक ।", "बकरिया दउड़लक ।"]
HIN_ALL_OOV = ["मोबाइल टूटेगा ।", "बकरी दौड़ेगी ।"]

OTHER = [
    "The text is written in English .",
    "mera naam ram hai aur main dilli mein rehta hoon",
    "Language identification is a hard problem .",
    "আমি বাংলায় গান গাই",
    "তুমি কোথায় যাচ্ছ",
    "میں اردو بولتا ہوں",
    "آپ کہاں جا رہے ہیں",
    "நான் தமிழ் பேசுகிறேன்",
    "ham kal bazaar jaibai",
    "hello world",
]


def fill(rng, template, vocab, oov=None):
    def pick(key):
        pool = list(vocab[key])
        if oov and key in oov:
            pool = oov[key]
        return rng.choice(pool)

    out = template
    while "{" in out:
        start = out.index("{")
        end = out.index("}", start)
        out = out[:start] + pick(out[start + 1:end]) + out[end + 1:]
    return out


def generate(rng, templates, vocab, n, exclude=()):
    seen = set(exclude)
    out = []
    while len(out) < n:
        s = fill(rng, rng.choice(templates), vocab)
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out


def oov_sentences(rng, templates, vocab, oov, n, exclude):
    keys = tuple(oov)
    usable = [t for t in templates if any("{" + k + "}" in t for k in keys)]
    seen = set(exclude)
    out = []
    while len(out) < n:
        s = fill(rng, rng.choice(usable), vocab, oov)
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out


def main(dest):
    rng = random.Random(SEED)
    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)

    mag = generate(rng, MAG_TEMPLATES, MAG, 320)
    hin = generate(rng, HIN_TEMPLATES, HIN, 320)

    test = []
    test += [("mag", s) for s in generate(rng, MAG_TEMPLATES, MAG, 17, mag)]
    test += [("mag", s) for s in oov_sentences(rng, MAG_TEMPLATES, MAG, MAG_OOV, 6, mag)]
    test += [("mag", s) for s in MAG_ALL_OOV]
    test += [("hin", s) for s in generate(rng, HIN_TEMPLATES, HIN, 17, hin)]
    test += [("hin", s) for s in oov_sentences(rng, HIN_TEMPLATES, HIN, HIN_OOV, 6, hin)]
    test += [("hin", s) for s in HIN_ALL_OOV]
    test += [("other", s) for s in OTHER]

    (dest / "mag.corpus.txt").write_text("\n".join(mag) + "\n", encoding="utf-8")
    (dest / "hin.corpus.txt").write_text("\n".join(hin) + "\n", encoding="utf-8")
    (dest / "testset.tsv").write_text(
        "".join(f"{g}\t{s}\n" for g, s in test), encoding="utf-8"
    )


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/data/fixtures")

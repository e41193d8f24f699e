"""Generates the bundled synthetic inputs under data/.

posts.csv          1,000 tweet-like posts (id,created_at,text,lang) with
                   retweets, mentions, hashtags, URLs, emoji, duplicates,
                   non-Turkish rows, out-of-window rows and a few bad rows.
tremo_sample.csv   labeled sentences in the ID,Entry,Emotion,ValidatedEmotion
                   layout, including unvalidated and relabelled rows.

Output is fully determined by SEED.

Usage: python3 scripts/make_synthetic_data.py data
"""
import csv
import random
import sys
from datetime import datetime, timedelta
from pathlib import Path

SEED = 2022
LABELS = ["Happy", "Fear", "Sadness", "Disgust", "Surprise", "Anger"]

PHRASES = {
    "Happy": ["Bugün çok mutluyum", "Harika bir haber", "Gurur duydum", "Teşekkürler herkese",
              "Güzel bir gün", "Sevindim gerçekten"],
    "Fear": ["Gelecekten korkuyorum", "Bu durum endişe verici", "Büyük bir tehlike var",
             "Çocuklarım için kaygı duyuyorum", "Sokakta tedirgin oluyorum"],
    "Sadness": ["Çok üzgünüm", "Bu habere üzüldüm", "Yazık oldu", "Haberi okuyunca ağladım",
                "İçimde büyük bir hüzün var"],
    "Disgust": ["Tam bir rezalet", "İğrenç bir görüntü", "Midem bulandı", "Tiksindim bu olaydan"],
    "Surprise": ["İnanılmaz bir gelişme", "Vay be", "Şaşırdım doğrusu", "Beklenmedik bir karar",
                 "Hayret ettim"],
    "Anger": ["Sessiz istila devam ediyor", "Bu işgale yeter artık", "Öfkeden deliye döndüm",
              "Nefret ediyorum bu politikadan", "Sinir oldum"],
}
NEUTRAL = ["Göç politikası tartışılıyor", "Yeni rapor yayımlandı", "Meclis bugün toplandı",
           "Sınırda yoğunluk var", "Belgesel yayında"]
EMOJI = {
    "Happy": ["😀", "😂", "❤️", "😊"], "Fear": ["😱", "😨"], "Sadness": ["😢", "😭"],
    "Disgust": ["🤮", "🤢"], "Surprise": ["😮", "😲"], "Anger": ["😡", "🤬", "👏👏👏"],
}
UNKNOWN_EMOJI = ["🦩", "🪼"]
HASHTAGS = ["#SessizIstila", "#göç", "#Türkiye", "#mülteci", "#İstanbul"]
USERS = ["@ahmet_k", "@Ayse1990", "@haberci", "@KaracasuHande", "@gundem_tr"]
URLS = ["https://t.co/AbC123", "http://ornek.com.tr/haber?id=7", "https://www.youtube.com/watch?v=x1"]
FOREIGN = [("en", "This documentary is amazing"), ("en", "Border news today"),
           ("ar", "أخبار اليوم"), ("de", "Nachrichten aus Istanbul")]
# Relative monthly weights from mid-2021 to end of 2022, peaking in May 2022.
MONTH_WEIGHTS = {
    (2021, 6): 2, (2021, 7): 30, (2021, 8): 4, (2021, 9): 2, (2021, 10): 2, (2021, 11): 2,
    (2021, 12): 8, (2022, 1): 2, (2022, 2): 5, (2022, 3): 6, (2022, 4): 10, (2022, 5): 300,
    (2022, 6): 160, (2022, 7): 60, (2022, 8): 50, (2022, 9): 48, (2022, 10): 8,
    (2022, 11): 22, (2022, 12): 28,
}


def random_time(rng, year, month):
    start = datetime(year, month, 1)
    end = datetime(year + (month == 12), month % 12 + 1, 1)
    return start + timedelta(seconds=rng.randrange(int((end - start).total_seconds())))


def tweet_text(rng):
    emotion = rng.choice(LABELS + ["Neutral"])
    body = rng.choice(NEUTRAL) if emotion == "Neutral" else rng.choice(PHRASES[emotion])
    parts = [body]
    if rng.random() < 0.5:
        parts.append(rng.choice(HASHTAGS))
    if rng.random() < 0.4 and emotion != "Neutral":
        parts.append(rng.choice(EMOJI[emotion]))
    if rng.random() < 0.25:
        parts.insert(0, rng.choice(USERS))
    if rng.random() < 0.2:
        parts.append(rng.choice(URLS))
    if rng.random() < 0.05:
        parts.append(rng.choice(UNKNOWN_EMOJI))
    text = " ".join(parts)
    if rng.random() < 0.2:
        text = f"RT {rng.choice(USERS)}: {text}"
    return text


def make_posts(rng, n=1000):
    months = list(MONTH_WEIGHTS)
    weights = [MONTH_WEIGHTS[m] for m in months]
    rows = []
    for i in range(n):
        roll = rng.random()
        if roll < 0.02:
            ts = random_time(rng, *rng.choice([(2021, 5), (2023, 1)]))
        else:
            ts = random_time(rng, *rng.choices(months, weights)[0])
        created = ts.strftime("%Y-%m-%dT%H:%M:%SZ")
        if 0.02 <= roll < 0.07:
            lang, text = rng.choice(FOREIGN)
        else:
            lang, text = "tr", tweet_text(rng)
        rows.append([str(1_500_000_000_000_000_000 + i * 7919), created, text, lang])
    # Retweet storms: copy earlier texts verbatim under new ids and times.
    for k in range(40):
        src = rows[rng.randrange(len(rows) // 2)]
        rows[len(rows) // 2 + k * 12][2:] = src[2:]
    # A few malformed rows well under the abort limit.
    for j, bad in enumerate(["not-a-date", "2022-13-45T00:00:00Z", ""]):
        rows[100 + j * 111][1] = bad
    rows.sort(key=lambda r: (r[1], r[0]))
    return rows


def make_tremo(rng):
    per_class = {"Happy": 130, "Fear": 140, "Sadness": 125, "Disgust": 110, "Surprise": 120, "Anger": 135}
    rows, next_id = [], 1
    for label, n in per_class.items():
        for _ in range(n):
            noisy = rng.random() < 0.15
            source = rng.choice(LABELS) if noisy else label
            text = rng.choice(PHRASES[source])
            if rng.random() < 0.3:
                text += " " + rng.choice(NEUTRAL).lower()
            rows.append([str(next_id), text + rng.choice([".", "!", "", "..."]), label, label])
            next_id += 1
    for _ in range(60):
        label = rng.choice(LABELS)
        validated = rng.choice(["", "Ambiguous", rng.choice(LABELS)])
        rows.append([str(next_id), rng.choice(PHRASES[label]), label, validated])
        next_id += 1
    rng.shuffle(rows)
    return rows


def write(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def main(out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)
    write(out / "posts.csv", ["id", "created_at", "text", "lang"], make_posts(rng))
    write(out / "tremo_sample.csv", ["ID", "Entry", "Emotion", "ValidatedEmotion"], make_tremo(rng))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data")

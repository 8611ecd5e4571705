# Copyright 2026 The qaverify Authors.
#
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

"""Regenerates the checked-in test fixtures.

The outputs are committed; rerunning this script must not change them.
Expected counts quoted in the tests (30/50 correct, 15/20 kept, ...) are
fixed by the layout below.
"""

import json
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))


def write_lines(name, rows):
    with open(os.path.join(HERE, name), "w") as f:
        for row in rows:
            f.write(json.dumps(row, sort_keys=True) + "\n")


def instance(iid, dataset, question, context, answers, title, meta=None):
    golds = []
    for a in answers:
        start = context.index(a)
        golds.append({"text": a, "start": start, "end": start + len(a)})
    m = {"title": title}
    m.update(meta or {})
    return {"id": iid, "dataset": dataset, "question": question,
            "context": context, "gold_answers": golds,
            "answerable": bool(golds), "meta": m}


FIRST = ["Ted", "Maria", "Kenji", "Amara", "Lucas", "Ingrid", "Omar", "Priya",
         "Tomas", "Elena", "Victor", "Sofia", "Hugo", "Nadia", "Felix", "Leila"]
LAST = ["Danson", "Lopez", "Tanaka", "Okafor", "Berg", "Novak", "Haddad",
        "Rao", "Silva", "Moreau", "Petrov", "Costa", "Lind", "Ward", "Kaur"]
SHOWS = ["The Good Place", "Harbor Lights", "Silver Creek", "Night Garden",
         "Paper Moons", "Iron Valley", "Blue Meridian", "Quiet Hours",
         "Copper Coast", "Lantern Row"]
CITIES = ["Portland", "Valencia", "Kyoto", "Lagos", "Tromso", "Cusco",
          "Hobart", "Tallinn", "Fez", "Leon"]
COUNTRIES = ["Oregon", "Spain", "Japan", "Nigeria", "Norway", "Peru",
             "Tasmania", "Estonia", "Morocco", "Nicaragua"]
RIVERS = ["Willamette", "Turia", "Kamo", "Ogun", "Tromsa", "Huatanay",
          "Derwent", "Pirita", "Sebou", "Bernal"]


def nq50():
    rng = random.Random(7)
    rows = []
    for i in range(50):
        person = rng.choice(FIRST) + " " + rng.choice(LAST)
        k = i % 5
        if k == 0:
            show = SHOWS[i // 5]
            role = rng.choice(["Michael", "Eleanor", "Chidi", "Janet"])
            ctx = (f"{show} is an American comedy series. The series stars "
                   f"{person} as {role}. It premiered in {2010 + i // 5}.")
            q = f"who plays {role.lower()} on {show.lower()}"
            a, title = person, show
        elif k == 1:
            city = CITIES[i // 5]
            ctx = (f"{city} is a city in {COUNTRIES[i // 5]}. It is known "
                   f"for its harbor. The current mayor is {person}.")
            q = f"who is the mayor of {city.lower()}"
            a, title = person, city
        elif k == 2:
            river = RIVERS[i // 5]
            year = str(1900 + 7 * i)
            ctx = (f"The {river} Bridge crosses the {river} River. Work on "
                   f"the bridge was completed in {year}. It carries two "
                   f"lanes of traffic.")
            q = f"when was the {river.lower()} bridge completed"
            a, title = year, f"{river} Bridge"
        elif k == 3:
            city = CITIES[i // 5]
            n = str(2 + i % 7)
            ctx = (f"The {city} Rovers are a football club. The club has "
                   f"won {n} championships since its founding. Its home "
                   f"ground is in {city}.")
            q = f"how many championships have the {city.lower()} rovers won"
            a, title = n, f"{city} Rovers"
        else:
            show = SHOWS[i // 5]
            ctx = (f"{show} is a novel. The novel was written by {person} "
                   f"in {1950 + i}. It sold widely in Europe.")
            q = f"who wrote the novel {show.lower()}"
            a, title = person, show
        meta = {"mock_qa": "wrong"} if i % 5 in (1, 3) else {}
        rows.append(instance(f"nq-{i:03d}", "NQ", q, ctx, [a], title, meta))
    write_lines("nq50.jsonl", rows)


def mnli60():
    rng = random.Random(11)
    labels = ["entailment", "neutral", "contradiction"]
    rows = []
    for i in range(60):
        who = rng.choice(FIRST)
        place = rng.choice(CITIES)
        rows.append({
            "pairID": f"mnli-{i:03d}",
            "genre": rng.choice(["fiction", "travel", "government"]),
            "sentence1": f"{who} travelled to {place} by train in spring.",
            "sentence2": [f"{who} went to {place}.",
                          f"{who} enjoyed the trip to {place}.",
                          f"{who} has never been to {place}."][i % 3],
            "gold_label": labels[i % 3],
        })
    write_lines("mnli60.jsonl", rows)


def filter20():
    rows = []
    narrative = {3, 9, 14}
    tables = {6, 17}
    for i in range(20):
        city = CITIES[i % 10]
        ctx = f"{city} is a coastal city. It hosts a music festival each year."
        q = f"what festival does {city.lower()} host"
        if i in narrative:
            q = f"largest festival of {city.lower()} by attendance"
        if i == 6:
            ctx = ("<Table> <Tr> <Td> Festival </Td> <Td> Month </Td> </Tr> "
                   f"</Table> {city} hosts a music festival.")
        if i == 17:
            ctx = (f"Festival | Month | Venue\nMusic | June | Harbor\n"
                   f"{city} hosts a music festival.")
        rows.append(instance(f"flt-{i:02d}", "NQ", q, ctx, ["music festival"],
                             city))
    assert not (narrative & tables)
    write_lines("nq_filter20.jsonl", rows)


def mrqa3():
    ctx1 = "Paris is the capital of France."
    ctx2 = "The Nile flows north into the Mediterranean Sea."
    good1 = {"title": "France", "context": ctx1, "qas": [{
        "qid": "mrqa-1", "question": "what is the capital of france",
        "detected_answers": [{"text": "Paris", "char_spans": [[0, 4]]}]}]}
    good2 = {"title": "Nile", "context": ctx2, "qas": [{
        "qid": "mrqa-2", "question": "where does the nile flow into",
        "answers": ["Mediterranean Sea"]}]}
    with open(os.path.join(HERE, "mrqa3.jsonl"), "w") as f:
        f.write(json.dumps(good1, sort_keys=True) + "\n")
        f.write('{"context": "broken record", "qas": [\n')
        f.write(json.dumps(good2, sort_keys=True) + "\n")


def squad_small():
    p1 = ("The Good Place is an American fantasy comedy television series. "
          "The series stars Ted Danson as Michael. Ted Danson also starred "
          "in Cheers.")
    p2 = ("The series premiered on NBC in September 2016. It ended in "
          "January 2020 after four seasons.")

    def ans(ctx, text, nth=0):
        start = -1
        for _ in range(nth + 1):
            start = ctx.index(text, start + 1)
        return {"text": text, "answer_start": start}

    doc = {"version": "v2.0", "data": [{
        "title": "The_Good_Place",
        "paragraphs": [
            {"context": p1, "qas": [
                {"id": "sq-1", "question": "who plays michael on the good place",
                 "answers": [ans(p1, "Ted Danson"), ans(p1, "Ted Danson", 1)],
                 "is_impossible": False},
                {"id": "sq-2", "question": "what kind of series is the good place",
                 "answers": [ans(p1, "American fantasy comedy television series")],
                 "is_impossible": False},
                {"id": "sq-3", "question": "who directed cheers",
                 "answers": [], "plausible_answers": [ans(p1, "Ted Danson")],
                 "is_impossible": True}]},
            {"context": p2, "qas": [
                {"id": "sq-4", "question": "when did the series premiere",
                 "answers": [ans(p2, "September 2016")],
                 "is_impossible": False},
                {"id": "sq-5", "question": "how many seasons did the series run",
                 "answers": [ans(p2, "four")], "is_impossible": False}]},
        ]}]}
    with open(os.path.join(HERE, "squad_small.json"), "w") as f:
        json.dump(doc, f, indent=1, sort_keys=True)
        f.write("\n")


def rejection40():
    verbs = ["founded", "designed", "painted", "discovered", "restored"]
    things = ["riverside botanical garden", "harbor lighthouse",
              "northern chapel mural", "copper mine tunnel", "stone clocktower"]
    # Vocabulary shared with no question or answer above.
    filler = [
        "Glaciers carve deep valleys over centuries.",
        "Meltwater feeds alpine lakes every spring.",
        "Lichens cling to exposed granite ridges.",
        "Marmots whistle warnings across rocky slopes.",
        "Snowfields linger until late summer."]
    rows = []
    rng = random.Random(5)
    for i in range(20):
        person = FIRST[i % len(FIRST)] + " " + LAST[i % len(LAST)]
        verb, thing = verbs[i % 5], things[(i // 5) % 5]
        ctx = (f"The {thing} attracts visitors. {person} {verb} the {thing}. "
               f"Tours run daily.")
        q = f"who {verb} the {thing}"
        rows.append(instance(f"rej-a{i:02d}", "SQuAD2", q, ctx, [person],
                             thing.title()))
    for i in range(20):
        verb, thing = verbs[i % 5], things[(i + 2) % 5]
        sents = filler[:]
        rng.shuffle(sents)
        ctx = " ".join(sents[:3])
        rows.append(instance(f"rej-u{i:02d}", "SQuAD2", f"who {verb} the {thing}",
                             ctx, [], "Alpine Ecology"))
    write_lines("rejection40.jsonl", rows)


if __name__ == "__main__":
    nq50()
    mnli60()
    filter20()
    mrqa3()
    squad_small()
    rejection40()

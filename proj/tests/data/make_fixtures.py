#!/usr/bin/env python3
# Regenerates the fixture tables. Output is deterministic for a fixed seed.
import csv
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent


def write(name, header, rows):
    with open(HERE / name, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(["" if v is None else v for v in r])


def maybe(rng, p, v):
    return None if rng.random() < p else v


def german(rng, n=300):
    rows = []
    for _ in range(n):
        rows.append([
            rng.choice(["A11", "A12", "A13", "A14"]),
            rng.randint(4, 72),
            rng.choice(["A30", "A31", "A32", "A33", "A34"]),
            rng.choice(["car", "furniture", "radio/tv", "education", "business"]),
            maybe(rng, 0.08, rng.randint(250, 18000)),
            maybe(rng, 0.1, rng.randint(19, 75)),
            rng.choice(["male-single", "female-div", "male-married", "male-div"]),
            rng.choice(["good", "good", "good", "bad"]),
        ])
    write("german.csv", ["checking", "duration", "history", "purpose", "amount", "age", "personal_status", "class"], rows)


def compas(rng, n=400):
    rows = []
    for i in range(n):
        age = rng.randint(18, 70)
        rows.append([
            i,
            rng.choice(["Male", "Male", "Female"]),
            age,
            "Less than 25" if age < 25 else ("Greater than 45" if age > 45 else "25 - 45"),
            rng.choice(["African-American", "Caucasian", "Hispanic", "Other", "Asian"]),
            rng.choice([0, 0, 0, 1, 2]),
            maybe(rng, 0.05, rng.randint(0, 20)),
            rng.choice(["F", "M", "M", "O"]),
            rng.randint(-60, 60),
            rng.randint(1, 10),
            rng.choice([0, 1]),
            rng.choice([0, 0, 1]),
        ])
    write("compas.csv", ["id", "sex", "age", "age_cat", "race", "juv_fel_count", "priors_count",
                         "c_charge_degree", "days_b_screening", "decile_score", "is_recid", "two_year_recid"], rows)


OCCUPATIONS = ["Tech-support", "Craft-repair", "Sales", "Exec-managerial", "Prof-specialty",
               "Handlers-cleaners", "Machine-op-inspct", "Adm-clerical"]


def census(rng, n=500):
    rows = []
    for _ in range(n):
        rows.append([
            maybe(rng, 0.05, rng.randint(17, 90)),
            maybe(rng, 0.1, rng.choice(["Private", "Self-emp", "Federal-gov", "Local-gov"])),
            rng.choice(["Bachelors", "HS-grad", "Masters", "Some-college", "Doctorate"]),
            rng.randint(1, 16),
            rng.choice(["Married", "Never-married", "Divorced", "Widowed"]),
            maybe(rng, 0.05, rng.choice(OCCUPATIONS + ["Armed-Forces"])),
            rng.choice(["Male", "Female"]),
            rng.choice([0, 0, 0, 0, rng.randint(100, 99999)]),
            rng.randint(1, 99),
            rng.choice(["<=50K", "<=50K", "<=50K", ">50K"]),
        ])
    header = ["age", "workclass", "education", "education_num", "marital_status", "occupation", "sex",
              "capital_gain", "hours_per_week", "income"]
    write("census.csv", header, rows)
    extra = [[rng.randint(17, 90), rng.choice(OCCUPATIONS), rng.choice(["Male", "Female"]), rng.randint(1, 99),
              rng.choice(["<=50K", ">50K"]), rng.choice(["survey-a", "survey-b"])] for _ in range(60)]
    write("census_extra.csv", ["age", "occupation", "sex", "hours_per_week", "income", "batch"], extra)
    occ = [[o, rng.randint(1, 5), rng.choice(["public", "private"])] for o in OCCUPATIONS]
    # a duplicated key so that some people join twice
    occ.append(["Sales", 2, "public"])
    write("occupations.csv", ["occupation", "skill_level", "sector"], occ)


def fanout(rng, n=10):
    rows = [[i, rng.randint(0, 100), rng.choice(["x", "y", "z"])] for i in range(n)]
    write("fanout.csv", ["id", "score", "group"], rows)


def dupjoin():
    # duplicate output rows: several left rows with identical values join the same right row
    left = [[1, "a"], [2, "b"], [1, "a"], [3, "c"], [1, "a"], [2, "b"], [4, "d"], [3, "c"]]
    right = [[1, "red"], [2, "blue"], [3, "red"], [1, "red"], [5, "green"]]
    write("dup_left.csv", ["k", "tag"], left)
    write("dup_right.csv", ["k", "color"], right)


def worked_example():
    write("dl.csv", ["ID", "Birthdate", "Gender"],
          [[10, "1996-07-12", "F"], [20, "1994-03-08", "M"], [30, None, "F"], [40, "1987-11-23", "M"]])
    write("dr.csv", ["ID", "Name"], [[20, "Alice"], [40, "Bob"]])


if __name__ == "__main__":
    rng = random.Random(20240611)
    german(rng)
    compas(rng)
    census(rng)
    fanout(rng)
    dupjoin()
    worked_example()

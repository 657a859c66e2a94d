"""Regenerates the JSONL fixtures under fixtures/ and checks their construction.

Run from the repository root:  python3 scripts/gen_fixtures.py
"""
import json
import os
import sqlite3

from ex_pairs import PAIRS

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIX = os.path.join(ROOT, "fixtures")
DB = os.path.join(FIX, "db")


def run(db, sql):
    con = sqlite3.connect(f"file:{os.path.join(DB, db + '.sqlite')}?mode=ro", uri=True)
    try:
        return con.execute(sql).fetchall()
    finally:
        con.close()


def canon(rows):
    def cell(v):
        if isinstance(v, float) and v.is_integer():
            return int(v)
        return v
    return frozenset(tuple(cell(v) for v in r) for r in rows)


def write_jsonl(path, rows):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        for r in rows:
            f.write(json.dumps(r, sort_keys=True) + "\n")


# ---------------------------------------------------------------- EX pairs
LEVELS = ["simple", "moderate", "challenging"]
ex_tasks, ex_preds, ex_labels = [], [], []
for i, (db, gold, pred, label, note) in enumerate(PAIRS):
    tid = f"ex-{i + 1:02d}"
    ex_tasks.append({"id": tid, "question": f"EX fixture pair {i + 1}: {note}",
                     "db_ref": db, "gold_sql": gold, "difficulty": LEVELS[i % 3]})
    ex_preds.append({"task_id": tid, "sql": pred})
    ex_labels.append({"task_id": tid, "match": label, "note": note})
write_jsonl(os.path.join(FIX, "ex", "tasks.jsonl"), ex_tasks)
write_jsonl(os.path.join(FIX, "ex", "predictions.jsonl"), ex_preds)
write_jsonl(os.path.join(FIX, "ex", "labels.jsonl"), ex_labels)

# ------------------------------------------------------ self-consistency
# (db, question, gold, [three mutually distinct wrong variants])
SC = [
    ("school", "Names of grade 10 students", "SELECT name FROM students WHERE grade = 10",
     ["SELECT name FROM students WHERE grade = 11", "SELECT name FROM students WHERE grade = 12",
      "SELECT name FROM students"]),
    ("school", "How many teachers are in Science?", "SELECT COUNT(*) FROM teachers WHERE dept = 'Science'",
     ["SELECT COUNT(*) FROM teachers", "SELECT COUNT(*) FROM teachers WHERE dept = 'Math'",
      "SELECT COUNT(*) FROM students"]),
    ("school", "Highest GPA", "SELECT MAX(gpa) FROM students",
     ["SELECT MIN(gpa) FROM students", "SELECT AVG(grade) FROM students", "SELECT MAX(grade) FROM students"]),
    ("school", "Courses worth 4 credits", "SELECT title FROM courses WHERE credits = 4",
     ["SELECT title FROM courses WHERE credits = 3", "SELECT title FROM courses",
      "SELECT title FROM courses WHERE credits > 4"]),
    ("school", "Students advised by Mr. Chen",
     "SELECT s.name FROM students s JOIN teachers t ON s.advisor_id = t.id WHERE t.name = 'Mr. Chen'",
     ["SELECT s.name FROM students s JOIN teachers t ON s.advisor_id = t.id WHERE t.name = 'Ms. Rivera'",
      "SELECT name FROM teachers WHERE name = 'Mr. Chen'",
      "SELECT s.name FROM students s JOIN teachers t ON s.advisor_id = t.id WHERE t.dept = 'Science'"]),
    ("school", "Average score in Biology",
     "SELECT AVG(e.score) FROM enrollments e JOIN courses c ON e.course_id = c.id WHERE c.title = 'Biology'",
     ["SELECT AVG(score) FROM enrollments",
      "SELECT MAX(e.score) FROM enrollments e JOIN courses c ON e.course_id = c.id WHERE c.title = 'Biology'",
      "SELECT AVG(e.score) FROM enrollments e JOIN courses c ON e.course_id = c.id WHERE c.title = 'Algebra'"]),
    ("school", "Students with no nickname recorded", "SELECT name FROM students WHERE nickname IS NULL",
     ["SELECT name FROM students WHERE nickname = ''",
      "SELECT name FROM students WHERE nickname IS NOT NULL",
      "SELECT name FROM students WHERE nickname IS NULL OR nickname = ''"]),
    ("shop", "Customers in Austin", "SELECT name FROM customers WHERE city = 'Austin'",
     ["SELECT name FROM customers WHERE city = 'Boston'", "SELECT name FROM customers",
      "SELECT city FROM customers WHERE city = 'Austin'"]),
    ("shop", "Products cheaper than 15", "SELECT name FROM products WHERE price < 15",
     ["SELECT name FROM products WHERE price > 15", "SELECT name FROM products WHERE price < 10",
      "SELECT name FROM products WHERE price <= 20"]),
    ("shop", "Number of shipped orders", "SELECT COUNT(*) FROM orders WHERE status = 'shipped'",
     ["SELECT COUNT(*) FROM orders", "SELECT COUNT(*) FROM orders WHERE status = 'pending'",
      "SELECT COUNT(*) FROM orders WHERE status <> 'shipped'"]),
    ("shop", "Total quantity of Widgets sold",
     "SELECT SUM(oi.quantity) FROM order_items oi JOIN products p ON oi.product_id = p.id WHERE p.name = 'Widget'",
     ["SELECT SUM(quantity) FROM order_items",
      "SELECT COUNT(*) FROM order_items oi JOIN products p ON oi.product_id = p.id WHERE p.name = 'Widget'",
      "SELECT SUM(oi.quantity) FROM order_items oi JOIN products p ON oi.product_id = p.id WHERE p.name = 'Sticker'"]),
    ("shop", "Customers with a missing email", "SELECT name FROM customers WHERE email IS NULL",
     ["SELECT name FROM customers WHERE email = ''",
      "SELECT name FROM customers WHERE email IS NULL OR email = ''",
      "SELECT name FROM customers WHERE email IS NOT NULL"]),
    ("shop", "Most expensive product", "SELECT name FROM products ORDER BY price DESC LIMIT 1",
     ["SELECT name FROM products ORDER BY price ASC LIMIT 1",
      "SELECT name FROM products ORDER BY price DESC LIMIT 2",
      "SELECT MAX(price) FROM products"]),
    ("shop", "Distinct product categories", "SELECT DISTINCT category FROM products",
     ["SELECT category FROM products WHERE category = 'books'", "SELECT COUNT(DISTINCT category) FROM products",
      "SELECT DISTINCT name FROM products"]),
    ("library", "Books published after 1990", "SELECT title FROM books WHERE year > 1990",
     ["SELECT title FROM books WHERE year < 1990", "SELECT title FROM books WHERE year > 2000",
      "SELECT title FROM books"]),
    ("library", "Authors from Japan", "SELECT name FROM authors WHERE country = 'Japan'",
     ["SELECT name FROM authors WHERE country = 'USA'", "SELECT name FROM authors",
      "SELECT country FROM authors WHERE country = 'Japan'"]),
    ("library", "Number of fiction books", "SELECT COUNT(*) FROM books WHERE genre = 'fiction'",
     ["SELECT COUNT(*) FROM books", "SELECT COUNT(*) FROM books WHERE genre = 'scifi'",
      "SELECT COUNT(DISTINCT genre) FROM books"]),
    ("library", "Average rating of mystery books", "SELECT AVG(rating) FROM books WHERE genre = 'mystery'",
     ["SELECT AVG(rating) FROM books", "SELECT MAX(rating) FROM books WHERE genre = 'mystery'",
      "SELECT AVG(rating) FROM books WHERE genre = 'fiction'"]),
    ("library", "Members with outstanding loans", "SELECT DISTINCT member FROM loans WHERE returned IS NULL",
     ["SELECT DISTINCT member FROM loans WHERE returned = 0", "SELECT DISTINCT member FROM loans",
      "SELECT DISTINCT member FROM loans WHERE returned = 1"]),
    ("library", "Titles by Amara Obi",
     "SELECT b.title FROM books b JOIN authors a ON b.author_id = a.id WHERE a.name = 'Amara Obi'",
     ["SELECT b.title FROM books b JOIN authors a ON b.author_id = a.id WHERE a.name = 'Kenji Mori'",
      "SELECT title FROM books WHERE genre = 'fiction'",
      "SELECT a.name FROM books b JOIN authors a ON b.author_id = a.id WHERE a.name = 'Amara Obi'"]),
]
assert len(SC) == 20
UNEXEC = "SELECT nonexistent_column FROM no_such_table"

# Group shapes over 8 candidates: C = gold-equivalent, W1..W3 wrong, X unexecutable.
# A: correct majority, correct first.   B: correct majority, wrong first.
# C: correct plurality only, wrong first.   D: wrong plurality, correct first.
SHAPES = {
    "A": ["C", "C", "W1", "C", "C", "W2", "C", "X"],
    "B": ["W1", "C", "C", "X", "C", "C", "W2", "C"],
    "C": ["W1", "C", "W2", "C", "X", "C", "W3", "X"],
    "D": ["C", "W1", "W1", "W2", "W1", "X", "X", "W3"],
}
ASSIGN = ["A"] * 9 + ["B"] * 5 + ["C"] * 3 + ["D"] * 3
ASSIGN = [ASSIGN[(i * 7) % 20] for i in range(20)]  # interleave shapes across databases
assert sorted(ASSIGN) == sorted(["A"] * 9 + ["B"] * 5 + ["C"] * 3 + ["D"] * 3)

sc_tasks, sc_groups = [], []
for i, ((db, q, gold, wrongs), shape) in enumerate(zip(SC, ASSIGN)):
    tid = f"sc-{i + 1:02d}"
    g = canon(run(db, gold))
    ws = [canon(run(db, w)) for w in wrongs]
    assert len(g) > 0, tid
    assert len({g, *ws}) == 4, f"{tid}: wrong variants not mutually distinct"
    # the gold-equivalent candidate is spelled differently from gold
    correct_variant = gold + " "
    pick = {"C": correct_variant, "W1": wrongs[0], "W2": wrongs[1], "W3": wrongs[2], "X": UNEXEC}
    sc_tasks.append({"id": tid, "question": q, "db_ref": db, "gold_sql": gold,
                     "difficulty": LEVELS[i % 3]})
    sc_groups.append({"task_id": tid, "candidates": [pick[s] for s in SHAPES[shape]], "shape": shape})
write_jsonl(os.path.join(FIX, "selfconsistency", "tasks.jsonl"), sc_tasks)
write_jsonl(os.path.join(FIX, "selfconsistency", "candidates.jsonl"), sc_groups)

# -------------------------------------------------------------- simulator
def response(think, sql, prose=""):
    return f"<think>\n{think}\n</think>\n<answer>\n{prose}```sql\n{sql}\n```\n</answer>"

SIM = [
    ("sim-1", "school", "List the names of students in grade 12.",
     "SELECT name FROM students WHERE grade = 12",
     ["SELECT name FROM students WHERE grade = 11", "SELECT id FROM students WHERE grade = 12"]),
    ("sim-2", "shop", "How many orders are pending?",
     "SELECT COUNT(*) FROM orders WHERE status = 'pending'",
     ["SELECT COUNT(*) FROM orders", "SELECT COUNT(*) FROM orders WHERE status = 'shipped'"]),
    ("sim-3", "library", "Which books have a rating above 4.1?",
     "SELECT title FROM books WHERE rating > 4.1",
     ["SELECT title FROM books WHERE rating >= 4.1", "SELECT title FROM books WHERE rating < 4.1"]),
    ("sim-4", "school", "What is the total number of credits across all courses?",
     "SELECT SUM(credits) FROM courses",
     ["SELECT COUNT(credits) FROM courses", "SELECT MAX(credits) FROM courses"]),
    ("sim-5", "shop", "Which customers live in Boston?",
     "SELECT name FROM customers WHERE city = 'Boston'",
     ["SELECT name FROM customers WHERE city = 'Denver'", "SELECT email FROM customers WHERE city = 'Boston'"]),
]
sim_tasks, sim_pools = [], []
for tid, db, q, gold, wrongs in SIM:
    g = canon(run(db, gold))
    for w in wrongs:
        assert canon(run(db, w)) != g, (tid, w)
    think = f"The question asks: {q} Identify the table and the filter, then project the requested column."
    pool = [
        response(think, wrongs[0]),
        response(think, gold, "The query is:\n"),
        response(think, "SELEC name FRM students"),
        response(think, wrongs[1]),
        f"<think>\n{think}\n</think>\nThe answer is {gold}",
        response(think, "SELECT missing_col FROM " + ("students" if db == "school" else "orders")),
    ]
    sim_tasks.append({"id": tid, "question": q, "db_ref": db, "gold_sql": gold, "difficulty": "complex"})
    sim_pools.append({"task_id": tid, "candidates": pool, "correct_index": 1})
write_jsonl(os.path.join(FIX, "sim", "tasks.jsonl"), sim_tasks)
write_jsonl(os.path.join(FIX, "sim", "pools.jsonl"), sim_pools)

# ------------------------------------------------------- data preparation
prep = [
    ("prep-01", "school", "Names of teachers in Science", "SELECT name FROM teachers WHERE dept = 'Science'", "simple",
     "Filter teachers by department."),
    ("prep-02", "school", "Count students per grade", "SELECT grade, COUNT(*) FROM students GROUP BY grade", "moderate",
     "Group students by grade and count."),
    ("prep-03", "shop", "Revenue per order",
     "SELECT o.id, SUM(p.price * oi.quantity) FROM orders o JOIN order_items oi ON oi.order_id = o.id "
     "JOIN products p ON p.id = oi.product_id GROUP BY o.id", "challenging",
     "Join orders to items and products, multiply price by quantity, sum per order."),
    ("prep-04", "library", "Authors with more than one book and their average rating",
     "SELECT a.name, AVG(b.rating) FROM authors a JOIN books b ON b.author_id = a.id GROUP BY a.id HAVING COUNT(*) > 1",
     "complex", "Join authors to books, group by author, keep groups larger than one."),
    ("prep-05", "library", "Books published in 1900", "SELECT title FROM books WHERE year = 1900", "simple",
     "Filter books by year."),
    ("prep-06", "shop", "Email of customer 3", "SELECT email FROM customers WHERE id = 3", "simple",
     "Look up the email column."),
    ("prep-07", "school", "Broken gold query", "SELEC name FROM students", "moderate", "Typo in gold."),
    ("prep-08", "shop", "Customers whose orders include Stickers",
     "SELECT DISTINCT c.name FROM customers c JOIN orders o ON o.customer_id = c.id JOIN order_items oi "
     "ON oi.order_id = o.id JOIN products p ON p.id = oi.product_id WHERE p.name = 'Sticker'", "complex",
     "Chain joins from customers to products and filter by product name."),
]
prep_rows = []
for tid, db, q, gold, lvl, think in prep:
    prep_rows.append({"id": tid, "question": q, "db_ref": db, "gold_sql": gold, "difficulty": lvl,
                      "external_knowledge": "Prices are in US dollars." if db == "shop" else None,
                      "think_trace": think})
write_jsonl(os.path.join(FIX, "corpus", "tasks.jsonl"), prep_rows)

print("fixtures written")
print("shape counts:", {s: ASSIGN.count(s) for s in "ABCD"})

# (db, gold, prediction, expected_match, note)
PAIRS = [
    ("school", "SELECT name FROM students WHERE grade = 10",
     "SELECT name FROM students WHERE grade = 10 ORDER BY name DESC", True, "row reorder"),
    ("school", "SELECT id FROM rooms ORDER BY id", "SELECT id FROM rooms", True, "order by ignored"),
    ("school", "SELECT COUNT(*) FROM students",
     "SELECT CAST(COUNT(*) AS REAL) FROM students", True, "integer vs real"),
    ("school", "SELECT grade FROM students WHERE id <= 3",
     "SELECT DISTINCT grade FROM students WHERE id <= 3", True, "duplicate rows"),
    ("school", "SELECT name FROM students WHERE nickname IS NULL",
     "SELECT name FROM students WHERE nickname = ''", False, "null vs empty filter"),
    ("school", "SELECT nickname FROM students WHERE id = 2",
     "SELECT COALESCE(nickname, '') FROM students WHERE id = 2", False, "null vs empty cell"),
    ("school", "SELECT name, gpa FROM students WHERE gpa > 3.5",
     "SELECT gpa, name FROM students WHERE gpa > 3.5", False, "column order"),
    ("school", "SELECT AVG(score) FROM enrollments WHERE course_id = 1",
     "SELECT SUM(score) / COUNT(score) FROM enrollments WHERE course_id = 1", True, "equivalent aggregate"),
    ("school", "SELECT name FROM teachers WHERE dept = 'Math'",
     "SELECT name FROM teachers WHERE dept = 'Science'", False, "wrong filter"),
    ("school", "SELECT s.name FROM students s JOIN teachers t ON s.advisor_id = t.id WHERE t.name = 'Ms. Rivera'",
     "SELECT name FROM students WHERE advisor_id IN (SELECT id FROM teachers WHERE name = 'Ms. Rivera')", True, "join vs subquery"),
    ("shop", "SELECT COUNT(*) FROM orders WHERE status = 'shipped'",
     "SELECT COUNT(*) FROM orders WHERE status = 'pending'", False, "wrong constant"),
    ("shop", "SELECT name FROM products WHERE price > 20",
     "SELECT name FROM products WHERE price >= 20", False, "boundary"),
    ("shop", "SELECT city FROM customers",
     "SELECT DISTINCT city FROM customers ORDER BY city", True, "duplicates and reorder"),
    ("shop", "SELECT email FROM customers WHERE id = 3", "SELECT ''", False, "null vs empty literal"),
    ("shop", "SELECT SUM(quantity) FROM order_items",
     "SELECT SUM(quantity) + 0.0 FROM order_items", True, "integer vs real sum"),
    ("shop", "SELECT name FROM customers WHERE city = 'Austin'",
     "SELECT name, city FROM customers WHERE city = 'Austin'", False, "extra column"),
    ("library", "SELECT title FROM books WHERE year < 1950",
     "SELECT title FROM books WHERE year <= 1950", False, "boundary"),
    ("library", "SELECT genre, COUNT(*) FROM books GROUP BY genre",
     "SELECT genre, COUNT(*) FROM books GROUP BY genre ORDER BY COUNT(*) DESC", True, "group reorder"),
    ("library", "SELECT rating FROM books WHERE id = 1", "SELECT 4", True, "real 4.0 vs integer 4"),
    ("library", "SELECT member FROM loans WHERE returned IS NULL",
     "SELECT member FROM loans WHERE returned = 0", False, "null trap"),
]

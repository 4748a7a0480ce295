"""Twelve-commit repository covering every filter outcome."""

from gitfixture import Commit, java_class

LONG = "Update " + " ".join(f"word{i}" for i in range(150))  # 151 words

# statements of run(); each line is one statement
BASE = [f"log({i});" for i in range(30)]


def _file(lines):
    return {"src/Runner.java": java_class("Runner", lines)}


def filter_table():
    """Commits and the verdict each must receive, in history order."""
    rows = []
    cur = list(BASE)

    def step(message, lines, verdict):
        nonlocal cur
        cur = list(lines)
        rows.append((Commit(message, _file(cur)), verdict))

    # the initial import is large on purpose (32 statements)
    step("Add runner with logging of thirty values", cur, "dropped(too-many-changes)")
    step("Add retry logic to client pool", cur[:3] + ["retry(a);", "a = a + 1;", "log(a);"] + cur[3:], "kept")
    step("Add many generated statements to runner", cur + [f"extra({i});" for i in range(21)], "dropped(too-many-changes)")
    step("Fix typo in loop", cur[:-21] + [f"extra({i});" for i in range(20)] + ["extra(99);"], "dropped(too-short)")
    step(LONG, cur[:-1], "dropped(too-long)")
    step("Refactoring of the parser internals here", cur + ["parse(a);"], "dropped(not-verb-first)")
    step("Merge branch 'feature/x' into main branch", cur + ["merged(a);"], "dropped(merge)")
    step('Revert "Add retry logic to client pool"', [s for s in cur if s != "retry(a);"], "dropped(rollback)")
    step("Fixes overflow when counter wraps around", cur + ["if (a > 9) {", "    a = 0;", "}"], "kept")
    step("Updated the cache eviction policy today", cur[:-3], "dropped(not-verb-first)")
    # formatting only: the statement texts normalize to the same thing
    rows.append((Commit("Reformat runner code with new style", {"src/Runner.java": java_class("Runner", cur).replace("        ", "\t\t  ").replace("a = a + 1;", "a  =  a +\n 1;")}), "dropped(no-changes)"))
    step("Use bounded queue for worker tasks", [f"q.offer({i});" if s.startswith("extra(") and int(s[6:-2]) < 10 else s for i, s in enumerate(cur)], "kept")
    return rows

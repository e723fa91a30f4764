"""Scratch: run the solver on the frozen scenarios and print the numbers."""
import sys
import time

from restaurant_reader.logicform import parse_story
from restaurant_reader.reasoner import Config, explain, solve
from restaurant_reader.domain import build_restaurant_domain

EX1 = """
customer(nicole). restaurant(veg_r). food(lentil_soup).
waitress(waitress). cook(cook1).
st_hpd(enter(nicole,veg_r),true,0).
st_hpd(order(nicole,lentil_soup,waitress),true,1).
st_hpd(put(waitress,lentil_soup,t),true,2).
st_hpd(eat(nicole,lentil_soup),true,3).
st_hpd(leave(nicole),true,4).
"""

EX2 = """
customer(nicole). restaurant(veg_r). food(lentil_soup).
waitress(waitress). cook(cook1). people(owner).
st_hpd(enter(nicole,veg_r),true,0).
st_hpd(order(nicole,lentil_soup,waitress),true,1).
st_hpd(pay(owner,b),true,2).
st_hpd(put(waitress,lentil_soup,t),true,3).
"""

FUTILE = """
customer(nicole). restaurant(veg_r). food(lentil_soup).
waitress(waitress). cook(cook1).
st_obs(available(lentil_soup),false,0).
st_hpd(enter(nicole,veg_r),true,1).
"""

DIAG1 = """
customer(nicole). restaurant(veg_r). food(lentil_soup). food(miso_soup).
waitress(waitress). cook(cook1).
st_hpd(enter(nicole,veg_r),true,0).
st_hpd(order(nicole,lentil_soup,waitress),true,1).
st_hpd(put(waitress,miso_soup,t),true,2).
"""


def run(name, src, ti="mixed", structure="s2", expect_max=None, expect_n=None):
    story = parse_story(src)
    cfg = Config(ti_mode=ti, customer_structure=structure)
    t0 = time.time()
    res = solve(story, cfg)
    dt = time.time() - t0
    n = len(res.models)
    mx = max((m.max_step for m in res.models), default=-1)
    flag = ""
    if expect_n is not None and n != expect_n:
        flag += " <<< WANT n=%d" % expect_n
    if expect_max is not None and res.models and mx != expect_max:
        flag += " <<< WANT max=%d" % expect_max
    print("%-18s %-8s n=%-3d max=%-3d %5.1fs%s" % (name, ti, n, mx, dt, flag))
    if not res.models:
        print("   reason:", res.reason)
    return res


if __name__ == "__main__":
    which = sys.argv[1] if len(sys.argv) > 1 else "ex1"
    if which == "ex1":
        res = run("Ex1 normal", EX1, "mixed", "s2", expect_max=29, expect_n=1)
        if res.models:
            m = res.models[0]
            print("mapping:", m.mapping)
            for a in m.occurs_atoms():
                print(" ", a)
            print("intends:", [(t.render(), s) for t, s in m.intends])
    elif which == "ex2":
        res = run("Ex2 serendipity", EX2, "mixed", "s2", expect_max=23, expect_n=5)
        for m in res.models:
            pays = [a for a in m.occurs_atoms() if "pay(nicole" in a]
            print("  map:", m.mapping, "pay:", pays, "max:", m.max_step)
    elif which == "futile":
        run("futile", FUTILE, "mixed", "s2", expect_max=8, expect_n=1)
        run("futile", FUTILE, "new_only", "s2", expect_max=10)
    elif which == "diag":
        res = run("diag wrong dish", DIAG1, "mixed", "s2", expect_max=16)
        dom = build_restaurant_domain(parse_story(DIAG1).entities)
        for e in explain(dom, res.models):
            print("  ", e.label, "| waiter:", e.waiter, "| cook:", e.cook,
                  "| inter:", e.interferences, "| models:", e.model_indices)

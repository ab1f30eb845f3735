"""Independent generator for ratios_n10.csv (exact fractions, no C++ code)."""
from fractions import Fraction as Q
import sys

def g(x):
    return "%.13g" % float(x)

rows = ["n,lp_lb_p2,var_lb,mc_wc,cv_wc,lhs_wc,best_unbiased,ratio_unbiased,trap_sq_err,ratio_trap"]
for n in range(1, 11):
    var_lb = Q(1, 32 * n * n)
    mc = Q(1, 4 * n)
    cv = Q(1, 12 * n)
    lhs = Q(1, 4 * n * n)
    best = min(cv, lhs)
    trap = Q(1, 4 * (n + 1) ** 2)
    lp = 0.5 ** 2.5 / n
    rows.append(",".join([str(n), g(lp), g(var_lb), g(mc), g(cv), g(lhs), g(best),
                          g(best / var_lb), g(trap), g(best / trap)]))
sys.stdout.buffer.write(("\r\n".join(rows) + "\r\n").encode())

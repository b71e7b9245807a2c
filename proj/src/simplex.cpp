#include "feedflow/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace feedflow::lp {

namespace {

constexpr double kInf = kInfinity;
constexpr double kPivotTol = 1e-9;        // smallest usable ratio-test pivot
constexpr double kLuPivotTol = 1e-11;     // smallest usable LU pivot
constexpr double kZeroTol = 1e-12;

enum class VarState : unsigned char { Basic, AtLower, AtUpper, Free };

// ---------------------------------------------------------------------------
// Sparse LU of the basis matrix (left-looking, partial pivoting) plus a
// product-form eta file for pivots between refactorizations.

struct LuFactors {
    int m = 0;
    // L strictly below the unit diagonal, U strictly above the diagonal,
    // both CSC in permuted (position) space.
    std::vector<int> Lp, Li, Up, Ui;
    std::vector<double> Lx, Ux, Udiag;
    std::vector<int> pinv;  // original row -> position
    std::vector<int> prow;  // position -> original row
};

struct EtaFile {
    std::vector<int> starts{0};
    std::vector<int> idx;      // positions (pivot position included)
    std::vector<double> val;
    std::vector<int> pivot_pos;
    std::vector<double> pivot_val;

    int count() const { return static_cast<int>(pivot_pos.size()); }
    std::size_t nonzeros() const { return idx.size(); }
    void clear() {
        starts.assign(1, 0);
        idx.clear();
        val.clear();
        pivot_pos.clear();
        pivot_val.clear();
    }
    void push(int r, double rv, const std::vector<int>& pattern, const std::vector<double>& dense) {
        for (int p : pattern) {
            idx.push_back(p);
            val.push_back(dense[p]);
        }
        starts.push_back(static_cast<int>(idx.size()));
        pivot_pos.push_back(r);
        pivot_val.push_back(rv);
    }
};

// Work area for sparse triangular solves: dense values + visit stamps.
struct SolveWork {
    std::vector<double> x;
    std::vector<int> stamp;
    std::vector<int> stack;
    std::vector<int> order;
    int current = 0;

    void resize(int m) {
        x.assign(m, 0.0);
        stamp.assign(m, 0);
        stack.reserve(m);
        order.reserve(m);
        current = 0;
    }
};

/// Reverse DFS postorder of nodes reachable from `pattern` in the CSC graph
/// (edges k -> Gi[p] for p in [Gp[k], Gp[k+1])). Appends into work.order so
/// that every node precedes the nodes it updates.
void reach(const std::vector<int>& Gp, const std::vector<int>& Gi,
           const std::vector<int>& pattern, SolveWork& work) {
    work.order.clear();
    ++work.current;
    const int visit = work.current;
    auto& stamp = work.stamp;
    auto& stack = work.stack;
    // stack holds (node, edge cursor) pairs encoded in two parallel pushes
    static thread_local std::vector<int> cursor;
    for (int root : pattern) {
        if (stamp[root] == visit) continue;
        stack.clear();
        cursor.clear();
        stack.push_back(root);
        cursor.push_back(Gp[root]);
        stamp[root] = visit;
        while (!stack.empty()) {
            int node = stack.back();
            int c = cursor.back();
            bool descended = false;
            while (c < Gp[node + 1]) {
                int child = Gi[c++];
                if (stamp[child] != visit) {
                    stamp[child] = visit;
                    cursor.back() = c;
                    stack.push_back(child);
                    cursor.push_back(Gp[child]);
                    descended = true;
                    break;
                }
            }
            if (!descended) {
                work.order.push_back(node);
                stack.pop_back();
                cursor.pop_back();
            }
        }
    }
    std::reverse(work.order.begin(), work.order.end());
}

/// x <- L^{-1} x restricted to the reach of `pattern`; final nonzero pattern
/// is returned in work.order (superset of the true pattern).
void lsolve_sparse(const LuFactors& lu, const std::vector<int>& pattern, SolveWork& work) {
    reach(lu.Lp, lu.Li, pattern, work);
    for (int k : work.order) {
        double xk = work.x[k];
        if (xk == 0.0) continue;
        for (int p = lu.Lp[k]; p < lu.Lp[k + 1]; ++p) work.x[lu.Li[p]] -= lu.Lx[p] * xk;
    }
}

void usolve_sparse(const LuFactors& lu, const std::vector<int>& pattern, SolveWork& work) {
    reach(lu.Up, lu.Ui, pattern, work);
    for (int k : work.order) {
        double xk = work.x[k] / lu.Udiag[k];
        work.x[k] = xk;
        if (xk == 0.0) continue;
        for (int p = lu.Up[k]; p < lu.Up[k + 1]; ++p) work.x[lu.Ui[p]] -= lu.Ux[p] * xk;
    }
}

// ---------------------------------------------------------------------------

struct Internal {
    // Problem data in internal form: minimize cost over n structurals,
    // m slacks, plus artificials appended past n + m.
    int n = 0;       // structural columns
    int m = 0;       // rows
    int nslack = 0;  // == m
    int total = 0;   // n + m + artificials

    std::vector<int> Ap, Ai;   // structural columns, original row indices
    std::vector<double> Ax;
    std::vector<int> Rp, Rj;   // row-wise copy for pricing
    std::vector<double> Rx;

    std::vector<double> lb, ub, cost2;  // cost2 = phase-2 objective (min sense)
    std::vector<double> rhs;
    std::vector<int> art_row;           // artificial -> row
    std::vector<double> art_sign;

    // State
    std::vector<VarState> state;
    std::vector<double> xval;   // value of nonbasic columns
    std::vector<int> head;      // basis position -> column
    std::vector<int> inbasis;   // column -> basis position or -1
    std::vector<double> xb;     // basic values by position

    LuFactors lu;
    EtaFile etas;
    SolveWork fwork, bwork;

    std::vector<double> dj;      // reduced costs (current phase)
    std::vector<double> devex;   // reference weights
    std::vector<std::uint8_t> skip;  // columns rejected until next refactor

    long iterations = 0;
    long phase1_iterations = 0;
    int phase = 1;
    int degenerate_streak = 0;
    bool bland = false;

    SolveOptions opt;
};

void column_entries(const Internal& s, int j, std::vector<int>& rows, std::vector<double>& vals) {
    rows.clear();
    vals.clear();
    if (j < s.n) {
        for (int p = s.Ap[j]; p < s.Ap[j + 1]; ++p) {
            rows.push_back(s.Ai[p]);
            vals.push_back(s.Ax[p]);
        }
    } else if (j < s.n + s.nslack) {
        rows.push_back(j - s.n);
        vals.push_back(1.0);
    } else {
        int a = j - s.n - s.nslack;
        rows.push_back(s.art_row[a]);
        vals.push_back(s.art_sign[a]);
    }
}

/// Left-looking LU with partial pivoting, run in original-row space with a
/// stamped dense work vector; L is remapped to position space at the end.
/// Fill stays modest for the staircase bases this solver sees. Returns -1 on
/// success or the position of the first singular column.
int factor(Internal& s) {
    const int m = s.m;
    auto& lu = s.lu;
    lu.m = m;
    lu.Up.assign(1, 0);
    lu.Ui.clear();
    lu.Ux.clear();
    lu.Udiag.assign(m, 0.0);
    lu.pinv.assign(m, -1);
    lu.prow.assign(m, -1);
    s.etas.clear();
    s.fwork.resize(m);
    s.bwork.resize(m);

    std::vector<int> crow;
    std::vector<double> cval;
    std::vector<double> x(m, 0.0);
    std::vector<int> mark(m, -1);
    std::vector<int> touched;
    touched.reserve(64);

    // L columns kept in original-row space during factorization; remapped to
    // positions afterwards.
    std::vector<int> Lp_tmp{0};
    std::vector<int> Li_tmp;
    std::vector<double> Lx_tmp;

    std::vector<int> stack, cursor, order;
    std::vector<int> pos_mark(m, -1);

    for (int k = 0; k < m; ++k) {
        column_entries(s, s.head[k], crow, cval);
        touched.clear();
        for (size_t e = 0; e < crow.size(); ++e) {
            int i = crow[e];
            if (mark[i] != k) {
                mark[i] = k;
                x[i] = 0.0;
                touched.push_back(i);
            }
            x[i] += cval[e];
        }
        // Reach over previously eliminated columns: node = pivot position j,
        // reached when row prow[j] is structurally present.
        order.clear();
        stack.clear();
        cursor.clear();
        auto push_node = [&](int j) {
            stack.push_back(j);
            cursor.push_back(Lp_tmp[j]);
        };
        for (int i : touched) {
            int j = lu.pinv[i];
            if (j < 0 || pos_mark[j] == k) continue;
            pos_mark[j] = k;
            push_node(j);
            while (!stack.empty()) {
                int node = stack.back();
                int c = cursor.back();
                bool descended = false;
                while (c < Lp_tmp[node + 1]) {
                    int child_row = Li_tmp[c++];
                    int child = lu.pinv[child_row];
                    if (child >= 0 && pos_mark[child] != k) {
                        pos_mark[child] = k;
                        cursor.back() = c;
                        push_node(child);
                        descended = true;
                        break;
                    }
                }
                if (!descended) {
                    cursor.back() = c;
                    if (c >= Lp_tmp[node + 1]) {
                        order.push_back(node);
                        stack.pop_back();
                        cursor.pop_back();
                    }
                }
            }
        }
        std::reverse(order.begin(), order.end());
        for (int j : order) {
            int prow_j = lu.prow[j];
            double xj = (mark[prow_j] == k) ? x[prow_j] : 0.0;
            if (xj == 0.0) continue;
            for (int p = Lp_tmp[j]; p < Lp_tmp[j + 1]; ++p) {
                int i = Li_tmp[p];
                if (mark[i] != k) {
                    mark[i] = k;
                    x[i] = 0.0;
                    touched.push_back(i);
                }
                x[i] -= Lx_tmp[p] * xj;
            }
        }
        // Pivot: largest |x| among rows without a pivot.
        int piv = -1;
        double best = 0.0;
        for (int i : touched) {
            if (lu.pinv[i] >= 0) continue;
            double a = std::fabs(x[i]);
            if (a > best) {
                best = a;
                piv = i;
            }
        }
        if (piv < 0 || best <= kLuPivotTol) return k;  // singular here

        double pval = x[piv];
        lu.pinv[piv] = k;
        lu.prow[k] = piv;
        lu.Udiag[k] = pval;
        for (int i : touched) {
            if (x[i] == 0.0 || i == piv) continue;
            int pos = lu.pinv[i];
            if (pos >= 0 && pos < k) {
                lu.Ui.push_back(pos);
                lu.Ux.push_back(x[i]);
            } else if (pos < 0) {
                Li_tmp.push_back(i);
                Lx_tmp.push_back(x[i] / pval);
            }
        }
        lu.Up.push_back(static_cast<int>(lu.Ui.size()));
        Lp_tmp.push_back(static_cast<int>(Li_tmp.size()));
    }

    // Remap L rows into position space.
    lu.Lp = std::move(Lp_tmp);
    lu.Li.resize(Li_tmp.size());
    lu.Lx = std::move(Lx_tmp);
    for (size_t p = 0; p < Li_tmp.size(); ++p) lu.Li[p] = lu.pinv[Li_tmp[p]];
    return -1;
}

/// w = B^{-1} col(j); result in position space. Returns pattern (superset).
void ftran(Internal& s, const std::vector<int>& rows, const std::vector<double>& vals,
           std::vector<int>& pattern_out, std::vector<double>& dense_out) {
    auto& work = s.fwork;
    const int m = s.m;
    if (static_cast<int>(work.x.size()) != m) work.resize(m);
    static thread_local std::vector<int> pattern;
    pattern.clear();
    for (size_t e = 0; e < rows.size(); ++e) {
        int pos = s.lu.pinv[rows[e]];
        work.x[pos] = vals[e];
        pattern.push_back(pos);
    }
    lsolve_sparse(s.lu, pattern, work);
    // work.order holds the L-reach; feed it to the U solve as the pattern.
    static thread_local std::vector<int> upat;
    upat = work.order;
    usolve_sparse(s.lu, upat, work);

    // Apply etas oldest-first.
    pattern_out = work.order;
    static thread_local std::vector<int> member;
    member.assign(m, 0);
    for (int p : pattern_out) member[p] = 1;
    for (int e = 0; e < s.etas.count(); ++e) {
        int r = s.etas.pivot_pos[e];
        double xr = member[r] ? work.x[r] : 0.0;
        if (xr == 0.0) continue;
        double scaled = xr / s.etas.pivot_val[e];
        for (int p = s.etas.starts[e]; p < s.etas.starts[e + 1]; ++p) {
            int i = s.etas.idx[p];
            if (!member[i]) {
                member[i] = 1;
                work.x[i] = 0.0;
                pattern_out.push_back(i);
            }
            if (i == r) work.x[i] = scaled;
            else work.x[i] -= s.etas.val[p] * scaled;
        }
    }
    dense_out.assign(m, 0.0);
    for (int p : pattern_out) {
        dense_out[p] = work.x[p];
        work.x[p] = 0.0;
        member[p] = 0;
    }
}

/// y such that y^T B = c^T for sparse position-space rhs; fills a dense
/// position-space vector and the nonzero pattern.
void btran(Internal& s, std::vector<double>& y /*position space, dense in/out*/,
           std::vector<int>& pattern_out) {
    const int m = s.m;
    // Etas newest-first.
    for (int e = s.etas.count() - 1; e >= 0; --e) {
        int r = s.etas.pivot_pos[e];
        double dot = 0.0;
        for (int p = s.etas.starts[e]; p < s.etas.starts[e + 1]; ++p) {
            int i = s.etas.idx[p];
            if (i == r) continue;
            dot += s.etas.val[p] * y[i];
        }
        y[r] = (y[r] - dot) / s.etas.pivot_val[e];
    }
    // U^T forward solve.
    for (int k = 0; k < m; ++k) {
        double acc = y[k];
        for (int p = s.lu.Up[k]; p < s.lu.Up[k + 1]; ++p) acc -= s.lu.Ux[p] * y[s.lu.Ui[p]];
        y[k] = acc / s.lu.Udiag[k];
    }
    // L^T backward solve (unit diagonal).
    for (int k = m - 1; k >= 0; --k) {
        double acc = y[k];
        for (int p = s.lu.Lp[k]; p < s.lu.Lp[k + 1]; ++p) acc -= s.lu.Lx[p] * y[s.lu.Li[p]];
        y[k] = acc;
    }
    pattern_out.clear();
    for (int k = 0; k < m; ++k) {
        if (y[k] != 0.0) pattern_out.push_back(k);
    }
}

double bound_for_start(const Internal& s, int j, VarState& st) {
    double l = s.lb[j], u = s.ub[j];
    if (std::isfinite(l) && std::isfinite(u)) {
        if (std::fabs(l) <= std::fabs(u)) {
            st = VarState::AtLower;
            return l;
        }
        st = VarState::AtUpper;
        return u;
    }
    if (std::isfinite(l)) {
        st = VarState::AtLower;
        return l;
    }
    if (std::isfinite(u)) {
        st = VarState::AtUpper;
        return u;
    }
    st = VarState::Free;
    return 0.0;
}

/// Recomputes basic values from scratch: xb = B^{-1}(rhs - A_N x_N).
void recompute_xb(Internal& s) {
    std::vector<double> resid = s.rhs;
    for (int j = 0; j < s.total; ++j) {
        if (s.state[j] == VarState::Basic) continue;
        double v = s.xval[j];
        if (v == 0.0) continue;
        if (j < s.n) {
            for (int p = s.Ap[j]; p < s.Ap[j + 1]; ++p) resid[s.Ai[p]] -= s.Ax[p] * v;
        } else if (j < s.n + s.nslack) {
            resid[j - s.n] -= v;
        } else {
            int a = j - s.n - s.nslack;
            resid[s.art_row[a]] -= s.art_sign[a] * v;
        }
    }
    // Dense FTRAN.
    std::vector<double>& x = s.fwork.x;
    std::fill(x.begin(), x.end(), 0.0);
    for (int i = 0; i < s.m; ++i) x[s.lu.pinv[i]] = resid[i];
    for (int k = 0; k < s.m; ++k) {
        double xk = x[k];
        if (xk == 0.0) continue;
        for (int p = s.lu.Lp[k]; p < s.lu.Lp[k + 1]; ++p) x[s.lu.Li[p]] -= s.lu.Lx[p] * xk;
    }
    for (int k = s.m - 1; k >= 0; --k) {
        double xk = x[k] / s.lu.Udiag[k];
        x[k] = xk;
        if (xk == 0.0) continue;
        for (int p = s.lu.Up[k]; p < s.lu.Up[k + 1]; ++p) x[s.lu.Ui[p]] -= s.lu.Ux[p] * xk;
    }
    for (int e = 0; e < s.etas.count(); ++e) {
        int r = s.etas.pivot_pos[e];
        double xr = x[r];
        if (xr == 0.0) continue;
        double scaled = xr / s.etas.pivot_val[e];
        for (int p = s.etas.starts[e]; p < s.etas.starts[e + 1]; ++p) {
            int i = s.etas.idx[p];
            if (i == r) x[i] = scaled;
            else x[i] -= s.etas.val[p] * scaled;
        }
    }
    for (int k = 0; k < s.m; ++k) {
        s.xb[k] = x[k];
        x[k] = 0.0;
    }
}

const std::vector<double>& phase_cost(const Internal& s, std::vector<double>& buf) {
    if (s.phase == 2) return s.cost2;
    buf.assign(s.total, 0.0);
    for (int j = s.n + s.nslack; j < s.total; ++j) buf[j] = 1.0;
    return buf;
}

/// Full dual/reduced-cost recompute for the current phase.
void recompute_duals(Internal& s) {
    std::vector<double> costbuf;
    const std::vector<double>& c = phase_cost(s, costbuf);
    std::vector<double> y(s.m, 0.0);
    for (int k = 0; k < s.m; ++k) y[k] = c[s.head[k]];
    std::vector<int> pat;
    btran(s, y, pat);
    // Map to original rows.
    std::vector<double> yrow(s.m, 0.0);
    for (int k = 0; k < s.m; ++k) yrow[s.lu.prow[k]] = y[k];

    s.dj.assign(s.total, 0.0);
    for (int j = 0; j < s.total; ++j) {
        if (s.state[j] == VarState::Basic) continue;
        double d = c[j];
        if (j < s.n) {
            for (int p = s.Ap[j]; p < s.Ap[j + 1]; ++p) d -= yrow[s.Ai[p]] * s.Ax[p];
        } else if (j < s.n + s.nslack) {
            d -= yrow[j - s.n];
        } else {
            int a = j - s.n - s.nslack;
            d -= yrow[s.art_row[a]] * s.art_sign[a];
        }
        s.dj[j] = d;
    }
}

void refactorize(Internal& s, bool& restart_needed) {
    int attempts = 0;
    while (true) {
        int fail = factor(s);
        if (fail < 0) break;
        // Basis repair: swap the offending basic column for the slack of a
        // row that has no pivot yet.
        if (++attempts > s.m) {
            restart_needed = true;
            return;
        }
        int replacement = -1;
        for (int i = 0; i < s.m && replacement < 0; ++i) {
            if (s.lu.pinv[i] < 0 && s.state[s.n + i] != VarState::Basic) replacement = s.n + i;
        }
        if (replacement < 0) {
            restart_needed = true;
            return;
        }
        int out_col = s.head[fail];
        VarState st;
        double v = bound_for_start(s, out_col, st);
        s.state[out_col] = st;
        s.xval[out_col] = v;
        s.inbasis[out_col] = -1;
        s.head[fail] = replacement;
        s.inbasis[replacement] = fail;
        s.state[replacement] = VarState::Basic;
    }
    s.skip.assign(s.total, 0);
    s.devex.assign(s.total, 1.0);
    recompute_xb(s);
    recompute_duals(s);
}

struct PricingPick {
    int col = -1;
    double dj = 0.0;
    int direction = +1;
};

PricingPick price(const Internal& s) {
    PricingPick pick;
    const double tol = s.opt.optimality_tol;
    double best_score = 0.0;
    for (int j = 0; j < s.total; ++j) {
        VarState st = s.state[j];
        if (st == VarState::Basic || s.skip[j]) continue;
        if (s.lb[j] == s.ub[j]) continue;  // fixed
        if (s.phase == 2 && j >= s.n + s.nslack) continue;  // artificials stay out
        double d = s.dj[j];
        int dir = 0;
        if (st == VarState::AtLower && d < -tol) dir = +1;
        else if (st == VarState::AtUpper && d > tol) dir = -1;
        else if (st == VarState::Free && std::fabs(d) > tol) dir = d < 0 ? +1 : -1;
        else continue;
        if (s.bland) {
            pick = {j, d, dir};
            return pick;
        }
        double score = d * d / s.devex[j];
        if (score > best_score) {
            best_score = score;
            pick = {j, d, dir};
        }
    }
    return pick;
}

struct RatioResult {
    enum class Kind { Pivot, BoundFlip, Unbounded } kind = Kind::Unbounded;
    int row = -1;        // blocking position for Pivot
    double step = 0.0;
    bool leaving_to_upper = false;
};

RatioResult ratio_test(const Internal& s, int q, int dir, const std::vector<int>& wpat,
                       const std::vector<double>& w) {
    RatioResult res;
    const double ftol = s.opt.feasibility_tol;
    double range = s.ub[q] - s.lb[q];  // may be inf
    double limit = std::isfinite(range) ? range : kInf;

    // Pass 1: relaxed bound on the step.
    for (int pos : wpat) {
        double wi = w[pos];
        double delta = dir * wi;
        if (std::fabs(delta) <= kPivotTol) continue;
        int j = s.head[pos];
        double xj = s.xb[pos];
        double t;
        if (delta > 0.0) {
            if (!std::isfinite(s.lb[j])) continue;
            t = (xj - s.lb[j] + ftol) / delta;
        } else {
            if (!std::isfinite(s.ub[j])) continue;
            t = (xj - s.ub[j] - ftol) / delta;
        }
        if (t < limit) limit = t;
    }
    if (!std::isfinite(limit)) return res;  // unbounded

    // Pass 2: sharpest exact ratio within the relaxed limit, largest pivot.
    int best_row = -1;
    double best_piv = 0.0;
    double best_exact = kInf;
    for (int pos : wpat) {
        double wi = w[pos];
        double delta = dir * wi;
        if (std::fabs(delta) <= kPivotTol) continue;
        int j = s.head[pos];
        double xj = s.xb[pos];
        double exact;
        bool to_upper;
        if (delta > 0.0) {
            if (!std::isfinite(s.lb[j])) continue;
            exact = (xj - s.lb[j]) / delta;
            to_upper = false;
        } else {
            if (!std::isfinite(s.ub[j])) continue;
            exact = (xj - s.ub[j]) / delta;
            to_upper = true;
        }
        if (exact <= limit) {
            double piv = std::fabs(delta);
            if (piv > best_piv + kZeroTol || (piv > best_piv - kZeroTol && exact < best_exact)) {
                best_piv = piv;
                best_row = pos;
                best_exact = exact;
                res.leaving_to_upper = to_upper;
            }
        }
    }

    if (std::isfinite(range) && (best_row < 0 || range <= best_exact)) {
        res.kind = RatioResult::Kind::BoundFlip;
        res.step = range;
        return res;
    }
    if (best_row < 0) return res;  // unbounded
    res.kind = RatioResult::Kind::Pivot;
    res.row = best_row;
    res.step = std::max(0.0, best_exact);
    return res;
}

/// After BTRAN of e_r: update reduced costs and devex weights along the
/// pivot row. `rho_row` is indexed by original row.
void update_duals_along_row(Internal& s, const std::vector<double>& rho_row,
                            const std::vector<int>& rho_rows, int q, int leaving,
                            double alpha_q) {
    double theta_d = s.dj[q] / alpha_q;
    double wq = std::max(s.devex[q], 1.0);

    static thread_local std::vector<double> alpha;
    static thread_local std::vector<int> touched;
    static thread_local std::vector<std::uint8_t> seen;
    if (seen.size() < static_cast<size_t>(s.total)) seen.assign(s.total, 0);
    touched.clear();
    if (alpha.size() < static_cast<size_t>(s.total)) alpha.assign(s.total, 0.0);

    for (int i : rho_rows) {
        double r = rho_row[i];
        if (r == 0.0) continue;
        for (int p = s.Rp[i]; p < s.Rp[i + 1]; ++p) {
            int j = s.Rj[p];
            if (s.state[j] == VarState::Basic) continue;
            if (!seen[j]) {
                seen[j] = 1;
                alpha[j] = 0.0;
                touched.push_back(j);
            }
            alpha[j] += r * s.Rx[p];
        }
        // Slack of row i.
        int sj = s.n + i;
        if (s.state[sj] != VarState::Basic) {
            if (!seen[sj]) {
                seen[sj] = 1;
                alpha[sj] = 0.0;
                touched.push_back(sj);
            }
            alpha[sj] += r;
        }
    }
    // Artificials.
    for (int a = 0; a < s.total - s.n - s.nslack; ++a) {
        int j = s.n + s.nslack + a;
        if (s.state[j] == VarState::Basic) continue;
        double r = rho_row[s.art_row[a]];
        if (r == 0.0) continue;
        if (!seen[j]) {
            seen[j] = 1;
            alpha[j] = 0.0;
            touched.push_back(j);
        }
        alpha[j] += r * s.art_sign[a];
    }

    for (int j : touched) {
        seen[j] = 0;
        if (j == q) continue;
        double a = alpha[j];
        s.dj[j] -= theta_d * a;
        double cand = (a / alpha_q) * (a / alpha_q) * wq;
        if (cand > s.devex[j]) s.devex[j] = cand;
    }
    s.dj[q] = 0.0;
    s.dj[leaving] = -theta_d;
    s.devex[leaving] = std::max(wq / (alpha_q * alpha_q), 1.0);
}

double primal_infeasibility(const Internal& s) {
    double sum = 0.0;
    for (int k = 0; k < s.m; ++k) {
        int j = s.head[k];
        double v = s.xb[k];
        if (v < s.lb[j]) sum += s.lb[j] - v;
        else if (v > s.ub[j]) sum += v - s.ub[j];
    }
    return sum;
}

enum class LoopExit { PhaseDone, IterationLimit, Unbounded, Restart };

LoopExit simplex_loop(Internal& s, long iteration_limit) {
    bool restart = false;
    refactorize(s, restart);
    if (restart) return LoopExit::Restart;

    std::vector<int> crow, wpat, rho_pat;
    std::vector<double> cval, w, rho_pos(s.m, 0.0), rho_row(s.m, 0.0);
    std::vector<int> rho_rows;

    int since_refactor = 0;
    while (true) {
        if (s.iterations >= iteration_limit) return LoopExit::IterationLimit;

        PricingPick pick = price(s);
        if (pick.col < 0) {
            // Verify optimality against a fresh factorization before
            // declaring the phase done.
            if (since_refactor > 0 || s.etas.count() > 0) {
                bool r2 = false;
                refactorize(s, r2);
                if (r2) return LoopExit::Restart;
                since_refactor = 0;
                PricingPick again = price(s);
                if (again.col < 0) return LoopExit::PhaseDone;
                pick = again;
            } else {
                return LoopExit::PhaseDone;
            }
        }

        int q = pick.col;
        column_entries(s, q, crow, cval);
        ftran(s, crow, cval, wpat, w);

        RatioResult rr = ratio_test(s, q, pick.direction, wpat, w);
        if (rr.kind == RatioResult::Kind::Unbounded) {
            if (s.phase == 1) {
                // Phase-1 objective is bounded below; numerical trouble.
                return LoopExit::Restart;
            }
            return LoopExit::Unbounded;
        }

        if (rr.kind == RatioResult::Kind::BoundFlip) {
            double step = rr.step * pick.direction;
            for (int pos : wpat) s.xb[pos] -= step * w[pos];
            s.xval[q] = (s.state[q] == VarState::AtLower) ? s.ub[q] : s.lb[q];
            s.state[q] = (s.state[q] == VarState::AtLower) ? VarState::AtUpper
                                                           : VarState::AtLower;
            ++s.iterations;
            if (s.phase == 1) ++s.phase1_iterations;
            continue;
        }

        int r = rr.row;
        double alpha_q = w[r];
        if (std::fabs(alpha_q) < 1e-8) {
            // Pivot too small: refresh the factorization and retry, or skip
            // this column until the next refactorization.
            if (s.etas.count() > 0) {
                bool r2 = false;
                refactorize(s, r2);
                if (r2) return LoopExit::Restart;
                since_refactor = 0;
                continue;
            }
            s.skip[q] = 1;
            continue;
        }

        int leaving = s.head[r];
        double step = rr.step;

        // Primal update.
        double sstep = step * pick.direction;
        for (int pos : wpat) s.xb[pos] -= sstep * w[pos];
        double entering_value = s.xval[q] + sstep;

        s.xval[leaving] = rr.leaving_to_upper ? s.ub[leaving] : s.lb[leaving];
        s.state[leaving] = rr.leaving_to_upper ? VarState::AtUpper : VarState::AtLower;
        s.inbasis[leaving] = -1;
        s.head[r] = q;
        s.inbasis[q] = r;
        s.state[q] = VarState::Basic;
        s.xb[r] = entering_value;

        // Dual update via BTRAN of e_r.
        std::fill(rho_pos.begin(), rho_pos.end(), 0.0);
        rho_pos[r] = 1.0;
        btran(s, rho_pos, rho_pat);
        rho_rows.clear();
        for (int k : rho_pat) {
            rho_row[s.lu.prow[k]] = rho_pos[k];
            rho_rows.push_back(s.lu.prow[k]);
        }
        update_duals_along_row(s, rho_row, rho_rows, q, leaving, alpha_q);
        for (int i : rho_rows) rho_row[i] = 0.0;

        s.etas.push(r, alpha_q, wpat, w);

        ++s.iterations;
        if (s.phase == 1) ++s.phase1_iterations;
        ++since_refactor;

        if (step <= 1e-10) {
            if (++s.degenerate_streak >= s.opt.bland_threshold) s.bland = true;
        } else {
            s.degenerate_streak = 0;
            s.bland = false;
        }

        if (since_refactor >= s.opt.refactor_interval ||
            s.etas.nonzeros() > 4 * (s.lu.Li.size() + s.lu.Ui.size() + s.m) + 1000) {
            bool r2 = false;
            refactorize(s, r2);
            if (r2) return LoopExit::Restart;
            since_refactor = 0;
        }
    }
}

Solution finish(const Internal& s, const LpModel& model, SolveStatus status) {
    Solution sol;
    sol.status = status;
    sol.iterations = s.iterations;
    sol.phase1_iterations = s.phase1_iterations;
    sol.values.assign(s.n, 0.0);
    for (int j = 0; j < s.n; ++j)
        sol.values[j] = (s.state[j] == VarState::Basic) ? s.xb[s.inbasis[j]] : s.xval[j];

    // Reduced-cost certificate, flipped back into the model's sense.
    const bool maximize = model.objective_sense == ObjSense::Maximize;
    sol.reduced_costs.assign(s.n, 0.0);
    sol.at_lower.assign(s.n, false);
    sol.at_upper.assign(s.n, false);
    for (int j = 0; j < s.n; ++j) {
        if (s.state[j] == VarState::Basic) continue;
        sol.reduced_costs[j] = maximize ? -s.dj[j] : s.dj[j];
        sol.at_lower[j] = s.state[j] == VarState::AtLower;
        sol.at_upper[j] = s.state[j] == VarState::AtUpper;
    }

    double obj = 0.0;
    for (int j = 0; j < s.n; ++j) obj += model.objective[j] * sol.values[j];
    sol.objective = obj;

    // Residual report against the original rows.
    double worst = 0.0;
    for (int r = 0; r < model.num_rows(); ++r) {
        double a = 0.0;
        for (const auto& [col, val] : model.rows[r].coeffs) a += val * sol.values[col];
        double viol = 0.0;
        switch (model.rows[r].sense) {
            case RowSense::LessEqual: viol = a - model.rows[r].rhs; break;
            case RowSense::GreaterEqual: viol = model.rows[r].rhs - a; break;
            case RowSense::Equal: viol = std::fabs(a - model.rows[r].rhs); break;
        }
        worst = std::max(worst, viol);
    }
    for (int j = 0; j < s.n; ++j) {
        worst = std::max(worst, model.lower[j] - sol.values[j]);
        worst = std::max(worst, sol.values[j] - model.upper[j]);
    }
    sol.max_primal_infeasibility = std::max(0.0, worst);
    return sol;
}

}  // namespace

Solution solve(const LpModel& model, const SolveOptions& options) {
    model.validate();

    const int n = model.num_cols();
    const int m = model.num_rows();
    const bool maximize = model.objective_sense == ObjSense::Maximize;

    // No constraints: push every column to its favorable bound.
    if (m == 0) {
        Solution sol;
        sol.values.assign(n, 0.0);
        sol.reduced_costs = model.objective;
        sol.at_lower.assign(n, false);
        sol.at_upper.assign(n, false);
        for (int j = 0; j < n; ++j) {
            double c = maximize ? model.objective[j] : -model.objective[j];
            double v;
            if (c > 0.0) v = model.upper[j];
            else if (c < 0.0) v = model.lower[j];
            else v = std::isfinite(model.lower[j]) ? model.lower[j]
                    : (std::isfinite(model.upper[j]) ? model.upper[j] : 0.0);
            if (!std::isfinite(v)) {
                sol.status = SolveStatus::Unbounded;
                return sol;
            }
            sol.values[j] = v;
            sol.at_lower[j] = v == model.lower[j];
            sol.at_upper[j] = !sol.at_lower[j] && v == model.upper[j];
        }
        sol.status = SolveStatus::Optimal;
        for (int j = 0; j < n; ++j) sol.objective += model.objective[j] * sol.values[j];
        return sol;
    }

    long limit = options.iteration_limit > 0
                     ? options.iteration_limit
                     : 200L * (static_cast<long>(n) + static_cast<long>(m));

    for (int attempt = 0; attempt < 3; ++attempt) {
        Internal s;
        s.opt = options;
        s.n = n;
        s.m = m;
        s.nslack = m;

        // Column-wise structural matrix.
        std::vector<int> count(n, 0);
        for (const auto& row : model.rows)
            for (const auto& [col, val] : row.coeffs) ++count[col];
        s.Ap.assign(n + 1, 0);
        for (int j = 0; j < n; ++j) s.Ap[j + 1] = s.Ap[j] + count[j];
        s.Ai.resize(s.Ap[n]);
        s.Ax.resize(s.Ap[n]);
        std::vector<int> fill = s.Ap;
        for (int r = 0; r < m; ++r) {
            for (const auto& [col, val] : model.rows[r].coeffs) {
                s.Ai[fill[col]] = r;
                s.Ax[fill[col]] = val;
                ++fill[col];
            }
        }
        // Row-wise copy.
        s.Rp.assign(m + 1, 0);
        for (int r = 0; r < m; ++r)
            s.Rp[r + 1] = s.Rp[r] + static_cast<int>(model.rows[r].coeffs.size());
        s.Rj.resize(s.Rp[m]);
        s.Rx.resize(s.Rp[m]);
        {
            std::vector<int> rfill = s.Rp;
            for (int r = 0; r < m; ++r) {
                for (const auto& [col, val] : model.rows[r].coeffs) {
                    s.Rj[rfill[r]] = col;
                    s.Rx[rfill[r]] = val;
                    ++rfill[r];
                }
            }
        }

        s.rhs.resize(m);
        for (int r = 0; r < m; ++r) s.rhs[r] = model.rows[r].rhs;

        // Bounds and phase-2 costs (internal minimization).
        s.lb = model.lower;
        s.ub = model.upper;
        s.cost2.assign(n, 0.0);
        for (int j = 0; j < n; ++j) s.cost2[j] = maximize ? -model.objective[j] : model.objective[j];
        for (int r = 0; r < m; ++r) {
            switch (model.rows[r].sense) {
                case RowSense::LessEqual:
                    s.lb.push_back(0.0);
                    s.ub.push_back(kInf);
                    break;
                case RowSense::GreaterEqual:
                    s.lb.push_back(-kInf);
                    s.ub.push_back(0.0);
                    break;
                case RowSense::Equal:
                    s.lb.push_back(0.0);
                    s.ub.push_back(0.0);
                    break;
            }
            s.cost2.push_back(0.0);
        }

        // Start from the all-logical basis; nonbasic structurals sit at the
        // bound nearest zero.
        s.total = n + m;
        s.state.assign(s.total, VarState::AtLower);
        s.xval.assign(s.total, 0.0);
        for (int j = 0; j < n; ++j) {
            VarState st;
            s.xval[j] = bound_for_start(s, j, st);
            s.state[j] = st;
        }
        std::vector<double> resid = s.rhs;
        for (int j = 0; j < n; ++j) {
            double v = s.xval[j];
            if (v == 0.0) continue;
            for (int p = s.Ap[j]; p < s.Ap[j + 1]; ++p) resid[s.Ai[p]] -= s.Ax[p] * v;
        }

        s.head.assign(m, -1);
        s.inbasis.assign(s.total, -1);
        bool any_artificial = false;
        std::vector<int> art_of_row(m, -1);
        for (int r = 0; r < m; ++r) {
            int sj = n + r;
            double v = resid[r];
            bool feasible = v >= s.lb[sj] - options.feasibility_tol &&
                            v <= s.ub[sj] + options.feasibility_tol;
            if (feasible) {
                s.head[r] = sj;
                s.state[sj] = VarState::Basic;
                s.inbasis[sj] = r;
            } else {
                any_artificial = true;
                art_of_row[r] = static_cast<int>(s.art_row.size());
                s.art_row.push_back(r);
                s.art_sign.push_back(v >= 0.0 ? 1.0 : -1.0);
                // Displaced slack rests at the bound nearest the violation.
                s.state[sj] = std::isfinite(s.lb[sj]) ? VarState::AtLower : VarState::AtUpper;
                s.xval[sj] = std::isfinite(s.lb[sj]) ? s.lb[sj] : s.ub[sj];
            }
        }
        int nart = static_cast<int>(s.art_row.size());
        s.total = n + m + nart;
        s.state.resize(s.total, VarState::Basic);
        s.xval.resize(s.total, 0.0);
        s.inbasis.resize(s.total, -1);
        s.lb.resize(s.total, 0.0);
        s.ub.resize(s.total, kInf);
        s.cost2.resize(s.total, 0.0);
        for (int r = 0; r < m; ++r) {
            if (art_of_row[r] < 0) continue;
            int j = n + m + art_of_row[r];
            s.head[r] = j;
            s.inbasis[j] = r;
            s.state[j] = VarState::Basic;
        }
        s.xb.assign(m, 0.0);
        s.fwork.resize(m);
        s.bwork.resize(m);
        s.skip.assign(s.total, 0);
        s.devex.assign(s.total, 1.0);
        s.dj.assign(s.total, 0.0);

        // Phase 1.
        s.phase = any_artificial ? 1 : 2;
        if (s.phase == 1) {
            LoopExit exit = simplex_loop(s, limit);
            if (exit == LoopExit::Restart) continue;
            if (exit == LoopExit::IterationLimit) return finish(s, model, SolveStatus::IterationLimit);
            if (exit == LoopExit::Unbounded) continue;  // cannot happen; retry

            double infeas = 0.0;
            for (int a = 0; a < nart; ++a) {
                int j = n + m + a;
                double v = (s.state[j] == VarState::Basic) ? s.xb[s.inbasis[j]] : s.xval[j];
                infeas += std::max(v, 0.0);
            }
            infeas += primal_infeasibility(s);
            double scale = 1.0;
            for (int r = 0; r < m; ++r) scale = std::max(scale, std::fabs(s.rhs[r]));
            if (infeas > options.feasibility_tol * scale)
                return finish(s, model, SolveStatus::Infeasible);

            // Lock artificials at zero for phase 2.
            for (int a = 0; a < nart; ++a) {
                int j = n + m + a;
                s.ub[j] = 0.0;
                if (s.state[j] != VarState::Basic) s.xval[j] = 0.0;
            }
            s.phase = 2;
            s.bland = false;
            s.degenerate_streak = 0;
        }

        LoopExit exit = simplex_loop(s, limit);
        if (exit == LoopExit::Restart) continue;
        if (exit == LoopExit::IterationLimit) return finish(s, model, SolveStatus::IterationLimit);
        if (exit == LoopExit::Unbounded) return finish(s, model, SolveStatus::Unbounded);
        return finish(s, model, SolveStatus::Optimal);
    }

    // Repeated numerical trouble: report the best effort.
    Solution sol;
    sol.status = SolveStatus::IterationLimit;
    sol.values.assign(n, 0.0);
    return sol;
}

}  // namespace feedflow::lp

#include "weierkern/quadrature.hpp"

#include "weierkern/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

namespace weierkern {

namespace {

// Gauss-Legendre 4-point rule on [0, 1]
constexpr double kGlNode[4] = {0.06943184420297371, 0.33000947820757187,
                               0.66999052179242813, 0.93056815579702629};
constexpr double kGlWeight[4] = {0.17392742256872693, 0.32607257743127307,
                                 0.32607257743127307, 0.17392742256872693};

// Gauss-Legendre 2-point rule on [0, 1]; the embedded low rule whose
// disagreement with the 4-point rule prices each cell for the heap
constexpr double kGl2Node[2] = {0.21132486540518713, 0.7886751345948129};
constexpr double kGl2Weight[2] = {0.5, 0.5};

int thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    int fallback = int(std::min<unsigned>(hw == 0 ? 1 : hw, 8));
    const char* env = std::getenv("WEIERKERN_THREADS");
    if (env == nullptr) return fallback;
    int n = std::atoi(env);
    return std::clamp(n, 1, 64);
}

template <typename Fn>
void run_tasks(int count, const Fn& body) {
    int threads = std::min(thread_budget(), count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure = nullptr;
    std::atomic<bool> failed{false};
    auto worker = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                body(i);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(failure);
}

struct CellVal {
    std::vector<Complex> eps;  // excludes the radius-eps disks
    std::vector<Complex> two;  // excludes the radius-2eps disks
    explicit CellVal(size_t n) : eps(n, 0.0), two(n, 0.0) {}
    void add(const CellVal& o) {
        for (size_t k = 0; k < eps.size(); ++k) {
            eps[k] += o.eps[k];
            two[k] += o.two[k];
        }
    }
};

struct CellAccum {
    CellVal sum;
    std::vector<double> err;
    long cells = 0;
    explicit CellAccum(size_t n) : sum(n), err(n, 0.0) {}
};

class SurfaceIntegrator {
public:
    SurfaceIntegrator(const SpaceCurve& curve, const std::vector<FormFn>& fa,
                      const std::vector<FormFn>& fb,
                      const std::vector<std::pair<int, int>>& pairs,
                      const SingularitySet& excl, const GridConfig& cfg)
        : curve_(curve), fa_(fa), fb_(fb), pairs_(pairs), excl_(excl), cfg_(cfg) {
        for (const auto& pr : pairs_)
            if (pr.first < 0 || pr.first >= int(fa_.size()) || pr.second < 0 ||
                pr.second >= int(fb_.size()))
                throw_usage("pairing index out of range");
    }

    std::vector<QuadratureResult> run() {
        const size_t np = pairs_.size();
        const int n = cfg_.base_cells;
        const int tasks = 2 * n * n;
        const long cell_cap = 24000;

        // coarse sweep over every base cell on both charts
        std::vector<CellRec> heap((size_t)tasks);
        run_tasks(tasks, [&](int idx) {
            heap[(size_t)idx] = make_cell(cell_bounds(idx), 0, idx);
        });

        std::vector<double> scale(np, 1e-300);
        for (const auto& c : heap)
            for (size_t k = 0; k < np; ++k) scale[k] += std::abs(c.val.eps[k]);
        // a pair whose mass sits at roundoff relative to the dominant pair is
        // already converged; without the floor it would eat the whole cell cap
        double scale_max = 0.0;
        for (size_t k = 0; k < np; ++k) scale_max = std::max(scale_max, scale[k]);
        for (size_t k = 0; k < np; ++k) scale[k] = std::max(scale[k], 1e-9 * scale_max);
        std::vector<double> target(np), total_err(np, 0.0);
        for (size_t k = 0; k < np; ++k) target[k] = cfg_.target_rel_error * scale[k];
        for (auto& c : heap) {
            score(c, scale);
            for (size_t k = 0; k < np; ++k) total_err[k] += c.err[k];
        }

        // pop the globally worst cell, split it 4-way, repeat until every
        // pair's error total is under target; order is deterministic
        auto worse = [](const CellRec& a, const CellRec& b) {
            if (a.key != b.key) return a.key < b.key;
            return a.id > b.id;
        };
        std::make_heap(heap.begin(), heap.end(), worse);
        CellAccum done(np);
        long next_id = tasks;
        while (true) {
            bool needs = false;
            for (size_t k = 0; k < np; ++k) needs = needs || total_err[k] > target[k];
            if (!needs || heap.empty()) break;
            if ((long)heap.size() + done.cells >= cell_cap) break;
            std::pop_heap(heap.begin(), heap.end(), worse);
            CellRec cur = std::move(heap.back());
            heap.pop_back();
            if (cur.depth >= cfg_.max_depth || cur.key <= 0.0) {
                done.sum.add(cur.val);
                for (size_t k = 0; k < np; ++k) done.err[k] += cur.err[k];
                done.cells += 1;
                continue;
            }
            for (size_t k = 0; k < np; ++k) total_err[k] -= cur.err[k];
            double rm = 0.5 * (cur.b.r0 + cur.b.r1), tm = 0.5 * (cur.b.t0 + cur.b.t1);
            Bounds kids[4] = {{cur.b.chart, cur.b.r0, rm, cur.b.t0, tm},
                              {cur.b.chart, cur.b.r0, rm, tm, cur.b.t1},
                              {cur.b.chart, rm, cur.b.r1, cur.b.t0, tm},
                              {cur.b.chart, rm, cur.b.r1, tm, cur.b.t1}};
            for (const Bounds& kb : kids) {
                CellRec kid = make_cell(kb, cur.depth + 1, next_id++);
                score(kid, scale);
                for (size_t k = 0; k < np; ++k) total_err[k] += kid.err[k];
                heap.push_back(std::move(kid));
                std::push_heap(heap.begin(), heap.end(), worse);
            }
        }

        bool met = true;
        for (size_t k = 0; k < np; ++k) met = met && total_err[k] <= target[k];
        if (std::getenv("WEIERKERN_QUAD_DEBUG") != nullptr) {
            std::vector<const CellRec*> by_key;
            for (const auto& c : heap) by_key.push_back(&c);
            std::sort(by_key.begin(), by_key.end(),
                      [](const CellRec* a, const CellRec* b) { return a->key > b->key; });
            std::fprintf(stderr, "[quad] cells=%ld met=%d", done.cells + (long)heap.size(),
                         (int)met);
            for (size_t k = 0; k < np && k < 4; ++k)
                std::fprintf(stderr, " err%zu=%.2e/%.2e", k, total_err[k], target[k]);
            std::fprintf(stderr, "\n");
            for (size_t i = 0; i < by_key.size() && i < 12; ++i) {
                const CellRec* c = by_key[i];
                std::fprintf(stderr,
                             "[quad]  key=%.2e depth=%d chart=%d r=[%.4f,%.4f] th=[%.4f,%.4f]\n",
                             c->key, c->depth, (int)c->b.chart, c->b.r0, c->b.r1, c->b.t0,
                             c->b.t1);
            }
        }
        for (const auto& c : heap) {
            done.sum.add(c.val);
            done.cells += 1;
        }

        std::vector<QuadratureResult> out(np);
        for (size_t k = 0; k < np; ++k) {
            Complex ieps = done.sum.eps[k];
            Complex itwo = done.sum.two[k];
            out[k].value = 2.0 * ieps - itwo; // removes the O(radius) exclusion deficit
            out[k].est_error = total_err[k] + 0.5 * std::abs(ieps - itwo);
            out[k].cells = done.cells;
            out[k].converged = met;
        }
        return out;
    }

private:
    struct Bounds {
        Chart chart;
        double r0, r1, t0, t1;
    };

    struct CellRec {
        Bounds b{Chart::Affine, 0, 0, 0, 0};
        CellVal val{0};            // 4-point rule, both exclusion radii
        std::vector<double> err;   // per-pair disagreement with the 2-point rule
        double key = 0.0;
        long id = 0;
        int depth = 0;
    };

    Bounds cell_bounds(int idx) const {
        const int n = cfg_.base_cells;
        Chart chart = idx < n * n ? Chart::Affine : Chart::Infinity;
        int local = idx % (n * n);
        int ir = local / n, it = local % n;
        double dr = 1.0 / double(n), dt = 2.0 * M_PI / double(n);
        return {chart, ir * dr, (ir + 1) * dr, it * dt, (it + 1) * dt};
    }

    // 0 inside radius, 1 beyond twice the radius, C^2 ramp between; a sharp
    // indicator would plant an unresolvable jump at every disk rim
    static double ramp(double dist, double radius) {
        double s = dist / radius;
        if (s <= 1.0) return 0.0;
        if (s >= 2.0) return 1.0;
        double t = s - 1.0;
        return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    }

    // one window per singular base point; affine entries live in x1, infinity
    // entries in t, measured in their own coordinate on either chart
    double exclusion_window(Chart chart, Complex c, double radius) const {
        double w = 1.0;
        Complex u = chart == Chart::Affine ? c : 1.0 / c;
        for (Complex e : excl_.affine) w *= ramp(std::abs(u - e), radius);
        if (!excl_.infinity.empty()) {
            Complex t = chart == Chart::Infinity ? c : 1.0 / u;
            for (Complex e : excl_.infinity) w *= ramp(std::abs(t - e), radius);
        }
        return w;
    }

    std::vector<Complex> node_values(Chart chart, Complex c) const {
        FiberResult fib = curve_.fiber(c, chart);
        if (fib.degenerate)
            throw_convergence("quadrature node hit a degenerate fiber; widen the exclusions");
        std::vector<std::vector<Complex>> va(fa_.size()), vb(fb_.size());
        Complex tfac = chart == Chart::Infinity ? -1.0 / (c * c) : Complex(1.0);
        auto transformed = [&](const FormFn& fn, const CurvePoint& p) {
            DifferentialValue dv = fn(p);
            Complex v = dv.coeff;
            if (chart == Chart::Infinity)
                for (int w = 0; w < dv.weight; ++w) v *= tfac;
            return v;
        };
        for (const auto& p : fib.points) {
            for (size_t i = 0; i < fa_.size(); ++i) va[i].push_back(transformed(fa_[i], p));
            for (size_t j = 0; j < fb_.size(); ++j) vb[j].push_back(transformed(fb_[j], p));
        }
        std::vector<Complex> h(pairs_.size(), 0.0);
        for (size_t k = 0; k < pairs_.size(); ++k)
            for (size_t s = 0; s < fib.points.size(); ++s)
                h[k] += va[pairs_[k].first][s] * std::conj(vb[pairs_[k].second][s]);
        return h;
    }

    void accumulate(const Bounds& b, double r, double th, double w, CellVal& cv) const {
        Complex c = std::polar(r, th);
        double w1 = exclusion_window(b.chart, c, cfg_.exclusion_radius);
        if (w1 == 0.0) return; // fully inside the smaller window, so inside both
        double w2 = exclusion_window(b.chart, c, 2.0 * cfg_.exclusion_radius);
        std::vector<Complex> h = node_values(b.chart, c);
        for (size_t k = 0; k < h.size(); ++k) {
            cv.eps[k] += w * w1 * h[k];
            cv.two[k] += w * w2 * h[k];
        }
    }

    CellRec make_cell(const Bounds& b, int depth, long id) const {
        const size_t np = pairs_.size();
        CellRec rec;
        rec.b = b;
        rec.depth = depth;
        rec.id = id;
        rec.val = CellVal(np);
        CellVal lo(np);
        const double dr = b.r1 - b.r0, dth = b.t1 - b.t0;
        for (int m = 0; m < 4; ++m)
            for (int i = 0; i < 4; ++i) {
                double r = b.r0 + kGlNode[i] * dr;
                accumulate(b, r, b.t0 + kGlNode[m] * dth,
                           kGlWeight[i] * kGlWeight[m] * dr * dth * r, rec.val);
            }
        for (int m = 0; m < 2; ++m)
            for (int i = 0; i < 2; ++i) {
                double r = b.r0 + kGl2Node[i] * dr;
                accumulate(b, r, b.t0 + kGl2Node[m] * dth,
                           kGl2Weight[i] * kGl2Weight[m] * dr * dth * r, lo);
            }
        rec.err.resize(np);
        for (size_t k = 0; k < np; ++k)
            rec.err[k] = std::max(std::abs(rec.val.eps[k] - lo.eps[k]),
                                  std::abs(rec.val.two[k] - lo.two[k]));
        return rec;
    }

    void score(CellRec& c, const std::vector<double>& scale) const {
        c.key = 0.0;
        for (size_t k = 0; k < c.err.size(); ++k)
            c.key = std::max(c.key, c.err[k] / scale[k]);
    }

    const SpaceCurve& curve_;
    const std::vector<FormFn>& fa_;
    const std::vector<FormFn>& fb_;
    const std::vector<std::pair<int, int>>& pairs_;
    const SingularitySet& excl_;
    GridConfig cfg_;
};

} // namespace

std::vector<QuadratureResult> surface_integral_multi(
    const SpaceCurve& curve, const std::vector<FormFn>& forms_a,
    const std::vector<FormFn>& forms_b, const std::vector<std::pair<int, int>>& pairs,
    const SingularitySet& exclusions, const GridConfig& config) {
    SurfaceIntegrator integrator(curve, forms_a, forms_b, pairs, exclusions, config);
    return integrator.run();
}

QuadratureResult surface_integral(const SpaceCurve& curve, const FormFn& a, const FormFn& b,
                                  const SingularitySet& exclusions, const GridConfig& config) {
    std::vector<FormFn> fa{a}, fb{b};
    std::vector<std::pair<int, int>> pairs{{0, 0}};
    return surface_integral_multi(curve, fa, fb, pairs, exclusions, config)[0];
}

QuadratureResult mc_surface_integral(const SpaceCurve& curve, const FormFn& a, const FormFn& b,
                                     const McConfig& config) {
    if (config.samples <= 0 || config.strata <= 0 || config.epsilon <= 0.0)
        throw_usage("monte carlo needs positive samples, strata and epsilon");

    const MultiPoly f2 = curve.f().partial(1), f3 = curve.f().partial(2);
    const MultiPoly g2 = curve.g().partial(1), g3 = curve.g().partial(2);
    const int expected = curve.deg_f() * curve.deg_g();
    const double eps = config.epsilon;
    const double eps2 = eps * eps;
    const double gauss_norm = 1.0 / (M_PI * M_PI * eps2 * eps2);

    const int strata = config.strata;
    std::vector<long> counts(strata, config.samples / strata);
    for (long r = 0; r < config.samples % strata; ++r) counts[r]++;
    std::vector<Complex> means(strata, 0.0);

    run_tasks(strata, [&](int j) {
        std::mt19937_64 rng(1000003ull * (config.seed + 1) + 7919ull * (unsigned long long)j);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(2.0));
        Complex acc = 0.0;
        for (long s = 0; s < counts[j]; ++s) {
            // draw the full sample before any validity checks
            double u1 = unit(rng), u2 = unit(rng), usheet = unit(rng);
            Complex w1(eps * gauss(rng), eps * gauss(rng));
            Complex w2(eps * gauss(rng), eps * gauss(rng));

            if (u1 >= 1.0) continue;
            Complex z = std::polar(std::sqrt(u1 / (1.0 - u1)), 2.0 * M_PI * u2);
            double pz = 1.0 / (M_PI * (1.0 + std::norm(z)) * (1.0 + std::norm(z)));

            FiberResult fib;
            try {
                fib = curve.fiber(z);
            } catch (const Error&) {
                continue;
            }
            if (fib.degenerate || int(fib.points.size()) != expected) continue;
            int k0 = std::min(expected - 1, int(usheet * expected));

            const Triple& q = fib.points[size_t(k0)].x;
            Complex a2 = f2.eval(q.data(), 3), a3 = f3.eval(q.data(), 3);
            Complex b2 = g2.eval(q.data(), 3), b3 = g3.eval(q.data(), 3);
            Complex det = a2 * b3 - a3 * b2;
            if (std::abs(det) < 1e-14) continue;
            Complex d2 = (b3 * w1 - a3 * w2) / det;
            Complex d3 = (-b2 * w1 + a2 * w2) / det;
            Triple p{z, q[1] + d2, q[2] + d3};

            auto fg = curve.evaluate(p);
            double arg = (std::norm(fg[0]) + std::norm(fg[1])) / eps2;
            double delta = arg > 700.0 ? 0.0 : std::exp(-arg) * gauss_norm;
            if (delta == 0.0) continue;

            // mixture over every sheet of the fiber, matching the sampler
            double qmix = 0.0;
            for (const auto& pt : fib.points) {
                Complex e2 = p[1] - pt.x[1], e3 = p[2] - pt.x[2];
                Complex c2 = f2.eval(pt.x.data(), 3), c3 = f3.eval(pt.x.data(), 3);
                Complex h2 = g2.eval(pt.x.data(), 3), h3 = g3.eval(pt.x.data(), 3);
                double m2 = std::norm(c2 * e2 + c3 * e3) + std::norm(h2 * e2 + h3 * e3);
                double darg = m2 / eps2;
                if (darg > 700.0) continue;
                qmix += std::norm(c2 * h3 - c3 * h2) * std::exp(-darg) * gauss_norm;
            }
            qmix *= pz / double(expected);
            if (qmix < 1e-280) continue;

            CurvePoint cp{p, curve.residual(p)};
            DifferentialValue av = a(cp), bv = b(cp);
            Complex j1p = curve.j1(p);
            acc += av.coeff * std::conj(bv.coeff) * std::norm(j1p) * delta / qmix;
        }
        means[j] = counts[j] > 0 ? acc / double(counts[j]) : Complex(0.0);
    });

    Complex value = 0.0;
    for (int j = 0; j < strata; ++j) value += means[j] * double(counts[j]) / double(config.samples);
    double var = 0.0;
    for (int j = 0; j < strata; ++j) var += std::norm(means[j] - value);
    double est = strata > 1 ? std::sqrt(var / double(strata - 1) / double(strata)) : 0.0;

    QuadratureResult out;
    out.value = value;
    out.est_error = est;
    out.cells = config.samples;
    out.converged = true;
    return out;
}

} // namespace weierkern

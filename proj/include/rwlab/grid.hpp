#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rwlab {

/// Strictly increasing radii in [0,1). All sup estimation and operator work
/// happens on grids graded geometrically in 1-r, since every asymptotic in
/// sight is governed by r -> 1.
struct Grid {
    std::vector<double> r;

    size_t size() const { return r.size(); }
    double front() const { return r.front(); }
    double back() const { return r.back(); }
    double operator[](size_t i) const { return r[i]; }

    /// n nodes with 1-r geometric from gap_hi down to gap_lo.
    static Grid geometric(int n, double gap_hi = 1e-1, double gap_lo = 1e-8) {
        if (n < 2 || !(gap_hi > gap_lo) || !(gap_lo > 0.0) || !(gap_hi < 1.0))
            throw std::invalid_argument("Grid::geometric: bad parameters");
        Grid g;
        g.r.reserve(n);
        const double ratio = std::log(gap_lo / gap_hi) / double(n - 1);
        for (int i = 0; i < n; ++i) g.r.push_back(1.0 - gap_hi * std::exp(ratio * i));
        g.canonicalize();
        return g;
    }

    /// Default sup-estimation grid: r = 0 and a short linear head, then the
    /// 512-node geometric span [1-1e-1, 1-1e-8].
    static Grid sup_default(int n_geom = 512, double gap_lo = 1e-8) {
        Grid head;
        for (int i = 0; i < 32; ++i) head.r.push_back(0.9 * i / 32.0);
        Grid tail = geometric(n_geom, 1e-1, gap_lo);
        head.r.insert(head.r.end(), tail.r.begin(), tail.r.end());
        head.canonicalize();
        return head;
    }

    /// Profile/operator grid from r = 0: a quarter of the nodes linear on
    /// [0, 0.9), the rest geometric down to gap_lo.
    static Grid operator_grid(int n, double gap_lo = 1e-6) {
        if (n < 8) throw std::invalid_argument("Grid::operator_grid: need n >= 8");
        Grid g;
        const int head = n / 4;
        for (int i = 0; i < head; ++i) g.r.push_back(0.9 * i / head);
        Grid tail = geometric(n - head, 1e-1, gap_lo);
        g.r.insert(g.r.end(), tail.r.begin(), tail.r.end());
        g.canonicalize();
        return g;
    }

    /// Same span, doubled density (midpoints inserted).
    Grid refined() const {
        Grid g;
        g.r.reserve(r.size() * 2);
        for (size_t i = 0; i + 1 < r.size(); ++i) {
            g.r.push_back(r[i]);
            g.r.push_back(0.5 * (r[i] + r[i + 1]));
        }
        g.r.push_back(r.back());
        g.canonicalize();
        return g;
    }

    /// Extended toward 1: the deepest gap shrinks by `factor`, geometric nodes
    /// appended to cover the new span.
    Grid extended(double factor = 1e-2) const {
        const double gap = 1.0 - r.back();
        const double new_gap = gap * factor;
        Grid ext = geometric(64, gap, new_gap);
        Grid g = *this;
        g.r.insert(g.r.end(), ext.r.begin(), ext.r.end());
        g.canonicalize();
        return g;
    }

    /// Drop trailing nodes at which `dead` reports true (tail underflow).
    template <typename Pred>
    Grid clipped(Pred dead) const {
        Grid g = *this;
        while (!g.r.empty() && dead(g.r.back())) g.r.pop_back();
        if (g.r.size() < 2) throw std::domain_error("Grid::clipped: no usable nodes left");
        return g;
    }

    std::string meta() const {
        std::ostringstream os;
        os.precision(3);
        os << r.size() << " nodes, r in [" << r.front() << ", 1-" << std::scientific
           << (1.0 - r.back()) << "]";
        return os.str();
    }

    void canonicalize() {
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        if (!r.empty() && (r.front() < 0.0 || r.back() >= 1.0))
            throw std::invalid_argument("Grid: radii must lie in [0,1)");
    }
};

} // namespace rwlab

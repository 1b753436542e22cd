#include "robplan/utility.hpp"

#include "robplan/errors.hpp"
#include "robplan/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace robplan {

Utility::Utility(std::vector<AffinePiece> pieces, DecisionBounds bounds)
    : pieces_(std::move(pieces)), bounds_(bounds) {
    if (pieces_.empty()) throw ValidationError("pieces", "utility needs at least one affine piece");
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        const auto& p = pieces_[k];
        if (!std::isfinite(p.a) || !std::isfinite(p.c) || !std::isfinite(p.d))
            throw ValidationError("pieces[" + std::to_string(k) + "]", "coefficients must be finite");
    }
    if (!std::isfinite(bounds_.lower) || !std::isfinite(bounds_.upper))
        throw ValidationError("decision", "bounds must be finite");
    if (!(bounds_.lower < bounds_.upper)) throw ValidationError("decision", "lower must be < upper");
}

double Utility::eval(double x, double b) const {
    if (!std::isfinite(x)) throw DomainError("utility evaluated at non-finite x");
    if (!(b >= bounds_.lower && b <= bounds_.upper)) {
        std::ostringstream msg;
        msg << "decision b = " << b << " outside [" << bounds_.lower << ", " << bounds_.upper << "]";
        throw DomainError(msg.str());
    }
    double best = pieces_[0].a + pieces_[0].c * x + pieces_[0].d * b;
    for (std::size_t k = 1; k < pieces_.size(); ++k)
        best = std::min(best, pieces_[k].a + pieces_[k].c * x + pieces_[k].d * b);
    return best;
}

void Utility::eval_batch(std::span<const double> xs, double b, std::span<double> out) const {
    std::vector<double> intercepts(pieces_.size());
    std::vector<double> slopes(pieces_.size());
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        intercepts[k] = pieces_[k].a + pieces_[k].d * b;
        slopes[k] = pieces_[k].c;
    }
    kernels::min_affine(xs, intercepts, slopes, out);
}

std::vector<double> Utility::kinks_in_x(double b, double lo, double hi) const {
    std::vector<double> out;
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        for (std::size_t l = k + 1; l < pieces_.size(); ++l) {
            const double dc = pieces_[k].c - pieces_[l].c;
            if (dc == 0.0) continue;
            const double x = ((pieces_[l].a + pieces_[l].d * b) - (pieces_[k].a + pieces_[k].d * b)) / dc;
            if (!(x >= lo && x <= hi)) continue;
            // keep only crossings where both pieces are active
            const double v = pieces_[k].a + pieces_[k].c * x + pieces_[k].d * b;
            if (eval(x, b) >= v - 1e-12 * (1.0 + std::abs(v))) out.push_back(x);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Utility Utility::scaled(double alpha) const {
    if (!(alpha > 0.0)) throw PreconditionError("utility scale factor must be > 0");
    auto pieces = pieces_;
    for (auto& p : pieces) {
        p.a *= alpha;
        p.c *= alpha;
        p.d *= alpha;
    }
    return Utility(std::move(pieces), bounds_);
}

Utility market_bidding(double p, double q, double b_lo, double b_hi) {
    if (!(p > 0.0)) throw PreconditionError("market bidding requires p > 0");
    if (!(q > p)) throw PreconditionError("market bidding requires q > p");
    return Utility({{0.0, 0.0, p}, {0.0, q, p - q}}, {b_lo, b_hi});
}

} // namespace robplan

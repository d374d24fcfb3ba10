#pragma once

// Rigorous algorithms built on interval extensions:
//   bsa_range          binary subdivision range enclosure with an eps-covering witness
//   modulus_estimate   modulus of continuity read off a covering
//   itra               interval trapezoid quadrature
//   interval_newton    1-D interval Newton with existence/exclusion verdicts
//   kantorovich_step   Newton-Kantorovich stopping test at a point
//   brouwer_check      f(I) inside int I certifies a fixed point

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "rigor/expr.hpp"
#include "rigor/interval.hpp"

namespace rigor {

template <class B>
using IntervalFunction = std::function<Interval<B>(const Interval<B>&)>;

// Natural extension of a one-variable expression as an interval function.
template <class B>
IntervalFunction<B> extension(Expr f, std::string var, EvalContext<B> ctx = {}) {
    return [f = std::move(f), var = std::move(var), ctx = std::move(ctx)](const Interval<B>& x) mutable {
        ctx.bindings.insert_or_assign(var, x);
        return eval_iv(f, ctx);
    };
}

// ---- coverings ----------------------------------------------------------------

template <class B>
struct CoveringPiece {
    Interval<B> piece;
    Interval<B> enclosure;

    friend void swap(CoveringPiece& a, CoveringPiece& b) noexcept {
        swap(a.piece, b.piece);
        swap(a.enclosure, b.enclosure);
    }
};

/// Finite family of pieces covering `domain`, each with an enclosure of the
/// function over the piece of width at most `epsilon`.
template <class B>
struct Covering {
    std::deque<CoveringPiece<B>> pieces;
    typename B::scalar epsilon;
    Interval<B> domain;
};

// Pieces sorted by left endpoint cover the domain without gaps, and every
// enclosure is at most epsilon wide.
template <class B>
bool is_valid_covering(const Covering<B>& cov) {
    if (cov.pieces.empty()) return false;
    std::vector<const CoveringPiece<B>*> sorted;
    for (const auto& p : cov.pieces) {
        if (cov.epsilon < diam(p.enclosure)) return false;
        sorted.push_back(&p);
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const auto* a, const auto* b) { return a->piece.lo() < b->piece.lo(); });
    if (cov.domain.lo() < sorted.front()->piece.lo()) return false;
    typename B::scalar reach = sorted.front()->piece.hi();
    for (const auto* p : sorted) {
        if (reach < p->piece.lo()) return false;
        if (reach < p->piece.hi()) reach = p->piece.hi();
    }
    return !(reach < cov.domain.hi());
}

// Drops zero-width pieces; the remaining ones still cover the domain when
// the domain itself is nondegenerate.
template <class B>
Covering<B> without_degenerate_pieces(const Covering<B>& cov) {
    Covering<B> out{{}, cov.epsilon, cov.domain};
    for (const auto& p : cov.pieces) {
        if (!p.piece.is_degenerate()) out.pieces.push_back(p);
    }
    return out;
}

// ---- BSA ----------------------------------------------------------------------

enum class BsaStatus { success, failure, budget };

template <class B>
struct BsaResult {
    BsaStatus status;
    std::optional<Interval<B>> range;  // set on success
    Covering<B> covering;              // proper pieces found so far
    std::size_t bisections = 0;
    std::size_t evaluations = 0;
    std::string reason;
};

/// Binary subdivision range enclosure. The longest bad piece (leftmost on
/// ties) is bisected until every piece has an enclosure of width <= eps.
/// Success yields f(I) in S in B(f(I), eps); failure means the longest bad
/// piece could not be bisected; budget means max_steps bisections ran out.
template <class B>
BsaResult<B> bsa_range(const IntervalFunction<B>& f, const Interval<B>& domain, const typename B::scalar& eps,
                       std::size_t max_steps) {
    if (!(eps > 0)) throw DomainError("bsa_range needs eps > 0");

    // Rational moves allocate, so pieces stay put in a deque and the heap
    // and the final ordering work on indices. Comparisons look at truncated
    // binary64 approximations first; those are monotone, so they decide
    // whenever they differ.
    using S = typename B::scalar;
    auto less = [](const S& a, double da, const S& b, double db) { return da != db ? da < db : a < b; };
    std::deque<Interval<B>> bad_pieces;
    // Heap entries carry their keys so comparisons stay inside the heap array.
    struct Entry {
        double width;
        double lo;
        std::size_t slot;
        bool width_exact;
    };
    auto longer = [&](const Entry& a, const Entry& b) {
        if (a.width != b.width) return a.width < b.width;
        if (!(a.width_exact && b.width_exact)) {
            const S wa = diam(bad_pieces[a.slot]);
            const S wb = diam(bad_pieces[b.slot]);
            if (wa != wb) return wa < wb;
        }
        return less(bad_pieces[b.slot].lo(), b.lo, bad_pieces[a.slot].lo(), a.lo);
    };
    // On Rat the width key is exact when both endpoints are binary64 numbers
    // whose difference rounds without error (TwoSum of w and a gives b, 0).
    auto entry = [](const Interval<B>& z, std::size_t slot) {
        if constexpr (B::exact) {
            const auto a = exact_double(z.lo());
            const auto b = exact_double(z.hi());
            if (a && b) {
                const double w = *b - *a;
                const double sum = w + *a;
                const double wv = sum - *a;
                const double err = (w - wv) + (*a - (sum - wv));
                if (std::isfinite(w) && sum == *b && err == 0.0) return Entry{w, *a, slot, true};
            }
            return Entry{B::approx(diam(z)), B::approx(z.lo()), slot, false};
        } else {
            return Entry{diam(z), z.lo(), slot, true};
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(longer)> bad(longer);
    std::vector<std::size_t> free_slots;

    BsaResult<B> result{BsaStatus::success, std::nullopt, Covering<B>{{}, eps, domain}, 0, 0, {}};
    auto& good = result.covering.pieces;
    std::vector<std::pair<double, std::size_t>> order;  // left endpoint key, index into good
    std::optional<S> range_lo;
    std::optional<S> range_hi;
    const double eps_approx = B::approx(eps);
    // Cheap sufficient test for diam <= eps: each approximation is within
    // one ulp of its endpoint.
    auto clearly_thin = [&](const Interval<B>& z) {
        const double a = B::approx(z.lo());
        const double b = B::approx(z.hi());
        const double slack = 0x1p-50 * std::max(std::fabs(a), std::fabs(b)) + 0x1p-1000;
        return (b - a) * (1 + 0x1p-50) + slack < eps_approx * (1 - 0x1p-50);
    };

    auto push_bad = [&](Interval<B>&& z) {
        std::size_t slot = bad_pieces.size();
        if (free_slots.empty()) {
            bad_pieces.push_back(std::move(z));
        } else {
            slot = free_slots.back();
            free_slots.pop_back();
            bad_pieces[slot] = std::move(z);
        }
        bad.push(entry(bad_pieces[slot], slot));
    };

    auto classify = [&](Interval<B>&& z) {
        ++result.evaluations;
        try {
            Interval<B> fz = f(z);
            if (clearly_thin(fz) || diam(fz) <= eps) {
                if (!range_lo || fz.lo() < *range_lo) range_lo = fz.lo();
                if (!range_hi || *range_hi < fz.hi()) range_hi = fz.hi();
                order.emplace_back(B::approx(z.lo()), good.size());
                good.emplace_back(std::move(z), std::move(fz));
                return;
            }
        } catch (const DomainError&) {
        } catch (const Overflow&) {
        }
        push_bad(std::move(z));
    };

    // Orders the pieces by left endpoint in place; swaps do not allocate.
    auto finish = [&](BsaStatus status, std::string reason) {
        std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
            return less(good[a.second].piece.lo(), a.first, good[b.second].piece.lo(), b.first);
        });
        std::vector<bool> placed(order.size(), false);
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (std::size_t j = i; !placed[j];) {
                placed[j] = true;
                const std::size_t k = order[j].second;
                if (k == i) break;
                swap(good[j], good[k]);
                j = k;
            }
        }
        result.status = status;
        result.reason = std::move(reason);
        if (status == BsaStatus::success) result.range = Interval<B>(*range_lo, *range_hi);
    };

    classify(Interval<B>(domain));
    while (!bad.empty()) {
        const std::size_t top = bad.top().slot;
        const Interval<B>& longest = bad_pieces[top];
        auto mid = B::interior_point(longest.lo(), longest.hi());
        if (!mid) {
            finish(BsaStatus::failure, longest.is_degenerate() ? "longest bad interval has zero diameter"
                                                               : "no representable midpoint in the longest bad interval");
            return result;
        }
        if (result.bisections >= max_steps) {
            finish(BsaStatus::budget, "bisection budget exhausted");
            return result;
        }
        Interval<B> left_half(ordered, longest.lo(), *mid);
        Interval<B> right_half(ordered, std::move(*mid), longest.hi());
        bad.pop();
        free_slots.push_back(top);
        ++result.bisections;
        classify(std::move(left_half));
        classify(std::move(right_half));
    }
    finish(BsaStatus::success, {});
    return result;
}

template <class B>
struct ModulusEstimate {
    typename B::scalar delta;
    typename B::scalar bound;
};

/// delta = smallest nondegenerate piece width, bound = 2 eps: any x, y in
/// the domain with |x - y| <= delta satisfy |f(x) - f(y)| <= bound.
template <class B>
ModulusEstimate<B> modulus_estimate(const Covering<B>& cov) {
    const Covering<B> pieces = without_degenerate_pieces(cov);
    if (pieces.pieces.empty()) throw EmptyCovering("covering has no nondegenerate pieces");
    typename B::scalar delta = B::sub(pieces.pieces.front().piece.hi(), pieces.pieces.front().piece.lo(),
                                      Rounding::down);
    for (const auto& p : pieces.pieces) {
        typename B::scalar w = B::sub(p.piece.hi(), p.piece.lo(), Rounding::down);
        if (w < delta) delta = std::move(w);
    }
    return {delta, B::mul(B::from_int(2), cov.epsilon, Rounding::up)};
}

// ---- ITRA ---------------------------------------------------------------------

/// Interval trapezoid rule: sum over the uniform partition of
/// width_i * F([x_{i-1}, x_i]). Contains the integral for every n.
template <class B>
Interval<B> itra(const IntervalFunction<B>& f, const typename B::scalar& a, const typename B::scalar& b,
                 std::size_t n) {
    if (!(a < b)) throw DomainError("itra needs a < b");
    if (n < 1) throw DomainError("itra needs n >= 1");
    const Rational ra = B::to_rational(a);
    const Rational rb = B::to_rational(b);
    const Rational h = (rb - ra) / Rational(static_cast<long>(n));
    auto grid = [&](std::size_t i) -> typename B::scalar {
        if (i == 0) return a;
        if (i == n) return b;
        return B::from_rational(ra + h * Rational(static_cast<long>(i)), Rounding::down);
    };
    Interval<B> total(B::from_int(0));
    typename B::scalar prev = a;
    for (std::size_t i = 1; i <= n; ++i) {
        typename B::scalar next = grid(i);
        const Interval<B> piece(prev, next);
        const Interval<B> width = sub(Interval<B>(next), Interval<B>(prev));
        total = add(total, mul(width, f(piece)));
        prev = std::move(next);
    }
    return total;
}

// ---- interval Newton --------------------------------------------------------------

enum class NewtonStatus { solution_found, no_solution, failure, budget };

template <class B>
struct NewtonOutcome {
    NewtonStatus status;
    std::optional<Interval<B>> enclosure;  // set for solution_found
    std::size_t iterations = 0;
    std::string reason;
};

/// Interval Newton on X0 with x_k the midpoint of X_k and
/// N = x_k - f(x_k)/[Df(X_k)]:
///   0 in [Df(X_k)]        failure
///   N inside X_k          a unique zero exists; keep contracting
///   N and X_k disjoint    no zero in X0
///   otherwise             X_{k+1} = X_k cap N
template <class B>
NewtonOutcome<B> interval_newton(const Expr& f, const std::string& var, const Interval<B>& x0,
                                 const typename B::scalar& width_goal, std::size_t max_iter,
                                 EvalContext<B> ctx = {}) {
    if (!(width_goal > 0)) throw DomainError("interval_newton needs a positive width goal");
    const Expr df = differentiate(f, var);
    Interval<B> x = x0;
    bool verified = false;
    for (std::size_t k = 0; k < max_iter; ++k) {
        ctx.bindings.insert_or_assign(var, x);
        const Interval<B> slope = eval_iv(df, ctx);
        if (slope.contains_zero()) {
            if (verified) return {NewtonStatus::solution_found, x, k, {}};
            return {NewtonStatus::failure, std::nullopt, k, "derivative enclosure contains zero"};
        }
        const Interval<B> center(midpoint(x));
        ctx.bindings.insert_or_assign(var, center);
        const Interval<B> value = eval_iv(f, ctx);
        const Interval<B> newton = sub(center, div(value, slope));
        if (subset(newton, x)) verified = true;
        const auto next = intersect(x, newton);
        if (!next) return {NewtonStatus::no_solution, std::nullopt, k + 1, "Newton image disjoint from X"};
        if (verified && (diam(*next) <= width_goal || *next == x)) {
            return {NewtonStatus::solution_found, *next, k + 1, {}};
        }
        x = *next;
    }
    if (verified) return {NewtonStatus::solution_found, x, max_iter, "width goal not reached"};
    return {NewtonStatus::budget, std::nullopt, max_iter, "iteration budget exhausted"};
}

// ---- Newton-Kantorovich -----------------------------------------------------------

template <class B>
struct KantorovichReport {
    typename B::scalar eta;
    typename B::scalar K;
    typename B::scalar h;
    typename B::scalar r;
    bool satisfied;
    typename B::scalar iterate;
};

/// Stopping test at x: eta = |f(x)/f'(x)|, K = sup over [x-eps, x+eps] of
/// |f''/f'(x)| (interval evaluation), h = K eta and
/// r = (1 - sqrt(1 - 2h))/K, computed as 2 eta / (1 + sqrt(1 - 2h)).
/// satisfied iff h < 1/2 and r <= eps; then f has a unique zero within r
/// of x. Reported quantities are upper bounds. For h >= 1/2, r = 2 eta.
template <class B>
KantorovichReport<B> kantorovich_step(const Expr& f, const std::string& var, const typename B::scalar& x,
                                      const typename B::scalar& eps, EvalContext<B> ctx = {}) {
    using S = typename B::scalar;
    const Expr df = differentiate(f, var);
    const Expr d2f = differentiate(df, var);
    const Interval<B> point(x);
    ctx.bindings.insert_or_assign(var, point);
    const Interval<B> slope = eval_iv(df, ctx);
    if (slope.contains_zero()) throw SingularDerivative("derivative vanishes (or may vanish) at the point");
    const Interval<B> value = eval_iv(f, ctx);
    const Interval<B> step = div(value, slope);
    const S eta = mag(step);

    ctx.bindings.insert_or_assign(var, Interval<B>(B::sub(x, eps, Rounding::down), B::add(x, eps, Rounding::up)));
    const S k = mag(div(eval_iv(d2f, ctx), slope));
    const S h = B::mul(k, eta, Rounding::up);

    const S one = B::from_int(1);
    const S half = B::div(one, B::from_int(2), Rounding::down);
    S r = B::mul(B::from_int(2), eta, Rounding::up);
    const bool contracting = h < half;
    if (contracting) {
        const S disc = B::sub(one, B::mul(B::from_int(2), h, Rounding::up), Rounding::down);
        const S root = B::sqrt(disc, Rounding::down, ctx.tol);
        r = B::div(r, B::add(one, root, Rounding::down), Rounding::up);
    }
    const S iterate = midpoint(sub(point, step));
    return {eta, k, h, r, contracting && r <= eps, iterate};
}

// ---- Brouwer ----------------------------------------------------------------------

enum class BrouwerVerdict { fixed_point_exists, inconclusive };

template <class B>
struct BrouwerResult {
    BrouwerVerdict verdict;
    Interval<B> image;
};

/// f(I) strictly inside I proves a fixed point in I; anything else is
/// inconclusive (never a proof of nonexistence).
template <class B>
BrouwerResult<B> brouwer_check(const Expr& f, const std::string& var, const Interval<B>& domain,
                               EvalContext<B> ctx = {}) {
    ctx.bindings.insert_or_assign(var, domain);
    const Interval<B> image = eval_iv(f, ctx);
    return {interior_subset(image, domain) ? BrouwerVerdict::fixed_point_exists : BrouwerVerdict::inconclusive,
            image};
}

}  // namespace rigor

#pragma once

// Calibration objective: relative price residuals, analytic Jacobian,
// Feller-penalized objective and optional Tikhonov regularization.

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ddsv/errors.hpp"
#include "ddsv/market.hpp"
#include "ddsv/model.hpp"
#include "ddsv/optim/bounds.hpp"
#include "ddsv/pricer.hpp"

namespace ddsv {

struct CalibOptions {
    std::size_t nodes = default_nodes;
    Bounds bounds = Bounds::model_defaults();
    Eigen::MatrixXd gamma;  // regularization; empty means off
};

struct Residuals {
    Eigen::VectorXd f;
    Eigen::MatrixXd J;
};

inline Eigen::VectorXd to_vector(const ModelParams& p) {
    const auto a = p.to_array();
    return Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(n_params));
}

inline ModelParams to_params(const Eigen::VectorXd& x) {
    if (x.size() != static_cast<Eigen::Index>(n_params)) throw ValidationError("parameter vector must have 8 components");
    return ModelParams::from_array({x.data(), n_params});
}

/// F' = F + |Gamma x|^2 / 2, grad' = grad + Gamma^T Gamma x.
inline std::pair<double, Eigen::VectorXd> regularize(double F, const Eigen::VectorXd& grad, const Eigen::VectorXd& x,
                                                     const Eigen::MatrixXd& gamma) {
    if (gamma.size() == 0) return {F, grad};
    const Eigen::VectorXd gx = gamma * x;
    return {F + 0.5 * gx.squaredNorm(), grad + gamma.transpose() * gx};
}

class CalibProblem {
public:
    struct Group {
        SwapGeometry geom;
        std::vector<std::size_t> quotes;
    };

    CalibProblem(const MarketData& md, ModelContext ctx, CalibOptions opt = {})
        : ctx_(std::move(ctx)), opt_(std::move(opt)), rule_(quad_rule(opt_.nodes)) {
        if (md.quotes.empty()) throw ValidationError("no quotes");
        if (opt_.gamma.size() != 0 && opt_.gamma.cols() != static_cast<Eigen::Index>(n_params))
            throw ValidationError("regularization matrix must have 8 columns");
        if (opt_.bounds.size() != static_cast<Eigen::Index>(n_params))
            throw ValidationError("bounds must have 8 components");
        ctx_.shift = md.shift;
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
        total_weight_ = 0.0;
        for (std::size_t q = 0; q < md.quotes.size(); ++q) {
            const auto& quote = md.quotes[q];
            if (!(quote.price > 0.0))
                throw ValidationError("quote " + std::to_string(q) + " has non-positive market price");
            if (!(quote.weight > 0.0)) throw ValidationError("quote " + std::to_string(q) + " has non-positive weight");
            total_weight_ += quote.weight;
            const auto key = std::make_pair(quote.m, quote.n);
            auto it = index.find(key);
            if (it == index.end()) {
                it = index.emplace(key, groups_.size()).first;
                groups_.push_back({swap_geometry(md.curve, md.grid, quote.m, quote.n, md.shift), {}});
            }
            groups_[it->second].quotes.push_back(q);
        }
        quotes_ = md.quotes;
        scale_.resize(quotes_.size());
        for (std::size_t q = 0; q < quotes_.size(); ++q)
            scale_[q] = std::sqrt(quotes_[q].weight / total_weight_) / quotes_[q].price;
    }

    std::size_t n_quotes() const { return quotes_.size(); }
    std::size_t n_residuals() const { return quotes_.size() + static_cast<std::size_t>(opt_.gamma.rows()); }
    double total_weight() const { return total_weight_; }
    const std::vector<SwaptionQuote>& quotes() const { return quotes_; }
    const std::vector<Group>& groups() const { return groups_; }
    const ModelContext& context() const { return ctx_; }
    const CalibOptions& options() const { return opt_; }
    const Bounds& bounds() const { return opt_.bounds; }
    const QuadratureRule& rule() const { return rule_; }

    /// Model prices in quote order.
    std::vector<double> prices(const ModelParams& p) const {
        std::vector<double> out(quotes_.size());
        for (const auto& g : groups_) {
            const auto coeffs = build_coeffs(p, ctx_, g.geom);
            NodeTable table;
            try {
                table = evaluate_nodes(p, coeffs, rule_);
            } catch (const Error& e) {
                throw Error(group_label(g) + ": " + e.what());
            }
            for (std::size_t q : g.quotes) out[q] = price_from(table, g, q).price;
        }
        return out;
    }

    Eigen::VectorXd residuals(const ModelParams& p) const {
        const auto ps = prices(p);
        Eigen::VectorXd f(static_cast<Eigen::Index>(n_residuals()));
        for (std::size_t q = 0; q < quotes_.size(); ++q)
            f(static_cast<Eigen::Index>(q)) = scale_[q] * (ps[q] - quotes_[q].price);
        append_regularization(p, f, nullptr);
        return f;
    }

    Residuals residuals_and_jacobian(const ModelParams& p) const {
        Residuals r;
        const auto nr = static_cast<Eigen::Index>(n_residuals());
        r.f.resize(nr);
        r.J.resize(nr, static_cast<Eigen::Index>(n_params));
        for (const auto& g : groups_) {
            const auto [coeffs, partials] = build_coeffs_with_partials(p, ctx_, g.geom);
            NodeTable table;
            try {
                table = evaluate_nodes(p, coeffs, partials, rule_);
            } catch (const Error& e) {
                throw Error(group_label(g) + ": " + e.what());
            }
            for (std::size_t q : g.quotes) {
                const auto pg = price_from(table, g, q);
                const auto row = static_cast<Eigen::Index>(q);
                r.f(row) = scale_[q] * (pg.price - quotes_[q].price);
                for (std::size_t x = 0; x < n_params; ++x)
                    r.J(row, static_cast<Eigen::Index>(x)) = scale_[q] * pg.grad[x];
            }
        }
        append_regularization(p, r.f, &r.J);
        return r;
    }

    Eigen::MatrixXd jacobian(const ModelParams& p) const { return residuals_and_jacobian(p).J; }

    double objective(const ModelParams& p) const { return 0.5 * residuals(p).squaredNorm(); }

    /// F inside bounds, open domain and Feller region; +inf elsewhere or when pricing fails.
    double objective_penalized(const ModelParams& p) const {
        constexpr double inf = std::numeric_limits<double>::infinity();
        if (!p.admissible() || !opt_.bounds.contains(to_vector(p)) || !p.feller()) return inf;
        try {
            const double F = objective(p);
            return std::isfinite(F) ? F : inf;
        } catch (const Error&) {
            return inf;
        }
    }

private:
    PriceAndGrad price_from(const NodeTable& table, const Group& g, std::size_t q) const {
        try {
            return price_from_table(table, g.geom, quotes_[q].strike, rule_);
        } catch (const Error& e) {
            throw Error("quote " + std::to_string(q) + ": " + e.what());
        }
    }

    static std::string group_label(const Group& g) {
        return "swaption " + std::to_string(g.geom.m) + "x" + std::to_string(g.geom.n - g.geom.m);
    }

    void append_regularization(const ModelParams& p, Eigen::VectorXd& f, Eigen::MatrixXd* J) const {
        if (opt_.gamma.size() == 0) return;
        const auto nq = static_cast<Eigen::Index>(quotes_.size());
        f.segment(nq, opt_.gamma.rows()) = opt_.gamma * to_vector(p);
        if (J) J->block(nq, 0, opt_.gamma.rows(), static_cast<Eigen::Index>(n_params)) = opt_.gamma;
    }

    ModelContext ctx_;
    CalibOptions opt_;
    QuadratureRule rule_;
    std::vector<SwaptionQuote> quotes_;
    std::vector<Group> groups_;
    std::vector<double> scale_;
    double total_weight_ = 0.0;
};

}  // namespace ddsv

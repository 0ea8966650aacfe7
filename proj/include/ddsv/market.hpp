#pragma once

// Market inputs: tenor grid, zero curve, swaption quotes and the frozen
// swap-rate geometry the model is built on.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ddsv/errors.hpp"

namespace ddsv {

/// Ordered tenor dates T_0 < T_1 < ... < T_K in year fractions.
class TenorGrid {
public:
    TenorGrid() = default;

    explicit TenorGrid(std::vector<double> dates) : dates_(std::move(dates)) {
        detail::require(dates_.size() >= 2, "tenor grid needs at least two dates");
        for (std::size_t j = 1; j < dates_.size(); ++j)
            detail::require(dates_[j] > dates_[j - 1], "tenor dates must be strictly increasing");
    }

    /// T_j = j * spacing for j = 0..last.
    static TenorGrid uniform(double spacing, std::size_t last) {
        detail::require(spacing > 0.0, "tenor spacing must be positive");
        std::vector<double> d(last + 1);
        for (std::size_t j = 0; j <= last; ++j) d[j] = spacing * static_cast<double>(j);
        return TenorGrid(std::move(d));
    }

    double date(std::size_t j) const { return dates_.at(j); }
    double delta(std::size_t j) const { return dates_.at(j + 1) - dates_.at(j); }
    /// Index of the last date, K.
    std::size_t last() const { return dates_.size() - 1; }
    std::span<const double> dates() const { return dates_; }

private:
    std::vector<double> dates_;
};

/// Discount curve P(0,T) with log-linear interpolation between pillars and
/// the last instantaneous forward extended flat beyond the final pillar.
class ZeroCurve {
public:
    struct Pillar {
        double maturity;
        double discount;
    };

    ZeroCurve() = default;

    explicit ZeroCurve(std::vector<Pillar> pillars) : pillars_(std::move(pillars)) {
        if (pillars_.empty() || pillars_.front().maturity > 0.0)
            pillars_.insert(pillars_.begin(), Pillar{0.0, 1.0});
        detail::require(pillars_.front().maturity == 0.0, "curve maturities must be non-negative");
        detail::require(pillars_.front().discount == 1.0, "curve must satisfy P(0,0) = 1");
        detail::require(pillars_.size() >= 2, "curve needs at least one pillar beyond t = 0");
        for (std::size_t i = 0; i < pillars_.size(); ++i) {
            detail::require(pillars_[i].discount > 0.0 && std::isfinite(pillars_[i].discount),
                            "discount factors must be positive and finite");
            if (i > 0)
                detail::require(pillars_[i].maturity > pillars_[i - 1].maturity,
                                "curve maturities must be strictly increasing");
        }
    }

    double discount(double t) const { return std::exp(log_discount(t)); }

    double log_discount(double t) const {
        if (!(t >= 0.0)) throw RangeError("maturity " + std::to_string(t) + " is before the curve origin");
        if (t == 0.0) return 0.0;
        auto it = std::upper_bound(pillars_.begin(), pillars_.end(), t,
                                   [](double x, const Pillar& p) { return x < p.maturity; });
        if (it == pillars_.end()) {
            const auto& last = pillars_.back();
            const auto& prev = pillars_[pillars_.size() - 2];
            const double slope = (std::log(last.discount) - std::log(prev.discount)) /
                                 (last.maturity - prev.maturity);
            return std::log(last.discount) + slope * (t - last.maturity);
        }
        const auto& right = *it;
        const auto& left = *std::prev(it);
        const double w = (t - left.maturity) / (right.maturity - left.maturity);
        return std::log(left.discount) + w * (std::log(right.discount) - std::log(left.discount));
    }

    std::span<const Pillar> pillars() const { return pillars_; }

private:
    std::vector<Pillar> pillars_;
};

/// One swaption quote on the tenor grid: payer swaption expiring at T_m on
/// the swap over [T_m, T_n].
struct SwaptionQuote {
    std::size_t m = 0;
    std::size_t n = 0;
    double strike = 0.0;
    double price = 0.0;                  // filled at load time when only a vol was given
    std::optional<double> normal_vol;    // as quoted, kept for reporting
    double weight = 1.0;
    double strike_offset_bps = 0.0;
};

/// Swap-rate quantities frozen at t = 0 for the pair (m, n).
struct SwapGeometry {
    std::size_t m = 0;
    std::size_t n = 0;
    double shift = 0.0;                  // delta
    double swap_rate = 0.0;              // R_{m,n}(0)
    double annuity = 0.0;                // B^S(0)
    std::vector<double> dates;           // T_0..T_n
    std::vector<double> forwards;        // F_j(0), j = 0..n-1
    std::vector<double> alphas;          // alpha_j(0), j = m..n-1
    std::vector<double> swap_rate_sensitivities;  // dR/dF_j(0), j = m..n-1
    std::vector<double> omegas;          // omega_j(0), j = m..n-1

    double expiry() const { return dates[m]; }
    double period(std::size_t j) const { return dates[j + 1] - dates[j]; }
};

/// Simply compounded forward over [T_j, T_{j+1}].
inline double forward_rate(const ZeroCurve& curve, const TenorGrid& grid, std::size_t j) {
    if (j >= grid.last())
        throw RangeError("forward index " + std::to_string(j) + " beyond the tenor grid");
    const double ratio = std::exp(curve.log_discount(grid.date(j)) - curve.log_discount(grid.date(j + 1)));
    return (ratio - 1.0) / grid.delta(j);
}

inline SwapGeometry swap_geometry(const ZeroCurve& curve, const TenorGrid& grid, std::size_t m,
                                  std::size_t n, double shift) {
    if (!(m < n)) throw DomainError("swap geometry needs m < n");
    if (n > grid.last()) throw RangeError("swap end index " + std::to_string(n) + " beyond the tenor grid");
    if (!(shift >= 0.0)) throw DomainError("shift must be non-negative");

    SwapGeometry g;
    g.m = m;
    g.n = n;
    g.shift = shift;
    g.dates.assign(grid.dates().begin(), grid.dates().begin() + static_cast<std::ptrdiff_t>(n) + 1);
    g.forwards.resize(n);
    for (std::size_t j = 0; j < n; ++j) g.forwards[j] = forward_rate(curve, grid, j);

    std::vector<double> p(n + 1);
    for (std::size_t j = 0; j <= n; ++j) p[j] = curve.discount(grid.date(j));

    double annuity = 0.0;
    for (std::size_t j = m; j < n; ++j) annuity += grid.delta(j) * p[j + 1];
    g.annuity = annuity;
    g.swap_rate = (p[m] - p[n]) / annuity;
    if (!(g.swap_rate + shift > 0.0))
        throw DomainError("shifted swap rate R0 + delta must be positive");

    const std::size_t len = n - m;
    g.alphas.resize(len);
    g.swap_rate_sensitivities.resize(len);
    g.omegas.resize(len);
    double running = 0.0;  // sum_{k=m}^{j-1} alpha_k (F_k - R0)
    for (std::size_t j = m; j < n; ++j) {
        const std::size_t i = j - m;
        const double dt = grid.delta(j);
        g.alphas[i] = dt * p[j + 1] / annuity;
        g.swap_rate_sensitivities[i] = g.alphas[i] + dt / (1.0 + dt * g.forwards[j]) * running;
        g.omegas[i] = g.swap_rate_sensitivities[i] * (g.forwards[j] + shift) / (g.swap_rate + shift);
        running += g.alphas[i] * (g.forwards[j] - g.swap_rate);
    }
    return g;
}

/// Payer swaption under the normal model.
inline double bachelier_price(double forward, double strike, double normal_vol, double expiry, double annuity) {
    if (!(normal_vol >= 0.0)) throw DomainError("normal vol must be non-negative");
    if (!(expiry > 0.0)) throw DomainError("expiry must be positive");
    if (!(annuity > 0.0)) throw DomainError("annuity must be positive");
    const double sd = normal_vol * std::sqrt(expiry);
    const double diff = forward - strike;
    if (sd == 0.0) return annuity * std::max(diff, 0.0);
    const double d = diff / sd;
    const double cdf = 0.5 * std::erfc(-d / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * d * d) / std::sqrt(2.0 * std::numbers::pi);
    return annuity * (diff * cdf + sd * pdf);
}

/// Unit loading directions beta_1..beta_R, one row per lag (row 0 is beta_1).
class BetaMatrix {
public:
    BetaMatrix() = default;

    BetaMatrix(std::size_t n_factors, std::vector<std::vector<double>> rows) : n_factors_(n_factors) {
        detail::require(n_factors >= 1, "number of factors must be positive");
        detail::require(!rows.empty(), "beta matrix is empty");
        data_.reserve(rows.size() * n_factors);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            detail::require(rows[k].size() == n_factors,
                            "beta row " + std::to_string(k + 1) + " has " + std::to_string(rows[k].size()) +
                                " entries, expected " + std::to_string(n_factors));
            double norm = 0.0;
            for (double v : rows[k]) norm += v * v;
            norm = std::sqrt(norm);
            detail::require(std::abs(norm - 1.0) < 1e-6,
                            "beta row " + std::to_string(k + 1) + " is not a unit vector");
            for (double v : rows[k]) data_.push_back(v / norm);
        }
    }

    std::size_t n_factors() const { return n_factors_; }
    std::size_t rows() const { return n_factors_ == 0 ? 0 : data_.size() / n_factors_; }

    /// beta_{lag}, lag >= 1.
    std::span<const double> beta(std::size_t lag) const {
        if (lag == 0 || lag > rows())
            throw RangeError("beta_" + std::to_string(lag) + " requested but the beta file has " +
                             std::to_string(rows()) + " rows");
        return {data_.data() + (lag - 1) * n_factors_, n_factors_};
    }

private:
    std::size_t n_factors_ = 0;
    std::vector<double> data_;
};

struct MarketOptions {
    double shift = 0.1;
    std::size_t n_factors = 2;
    double tenor_spacing = 1.0;
};

struct MarketData {
    ZeroCurve curve;
    TenorGrid grid;
    std::vector<SwaptionQuote> quotes;
    BetaMatrix betas;
    double shift = 0.1;
};

namespace detail {

inline std::string trim(std::string s) {
    auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
    return s;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (used != s.size()) return std::nullopt;
    return v;
}

inline double require_number(const std::string& s, const std::string& file, std::size_t line,
                             const std::string& column) {
    auto v = parse_number(s);
    if (!v) throw ParseError(file, line, "cannot parse " + column + " value '" + s + "'");
    return *v;
}

/// Reads non-blank lines; returns (line number, content) pairs.
inline std::vector<std::pair<std::size_t, std::string>> read_lines(std::istream& in) {
    std::vector<std::pair<std::size_t, std::string>> out;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (no == 1 && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
        if (trim(line).empty()) continue;
        out.emplace_back(no, line);
    }
    return out;
}

inline void expect_header(const std::vector<std::pair<std::size_t, std::string>>& lines,
                          const std::vector<std::string>& expected, const std::string& file) {
    if (lines.empty()) throw ValidationError(file + ": file is empty");
    if (split_csv(lines.front().second) != expected) {
        std::string joined;
        for (const auto& h : expected) joined += (joined.empty() ? "" : ",") + h;
        throw ParseError(file, lines.front().first, "expected header '" + joined + "'");
    }
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return in;
}

}  // namespace detail

/// Curve CSV with header `maturity_years,discount`.
inline ZeroCurve read_curve(std::istream& in, const std::string& name = "curve") {
    const auto lines = detail::read_lines(in);
    detail::expect_header(lines, {"maturity_years", "discount"}, name);
    std::vector<ZeroCurve::Pillar> pillars;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& [no, text] = lines[i];
        const auto cells = detail::split_csv(text);
        if (cells.size() != 2) throw ParseError(name, no, "expected 2 columns");
        pillars.push_back({detail::require_number(cells[0], name, no, "maturity_years"),
                           detail::require_number(cells[1], name, no, "discount")});
    }
    detail::require(!pillars.empty(), name + ": no curve pillars");
    return ZeroCurve(std::move(pillars));
}

/// Beta CSV: one unit vector per row, optional non-numeric header line.
inline BetaMatrix read_betas(std::istream& in, std::size_t n_factors, const std::string& name = "betas") {
    auto lines = detail::read_lines(in);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& [no, text] = lines[i];
        const auto cells = detail::split_csv(text);
        if (i == 0 && !detail::parse_number(cells.front())) continue;
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(detail::require_number(c, name, no, "beta"));
        if (row.size() != n_factors)
            throw ParseError(name, no, "expected " + std::to_string(n_factors) + " columns");
        rows.push_back(std::move(row));
    }
    return BetaMatrix(n_factors, std::move(rows));
}

/// Raw quote row before strikes and prices are resolved against the curve.
struct QuoteRow {
    std::size_t line = 0;
    double maturity = 0.0;
    double tenor = 0.0;
    double strike_offset_bps = 0.0;
    std::optional<double> normal_vol;
    std::optional<double> price;
    double weight = 1.0;
};

/// Quotes CSV with header `maturity,tenor,strike_offset_bps,normal_vol,price,weight`.
inline std::vector<QuoteRow> read_quote_rows(std::istream& in, const std::string& name = "quotes") {
    const auto lines = detail::read_lines(in);
    detail::expect_header(lines, {"maturity", "tenor", "strike_offset_bps", "normal_vol", "price", "weight"}, name);
    std::vector<QuoteRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& [no, text] = lines[i];
        const auto cells = detail::split_csv(text);
        if (cells.size() != 6) throw ParseError(name, no, "expected 6 columns, got " + std::to_string(cells.size()));
        QuoteRow r;
        r.line = no;
        r.maturity = detail::require_number(cells[0], name, no, "maturity");
        r.tenor = detail::require_number(cells[1], name, no, "tenor");
        r.strike_offset_bps = detail::require_number(cells[2], name, no, "strike_offset_bps");
        if (!cells[3].empty()) r.normal_vol = detail::require_number(cells[3], name, no, "normal_vol");
        if (!cells[4].empty()) r.price = detail::require_number(cells[4], name, no, "price");
        r.weight = cells[5].empty() ? 1.0 : detail::require_number(cells[5], name, no, "weight");
        if (r.normal_vol.has_value() == r.price.has_value())
            throw ValidationError(name + ":" + std::to_string(no) +
                                  ": exactly one of normal_vol and price must be given");
        if (!(r.weight > 0.0))
            throw ValidationError(name + ":" + std::to_string(no) + ": weight must be positive");
        if (r.normal_vol && *r.normal_vol < 0.0)
            throw ValidationError(name + ":" + std::to_string(no) + ": negative normal vol");
        rows.push_back(r);
    }
    if (rows.empty()) throw ValidationError(name + ": no quotes");
    return rows;
}

namespace detail {

inline std::size_t to_grid_index(double years, double spacing, const std::string& what, std::size_t line) {
    const double steps = years / spacing;
    const double rounded = std::round(steps);
    if (!(rounded >= 0.0) || std::abs(steps - rounded) > 1e-9)
        throw ValidationError("quotes:" + std::to_string(line) + ": " + what +
                              " is not a multiple of the tenor spacing");
    return static_cast<std::size_t>(rounded);
}

}  // namespace detail

/// Resolves quote rows against the curve: grid indices, absolute strikes
/// (offsets are around the pair's spot swap rate) and Bachelier prices.
inline MarketData assemble_market(ZeroCurve curve, const std::vector<QuoteRow>& rows, BetaMatrix betas,
                                  const MarketOptions& opt = {}) {
    if (rows.empty()) throw ValidationError("no quotes");
    std::size_t last = 1;
    std::vector<std::pair<std::size_t, std::size_t>> index;
    for (const auto& r : rows) {
        const std::size_t m = detail::to_grid_index(r.maturity, opt.tenor_spacing, "maturity", r.line);
        const std::size_t len = detail::to_grid_index(r.tenor, opt.tenor_spacing, "tenor", r.line);
        if (m == 0 || len == 0)
            throw ValidationError("quotes:" + std::to_string(r.line) + ": maturity and tenor must be positive");
        index.emplace_back(m, m + len);
        last = std::max(last, m + len);
    }
    MarketData md;
    md.grid = TenorGrid::uniform(opt.tenor_spacing, last);
    md.shift = opt.shift;
    md.quotes.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const auto [m, n] = index[i];
        const auto geom = swap_geometry(curve, md.grid, m, n, opt.shift);
        SwaptionQuote q;
        q.m = m;
        q.n = n;
        q.strike_offset_bps = r.strike_offset_bps;
        q.strike = geom.swap_rate + 1e-4 * r.strike_offset_bps;
        q.weight = r.weight;
        q.normal_vol = r.normal_vol;
        q.price = r.price ? *r.price
                          : bachelier_price(geom.swap_rate, q.strike, *r.normal_vol, geom.expiry(), geom.annuity);
        md.quotes.push_back(q);
    }
    md.curve = std::move(curve);
    md.betas = std::move(betas);
    return md;
}

inline MarketData load_market(const std::string& curve_path, const std::string& quotes_path,
                              const std::string& betas_path, const MarketOptions& opt = {}) {
    auto cin = detail::open_input(curve_path);
    auto qin = detail::open_input(quotes_path);
    auto bin = detail::open_input(betas_path);
    auto curve = read_curve(cin, curve_path);
    auto rows = read_quote_rows(qin, quotes_path);
    auto betas = read_betas(bin, opt.n_factors, betas_path);
    return assemble_market(std::move(curve), rows, std::move(betas), opt);
}

}  // namespace ddsv

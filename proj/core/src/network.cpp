#include "ovi/network.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>

#include "ovi/error.hpp"

namespace ovi {

std::string_view to_code(SignificanceLevel level) noexcept {
    switch (level) {
        case SignificanceLevel::Uncorrected: return "uncorrected";
        case SignificanceLevel::RowBonferroni: return "row_bonferroni";
        case SignificanceLevel::FullBonferroni: return "full_bonferroni";
    }
    return "?";
}

std::optional<SignificanceLevel> significance_level_from_code(std::string_view code) noexcept {
    for (auto l : {SignificanceLevel::Uncorrected, SignificanceLevel::RowBonferroni, SignificanceLevel::FullBonferroni}) {
        if (to_code(l) == code) return l;
    }
    return std::nullopt;
}

double level_threshold(SignificanceLevel level, std::size_t n, double alpha) noexcept {
    const double nn = static_cast<double>(n);
    switch (level) {
        case SignificanceLevel::Uncorrected: return alpha;
        case SignificanceLevel::RowBonferroni: return alpha / nn;
        case SignificanceLevel::FullBonferroni: return alpha / (nn * nn);
    }
    return alpha;
}

namespace {

/// Source position vectors v_id = 1{Q} sign(s_id) for d < D - 1, source-major.
std::vector<double> positions(const Panel& signals, const ReturnsPanel& returns, const NetworkOptions& options) {
    if (!signals.aligned_with(returns.values)) throw DimensionError("network: signals and returns are not aligned");
    if (options.group < 1 || options.group > 5) throw ConfigError("network: quantile group must be in 1..5");
    const std::size_t n = signals.asset_count();
    const std::size_t days = signals.day_count();
    if (days < 2) throw DimensionError("network: need at least two days");
    const std::size_t t_len = days - 1;

    std::vector<long> membership_row(n);
    QuantileAssignment qa;
    if (options.network_universe || options.membership_signals == nullptr) {
        qa = quantile_groups(signals);
        for (std::size_t i = 0; i < n; ++i) membership_row[i] = static_cast<long>(i);
    } else {
        const Panel& wide = *options.membership_signals;
        if (wide.days != signals.days) throw DimensionError("network: membership panel days differ");
        qa = quantile_groups(wide);
        for (std::size_t i = 0; i < n; ++i) {
            auto it = std::find(wide.assets.begin(), wide.assets.end(), signals.assets[i]);
            if (it == wide.assets.end()) throw DimensionError("network: asset " + signals.assets[i] + " missing from membership panel");
            membership_row[i] = it - wide.assets.begin();
        }
    }
    std::vector<double> v(n * t_len, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < t_len; ++d) {
            if (qa.in_group(static_cast<std::size_t>(membership_row[i]), d, options.group)) {
                v[i * t_len + d] = signals(i, d) > 0.0 ? 1.0 : -1.0;
            }
        }
    }
    return v;
}

}  // namespace

PnlSeries edge_pnl(const Panel& signals, const ReturnsPanel& returns, std::size_t source, std::size_t target,
                   const NetworkOptions& options) {
    const std::size_t n = signals.asset_count();
    if (source >= n || target >= n) throw DimensionError("edge_pnl: unknown asset index");
    const std::vector<double> v = positions(signals, returns, options);
    const std::size_t t_len = signals.day_count() - 1;
    PnlSeries p;
    p.days.assign(signals.days.begin(), signals.days.begin() + static_cast<std::ptrdiff_t>(t_len));
    p.daily.assign(t_len, 0.0);
    p.gross.assign(t_len, 0.0);
    p.n_assets.assign(t_len, 0);
    p.bet_offsets.assign(t_len + 1, 0);
    for (std::size_t d = 0; d < t_len; ++d) {
        const double pos = v[source * t_len + d];
        const double f = returns.values(target, d);
        if (pos != 0.0) {
            p.gross[d] = 1.0;
            p.n_assets[d] = 1;
            if (!std::isnan(f)) p.daily[d] = pos * f;
        }
    }
    p.label = "edge=" + signals.assets[source] + "->" + signals.assets[target] + ";group=Q" + std::to_string(options.group);
    return p;
}

EdgeTests edge_tests(const Panel& signals, const ReturnsPanel& returns, const NetworkOptions& options) {
    const std::vector<double> v = positions(signals, returns, options);
    const auto n = static_cast<Eigen::Index>(signals.asset_count());
    const auto t_len = static_cast<Eigen::Index>(signals.day_count() - 1);

    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Map<const RowMatrix> pos(v.data(), n, t_len);
    const RowMatrix abs_pos = pos.cwiseAbs();
    RowMatrix f1(n, t_len);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index d = 0; d < t_len; ++d) {
            const double f = returns.values(static_cast<std::size_t>(j), static_cast<std::size_t>(d));
            f1(j, d) = std::isnan(f) ? 0.0 : f;
        }
    }
    const RowMatrix f2 = f1.cwiseProduct(f1);
    const RowMatrix f3 = f2.cwiseProduct(f1);
    const RowMatrix f4 = f2.cwiseProduct(f2);
    // Power sums of the edge P&L v_i f_j: v^odd = v and v^even = |v| since v is in {-1, 0, 1}.
    const Eigen::MatrixXd s1 = pos * f1.transpose();
    const Eigen::MatrixXd s2 = abs_pos * f2.transpose();
    const Eigen::MatrixXd s3 = pos * f3.transpose();
    const Eigen::MatrixXd s4 = abs_pos * f4.transpose();

    EdgeTests out;
    out.assets = signals.assets;
    out.group = options.group;
    out.p_values.assign(static_cast<std::size_t>(n * n), kNaN);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const Moments m = moments_from_sums(static_cast<std::size_t>(t_len), s1(i, j), s2(i, j), s3(i, j), s4(i, j));
            // Relative floor guards against cancellation leaving a tiny positive variance.
            if (!(m.sd > 1e-12 * std::sqrt(s2(i, j) / static_cast<double>(t_len)))) {
                ++out.zero_variance_edges;
                continue;
            }
            try {
                out.p_values[static_cast<std::size_t>(i * n + j)] = sr_test_from_moments(m, options.sr).p_value;
            } catch (const UndefinedStatisticError&) {
                ++out.zero_variance_edges;
            }
        }
    }
    return out;
}

std::size_t ImpactNetwork::edge_count() const {
    std::size_t e = 0;
    for (auto v : adjacency) e += v;
    return e;
}

ImpactNetwork threshold_network(const EdgeTests& tests, SignificanceLevel level) {
    ImpactNetwork net;
    net.assets = tests.assets;
    net.group = tests.group;
    net.level = level;
    net.zero_variance_edges = tests.zero_variance_edges;
    const double threshold = level_threshold(level, tests.assets.size());
    net.adjacency.resize(tests.p_values.size());
    for (std::size_t k = 0; k < tests.p_values.size(); ++k) {
        const double p = tests.p_values[k];
        net.adjacency[k] = !std::isnan(p) && p < threshold ? 1 : 0;
    }
    return net;
}

ImpactNetwork build_impact_network(const Panel& signals, const ReturnsPanel& returns, SignificanceLevel level,
                                   const NetworkOptions& options) {
    return threshold_network(edge_tests(signals, returns, options), level);
}

ErExpectation er_expectation(std::size_t n, std::size_t edges_total, std::size_t edges_nonself) {
    ErExpectation e;
    if (n == 0) return e;
    const double nn = static_cast<double>(n);
    e.self_loops = static_cast<double>(edges_total) / nn;
    if (n >= 2) {
        const double p = static_cast<double>(edges_nonself) / (nn * nn - nn);
        e.bidirected = nn * (nn - 1.0) / 2.0 * p * p;
    }
    return e;
}

DegreeStats motif_stats(const ImpactNetwork& net) {
    const std::size_t n = net.size();
    DegreeStats s;
    s.in_degree.assign(n, 0);
    s.out_degree.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!net.edge(i, j)) continue;
            ++s.edges;
            ++s.out_degree[i];
            ++s.in_degree[j];
            if (i == j) ++s.self_loops;
            else if (i < j && net.edge(j, i)) ++s.bidirected;
        }
    }
    s.density = n ? static_cast<double>(s.edges) / static_cast<double>(n * n) : 0.0;
    s.expected = er_expectation(n, s.edges, s.edges - s.self_loops);
    return s;
}

namespace {

BinomialDirection pairwise(const std::vector<std::size_t>& degree, std::size_t n, double alpha) {
    BinomialDirection r;
    const double nn = static_cast<double>(n);
    const double threshold = alpha / (nn * nn);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double pooled = static_cast<double>(degree[i] + degree[j]) / (2.0 * nn);
            if (pooled <= 0.0 || pooled >= 1.0) {
                ++r.skipped;
                continue;
            }
            ++r.tested;
            const double diff = (static_cast<double>(degree[i]) - static_cast<double>(degree[j])) / nn;
            const double z = diff / std::sqrt(pooled * (1.0 - pooled) / (2.0 * nn));
            if (normal_two_sided_p(z) < threshold) ++r.rejected;
        }
    }
    r.fraction_rejected = r.tested ? static_cast<double>(r.rejected) / static_cast<double>(r.tested) : 0.0;
    return r;
}

}  // namespace

BinomialDegreeResult binomial_degree_tests(const ImpactNetwork& net, double alpha) {
    const std::size_t n = net.size();
    if (n < 2) throw DimensionError("binomial degree tests need at least 2 nodes");
    const DegreeStats s = motif_stats(net);
    return BinomialDegreeResult{pairwise(s.in_degree, n, alpha), pairwise(s.out_degree, n, alpha)};
}

void write_edge_list_csv(std::ostream& out, const ImpactNetwork& net) {
    out << "src,dst\n";
    for (std::size_t i = 0; i < net.size(); ++i) {
        for (std::size_t j = 0; j < net.size(); ++j) {
            if (net.edge(i, j)) out << net.assets[i] << ',' << net.assets[j] << '\n';
        }
    }
}

}  // namespace ovi

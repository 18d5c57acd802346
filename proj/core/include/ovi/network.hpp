#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ovi/panel.hpp"
#include "ovi/portfolio.hpp"
#include "ovi/stats.hpp"

namespace ovi {

enum class SignificanceLevel : std::uint8_t { Uncorrected, RowBonferroni, FullBonferroni };

std::string_view to_code(SignificanceLevel level) noexcept;
std::optional<SignificanceLevel> significance_level_from_code(std::string_view code) noexcept;
/// 0.05, 0.05 / N or 0.05 / N^2.
[[nodiscard]] double level_threshold(SignificanceLevel level, std::size_t n, double alpha = 0.05) noexcept;

struct NetworkOptions {
    int group = 3;
    /// Rank signal magnitudes only among the network's assets (the panel rows). When false,
    /// `membership_signals` supplies the wider cross-section used for group membership.
    bool network_universe = true;
    const Panel* membership_signals = nullptr;
    SrTestOptions sr;
};

/// p-value of every ordered (source, target) pair; NaN where the edge P&L has zero variance.
struct EdgeTests {
    std::vector<std::string> assets;
    std::vector<double> p_values;  ///< source-major N x N
    std::size_t zero_variance_edges = 0;
    int group = 3;
};

/// PnL_{i,j,d} = 1{s_id in Q_group} sign(s_id) f_jd, length D - 1. NaN returns count as 0.
PnlSeries edge_pnl(const Panel& signals, const ReturnsPanel& returns, std::size_t source, std::size_t target,
                   const NetworkOptions& options = {});

EdgeTests edge_tests(const Panel& signals, const ReturnsPanel& returns, const NetworkOptions& options = {});

struct ImpactNetwork {
    std::vector<std::string> assets;
    std::vector<std::uint8_t> adjacency;  ///< source-major N x N
    int group = 3;
    SignificanceLevel level = SignificanceLevel::FullBonferroni;
    std::size_t zero_variance_edges = 0;

    [[nodiscard]] std::size_t size() const noexcept { return assets.size(); }
    [[nodiscard]] bool edge(std::size_t i, std::size_t j) const { return adjacency[i * assets.size() + j] != 0; }
    [[nodiscard]] std::size_t edge_count() const;
};

ImpactNetwork threshold_network(const EdgeTests& tests, SignificanceLevel level);
ImpactNetwork build_impact_network(const Panel& signals, const ReturnsPanel& returns, SignificanceLevel level,
                                   const NetworkOptions& options = {});

/// Erdos-Renyi expectations for a digraph with self-loops.
struct ErExpectation {
    double self_loops = 0.0;   ///< E / N
    double bidirected = 0.0;   ///< C(N,2) p^2, p = E_nonself / (N^2 - N)
};
ErExpectation er_expectation(std::size_t n, std::size_t edges_total, std::size_t edges_nonself);

struct DegreeStats {
    std::vector<std::size_t> in_degree;
    std::vector<std::size_t> out_degree;
    std::size_t edges = 0;
    std::size_t self_loops = 0;
    std::size_t bidirected = 0;  ///< unordered pairs i != j with both directions present
    double density = 0.0;        ///< E / N^2
    ErExpectation expected;
};

DegreeStats motif_stats(const ImpactNetwork& net);

struct BinomialDirection {
    std::size_t tested = 0;
    std::size_t rejected = 0;
    std::size_t skipped = 0;  ///< pooled proportion 0 or 1
    double fraction_rejected = 0.0;
};

struct BinomialDegreeResult {
    BinomialDirection in;
    BinomialDirection out;
};

/// Two-sample tests of equal edge density for all node pairs, per direction, with statistic
/// (p_i - p_j) / sqrt(p (1 - p) / (2N)), pooled p = (d_i + d_j) / (2N), at level alpha / N^2.
BinomialDegreeResult binomial_degree_tests(const ImpactNetwork& net, double alpha = 0.05);

void write_edge_list_csv(std::ostream& out, const ImpactNetwork& net);

}  // namespace ovi

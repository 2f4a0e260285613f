#include "imblab/metrics.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace imblab {

double variance_imbalance_nu(const DenseMatrix& sigma_a, const DenseMatrix& sigma_b,
                             std::span<const double> w) {
    if (norm2(w) == 0.0) throw std::invalid_argument("variance_imbalance_nu: zero direction");
    double num = quadratic_form(sigma_a, w);
    double den = quadratic_form(sigma_b, w);
    if (den <= 0.0)
        throw std::invalid_argument("variance_imbalance_nu: degenerate direction (zero denominator)");
    return num / den;
}

double mapped_variance(std::span<const double> w, const DenseMatrix& sigma) {
    if (norm2(w) == 0.0) throw std::invalid_argument("mapped_variance: zero direction");
    return quadratic_form(sigma, w);
}

double projected_variance(std::span<const double> w, const DenseMatrix& sigma) {
    double nrm2 = dot(w, w);
    if (nrm2 == 0.0) throw std::invalid_argument("projected_variance: zero direction");
    return quadratic_form(sigma, w) / nrm2;
}

DistanceStats distance_stats(const DenseMatrix& centers) {
    const std::size_t C = centers.rows();
    if (C < 2) throw std::invalid_argument("distance_stats: need at least two classes");
    DistanceStats out;
    out.delta = DenseMatrix(C, C);
    double sum = 0.0;
    for (std::size_t y = 0; y < C; ++y)
        for (std::size_t c = y + 1; c < C; ++c) {
            double dist = norm2(subtract(centers.row(y), centers.row(c)));
            out.delta(y, c) = dist;
            out.delta(c, y) = dist;
            sum += dist;
        }
    out.mean_distance = sum / (C * (C - 1) / 2.0);
    out.per_class_average.resize(C);
    for (std::size_t y = 0; y < C; ++y) {
        double s = 0.0;
        for (std::size_t c = 0; c < C; ++c)
            if (c != y) s += out.delta(y, c);
        out.per_class_average[y] = s / (C - 1);
    }
    return out;
}

double equidistance_penalty(const DenseMatrix& centers) {
    const std::size_t C = centers.rows();
    if (C < 2) throw std::invalid_argument("equidistance_penalty: need at least two classes");
    std::vector<double> sq;
    sq.reserve(C * (C - 1) / 2);
    for (std::size_t y = 0; y < C; ++y)
        for (std::size_t c = y + 1; c < C; ++c) {
            auto diff = subtract(centers.row(y), centers.row(c));
            sq.push_back(dot(diff, diff));
        }
    double u = 0.0;
    for (double v : sq) u += v;
    u *= 2.0 / (C * C - C);
    double penalty = 0.0;
    for (double v : sq) penalty += (v - u) * (v - u);
    return penalty;
}

LdiResult ldi(const Dataset& data) {
    if (!data.adjacency) throw std::invalid_argument("ldi: dataset has no adjacency");
    const std::size_t n = data.size();
    std::vector<int> total(n, 0), diff(n, 0);
    for (const auto& [a, b] : *data.adjacency) {
        if (a == b) {
            ++total[a];  // self-loop: one same-class neighbor
            continue;
        }
        ++total[a];
        ++total[b];
        if (data.labels[a] != data.labels[b]) {
            ++diff[a];
            ++diff[b];
        }
    }
    LdiResult out;
    out.per_node.resize(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (total[i] > 0) out.per_node[i] = static_cast<double>(diff[i]) / total[i];

    const int C = data.num_classes();
    out.per_class.assign(C, 0.0);
    std::vector<std::size_t> counts(C, 0);
    for (std::size_t i = 0; i < n; ++i) {
        out.per_class[data.labels[i]] += out.per_node[i];
        ++counts[data.labels[i]];
    }
    for (int c = 0; c < C; ++c)
        if (counts[c] > 0) out.per_class[c] /= static_cast<double>(counts[c]);
    return out;
}

ImbalanceReport report(const std::vector<ClassStats>& stats,
                       const std::vector<std::vector<double>>* pair_directions) {
    const std::size_t C = stats.size();
    if (C < 2) throw std::invalid_argument("report: need at least two classes");
    const std::size_t d = stats[0].mean.size();

    ImbalanceReport rep;
    rep.proportions.resize(C);
    DenseMatrix centers(C, d);
    for (std::size_t c = 0; c < C; ++c) {
        rep.proportions[c] = stats[c].proportion;
        for (std::size_t j = 0; j < d; ++j) centers(c, j) = stats[c].mean[j];
    }
    rep.distances = distance_stats(centers);
    rep.equidistance = equidistance_penalty(centers);

    rep.variance_nu = DenseMatrix(C, C);
    rep.mapped_var = DenseMatrix(C, C);
    rep.projected_var = DenseMatrix(C, C);
    std::size_t pair_idx = 0;
    for (std::size_t y = 0; y < C; ++y)
        for (std::size_t c = 0; c < C; ++c) {
            if (y == c) continue;
            std::vector<double> w;
            if (pair_directions) {
                w = (*pair_directions)[pair_idx++];
            } else {
                w = subtract(stats[y].mean, stats[c].mean);
            }
            rep.variance_nu(y, c) = variance_imbalance_nu(stats[y].cov, stats[c].cov, w);
            rep.mapped_var(y, c) = mapped_variance(w, stats[y].cov);
            rep.projected_var(y, c) = projected_variance(w, stats[y].cov);
        }
    return rep;
}

ImbalanceReport report(const Dataset& data) {
    if (data.num_classes() < 2)
        throw std::invalid_argument("report: dataset must contain at least two classes");
    ImbalanceReport rep = report(estimate_class_stats(data));
    if (data.adjacency) rep.ldi = ldi(data);
    return rep;
}

namespace {
nlohmann::json matrix_to_json(const DenseMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}
}  // namespace

void write_report_json(std::ostream& os, const ImbalanceReport& rep) {
    nlohmann::json j;
    j["schema"] = "imblab-report-v1";
    j["proportions"] = rep.proportions;
    j["variance_nu"] = matrix_to_json(rep.variance_nu);
    j["mapped_var"] = matrix_to_json(rep.mapped_var);
    j["projected_var"] = matrix_to_json(rep.projected_var);
    j["distance"] = matrix_to_json(rep.distances.delta);
    j["mean_distance"] = rep.distances.mean_distance;
    j["per_class_avg_distance"] = rep.distances.per_class_average;
    j["equidistance_penalty"] = rep.equidistance;
    if (rep.ldi) {
        j["ldi_per_class"] = rep.ldi->per_class;
        j["ldi_per_node"] = rep.ldi->per_node;
    }
    os << j.dump(2) << "\n";
}

void write_report_csv(std::ostream& os, const ImbalanceReport& rep) {
    os << "# imblab csv v1 report\n";
    os << "y,c,pi_y,pi_c,nu,mapped_var,projected_var,distance,log_mean_over_distance\n";
    const std::size_t C = rep.proportions.size();
    for (std::size_t y = 0; y < C; ++y)
        for (std::size_t c = 0; c < C; ++c) {
            if (y == c) continue;
            os << y << "," << c << "," << rep.proportions[y] << "," << rep.proportions[c] << ","
               << rep.variance_nu(y, c) << "," << rep.mapped_var(y, c) << ","
               << rep.projected_var(y, c) << "," << rep.distances.delta(y, c) << ","
               << std::log(rep.distances.mean_distance / rep.distances.delta(y, c)) << "\n";
        }
}

}  // namespace imblab

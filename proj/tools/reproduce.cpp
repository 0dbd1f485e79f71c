// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#include "reproduce.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "otgof/calibration.hpp"
#include "otgof/csv.hpp"
#include "otgof/distributions.hpp"
#include "otgof/error.hpp"
#include "otgof/hypotests.hpp"
#include "otgof/kernels.hpp"
#include "otgof/lowdisc.hpp"
#include "otgof/rng.hpp"

namespace otgof::cli {
namespace {

constexpr int kDimension = 2;
constexpr double kAlpha = 0.05;
constexpr std::array<std::size_t, 3> kSampleSizes = {20, 50, 80};
constexpr std::array<std::string_view, 4> kTables = {"crit", "level-power", "composite",
                                                     "warp"};

// Per-cell seeds hash the cell label, so a cell gets the same draws in every
// budget and regardless of which other cells run.
std::uint64_t cell_seed(std::uint64_t seed, const std::string& label) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : label) h = (h ^ c) * 1099511628211ULL;
  return splitmix64(seed ^ splitmix64(h));
}

std::string percent(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * rate);
  return buf;
}

std::string fixed4(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  return buf;
}

std::vector<Kernel> stable_kernels(std::span<const double> scales) {
  std::vector<Kernel> out;
  for (const double a : scales) out.push_back(stable_kernel(a, 2.0));
  return out;
}

Matrix cov2(double s11, double s12, double s22) {
  Matrix m(2, 2);
  m << s11, s12, s12, s22;
  return m;
}

struct Distribution {
  std::string name;
  Sampler sampler;
};

Distribution standard_normal() {
  return {"N2(0;I)", mvnormal_sampler({Vector::Zero(2), Matrix::Identity(2, 2)})};
}
Distribution shifted_normal(const std::string& name, const Matrix& cov) {
  return {name, mvnormal_sampler({Vector::Ones(2), cov})};
}
Distribution uniform_square(double half) {
  const std::string h = format_double(half);
  return {"U(-" + h + ";" + h + ")^2", uniform_box_sampler(-half, half, kDimension)};
}
Distribution student_t3() {
  return {"T2(0;I;3)", mvt_sampler({Vector::Zero(2), Matrix::Identity(2, 2), 3.0})};
}

void legend(std::ostream& out) {
  out << "# distributions: N2(mu;S) bivariate normal, U(-h;h)^2 uniform square, "
         "T2(0;I;3) bivariate t with 3 df; S21 = [[2,1],[1,1]], S10.3 = [[10,3],[3,1]]\n";
}

// The stable weight with gamma = 2 is the N(0, 2a^2 I) density, so a fixed box
// [-8, 8]^2 drops a growing share of its mass once a > 2 (about 30% at a = 4).
// Widening the box with a keeps the truncation at the a = 2 level.
double crit_half_width(double scale) { return std::max(8.0, 4.0 * scale); }

void crit_table(Budget budget, std::uint64_t seed, std::ostream& out, std::ostream& log) {
  const std::size_t mc_reps = budget == Budget::Desk ? 2000 : 10000;
  AsymptoticConfig asym;
  asym.cells = budget == Budget::Desk ? 1600 : 8000;
  asym.replications = budget == Budget::Desk ? 10000 : 40000;
  const std::array<double, 5> scales = {0.5, 1.0, 2.0, 3.0, 4.0};
  const std::array<std::size_t, 2> ref_sizes = {200, 500};
  const auto kernels = stable_kernels(scales);

  out << "# otgof reproduce crit budget=" << to_string(budget) << " seed=" << seed << '\n';
  out << "# critical values at alpha=" << format_double(kAlpha) << ", p=" << kDimension
      << ", stable weight with gamma=2\n";
  out << "# asymptotic: " << asym.spec() << " B=" << asym.replications
      << " (K = max(8, 4a))"
      << "; finite sample: " << mc_reps << " Monte-Carlo replications\n";
  out << "grid,a,asymptotic";
  for (const auto m : ref_sizes) {
    for (const auto n : kSampleSizes) out << ",m" << m << "_n" << n;
  }
  out << '\n';

  for (const GridKind kind : {GridKind::Rectangular, GridKind::Spherical}) {
    const std::string kname(to_string(kind));
    std::vector<std::vector<std::string>> rows(kernels.size());
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      AsymptoticConfig cfg = asym;
      cfg.half_width = crit_half_width(scales[k]);
      const LimitingProcess process(kind, kDimension, cfg);
      const std::string label = "crit/asym/" + kname + "/" + format_double(scales[k]);
      const auto draws = process.integrals(std::span(&kernels[k], 1), cfg.replications,
                                           cell_seed(seed, label));
      rows[k].push_back(fixed4(EmpiricalDistribution(draws.front()).critical_value(kAlpha)));
    }
    log << "crit " << kname << " asymptotic done\n";
    for (const auto m : ref_sizes) {
      for (const auto n : kSampleSizes) {
        const Grid grid = make_grid(kind, kDimension, n + m);
        for (std::size_t k = 0; k < kernels.size(); ++k) {
          const std::string label = "crit/mc/" + kname + "/" + std::to_string(n) + "/" +
                                    std::to_string(m) + "/" + format_double(scales[k]);
          const auto entry = mc_critical_value(grid, n, m, kernels[k], kAlpha, mc_reps,
                                               cell_seed(seed, label));
          rows[k].push_back(fixed4(entry.value));
        }
        log << "crit " << kname << " n=" << n << " m=" << m << " done\n";
      }
    }
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      out << kname << ',' << format_double(scales[k]);
      for (const auto& cell : rows[k]) out << ',' << cell;
      out << '\n';
    }
  }
}

void level_power_table(Budget budget, std::uint64_t seed, std::ostream& out,
                       std::ostream& log) {
  const std::size_t calibration_reps = 10000;
  const std::size_t level_reps = 1000;
  const std::size_t power_reps = budget == Budget::Desk ? 200 : 1000;
  const std::array<double, 5> scales = {0.5, 1.0, 2.0, 3.0, 4.0};
  const std::array<std::size_t, 2> ref_sizes = {200, 500};
  const std::array<GridKind, 2> kinds = {GridKind::Rectangular, GridKind::Spherical};
  const auto kernels = stable_kernels(scales);
  const Distribution null = standard_normal();
  const std::vector<Distribution> data = {null, uniform_square(1.0), uniform_square(2.0),
                                          student_t3()};

  // rates[(dist, m, kind, n)][kernel]
  std::map<std::tuple<std::size_t, std::size_t, GridKind, std::size_t>, std::vector<double>>
      rates;
  for (const auto m : ref_sizes) {
    for (const GridKind kind : kinds) {
      const std::string kname(to_string(kind));
      for (const auto n : kSampleSizes) {
        const Grid grid = make_grid(kind, kDimension, n + m);
        const std::string cell = kname + "/" + std::to_string(n) + "/" + std::to_string(m);
        std::vector<double> crit;
        for (std::size_t k = 0; k < kernels.size(); ++k) {
          crit.push_back(mc_critical_value(grid, n, m, kernels[k], kAlpha, calibration_reps,
                                           cell_seed(seed, "lp/crit/" + cell + "/" +
                                                               format_double(scales[k])))
                             .value);
        }
        for (std::size_t d = 0; d < data.size(); ++d) {
          const std::size_t reps = d == 0 ? level_reps : power_reps;
          rates[{d, m, kind, n}] = simple_rejection_rates(
              data[d].sampler, null.sampler, n, m, kind, kDimension, kernels, crit, reps,
              cell_seed(seed, "lp/rate/" + data[d].name + "/" + cell));
          log << "level-power " << data[d].name << ' ' << kname << " n=" << n << " m=" << m
              << " done\n";
        }
      }
    }
  }

  out << "# otgof reproduce level-power budget=" << to_string(budget) << " seed=" << seed
      << '\n';
  out << "# rejection rates (%) of the simple test of N2(0;I) at alpha="
      << format_double(kAlpha) << ", stable weight with gamma=2\n";
  out << "# replications: " << level_reps << " under the null, " << power_reps
      << " under alternatives; critical values from " << calibration_reps
      << " Monte-Carlo replications\n";
  legend(out);
  out << "distribution,m,a";
  for (const GridKind kind : kinds) {
    for (const auto n : kSampleSizes) out << ',' << (kind == GridKind::Rectangular ? "R" : "S")
                                          << "_n" << n;
  }
  out << '\n';
  for (std::size_t d = 0; d < data.size(); ++d) {
    for (const auto m : ref_sizes) {
      for (std::size_t k = 0; k < kernels.size(); ++k) {
        out << data[d].name << ',' << m << ',' << format_double(scales[k]);
        for (const GridKind kind : kinds) {
          for (const auto n : kSampleSizes) out << ',' << percent(rates[{d, m, kind, n}][k]);
        }
        out << '\n';
      }
    }
  }
}

void composite_table(Budget budget, std::uint64_t seed, std::ostream& out,
                     std::ostream& log) {
  const std::size_t calibration_reps = budget == Budget::Desk ? 1000 : 10000;
  const std::size_t reps = budget == Budget::Desk ? 200 : 1000;
  const std::vector<std::size_t> ref_sizes =
      budget == Budget::Desk ? std::vector<std::size_t>{200} : std::vector<std::size_t>{200, 1000};
  const std::array<double, 7> scales = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5};
  const auto kernels = stable_kernels(scales);
  const Distribution null = standard_normal();
  const std::vector<Distribution> data = {null, shifted_normal("N2(1;S21)", cov2(2, 1, 1)),
                                          uniform_square(1.0), student_t3()};

  out << "# otgof reproduce composite budget=" << to_string(budget) << " seed=" << seed
      << '\n';
  out << "# rejection rates (%) of the normality test, spherical ranks, alpha="
      << format_double(kAlpha) << ", stable weight with gamma=2\n";
  out << "# reference: R = random sample from the fitted normal, G = transformed grid points\n";
  out << "# fixed critical values: (1-alpha) quantile of the statistic over "
      << calibration_reps << " N2(0;I) data sets; " << reps << " replications per cell\n";
  legend(out);
  out << "reference,m,a,distribution";
  for (const auto n : kSampleSizes) out << ",n" << n;
  out << '\n';

  for (const ReferenceMode mode : {ReferenceMode::RandomSample, ReferenceMode::GridPoints}) {
    const std::string mname = mode == ReferenceMode::RandomSample ? "R" : "G";
    for (const auto m : ref_sizes) {
      // rates[dist][kernel][n index]
      std::vector<std::vector<std::vector<double>>> rates(
          data.size(), std::vector<std::vector<double>>(kernels.size()));
      for (const auto n : kSampleSizes) {
        CompositeTestSpec spec;
        spec.family = make_normal_family();
        spec.n = n;
        spec.m = m;
        spec.grid_kind = GridKind::Spherical;
        spec.alpha = kAlpha;
        spec.reference_mode = mode;
        const std::string cell = mname + "/" + std::to_string(n) + "/" + std::to_string(m);
        const auto calibration = composite_statistic_samples(
            null.sampler, spec, kernels, calibration_reps, cell_seed(seed, "comp/crit/" + cell));
        std::vector<double> crit;
        for (const auto& sample : calibration) {
          crit.push_back(EmpiricalDistribution(sample).critical_value(kAlpha));
        }
        for (std::size_t d = 0; d < data.size(); ++d) {
          const auto values = composite_statistic_samples(
              data[d].sampler, spec, kernels, reps,
              cell_seed(seed, "comp/rate/" + data[d].name + "/" + cell));
          for (std::size_t k = 0; k < kernels.size(); ++k) {
            std::size_t rejected = 0;
            for (const double v : values[k]) rejected += v > crit[k] ? 1 : 0;
            rates[d][k].push_back(static_cast<double>(rejected) / static_cast<double>(reps));
          }
          log << "composite " << mname << ' ' << data[d].name << " n=" << n << " m=" << m
              << " done\n";
        }
      }
      for (std::size_t k = 0; k < kernels.size(); ++k) {
        for (std::size_t d = 0; d < data.size(); ++d) {
          out << mname << ',' << m << ',' << format_double(scales[k]) << ',' << data[d].name;
          for (const double r : rates[d][k]) out << ',' << percent(r);
          out << '\n';
        }
      }
    }
  }
}

void warp_table(Budget budget, std::uint64_t seed, std::ostream& out, std::ostream& log) {
  const std::size_t reps = budget == Budget::Desk ? 500 : 1000;
  const std::vector<std::size_t> ref_sizes =
      budget == Budget::Desk ? std::vector<std::size_t>{200} : std::vector<std::size_t>{200, 1000};
  const std::array<double, 3> scales = {2.0, 2.5, 3.0};
  const auto kernels = stable_kernels(scales);
  const std::vector<Distribution> data = {shifted_normal("N2(1;S21)", cov2(2, 1, 1)),
                                          shifted_normal("N2(1;S10.3)", cov2(10, 3, 1)),
                                          uniform_square(1.0), student_t3()};

  out << "# otgof reproduce warp budget=" << to_string(budget) << " seed=" << seed << '\n';
  out << "# rejection rates (%) of the normality test, spherical ranks, transformed grid "
         "reference, alpha="
      << format_double(kAlpha) << ", stable weight with gamma=2\n";
  out << "# warp-speed bootstrap: one bootstrap statistic per replication, " << reps
      << " replications per cell\n";
  legend(out);
  out << "m,a,distribution";
  for (const auto n : kSampleSizes) out << ",n" << n;
  out << '\n';

  for (const auto m : ref_sizes) {
    std::vector<std::vector<std::vector<double>>> rates(
        data.size(), std::vector<std::vector<double>>(kernels.size()));
    for (std::size_t d = 0; d < data.size(); ++d) {
      for (const auto n : kSampleSizes) {
        CompositeTestSpec spec;
        spec.family = make_normal_family();
        spec.n = n;
        spec.m = m;
        spec.grid_kind = GridKind::Spherical;
        spec.alpha = kAlpha;
        spec.reference_mode = ReferenceMode::GridPoints;
        const auto results = warp_speed_studies(
            data[d].sampler, spec, kernels, reps,
            cell_seed(seed, "warp/" + data[d].name + "/" + std::to_string(n) + "/" +
                                std::to_string(m)));
        for (std::size_t k = 0; k < kernels.size(); ++k) {
          rates[d][k].push_back(results[k].rejection_rate);
        }
        log << "warp " << data[d].name << " n=" << n << " m=" << m << " done\n";
      }
    }
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      for (std::size_t d = 0; d < data.size(); ++d) {
        out << m << ',' << format_double(scales[k]) << ',' << data[d].name;
        for (const double r : rates[d][k]) out << ',' << percent(r);
        out << '\n';
      }
    }
  }
}

}  // namespace

Budget parse_budget(std::string_view text) {
  if (text == "desk") return Budget::Desk;
  if (text == "full") return Budget::Full;
  throw ConfigError("unknown budget '" + std::string(text) + "' (expected desk or full)");
}

std::string_view to_string(Budget budget) {
  return budget == Budget::Desk ? "desk" : "full";
}

std::span<const std::string_view> reproducible_tables() { return kTables; }

void reproduce_table(std::string_view table, Budget budget, std::uint64_t seed,
                     std::ostream& out, std::ostream& log) {
  if (table == "crit") {
    crit_table(budget, seed, out, log);
  } else if (table == "level-power") {
    level_power_table(budget, seed, out, log);
  } else if (table == "composite") {
    composite_table(budget, seed, out, log);
  } else if (table == "warp") {
    warp_table(budget, seed, out, log);
  } else {
    throw ConfigError("unknown table '" + std::string(table) +
                      "' (expected crit, level-power, composite or warp)");
  }
}

}  // namespace otgof::cli

#include "had/scdt.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "had/parallel.hpp"

namespace had {

bool CdtProfile::non_decreasing() const {
  for (std::size_t i = 1; i < quantiles.size(); ++i) {
    if (quantiles[i] < quantiles[i - 1]) return false;
  }
  return true;
}

std::vector<double> ScdtVector::flatten(double mass_weight) const {
  std::vector<double> out(flat_length(grid_size()));
  flatten_into(out, mass_weight);
  return out;
}

void ScdtVector::flatten_into(std::span<double> out, double mass_weight) const {
  const std::size_t m = grid_size();
  require(out.size() == flat_length(m), Errc::LengthMismatch,
          "flatten target has wrong length");
  std::copy(pos_quantiles.quantiles.begin(), pos_quantiles.quantiles.end(), out.begin());
  out[m] = pos_mass * mass_weight;
  std::copy(neg_quantiles.quantiles.begin(), neg_quantiles.quantiles.end(),
            out.begin() + static_cast<std::ptrdiff_t>(m) + 1);
  out[2 * m + 1] = neg_mass * mass_weight;
}

namespace {

// Normalized cumulative bin masses; returns the total quadrature mass.
double cumulative_bins(const SpectralSignal& s, std::vector<double>& cdf) {
  const double h = s.bin_width();
  cdf.resize(s.values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    total += s.values[i] * h;
    cdf[i] = total;
  }
  return total;
}

}  // namespace

CdtProfile cdt_forward(const SpectralSignal& s, std::size_t grid_size) {
  require(grid_size >= 2, Errc::BadGrid,
          "quantile grid needs at least 2 points, got " + std::to_string(grid_size));
  s.validate();
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    if (s.values[i] < 0.0) {
      fail(Errc::NegativeInput, "negative value at band " + std::to_string(i));
    }
  }

  std::vector<double> cdf;
  const double total = cumulative_bins(s, cdf);
  require(total >= mass_epsilon(s.domain), Errc::DegenerateMass,
          "total mass " + std::to_string(total) + " below epsilon");
  for (double& c : cdf) c /= total;
  cdf.back() = 1.0;

  const double h = s.bin_width();
  CdtProfile out;
  out.quantiles.resize(grid_size);
  std::size_t bin = 0;
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double y = (static_cast<double>(j) + 0.5) / static_cast<double>(grid_size);
    while (cdf[bin] < y) ++bin;  // first bin whose cumulative reaches y
    const double left = (bin == 0) ? 0.0 : cdf[bin - 1];
    const double p = cdf[bin] - left;
    double frac = (p > 0.0) ? (y - left) / p : 0.0;
    frac = std::clamp(frac, 0.0, 1.0);
    out.quantiles[j] = s.domain.lo + h * (static_cast<double>(bin) + frac);
  }
  return out;
}

ScdtVector scdt_forward(const SpectralSignal& s, std::size_t grid_size) {
  require(grid_size >= 2, Errc::BadGrid,
          "quantile grid needs at least 2 points, got " + std::to_string(grid_size));
  s.validate();

  SpectralSignal pos{std::vector<double>(s.values.size()), s.domain};
  SpectralSignal neg{std::vector<double>(s.values.size()), s.domain};
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    pos.values[i] = s.values[i] > 0.0 ? s.values[i] : 0.0;
    neg.values[i] = s.values[i] < 0.0 ? -s.values[i] : 0.0;
  }

  const double h = s.bin_width();
  double pos_mass = 0.0;
  double neg_mass = 0.0;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    pos_mass += pos.values[i] * h;
    neg_mass += neg.values[i] * h;
  }

  const double eps = mass_epsilon(s.domain);
  ScdtVector out;
  if (pos_mass >= eps) {
    out.pos_quantiles = cdt_forward(pos, grid_size);
    out.pos_mass = pos_mass;
  } else {
    out.pos_quantiles.quantiles.assign(grid_size, 0.0);
    out.pos_mass = 0.0;
  }
  if (neg_mass >= eps) {
    out.neg_quantiles = cdt_forward(neg, grid_size);
    out.neg_mass = neg_mass;
  } else {
    out.neg_quantiles.quantiles.assign(grid_size, 0.0);
    out.neg_mass = 0.0;
  }
  return out;
}

SpectralSignal cdt_inverse(const CdtProfile& profile, double mass, std::size_t out_bins,
                           Interval domain) {
  require(out_bins >= 2, Errc::BadGrid, "need at least 2 output bins");
  require(domain.width() > 0.0, Errc::InvalidArgument, "domain has non-positive width");
  require(mass >= 0.0, Errc::InvalidArgument, "mass must be non-negative");
  for (std::size_t i = 1; i < profile.quantiles.size(); ++i) {
    if (profile.quantiles[i] < profile.quantiles[i - 1]) {
      fail(Errc::BadProfile, "decreasing quantile at index " + std::to_string(i));
    }
  }

  SpectralSignal out{std::vector<double>(out_bins, 0.0), domain};
  if (mass < mass_epsilon(domain) || profile.quantiles.empty()) return out;

  // Each quantile sample carries mass/M, deposited as a box kernel whose
  // half-width is half the smaller adjacent spacing. Sparse low-density
  // stretches fill in smoothly because the kernel tracks the local
  // spacing, while mass next to a wide support gap stays on its own side
  // instead of being smeared across.
  const std::size_t m = profile.quantiles.size();
  const double h = out.bin_width();
  const double w = mass / static_cast<double>(m);
  const auto bin_of = [&](double x) {
    std::ptrdiff_t b = static_cast<std::ptrdiff_t>(std::floor((x - domain.lo) / h));
    return static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(out_bins) - 1));
  };
  const auto deposit = [&](double a, double b, double weight) {
    a = std::clamp(a, domain.lo, domain.hi);
    b = std::clamp(b, domain.lo, domain.hi);
    if (!(b > a)) {  // repeated quantiles: a point mass
      out.values[bin_of(a)] += weight / h;
      return;
    }
    const double density = weight / (b - a);
    const std::size_t first = bin_of(a);
    const std::size_t last = bin_of(b);
    for (std::size_t k = first; k <= last; ++k) {
      const double left = domain.lo + h * static_cast<double>(k);
      const double right = left + h;
      const double overlap = std::min(b, right) - std::max(a, left);
      if (overlap > 0.0) out.values[k] += density * overlap / h;
    }
  };
  for (std::size_t j = 0; j < m; ++j) {
    const double q = profile.quantiles[j];
    const double gap_left = j > 0 ? q - profile.quantiles[j - 1]
                                  : (m > 1 ? profile.quantiles[1] - q : 0.0);
    const double gap_right = j + 1 < m ? profile.quantiles[j + 1] - q : gap_left;
    const double use_left = j > 0 ? gap_left : gap_right;
    const double radius = 0.5 * std::min(use_left, gap_right);
    deposit(q - radius, q + radius, w);
  }
  return out;
}

namespace {

// Signed cumulative of a piecewise-constant signal evaluated at an
// arbitrary domain position (clamped); exact up to rounding.
class SignedCumulative {
 public:
  explicit SignedCumulative(const SpectralSignal& s)
      : domain_(s.domain), h_(s.bin_width()), prefix_(s.values.size() + 1, 0.0),
        values_(&s.values) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      prefix_[i + 1] = prefix_[i] + s.values[i];
    }
  }

  double at(double x) const {
    if (x <= domain_.lo) return 0.0;
    if (x >= domain_.hi) return h_ * prefix_.back();
    double u = (x - domain_.lo) / h_;
    std::size_t bin = static_cast<std::size_t>(u);
    if (bin >= values_->size()) bin = values_->size() - 1;
    const double frac = u - static_cast<double>(bin);
    return h_ * (prefix_[bin] + frac * (*values_)[bin]);
  }

 private:
  Interval domain_;
  double h_;
  std::vector<double> prefix_;
  const std::vector<double>* values_;
};

}  // namespace

SpectralSignal apply_deformation(const SpectralSignal& s, const MonotoneMap& g_inverse) {
  s.validate();
  g_inverse.require_increasing("deformation");

  const std::size_t d = s.values.size();
  const double h = s.bin_width();
  SignedCumulative cum(s);

  // Bin mass of the warped signal over [a, b] equals the cumulative of s
  // between g(a) and g(b); g is recovered from the table by inversion.
  SpectralSignal out{std::vector<double>(d, 0.0), s.domain};
  double prev = cum.at(g_inverse.inverse_at(s.domain.lo));
  for (std::size_t e = 0; e < d; ++e) {
    const double edge =
        (e + 1 == d) ? s.domain.hi : s.domain.lo + h * static_cast<double>(e + 1);
    const double next = cum.at(g_inverse.inverse_at(edge));
    out.values[e] = (next - prev) / h;
    prev = next;
  }
  return out;
}

ScdtVector compose_in_scdt(const ScdtVector& v, const MonotoneMap& g_inverse) {
  g_inverse.require_increasing("composition");
  ScdtVector out = v;
  if (v.pos_mass > 0.0) {
    for (double& q : out.pos_quantiles.quantiles) q = g_inverse(q);
  }
  if (v.neg_mass > 0.0) {
    for (double& q : out.neg_quantiles.quantiles) q = g_inverse(q);
  }
  return out;
}

DataMatrix transform_cube(const HsiCube& cube, std::size_t grid_size, double mass_weight) {
  require(grid_size >= 2, Errc::BadGrid, "quantile grid needs at least 2 points");
  validate_cube(cube);

  const std::size_t n = cube.pixel_count();
  DataMatrix out(n, ScdtVector::flat_length(grid_size));

  std::exception_ptr first_error = nullptr;
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for num_threads(par::thread_count()) schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      SpectralSignal s;
      s.domain = cube.band_domain;
      const auto span = cube.pixel_span(static_cast<std::size_t>(i));
      s.values.assign(span.begin(), span.end());
      const ScdtVector v = scdt_forward(s, grid_size);
      v.flatten_into(out.row(static_cast<std::size_t>(i)), mass_weight);
    } catch (...) {
#pragma omp critical
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace had

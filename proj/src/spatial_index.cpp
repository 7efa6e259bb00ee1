#include "checkin/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

namespace checkin {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Smallest great-circle distance from a point at latitude `lat` to any point
// whose longitude differs by at least `gap_deg`.
double lon_gap_bound_m(double lat, double gap_deg) {
  const double g = std::min(gap_deg, 90.0) * kDegToRad;
  const double s = std::clamp(std::cos(lat * kDegToRad) * std::sin(g), 0.0, 1.0);
  return geo::kEarthRadiusM * std::asin(s);
}

}  // namespace

VenueIndex::VenueIndex(std::vector<IndexedVenue> venues, double cell_deg)
    : venues_(std::move(venues)) {
  std::sort(venues_.begin(), venues_.end(),
            [](const IndexedVenue& a, const IndexedVenue& b) { return a.id < b.id; });
  if (venues_.empty()) return;

  double min_lat = 90.0, max_lat = -90.0, min_lon = 180.0, max_lon = -180.0;
  for (const auto& v : venues_) {
    min_lat = std::min(min_lat, v.location.lat);
    max_lat = std::max(max_lat, v.location.lat);
    min_lon = std::min(min_lon, v.location.lon);
    max_lon = std::max(max_lon, v.location.lon);
  }
  const double lat_span = std::max(max_lat - min_lat, 1e-6);
  const double lon_span = std::max(max_lon - min_lon, 1e-6);
  const double max_cells = 4.0 * static_cast<double>(venues_.size()) + 16.0;
  if (cell_deg <= 0.0) {
    const double target_cells = std::max(1.0, static_cast<double>(venues_.size()) / 4.0);
    cell_deg = std::sqrt(lat_span * lon_span / target_cells);
  }
  cell_deg = std::max(cell_deg, 1e-5);
  while ((lat_span / cell_deg + 1.0) * (lon_span / cell_deg + 1.0) > max_cells) cell_deg *= 1.5;

  cell_deg_ = cell_deg;
  lat0_ = min_lat;
  lon0_ = min_lon;
  rows_ = static_cast<long>(std::floor(lat_span / cell_deg_)) + 1;
  cols_ = static_cast<long>(std::floor(lon_span / cell_deg_)) + 1;

  const auto cells = static_cast<std::size_t>(rows_ * cols_);
  std::vector<std::uint32_t> counts(cells + 1, 0);
  std::vector<std::size_t> cell_of(venues_.size());
  for (std::size_t i = 0; i < venues_.size(); ++i) {
    const long r = std::clamp(row_of(venues_[i].location.lat), 0L, rows_ - 1);
    const long c = std::clamp(col_of(venues_[i].location.lon), 0L, cols_ - 1);
    cell_of[i] = static_cast<std::size_t>(r * cols_ + c);
    ++counts[cell_of[i] + 1];
  }
  for (std::size_t i = 1; i <= cells; ++i) counts[i] += counts[i - 1];
  cell_start_ = counts;
  cell_items_.resize(venues_.size());
  std::vector<std::uint32_t> fill(counts.begin(), counts.end() - 1);
  for (std::size_t i = 0; i < venues_.size(); ++i) {
    cell_items_[fill[cell_of[i]]++] = static_cast<std::uint32_t>(i);
  }
}

long VenueIndex::row_of(double lat) const {
  return static_cast<long>(std::floor((lat - lat0_) / cell_deg_));
}

long VenueIndex::col_of(double lon) const {
  return static_cast<long>(std::floor((lon - lon0_) / cell_deg_));
}

template <class Fn>
void VenueIndex::for_cell(long row, long col, Fn&& fn) const {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_) return;
  const auto cell = static_cast<std::size_t>(row * cols_ + col);
  for (std::uint32_t k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) {
    fn(venues_[cell_items_[k]]);
  }
}

std::optional<VenueId> VenueIndex::nearest(geo::GeoPoint target) const {
  if (venues_.empty()) return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  std::optional<VenueId> best_id;
  auto consider = [&](const IndexedVenue& v) {
    const double d = geo::haversine_m(target, v.location);
    if (d < best || (d == best && v.id < *best_id)) {
      best = d;
      best_id = v.id;
    }
  };

  const long r0 = row_of(target.lat);
  const long c0 = col_of(target.lon);
  if (r0 < 0 || r0 >= rows_ || c0 < 0 || c0 >= cols_) {
    // Outside the grid the ring search degenerates; scan everything.
    for (const auto& v : venues_) consider(v);
    return best_id;
  }
  for (long k = 0;; ++k) {
    if (k == 0) {
      for_cell(r0, c0, consider);
    } else {
      for (long c = c0 - k; c <= c0 + k; ++c) {
        for_cell(r0 - k, c, consider);
        for_cell(r0 + k, c, consider);
      }
      for (long r = r0 - k + 1; r <= r0 + k - 1; ++r) {
        for_cell(r, c0 - k, consider);
        for_cell(r, c0 + k, consider);
      }
    }
    const bool covers_grid = r0 - k <= 0 && r0 + k >= rows_ - 1 && c0 - k <= 0 &&
                             c0 + k >= cols_ - 1;
    if (covers_grid) break;
    if (best_id) {
      // Anything unsearched lies outside this block of cells.
      const double lat_lo = lat0_ + static_cast<double>(r0 - k) * cell_deg_;
      const double lat_hi = lat0_ + static_cast<double>(r0 + k + 1) * cell_deg_;
      const double lon_lo = std::max(lon0_ + static_cast<double>(c0 - k) * cell_deg_, -180.0);
      const double lon_hi = std::min(lon0_ + static_cast<double>(c0 + k + 1) * cell_deg_, 180.0);
      const double lat_gap = std::max(0.0, std::min(target.lat - lat_lo, lat_hi - target.lat));
      const double lon_gap = std::max(0.0, std::min(target.lon - lon_lo, lon_hi - target.lon));
      const double bound = std::min(lat_gap * kDegToRad * geo::kEarthRadiusM,
                                    lon_gap_bound_m(target.lat, lon_gap));
      if (best < bound) break;
    }
  }
  return best_id;
}

std::vector<VenueId> VenueIndex::within(geo::GeoPoint center, double radius_m) const {
  std::vector<std::pair<double, VenueId>> hits;
  if (venues_.empty() || !(radius_m >= 0.0)) return {};
  auto consider = [&](const IndexedVenue& v) {
    const double d = geo::haversine_m(center, v.location);
    if (d <= radius_m) hits.emplace_back(d, v.id);
  };
  const double dlat = radius_m / geo::meters_per_degree();
  const double max_abs_lat = std::min(90.0, std::abs(center.lat) + dlat);
  const double cos_lat = std::cos(max_abs_lat * kDegToRad);
  if (max_abs_lat >= 89.0 || cos_lat <= 0.0 || dlat / cos_lat >= 180.0) {
    for (const auto& v : venues_) consider(v);
  } else {
    const double dlon = dlat / cos_lat;
    const long r_lo = std::max(row_of(center.lat - dlat), 0L);
    const long r_hi = std::min(row_of(center.lat + dlat), rows_ - 1);
    auto scan_cols = [&](double lon_lo, double lon_hi) {
      const long c_lo = std::max(col_of(lon_lo), 0L);
      const long c_hi = std::min(col_of(lon_hi), cols_ - 1);
      for (long r = r_lo; r <= r_hi; ++r) {
        for (long c = c_lo; c <= c_hi; ++c) for_cell(r, c, consider);
      }
    };
    const double lo = center.lon - dlon;
    const double hi = center.lon + dlon;
    scan_cols(std::max(lo, -180.0), std::min(hi, 180.0));
    if (lo < -180.0) scan_cols(lo + 360.0, 180.0);
    if (hi > 180.0) scan_cols(-180.0, hi - 360.0);
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  std::vector<VenueId> out;
  out.reserve(hits.size());
  for (const auto& [d, id] : hits) out.push_back(id);
  return out;
}

const IndexedVenue* VenueIndex::find(VenueId id) const {
  auto it = std::lower_bound(venues_.begin(), venues_.end(), id,
                             [](const IndexedVenue& v, VenueId key) { return v.id < key; });
  return it != venues_.end() && it->id == id ? &*it : nullptr;
}

}  // namespace checkin

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "checkin/geo.hpp"
#include "checkin/types.hpp"

namespace checkin {

struct IndexedVenue {
  VenueId id{};
  geo::GeoPoint location;
};

// Uniform latitude/longitude grid over an immutable venue snapshot.
class VenueIndex {
 public:
  VenueIndex() = default;
  // cell_deg <= 0 picks a cell size giving a few venues per occupied cell.
  explicit VenueIndex(std::vector<IndexedVenue> venues, double cell_deg = 0.0);

  [[nodiscard]] bool empty() const { return venues_.empty(); }
  [[nodiscard]] std::size_t size() const { return venues_.size(); }
  [[nodiscard]] const std::vector<IndexedVenue>& venues() const { return venues_; }

  // Closest venue by haversine distance; ties go to the lower id. nullopt only
  // when the index is empty.
  [[nodiscard]] std::optional<VenueId> nearest(geo::GeoPoint target) const;

  // Venues within radius_m, ordered by distance then id.
  [[nodiscard]] std::vector<VenueId> within(geo::GeoPoint center, double radius_m) const;

  [[nodiscard]] const IndexedVenue* find(VenueId id) const;

 private:
  [[nodiscard]] long row_of(double lat) const;
  [[nodiscard]] long col_of(double lon) const;
  template <class Fn>
  void for_cell(long row, long col, Fn&& fn) const;

  std::vector<IndexedVenue> venues_;  // sorted by id
  double lat0_ = 0.0;
  double lon0_ = 0.0;
  double cell_deg_ = 1.0;
  long rows_ = 0;
  long cols_ = 0;
  std::vector<std::uint32_t> cell_start_;  // rows_ * cols_ + 1 offsets
  std::vector<std::uint32_t> cell_items_;  // indices into venues_
};

}  // namespace checkin

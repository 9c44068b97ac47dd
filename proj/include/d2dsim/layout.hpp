#pragma once

// Hexagonal three-sector site layout, wraparound geometry and UE dropping.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace d2dsim {

using Rng = std::mt19937_64;
using UeId = std::uint32_t;
using SectorIndex = std::uint32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend bool operator==(Point a, Point b) = default;
};

double norm(Point p);
double euclidean_distance(Point a, Point b);

struct Sector {
  std::uint32_t site = 0;
  double boresight_deg = 0.0;
};

inline constexpr std::array<double, 3> kBoresightsDeg{30.0, 150.0, 270.0};

class NetworkLayout {
 public:
  NetworkLayout(double isd_m, int n_rings, bool wraparound);

  double isd() const { return isd_; }
  int n_rings() const { return n_rings_; }
  bool wraparound_enabled() const { return !wrap_offsets_.empty(); }

  const std::vector<Point>& sites() const { return sites_; }
  const std::vector<Sector>& sectors() const { return sectors_; }
  std::size_t n_sectors() const { return sectors_.size(); }

  /// Identity first, then the six cluster translations (empty extra set
  /// when wraparound is off).
  std::vector<Point> offsets() const;
  const std::vector<Point>& wrap_offsets() const { return wrap_offsets_; }

  /// Distance from site center to a hexagon corner.
  double hex_radius() const;

  /// Site position translated by the wrap offset closest to `p`.
  Point nearest_site_image(std::uint32_t site, Point p) const;

  bool in_sector_region(Point p, SectorIndex sector) const;

  /// Geometric sector owning `p`: the nearest site image, then the
  /// 120 degree wedge containing the bearing from that image.
  SectorIndex locate_sector(Point p) const;

  /// Corners (site-local) of the rhombus covered by a sector: center,
  /// two hexagon corners at boresight -/+ 60 degrees and the corner on
  /// boresight.
  std::array<Point, 4> sector_polygon(SectorIndex sector) const;

 private:
  double isd_;
  int n_rings_;
  std::vector<Point> sites_;
  std::vector<Sector> sectors_;
  std::vector<Point> wrap_offsets_;  // six translations, identity excluded
};

NetworkLayout build_hex_grid(double isd_m, int n_rings, bool wraparound);

/// Minimum over all wrap offsets of |a - (b + offset)|.
double wrap_distance(Point a, Point b, const NetworkLayout& layout);

/// Shortest wrapped displacement b - a.
Point wrap_vector(Point a, Point b, const NetworkLayout& layout);

enum class UeRole { CellularTx, D2dTx, D2dRx };

struct UeRecord {
  UeId id = 0;
  Point position;
  UeRole role = UeRole::CellularTx;
  SectorIndex home_sector = 0;
  std::optional<UeId> peer;
};

/// Uniform point inside a sector's rhombus.
Point sample_in_sector(const NetworkLayout& layout, SectorIndex sector, Rng& rng);

/// n_per_sector UEs per sector, ids assigned from `first_id` upward in
/// sector-major order.
std::vector<UeRecord> drop_cellular_ues(const NetworkLayout& layout, int n_per_sector, Rng& rng,
                                        UeId first_id = 0);

/// Transmitters dropped per sector like cellular UEs; each receiver lands
/// area-uniformly in the annulus [min_dist, d2d_range] around its transmitter.
std::vector<std::pair<UeRecord, UeRecord>> drop_d2d_pairs(const NetworkLayout& layout,
                                                          int n_tx_per_sector, double d2d_range_m,
                                                          double min_dist_m, Rng& rng,
                                                          UeId first_id = 0);

}  // namespace d2dsim

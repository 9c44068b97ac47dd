#include "d2dsim/layout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace d2dsim {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

Point polar(double radius, double angle_deg) {
  return {radius * std::cos(angle_deg * kDegToRad), radius * std::sin(angle_deg * kDegToRad)};
}

Point rotate(Point p, double angle_deg) {
  const double c = std::cos(angle_deg * kDegToRad);
  const double s = std::sin(angle_deg * kDegToRad);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

double bearing_deg(Point v) {
  double a = std::atan2(v.y, v.x) / kDegToRad;
  if (a < 0.0) a += 360.0;
  return a;
}

}  // namespace

double norm(Point p) { return std::hypot(p.x, p.y); }

double euclidean_distance(Point a, Point b) { return norm(a - b); }

NetworkLayout::NetworkLayout(double isd_m, int n_rings, bool wraparound)
    : isd_(isd_m), n_rings_(n_rings) {
  if (!(isd_m > 0.0) || !std::isfinite(isd_m)) {
    throw std::invalid_argument("inter-site distance must be positive, got " + std::to_string(isd_m));
  }
  if (n_rings < 0) {
    throw std::invalid_argument("ring count must be non-negative, got " + std::to_string(n_rings));
  }

  // Axial lattice coordinates, basis e1 = (isd, 0), e2 = isd * (1/2, sqrt(3)/2).
  const Point e1{isd_m, 0.0};
  const Point e2{isd_m * 0.5, isd_m * std::numbers::sqrt3 * 0.5};
  struct Cell {
    int ring;
    double angle;
    Point pos;
  };
  std::vector<Cell> cells;
  for (int q = -n_rings; q <= n_rings; ++q) {
    for (int r = -n_rings; r <= n_rings; ++r) {
      const int ring = std::max({std::abs(q), std::abs(r), std::abs(q + r)});
      if (ring > n_rings) continue;
      const Point pos{q * e1.x + r * e2.x, q * e1.y + r * e2.y};
      cells.push_back({ring, ring == 0 ? 0.0 : bearing_deg(pos), pos});
    }
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return a.ring != b.ring ? a.ring < b.ring : a.angle < b.angle;
  });
  for (const auto& c : cells) sites_.push_back(c.pos);

  for (std::uint32_t s = 0; s < sites_.size(); ++s) {
    for (double b : kBoresightsDeg) sectors_.push_back({s, b});
  }

  if (wraparound && n_rings >= 1) {
    // A radius-n cluster tiles the plane under translations by
    // (n+1) e1 + n e2 and its rotations by multiples of 60 degrees.
    const Point base{(n_rings + 1) * e1.x + n_rings * e2.x, (n_rings + 1) * e1.y + n_rings * e2.y};
    for (int k = 0; k < 6; ++k) wrap_offsets_.push_back(rotate(base, 60.0 * k));
  }
}

std::vector<Point> NetworkLayout::offsets() const {
  std::vector<Point> all{{0.0, 0.0}};
  all.insert(all.end(), wrap_offsets_.begin(), wrap_offsets_.end());
  return all;
}

double NetworkLayout::hex_radius() const { return isd_ / std::numbers::sqrt3; }

Point NetworkLayout::nearest_site_image(std::uint32_t site, Point p) const {
  return p - wrap_vector(sites_.at(site), p, *this);
}

std::array<Point, 4> NetworkLayout::sector_polygon(SectorIndex sector) const {
  const double b = sectors_.at(sector).boresight_deg;
  const double radius = hex_radius();
  return {Point{0.0, 0.0}, polar(radius, b - 60.0), polar(radius, b), polar(radius, b + 60.0)};
}

bool NetworkLayout::in_sector_region(Point p, SectorIndex sector) const {
  const auto& sec = sectors_.at(sector);
  const Point local = p - nearest_site_image(sec.site, p);
  const auto poly = sector_polygon(sector);
  // local = u * a + w * c with a, c the two rhombus edges from the center.
  const Point a = poly[1];
  const Point c = poly[3];
  const double det = a.x * c.y - a.y * c.x;
  const double u = (local.x * c.y - local.y * c.x) / det;
  const double w = (a.x * local.y - a.y * local.x) / det;
  constexpr double eps = 1e-9;
  return u >= -eps && w >= -eps && u <= 1.0 + eps && w <= 1.0 + eps;
}

SectorIndex NetworkLayout::locate_sector(Point p) const {
  std::uint32_t best_site = 0;
  double best = std::numeric_limits<double>::infinity();
  Point best_local;
  for (std::uint32_t s = 0; s < sites_.size(); ++s) {
    const Point v = wrap_vector(sites_[s], p, *this);
    const double d = norm(v);
    if (d < best) {
      best = d;
      best_site = s;
      best_local = v;
    }
  }
  const double shifted = std::fmod(bearing_deg(best_local) + 30.0, 360.0);
  const auto wedge = std::min<std::uint32_t>(static_cast<std::uint32_t>(shifted / 120.0), 2);
  return best_site * 3 + wedge;
}

NetworkLayout build_hex_grid(double isd_m, int n_rings, bool wraparound) {
  return NetworkLayout(isd_m, n_rings, wraparound);
}

Point wrap_vector(Point a, Point b, const NetworkLayout& layout) {
  Point best = b - a;
  double best_norm = norm(best);
  for (const Point& o : layout.wrap_offsets()) {
    const Point v = b + o - a;
    const double n = norm(v);
    if (n < best_norm) {
      best_norm = n;
      best = v;
    }
  }
  return best;
}

double wrap_distance(Point a, Point b, const NetworkLayout& layout) {
  return norm(wrap_vector(a, b, layout));
}

Point sample_in_sector(const NetworkLayout& layout, SectorIndex sector, Rng& rng) {
  // The sector region is a parallelogram, so two uniform coordinates
  // along its edges give an exactly uniform point.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto poly = layout.sector_polygon(sector);
  const double u = unit(rng);
  const double w = unit(rng);
  const Point site = layout.sites()[layout.sectors()[sector].site];
  return {site.x + u * poly[1].x + w * poly[3].x, site.y + u * poly[1].y + w * poly[3].y};
}

std::vector<UeRecord> drop_cellular_ues(const NetworkLayout& layout, int n_per_sector, Rng& rng,
                                        UeId first_id) {
  if (n_per_sector < 0) throw std::invalid_argument("UEs per sector must be non-negative");
  std::vector<UeRecord> ues;
  ues.reserve(layout.n_sectors() * static_cast<std::size_t>(n_per_sector));
  UeId id = first_id;
  for (SectorIndex s = 0; s < layout.n_sectors(); ++s) {
    for (int i = 0; i < n_per_sector; ++i) {
      ues.push_back({id++, sample_in_sector(layout, s, rng), UeRole::CellularTx, s, std::nullopt});
    }
  }
  return ues;
}

std::vector<std::pair<UeRecord, UeRecord>> drop_d2d_pairs(const NetworkLayout& layout,
                                                          int n_tx_per_sector, double d2d_range_m,
                                                          double min_dist_m, Rng& rng,
                                                          UeId first_id) {
  if (n_tx_per_sector < 0) throw std::invalid_argument("D2D transmitters per sector must be non-negative");
  if (!(min_dist_m > 0.0) || !(min_dist_m < d2d_range_m)) {
    throw std::invalid_argument("D2D distances need 0 < min_dist < range (min_dist=" +
                                std::to_string(min_dist_m) + ", range=" + std::to_string(d2d_range_m) + ")");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<UeRecord, UeRecord>> pairs;
  pairs.reserve(layout.n_sectors() * static_cast<std::size_t>(n_tx_per_sector));
  UeId id = first_id;
  for (SectorIndex s = 0; s < layout.n_sectors(); ++s) {
    for (int i = 0; i < n_tx_per_sector; ++i) {
      const Point tx_pos = sample_in_sector(layout, s, rng);
      double r = 0.0;
      do {
        r = d2d_range_m * std::sqrt(unit(rng));
      } while (r < min_dist_m);
      const double theta = 2.0 * std::numbers::pi * unit(rng);
      const Point rx_pos{tx_pos.x + r * std::cos(theta), tx_pos.y + r * std::sin(theta)};
      UeRecord tx{id, tx_pos, UeRole::D2dTx, s, id + 1};
      UeRecord rx{id + 1, rx_pos, UeRole::D2dRx, layout.locate_sector(rx_pos), id};
      pairs.emplace_back(tx, rx);
      id += 2;
    }
  }
  return pairs;
}

}  // namespace d2dsim

#include "cdp/lattice.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cdp {

LatticeSpec LatticeSpec::hypercubic(int d, Boundary boundary, int radius) {
  LatticeSpec spec{LatticeKind::hypercubic, d, boundary, radius};
  spec.validate();
  return spec;
}

LatticeSpec LatticeSpec::matching_square(Boundary boundary, int radius) {
  LatticeSpec spec{LatticeKind::matching_square, 2, boundary, radius};
  spec.validate();
  return spec;
}

LatticeSpec LatticeSpec::parse(const std::string& kind, const std::string& boundary, int radius) {
  LatticeSpec spec;
  if (kind == "matching-square") {
    spec.kind = LatticeKind::matching_square;
    spec.dim = 2;
  } else if (kind.rfind("hypercubic:", 0) == 0) {
    spec.kind = LatticeKind::hypercubic;
    try {
      spec.dim = std::stoi(kind.substr(11));
    } catch (const std::exception&) {
      throw std::invalid_argument("lattice: cannot parse dimension in '" + kind + "'");
    }
  } else {
    throw std::invalid_argument("lattice: expected 'hypercubic:<d>' or 'matching-square', got '" + kind + "'");
  }
  if (boundary == "torus") {
    spec.boundary = Boundary::torus;
  } else if (boundary == "free-box") {
    spec.boundary = Boundary::free_box;
  } else {
    throw std::invalid_argument("boundary: expected 'torus' or 'free-box', got '" + boundary + "'");
  }
  spec.radius = radius;
  spec.validate();
  return spec;
}

std::string LatticeSpec::kind_name() const {
  return kind == LatticeKind::hypercubic ? "hypercubic:" + std::to_string(dim) : "matching-square";
}

std::string LatticeSpec::boundary_name() const { return boundary == Boundary::torus ? "torus" : "free-box"; }

std::string LatticeSpec::to_string() const {
  return kind_name() + "/" + boundary_name() + "/L=" + std::to_string(radius);
}

void LatticeSpec::validate() const {
  if (dim < 1) throw std::invalid_argument("lattice dimension must be >= 1");
  if (kind == LatticeKind::matching_square && dim != 2)
    throw std::invalid_argument("matching-square lattice is two-dimensional");
  if (radius < 1) throw std::invalid_argument("window radius must be >= 1");
}

std::string to_string(const Vertex& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string to_string(const EdgeId& e) { return to_string(e.tail) + ":" + std::to_string(e.direction); }

EdgeId parse_edge_id(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
    throw std::invalid_argument("malformed edge id '" + text + "'");
  EdgeId e;
  try {
    std::size_t used = 0;
    e.direction = std::stoi(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
    std::stringstream coords(text.substr(0, colon));
    std::string item;
    while (std::getline(coords, item, ',')) {
      e.tail.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing");
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed edge id '" + text + "'");
  }
  return e;
}

Vertex direction_offset(LatticeKind kind, int dim, int direction) {
  if (kind == LatticeKind::hypercubic) {
    if (direction < 0 || direction >= dim) throw std::out_of_range("direction index out of range");
    Vertex off(dim, 0);
    off[direction] = 1;
    return off;
  }
  switch (direction) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {1, 1};
    case 3: return {1, -1};
    default: throw std::out_of_range("direction index out of range");
  }
}

bool in_window(const LatticeSpec& spec, const Vertex& v) {
  if (static_cast<int>(v.size()) != spec.dim) return false;
  return std::all_of(v.begin(), v.end(), [&](int x) { return x >= -spec.radius && x <= spec.radius; });
}

Vertex wrap(const LatticeSpec& spec, Vertex v) {
  if (spec.boundary == Boundary::torus) {
    const int side = spec.side();
    for (int& x : v) {
      int shifted = (x + spec.radius) % side;
      if (shifted < 0) shifted += side;
      x = shifted - spec.radius;
    }
  }
  return v;
}

std::vector<Neighbor> neighbors(const LatticeSpec& spec, const Vertex& v) {
  if (!in_window(spec, v)) throw std::out_of_range("vertex " + to_string(v) + " outside window " + spec.to_string());
  std::vector<Neighbor> out;
  out.reserve(spec.degree());
  for (int dir = 0; dir < spec.num_directions(); ++dir) {
    const Vertex off = direction_offset(spec.kind, spec.dim, dir);
    for (int sign : {1, -1}) {
      Vertex w = v;
      for (int i = 0; i < spec.dim; ++i) w[i] += sign * off[i];
      if (spec.boundary == Boundary::free_box) {
        if (!in_window(spec, w)) continue;
      } else {
        w = wrap(spec, std::move(w));
      }
      EdgeId e = sign > 0 ? EdgeId{v, dir} : EdgeId{w, dir};
      out.push_back({std::move(w), std::move(e)});
    }
  }
  return out;
}

std::pair<Vertex, Vertex> endpoints(const LatticeSpec& spec, const EdgeId& e) {
  return {e.tail, wrap(spec, head_of(spec.kind, e))};
}

Vertex head_of(LatticeKind kind, const EdgeId& e) {
  const Vertex off = direction_offset(kind, static_cast<int>(e.tail.size()), e.direction);
  Vertex h = e.tail;
  for (std::size_t i = 0; i < h.size(); ++i) h[i] += off[i];
  return h;
}

EdgeId edge_towards(LatticeKind kind, const Vertex& v, int direction, int sign) {
  if (sign > 0) return {v, direction};
  const Vertex off = direction_offset(kind, static_cast<int>(v.size()), direction);
  Vertex t = v;
  for (std::size_t i = 0; i < t.size(); ++i) t[i] -= off[i];
  return {std::move(t), direction};
}

Vertex other_endpoint(LatticeKind kind, const EdgeId& e, const Vertex& v) {
  if (v == e.tail) return head_of(kind, e);
  return e.tail;
}

FieldCounter edge_counter(LatticeKind kind, const EdgeId& e) {
  std::int64_t words[34];
  const std::size_t n = std::min<std::size_t>(e.tail.size(), 32);
  words[0] = static_cast<std::int64_t>(e.tail.size());
  for (std::size_t i = 0; i < n; ++i) words[1 + i] = e.tail[i];
  words[1 + n] = e.direction;
  const std::uint64_t domain = kind == LatticeKind::hypercubic ? 0xE1D6E0001ULL : 0xE1D6E0002ULL;
  if (e.tail.size() <= 32) return hash_words(domain, std::span<const std::int64_t>(words, n + 2));
  std::vector<std::int64_t> long_words;
  long_words.push_back(static_cast<std::int64_t>(e.tail.size()));
  long_words.insert(long_words.end(), e.tail.begin(), e.tail.end());
  long_words.push_back(e.direction);
  return hash_words(domain, long_words);
}

FieldCounter site_counter(const Vertex& v) {
  std::vector<std::int64_t> words(v.begin(), v.end());
  words.push_back(static_cast<std::int64_t>(v.size()));
  return hash_words(0x517E0001ULL, words);
}

ProjectionMap ProjectionMap::standard(int source_dim, int target_dim) {
  if (target_dim < 1 || source_dim < target_dim)
    throw std::invalid_argument("projection needs 1 <= d' <= d");
  const int w = source_dim / target_dim;
  std::vector<std::vector<int>> groups(target_dim);
  if (target_dim == 2) {
    for (int j = 0; j < w; ++j) {
      groups[0].push_back(j);
      groups[1].push_back(source_dim - w + j);
    }
  } else {
    for (int g = 0; g < target_dim; ++g)
      for (int j = 0; j < w; ++j) groups[g].push_back(g * w + j);
  }
  return ProjectionMap(source_dim, std::move(groups));
}

ProjectionMap::ProjectionMap(int source_dim, std::vector<std::vector<int>> groups)
    : source_dim_(source_dim), groups_(std::move(groups)), group_of_(source_dim, -1) {
  if (groups_.empty()) throw std::invalid_argument("projection needs at least one group");
  group_size_ = static_cast<int>(groups_.front().size());
  if (group_size_ != source_dim_ / static_cast<int>(groups_.size()))
    throw std::invalid_argument("projection groups must have floor(d/d') directions each");
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    auto& grp = groups_[g];
    if (static_cast<int>(grp.size()) != group_size_) throw std::invalid_argument("projection groups must be equal-sized");
    std::sort(grp.begin(), grp.end());
    for (int c : grp) {
      if (c < 0 || c >= source_dim_) throw std::invalid_argument("projection coordinate out of range");
      if (group_of_[c] != -1) throw std::invalid_argument("projection groups must be disjoint");
      group_of_[c] = static_cast<int>(g);
    }
  }
}

Vertex ProjectionMap::project(const Vertex& v) const {
  if (static_cast<int>(v.size()) != source_dim_) throw std::invalid_argument("projection: wrong source dimension");
  Vertex out(groups_.size(), 0);
  for (std::size_t g = 0; g < groups_.size(); ++g)
    for (int c : groups_[g]) out[g] += v[c];
  return out;
}

Vertex ProjectionMap::target_offset(int target_direction) const {
  if (target_direction < 0 || target_direction >= num_target_directions())
    throw std::out_of_range("target direction out of range");
  Vertex off(groups_.size(), 0);
  off[target_direction / 2] = target_direction % 2 == 0 ? 1 : -1;
  return off;
}

std::vector<EdgeId> ProjectionMap::fiber_edges(const Vertex& o, int target_direction) const {
  if (target_direction < 0 || target_direction >= num_target_directions())
    throw std::out_of_range("target direction out of range");
  const int sign = target_direction % 2 == 0 ? 1 : -1;
  std::vector<EdgeId> out;
  out.reserve(group_size_);
  for (int c : groups_[target_direction / 2]) out.push_back(edge_towards(LatticeKind::hypercubic, o, c, sign));
  return out;
}

std::vector<EdgeId> ProjectionMap::fiber_edges(const Vertex& o, const Vertex& target) const {
  const Vertex image = project(o);
  if (target.size() != image.size()) throw std::invalid_argument("fiber_edges: wrong target dimension");
  for (int dir = 0; dir < num_target_directions(); ++dir) {
    const Vertex off = target_offset(dir);
    bool match = true;
    for (std::size_t i = 0; i < image.size(); ++i) match = match && image[i] + off[i] == target[i];
    if (match) return fiber_edges(o, dir);
  }
  throw std::invalid_argument("fiber_edges: " + to_string(target) + " is not adjacent to " + to_string(image));
}

}  // namespace cdp

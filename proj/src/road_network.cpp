#include "tdmp/road_network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "tdmp/rng.hpp"

namespace tdmp {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NetworkError(NetErrc::Parse, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Splits `text` into whitespace-delimited token lines, dropping `#` comments.
template <typename Fn>
void for_each_record(const std::string& text, Fn&& fn) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string tok; ls >> tok;) tokens.push_back(tok);
    if (!tokens.empty()) fn(tokens, line_no);
  }
}

template <typename T>
T parse_number(const std::string& tok, int line_no) {
  std::istringstream is(tok);
  T value{};
  is >> value;
  if (!is || !is.eof()) {
    throw NetworkError(NetErrc::Parse,
                       "line " + std::to_string(line_no) + ": bad number '" + tok + "'");
  }
  return value;
}

void expect_arity(const std::vector<std::string>& t, std::size_t n, int line_no) {
  if (t.size() != n) {
    throw NetworkError(NetErrc::Parse, "line " + std::to_string(line_no) + ": '" + t[0] +
                                           "' expects " + std::to_string(n - 1) + " fields");
  }
}

}  // namespace

void RoadNetwork::add_node(NodeId id, Point2 position) {
  if (node_index_.contains(id)) throw NetworkError(NetErrc::DuplicateId, "duplicate node " + std::to_string(id));
  if (!is_finite(position)) throw NetworkError(NetErrc::BadEdge, "node " + std::to_string(id) + " has non-finite position");
  node_index_[id] = nodes_.size();
  nodes_.push_back({id, position});
  out_[id];
}

void RoadNetwork::add_edge(EdgeId id, NodeId from, NodeId to, double speed_limit, int lane_count) {
  if (edge_index_.contains(id)) throw NetworkError(NetErrc::DuplicateId, "duplicate edge " + std::to_string(id));
  if (!has_node(from) || !has_node(to)) {
    throw NetworkError(NetErrc::UnknownNode, "edge " + std::to_string(id) + " references an unknown node");
  }
  const double len = distance(node(from).position, node(to).position);
  if (!(len > 0.0)) throw NetworkError(NetErrc::BadEdge, "edge " + std::to_string(id) + " has zero length");
  if (!(speed_limit > 0.0)) throw NetworkError(NetErrc::BadEdge, "edge " + std::to_string(id) + " needs a positive speed limit");
  if (lane_count < 1) throw NetworkError(NetErrc::BadEdge, "edge " + std::to_string(id) + " needs at least one lane");
  edge_index_[id] = edges_.size();
  edges_.push_back({id, from, to, len, speed_limit, lane_count, len});
  out_[from].push_back(id);
}

const RoadNode& RoadNetwork::node(NodeId id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) throw NetworkError(NetErrc::UnknownNode, "unknown node " + std::to_string(id));
  return nodes_[it->second];
}

const RoadEdge& RoadNetwork::edge(EdgeId id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) throw NetworkError(NetErrc::BadEdge, "unknown edge " + std::to_string(id));
  return edges_[it->second];
}

const std::vector<EdgeId>& RoadNetwork::out_edges(NodeId id) const {
  auto it = out_.find(id);
  if (it == out_.end()) throw NetworkError(NetErrc::UnknownNode, "unknown node " + std::to_string(id));
  return it->second;
}

void RoadNetwork::set_edge_weight(EdgeId id, double weight) {
  if (!(weight > 0.0)) throw NetworkError(NetErrc::BadEdge, "edge weight must be > 0");
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) throw NetworkError(NetErrc::BadEdge, "unknown edge " + std::to_string(id));
  edges_[it->second].weight = weight;
}

std::pair<double, double> RoadNetwork::extent() const {
  if (nodes_.empty()) return {0.0, 0.0};
  double x0 = nodes_[0].position.x, x1 = x0, y0 = nodes_[0].position.y, y1 = y0;
  for (const auto& n : nodes_) {
    x0 = std::min(x0, n.position.x);
    x1 = std::max(x1, n.position.x);
    y0 = std::min(y0, n.position.y);
    y1 = std::max(y1, n.position.y);
  }
  return {x1 - x0, y1 - y0};
}

RoadNetwork build_grid(int blocks_x, int blocks_y, double block_len, double speed_limit) {
  if (blocks_x < 1 || blocks_y < 1 || !(block_len > 0.0) || !(speed_limit > 0.0)) {
    throw NetworkError(NetErrc::InvalidDimension, "grid needs >= 1 block per axis and positive block length and speed");
  }
  RoadNetwork net;
  const int nx = blocks_x + 1;
  const int ny = blocks_y + 1;
  auto id_of = [nx](int i, int j) { return static_cast<NodeId>(j * nx + i); };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) net.add_node(id_of(i, j), {i * block_len, j * block_len});

  EdgeId next = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (i + 1 < nx) {
        net.add_edge(next++, id_of(i, j), id_of(i + 1, j), speed_limit);
        net.add_edge(next++, id_of(i + 1, j), id_of(i, j), speed_limit);
      }
      if (j + 1 < ny) {
        net.add_edge(next++, id_of(i, j), id_of(i, j + 1), speed_limit);
        net.add_edge(next++, id_of(i, j + 1), id_of(i, j), speed_limit);
      }
    }
  }
  return net;
}

RoadNetwork parse_network(const std::string& text) {
  RoadNetwork net;
  struct PendingEdge {
    EdgeId id;
    NodeId from, to;
    double speed;
    int lanes;
    int line;
  };
  std::vector<PendingEdge> pending;
  for_each_record(text, [&](const std::vector<std::string>& t, int line_no) {
    if (t[0] == "node") {
      expect_arity(t, 4, line_no);
      net.add_node(parse_number<NodeId>(t[1], line_no),
                   {parse_number<double>(t[2], line_no), parse_number<double>(t[3], line_no)});
    } else if (t[0] == "edge") {
      expect_arity(t, 6, line_no);
      pending.push_back({parse_number<EdgeId>(t[1], line_no), parse_number<NodeId>(t[2], line_no),
                         parse_number<NodeId>(t[3], line_no), parse_number<double>(t[4], line_no),
                         parse_number<int>(t[5], line_no), line_no});
    } else {
      throw NetworkError(NetErrc::Parse, "line " + std::to_string(line_no) + ": unknown record '" + t[0] + "'");
    }
  });
  // Edges may precede the nodes they reference.
  for (const auto& e : pending) {
    try {
      net.add_edge(e.id, e.from, e.to, e.speed, e.lanes);
    } catch (const NetworkError& err) {
      throw NetworkError(err.code(), "line " + std::to_string(e.line) + ": " + err.what());
    }
  }
  return net;
}

RoadNetwork load_network(const std::string& path) { return parse_network(read_file(path)); }

std::int64_t ODMatrix::total() const {
  std::int64_t sum = 0;
  for (const auto& [_, count] : entries) sum += count;
  return sum;
}

ODMatrix ODMatrix::scaled_to(std::int64_t target) const {
  const std::int64_t base = total();
  if (base <= 0 || target < 0) throw NetworkError(NetErrc::InvalidDemand, "cannot scale an empty O/D matrix");
  ODMatrix out;
  out.period = period;
  struct Share {
    std::pair<NodeId, NodeId> key;
    double remainder;
    std::size_t order;
  };
  std::vector<Share> shares;
  std::int64_t assigned = 0;
  std::size_t order = 0;
  for (const auto& [key, count] : entries) {
    const double exact = static_cast<double>(count) * static_cast<double>(target) / static_cast<double>(base);
    const auto whole = static_cast<std::int64_t>(std::floor(exact));
    out.entries[key] = whole;
    assigned += whole;
    shares.push_back({key, exact - static_cast<double>(whole), order++});
  }
  // Remainders go to the largest fractional parts; equal fractions are spread
  // with a fixed stride over the key order so no corner of the map is favoured.
  const std::size_t n = shares.size();
  std::size_t stride = 1;
  for (std::size_t s = n / 2 + 1; s < n; ++s) {
    if (std::gcd(s, n) == 1) {
      stride = s;
      break;
    }
  }
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[(i * stride) % n] = i;
  std::stable_sort(shares.begin(), shares.end(), [&](const Share& a, const Share& b) {
    if (a.remainder != b.remainder) return a.remainder > b.remainder;
    return rank[a.order] < rank[b.order];
  });
  for (std::size_t i = 0; assigned < target; ++i, ++assigned) out.entries[shares[i % n].key] += 1;
  return out;
}

ODMatrix parse_od(const std::string& text) {
  ODMatrix od;
  bool have_period = false;
  for_each_record(text, [&](const std::vector<std::string>& t, int line_no) {
    if (t[0] == "period") {
      expect_arity(t, 2, line_no);
      od.period = parse_number<double>(t[1], line_no);
      if (!(od.period > 0.0)) throw NetworkError(NetErrc::Parse, "line " + std::to_string(line_no) + ": period must be > 0");
      have_period = true;
    } else if (t[0] == "od") {
      expect_arity(t, 4, line_no);
      const auto o = parse_number<NodeId>(t[1], line_no);
      const auto d = parse_number<NodeId>(t[2], line_no);
      const auto c = parse_number<std::int64_t>(t[3], line_no);
      if (c < 0) throw NetworkError(NetErrc::InvalidDemand, "line " + std::to_string(line_no) + ": negative count");
      od.entries[{o, d}] += c;
    } else {
      throw NetworkError(NetErrc::Parse, "line " + std::to_string(line_no) + ": unknown record '" + t[0] + "'");
    }
  });
  if (!have_period) throw NetworkError(NetErrc::Parse, "O/D file lacks a 'period' header");
  return od;
}

ODMatrix load_od(const std::string& path) { return parse_od(read_file(path)); }

ODMatrix uniform_od(const RoadNetwork& net, double period) {
  ODMatrix od;
  od.period = period;
  for (const auto& a : net.nodes())
    for (const auto& b : net.nodes())
      if (a.id != b.id) od.entries[{a.id, b.id}] = 1;
  return od;
}

std::vector<EdgeId> shortest_route(const RoadNetwork& net, NodeId origin, NodeId destination) {
  if (!net.has_node(origin) || !net.has_node(destination)) {
    throw NetworkError(NetErrc::UnknownNode, "shortest_route: unknown endpoint");
  }
  if (origin == destination) return {};

  // Cost-to-go from every node, by Dijkstra over the reversed graph.
  std::unordered_map<NodeId, std::vector<const RoadEdge*>> incoming;
  for (const auto& e : net.edges()) incoming[e.to].push_back(&e);
  std::unordered_map<NodeId, double> togo;
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  togo[destination] = 0.0;
  heap.push({0.0, destination});
  while (!heap.empty()) {
    auto [d, n] = heap.top();
    heap.pop();
    if (d > togo[n]) continue;
    for (const RoadEdge* e : incoming[n]) {
      const double nd = d + e->weight;
      auto it = togo.find(e->from);
      if (it == togo.end() || nd < it->second) {
        togo[e->from] = nd;
        heap.push({nd, e->from});
      }
    }
  }
  if (!togo.contains(origin)) {
    throw NetworkError(NetErrc::Unreachable, "no route from " + std::to_string(origin) + " to " +
                                                 std::to_string(destination));
  }

  std::vector<EdgeId> route;
  NodeId at = origin;
  while (at != destination) {
    const double here = togo.at(at);
    const RoadEdge* best = nullptr;
    for (EdgeId eid : net.out_edges(at)) {
      const RoadEdge& e = net.edge(eid);
      auto it = togo.find(e.to);
      if (it == togo.end()) continue;
      const double via = e.weight + it->second;
      if (std::abs(via - here) > 1e-9 * std::max(1.0, here)) continue;
      if (best == nullptr || e.to < best->to) best = &e;
    }
    route.push_back(best->id);
    at = best->to;
  }
  return route;
}

double route_length(const RoadNetwork& net, const std::vector<EdgeId>& route) {
  double len = 0.0;
  for (EdgeId e : route) len += net.edge(e).length;
  return len;
}

std::vector<Trip> generate_trips(const RoadNetwork& net, const ODMatrix& od, std::uint64_t seed,
                                 const TripOptions& options) {
  Rng rng = Rng::stream(seed, 1);
  std::vector<Trip> trips;
  for (const auto& [key, count] : od.entries) {
    if (count == 0) continue;
    const auto [o, d] = key;
    if (o == d) {
      throw NetworkError(NetErrc::InvalidDemand, "O/D entry with origin == destination (" + std::to_string(o) + ")");
    }
    std::vector<EdgeId> route;
    try {
      route = shortest_route(net, o, d);
    } catch (const NetworkError& e) {
      throw NetworkError(e.code(), std::string("UnreachablePair(") + std::to_string(o) + ", " +
                                       std::to_string(d) + "): " + e.what());
    }
    const Point2 target = net.node(d).position;
    for (std::int64_t k = 0; k < count; ++k) {
      Trip t;
      t.departure_time = od.period * rng.uniform01();
      t.origin = o;
      t.destination = d;
      t.route = route;
      t.target = target;
      t.max_speed = rng.uniform(options.min_vehicle_speed, options.max_vehicle_speed);
      trips.push_back(std::move(t));
    }
  }
  std::stable_sort(trips.begin(), trips.end(),
                   [](const Trip& a, const Trip& b) { return a.departure_time < b.departure_time; });
  for (std::size_t i = 0; i < trips.size(); ++i) trips[i].vehicle_id = static_cast<VehicleId>(i);
  return trips;
}

}  // namespace tdmp

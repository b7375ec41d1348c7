#include "modsurf/surface.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace modsurf {

Word word_inverse(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(it->inverse());
  return out;
}

Word word_concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Word word_reduce(const Word& w) {
  Word out;
  for (const Lit& l : w) {
    if (!out.empty() && out.back().id == l.id && out.back().exp == -l.exp)
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

std::string word_str(const Word& w) {
  std::string s;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) s += ' ';
    s += w[i].id;
    if (w[i].exp == -1) s += "^-1";
  }
  return s;
}

Word parse_word(const std::string& text) {
  Word w;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    int exp = 1;
    auto caret = tok.find('^');
    std::string id = tok;
    if (caret != std::string::npos) {
      id = tok.substr(0, caret);
      const std::string e = tok.substr(caret + 1);
      if (e == "-1")
        exp = -1;
      else if (e == "1")
        exp = 1;
      else
        throw SurfaceError("bad exponent in token: " + tok);
    }
    if (id.empty()) throw SurfaceError("empty letter in word: " + text);
    w.emplace_back(id, exp);
  }
  return w;
}

std::map<std::string, std::vector<GluingPattern::Occurrence>>
GluingPattern::occurrences() const {
  std::map<std::string, std::vector<Occurrence>> occ;
  for (int p = 0; p < static_cast<int>(polygons.size()); ++p)
    for (int s = 0; s < static_cast<int>(polygons[p].size()); ++s)
      occ[polygons[p][s].id].push_back({p, s, polygons[p][s].exp});
  return occ;
}

bool GluingPattern::is_free(const std::string& letter) const {
  const auto occ = occurrences();
  auto it = occ.find(letter);
  return it != occ.end() && it->second.size() == 1;
}

void GluingPattern::validate() const {
  if (polygons.empty()) throw SurfaceError("pattern has no polygons");
  for (const Word& poly : polygons)
    if (poly.empty()) throw SurfaceError("polygon with no sides");
  for (const auto& [id, occ] : occurrences()) {
    if (occ.size() > 2)
      throw SurfaceError("letter used more than twice: " + id);
    if (occ.size() == 2 && occ[0].exp == occ[1].exp)
      throw SurfaceError(
          "paired letter must occur with opposite exponents "
          "(orientation-reversing gluing): " +
          id);
  }
}

GluingPattern parse_pattern(const std::string& text) {
  GluingPattern p;
  std::vector<std::string> free_decl;
  std::vector<std::pair<std::string, std::string>> pair_decl;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    // trim
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);

    if (line.rfind("group:", 0) == 0) {
      std::istringstream ls(line.substr(6));
      ls >> p.group_hint;
      continue;
    }
    if (line.rfind("free:", 0) == 0) {
      std::istringstream ls(line.substr(5));
      std::string id;
      while (ls >> id) free_decl.push_back(id);
      continue;
    }
    if (line.rfind("pair:", 0) == 0) {
      std::string rest = line.substr(5);
      for (char& ch : rest)
        if (ch == '(' || ch == ')' || ch == ',') ch = ' ';
      std::istringstream ls(rest);
      std::string a, b2;
      while (ls >> a >> b2) pair_decl.emplace_back(a, b2);
      continue;
    }
    p.polygons.push_back(parse_word(line));
  }

  // "pair: (c d)" glues side d onto side c orientation-reversingly: the
  // oriented edges satisfy d = c^{-1}
  for (const auto& [keep, drop] : pair_decl) {
    bool seen = false;
    for (Word& poly : p.polygons)
      for (Lit& l : poly)
        if (l.id == drop) {
          l = Lit(keep, -l.exp);
          seen = true;
        }
    if (!seen) throw SurfaceError("pair directive names unknown letter: " + drop);
  }

  p.validate();
  for (const std::string& id : free_decl)
    if (!p.is_free(id))
      throw SurfaceError("letter declared free but paired: " + id);
  return p;
}

std::string print_pattern(const GluingPattern& p) {
  std::string out;
  for (const Word& poly : p.polygons) {
    out += word_str(poly);
    out += '\n';
  }
  if (!p.group_hint.empty()) out += "group: " + p.group_hint + '\n';
  return out;
}

namespace {

// flat corner ids and a union-find over them
struct Corners {
  std::vector<int> poly_offset;
  std::vector<int> parent;
  const GluingPattern* pat;

  explicit Corners(const GluingPattern& p) : pat(&p) {
    int total = 0;
    for (const Word& poly : p.polygons) {
      poly_offset.push_back(total);
      total += static_cast<int>(poly.size());
    }
    parent.resize(total);
    std::iota(parent.begin(), parent.end(), 0);
  }

  int n_sides(int poly) const {
    return static_cast<int>(pat->polygons[static_cast<size_t>(poly)].size());
  }
  int id(int poly, int corner) const {
    const int n = n_sides(poly);
    return poly_offset[static_cast<size_t>(poly)] + ((corner % n) + n) % n;
  }
  int find(int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] =
          parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }

  // side s endpoints: A end = corner s, B end = corner s+1.
  // A letter with exp +1 runs B -> A; with exp -1 it runs A -> B.
  int corner_a(int poly, int side) const { return id(poly, side); }
  int corner_b(int poly, int side) const { return id(poly, side + 1); }
};

struct SideRef {
  int poly = -1;
  int side = -1;
  bool operator==(const SideRef& o) const {
    return poly == o.poly && side == o.side;
  }
};

}  // namespace

SurfaceInfo analyze(const GluingPattern& p) {
  p.validate();
  const auto occ = p.occurrences();
  Corners corners(p);

  // identify corners across paired sides: for occurrences o+ (exp +1) and
  // o- (exp -1) of the same letter, source ~ source and target ~ target
  for (const auto& [id, os] : occ) {
    if (os.size() != 2) continue;
    const auto& plus = os[0].exp == 1 ? os[0] : os[1];
    const auto& minus = os[0].exp == 1 ? os[1] : os[0];
    corners.unite(corners.corner_b(plus.polygon, plus.side),
                  corners.corner_a(minus.polygon, minus.side));
    corners.unite(corners.corner_a(plus.polygon, plus.side),
                  corners.corner_b(minus.polygon, minus.side));
  }

  // vertex classes, densely renumbered in order of first appearance
  std::map<int, int> vertex_of_root;
  auto vertex_class = [&](int corner) {
    const int root = corners.find(corner);
    auto it = vertex_of_root.find(root);
    if (it != vertex_of_root.end()) return it->second;
    const int v = static_cast<int>(vertex_of_root.size());
    vertex_of_root.emplace(root, v);
    return v;
  };
  for (size_t c = 0; c < corners.parent.size(); ++c)
    vertex_class(static_cast<int>(c));

  SurfaceInfo info;
  info.num_polygons = static_cast<int>(p.polygons.size());
  info.num_edge_classes = static_cast<int>(occ.size());
  info.num_vertices = static_cast<int>(vertex_of_root.size());
  info.euler_characteristic =
      info.num_polygons - info.num_edge_classes + info.num_vertices;

  for (const auto& [id, os] : occ) {
    const auto& o = os[0];
    const int src = o.exp == 1 ? corners.corner_b(o.polygon, o.side)
                               : corners.corner_a(o.polygon, o.side);
    const int dst = o.exp == 1 ? corners.corner_a(o.polygon, o.side)
                               : corners.corner_b(o.polygon, o.side);
    info.letter_endpoints[id] = {vertex_class(src), vertex_class(dst)};
  }

  // boundary traversal over free sides: from the target end of an edge,
  // rotate around the vertex through paired sides until the next free side
  auto side_letter = [&](const SideRef& s) -> const Lit& {
    return p.polygons[static_cast<size_t>(s.poly)][static_cast<size_t>(s.side)];
  };
  // end encoding: 0 = A end, 1 = B end
  auto other_side_at_end = [&](const SideRef& s, int end) {
    const int n = corners.n_sides(s.poly);
    if (end == 0) return std::pair<SideRef, int>({s.poly, (s.side - 1 + n) % n}, 1);
    return std::pair<SideRef, int>({s.poly, (s.side + 1) % n}, 0);
  };
  auto partner_of = [&](const SideRef& s) -> SideRef {
    const auto& os = occ.at(side_letter(s).id);
    for (const auto& o : os)
      if (!(o.polygon == s.poly && o.side == s.side)) return {o.polygon, o.side};
    throw SurfaceError("internal: partner lookup on free side");
  };

  std::vector<std::vector<char>> visited(p.polygons.size());
  for (size_t i = 0; i < p.polygons.size(); ++i)
    visited[i].assign(p.polygons[i].size(), 0);

  for (int sp = 0; sp < static_cast<int>(p.polygons.size()); ++sp) {
    for (int ss = 0; ss < static_cast<int>(p.polygons[sp].size()); ++ss) {
      const SideRef start{sp, ss};
      if (visited[sp][static_cast<size_t>(ss)]) continue;
      if (occ.at(side_letter(start).id).size() == 2) continue;  // paired

      const int component = info.num_boundary_components++;
      SideRef cur = start;
      do {
        visited[static_cast<size_t>(cur.poly)][static_cast<size_t>(cur.side)] = 1;
        const Lit& lit = side_letter(cur);
        BoundaryEdge edge;
        edge.letter = lit.id;
        edge.component = component;
        const int src_corner = lit.exp == 1 ? corners.corner_b(cur.poly, cur.side)
                                            : corners.corner_a(cur.poly, cur.side);
        const int dst_corner = lit.exp == 1 ? corners.corner_a(cur.poly, cur.side)
                                            : corners.corner_b(cur.poly, cur.side);
        edge.source_vertex = vertex_class(src_corner);
        edge.target_vertex = vertex_class(dst_corner);
        info.boundary_edges.push_back(edge);

        // rotate from the target end of `cur` to the next free side
        int end = lit.exp == 1 ? 0 : 1;  // A if +1, B if -1
        SideRef s = cur;
        while (true) {
          auto [next, next_end] = other_side_at_end(s, end);
          if (occ.at(side_letter(next).id).size() == 1) {
            const Lit& nl = side_letter(next);
            const int source_end = nl.exp == 1 ? 1 : 0;
            if (next_end != source_end)
              throw SurfaceError("internal: boundary traversal direction");
            cur = next;
            break;
          }
          s = partner_of(next);
          end = next_end == 0 ? 1 : 0;  // identification swaps A and B ends
        }
      } while (!(cur == start));
    }
  }

  info.vertex_on_boundary.assign(static_cast<size_t>(info.num_vertices), false);
  for (const BoundaryEdge& e : info.boundary_edges) {
    info.vertex_on_boundary[static_cast<size_t>(e.source_vertex)] = true;
    info.vertex_on_boundary[static_cast<size_t>(e.target_vertex)] = true;
  }

  // surface components: polygons joined by paired letters
  std::vector<int> comp(p.polygons.size());
  std::iota(comp.begin(), comp.end(), 0);
  std::function<int(int)> find_comp = [&](int x) {
    while (comp[static_cast<size_t>(x)] != x) x = comp[static_cast<size_t>(x)];
    return x;
  };
  for (const auto& [id, os] : occ)
    if (os.size() == 2)
      comp[static_cast<size_t>(find_comp(os[0].polygon))] =
          find_comp(os[1].polygon);
  std::map<int, bool> has_boundary;
  for (int q = 0; q < static_cast<int>(p.polygons.size()); ++q)
    has_boundary.emplace(find_comp(q), false);
  info.num_surface_components = static_cast<int>(has_boundary.size());
  for (const auto& [id, os] : occ)
    if (os.size() == 1) has_boundary[find_comp(os[0].polygon)] = true;

  info.a1 = true;
  for (const auto& [root, hb] : has_boundary)
    if (!hb) info.a1 = false;
  info.a2 = true;  // gluing patterns subdivide every boundary circle at corners
  info.a3 = info.num_interior_vertices() == 0;
  return info;
}

std::pair<GluingPattern, GeneratorCorrespondence> cut_diagonal(
    const GluingPattern& p, int polygon, int corner_i, int corner_j,
    const std::string& new_letter) {
  if (polygon < 0 || polygon >= static_cast<int>(p.polygons.size()))
    throw SurfaceError("cut_diagonal: polygon index out of range");
  const Word& w = p.polygons[static_cast<size_t>(polygon)];
  const int n = static_cast<int>(w.size());
  if (n < 4) throw SurfaceError("cut_diagonal: polygon needs at least 4 sides");
  if (corner_i < 0 || corner_i >= n || corner_j < 0 || corner_j >= n)
    throw SurfaceError("cut_diagonal: corner index out of range");
  const int arc1 = ((corner_j - corner_i) % n + n) % n;
  const int arc2 = n - arc1;
  if (arc1 < 2 || arc2 < 2)
    throw SurfaceError("cut_diagonal: corners are adjacent or equal");
  if (p.occurrences().count(new_letter))
    throw SurfaceError("cut_diagonal: letter already in use: " + new_letter);

  Word first, second, diag_word;
  for (int k = 0; k < arc1; ++k) {
    const Lit& l = w[static_cast<size_t>((corner_i + k) % n)];
    first.push_back(l);
    diag_word.push_back(l);
  }
  first.emplace_back(new_letter, 1);
  second.emplace_back(new_letter, -1);
  for (int k = 0; k < arc2; ++k)
    second.push_back(w[static_cast<size_t>((corner_j + k) % n)]);

  GluingPattern out = p;
  out.polygons[static_cast<size_t>(polygon)] = first;
  out.polygons.insert(out.polygons.begin() + polygon + 1, second);
  out.validate();

  GeneratorCorrespondence corr;
  corr[new_letter] = word_inverse(diag_word);
  return {out, corr};
}

GluingPattern glue_edges(const GluingPattern& p, const std::string& letter) {
  const auto occ = p.occurrences();
  auto it = occ.find(letter);
  if (it == occ.end() || it->second.size() != 2)
    throw SurfaceError("glue_edges: letter is not paired: " + letter);
  const auto& plus = it->second[0].exp == 1 ? it->second[0] : it->second[1];
  const auto& minus = it->second[0].exp == 1 ? it->second[1] : it->second[0];
  if (plus.polygon == minus.polygon)
    throw SurfaceError("glue_edges: occurrences lie in the same polygon");

  const Word& w1 = p.polygons[static_cast<size_t>(plus.polygon)];
  const Word& w2 = p.polygons[static_cast<size_t>(minus.polygon)];
  const int n1 = static_cast<int>(w1.size());
  const int n2 = static_cast<int>(w2.size());
  Word merged;
  for (int k = 1; k < n1; ++k)
    merged.push_back(w1[static_cast<size_t>((plus.side + k) % n1)]);
  for (int k = 1; k < n2; ++k)
    merged.push_back(w2[static_cast<size_t>((minus.side + k) % n2)]);
  if (merged.empty())
    throw SurfaceError("glue_edges: gluing two 1-gons leaves no sides");

  GluingPattern out = p;
  const int lo = std::min(plus.polygon, minus.polygon);
  const int hi = std::max(plus.polygon, minus.polygon);
  out.polygons.erase(out.polygons.begin() + hi);
  out.polygons[static_cast<size_t>(lo)] = merged;
  out.validate();
  return out;
}

std::pair<GluingPattern, GeneratorCorrespondence> add_interior_vertex_cut(
    const GluingPattern& p, int polygon, int corner,
    const std::string& new_letter) {
  if (polygon < 0 || polygon >= static_cast<int>(p.polygons.size()))
    throw SurfaceError("add_interior_vertex_cut: polygon index out of range");
  const Word& w = p.polygons[static_cast<size_t>(polygon)];
  const int n = static_cast<int>(w.size());
  if (corner < 0 || corner >= n)
    throw SurfaceError("add_interior_vertex_cut: corner index out of range");
  if (p.occurrences().count(new_letter))
    throw SurfaceError("add_interior_vertex_cut: letter already in use: " +
                       new_letter);

  Word word;
  for (int k = 0; k < n; ++k) {
    if (k == corner) {
      word.emplace_back(new_letter, 1);
      word.emplace_back(new_letter, -1);
    }
    word.push_back(w[static_cast<size_t>(k)]);
  }
  GluingPattern out = p;
  out.polygons[static_cast<size_t>(polygon)] = word;
  out.validate();
  // the new letter is a fresh free generator of the enlarged groupoid; it is
  // not a word over the old letters, so the correspondence carries only the
  // identity entries implied for the old letters
  return {out, GeneratorCorrespondence{}};
}

}  // namespace modsurf

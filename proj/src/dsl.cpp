#include "crnkit/dsl.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace crnkit {
namespace {

struct RawTerm {
  std::string name;
  std::int64_t coefficient = 1;
  std::size_t line = 0;
  std::size_t column = 0;
};

struct RawReaction {
  std::vector<RawTerm> lhs;
  std::vector<RawTerm> rhs;
  double k_forw = 0.0;
  double k_rev = 0.0;
  std::size_t line = 0;
};

struct RawBoundary {
  RawTerm species;
  BoundaryDirection direction;
};

struct RawEquilibrium {
  std::vector<std::pair<RawTerm, double>> values;
  std::size_t line = 0;
};

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

class Cursor {
 public:
  Cursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return pos_ + 1; }
  std::size_t token_column() {
    skip_ws();
    return column();
  }
  std::size_t position() const { return pos_; }
  void reset(std::size_t pos) { pos_ = pos; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool consume(std::string_view literal) {
    skip_ws();
    if (text_.substr(pos_, literal.size()) == literal) {
      pos_ += literal.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view literal) {
    if (!consume(literal)) fail("expected '" + std::string(literal) + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(line_, column(), what);
  }

  std::string name() {
    skip_ws();
    if (pos_ >= text_.size() || !is_name_start(text_[pos_])) {
      fail("expected a species name");
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  RawTerm term() {
    skip_ws();
    RawTerm t;
    t.line = line_;
    t.column = column();
    if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
      if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == '/' ||
                                  text_[pos_] == 'e' || text_[pos_] == 'E')) {
        fail("stoichiometric coefficients must be integer literals");
      }
      const auto digits = text_.substr(start, pos_ - start);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(),
                                       t.coefficient);
      if (ec != std::errc()) {
        pos_ = start;
        fail("coefficient out of range");
      }
      if (t.coefficient == 0) {
        pos_ = start;
        fail("zero stoichiometric coefficient");
      }
    }
    t.name = name();
    return t;
  }

  std::vector<RawTerm> side() {
    std::vector<RawTerm> terms{term()};
    while (consume("+")) terms.push_back(term());
    return terms;
  }

  double number() {
    skip_ws();
    const std::size_t start = pos_;
    double v = 0.0;
    const char* first = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), v);
    if (ec != std::errc() || ptr == first) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - first);
    if (!std::isfinite(v)) {
      pos_ = start;
      fail("number must be finite");
    }
    return v;
  }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

RawReaction parse_reaction(Cursor& cur) {
  RawReaction rx;
  rx.line = cur.line();
  rx.lhs = cur.side();
  bool reversible = false;
  if (cur.consume("<->")) {
    reversible = true;
  } else if (!cur.consume("->")) {
    cur.fail("expected '<->' or '->'");
  }
  rx.rhs = cur.side();
  cur.expect(";");
  cur.expect("kf");
  cur.expect("=");
  const std::size_t kf_col = cur.token_column();
  rx.k_forw = cur.number();
  if (rx.k_forw < 0.0) throw ParseError(rx.line, kf_col, "rate constant must be nonnegative");
  if (reversible) {
    cur.expect("kr");
    cur.expect("=");
    const std::size_t kr_col = cur.token_column();
    rx.k_rev = cur.number();
    if (rx.k_rev < 0.0) {
      throw ParseError(rx.line, kr_col, "rate constant must be nonnegative");
    }
    if (rx.k_forw == 0.0 && rx.k_rev == 0.0) {
      throw ParseError(rx.line, 1, "reaction has both rate constants zero");
    }
  } else if (rx.k_forw == 0.0) {
    throw ParseError(rx.line, kf_col, "irreversible reaction with kf=0");
  }
  if (!cur.at_end()) cur.fail("unexpected trailing input");
  return rx;
}

}  // namespace

ReactionNetwork parse_network(std::string_view text) {
  std::vector<RawReaction> reactions;
  std::vector<RawBoundary> boundaries;
  std::optional<RawEquilibrium> equilibrium;
  std::optional<std::vector<RawTerm>> declared_species;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }

    Cursor cur(line, line_no);
    if (cur.at_end()) {
      if (end == text.size()) break;
      continue;
    }

    // Keyword statements are a name immediately followed by ':'.
    const bool maybe_keyword = is_name_start(cur.peek());
    const std::size_t keyword_pos = cur.position();
    std::string keyword;
    if (maybe_keyword) {
      keyword = cur.name();
      if (!cur.consume(":")) {
        keyword.clear();
        cur.reset(keyword_pos);
      }
    }

    if (keyword.empty()) {
      reactions.push_back(parse_reaction(cur));
    } else if (keyword == "species") {
      if (declared_species) cur.fail("duplicate species line");
      declared_species.emplace();
      while (!cur.at_end()) {
        RawTerm t;
        t.line = line_no;
        t.column = cur.token_column();
        t.name = cur.name();
        for (const auto& prev : *declared_species) {
          if (prev.name == t.name) {
            throw ParseError(t.line, t.column, "duplicate species '" + t.name + "'");
          }
        }
        declared_species->push_back(std::move(t));
      }
    } else if (keyword == "boundary") {
      RawBoundary b;
      b.species.line = line_no;
      b.species.column = cur.token_column();
      b.species.name = cur.name();
      const std::size_t dir_col = cur.token_column();
      const std::string dir = cur.at_end() ? std::string() : cur.name();
      if (dir == "in") {
        b.direction = BoundaryDirection::kUptake;
      } else if (dir == "out") {
        b.direction = BoundaryDirection::kDemand;
      } else {
        throw ParseError(line_no, dir_col, "boundary direction must be 'in' or 'out'");
      }
      if (!cur.at_end()) cur.fail("one boundary species per line");
      boundaries.push_back(std::move(b));
    } else if (keyword == "equilibrium") {
      if (equilibrium) cur.fail("duplicate equilibrium line");
      equilibrium.emplace();
      equilibrium->line = line_no;
      while (!cur.at_end()) {
        RawTerm t;
        t.line = line_no;
        t.column = cur.token_column();
        t.name = cur.name();
        cur.expect("=");
        const std::size_t value_col = cur.token_column();
        const double v = cur.number();
        if (!(v > 0.0)) throw ParseError(line_no, value_col, "equilibrium values must be positive");
        equilibrium->values.emplace_back(std::move(t), v);
      }
    } else {
      throw ParseError(line_no, keyword_pos + 1, "unknown statement '" + keyword + "'");
    }
    if (end == text.size()) break;
  }

  ReactionNetwork net;
  std::map<std::string, std::size_t> index;
  if (declared_species) {
    for (const auto& s : *declared_species) {
      index.emplace(s.name, net.species.size());
      net.species.push_back(s.name);
    }
  }
  auto resolve = [&](const RawTerm& t, bool may_declare) -> std::size_t {
    if (auto it = index.find(t.name); it != index.end()) return it->second;
    if (!may_declare) {
      throw ParseError(t.line, t.column, "unknown species '" + t.name + "'");
    }
    index.emplace(t.name, net.species.size());
    net.species.push_back(t.name);
    return net.species.size() - 1;
  };

  const bool first_appearance = !declared_species.has_value();
  for (const auto& raw : reactions) {
    Reaction rx;
    for (const auto& t : raw.lhs) rx.substrate.push_back({resolve(t, first_appearance), t.coefficient});
    for (const auto& t : raw.rhs) rx.product.push_back({resolve(t, first_appearance), t.coefficient});
    rx.substrate = canonical_complex(std::move(rx.substrate));
    rx.product = canonical_complex(std::move(rx.product));
    if (rx.substrate == rx.product) {
      throw ParseError(raw.line, 1, "substrate and product complexes are identical");
    }
    rx.k_forw = raw.k_forw;
    rx.k_rev = raw.k_rev;
    net.reactions.push_back(std::move(rx));
  }
  for (const auto& b : boundaries) {
    const std::size_t s = resolve(b.species, false);
    for (const auto& prev : net.boundary) {
      if (prev.species == s) {
        throw ParseError(b.species.line, b.species.column,
                         "species '" + b.species.name + "' declared boundary twice");
      }
    }
    net.boundary.push_back({s, b.direction});
  }
  if (equilibrium) {
    Vector x = Vector::Constant(static_cast<Eigen::Index>(net.species.size()), -1.0);
    for (const auto& [t, v] : equilibrium->values) {
      const auto i = static_cast<Eigen::Index>(resolve(t, false));
      if (x[i] > 0.0) throw ParseError(t.line, t.column, "species '" + t.name + "' given twice");
      x[i] = v;
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (!(x[i] > 0.0)) {
        throw ParseError(equilibrium->line, 1,
                         "equilibrium line is missing species '" +
                             net.species[static_cast<std::size_t>(i)] + "'");
      }
    }
    net.equilibrium = std::move(x);
  }
  net.validate();
  return net;
}

ReactionNetwork read_network_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_network(buf.str());
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string render_network(const ReactionNetwork& net) {
  net.validate();
  if (net.species.empty()) throw InvalidArgument("cannot render a network without species");
  std::string out = "species:";
  for (const auto& s : net.species) out += " " + s;
  out += "\n";
  for (const auto& rx : net.reactions) {
    out += net.complex_label(rx.substrate);
    if (rx.k_rev == 0.0) {
      out += " -> " + net.complex_label(rx.product) + " ; kf=" + format_double(rx.k_forw);
    } else {
      out += " <-> " + net.complex_label(rx.product) + " ; kf=" + format_double(rx.k_forw) +
             " kr=" + format_double(rx.k_rev);
    }
    out += "\n";
  }
  for (const auto& b : net.boundary) {
    out += "boundary: " + net.species[b.species] +
           (b.direction == BoundaryDirection::kUptake ? " in\n" : " out\n");
  }
  if (net.equilibrium) {
    out += "equilibrium:";
    for (std::size_t i = 0; i < net.species.size(); ++i) {
      out += " " + net.species[i] + "=" +
             format_double((*net.equilibrium)[static_cast<Eigen::Index>(i)]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace crnkit

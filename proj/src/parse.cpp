#include "hpn/parse.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace hpn {
namespace {

struct Cursor {
  const std::string& s;
  int line;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line, static_cast<int>(pos) + 1, msg);
  }
  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool at_end() {
    skip_ws();
    return pos >= s.size();
  }
  bool peek_is(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }
  void expect(char c) {
    skip_ws();
    if (pos >= s.size() || s[pos] != c)
      fail(std::string("expected '") + c + "'");
    ++pos;
  }
  void expect_arrow() {
    skip_ws();
    if (pos + 1 >= s.size() || s[pos] != '-' || s[pos + 1] != '>')
      fail("expected '->'");
    pos += 2;
  }
  std::string word() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                              s[pos] == '_' || s[pos] == '-' || s[pos] == '.'))
      ++pos;
    if (pos == start) fail("expected identifier");
    return s.substr(start, pos - start);
  }
  std::string number_token() {
    skip_ws();
    std::size_t start = pos;
    if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
    while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) ||
                              s[pos] == '.' || s[pos] == '/'))
      ++pos;
    if (pos == start) fail("expected number");
    return s.substr(start, pos - start);
  }
  Rat rational() {
    skip_ws();
    std::size_t at = pos;
    try {
      return rat_from_string(number_token());
    } catch (const std::invalid_argument& e) {
      pos = at;
      fail(e.what());
    }
  }
};

}  // namespace

HybridNet parse_model(const std::string& text) {
  HybridNet net;
  struct ArcSpec {
    int line;
    std::string src, dst;
    Rat weight;
  };
  std::vector<ArcSpec> arcs;
  bool any_speed = false, any_nospeed = false;
  bool any_duration = false, any_interval = false;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    Cursor c{raw, lineno};
    if (c.at_end()) continue;
    std::string kw = c.word();
    if (kw == "place") {
      Place p;
      p.id = c.word();
      if (net.place_index(p.id) >= 0 || net.transition_index(p.id) >= 0)
        c.fail("duplicate identifier '" + p.id + "'");
      std::string kind = c.word();
      if (kind == "continuous")
        p.kind = NodeKind::Continuous;
      else if (kind == "discrete")
        p.kind = NodeKind::Discrete;
      else
        c.fail("place kind must be 'continuous' or 'discrete'");
      c.expect('=');
      Rat m0 = c.rational();
      if (m0 < 0) c.fail("initial marking must be non-negative");
      if (p.kind == NodeKind::Discrete && denominator(m0) != 1)
        c.fail("discrete place initial marking must be an integer");
      if (!c.at_end()) c.fail("trailing text after place declaration");
      net.places.push_back(p);
      net.initial_marking.push_back(m0);
    } else if (kw == "transition") {
      Transition t;
      t.id = c.word();
      if (net.place_index(t.id) >= 0 || net.transition_index(t.id) >= 0)
        c.fail("duplicate identifier '" + t.id + "'");
      std::string kind = c.word();
      if (kind == "continuous") {
        t.kind = NodeKind::Continuous;
        if (c.at_end()) {
          any_nospeed = true;
        } else {
          if (c.word() != "speed") c.fail("expected 'speed=<rational>'");
          c.expect('=');
          t.max_speed = c.rational();
          if (t.max_speed < 0) c.fail("speed must be non-negative");
          any_speed = true;
        }
      } else if (kind == "discrete") {
        t.kind = NodeKind::Discrete;
        std::string attr = c.word();
        if (attr == "duration") {
          c.expect('=');
          Rat d = c.rational();
          if (d < 0) c.fail("duration must be non-negative");
          t.duration = d;
          any_duration = true;
        } else if (attr == "interval") {
          c.expect('=');
          c.expect('[');
          Rat lo = c.rational();
          if (lo < 0) c.fail("interval bound must be non-negative");
          c.expect(',');
          ExtRat hi;
          if (c.peek_is('i')) {
            if (c.word() != "inf") c.fail("expected rational or 'inf'");
          } else {
            hi = c.rational();
            if (*hi < lo) c.fail("malformed interval: alpha > beta");
          }
          c.expect(']');
          t.interval = Interval{lo, hi};
          any_interval = true;
        } else {
          c.fail("discrete transition needs 'duration=' or 'interval='");
        }
      } else {
        c.fail("transition kind must be 'continuous' or 'discrete'");
      }
      if (!c.at_end()) c.fail("trailing text after transition declaration");
      net.transitions.push_back(t);
    } else if (kw == "arc") {
      ArcSpec a;
      a.line = lineno;
      a.src = c.word();
      c.expect_arrow();
      a.dst = c.word();
      a.weight = 1;
      if (!c.at_end()) {
        if (c.word() != "weight") c.fail("expected 'weight=<rational>'");
        c.expect('=');
        a.weight = c.rational();
        if (a.weight < 0) c.fail("weight must be non-negative");
        if (!c.at_end()) c.fail("trailing text after arc");
      }
      arcs.push_back(std::move(a));
    } else {
      c.fail("unknown directive '" + kw + "'");
    }
  }

  if (net.places.empty()) throw ParseError(lineno + 1, 1, "net must have >=1 place");

  net.pre.assign(net.num_places(), std::vector<Rat>(net.num_transitions()));
  net.post.assign(net.num_places(), std::vector<Rat>(net.num_transitions()));
  for (const auto& a : arcs) {
    int ps = net.place_index(a.src), ts = net.transition_index(a.src);
    int pd = net.place_index(a.dst), td = net.transition_index(a.dst);
    if (ps >= 0 && td >= 0) {
      net.pre[ps][td] += a.weight;
    } else if (ts >= 0 && pd >= 0) {
      net.post[pd][ts] += a.weight;
    } else if (ps < 0 && ts < 0) {
      throw ParseError(a.line, 1, "undeclared node '" + a.src + "'");
    } else if (pd < 0 && td < 0) {
      throw ParseError(a.line, 1, "undeclared node '" + a.dst + "'");
    } else {
      throw ParseError(a.line, 1,
                       "arc must connect a place and a transition (got '" +
                           a.src + " -> " + a.dst + "')");
    }
  }

  bool any_discrete = any_duration || any_interval;
  for (const auto& p : net.places)
    if (p.kind == NodeKind::Discrete) any_discrete = true;
  if (any_duration && any_interval)
    throw ParseError(lineno + 1, 1,
                     "cannot mix duration= and interval= discrete transitions");
  if (any_speed && any_nospeed)
    throw ParseError(lineno + 1, 1,
                     "either all continuous transitions declare a speed or none");
  if (any_interval)
    net.net_class = NetClass::DElementary;
  else if (any_discrete)
    net.net_class = NetClass::HybridTimed;
  else if (any_speed)
    net.net_class = NetClass::CCPN;
  else
    net.net_class = NetClass::AutonomousContinuous;
  return net;
}

HybridNet parse_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string serialize_model(const HybridNet& net) {
  std::ostringstream out;
  for (std::size_t i = 0; i < net.num_places(); ++i) {
    const auto& p = net.places[i];
    out << "place " << p.id << ' '
        << (p.kind == NodeKind::Continuous ? "continuous" : "discrete") << " = "
        << to_frac_string(net.initial_marking[i]) << '\n';
  }
  for (const auto& t : net.transitions) {
    out << "transition " << t.id;
    if (t.kind == NodeKind::Continuous) {
      out << " continuous";
      if (net.net_class != NetClass::AutonomousContinuous)
        out << " speed=" << to_frac_string(t.max_speed);
    } else if (t.duration) {
      out << " discrete duration=" << to_frac_string(*t.duration);
    } else {
      const auto& iv = *t.interval;
      out << " discrete interval=[" << to_frac_string(iv.lo) << ',';
      if (iv.hi)
        out << to_frac_string(*iv.hi);
      else
        out << "inf";
      out << ']';
    }
    out << '\n';
  }
  for (std::size_t i = 0; i < net.num_places(); ++i) {
    for (std::size_t j = 0; j < net.num_transitions(); ++j) {
      if (net.pre[i][j] > 0) {
        out << "arc " << net.places[i].id << " -> " << net.transitions[j].id;
        if (net.pre[i][j] != 1) out << " weight=" << to_frac_string(net.pre[i][j]);
        out << '\n';
      }
      if (net.post[i][j] > 0) {
        out << "arc " << net.transitions[j].id << " -> " << net.places[i].id;
        if (net.post[i][j] != 1) out << " weight=" << to_frac_string(net.post[i][j]);
        out << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace hpn

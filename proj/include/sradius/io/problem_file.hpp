#pragma once

// Line-oriented problem file.
//
//   sradius-problem 1
//   kind stability|controllability|stabilizability
//   norm frobenius|spectral
//   dims <n> <m> <p>
//   structure full <t1> <t2> | diagonal | vector | general <t1> <t2>
//   matrix <NAME> <rows> <cols>     followed by <rows> lines of <cols> numbers
//   config <key> <value>            eps xi max_iter gamma_cap gamma_policy
//                                   trials seed single_stage
//   end
//
// Matrix names: A0, B0, A_i, B_i (i = 1..p; omitted means zero), and for
// the general structure G0 (optional constant) and G_i. '#' starts a comment.

#include "sradius/affine.hpp"
#include "sradius/radius.hpp"
#include "sradius/realify.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sradius::io {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

struct ConfigOverrides {
  std::optional<double> eps, xi, gamma_cap;
  std::optional<int> max_iter, trials;
  std::optional<std::uint64_t> seed;
  std::optional<GammaPolicy> gamma_policy;
  std::optional<bool> single_stage;

  bool operator==(const ConfigOverrides&) const = default;

  void apply(SolverConfig& cfg) const {
    if (eps) cfg.eps = *eps;
    if (xi) cfg.xi = *xi;
    if (gamma_cap) cfg.gamma_cap = *gamma_cap;
    if (max_iter) cfg.max_iter = *max_iter;
    if (gamma_policy) cfg.gamma_policy = *gamma_policy;
    if (single_stage) cfg.two_stage = !*single_stage;
  }
};

struct ProblemFile {
  PencilKind kind = PencilKind::Stability;
  NormKind norm = NormKind::Frobenius;
  Index n = 0, m = 0, p = 0;
  MatrixXd a0, b0;
  std::vector<MatrixXd> a, b;  // p blocks each (zeros when omitted)
  StructureForm form = StructureForm::Full;
  Index t1 = 0, t2 = 0;
  MatrixXd g0;
  std::vector<MatrixXd> g;  // general structure only
  ConfigOverrides config;

  bool operator==(const ProblemFile& o) const {
    auto eq = [](const std::vector<MatrixXd>& x, const std::vector<MatrixXd>& y) {
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i].rows() != y[i].rows() || x[i].cols() != y[i].cols() || x[i] != y[i]) return false;
      return true;
    };
    auto eqm = [](const MatrixXd& x, const MatrixXd& y) {
      return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
    };
    return kind == o.kind && norm == o.norm && n == o.n && m == o.m && p == o.p && eqm(a0, o.a0) &&
           eqm(b0, o.b0) && eq(a, o.a) && eq(b, o.b) && form == o.form && t1 == o.t1 && t2 == o.t2 &&
           eqm(g0, o.g0) && eq(g, o.g) && config == o.config;
  }

  StructureMap structure() const {
    switch (form) {
      case StructureForm::Full: return StructureMap::full(t1, t2);
      case StructureForm::Diagonal: return StructureMap::diagonal(p);
      case StructureForm::Vector: return StructureMap::vector(p);
      case StructureForm::General: return StructureMap::general(g0, g);
    }
    throw std::logic_error("unknown structure form");
  }

  RadiusProblem to_problem() const {
    AffineFamily fa(a0, a);
    if (kind == PencilKind::Stability) return RadiusProblem(StructuredPencil(kind, std::move(fa)), structure(), norm);
    return RadiusProblem(StructuredPencil(kind, std::move(fa), AffineFamily(b0, b)), structure(), norm);
  }

  static ProblemFile from_problem(const RadiusProblem& prob, ConfigOverrides config = {}) {
    ProblemFile f;
    const auto& pen = prob.pencil();
    f.kind = pen.kind();
    f.norm = prob.norm();
    f.n = pen.n();
    f.m = pen.b() ? pen.b()->cols() : 0;
    f.p = pen.num_params();
    f.a0 = pen.a().base();
    f.a = pen.a().basis();
    if (pen.b()) {
      f.b0 = pen.b()->base();
      f.b = pen.b()->basis();
    }
    const auto& map = prob.map();
    f.form = map.form();
    f.t1 = map.rows();
    f.t2 = map.cols();
    if (f.form == StructureForm::General) {
      f.g0 = map.constant();
      f.g = map.basis();
    }
    f.config = config;
    return f;
  }
};

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline const char* kind_token(PencilKind k) {
  switch (k) {
    case PencilKind::Controllability: return "controllability";
    case PencilKind::Stabilizability: return "stabilizability";
    case PencilKind::Stability: return "stability";
  }
  return "?";
}

inline void write_matrix(std::ostream& os, const std::string& name, const MatrixXd& M) {
  os << "matrix " << name << ' ' << M.rows() << ' ' << M.cols() << '\n';
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) os << (j ? " " : "") << fmt17(M(i, j));
    os << '\n';
  }
}

struct Token {
  std::string text;
  int column = 0;  // 1-based
};

inline std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t end = line.find('#');
  const std::size_t lim = end == std::string::npos ? line.size() : end;
  while (i < lim) {
    while (i < lim && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= lim) break;
    const std::size_t s = i;
    while (i < lim && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(s, i - s), static_cast<int>(s + 1)});
  }
  return out;
}

inline double parse_number(const Token& t, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(t.text, &used);
    if (used != t.text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, t.column, "expected a number, got '" + t.text + "'");
  }
}

inline long long parse_integer(const Token& t, int line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(t.text, &used);
    if (used != t.text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, t.column, "expected an integer, got '" + t.text + "'");
  }
}

}  // namespace detail

/// Canonical text: every nonzero block, %.17g numbers.
inline void write_problem(std::ostream& os, const ProblemFile& f) {
  os << "sradius-problem 1\n";
  os << "kind " << detail::kind_token(f.kind) << '\n';
  os << "norm " << (f.norm == NormKind::Frobenius ? "frobenius" : "spectral") << '\n';
  os << "dims " << f.n << ' ' << f.m << ' ' << f.p << '\n';
  switch (f.form) {
    case StructureForm::Full: os << "structure full " << f.t1 << ' ' << f.t2 << '\n'; break;
    case StructureForm::Diagonal: os << "structure diagonal\n"; break;
    case StructureForm::Vector: os << "structure vector\n"; break;
    case StructureForm::General: os << "structure general " << f.t1 << ' ' << f.t2 << '\n'; break;
  }
  detail::write_matrix(os, "A0", f.a0);
  for (std::size_t i = 0; i < f.a.size(); ++i)
    if (!f.a[i].isZero(0.0)) detail::write_matrix(os, "A_" + std::to_string(i + 1), f.a[i]);
  if (f.kind != PencilKind::Stability) {
    detail::write_matrix(os, "B0", f.b0);
    for (std::size_t i = 0; i < f.b.size(); ++i)
      if (!f.b[i].isZero(0.0)) detail::write_matrix(os, "B_" + std::to_string(i + 1), f.b[i]);
  }
  if (f.form == StructureForm::General) {
    if (!f.g0.isZero(0.0)) detail::write_matrix(os, "G0", f.g0);
    for (std::size_t i = 0; i < f.g.size(); ++i) detail::write_matrix(os, "G_" + std::to_string(i + 1), f.g[i]);
  }
  const auto& c = f.config;
  if (c.eps) os << "config eps " << detail::fmt17(*c.eps) << '\n';
  if (c.xi) os << "config xi " << detail::fmt17(*c.xi) << '\n';
  if (c.max_iter) os << "config max_iter " << *c.max_iter << '\n';
  if (c.gamma_cap) os << "config gamma_cap " << detail::fmt17(*c.gamma_cap) << '\n';
  if (c.gamma_policy) os << "config gamma_policy " << (*c.gamma_policy == GammaPolicy::Capped ? "capped" : "uncapped") << '\n';
  if (c.trials) os << "config trials " << *c.trials << '\n';
  if (c.seed) os << "config seed " << *c.seed << '\n';
  if (c.single_stage) os << "config single_stage " << (*c.single_stage ? 1 : 0) << '\n';
  os << "end\n";
}

inline std::string to_text(const ProblemFile& f) {
  std::ostringstream os;
  write_problem(os, f);
  return os.str();
}

inline ProblemFile parse_problem(std::istream& is) {
  ProblemFile f;
  std::string raw;
  int ln = 0;
  bool header = false, have_kind = false, have_norm = false, have_dims = false, have_structure = false, ended = false;
  bool have_a0 = false, have_b0 = false;
  int structure_line = 0;

  auto expect_count = [&](const std::vector<detail::Token>& t, std::size_t n, const char* what) {
    if (t.size() != n)
      throw ParseError(ln, t.empty() ? 1 : t.back().column, std::string(what) + ": expected " + std::to_string(n - 1) +
                                                              " argument(s), got " + std::to_string(t.size() - 1));
  };
  auto next_tokens = [&]() -> std::optional<std::vector<detail::Token>> {
    while (std::getline(is, raw)) {
      ++ln;
      auto t = detail::tokenize(raw);
      if (!t.empty()) return t;
    }
    return std::nullopt;
  };

  while (auto tk = next_tokens()) {
    auto& t = *tk;
    if (ended) throw ParseError(ln, t[0].column, "content after 'end'");
    if (!header) {
      if (t[0].text != "sradius-problem") throw ParseError(ln, t[0].column, "missing 'sradius-problem' header");
      if (t.size() != 2 || t[1].text != "1")
        throw ParseError(ln, t.size() > 1 ? t[1].column : t[0].column, "unsupported format version");
      header = true;
      continue;
    }
    const std::string& kw = t[0].text;
    if (kw == "kind") {
      expect_count(t, 2, "kind");
      if (t[1].text == "controllability") f.kind = PencilKind::Controllability;
      else if (t[1].text == "stabilizability") f.kind = PencilKind::Stabilizability;
      else if (t[1].text == "stability") f.kind = PencilKind::Stability;
      else throw ParseError(ln, t[1].column, "unknown kind '" + t[1].text + "'");
      have_kind = true;
    } else if (kw == "norm") {
      expect_count(t, 2, "norm");
      if (t[1].text == "frobenius") f.norm = NormKind::Frobenius;
      else if (t[1].text == "spectral") f.norm = NormKind::Spectral;
      else throw ParseError(ln, t[1].column, "unknown norm '" + t[1].text + "'");
      have_norm = true;
    } else if (kw == "dims") {
      expect_count(t, 4, "dims");
      f.n = detail::parse_integer(t[1], ln);
      f.m = detail::parse_integer(t[2], ln);
      f.p = detail::parse_integer(t[3], ln);
      if (f.n < 1) throw ParseError(ln, t[1].column, "n must be positive");
      if (f.m < 0) throw ParseError(ln, t[2].column, "m must be nonnegative");
      if (f.p < 1) throw ParseError(ln, t[3].column, "p must be positive");
      f.a.assign(static_cast<std::size_t>(f.p), MatrixXd::Zero(f.n, f.n));
      f.b.assign(static_cast<std::size_t>(f.p), MatrixXd::Zero(f.n, f.m));
      have_dims = true;
    } else if (kw == "structure") {
      if (t.size() < 2) throw ParseError(ln, t[0].column, "structure: missing form");
      structure_line = ln;
      const std::string& form = t[1].text;
      if (form == "full" || form == "general") {
        expect_count(t, 4, "structure");
        f.form = form == "full" ? StructureForm::Full : StructureForm::General;
        f.t1 = detail::parse_integer(t[2], ln);
        f.t2 = detail::parse_integer(t[3], ln);
        if (f.t1 < 1 || f.t2 < 1) throw ParseError(ln, t[2].column, "structure dimensions must be positive");
      } else if (form == "diagonal" || form == "vector") {
        expect_count(t, 2, "structure");
        f.form = form == "diagonal" ? StructureForm::Diagonal : StructureForm::Vector;
      } else {
        throw ParseError(ln, t[1].column, "unknown structure form '" + form + "'");
      }
      have_structure = true;
    } else if (kw == "matrix") {
      expect_count(t, 4, "matrix");
      if (!have_dims) throw ParseError(ln, t[0].column, "'dims' must precede matrix blocks");
      const std::string name = t[1].text;
      const long long r = detail::parse_integer(t[2], ln), c = detail::parse_integer(t[3], ln);
      if (r < 1 || c < 1) throw ParseError(ln, t[2].column, "matrix dimensions must be positive");
      const int header_line = ln;
      MatrixXd M(r, c);
      for (long long i = 0; i < r; ++i) {
        auto row = next_tokens();
        if (!row) throw ParseError(ln + 1, 1, "unexpected end of file inside matrix " + name);
        if (static_cast<long long>(row->size()) != c)
          throw ParseError(ln, static_cast<long long>(row->size()) > c ? (*row)[static_cast<std::size_t>(c)].column : row->back().column,
                           "matrix " + name + ": expected " + std::to_string(c) + " entries, got " +
                               std::to_string(row->size()));
        for (long long j = 0; j < c; ++j) M(i, j) = detail::parse_number((*row)[static_cast<std::size_t>(j)], ln);
      }
      auto check_shape = [&](Index rr, Index cc) {
        if (M.rows() != rr || M.cols() != cc)
          throw ParseError(header_line, t[2].column,
                           "matrix " + name + " must be " + std::to_string(rr) + "x" + std::to_string(cc));
      };
      auto index_of = [&](const std::string& prefix) -> std::size_t {
        const long long k = detail::parse_integer({name.substr(prefix.size()), t[1].column + static_cast<int>(prefix.size())}, header_line);
        if (k < 1 || k > f.p) throw ParseError(header_line, t[1].column, "parameter index out of range in " + name);
        return static_cast<std::size_t>(k - 1);
      };
      if (name == "A0") {
        check_shape(f.n, f.n);
        f.a0 = M;
        have_a0 = true;
      } else if (name == "B0") {
        check_shape(f.n, f.m);
        f.b0 = M;
        have_b0 = true;
      } else if (name.rfind("A_", 0) == 0) {
        check_shape(f.n, f.n);
        f.a[index_of("A_")] = M;
      } else if (name.rfind("B_", 0) == 0) {
        check_shape(f.n, f.m);
        f.b[index_of("B_")] = M;
      } else if (name == "G0" || name.rfind("G_", 0) == 0) {
        if (!have_structure || f.form != StructureForm::General)
          throw ParseError(header_line, t[1].column, "G blocks require a preceding 'structure general'");
        check_shape(f.t1, f.t2);
        if (name == "G0") {
          f.g0 = M;
        } else {
          if (f.g.empty()) f.g.assign(static_cast<std::size_t>(f.p), MatrixXd::Zero(f.t1, f.t2));
          f.g[index_of("G_")] = M;
        }
      } else {
        throw ParseError(header_line, t[1].column, "unknown matrix name '" + name + "'");
      }
    } else if (kw == "config") {
      expect_count(t, 3, "config");
      const std::string& key = t[1].text;
      auto& c = f.config;
      if (key == "eps") c.eps = detail::parse_number(t[2], ln);
      else if (key == "xi") c.xi = detail::parse_number(t[2], ln);
      else if (key == "gamma_cap") c.gamma_cap = detail::parse_number(t[2], ln);
      else if (key == "max_iter") c.max_iter = static_cast<int>(detail::parse_integer(t[2], ln));
      else if (key == "trials") c.trials = static_cast<int>(detail::parse_integer(t[2], ln));
      else if (key == "seed") c.seed = static_cast<std::uint64_t>(detail::parse_integer(t[2], ln));
      else if (key == "single_stage") c.single_stage = detail::parse_integer(t[2], ln) != 0;
      else if (key == "gamma_policy") {
        if (t[2].text == "capped") c.gamma_policy = GammaPolicy::Capped;
        else if (t[2].text == "uncapped") c.gamma_policy = GammaPolicy::Uncapped;
        else throw ParseError(ln, t[2].column, "gamma_policy must be 'capped' or 'uncapped'");
      } else {
        throw ParseError(ln, t[1].column, "unknown config key '" + key + "'");
      }
    } else if (kw == "end") {
      expect_count(t, 1, "end");
      ended = true;
    } else {
      throw ParseError(ln, t[0].column, "unknown section '" + kw + "'");
    }
  }

  if (!header) throw ParseError(ln + 1, 1, "empty problem file");
  if (!ended) throw ParseError(ln + 1, 1, "missing 'end'");
  if (!have_kind) throw ParseError(ln, 1, "missing 'kind'");
  if (!have_norm) throw ParseError(ln, 1, "missing 'norm'");
  if (!have_dims) throw ParseError(ln, 1, "missing 'dims'");
  if (!have_structure) throw ParseError(ln, 1, "missing 'structure'");
  if (!have_a0) throw ParseError(ln, 1, "missing matrix A0");
  if (f.kind == PencilKind::Stability) {
    if (f.m != 0) throw ParseError(ln, 1, "stability problems take m = 0");
    f.b.clear();
  } else {
    if (f.m < 1) throw ParseError(ln, 1, "controllability/stabilizability problems need m >= 1");
    if (!have_b0) throw ParseError(ln, 1, "missing matrix B0");
  }
  switch (f.form) {
    case StructureForm::Full:
      if (f.t1 * f.t2 != f.p) throw ParseError(structure_line, 1, "full structure needs t1*t2 = p");
      break;
    case StructureForm::Diagonal: f.t1 = f.t2 = f.p; break;
    case StructureForm::Vector: f.t1 = f.p; f.t2 = 1; break;
    case StructureForm::General:
      if (f.g.empty()) throw ParseError(structure_line, 1, "general structure needs G_i blocks");
      if (f.g0.size() == 0) f.g0 = MatrixXd::Zero(f.t1, f.t2);
      break;
  }
  return f;
}

inline ProblemFile parse_problem_text(const std::string& text) {
  std::istringstream is(text);
  return parse_problem(is);
}

inline ProblemFile read_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file '" + path + "'");
  return parse_problem(in);
}

inline void write_problem_file(const std::string& path, const ProblemFile& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_problem(out, f);
}

}  // namespace sradius::io

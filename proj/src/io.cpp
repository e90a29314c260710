#include "qsg/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace qsg {

namespace {

// Collects issues instead of stopping at the first one.
struct Issues {
  std::vector<std::string> list;
  void add(const std::string& ptr, const std::string& msg) { list.push_back((ptr.empty() ? "/" : ptr) + ": " + msg); }
  void raise() const {
    if (!list.empty()) throw SchemaError(list);
  }
};

std::string child(const std::string& ptr, const std::string& key) {
  std::string k;
  for (char ch : key) {
    if (ch == '~')
      k += "~0";
    else if (ch == '/')
      k += "~1";
    else
      k += ch;
  }
  return ptr + "/" + k;
}
std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

bool parse_rational_at(const json& j, const std::string& ptr, Issues& is, Rational* out) {
  if (j.is_number_integer()) {
    *out = j.is_number_unsigned() ? Rational(mpz_class(std::to_string(j.get<unsigned long long>())))
                                  : Rational(mpz_class(std::to_string(j.get<long long>())));
    return true;
  }
  if (j.is_number_float()) {
    is.add(ptr, "floating-point numbers are rejected; write the exact rational as \"p/q\"");
    return false;
  }
  if (!j.is_string()) {
    is.add(ptr, "expected a rational \"p/q\" or an integer");
    return false;
  }
  try {
    *out = parse_rational(j.get<std::string>());
    return true;
  } catch (const std::invalid_argument& e) {
    is.add(ptr, e.what());
    return false;
  }
}

bool parse_size(const json& j, const std::string& ptr, Issues& is, std::size_t* out) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0)) {
    is.add(ptr, "expected a nonnegative integer");
    return false;
  }
  *out = j.get<std::size_t>();
  return true;
}

// "x3^2", "x1*x2", "x1*x1"; variables are 1-based
bool parse_monomial(const std::string& s, std::size_t n, std::size_t* i, std::size_t* j) {
  auto var = [&](const std::string& t, std::size_t* v) {
    if (t.size() < 2 || t[0] != 'x') return false;
    for (std::size_t k = 1; k < t.size(); ++k)
      if (!std::isdigit(static_cast<unsigned char>(t[k]))) return false;
    const std::size_t idx = std::stoul(t.substr(1));
    if (idx < 1 || idx > n) return false;
    *v = idx - 1;
    return true;
  };
  const auto star = s.find('*'), hat = s.find('^');
  if (hat != std::string::npos) return s.substr(hat) == "^2" && var(s.substr(0, hat), i) && (*j = *i, true);
  if (star == std::string::npos) return false;
  return var(s.substr(0, star), i) && var(s.substr(star + 1), j);
}

QuadForm form_at(const json& j, const std::string& ptr, std::size_t n_hint, Issues& is) {
  if (!j.is_object()) {
    is.add(ptr, "expected a quadratic form object");
    return QuadForm();
  }
  std::size_t n = n_hint;
  if (j.contains("n")) parse_size(j["n"], child(ptr, "n"), is, &n);
  if (n == 0) {
    is.add(child(ptr, "n"), "missing or zero number of variables");
    return QuadForm();
  }
  QMatrix M(n, n);
  const std::size_t before = is.list.size();
  if (j.contains("matrix")) {
    const json& mj = j["matrix"];
    const std::string mp = child(ptr, "matrix");
    if (!mj.is_array() || mj.size() != n) {
      is.add(mp, "expected " + std::to_string(n) + " rows");
      return QuadForm();
    }
    for (std::size_t r = 0; r < n; ++r) {
      const json& row = mj[r];
      if (!row.is_array() || row.size() != n) {
        is.add(child(mp, r), "expected " + std::to_string(n) + " entries");
        continue;
      }
      for (std::size_t c = 0; c < n; ++c) parse_rational_at(row[c], child(child(mp, r), c), is, &M(r, c));
    }
    if (is.list.size() == before)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r + 1; c < n; ++c)
          if (M(r, c) != M(c, r)) is.add(child(child(mp, r), c), "matrix is not symmetric");
  } else {
    const bool nested = j.contains("monomials");
    const json& mono = nested ? j["monomials"] : j;
    const std::string mp = nested ? child(ptr, "monomials") : ptr;
    if (!mono.is_object()) {
      is.add(mp, "expected a monomial map");
      return QuadForm();
    }
    for (auto it = mono.begin(); it != mono.end(); ++it) {
      if (!nested && (it.key() == "n" || it.key() == "name")) continue;
      std::size_t a = 0, b = 0;
      if (!parse_monomial(it.key(), n, &a, &b)) {
        is.add(child(mp, it.key()), "not a monomial x_i*x_j or x_i^2 with 1 <= i, j <= n");
        continue;
      }
      Rational q;
      if (!parse_rational_at(it.value(), child(mp, it.key()), is, &q)) continue;
      if (a == b) {
        M(a, a) += q;
      } else {
        M(a, b) += q / 2;
        M(b, a) += q / 2;
      }
    }
  }
  if (is.list.size() != before) return QuadForm();
  QuadForm Q(M);
  if (j.contains("name")) {
    if (j["name"].is_string())
      Q.name = j["name"].get<std::string>();
    else
      is.add(child(ptr, "name"), "expected a string");
  }
  return Q;
}

}  // namespace

SchemaError::SchemaError(std::vector<std::string> issues)
    : std::runtime_error([&] {
        std::string s = "malformed input";
        for (const auto& i : issues) s += "\n  " + i;
        return s;
      }()),
      issues_(std::move(issues)) {}

json SchemaError::to_json() const { return json{{"status", "schema-error"}, {"errors", issues_}}; }

json rational_to_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const json& j, const std::string& pointer) {
  Issues is;
  Rational q;
  parse_rational_at(j, pointer, is, &q);
  is.raise();
  return q;
}

json quadform_to_json(const QuadForm& Q) {
  json rows = json::array();
  for (std::size_t r = 0; r < Q.n(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < Q.n(); ++c) row.push_back(to_string(Q.matrix()(r, c)));
    rows.push_back(row);
  }
  json j{{"n", Q.n()}, {"matrix", rows}};
  if (!Q.name.empty()) j["name"] = Q.name;
  return j;
}

QuadForm quadform_from_json(const json& j, const std::string& pointer, std::size_t n_hint) {
  Issues is;
  QuadForm Q = form_at(j, pointer, n_hint, is);
  is.raise();
  return Q;
}

json config_to_json(const Configuration& c) {
  json forms = json::array();
  for (const auto& Q : c.forms) forms.push_back(quadform_to_json(Q));
  json j{{"n", c.n}, {"forms", forms}, {"seed", c.seed}};
  if (c.delta != 0) j["delta"] = to_string(c.delta);
  return j;
}

Configuration config_from_json(const json& j) {
  Issues is;
  Configuration c;
  if (!j.is_object()) {
    is.add("", "expected a configuration object");
    is.raise();
  }
  if (!j.contains("n"))
    is.add("/n", "missing");
  else
    parse_size(j["n"], "/n", is, &c.n);
  if (!j.contains("forms") || !j["forms"].is_array()) {
    is.add("/forms", "expected an array of quadratic forms");
  } else {
    for (std::size_t i = 0; i < j["forms"].size(); ++i) {
      QuadForm Q = form_at(j["forms"][i], child("/forms", i), c.n, is);
      if (Q.n() != 0 && c.n != 0 && Q.n() != c.n)
        is.add(child(child("/forms", i), "n"), "form has " + std::to_string(Q.n()) + " variables, expected " +
                                                   std::to_string(c.n));
      c.forms.push_back(Q);
    }
  }
  if (j.contains("delta")) parse_rational_at(j["delta"], "/delta", is, &c.delta);
  if (j.contains("seed")) {
    if (j["seed"].is_number_unsigned())
      c.seed = j["seed"].get<unsigned long long>();
    else
      is.add("/seed", "expected a nonnegative integer");
  }
  is.raise();
  try {
    c.validate();
  } catch (const PreconditionError& e) {
    is.add("/forms", e.what());
  }
  is.raise();
  return c;
}

json triple_to_json(const Triple& t) {
  return json{{"n", t.n}, {"A", quadform_to_json(t.A)}, {"B", quadform_to_json(t.B)}, {"C", quadform_to_json(t.C)}};
}

Triple triple_from_json(const json& j) {
  Issues is;
  Triple t;
  if (!j.is_object()) {
    is.add("", "expected a triple object with keys A, B, C");
    is.raise();
  }
  if (j.contains("n")) parse_size(j["n"], "/n", is, &t.n);
  QuadForm* slots[3] = {&t.A, &t.B, &t.C};
  const char* keys[3] = {"A", "B", "C"};
  for (int k = 0; k < 3; ++k) {
    if (!j.contains(keys[k]))
      is.add(std::string("/") + keys[k], "missing");
    else
      *slots[k] = form_at(j[keys[k]], std::string("/") + keys[k], t.n, is);
  }
  is.raise();
  if (t.n == 0) t.n = t.A.n();
  for (int k = 0; k < 3; ++k)
    if (slots[k]->n() != t.n) is.add(std::string("/") + keys[k], "variable count disagrees with the triple");
  is.raise();
  return t;
}

json vector_to_json(const Vec<Rational>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

json subspace_to_json(const Subspace& V) {
  json rows = json::array();
  for (const auto& r : V.basis_rows()) rows.push_back(vector_to_json(r));
  return rows;
}

Subspace subspace_from_json(const json& j, std::size_t n, const std::string& pointer) {
  Issues is;
  std::vector<Vec<Rational>> rows;
  if (!j.is_array()) {
    is.add(pointer, "expected an array of basis rows");
  } else {
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_array() || j[i].size() != n) {
        is.add(child(pointer, i), "expected " + std::to_string(n) + " coordinates");
        continue;
      }
      Vec<Rational> v(n);
      for (std::size_t k = 0; k < n; ++k) parse_rational_at(j[i][k], child(child(pointer, i), k), is, &v[k]);
      rows.push_back(v);
    }
  }
  is.raise();
  return Subspace::span(n, rows);
}

json pointset_to_json(const PointSet& p) {
  json pts = json::array();
  for (const auto& v : p.points()) pts.push_back(vector_to_json(v));
  return json{{"dim", p.dim()}, {"points", pts}};
}

PointSet pointset_from_json(const json& j) {
  Issues is;
  std::size_t dim = 0;
  if (!j.is_object() || !j.contains("dim"))
    is.add("/dim", "missing");
  else
    parse_size(j["dim"], "/dim", is, &dim);
  std::vector<Vec<Rational>> pts;
  if (!j.is_object() || !j.contains("points") || !j["points"].is_array()) {
    is.add("/points", "expected an array of points");
  } else {
    for (std::size_t i = 0; i < j["points"].size(); ++i) {
      const json& p = j["points"][i];
      if (!p.is_array() || p.size() != dim) {
        is.add(child("/points", i), "expected " + std::to_string(dim) + " coordinates");
        continue;
      }
      Vec<Rational> v(dim);
      for (std::size_t k = 0; k < dim; ++k) parse_rational_at(p[k], child(child("/points", i), k), is, &v[k]);
      pts.push_back(v);
    }
  }
  is.raise();
  try {
    return PointSet::make(dim, pts);
  } catch (const std::exception& e) {
    is.add("/points", e.what());
  }
  is.raise();
  return PointSet(dim);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError({"/: cannot read " + path});
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw SchemaError({std::string("/: ") + e.what()});
  }
}

}  // namespace qsg

#pragma once

// kappa(g) = L(g) / sup |g| reported as the interval
// [tail_max / sup, path_bound / sup], plus seeded family sweeps with an
// append-only JSONL record store.

#include <atomic>
#include <cstdint>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "polymoments/moments.hpp"
#include "polymoments/pathopt.hpp"
#include "polymoments/reference.hpp"
#include "polymoments/roots.hpp"

namespace polymoments {

struct KappaConfig {
  unsigned P = 200;
  int nx = 512;
  int ny = 512;
  int levels = 3;
  MomentOptions moments;
};

struct KappaRecord {
  Poly poly;
  Interval interval{-1, 1};
  double sup_norm = 0.0;
  double tail_max = 0.0;        ///< finite-tail estimate of L
  double path_bound = 0.0;      ///< upper bound of L
  double kappa_estimate = 0.0;  ///< tail_max / sup_norm
  double kappa_upper = 0.0;     ///< path_bound / sup_norm
  unsigned P = 0;
  GridSpec grid;
  int levels = 0;
  std::optional<std::uint64_t> seed;
  std::string timestamp;
};

inline KappaRecord kappa_record(const Poly& f, const Interval& I, unsigned P, const GridSpec& grid, int levels) {
  if (f.degree() < 1) throw DomainError("kappa record needs a nonconstant polynomial");
  KappaRecord r;
  r.poly = f;
  r.interval = I;
  r.P = P;
  r.grid = grid;
  r.levels = levels;
  r.sup_norm = sup_norm(f, I).value;
  r.tail_max = limsup_estimate(moment_series(f, I, P)).tail_max;
  const ComplexFloat a(to_double(I.a), 0.0), b(to_double(I.b), 0.0);
  r.path_bound = minimax_path(f, a, b, grid, levels).bound;
  r.kappa_estimate = r.tail_max / r.sup_norm;
  r.kappa_upper = r.path_bound / r.sup_norm;
  return r;
}

/// Uses the default box around the endpoints and critical points.
inline KappaRecord kappa_record(const Poly& f, const Interval& I, const KappaConfig& cfg = {}) {
  const ComplexFloat a(to_double(I.a), 0.0), b(to_double(I.b), 0.0);
  return kappa_record(f, I, cfg.P, default_grid(f, a, b, cfg.nx, cfg.ny), cfg.levels);
}

// ---------------------------------------------------------------------------
// Persistence

/// FNV-1a of the coefficient string, as 16 hex digits.
inline std::string poly_hash(const Poly& f) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : format_poly(f)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string record_key(const Poly& f, const Interval& I, unsigned P, const GridSpec& g, int levels) {
  std::ostringstream os;
  os << poly_hash(f) << '|' << format_interval(I) << '|' << P << '|' << format_double(g.x_lo) << ','
     << format_double(g.x_hi) << ',' << format_double(g.y_lo) << ',' << format_double(g.y_hi) << '|' << g.nx << 'x'
     << g.ny << '|' << levels;
  return os.str();
}

inline std::string record_key(const KappaRecord& r) { return record_key(r.poly, r.interval, r.P, r.grid, r.levels); }

inline nlohmann::json to_json(const KappaRecord& r) {
  nlohmann::json grid = to_json(r.grid);
  grid["levels"] = r.levels;
  return {{"poly", format_poly(r.poly)},
          {"interval", {format_rational(r.interval.a), format_rational(r.interval.b)}},
          {"sup_norm", r.sup_norm},
          {"tail_max", r.tail_max},
          {"path_bound", r.path_bound},
          {"kappa_estimate", r.kappa_estimate},
          {"kappa_upper", r.kappa_upper},
          {"P", r.P},
          {"grid", grid},
          {"seed", r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr)},
          {"timestamp", r.timestamp}};
}

inline KappaRecord record_from_json(const nlohmann::json& j) {
  KappaRecord r;
  r.poly = parse_poly(j.at("poly").get<std::string>());
  r.interval = Interval(parse_rational(j.at("interval").at(0).get<std::string>()),
                        parse_rational(j.at("interval").at(1).get<std::string>()));
  r.sup_norm = j.at("sup_norm").get<double>();
  r.tail_max = j.at("tail_max").get<double>();
  r.path_bound = j.at("path_bound").get<double>();
  r.kappa_estimate = j.at("kappa_estimate").get<double>();
  r.kappa_upper = j.at("kappa_upper").get<double>();
  r.P = j.at("P").get<unsigned>();
  const auto& g = j.at("grid");
  const auto& box = g.at("box");
  r.grid = {box.at(0).get<double>(), box.at(1).get<double>(), box.at(2).get<double>(), box.at(3).get<double>(),
            g.at("nx").get<int>(), g.at("ny").get<int>()};
  r.levels = g.at("levels").get<int>();
  if (!j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
  r.timestamp = j.at("timestamp").get<std::string>();
  return r;
}

/// Append-only JSONL store keyed by (poly hash, interval, P, grid).
class RecordStore {
 public:
  explicit RecordStore(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      KappaRecord r = record_from_json(nlohmann::json::parse(line));
      records_.emplace(record_key(r), std::move(r));
    }
  }

  const std::string& path() const { return path_; }
  std::size_t size() const { return records_.size(); }

  const KappaRecord* find(const std::string& key) const {
    auto it = records_.find(key);
    return it == records_.end() ? nullptr : &it->second;
  }

  void append(const KappaRecord& r) {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw Error("cannot open record store " + path_);
    out << to_json(r).dump() << '\n';
    records_.emplace(record_key(r), r);
  }

 private:
  std::string path_;
  std::unordered_map<std::string, KappaRecord> records_;
};

// ---------------------------------------------------------------------------
// Sweeps

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct SweepConfig {
  KappaConfig kappa;
  std::optional<std::string> store_path;
  /// Stamped on new records; empty means the current UTC time.
  std::string timestamp;
  unsigned threads = 0;  ///< 0 = hardware concurrency
};

struct DegreeMinimum {
  int degree = 0;
  double kappa_upper = 0.0;
  std::string witness;
  std::size_t witness_index = 0;
};

struct SweepSummary {
  std::string family;
  std::size_t count = 0;
  std::optional<std::uint64_t> seed;
  std::map<int, DegreeMinimum> per_degree;
  std::vector<KappaRecord> records;
  /// Quadratic family only: the t of the overall minimum.
  std::optional<BigRational> argmin_t;
};

namespace detail {

// Runs task(k) for k < n on a small pool; results stay indexed by k.
template <class Task>
void parallel_for(std::size_t n, unsigned threads, Task&& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        task(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline SweepSummary run_sweep(std::string family, const std::vector<Poly>& polys, const Interval& I,
                              std::optional<std::uint64_t> seed, const SweepConfig& cfg) {
  std::optional<RecordStore> store;
  if (cfg.store_path) store.emplace(*cfg.store_path);
  const std::string stamp = cfg.timestamp.empty() ? utc_timestamp() : cfg.timestamp;

  std::vector<KappaRecord> records(polys.size());
  std::vector<char> fresh(polys.size(), 1);
  std::vector<GridSpec> grids(polys.size());
  for (std::size_t k = 0; k < polys.size(); ++k) {
    const ComplexFloat a(to_double(I.a), 0.0), b(to_double(I.b), 0.0);
    grids[k] = default_grid(polys[k], a, b, cfg.kappa.nx, cfg.kappa.ny);
    if (store) {
      if (const auto* hit = store->find(record_key(polys[k], I, cfg.kappa.P, grids[k], cfg.kappa.levels))) {
        records[k] = *hit;
        fresh[k] = 0;
      }
    }
  }
  parallel_for(polys.size(), cfg.threads, [&](std::size_t k) {
    if (!fresh[k]) return;
    records[k] = kappa_record(polys[k], I, cfg.kappa.P, grids[k], cfg.kappa.levels);
    records[k].seed = seed;
    records[k].timestamp = stamp;
  });
  if (store)
    for (std::size_t k = 0; k < records.size(); ++k)
      if (fresh[k]) store->append(records[k]);

  SweepSummary s;
  s.family = std::move(family);
  s.count = records.size();
  s.seed = seed;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const int deg = records[k].poly.degree();
    auto it = s.per_degree.find(deg);
    if (it == s.per_degree.end() || records[k].kappa_upper < it->second.kappa_upper)
      s.per_degree[deg] = {deg, records[k].kappa_upper, format_poly(records[k].poly), k};
  }
  s.records = std::move(records);
  return s;
}

}  // namespace detail

/// f_t(x) = 1 - (x + i t)^2 on [-1, 1] for each t in (0, 1].
inline SweepSummary quadratic_family_sweep(const std::vector<BigRational>& t_grid, const SweepConfig& cfg = {}) {
  if (t_grid.empty()) throw DomainError("quadratic family sweep needs at least one t");
  std::vector<Poly> polys;
  for (const auto& t : t_grid) {
    if (!(t > 0 && t <= 1)) throw DomainError("family parameter t must lie in (0, 1], got " + t.get_str());
    polys.push_back(reference::tilted_quadratic(t));
  }
  auto s = detail::run_sweep("quadratic", polys, Interval(-1, 1), std::nullopt, cfg);
  s.argmin_t = t_grid[s.per_degree.at(2).witness_index];
  return s;
}

inline constexpr int kRandomDenominatorBits = 16;

/// Degree-n polynomial with real and imaginary parts num / 2^16, numerators
/// uniform in [-box 2^16, box 2^16]; the leading coefficient is nonzero.
template <class Rng>
Poly random_polynomial(int degree, const BigRational& coeff_box, Rng& rng, bool real_only = false) {
  if (degree < 0) throw DomainError("random polynomial degree must be >= 0");
  const BigRational scaled = coeff_box * BigRational(1L << kRandomDenominatorBits);
  const long bound = static_cast<long>(mpz_get_si(BigInt(scaled.get_num() / scaled.get_den()).get_mpz_t()));
  if (bound < 1) throw DomainError("coefficient box too small for the 2^-16 lattice");
  std::uniform_int_distribution<long> dist(-bound, bound);
  const BigInt den = BigInt(1) << kRandomDenominatorBits;
  std::vector<ComplexRational> c(static_cast<std::size_t>(degree) + 1);
  for (auto& x : c) {
    const long re = dist(rng);
    const long im = real_only ? 0 : dist(rng);
    x = ComplexRational(make_rational(re, den), make_rational(im, den));
  }
  while (c.back().is_zero()) {
    const long re = dist(rng);
    const long im = real_only ? 0 : dist(rng);
    c.back() = ComplexRational(make_rational(re, den), make_rational(im, den));
  }
  return Poly(std::move(c));
}

inline std::vector<Poly> random_polynomials(int degree, std::size_t count, const BigRational& coeff_box,
                                            std::uint64_t seed, bool real_only = false) {
  std::mt19937_64 rng(seed);
  std::vector<Poly> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(random_polynomial(degree, coeff_box, rng, real_only));
  return out;
}

/// N seeded random degree-n polynomials on [-1, 1]; deterministic per seed.
inline SweepSummary random_sweep(int degree, std::size_t count, const BigRational& coeff_box, std::uint64_t seed,
                                 const SweepConfig& cfg = {}) {
  if (degree < 1) throw DomainError("random sweep degree must be >= 1");
  if (count < 1) throw DomainError("random sweep count must be >= 1");
  return detail::run_sweep("random", random_polynomials(degree, count, coeff_box, seed), Interval(-1, 1), seed, cfg);
}

inline nlohmann::json to_json(const SweepSummary& s) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& [deg, m] : s.per_degree)
    per.push_back({{"degree", deg}, {"min_kappa_upper", m.kappa_upper}, {"witness", m.witness}, {"index", m.witness_index}});
  nlohmann::json j{{"family", s.family},
                   {"count", s.count},
                   {"seed", s.seed ? nlohmann::json(*s.seed) : nlohmann::json(nullptr)},
                   {"per_degree", per}};
  if (s.argmin_t) j["argmin_t"] = format_rational(*s.argmin_t);
  return j;
}

}  // namespace polymoments

#include "dmac/dist.hpp"

#include <algorithm>
#include <stdexcept>

namespace dmac {

DiscreteLaw::DiscreteLaw(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("law has empty support");
  Rational total = 0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const auto& a = atoms_[i];
    if (a.value < 0) throw std::invalid_argument("law values must be nonnegative");
    if (a.prob < 0 || a.prob > 1) throw std::invalid_argument("law probabilities must lie in [0,1]");
    if (i > 0 && !(atoms_[i - 1].value < a.value))
      throw std::invalid_argument("law values must be strictly increasing");
    total += a.prob;
  }
  if (total != 1) throw std::invalid_argument("law probabilities sum to " + to_string(total) + ", not 1");
}

DiscreteLaw DiscreteLaw::from_doubles(const std::vector<std::pair<double, double>>& in) {
  if (in.empty()) throw std::invalid_argument("law has empty support");
  std::vector<Atom> atoms;
  Rational total = 0;
  for (auto [v, p] : in) {
    atoms.push_back({snap(v), snap(p)});
    total += atoms.back().prob;
  }
  if (abs(total - 1) > Rational(kSnapTolerance) * static_cast<long>(in.size()))
    throw std::invalid_argument("law probabilities sum to " + std::to_string(to_double(total)) + ", not 1");
  // Snapping residue is absorbed by renormalizing exactly.
  if (total != 1)
    for (auto& a : atoms) a.prob /= total;
  return DiscreteLaw(std::move(atoms));
}

DiscreteLaw DiscreteLaw::point(const Rational& v) { return DiscreteLaw({{v, Rational(1)}}); }

DiscreteLaw DiscreteLaw::uniform(const std::vector<Rational>& values) {
  if (values.empty()) throw std::invalid_argument("law has empty support");
  std::vector<Atom> atoms;
  Rational p(1, static_cast<long>(values.size()));
  for (const auto& v : values) atoms.push_back({v, p});
  return DiscreteLaw(std::move(atoms));
}

DiscreteLaw DiscreteLaw::truncated_geometric(const Rational& p, int n) {
  if (p <= 0 || p > 1 || n < 1) throw std::invalid_argument("truncated geometric needs 0 < p <= 1, n >= 1");
  Rational q = 1 - p, qn = 1;
  for (int k = 0; k < n; ++k) qn *= q;
  Rational z = 1 - qn, qk = 1;
  std::vector<Atom> atoms;
  for (int k = 1; k <= n; ++k) {
    atoms.push_back({Rational(k - 1), p * qk / z});
    qk *= q;
  }
  return DiscreteLaw(std::move(atoms));
}

Rational DiscreteLaw::cdf(const Rational& b) const {
  Rational acc = 0;
  for (const auto& a : atoms_) {
    if (a.value > b) break;
    acc += a.prob;
  }
  return acc;
}

Rational DiscreteLaw::inverse_cdf(const Rational& x) const {
  if (x < 0 || x > 1) throw std::domain_error("inverse_cdf argument outside [0,1]");
  if (x == 0) {
    for (const auto& a : atoms_)
      if (a.prob > 0) return a.value;
  }
  Rational acc = 0;
  for (const auto& a : atoms_) {
    acc += a.prob;
    if (a.prob > 0 && x <= acc) return a.value;
  }
  return max_support();
}

std::vector<Rational> DiscreteLaw::cumulative() const {
  std::vector<Rational> c{Rational(0)};
  for (const auto& a : atoms_) c.push_back(c.back() + a.prob);
  return c;
}

Rational DiscreteLaw::mean() const {
  Rational m = 0;
  for (const auto& a : atoms_) m += a.value * a.prob;
  return m;
}

const Rational& DiscreteLaw::min_value() const { return atoms_.front().value; }
const Rational& DiscreteLaw::max_value() const { return atoms_.back().value; }

const Rational& DiscreteLaw::max_support() const {
  for (auto it = atoms_.rbegin(); it != atoms_.rend(); ++it)
    if (it->prob > 0) return it->value;
  throw std::logic_error("law without positive mass");
}

DiscreteLaw DiscreteLaw::shrink_toward_zero(const Rational& c) const {
  if (c <= 0 || c > 1) throw std::invalid_argument("shrink factor must lie in (0,1]");
  std::vector<Atom> out;
  if (atoms_.front().value != 0) out.push_back({Rational(0), 1 - c});
  for (const auto& a : atoms_) {
    Rational p = a.prob * c;
    if (a.value == 0) p += 1 - c;
    out.push_back({a.value, p});
  }
  return DiscreteLaw(std::move(out));
}

DiscreteLaw DiscreteLaw::scaled_values(const Rational& k) const {
  if (k <= 0) throw std::invalid_argument("value scale must be positive");
  std::vector<Atom> out = atoms_;
  for (auto& a : out) a.value *= k;
  return DiscreteLaw(std::move(out));
}

bool DiscreteLaw::operator==(const DiscreteLaw& o) const {
  if (atoms_.size() != o.atoms_.size()) return false;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i].value != o.atoms_[i].value || atoms_[i].prob != o.atoms_[i].prob) return false;
  return true;
}

RateFadingLaw::RateFadingLaw(DiscreteLaw r, DiscreteLaw f) : rate(std::move(r)), fading(std::move(f)) {
  if (rate.empty() || fading.empty()) throw std::invalid_argument("rate and fading laws must be non-empty");
  if (fading.min_value() <= 0) throw std::invalid_argument("fading gains must be strictly positive");
}

RateFadingLaw RateFadingLaw::fixed(DiscreteLaw r, const Rational& gain) {
  return RateFadingLaw(std::move(r), DiscreteLaw::point(gain));
}

}  // namespace dmac

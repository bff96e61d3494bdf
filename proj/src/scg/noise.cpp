#include "scg/noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace scg {

namespace {

inline std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finaliser
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double to_unit(std::uint64_t x) {
  // (0,1]: 53 high bits, shifted off zero
  return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

const char* family_token(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::Phi: return "phi";
    case NoiseFamily::Psi: return "psi";
    case NoiseFamily::PsiHat: return "psihat";
    case NoiseFamily::Chi: return "chi";
  }
  return "?";
}

std::uint64_t NoiseKey::hash() const {
  std::uint64_t h = mix64(0x5c90ULL + static_cast<std::uint64_t>(family));
  h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(elem_a)));
  h = mix64(h ^ (elem_b ? 0x8000000000000000ULL ^ static_cast<std::uint64_t>(
                              static_cast<std::int64_t>(*elem_b))
                        : 0x1234567ULL));
  for (int m : modes) h = mix64(h ^ static_cast<std::uint64_t>(m + 17));
  h = mix64(h ^ (static_cast<std::uint64_t>(modes.size()) << 32));
  return h;
}

std::string NoiseKey::str() const {
  std::string s = family_token(family);
  s += "[" + std::to_string(elem_a);
  if (elem_b) s += "," + std::to_string(*elem_b);
  s += "](";
  for (size_t i = 0; i < modes.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(modes[i]);
  }
  s += ")";
  return s;
}

double NoiseBank::increment(const NoiseKey& k, std::int64_t step) const {
  std::uint64_t h = mix64(seed_ ^ k.hash());
  h = mix64(h ^ static_cast<std::uint64_t>(step));
  const double u1 = to_unit(mix64(h ^ 0xa5a5a5a5a5a5a5a5ULL));
  const double u2 = to_unit(mix64(h ^ 0x3c3c3c3c3c3c3c3cULL));
  const double z = std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * std::numbers::pi * u2);
  return std::sqrt(dt()) * z;
}

double RestrictedLatticeView::increment(const NoiseKey& k, std::int64_t step) const {
  auto fine_phi = [&](int i) {
    int w = i % n_;
    if (w < 0) w += n_;
    return fine_.increment(NoiseKey{NoiseFamily::Phi, w, {}, {0}}, step);
  };
  if (k.family == NoiseFamily::Phi) return fine_.increment(k, step);
  if (k.family == NoiseFamily::Psi && !k.elem_b && k.modes.size() == 1) {
    const int j = k.elem_a;
    if (k.modes[0] == 0)
      return 0.25 * fine_phi(2 * j - 1) + 0.5 * fine_phi(2 * j) +
             0.25 * fine_phi(2 * j + 1);
    if (k.modes[0] == 1)
      return 0.5 * (fine_phi(2 * j + 1) - fine_phi(2 * j - 1));
  }
  throw MissingChannel(k);
}

double OddNoiseView::increment(const NoiseKey& k, std::int64_t step) const {
  if (k.family == NoiseFamily::Phi && !k.elem_b && k.modes == std::vector<int>{1}) {
    const double sign = (k.elem_a % 2 == 0) ? 1.0 : -1.0;
    return sign * base_.increment(shared_key(), step);
  }
  throw MissingChannel(k);
}

double RecordingView::increment(const NoiseKey& k, std::int64_t step) const {
  if (std::find(seen_.begin(), seen_.end(), k) == seen_.end()) seen_.push_back(k);
  return base_.increment(k, step);
}

std::vector<NoiseKey> RecordingView::keys() const { return seen_; }

double restrict_fine_noise(std::span<const double> fine, int j) {
  const int n = static_cast<int>(fine.size());
  auto at = [&](int i) {
    int w = i % n;
    return fine[w < 0 ? w + n : w];
  };
  return 0.25 * at(2 * j - 1) + 0.5 * at(2 * j) + 0.25 * at(2 * j + 1);
}

double csn(int k, double theta) {
  return (k % 2 == 0) ? std::cos(k * theta) : std::sin(k * theta);
}

std::vector<double> project_noise_to_modes(std::span<const double> samples, int K) {
  const int n = static_cast<int>(samples.size());
  if (K > n / 2)
    throw std::invalid_argument("project_noise_to_modes: " + std::to_string(K) +
                                " modes exceed resolution of " + std::to_string(n) +
                                " samples");
  const double dtheta = std::numbers::pi / n;
  std::vector<double> out(K, 0.0);
  for (int k = 0; k < K; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double theta = -std::numbers::pi / 2 + (i + 0.5) * dtheta;
      s += samples[i] * csn(k, theta);
    }
    const double norm2 = (k == 0) ? std::numbers::pi : std::numbers::pi / 2;
    out[k] = s * dtheta / norm2;
  }
  return out;
}

double odd_noise_pattern(int j, double theta) {
  return ((j % 2 + 2) % 2 == 0 ? 1.0 : -1.0) * std::sin(theta);
}

void export_noise_csv(const NoiseView& view, std::span<const NoiseKey> keys,
                      std::int64_t n_steps, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "step,key,increment\n";
  f.precision(17);
  for (std::int64_t s = 0; s < n_steps; ++s)
    for (const auto& k : keys)
      f << s << ",\"" << k.str() << "\"," << view.increment(k, s) << "\n";
}

}  // namespace scg

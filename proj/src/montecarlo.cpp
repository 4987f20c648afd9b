#include "gw/montecarlo.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

#include "gw/errors.hpp"

namespace gw {

namespace {

constexpr long kChunk = 2048;

struct ChunkSums {
  std::vector<cplx> sum;
  std::vector<double> sum_sq;
  long count = 0;
};

ChunkSums merge(const ChunkSums& a, const ChunkSums& b) {
  ChunkSums r = a;
  for (size_t k = 0; k < r.sum.size(); ++k) {
    r.sum[k] += b.sum[k];
    r.sum_sq[k] += b.sum_sq[k];
  }
  r.count += b.count;
  return r;
}

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("GWMLVE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Eigen::MatrixXcd sample_unit_hermitian(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd s(n, n);
  const double h = std::sqrt(0.5);
  for (int m = 0; m < n; ++m) {
    s(m, m) = g(rng);
    for (int k = m + 1; k < n; ++k) {
      double re = g(rng) * h;
      double im = g(rng) * h;
      s(m, k) = cplx(re, im);
      s(k, m) = cplx(re, -im);
    }
  }
  return s;
}

Eigen::MatrixXcd sample_field(std::mt19937_64& rng, const Eigen::MatrixXd& cov) {
  int n = static_cast<int>(cov.rows());
  Eigen::MatrixXcd s = sample_unit_hermitian(rng, n);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k) s(m, k) *= std::sqrt(cov(m, k));
  return s;
}

MultiEstimate mc_estimate(const SamplerSpec& spec, int n, int observables, const Observable& f) {
  if (spec.samples <= 1) throw ArgumentError("Monte Carlo needs at least two samples");
  long chunks = (spec.samples + kChunk - 1) / kChunk;
  std::vector<ChunkSums> results(static_cast<size_t>(chunks));
  int workers = std::max(1, std::min<int>(worker_count(), static_cast<int>(chunks)));

  auto run = [&](int w) {
    std::vector<cplx> out(observables);
    for (long c = w; c < chunks; c += workers) {
      std::mt19937_64 rng(splitmix64(spec.seed * 0x100000001b3ULL + static_cast<std::uint64_t>(c)));
      ChunkSums cs;
      cs.sum.assign(observables, cplx(0.0, 0.0));
      cs.sum_sq.assign(observables, 0.0);
      long begin = c * kChunk;
      long end = std::min(spec.samples, begin + kChunk);
      for (long i = begin; i < end; ++i) {
        Eigen::MatrixXcd s = sample_unit_hermitian(rng, n);
        if (spec.mirrored) s = -s;
        f(s, out.data());
        for (int k = 0; k < observables; ++k) {
          if (!std::isfinite(out[k].real()) || !std::isfinite(out[k].imag()))
            throw NumericalFailure("non-finite Monte Carlo integrand");
          cs.sum[k] += out[k];
          cs.sum_sq[k] += std::norm(out[k]);
        }
        ++cs.count;
      }
      results[static_cast<size_t>(c)] = std::move(cs);
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          run(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  while (results.size() > 1) {
    std::vector<ChunkSums> next;
    for (size_t i = 0; i + 1 < results.size(); i += 2) next.push_back(merge(results[i], results[i + 1]));
    if (results.size() % 2 == 1) next.push_back(results.back());
    results.swap(next);
  }

  const ChunkSums& tot = results.front();
  MultiEstimate est;
  est.samples = tot.count;
  est.seed = spec.seed;
  double cnt = static_cast<double>(tot.count);
  for (int k = 0; k < observables; ++k) {
    cplx mean = tot.sum[k] / cnt;
    double var = std::max(0.0, tot.sum_sq[k] / cnt - std::norm(mean)) * cnt / (cnt - 1.0);
    est.mean.push_back(mean);
    est.std_error.push_back(std::sqrt(var / cnt));
  }
  return est;
}

}  // namespace gw

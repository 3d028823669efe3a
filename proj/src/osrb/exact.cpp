// Copyright 2026 The coordsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <thread>
#include <tuple>
#include <unordered_map>

#include "coordsim/error.hpp"
#include "coordsim/osrb/protocol.hpp"
#include "coordsim/prob/dense_joint.hpp"
#include "coordsim/rng.hpp"
#include "osrb/internal.hpp"

namespace coordsim {

namespace {

constexpr std::uint64_t kMaxEnumeration = std::uint64_t{1} << 24;
constexpr std::size_t kChunk = 64;

using Codes = std::vector<std::uint64_t>;

struct BinTable {
  std::vector<std::uint64_t> cell, k;
  std::vector<std::uint64_t> occupied;
  std::map<std::pair<std::uint64_t, std::uint64_t>, Codes> members;
};

struct Decoded {
  std::uint64_t code = 0;
  DecodeStatus status = DecodeStatus::empty;
};

struct PairHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const {
    return static_cast<std::size_t>(mix64(p.first ^ mix64(p.second)));
  }
};

using DecodeMap = std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, Decoded, PairHash>;

struct Worker {
  std::map<std::pair<int, Codes>, BinTable> tables;
  std::map<std::tuple<int, Codes, std::uint64_t>, DecodeMap> decodes;
};

struct StateKey {
  Codes truth, v1, v2;
  auto operator<=>(const StateKey&) const = default;
};

// Per-x results, already weighted by q(x^n).
struct XOut {
  std::vector<double> mix;     // over y^n, position-major (y1, y2) pairs
  std::vector<double> target;  // q(x^n) prod q(y_t | x_t)
  std::vector<double> err;
  std::vector<std::unordered_map<std::uint64_t, double>> kdist;
};

class Engine {
 public:
  Engine(const ProtocolModel& model, const BinningCode& code, const SimOptions& opt)
      : m_(model), code_(code), opt_(opt), n_(code.n()), r_(model.r()) {
    opt.typicality.check();
    if (opt.workers < 1) throw InvalidArgument("workers must be at least 1");
    if (code.r() != r_ || code.f_sizes() != model.scheme().f_sizes) throw InvalidArgument("code does not match the scheme");
    double work = 1.0;
    for (int i = 1; i <= r_; ++i) {
      const auto total = sequence_count(m_.f_size(i), n_);
      if (total == 0 || total > kMaxEnumeration) throw BudgetExceeded("round sequence space too large for exact mode");
      work *= static_cast<double>(total);
      seqs_.emplace_back();
      for (std::uint64_t c = 0; c < total; ++c) seqs_.back().push_back(sequence_of(c, m_.f_size(i), n_));
    }
    if (static_cast<double>(code.omega_bins()) * static_cast<double>(code.b_bins(1)) > 0x1p62) {
      throw BudgetExceeded("round-one bin space too large for exact mode");
    }
    for (int term = 1; term <= 2; ++term) {
      const auto total = sequence_count(m_.x_size(term), n_);
      if (total == 0 || total > kMaxEnumeration) throw BudgetExceeded("input sequence space too large for exact mode");
      auto& xs = term == 1 ? x1s_ : x2s_;
      for (std::uint64_t c = 0; c < total; ++c) xs.push_back(sequence_of(c, m_.x_size(term), n_));
    }
    for (std::uint64_t a = 0; a < x1s_.size(); ++a) {
      for (std::uint64_t b = 0; b < x2s_.size(); ++b) {
        double q = 1.0;
        for (int t = 0; t < n_ && q > 0.0; ++t) q *= m_.q_x(x1s_[a][t], x2s_[b][t]);
        if (q > 0.0) xs_.push_back({a, b, q});
      }
    }
    work *= static_cast<double>(xs_.size());
    if (work > opt.budget) throw BudgetExceeded("exact enumeration exceeds the work budget");

    std::size_t fr = 1;
    for (int i = 1; i <= r_; ++i) fr *= m_.f_size(i);
    keep1_ = m_.y_size(1) > 1;
    keep2_ = m_.y_size(2) > 1;
    v1dim_ = keep1_ ? fr : 1;
    v2dim_ = keep2_ ? fr : 1;
    adim_ = v1dim_ * v2dim_;
    ycells_ = m_.y_size(1) * m_.y_size(2);
    const auto acells = sequence_count(adim_, n_), ycount = sequence_count(ycells_, n_);
    if (acells == 0 || acells > kMaxEnumeration || ycount == 0 || ycount > kMaxEnumeration) {
      throw BudgetExceeded("output tensor too large for exact mode");
    }
    acells_ = acells;
    ycount_ = ycount;
    pow_.assign(static_cast<std::size_t>(n_), 1);
    for (int t = n_ - 1; t-- > 0;) pow_[t] = pow_[t + 1] * adim_;
    // Weight of the last round's digits inside the tensor index.
    for (int term = 1; term <= 2; ++term) {
      auto& dw = term == 1 ? dw1_ : dw2_;
      const bool keep = term == 1 ? keep1_ : keep2_;
      const std::uint64_t coef = term == 1 ? v2dim_ : 1;
      dw.assign(seqs_[r_ - 1].size(), 0);
      if (!keep) continue;
      for (std::size_t c = 0; c < dw.size(); ++c) {
        for (int t = 0; t < n_; ++t) dw[c] += seqs_[r_ - 1][c][t] * coef * pow_[t];
      }
    }
  }

  std::size_t x_count() const { return xs_.size(); }
  double x_prob(std::size_t j) const { return std::get<2>(xs_[j]); }
  std::uint64_t ycount() const { return ycount_; }
  std::size_t ycells() const { return ycells_; }

  void run_x(Worker& wk, std::size_t j, InducedMode mode, const std::optional<Codes>& bfix, XOut& out) const;
  void y_digits(std::uint64_t y, std::vector<std::uint8_t>& d) const {
    d.resize(static_cast<std::size_t>(n_));
    for (int t = n_; t-- > 0;) {
      d[t] = static_cast<std::uint8_t>(y % ycells_);
      y /= ycells_;
    }
  }
  const Sequence& x1(std::size_t j) const { return x1s_[std::get<0>(xs_[j])]; }
  const Sequence& x2(std::size_t j) const { return x2s_[std::get<1>(xs_[j])]; }
  std::uint64_t x1_code(std::size_t j) const { return std::get<0>(xs_[j]); }
  std::uint64_t x2_code(std::size_t j) const { return std::get<1>(xs_[j]); }
  std::size_t x2_count() const { return x2s_.size(); }

 private:
  std::vector<Sequence> prefix_seqs(const Codes& codes) const {
    std::vector<Sequence> s;
    for (std::size_t i = 0; i < codes.size(); ++i) s.push_back(seqs_[i][codes[i]]);
    return s;
  }

  const BinTable& table(Worker& wk, int i, const Codes& prefix) const {
    auto key = std::make_pair(i, prefix);
    auto it = wk.tables.find(key);
    if (it != wk.tables.end()) return it->second;
    BinTable bt;
    auto rounds = prefix_seqs(prefix);
    rounds.emplace_back();
    const auto& all = seqs_[i - 1];
    bt.cell.resize(all.size());
    bt.k.resize(all.size());
    for (std::size_t c = 0; c < all.size(); ++c) {
      rounds.back() = all[c];
      const std::uint64_t b = code_.b(i, rounds);
      bt.cell[c] = i == 1 ? code_.omega(rounds) * code_.b_bins(1) + b : b;
      bt.k[c] = code_.k(i, rounds);
      bt.members[{bt.cell[c], bt.k[c]}].push_back(c);
    }
    bt.occupied = bt.cell;
    std::sort(bt.occupied.begin(), bt.occupied.end());
    bt.occupied.erase(std::unique(bt.occupied.begin(), bt.occupied.end()), bt.occupied.end());
    return wk.tables.emplace(std::move(key), std::move(bt)).first->second;
  }

  DecodeMap& decode_map(Worker& wk, int i, const Codes& prefix, std::uint64_t x_code) const {
    return wk.decodes[std::make_tuple(i, prefix, x_code)];
  }

  Decoded decode(Worker& wk, DecodeMap& cache, int i, const Codes& prefix, const Sequence& x, std::uint64_t cell,
                 std::uint64_t k) const {
    if (m_.f_size(i) == 1) return {0, DecodeStatus::ok};
    auto it = cache.find({cell, k});
    if (it != cache.end()) return it->second;
    const auto& bt = table(wk, i, prefix);
    Decoded d;
    auto mem = bt.members.find({cell, k});
    if (mem != bt.members.end()) {
      const auto pre = prefix_seqs(prefix);
      const auto ctx = m_.contexts(i, ProtocolModel::receiver(i), pre, x);
      std::size_t typical = 0;
      for (auto c : mem->second) {
        if (m_.typical(i, ctx, seqs_[i - 1][c], opt_.typicality) && typical++ == 0) d.code = c;
      }
      if (typical == 1) {
        d.status = DecodeStatus::ok;
      } else if (typical > 1) {
        d.status = DecodeStatus::ambiguous;
      } else {
        d.code = mem->second.front();
      }
    }
    cache.emplace(std::make_pair(cell, k), d);
    return d;
  }

  std::uint64_t base_index(const StateKey& s) const {
    std::uint64_t idx = 0;
    const std::size_t fr = m_.f_size(r_);
    for (int t = 0; t < n_; ++t) {
      std::uint64_t s1 = 0, s2 = 0;
      for (int i = 1; i < r_; ++i) {
        s1 = s1 * m_.f_size(i) + seqs_[i - 1][s.v1[i - 1]][t];
        s2 = s2 * m_.f_size(i) + seqs_[i - 1][s.v2[i - 1]][t];
      }
      const std::uint64_t a = (keep1_ ? s1 * fr : 0) * v2dim_ + (keep2_ ? s2 * fr : 0);
      idx += a * pow_[t];
    }
    return idx;
  }

  const ProtocolModel& m_;
  const BinningCode& code_;
  const SimOptions& opt_;
  int n_, r_;
  std::vector<std::vector<Sequence>> seqs_;
  std::vector<Sequence> x1s_, x2s_;
  std::vector<std::tuple<std::uint64_t, std::uint64_t, double>> xs_;
  bool keep1_ = false, keep2_ = false;
  std::size_t v1dim_ = 1, v2dim_ = 1, adim_ = 1, ycells_ = 1;
  std::uint64_t acells_ = 1, ycount_ = 1;
  std::vector<std::uint64_t> pow_, dw1_, dw2_;

};

void Engine::run_x(Worker& wk, std::size_t j, InducedMode mode, const std::optional<Codes>& bfix, XOut& out) const {
  const auto& x1s = x1(j);
  const auto& x2s = x2(j);
  const std::uint64_t xc[2] = {x1_code(j), x2_code(j)};
  std::vector<double> acc(acells_, 0.0);
  out.err.assign(static_cast<std::size_t>(r_), 0.0);
  out.kdist.assign(static_cast<std::size_t>(r_), {});

  std::map<StateKey, double> cur;
  cur[StateKey{}] = x_prob(j);
  for (int i = 1; i <= r_; ++i) {
    const int o = ProtocolModel::owner(i), rc = ProtocolModel::receiver(i);
    const Sequence& xo = o == 1 ? x1s : x2s;
    const Sequence& xr = o == 1 ? x2s : x1s;
    const bool last = i == r_;
    std::map<StateKey, double> next;
    for (const auto& [s, w] : cur) {
      // Cached references below stay valid until the next state.
      if (wk.tables.size() > 512) wk.tables.clear();
      if (wk.decodes.size() > 4096) wk.decodes.clear();
      const Codes& vo = o == 1 ? s.v1 : s.v2;
      const Codes& vr = o == 1 ? s.v2 : s.v1;
      const Codes& gen = mode == InducedMode::a ? s.truth : vo;
      const auto ctx = m_.contexts(i, o, prefix_seqs(gen), xo);
      const auto p = sequence_probabilities(m_.generation_table(i), m_.f_size(i), ctx);
      const BinTable& bt = table(wk, i, gen);
      const std::uint64_t base = last ? base_index(s) : 0;
      const auto& dwo = o == 1 ? dw1_ : dw2_;
      const auto& dwr = o == 1 ? dw2_ : dw1_;

      auto emit = [&](std::uint64_t f, std::uint64_t k, Decoded d, double mass) {
        if (d.status != DecodeStatus::ok || d.code != f) out.err[i - 1] += mass;
        out.kdist[i - 1][k] += mass;
        if (last) {
          acc[base + dwo[f] + dwr[d.code]] += mass;
          return;
        }
        StateKey ns = s;
        if (mode == InducedMode::a) ns.truth.push_back(f);
        (o == 1 ? ns.v1 : ns.v2).push_back(f);
        (o == 1 ? ns.v2 : ns.v1).push_back(d.code);
        next[std::move(ns)] += mass;
      };
      DecodeMap& dm = decode_map(wk, i, vr, xc[rc - 1]);
      auto dec = [&](std::uint64_t cell, std::uint64_t k) { return decode(wk, dm, i, vr, xr, cell, k); };

      if (mode == InducedMode::a) {
        for (std::uint64_t f = 0; f < p.size(); ++f) {
          if (p[f] > 0.0) emit(f, bt.k[f], dec(bt.cell[f], bt.k[f]), w * p[f]);
        }
        continue;
      }
      const std::uint64_t nb = code_.b_bins(i);
      const double n_elig = bfix ? (i == 1 ? static_cast<double>(code_.omega_bins()) : 1.0)
                                 : static_cast<double>(i == 1 ? code_.omega_bins() * nb : nb);
      auto eligible = [&](std::uint64_t cell) { return !bfix || cell % nb == (*bfix)[i - 1]; };
      std::unordered_map<std::uint64_t, double> z;
      for (std::uint64_t f = 0; f < p.size(); ++f) {
        if (p[f] > 0.0 && eligible(bt.cell[f])) z[bt.cell[f]] += p[f];
      }
      for (std::uint64_t f = 0; f < p.size(); ++f) {
        if (p[f] > 0.0 && eligible(bt.cell[f])) {
          emit(f, bt.k[f], dec(bt.cell[f], bt.k[f]), w * p[f] / z[bt.cell[f]] / n_elig);
        }
      }
      // Shared bins that no likely sequence matches: the sender falls back to
      // an unconstrained draw and the receiver decodes against those bins.
      const BinTable& rt = table(wk, i, vr);
      double rest = n_elig - static_cast<double>(z.size());
      for (auto cell : rt.occupied) {
        if (!eligible(cell) || z.count(cell)) continue;
        rest -= 1.0;
        for (std::uint64_t f = 0; f < p.size(); ++f) {
          if (p[f] > 0.0) emit(f, bt.k[f], dec(cell, bt.k[f]), w * p[f] / n_elig);
        }
      }
      if (rest > 0.5) {
        for (std::uint64_t f = 0; f < p.size(); ++f) {
          if (p[f] > 0.0) emit(f, bt.k[f], dec(~std::uint64_t{0}, 0), w * p[f] * rest / n_elig);
        }
      }
    }
    cur.swap(next);
  }

  // Push the view tensor through the per-position output kernels.
  const std::size_t ny1 = m_.y_size(1), ny2 = m_.y_size(2);
  const std::size_t nx1 = m_.x_size(1), nx2 = m_.x_size(2);
  const auto& o1 = m_.output_table(1);
  const auto& o2 = m_.output_table(2);
  std::vector<double> cur_t = std::move(acc), nxt;
  std::uint64_t pre = 1, post = acells_ / adim_;
  std::vector<double> mat(ycells_ * adim_);
  for (int t = 0; t < n_; ++t) {
    for (std::size_t a = 0; a < adim_; ++a) {
      const std::size_t s1 = a / v2dim_, s2 = a % v2dim_;
      for (std::size_t y1 = 0; y1 < ny1; ++y1) {
        const double p1 = keep1_ ? o1[(s1 * nx1 + x1s[t]) * ny1 + y1] : 1.0;
        for (std::size_t y2 = 0; y2 < ny2; ++y2) {
          const double p2 = keep2_ ? o2[(s2 * nx2 + x2s[t]) * ny2 + y2] : 1.0;
          mat[(y1 * ny2 + y2) * adim_ + a] = p1 * p2;
        }
      }
    }
    nxt.assign(pre * ycells_ * post, 0.0);
    for (std::uint64_t u = 0; u < pre; ++u) {
      for (std::size_t a = 0; a < adim_; ++a) {
        const double* src = &cur_t[(u * adim_ + a) * post];
        for (std::size_t y = 0; y < ycells_; ++y) {
          const double mm = mat[y * adim_ + a];
          if (mm == 0.0) continue;
          double* dst = &nxt[(u * ycells_ + y) * post];
          for (std::uint64_t v = 0; v < post; ++v) dst[v] += mm * src[v];
        }
      }
    }
    cur_t.swap(nxt);
    pre *= ycells_;
    post /= adim_;
  }
  out.mix = std::move(cur_t);

  out.target.assign(1, x_prob(j));
  for (int t = 0; t < n_; ++t) {
    nxt.assign(out.target.size() * ycells_, 0.0);
    for (std::size_t u = 0; u < out.target.size(); ++u) {
      for (std::size_t y1 = 0; y1 < ny1; ++y1) {
        for (std::size_t y2 = 0; y2 < ny2; ++y2) {
          nxt[u * ycells_ + y1 * ny2 + y2] =
              out.target[u] * m_.q_y(x1s[t], x2s[t], static_cast<std::uint8_t>(y1), static_cast<std::uint8_t>(y2));
        }
      }
    }
    out.target.swap(nxt);
  }
}

// Runs fn(worker, x index) over every input pair in fixed chunks, then
// reduces the chunk results in chunk order.
template <class Acc, class Fn>
std::vector<Acc> run_chunks(const Engine& eng, int workers, Fn fn) {
  const std::size_t chunks = (eng.x_count() + kChunk - 1) / kChunk;
  std::vector<Acc> acc(chunks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    Worker wk;
    for (std::size_t c; (c = next++) < chunks && !failed;) {
      try {
        for (std::size_t j = c * kChunk; j < std::min(eng.x_count(), (c + 1) * kChunk); ++j) fn(wk, j, acc[c]);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < std::min<int>(workers, static_cast<int>(chunks)); ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return acc;
}

struct ChunkAcc {
  double tv = 0.0, mass = 0.0;
  std::vector<double> err;
  std::vector<std::unordered_map<std::uint64_t, double>> kdist;
  std::unordered_map<double, double> emp;
};

void check_bfix(const BinningCode& code, const std::optional<Codes>& b_fixed, InducedMode mode) {
  if (!b_fixed) return;
  if (mode == InducedMode::a) throw InvalidArgument("fixed b applies to mode B only");
  if (static_cast<int>(b_fixed->size()) != code.r()) throw InvalidArgument("need one fixed b per round");
  for (int i = 1; i <= code.r(); ++i) {
    if ((*b_fixed)[i - 1] >= code.b_bins(i)) throw InvalidArgument("fixed b out of range");
  }
}

}  // namespace

ProtocolResult exact_induced_pmf(const ProtocolModel& model, const BinningCode& code,
                                 const std::optional<std::vector<std::uint64_t>>& b_fixed, InducedMode mode,
                                 const SimOptions& options) {
  check_bfix(code, b_fixed, mode);
  const Engine eng(model, code, options);
  const int n = code.n(), r = model.r();
  const std::size_t nx1 = model.x_size(1), nx2 = model.x_size(2), ny2 = model.y_size(2);
  const std::size_t ycells = eng.ycells();
  const std::uint64_t y2count = sequence_count(ny2, n), y1count = sequence_count(model.y_size(1), n);

  std::vector<double> pmf;
  if (options.keep_pmf) {
    const double cells = static_cast<double>(sequence_count(nx1, n)) * static_cast<double>(eng.x2_count()) *
                         static_cast<double>(eng.ycount());
    if (cells > static_cast<double>(kMaxEnumeration)) throw BudgetExceeded("induced pmf too large to keep");
    pmf.assign(static_cast<std::size_t>(cells), 0.0);
  }
  // Target of the single-letter check, laid out [x1][x2][y1 y2].
  std::vector<double> single(nx1 * nx2 * ycells);
  for (std::size_t a = 0; a < nx1; ++a) {
    for (std::size_t b = 0; b < nx2; ++b) {
      for (std::size_t y = 0; y < ycells; ++y) {
        const auto u8 = [](std::size_t v) { return static_cast<std::uint8_t>(v); };
        single[(a * nx2 + b) * ycells + y] =
            model.q_x(u8(a), u8(b)) * model.q_y(u8(a), u8(b), u8(y / ny2), u8(y % ny2));
      }
    }
  }

  auto chunks = run_chunks<ChunkAcc>(eng, options.workers, [&](Worker& wk, std::size_t j, ChunkAcc& acc) {
    XOut out;
    eng.run_x(wk, j, mode, b_fixed, out);
    if (acc.err.empty()) {
      acc.err.assign(static_cast<std::size_t>(r), 0.0);
      acc.kdist.resize(static_cast<std::size_t>(r));
    }
    double tv = 0.0;
    for (std::size_t y = 0; y < out.mix.size(); ++y) {
      tv += std::abs(out.mix[y] - out.target[y]);
      acc.mass += out.mix[y];
    }
    acc.tv += 0.5 * tv;
    for (int i = 0; i < r; ++i) {
      acc.err[i] += out.err[i];
      for (auto [k, v] : out.kdist[i]) acc.kdist[i][k] += v;
    }
    const auto& x1 = eng.x1(j);
    const auto& x2 = eng.x2(j);
    std::vector<std::uint8_t> d;
    std::vector<double> type(single.size());
    for (std::uint64_t y = 0; y < out.mix.size(); ++y) {
      if (out.mix[y] == 0.0) continue;
      eng.y_digits(y, d);
      std::fill(type.begin(), type.end(), 0.0);
      for (int t = 0; t < n; ++t) type[(x1[t] * nx2 + x2[t]) * ycells + d[t]] += 1.0;
      double e = 0.0;
      for (std::size_t c = 0; c < type.size(); ++c) e += std::abs(type[c] / n - single[c]);
      acc.emp[0.5 * e] += out.mix[y];
      if (!pmf.empty()) {
        std::uint64_t c1 = 0, c2 = 0;
        for (int t = 0; t < n; ++t) {
          c1 = c1 * model.y_size(1) + d[t] / ny2;
          c2 = c2 * ny2 + d[t] % ny2;
        }
        const std::uint64_t xi = eng.x1_code(j) * eng.x2_count() + eng.x2_code(j);
        pmf[(xi * y1count + c1) * y2count + c2] = out.mix[y];
      }
    }
  });

  ProtocolResult res;
  res.mode = "exact";
  res.n = n;
  res.tv_to_target = 0.0;
  res.total_mass = 0.0;
  res.sw_error_rate.assign(static_cast<std::size_t>(r), 0.0);
  std::vector<std::map<std::uint64_t, double>> kdist(static_cast<std::size_t>(r));
  std::map<double, double> emp;
  for (const auto& c : chunks) {
    res.tv_to_target += c.tv;
    res.total_mass += c.mass;
    for (std::size_t i = 0; i < c.err.size(); ++i) {
      res.sw_error_rate[i] += c.err[i];
      for (auto [k, v] : c.kdist[i]) kdist[i][k] += v;
    }
    std::vector<std::pair<double, double>> sorted(c.emp.begin(), c.emp.end());
    std::sort(sorted.begin(), sorted.end());
    for (auto [v, w] : sorted) emp[v] += w;
  }
  res.tv_to_target = std::clamp(res.tv_to_target, 0.0, 1.0);
  for (int i = 0; i < r; ++i) {
    res.sw_error_rate[i] = std::clamp(res.sw_error_rate[i], 0.0, 1.0);
    std::vector<double> p;
    for (auto [k, v] : kdist[i]) p.push_back(v);
    res.k_entropy.push_back(entropy_bits(p) / n);
    res.nominal_rate.push_back(code.nominal_rate(code.k_bins(i + 1)));
  }
  res.empirical = weighted_stats({emp.begin(), emp.end()});
  res.induced = std::move(pmf);
  return res;
}

double exact_mode_gap(const ProtocolModel& model, const BinningCode& code, const SimOptions& options) {
  const Engine eng(model, code, options);
  auto chunks = run_chunks<double>(eng, options.workers, [&](Worker& wk, std::size_t j, double& acc) {
    XOut a, b;
    eng.run_x(wk, j, InducedMode::a, std::nullopt, a);
    eng.run_x(wk, j, InducedMode::b, std::nullopt, b);
    double s = 0.0;
    for (std::size_t y = 0; y < a.mix.size(); ++y) s += std::abs(a.mix[y] - b.mix[y]);
    acc += 0.5 * s;
  });
  double tv = 0.0;
  for (double c : chunks) tv += c;
  return std::clamp(tv, 0.0, 1.0);
}

GoodB find_good_b(const ProtocolModel& model, const BinningCode& code, int candidates, std::uint64_t seed,
                  const SimOptions& options) {
  if (candidates < 0) throw InvalidArgument("candidate count must be non-negative");
  const int r = code.r();
  double space = 1.0;
  for (int i = 1; i <= r; ++i) space *= static_cast<double>(code.b_bins(i));
  std::vector<Codes> cands;
  GoodB best;
  if (space <= static_cast<double>(candidates) + 1.0) {
    best.exhaustive = true;
    Codes b(static_cast<std::size_t>(r), 0);
    for (;;) {
      cands.push_back(b);
      int i = r;
      while (i-- > 0) {
        if (++b[i] < code.b_bins(i + 1)) break;
        b[i] = 0;
      }
      if (i < 0) break;
    }
  } else {
    cands.emplace_back(static_cast<std::size_t>(r), 0);
    for (int c = 0; c < candidates; ++c) {
      Rng rng(derive_seed(seed, 51, static_cast<std::uint64_t>(c)));
      Codes b;
      for (int i = 1; i <= r; ++i) b.push_back(rng.below(code.b_bins(i)));
      cands.push_back(std::move(b));
    }
  }
  SimOptions single = options;
  single.workers = 1;
  single.keep_pmf = false;
  std::vector<double> tv(cands.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t c; (c = next++) < cands.size() && !failed;) {
      try {
        tv[c] = exact_induced_pmf(model, code, cands[c], InducedMode::b, single).tv_to_target;
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < std::min<int>(options.workers, static_cast<int>(cands.size())); ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  std::size_t arg = 0;
  for (std::size_t c = 0; c < cands.size(); ++c) {
    best.mean_tv += tv[c];
    if (tv[c] < tv[arg]) arg = c;
  }
  best.mean_tv /= static_cast<double>(cands.size());
  best.b = cands[arg];
  best.tv = tv[arg];
  best.evaluated = cands.size();
  return best;
}

}  // namespace coordsim

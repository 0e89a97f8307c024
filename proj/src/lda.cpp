#include "topiclens/lda.hpp"

#include <algorithm>
#include <random>

#include "topiclens/binary_io.hpp"
#include "topiclens/error.hpp"

namespace topiclens {

void LdaConfig::validate() const {
  if (topics < 1) fail(ErrorKind::ConfigError, "lda.topics must be >= 1");
  if (!(effective_alpha() > 0.0)) fail(ErrorKind::ConfigError, "lda.alpha must be > 0");
  if (!(beta > 0.0)) fail(ErrorKind::ConfigError, "lda.beta must be > 0");
  if (burn_in >= iterations) fail(ErrorKind::ConfigError, "lda.burn_in must be < lda.iterations");
  if (sample_lag < 1) fail(ErrorKind::ConfigError, "lda.sample_lag must be >= 1");
}

std::size_t TopicMixture::argmax() const {
  return static_cast<std::size_t>(std::max_element(theta.begin(), theta.end()) - theta.begin());
}

LdaModel::LdaModel(std::size_t topics, std::size_t vocab_size, double alpha, double beta, std::vector<double> phi,
                   std::vector<std::uint32_t> n_kw, std::vector<std::uint64_t> n_k)
    : topics_(topics), vocab_(vocab_size), alpha_(alpha), beta_(beta), phi_(std::move(phi)),
      n_kw_(std::move(n_kw)), n_k_(std::move(n_k)) {
  if (phi_.size() != topics_ * vocab_ || n_kw_.size() != topics_ * vocab_ || n_k_.size() != topics_) {
    fail(ErrorKind::ShapeMismatch, "LDA tables do not match topics x vocab");
  }
}

namespace {

// Draws an index with probability proportional to weights[k]; weights holds the running cumulative sum.
std::size_t sample_cumulative(std::span<const double> cumulative, double u) {
  const double target = u * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

}  // namespace

LdaFit fit_lda(const std::vector<std::vector<TermId>>& docs, std::size_t vocab_size, const LdaConfig& config,
               const SweepObserver& observer) {
  config.validate();
  const std::size_t k_topics = config.topics;
  if (docs.size() < k_topics) {
    fail(ErrorKind::InvalidArgument, "fit_lda needs at least " + std::to_string(k_topics) + " chunks, got " +
                                         std::to_string(docs.size()));
  }
  std::size_t total_tokens = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (auto w : docs[d]) {
      if (w >= vocab_size) {
        fail(ErrorKind::InvalidTokenId, "token id " + std::to_string(w) + " in chunk " + std::to_string(d) +
                                            " >= vocabulary size " + std::to_string(vocab_size));
      }
    }
    total_tokens += docs[d].size();
  }
  if (total_tokens == 0) fail(ErrorKind::EmptyStream, "no tokens to sample");

  const double alpha = config.effective_alpha();
  const double beta = config.beta;
  const double v_beta = static_cast<double>(vocab_size) * beta;
  const std::size_t n_docs = docs.size();

  std::vector<std::uint32_t> n_dk(n_docs * k_topics, 0);
  std::vector<std::uint32_t> n_wk(vocab_size * k_topics, 0);
  std::vector<std::uint64_t> n_k(k_topics, 0);
  std::vector<std::size_t> lengths(n_docs);
  std::vector<std::vector<std::uint32_t>> z(n_docs);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(k_topics - 1));

  for (std::size_t d = 0; d < n_docs; ++d) {
    lengths[d] = docs[d].size();
    z[d].resize(docs[d].size());
    for (std::size_t i = 0; i < docs[d].size(); ++i) {
      const auto k = pick(rng);
      z[d][i] = k;
      ++n_dk[d * k_topics + k];
      ++n_wk[docs[d][i] * k_topics + k];
      ++n_k[k];
    }
  }

  std::vector<double> theta_sum(n_docs * k_topics, 0.0);
  std::vector<double> phi_sum(k_topics * vocab_size, 0.0);
  std::size_t samples = 0;
  auto accumulate = [&] {
    for (std::size_t d = 0; d < n_docs; ++d) {
      const double denom = static_cast<double>(lengths[d]) + static_cast<double>(k_topics) * alpha;
      for (std::size_t k = 0; k < k_topics; ++k) {
        theta_sum[d * k_topics + k] += (static_cast<double>(n_dk[d * k_topics + k]) + alpha) / denom;
      }
    }
    for (std::size_t k = 0; k < k_topics; ++k) {
      const double denom = static_cast<double>(n_k[k]) + v_beta;
      for (std::size_t w = 0; w < vocab_size; ++w) {
        phi_sum[k * vocab_size + w] += (static_cast<double>(n_wk[w * k_topics + k]) + beta) / denom;
      }
    }
    ++samples;
  };

  std::vector<double> cumulative(k_topics);
  for (std::size_t sweep = 1; sweep <= config.iterations; ++sweep) {
    for (std::size_t d = 0; d < n_docs; ++d) {
      std::uint32_t* doc_counts = &n_dk[d * k_topics];
      for (std::size_t i = 0; i < docs[d].size(); ++i) {
        const TermId w = docs[d][i];
        std::uint32_t* word_counts = &n_wk[static_cast<std::size_t>(w) * k_topics];
        const auto old = z[d][i];
        --doc_counts[old];
        --word_counts[old];
        --n_k[old];

        double acc = 0.0;
        for (std::size_t k = 0; k < k_topics; ++k) {
          acc += (static_cast<double>(word_counts[k]) + beta) / (static_cast<double>(n_k[k]) + v_beta) *
                 (static_cast<double>(doc_counts[k]) + alpha);
          cumulative[k] = acc;
        }
        const auto k_new = static_cast<std::uint32_t>(sample_cumulative(cumulative, unit(rng)));
        z[d][i] = k_new;
        ++doc_counts[k_new];
        ++word_counts[k_new];
        ++n_k[k_new];
      }
    }
    if (observer) observer(sweep, GibbsCounts{k_topics, vocab_size, n_dk, n_wk, n_k, lengths});
    const bool lagged = sweep > config.burn_in && (sweep - config.burn_in) % config.sample_lag == 0;
    if (lagged || (sweep == config.iterations && samples == 0)) accumulate();
  }

  LdaFit fit;
  fit.samples = samples;
  const double inv = 1.0 / static_cast<double>(samples);
  fit.theta.resize(n_docs);
  for (std::size_t d = 0; d < n_docs; ++d) {
    auto& t = fit.theta[d].theta;
    t.resize(k_topics);
    double total = 0.0;
    for (std::size_t k = 0; k < k_topics; ++k) total += t[k] = theta_sum[d * k_topics + k] * inv;
    for (auto& x : t) x /= total;
  }
  std::vector<std::uint32_t> n_kw(k_topics * vocab_size);
  for (std::size_t k = 0; k < k_topics; ++k) {
    double total = 0.0;
    for (std::size_t w = 0; w < vocab_size; ++w) {
      phi_sum[k * vocab_size + w] *= inv;
      total += phi_sum[k * vocab_size + w];
      n_kw[k * vocab_size + w] = n_wk[w * k_topics + k];
    }
    for (std::size_t w = 0; w < vocab_size; ++w) phi_sum[k * vocab_size + w] /= total;
  }
  fit.model = LdaModel(k_topics, vocab_size, alpha, beta, std::move(phi_sum), std::move(n_kw), std::move(n_k));
  return fit;
}

LdaFit fit_lda(const std::vector<std::vector<TermId>>& docs, const Vocabulary& vocab, const LdaConfig& config,
               const SweepObserver& observer) {
  return fit_lda(docs, vocab.size(), config, observer);
}

InferResult infer_mixture(const LdaModel& model, std::span<const TermId> tokens, std::size_t iterations,
                          std::uint64_t seed) {
  const std::size_t k_topics = model.topics();
  InferResult result;
  std::vector<TermId> known;
  known.reserve(tokens.size());
  for (auto w : tokens) {
    if (w < model.vocab_size()) known.push_back(w);
  }
  if (known.empty() || iterations == 0) {
    result.mixture.theta.assign(k_topics, 1.0 / static_cast<double>(k_topics));
    result.degenerate = known.empty();
    return result;
  }

  const double alpha = model.alpha();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(k_topics - 1));

  std::vector<std::uint32_t> z(known.size());
  std::vector<std::uint32_t> n_dk(k_topics, 0);
  for (std::size_t i = 0; i < known.size(); ++i) {
    z[i] = pick(rng);
    ++n_dk[z[i]];
  }

  // the first half of the sweeps is burn-in; the rest are averaged
  const std::size_t burn_in = iterations / 2;
  std::vector<double> theta_sum(k_topics, 0.0);
  std::vector<double> cumulative(k_topics);
  const double denom = static_cast<double>(known.size()) + static_cast<double>(k_topics) * alpha;
  for (std::size_t sweep = 1; sweep <= iterations; ++sweep) {
    for (std::size_t i = 0; i < known.size(); ++i) {
      --n_dk[z[i]];
      double acc = 0.0;
      for (std::size_t k = 0; k < k_topics; ++k) {
        acc += model.phi(k, known[i]) * (static_cast<double>(n_dk[k]) + alpha);
        cumulative[k] = acc;
      }
      z[i] = static_cast<std::uint32_t>(sample_cumulative(cumulative, unit(rng)));
      ++n_dk[z[i]];
    }
    if (sweep > burn_in) {
      for (std::size_t k = 0; k < k_topics; ++k) theta_sum[k] += (static_cast<double>(n_dk[k]) + alpha) / denom;
    }
  }
  double total = 0.0;
  for (double x : theta_sum) total += x;
  result.mixture.theta.resize(k_topics);
  for (std::size_t k = 0; k < k_topics; ++k) result.mixture.theta[k] = theta_sum[k] / total;
  return result;
}

double word_probability(const LdaModel& model, const TopicMixture& mixture, TermId term) {
  if (term >= model.vocab_size()) fail(ErrorKind::UnknownTerm, "term id " + std::to_string(term));
  if (mixture.theta.size() != model.topics()) fail(ErrorKind::ShapeMismatch, "mixture size differs from K");
  double p = 0.0;
  for (std::size_t k = 0; k < model.topics(); ++k) p += model.phi(k, term) * mixture.theta[k];
  return p;
}

std::vector<std::uint8_t> LdaModel::serialize() const {
  BinaryWriter w(ArtifactKind::Lda);
  w.u64(topics_);
  w.u64(vocab_);
  w.f64(alpha_);
  w.f64(beta_);
  for (double p : phi_) w.f64(p);
  for (auto c : n_kw_) w.u32(c);
  for (auto c : n_k_) w.u64(c);
  return w.buffer();
}

LdaModel LdaModel::deserialize(std::vector<std::uint8_t> bytes, const std::string& source) {
  BinaryReader r(std::move(bytes), ArtifactKind::Lda, source);
  const auto topics = static_cast<std::size_t>(r.u64());
  const auto vocab = static_cast<std::size_t>(r.u64());
  const double alpha = r.f64();
  const double beta = r.f64();
  std::vector<double> phi(topics * vocab);
  for (auto& p : phi) p = r.f64();
  std::vector<std::uint32_t> n_kw(topics * vocab);
  for (auto& c : n_kw) c = r.u32();
  std::vector<std::uint64_t> n_k(topics);
  for (auto& c : n_k) c = r.u64();
  r.expect_end();
  return LdaModel(topics, vocab, alpha, beta, std::move(phi), std::move(n_kw), std::move(n_k));
}

void LdaModel::save(const std::filesystem::path& path) const { write_file_bytes(path, serialize()); }

LdaModel LdaModel::load(const std::filesystem::path& path) { return deserialize(read_file_bytes(path), path.string()); }

}  // namespace topiclens

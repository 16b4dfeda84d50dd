#include "rirkit/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rirkit/error.hpp"

namespace rirkit {

NgramModel::NgramModel(const std::vector<TokenSequence>& corpus, int order, int vocab_size,
                       double smoothing)
    : order_(order), vocab_size_(vocab_size), smoothing_(smoothing) {
  if (order < 1) throw Error(ErrorCode::kConfiguration, "n-gram order must be at least 1");
  if (vocab_size < 1) throw Error(ErrorCode::kConfiguration, "vocabulary must be non-empty");
  if (!(smoothing > 0.0)) throw Error(ErrorCode::kConfiguration, "smoothing must be positive");
  std::size_t tokens = 0;
  for (const TokenSequence& seq : corpus) tokens += seq.size();
  if (tokens == 0) throw Error(ErrorCode::kConfiguration, "n-gram corpus is empty");

  const auto context_len = static_cast<std::size_t>(order - 1);
  for (const TokenSequence& seq : corpus) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const int token = seq[i];
      if (token < 0 || token >= vocab_size) {
        throw Error(ErrorCode::kCorruptSequence, "token " + std::to_string(token) +
                                                     " outside the vocabulary");
      }
      // Every suffix of the context up to order-1 tokens, so backoff finds
      // shorter contexts too.
      const std::size_t longest = std::min(context_len, i);
      for (std::size_t len = 0; len <= longest; ++len) {
        std::vector<int> key(seq.begin() + static_cast<std::ptrdiff_t>(i - len),
                             seq.begin() + static_cast<std::ptrdiff_t>(i));
        Counts& c = table_[key];
        c.by_token[token] += 1.0;
        c.total += 1.0;
      }
    }
  }
}

ScoreVector NgramModel::next_scores(std::span<const int> prefix, const QuantizedParams*) const {
  const std::size_t longest = std::min(static_cast<std::size_t>(order_ - 1), prefix.size());
  const Counts* counts = nullptr;
  for (std::size_t len = longest + 1; len-- > 0;) {
    const std::vector<int> key(prefix.end() - static_cast<std::ptrdiff_t>(len), prefix.end());
    const auto it = table_.find(key);
    if (it != table_.end()) {
      counts = &it->second;
      break;
    }
  }
  // The empty context always exists for a non-empty corpus.
  const double denom = counts->total + smoothing_ * vocab_size_;
  ScoreVector s(static_cast<std::size_t>(vocab_size_), std::log(smoothing_ / denom));
  for (const auto& [token, n] : counts->by_token) {
    s[static_cast<std::size_t>(token)] = std::log((n + smoothing_) / denom);
  }
  return s;
}

double perplexity(const ArModel& model, const std::vector<TokenSequence>& corpus) {
  double nll = 0.0;
  std::size_t count = 0;
  for (const TokenSequence& seq : corpus) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const ScoreVector s = model.next_scores(std::span<const int>(seq.data(), i), nullptr);
      const double m = *std::max_element(s.begin(), s.end());
      double z = 0.0;
      for (double v : s) z += std::exp(v - m);
      nll -= s[static_cast<std::size_t>(seq[i])] - m - std::log(z);
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::kConfiguration, "perplexity of an empty corpus");
  return std::exp(nll / static_cast<double>(count));
}

}  // namespace rirkit

#include "gecforge/noise.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <deque>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "json.hpp"

#include "gecforge/error.hpp"

namespace gecforge {

namespace {

using nlohmann::json;

constexpr std::size_t kBlockLines = 512;

}  // namespace

const std::vector<EditDictionary::Variant>* EditDictionary::find(
    const std::string& token) const {
  const auto it = entries_.find(token);
  return it == entries_.end() ? nullptr : &it->second;
}

const std::string& EditDictionary::sample(const std::vector<Variant>& variants,
                                          SplitRng& rng) const {
  std::uint64_t total = 0;
  for (const Variant& v : variants) total += v.count;
  std::uint64_t pick = rng.next_below(total);
  for (const Variant& v : variants) {
    if (pick < v.count) return v.token;
    pick -= v.count;
  }
  return variants.back().token;  // unreachable for well-formed entries
}

void EditDictionary::insert(const std::string& token,
                            std::vector<Variant> variants) {
  if (variants.empty()) {
    throw ValidationError("dictionary entry with no variants");
  }
  for (const Variant& v : variants) {
    if (v.count == 0) throw ValidationError("dictionary variant with count 0");
  }
  std::sort(variants.begin(), variants.end(),
            [](const Variant& a, const Variant& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.token < b.token;
            });
  entries_[token] = std::move(variants);
}

void EditDictionary::save(std::ostream& out) const {
  json entries = json::object();
  for (const auto& [token, variants] : entries_) {
    json rows = json::array();
    for (const Variant& v : variants) {
      rows.push_back(json::array({v.token, v.count}));
    }
    entries[token] = rows;
  }
  json doc;
  doc["format_version"] = 1;
  doc["entries"] = entries;
  out << doc.dump(2) << "\n";
}

EditDictionary EditDictionary::load(std::istream& in) {
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(std::string("dictionary JSON: ") + e.what());
  }
  try {
    if (doc.at("format_version").get<int>() != 1) {
      throw ParseError("unsupported dictionary format_version");
    }
    EditDictionary dict;
    for (const auto& [token, rows] : doc.at("entries").items()) {
      std::vector<Variant> variants;
      for (const auto& row : rows) {
        variants.push_back(Variant{row.at(0).get<std::string>(),
                                   row.at(1).get<std::uint64_t>()});
      }
      dict.insert(token, std::move(variants));
    }
    return dict;
  } catch (const json::exception& e) {
    throw ParseError(std::string("dictionary JSON: ") + e.what());
  }
}

void DictionaryBuilder::add_observation(const std::string& correct,
                                        const std::string& observed,
                                        std::uint64_t count) {
  counts_[correct][observed] += count;
}

void DictionaryBuilder::add(const AnnotatedPair& pair) {
  for (const Annotation& ann : pair.annotations) {
    std::size_t pos = 0;
    for (const Edit& e : ann.edits) {
      for (; pos < e.span_start; ++pos) {
        add_observation(pair.source[pos], pair.source[pos]);
      }
      if (e.span_end - e.span_start == 1 && e.replacement.size() == 1) {
        add_observation(e.replacement[0], pair.source[e.span_start]);
      }
      pos = e.span_end;
    }
    for (; pos < pair.source.size(); ++pos) {
      add_observation(pair.source[pos], pair.source[pos]);
    }
  }
}

EditDictionary DictionaryBuilder::finish(std::uint64_t min_count) const {
  EditDictionary dict;
  for (const auto& [token, observed] : counts_) {
    std::vector<EditDictionary::Variant> variants;
    for (const auto& [spelling, count] : observed) {
      if (count >= min_count) {
        variants.push_back(EditDictionary::Variant{spelling, count});
      }
    }
    if (variants.empty()) continue;
    // An entry whose only variant is the token itself would never alter
    // anything; drop it so the dictionary stays a map of real confusions.
    if (variants.size() == 1 && variants[0].token == token) continue;
    dict.insert(token, std::move(variants));
  }
  return dict;
}

void NoisingConfig::validate() const {
  const auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(token_error_prob) || !in_unit(type_error_prob) ||
      !in_unit(random_op_prob)) {
    throw ValidationError("noising probabilities must lie in [0, 1]");
  }
  if (!preposition_set.empty()) {
    if (std::find(preposition_set.begin(), preposition_set.end(), "") ==
        preposition_set.end()) {
      throw ValidationError(
          "explicit preposition set must contain the empty token");
    }
  }
}

void NoiseStats::operator+=(const NoiseStats& other) {
  tokens += other.tokens;
  dictionary_tokens += other.dictionary_tokens;
  dictionary_draws += other.dictionary_draws;
  typed_tokens += other.typed_tokens;
  type_draws += other.type_draws;
  insertions += other.insertions;
  deletions += other.deletions;
  delete_suppressed += other.delete_suppressed;
  substitutions += other.substitutions;
  swaps += other.swaps;
  swap_draws += other.swap_draws;
}

Sentence noise_sentence(const Sentence& clean, const EditDictionary& dict,
                        const MorphLexicon& lexicon,
                        const NoisingConfig& config, SplitRng& rng,
                        NoiseStats* stats) {
  NoiseStats local;
  Sentence out;
  out.reserve(clean.size());

  const std::vector<std::string>& preps = config.preposition_set.empty()
                                              ? lexicon.prepositions()
                                              : config.preposition_set;

  for (const std::string& token : clean) {
    ++local.tokens;

    if (const auto* variants = dict.find(token)) {
      ++local.dictionary_tokens;
      if (rng.bernoulli(config.token_error_prob)) {
        ++local.dictionary_draws;
        out.push_back(dict.sample(*variants, rng));
      } else {
        out.push_back(token);
      }
      continue;
    }

    const TokenType type = lexicon.token_type(token);
    if (type == TokenType::kOther) {
      out.push_back(token);
      continue;
    }

    ++local.typed_tokens;
    if (!rng.bernoulli(config.type_error_prob)) {
      out.push_back(token);
      continue;
    }
    ++local.type_draws;

    switch (type) {
      case TokenType::kPreposition: {
        const std::string& drawn = preps[rng.next_below(preps.size())];
        if (!drawn.empty()) out.push_back(drawn);
        break;  // the empty preposition deletes the token
      }
      case TokenType::kNoun: {
        const auto toggled = lexicon.toggle_number(token);
        out.push_back(toggled ? *toggled : token);
        break;
      }
      case TokenType::kVerb: {
        const auto alts = lexicon.verb_alternatives(token);
        if (alts.empty()) {
          out.push_back(token);
        } else {
          out.push_back(alts[rng.next_below(alts.size())]);
        }
        break;
      }
      case TokenType::kOther:
        break;
    }
  }

  if (stats) *stats += local;
  return out;
}

Sentence noise_random(const Sentence& clean,
                      const std::vector<std::string>& vocabulary,
                      const NoisingConfig& config, SplitRng& rng,
                      NoiseStats* stats) {
  if (vocabulary.empty()) {
    throw ValidationError("random noising needs a non-empty vocabulary");
  }
  NoiseStats local;
  const double p = config.random_op_prob;
  Sentence out;
  out.reserve(clean.size() + 2);

  for (std::size_t i = 0; i < clean.size(); ++i) {
    ++local.tokens;
    if (rng.bernoulli(p)) {
      ++local.insertions;
      out.push_back(vocabulary[rng.next_below(vocabulary.size())]);
    }
    if (rng.bernoulli(p)) {
      const bool would_empty = out.empty() && i + 1 == clean.size();
      if (!would_empty) {
        ++local.deletions;
        continue;
      }
      // Suppressed: deleting the last token of an empty output would erase
      // the sentence entirely. Keep the token as is.
      ++local.delete_suppressed;
      out.push_back(clean[i]);
      continue;
    }
    if (rng.bernoulli(p)) {
      ++local.substitutions;
      out.push_back(vocabulary[rng.next_below(vocabulary.size())]);
    } else {
      out.push_back(clean[i]);
    }
  }

  for (std::size_t i = 0; i + 1 < out.size();) {
    ++local.swap_draws;
    if (rng.bernoulli(p)) {
      ++local.swaps;
      std::swap(out[i], out[i + 1]);
      i += 2;
    } else {
      ++i;
    }
  }

  if (stats) *stats += local;
  return out;
}

namespace {

struct LineProcessor {
  const EditDictionary* dict = nullptr;
  const MorphLexicon* lexicon = nullptr;
  const NoisingConfig* config = nullptr;
  const std::vector<std::string>* random_vocab = nullptr;
  std::uint64_t repetitions = 1;

  // Renders all repetitions of one input line; line_index is 0-based over
  // the input file and pins the random substream.
  void run(const std::string& line, std::uint64_t line_index,
           std::string& out, NoiseStats& stats, std::uint64_t& pairs) const {
    const Sentence clean = split_tokens(line);
    if (clean.empty()) return;
    const std::string clean_joined = join_tokens(clean);
    for (std::uint64_t rep = 0; rep < repetitions; ++rep) {
      SplitRng rng = SplitRng::substream(config->seed, line_index, rep);
      const Sentence noised =
          config->mode == NoiseMode::kRealistic
              ? noise_sentence(clean, *dict, *lexicon, *config, rng, &stats)
              : noise_random(clean, *random_vocab, *config, rng, &stats);
      out += join_tokens(noised);
      out += '\t';
      out += clean_joined;
      out += '\n';
      ++pairs;
    }
  }
};

struct Block {
  std::uint64_t index = 0;       // sequence number, drives output order
  std::uint64_t first_line = 0;  // 0-based index of lines[0] in the input
  std::vector<std::string> lines;
};

}  // namespace

GenerateResult generate_corpus(std::istream& in, std::ostream& out,
                               const EditDictionary& dict,
                               const MorphLexicon& lexicon,
                               const NoisingConfig& config,
                               std::uint64_t repetitions, int workers,
                               const std::vector<std::string>* random_vocab) {
  config.validate();
  if (config.mode == NoiseMode::kRandom &&
      (random_vocab == nullptr || random_vocab->empty())) {
    throw ValidationError("random noising needs a non-empty vocabulary");
  }

  LineProcessor processor;
  processor.dict = &dict;
  processor.lexicon = &lexicon;
  processor.config = &config;
  processor.random_vocab = random_vocab;
  processor.repetitions = repetitions;

  GenerateResult result;

  if (workers <= 1) {
    std::string buf;
    std::uint64_t line_index = 0;
    for_each_line(in, [&](std::string&& line, std::size_t) {
      buf.clear();
      processor.run(line, line_index++, buf, result.stats, result.pairs_out);
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    });
    result.lines_in = line_index;
    if (!out) throw IoError("writing noised corpus failed");
    return result;
  }

  // Block pipeline: the caller thread reads blocks into a bounded queue;
  // workers render blocks independently (every line has its own random
  // substream) and take turns writing so output order matches input order.
  std::mutex queue_mutex;
  std::condition_variable queue_cv;
  std::deque<Block> queue;
  bool done_reading = false;
  const std::size_t queue_capacity = static_cast<std::size_t>(workers) * 4;

  std::mutex write_mutex;
  std::condition_variable write_cv;
  std::uint64_t write_turn = 0;

  std::mutex result_mutex;

  const auto worker_main = [&] {
    NoiseStats stats;
    std::uint64_t pairs = 0;
    std::string buf;
    while (true) {
      Block block;
      {
        std::unique_lock<std::mutex> lock(queue_mutex);
        queue_cv.wait(lock, [&] { return !queue.empty() || done_reading; });
        if (queue.empty()) break;
        block = std::move(queue.front());
        queue.pop_front();
      }
      queue_cv.notify_all();

      buf.clear();
      for (std::size_t i = 0; i < block.lines.size(); ++i) {
        processor.run(block.lines[i], block.first_line + i, buf, stats, pairs);
      }

      {
        std::unique_lock<std::mutex> lock(write_mutex);
        write_cv.wait(lock, [&] { return write_turn == block.index; });
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        ++write_turn;
      }
      write_cv.notify_all();
    }
    std::lock_guard<std::mutex> lock(result_mutex);
    result.stats += stats;
    result.pairs_out += pairs;
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker_main);

  Block pending;
  pending.first_line = 0;
  std::uint64_t next_index = 0;
  std::uint64_t line_count = 0;
  const auto dispatch = [&] {
    std::unique_lock<std::mutex> lock(queue_mutex);
    queue_cv.wait(lock, [&] { return queue.size() < queue_capacity; });
    pending.index = next_index++;
    queue.push_back(std::move(pending));
    lock.unlock();
    queue_cv.notify_all();
    pending = Block{};
    pending.first_line = line_count;
  };

  for_each_line(in, [&](std::string&& line, std::size_t) {
    pending.lines.push_back(std::move(line));
    ++line_count;
    if (pending.lines.size() >= kBlockLines) dispatch();
  });
  if (!pending.lines.empty()) dispatch();

  {
    std::lock_guard<std::mutex> lock(queue_mutex);
    done_reading = true;
  }
  queue_cv.notify_all();
  for (std::thread& t : pool) t.join();

  result.lines_in = line_count;
  if (!out) throw IoError("writing noised corpus failed");
  return result;
}

std::vector<std::string> collect_vocabulary(std::istream& in) {
  std::set<std::string> seen;
  for_each_line(in, [&](std::string&& line, std::size_t) {
    for (std::string& tok : split_tokens(line)) seen.insert(std::move(tok));
  });
  return std::vector<std::string>(seen.begin(), seen.end());
}

}  // namespace gecforge

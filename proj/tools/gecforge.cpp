// gecforge: corpus synthesis and correction pipeline toolkit.
//
// One binary, one subcommand per run. Options resolve in three layers:
// command-line flags beat GECFORGE_* environment variables, which beat
// entries in the file named by --config. Outputs are written to a temp file
// and renamed into place, so readers never observe a half-written artifact.
//
// Exit codes: 0 success, 1 parse or validation failure (including bad
// usage), 2 I/O failure.

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gecforge/align.hpp"
#include "gecforge/copymix.hpp"
#include "gecforge/corpus.hpp"
#include "gecforge/error.hpp"
#include "gecforge/evalstats.hpp"
#include "gecforge/lexicon.hpp"
#include "gecforge/lm.hpp"
#include "gecforge/noise.hpp"
#include "gecforge/postprocess.hpp"
#include "gecforge/rng.hpp"
#include "gecforge/spellcheck.hpp"
#include "gecforge/subword.hpp"

namespace fs = std::filesystem;
using namespace gecforge;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Option resolution: flags > environment > config file.

struct Settings {
  std::map<std::string, std::string> values;

  static Settings load(const std::string& path) {
    Settings settings;
    if (path.empty()) return settings;
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto trim = [](std::string s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
          s.pop_back();
        std::size_t lead = 0;
        while (lead < s.size() &&
               std::isspace(static_cast<unsigned char>(s[lead])))
          ++lead;
        return s.substr(lead);
      };
      const std::string text = trim(line);
      if (text.empty()) continue;
      const std::size_t eq = text.find('=');
      if (eq == std::string::npos) {
        throw ParseError("config line is not 'key = value'", number);
      }
      const std::string key = trim(text.substr(0, eq));
      const std::string value = trim(text.substr(eq + 1));
      if (key.empty()) throw ParseError("config line with empty key", number);
      settings.values[key] = value;
    }
    return settings;
  }
};

std::string env_name_for(const std::string& key) {
  std::string name = "GECFORGE_";
  for (char c : key) {
    name += c == '-' ? '_'
                     : static_cast<char>(
                           std::toupper(static_cast<unsigned char>(c)));
  }
  return name;
}

// Applies environment and config fallbacks to options the user did not pass
// on the command line. Keys are the long option names without dashes.
class Fallback {
 public:
  explicit Fallback(const Settings* settings) : settings_(settings) {}

  std::optional<std::string> lookup(const CLI::Option* opt,
                                    const std::string& key) const {
    if (opt != nullptr && opt->count() > 0) return std::nullopt;
    if (const char* env = std::getenv(env_name_for(key).c_str())) {
      return std::string(env);
    }
    const auto it = settings_->values.find(key);
    if (it != settings_->values.end()) return it->second;
    return std::nullopt;
  }

  void apply(const CLI::Option* opt, const std::string& key,
             std::string& var) const {
    if (const auto v = lookup(opt, key)) var = *v;
  }

  void apply(const CLI::Option* opt, const std::string& key,
             std::vector<std::string>& var) const {
    if (const auto v = lookup(opt, key)) var = {*v};
  }

  void apply(const CLI::Option* opt, const std::string& key,
             std::uint64_t& var) const {
    if (const auto v = lookup(opt, key)) {
      try {
        var = std::stoull(*v);
      } catch (const std::exception&) {
        throw ParseError("bad value for " + key + ": '" + *v + "'");
      }
    }
  }

  void apply(const CLI::Option* opt, const std::string& key, int& var) const {
    if (const auto v = lookup(opt, key)) {
      try {
        var = std::stoi(*v);
      } catch (const std::exception&) {
        throw ParseError("bad value for " + key + ": '" + *v + "'");
      }
    }
  }

  void apply(const CLI::Option* opt, const std::string& key,
             double& var) const {
    if (const auto v = lookup(opt, key)) {
      try {
        var = std::stod(*v);
      } catch (const std::exception&) {
        throw ParseError("bad value for " + key + ": '" + *v + "'");
      }
    }
  }

  void apply(const CLI::Option* opt, const std::string& key, bool& var) const {
    if (const auto v = lookup(opt, key)) {
      if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") {
        var = true;
      } else if (*v == "0" || *v == "false" || *v == "no" || *v == "off") {
        var = false;
      } else {
        throw ParseError("bad boolean for " + key + ": '" + *v + "'");
      }
    }
  }

 private:
  const Settings* settings_;
};

// ---------------------------------------------------------------------------
// File helpers.

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  return in;
}

// Writes through a temp file in the target directory and renames on commit.
class AtomicFile {
 public:
  explicit AtomicFile(std::string path) : path_(std::move(path)) {
    tmp_ = path_ + ".tmp." + std::to_string(::getpid());
    stream_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!stream_) throw IoError("cannot open " + tmp_ + " for writing");
  }

  ~AtomicFile() {
    if (!committed_) {
      stream_.close();
      std::error_code ignored;
      fs::remove(tmp_, ignored);
    }
  }

  std::ofstream& stream() { return stream_; }

  void commit() {
    stream_.flush();
    if (!stream_) throw IoError("writing " + tmp_ + " failed");
    stream_.close();
    std::error_code ec;
    fs::rename(tmp_, path_, ec);
    if (ec) throw IoError("renaming " + tmp_ + " to " + path_ + " failed");
    committed_ = true;
  }

 private:
  std::string path_;
  std::string tmp_;
  std::ofstream stream_;
  bool committed_ = false;
};

NGramLm load_lm_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return NGramLm::load(in);
}

EditDictionary load_dict_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return EditDictionary::load(in);
}

MorphLexicon load_lexicon_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return MorphLexicon::load(in);
}

Vocabulary load_vocab_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return Vocabulary::from_word_list(in);
}

std::unordered_set<std::string> load_word_set(const std::string& path) {
  std::ifstream in = open_input(path);
  std::unordered_set<std::string> words;
  for_each_line(in, [&](std::string&& line, std::size_t) {
    for (std::string& tok : split_tokens(line)) words.insert(std::move(tok));
  });
  return words;
}

std::set<std::string> load_drop_list(const std::string& path) {
  std::ifstream in = open_input(path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(std::string("drop list JSON: ") + e.what());
  }
  std::set<std::string> dropped;
  try {
    for (const auto& cat : doc.at("dropped")) {
      dropped.insert(cat.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("drop list JSON: ") + e.what());
  }
  return dropped;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Reads two line-parallel files, calling fn per pair; counts must agree.
void zip_lines(const std::string& left_path, const std::string& right_path,
               const std::function<void(const std::string&, const std::string&,
                                        std::size_t)>& fn) {
  std::ifstream left = open_input(left_path);
  std::ifstream right = open_input(right_path);
  std::string l, r;
  std::size_t number = 0;
  while (true) {
    const bool got_l = static_cast<bool>(std::getline(left, l));
    const bool got_r = static_cast<bool>(std::getline(right, r));
    if (!got_l && !got_r) break;
    if (got_l != got_r) {
      throw ValidationError(left_path + " and " + right_path +
                            " have different line counts");
    }
    ++number;
    if (!l.empty() && l.back() == '\r') l.pop_back();
    if (!r.empty() && r.back() == '\r') r.pop_back();
    fn(l, r, number);
  }
}

// ---------------------------------------------------------------------------
// Subcommands.

int cmd_extract_edits(const std::string& src, const std::string& tgt,
                      const std::string& out, const std::string& lexicon_path) {
  MorphLexicon lexicon;
  if (!lexicon_path.empty()) lexicon = load_lexicon_file(lexicon_path);

  AtomicFile sink(out);
  std::uint64_t sentences = 0, edits = 0;
  zip_lines(src, tgt, [&](const std::string& s, const std::string& t,
                          std::size_t) {
    AnnotatedPair pair;
    pair.source = tokenize(s);
    Annotation ann;
    ann.edits = extract_edits(pair.source, tokenize(t));
    for (Edit& e : ann.edits) {
      e.category = classify_edit(pair.source, e, lexicon);
    }
    edits += ann.edits.size();
    pair.annotations.push_back(std::move(ann));
    write_m2_block(pair, sink.stream());
    ++sentences;
  });
  sink.commit();
  std::cerr << "extract-edits: " << sentences << " sentences, " << edits
            << " edits\n";
  return 0;
}

int cmd_build_dict(const std::vector<std::string>& m2_paths,
                   std::uint64_t min_count, const std::string& out) {
  DictionaryBuilder builder;
  for (const std::string& path : m2_paths) {
    std::ifstream in = open_input(path);
    for_each_m2(in, [&](AnnotatedPair&& pair) { builder.add(pair); });
  }
  const EditDictionary dict = builder.finish(min_count);
  AtomicFile sink(out);
  dict.save(sink.stream());
  sink.commit();
  std::cerr << "build-dict: " << dict.size() << " entries\n";
  return 0;
}

int cmd_noise(const std::string& corpus, const std::string& dict_path,
              const std::string& lexicon_path, const std::string& vocab_path,
              const NoisingConfig& config, std::uint64_t reps, int workers,
              const std::string& out) {
  config.validate();
  if (reps == 0) throw ValidationError("--reps must be at least 1");
  if (workers < 1) throw ValidationError("--workers must be at least 1");

  EditDictionary dict;
  MorphLexicon lexicon;
  std::vector<std::string> vocab;
  if (config.mode == NoiseMode::kRealistic) {
    if (dict_path.empty()) {
      throw ValidationError("realistic mode needs --dict");
    }
    dict = load_dict_file(dict_path);
    if (!lexicon_path.empty()) lexicon = load_lexicon_file(lexicon_path);
  } else {
    if (!vocab_path.empty()) {
      std::ifstream in = open_input(vocab_path);
      for_each_line(in, [&](std::string&& line, std::size_t) {
        const Sentence cols = split_tokens(line);
        if (!cols.empty()) vocab.push_back(cols[0]);
      });
      std::sort(vocab.begin(), vocab.end());
      vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
    } else {
      // No list given: collect the corpus vocabulary in a first pass.
      std::ifstream in = open_input(corpus);
      vocab = collect_vocabulary(in);
    }
    if (vocab.empty()) {
      throw ValidationError("random mode vocabulary is empty");
    }
  }

  std::ifstream in = open_input(corpus);
  AtomicFile sink(out);
  const GenerateResult result =
      generate_corpus(in, sink.stream(), dict, lexicon, config, reps, workers,
                      config.mode == NoiseMode::kRandom ? &vocab : nullptr);
  sink.commit();
  std::cerr << "noise: " << result.lines_in << " lines in, "
            << result.pairs_out << " pairs out\n";
  return 0;
}

int cmd_train_lm(const std::string& corpus, const NGramLm::Options& options,
                 const std::string& out, const std::string& vocab_out,
                 const std::string& capitals_out,
                 const CapitalConfig& capital_config) {
  {
    std::ifstream in = open_input(corpus);
    const NGramLm lm = NGramLm::train(in, options);
    AtomicFile sink(out);
    lm.save(sink.stream());
    sink.commit();
    std::cerr << "train-lm: " << lm.word_count() << " word types, "
              << lm.token_count() << " tokens\n";
  }
  if (!vocab_out.empty()) {
    std::ifstream in = open_input(corpus);
    const Vocabulary vocab = Vocabulary::from_corpus(in);
    AtomicFile sink(vocab_out);
    vocab.save(sink.stream());
    sink.commit();
  }
  if (!capitals_out.empty()) {
    std::ifstream in = open_input(corpus);
    const std::vector<std::string> words =
        extract_capital_words(in, capital_config);
    AtomicFile sink(capitals_out);
    for (const std::string& w : words) sink.stream() << w << "\n";
    sink.commit();
    std::cerr << "train-lm: " << words.size() << " capitalized words\n";
  }
  return 0;
}

int cmd_score(const std::string& lm_path, const std::string& in_path,
              const std::string& out_path) {
  const NGramLm lm = load_lm_file(lm_path);
  std::ifstream in = open_input(in_path);

  const auto run = [&](std::ostream& out) {
    for_each_line(in, [&](std::string&& line, std::size_t) {
      out << format_double(lm.sentence_logprob(split_tokens(line))) << "\n";
    });
  };
  if (out_path.empty()) {
    run(std::cout);
  } else {
    AtomicFile sink(out_path);
    run(sink.stream());
    sink.commit();
  }
  return 0;
}

int cmd_spellcheck(const std::string& lm_path, const std::string& vocab_path,
                   const std::string& capitals_path, const std::string& in_path,
                   const std::string& out_path, const std::string& m2_out,
                   const SpellConfig& config) {
  config.validate();
  const NGramLm lm = load_lm_file(lm_path);
  const Vocabulary vocab = load_vocab_file(vocab_path);
  std::unordered_set<std::string> capitals;
  if (!capitals_path.empty()) capitals = load_word_set(capitals_path);

  std::ifstream in = open_input(in_path);
  AtomicFile sink(out_path);
  std::optional<AtomicFile> m2_sink;
  if (!m2_out.empty()) m2_sink.emplace(m2_out);

  std::uint64_t corrections = 0;
  for_each_line(in, [&](std::string&& line, std::size_t) {
    const Sentence tokens = tokenize(line);
    SpellResult result = spell_correct(tokens, lm, vocab, capitals, config);
    corrections += result.edits.size();
    sink.stream() << join_tokens(result.corrected) << "\n";
    if (m2_sink) {
      AnnotatedPair pair;
      pair.source = tokens;
      pair.annotations.push_back(Annotation{0, std::move(result.edits)});
      write_m2_block(pair, m2_sink->stream());
    }
  });
  sink.commit();
  if (m2_sink) m2_sink->commit();
  std::cerr << "spellcheck: " << corrections << " corrections\n";
  return 0;
}

int cmd_bpe_learn(const std::string& corpus, std::uint64_t vocab_size,
                  const std::string& out) {
  if (vocab_size == 0) throw ValidationError("--vocab-size must be positive");
  std::ifstream in = open_input(corpus);
  const BpeModel model = BpeModel::learn(in, vocab_size);
  AtomicFile sink(out);
  model.save(sink.stream());
  sink.commit();
  std::cerr << "bpe-learn: " << model.vocab_size() << " symbols, "
            << model.merges().size() << " merges\n";
  return 0;
}

int cmd_bpe_apply(const std::string& model_path, const std::string& in_path,
                  const std::string& out_path, bool revert) {
  std::ifstream model_in = open_input(model_path);
  const BpeModel model = BpeModel::load(model_in);

  std::ifstream in = open_input(in_path);
  AtomicFile sink(out_path);
  for_each_line(in, [&](std::string&& line, std::size_t) {
    const Sentence tokens = split_tokens(line);
    const std::vector<std::string> mapped =
        revert ? model.decode(tokens) : model.encode(tokens);
    sink.stream() << join_tokens(mapped) << "\n";
  });
  sink.commit();
  return 0;
}

// Reads an M2 file as scoring input: sources plus the first annotation of
// every block as the hypothesis edit list.
void read_m2_hypothesis(const std::string& path,
                        std::vector<Sentence>& sources,
                        std::vector<std::vector<Edit>>& edits) {
  std::ifstream in = open_input(path);
  for_each_m2(in, [&](AnnotatedPair&& pair) {
    sources.push_back(std::move(pair.source));
    edits.push_back(std::move(pair.annotations.front().edits));
  });
}

int cmd_score_m2(const std::string& hyp_path, const std::string& ref_path,
                 const std::string& json_out) {
  std::vector<Sentence> hyp_sources;
  std::vector<std::vector<Edit>> hyp_edits;
  read_m2_hypothesis(hyp_path, hyp_sources, hyp_edits);

  std::ifstream ref_in = open_input(ref_path);
  const std::vector<AnnotatedPair> gold = read_m2(ref_in);

  if (gold.size() != hyp_sources.size()) {
    throw ValidationError("hypothesis and reference sentence counts differ");
  }
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].source != hyp_sources[i]) {
      throw ValidationError("source mismatch at sentence " +
                            std::to_string(i + 1));
    }
  }

  const ScoreReport report = score_edits(hyp_edits, gold);
  std::cout << "tp " << report.tp << " fp " << report.fp << " fn " << report.fn
            << " precision " << format_double(report.precision) << " recall "
            << format_double(report.recall) << " f0.5 "
            << format_double(report.f_half) << "\n";
  if (!json_out.empty()) {
    AtomicFile sink(json_out);
    report.write_json(sink.stream());
    sink.commit();
  }
  return 0;
}

int cmd_stats(const std::vector<std::string>& m2_paths, bool all_annotators,
              std::uint64_t rounds, std::uint64_t seed,
              const std::string& json_out) {
  if (m2_paths.empty()) throw ValidationError("stats needs at least one --m2");

  struct FileStats {
    std::string path;
    DensityStats density;
    std::vector<double> densities;
  };
  std::vector<FileStats> files;

  for (const std::string& path : m2_paths) {
    std::ifstream in = open_input(path);
    std::vector<AnnotatedPair> pairs = read_m2(in);
    FileStats fstats;
    fstats.path = path;
    fstats.density = edit_density(pairs, all_annotators);
    fstats.densities = sentence_densities(pairs, all_annotators);
    files.push_back(std::move(fstats));
  }

  json doc;
  doc["format_version"] = 1;
  json rows = json::array();
  for (const FileStats& f : files) {
    std::cout << f.path << ": sentences " << f.density.sentences << ", tokens "
              << f.density.tokens << ", edits " << f.density.edits
              << ", density " << format_double(f.density.mean_density) << "\n";
    json row;
    row["path"] = f.path;
    row["sentences"] = f.density.sentences;
    row["tokens"] = f.density.tokens;
    row["edits"] = f.density.edits;
    row["mean_density"] = f.density.mean_density;
    rows.push_back(row);
  }
  doc["files"] = rows;

  if (files.size() == 2) {
    const double p = permutation_test(files[0].densities, files[1].densities,
                                      rounds, seed);
    std::cout << "permutation test (" << rounds << " rounds): p = "
              << format_double(p) << "\n";
    doc["permutation_p"] = p;
    doc["permutation_rounds"] = rounds;
  }

  if (!json_out.empty()) {
    AtomicFile sink(json_out);
    sink.stream() << doc.dump(2) << "\n";
    sink.commit();
  }
  return 0;
}

struct RefineOptions {
  PostprocessConfig config;
  std::set<std::string> dropped;
  bool have_lexicon = false;
  MorphLexicon lexicon;
};

// Shared tail of postprocess and pipeline: source tokens + hypothesis tokens
// to final edits.
std::vector<Edit> refine_edits(const Sentence& source, const Sentence& hyp,
                               const NGramLm& lm, const RefineOptions& opts) {
  std::vector<Edit> edits = extract_edits(source, hyp);
  for (Edit& e : edits) e.category = classify_edit(source, e, opts.lexicon);
  edits = strip_unk_edits(edits, opts.config.unk_marker);
  edits = lm_select_edits(source, edits, lm, opts.config);
  if (!opts.dropped.empty()) edits = drop_categories(edits, opts.dropped);
  return edits;
}

int cmd_postprocess(const std::string& src_path, const std::string& hyp_path,
                    const std::string& lm_path, const std::string& out_path,
                    const std::string& m2_out, RefineOptions& opts) {
  opts.config.validate();
  const NGramLm lm = load_lm_file(lm_path);

  AtomicFile sink(out_path);
  std::optional<AtomicFile> m2_sink;
  if (!m2_out.empty()) m2_sink.emplace(m2_out);

  std::uint64_t kept = 0;
  zip_lines(src_path, hyp_path, [&](const std::string& s, const std::string& h,
                                    std::size_t) {
    const Sentence source = tokenize(s);
    std::vector<Edit> edits = refine_edits(source, tokenize(h), lm, opts);
    kept += edits.size();
    sink.stream() << join_tokens(apply_edits(source, edits)) << "\n";
    if (m2_sink) {
      AnnotatedPair pair;
      pair.source = source;
      pair.annotations.push_back(Annotation{0, std::move(edits)});
      write_m2_block(pair, m2_sink->stream());
    }
  });
  sink.commit();
  if (m2_sink) m2_sink->commit();
  std::cerr << "postprocess: kept " << kept << " edits\n";
  return 0;
}

int cmd_tune_categories(const std::string& hyp_path,
                        const std::string& ref_path,
                        const PostprocessConfig& config,
                        const std::string& out) {
  std::vector<Sentence> hyp_sources;
  std::vector<std::vector<Edit>> hyp_edits;
  read_m2_hypothesis(hyp_path, hyp_sources, hyp_edits);

  std::ifstream ref_in = open_input(ref_path);
  const std::vector<AnnotatedPair> gold = read_m2(ref_in);
  if (gold.size() != hyp_sources.size()) {
    throw ValidationError("hypothesis and reference sentence counts differ");
  }

  const CategorySearchResult result =
      category_filter_search(hyp_edits, gold, config);

  json doc;
  doc["format_version"] = 1;
  doc["dropped"] = result.dropped;
  doc["f_half"] = result.f_half;
  doc["baseline_f_half"] = result.baseline_f_half;
  AtomicFile sink(out);
  sink.stream() << doc.dump(2) << "\n";
  sink.commit();

  std::cout << "baseline f0.5 " << format_double(result.baseline_f_half)
            << ", tuned f0.5 " << format_double(result.f_half) << ", dropped";
  if (result.dropped.empty()) {
    std::cout << " nothing";
  } else {
    for (const std::string& cat : result.dropped) std::cout << " " << cat;
  }
  std::cout << "\n";
  return 0;
}

int cmd_copymix_selftest(std::uint64_t seed, std::uint64_t trials, int hidden,
                         int vocab, int source_len, double step,
                         const std::string& json_out) {
  if (trials == 0) throw ValidationError("--trials must be at least 1");

  double worst_sum_err = 0.0;
  double worst_grad_rel = 0.0;
  bool alpha_in_range = true;

  for (std::uint64_t k = 0; k < trials; ++k) {
    SplitRng rng = SplitRng::substream(seed, k);
    const CopyMixInputs in =
        CopyMixInputs::random(rng.next_u64(), hidden, vocab, source_len);
    const int target =
        static_cast<int>(rng.next_below(static_cast<std::uint64_t>(vocab)));

    const CopyMixForward fwd = copymix_forward(in);
    double sum = 0.0;
    for (double p : fwd.probs) sum += p;
    worst_sum_err = std::max(worst_sum_err, std::abs(sum - 1.0));
    if (!(fwd.alpha > 0.0 && fwd.alpha < 1.0)) alpha_in_range = false;

    const GradCheckReport report = copymix_grad_check(in, target, step);
    worst_grad_rel = std::max(worst_grad_rel, report.max_rel_error);
  }

  // The gate must sit exactly at 1/2 when its weights vanish.
  CopyMixInputs neutral =
      CopyMixInputs::random(seed ^ 0x5eedULL, hidden, vocab, source_len);
  std::fill(neutral.alpha_weight.begin(), neutral.alpha_weight.end(), 0.0);
  const double neutral_alpha = copymix_forward(neutral).alpha;

  const bool pass = worst_sum_err <= 1e-12 && alpha_in_range &&
                    worst_grad_rel < 1e-4 && neutral_alpha == 0.5;

  std::cout << "trials " << trials << ", max |sum(p)-1| "
            << format_double(worst_sum_err) << ", max grad rel err "
            << format_double(worst_grad_rel) << ", alpha(w=0) "
            << format_double(neutral_alpha) << " -> "
            << (pass ? "ok" : "FAILED") << "\n";

  if (!json_out.empty()) {
    json doc;
    doc["format_version"] = 1;
    doc["trials"] = trials;
    doc["max_sum_error"] = worst_sum_err;
    doc["max_grad_rel_error"] = worst_grad_rel;
    doc["alpha_at_zero_weights"] = neutral_alpha;
    doc["pass"] = pass;
    AtomicFile sink(json_out);
    sink.stream() << doc.dump(2) << "\n";
    sink.commit();
  }
  return pass ? 0 : 1;
}

int cmd_lexicon_build(const std::string& nouns, const std::string& verbs,
                      const std::string& preps, const std::string& priority,
                      const std::string& out) {
  std::ifstream noun_in = open_input(nouns);
  std::ifstream verb_in = open_input(verbs);
  std::ifstream prep_in = open_input(preps);
  MorphLexicon lexicon =
      MorphLexicon::from_word_lists(noun_in, verb_in, prep_in);

  if (!priority.empty()) {
    std::vector<TokenType> order;
    std::string name;
    std::istringstream ss(priority);
    while (std::getline(ss, name, ',')) {
      const auto type = token_type_from_name(name);
      if (!type) throw ParseError("unknown token type '" + name + "'");
      order.push_back(*type);
    }
    lexicon.set_type_priority(order);
  }

  AtomicFile sink(out);
  lexicon.save(sink.stream());
  sink.commit();
  std::cerr << "lexicon-build: " << lexicon.noun_pair_count()
            << " noun pairs, " << lexicon.verb_paradigm_count()
            << " verb paradigms, " << lexicon.prepositions().size()
            << " prepositions\n";
  return 0;
}

int cmd_pipeline(const std::string& in_path, const std::string& lm_path,
                 const std::string& vocab_path,
                 const std::string& capitals_path,
                 const std::string& corrector, const SpellConfig& spell_config,
                 RefineOptions& opts, const std::string& out_path,
                 const std::string& m2_out) {
  spell_config.validate();
  opts.config.validate();

  const NGramLm lm = load_lm_file(lm_path);
  const Vocabulary vocab = load_vocab_file(vocab_path);
  std::unordered_set<std::string> capitals;
  if (!capitals_path.empty()) capitals = load_word_set(capitals_path);

  // Stage 1: tokenize and spellcheck.
  std::vector<Sentence> sources;
  std::vector<Sentence> checked;
  {
    std::ifstream in = open_input(in_path);
    for_each_line(in, [&](std::string&& line, std::size_t) {
      Sentence tokens = tokenize(line);
      SpellResult result =
          spell_correct(tokens, lm, vocab, capitals, spell_config);
      sources.push_back(std::move(tokens));
      checked.push_back(std::move(result.corrected));
    });
  }

  // Stage 2: optional external corrector over the spellchecked text.
  std::vector<Sentence> hypotheses;
  if (corrector.empty()) {
    hypotheses = checked;
  } else {
    const fs::path dir = fs::temp_directory_path();
    const std::string stamp = std::to_string(::getpid());
    const fs::path feed = dir / ("gecforge-pipe-in." + stamp);
    const fs::path back = dir / ("gecforge-pipe-out." + stamp);
    {
      std::ofstream out(feed, std::ios::binary);
      for (const Sentence& s : checked) out << join_tokens(s) << "\n";
      if (!out) throw IoError("writing corrector input failed");
    }
    const std::string command = corrector + " < " + feed.string() + " > " +
                                back.string();
    const int status = std::system(command.c_str());
    if (status != 0) {
      std::error_code ignored;
      fs::remove(feed, ignored);
      fs::remove(back, ignored);
      throw IoError("corrector command failed: " + corrector);
    }
    {
      std::ifstream in = open_input(back.string());
      for_each_line(in, [&](std::string&& line, std::size_t) {
        hypotheses.push_back(tokenize(line));
      });
    }
    std::error_code ignored;
    fs::remove(feed, ignored);
    fs::remove(back, ignored);
    if (hypotheses.size() != sources.size()) {
      throw ValidationError("corrector changed the line count");
    }
  }

  // Stage 3: refine hypothesis edits and apply.
  AtomicFile sink(out_path);
  std::optional<AtomicFile> m2_sink;
  if (!m2_out.empty()) m2_sink.emplace(m2_out);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    std::vector<Edit> edits = refine_edits(sources[i], hypotheses[i], lm, opts);
    sink.stream() << join_tokens(apply_edits(sources[i], edits)) << "\n";
    if (m2_sink) {
      AnnotatedPair pair;
      pair.source = sources[i];
      pair.annotations.push_back(Annotation{0, std::move(edits)});
      write_m2_block(pair, m2_sink->stream());
    }
  }
  sink.commit();
  if (m2_sink) m2_sink->commit();
  std::cerr << "pipeline: " << sources.size() << " sentences\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GEC corpus synthesis and correction pipeline toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gecforge 0.1.0");

  std::string config_path;
  app.add_option("--config", config_path,
                 "Config file with 'key = value' lines; flags and "
                 "GECFORGE_* environment variables take precedence");

  // extract-edits ------------------------------------------------------
  auto* extract = app.add_subcommand(
      "extract-edits", "Align parallel files and write span edits as M2");
  std::string ee_src, ee_tgt, ee_out, ee_lexicon;
  auto* ee_src_o = extract->add_option("--src", ee_src, "Source sentences");
  auto* ee_tgt_o = extract->add_option("--tgt", ee_tgt, "Target sentences");
  auto* ee_out_o = extract->add_option("--out", ee_out, "Output M2 file");
  auto* ee_lex_o =
      extract->add_option("--lexicon", ee_lexicon, "Lexicon for categories");

  // build-dict ---------------------------------------------------------
  auto* build = app.add_subcommand(
      "build-dict", "Accumulate an edit dictionary from M2 files");
  std::vector<std::string> bd_m2;
  std::uint64_t bd_min_count = 4;
  std::string bd_out;
  auto* bd_m2_o =
      build->add_option("--m2", bd_m2, "Annotated M2 input (repeatable)");
  auto* bd_min_o = build->add_option("--min-count", bd_min_count,
                                     "Prune variants seen fewer times");
  auto* bd_out_o = build->add_option("--out", bd_out, "Output dictionary");

  // noise ----------------------------------------------------------------
  auto* noise = app.add_subcommand(
      "noise", "Write noised<TAB>clean pairs from a clean corpus");
  std::string nz_corpus, nz_dict, nz_lexicon, nz_vocab, nz_out;
  std::string nz_mode = "realistic";
  NoisingConfig nz_config;
  std::uint64_t nz_reps = 1;
  int nz_workers = 1;
  auto* nz_corpus_o = noise->add_option("--corpus", nz_corpus, "Clean corpus");
  auto* nz_dict_o = noise->add_option("--dict", nz_dict, "Edit dictionary");
  auto* nz_lex_o = noise->add_option("--lexicon", nz_lexicon, "Lexicon");
  auto* nz_vocab_o = noise->add_option(
      "--vocab", nz_vocab, "Vocabulary list for random mode (else derived)");
  auto* nz_mode_o =
      noise->add_option("--mode", nz_mode, "realistic or random");
  auto* nz_seed_o = noise->add_option("--seed", nz_config.seed, "Random seed");
  auto* nz_reps_o =
      noise->add_option("--reps", nz_reps, "Noised copies per line");
  auto* nz_workers_o =
      noise->add_option("--workers", nz_workers, "Worker threads");
  auto* nz_tok_o = noise->add_option("--token-error-prob",
                                     nz_config.token_error_prob,
                                     "Dictionary scenario probability");
  auto* nz_typ_o =
      noise->add_option("--type-error-prob", nz_config.type_error_prob,
                        "Type scenario probability");
  auto* nz_rnd_o = noise->add_option("--random-op-prob",
                                     nz_config.random_op_prob,
                                     "Random mode per-operation probability");
  auto* nz_out_o = noise->add_option("--out", nz_out, "Output TSV");

  // train-lm -------------------------------------------------------------
  auto* train = app.add_subcommand("train-lm",
                                   "Train the interpolated trigram model");
  std::string tl_corpus, tl_out, tl_vocab_out, tl_caps_out;
  std::string tl_capital_rule = "ratio";
  NGramLm::Options tl_options;
  CapitalConfig tl_capitals;
  auto* tl_corpus_o = train->add_option("--corpus", tl_corpus, "Text corpus");
  auto* tl_out_o = train->add_option("--out", tl_out, "Output model file");
  auto* tl_l1_o = train->add_option("--lambda1", tl_options.lambda1,
                                    "Unigram interpolation weight");
  auto* tl_l2_o = train->add_option("--lambda2", tl_options.lambda2,
                                    "Bigram interpolation weight");
  auto* tl_l3_o = train->add_option("--lambda3", tl_options.lambda3,
                                    "Trigram interpolation weight");
  auto* tl_alpha_o =
      train->add_option("--alpha", tl_options.alpha, "Unigram smoothing");
  auto* tl_vout_o = train->add_option("--vocab-out", tl_vocab_out,
                                      "Also write word frequencies");
  auto* tl_cout_o = train->add_option("--capitals-out", tl_caps_out,
                                      "Also write the capitalization list");
  auto* tl_cratio_o = train->add_option(
      "--capital-ratio", tl_capitals.ratio,
      "Capitalized-to-lowercase ratio a word must exceed");
  auto* tl_cmargin_o = train->add_option("--capital-margin",
                                         tl_capitals.margin,
                                         "Absolute margin for margin rule");
  auto* tl_crule_o = train->add_option("--capital-rule", tl_capital_rule,
                                       "ratio or margin");
  auto* tl_cmin_o =
      train->add_option("--capital-min-count", tl_capitals.min_capital_count,
                        "Minimum capitalized occurrences");

  // score ----------------------------------------------------------------
  auto* score = app.add_subcommand("score", "Log probability per input line");
  std::string sc_lm, sc_in, sc_out;
  auto* sc_lm_o = score->add_option("--lm", sc_lm, "Language model");
  auto* sc_in_o = score->add_option("--in", sc_in, "Sentences to score");
  auto* sc_out_o =
      score->add_option("--out", sc_out, "Output file (default stdout)");

  // spellcheck -------------------------------------------------------------
  auto* spell = app.add_subcommand("spellcheck",
                                   "Context-aware spelling correction");
  std::string sp_lm, sp_vocab, sp_caps, sp_in, sp_out, sp_m2;
  SpellConfig sp_config;
  auto* sp_lm_o = spell->add_option("--lm", sp_lm, "Language model");
  auto* sp_vocab_o = spell->add_option("--vocab", sp_vocab, "Known words");
  auto* sp_caps_o =
      spell->add_option("--capitals", sp_caps, "Capitalization list");
  auto* sp_in_o = spell->add_option("--in", sp_in, "Input sentences");
  auto* sp_out_o = spell->add_option("--out", sp_out, "Corrected output");
  auto* sp_m2_o =
      spell->add_option("--m2-out", sp_m2, "Also write corrections as M2");
  auto* sp_maxc_o = spell->add_option("--max-candidates",
                                      sp_config.max_candidates,
                                      "Candidates ranked per misspelling");
  auto* sp_maxd_o = spell->add_option("--max-edit-distance",
                                      sp_config.max_edit_distance,
                                      "Candidate search radius");
  auto* sp_lmw_o = spell->add_option("--lm-weight", sp_config.lm_weight,
                                     "0 disables LM re-ranking");

  // bpe-learn / bpe-apply -------------------------------------------------
  auto* bl = app.add_subcommand("bpe-learn", "Learn byte pair merges");
  std::string bl_corpus, bl_out;
  std::uint64_t bl_vocab_size = 32000;
  auto* bl_corpus_o = bl->add_option("--corpus", bl_corpus, "Text corpus");
  auto* bl_vs_o =
      bl->add_option("--vocab-size", bl_vocab_size, "Target symbol count");
  auto* bl_out_o = bl->add_option("--out", bl_out, "Output model");

  auto* ba = app.add_subcommand("bpe-apply", "Encode or revert subwords");
  std::string ba_model, ba_in, ba_out;
  bool ba_revert = false;
  auto* ba_model_o = ba->add_option("--model", ba_model, "BPE model");
  auto* ba_in_o = ba->add_option("--in", ba_in, "Input sentences");
  auto* ba_out_o = ba->add_option("--out", ba_out, "Output");
  auto* ba_rev_o = ba->add_flag("--revert", ba_revert,
                                "Join subword pieces back into words");

  // score-m2 ---------------------------------------------------------------
  auto* sm = app.add_subcommand("score-m2",
                                "Score hypothesis M2 against reference M2");
  std::string sm_hyp, sm_ref, sm_json;
  auto* sm_hyp_o = sm->add_option("--hyp", sm_hyp, "Hypothesis M2");
  auto* sm_ref_o = sm->add_option("--ref", sm_ref, "Reference M2");
  auto* sm_json_o = sm->add_option("--json", sm_json, "Write report JSON");

  // stats -------------------------------------------------------------------
  auto* st = app.add_subcommand("stats", "Edit density and group comparison");
  std::vector<std::string> st_m2;
  bool st_all = false;
  std::uint64_t st_rounds = 10000;
  std::uint64_t st_seed = 0;
  std::string st_json;
  auto* st_m2_o = st->add_option("--m2", st_m2, "M2 file (repeatable)");
  auto* st_all_o = st->add_flag("--all-annotators", st_all,
                                "Average densities over all annotators");
  auto* st_rounds_o =
      st->add_option("--perm-rounds", st_rounds, "Permutation test rounds");
  auto* st_seed_o = st->add_option("--seed", st_seed, "Random seed");
  auto* st_json_o = st->add_option("--json", st_json, "Write stats JSON");

  // postprocess --------------------------------------------------------------
  auto* pp = app.add_subcommand(
      "postprocess", "Filter system output edits against the source");
  std::string pp_src, pp_hyp, pp_lm, pp_lexicon, pp_drop, pp_out, pp_m2;
  PostprocessConfig pp_config;
  auto* pp_src_o = pp->add_option("--src", pp_src, "Source sentences");
  auto* pp_hyp_o = pp->add_option("--hyp", pp_hyp, "System output sentences");
  auto* pp_lm_o = pp->add_option("--lm", pp_lm, "Language model");
  auto* pp_lex_o =
      pp->add_option("--lexicon", pp_lexicon, "Lexicon for categories");
  auto* pp_drop_o = pp->add_option("--drop-categories", pp_drop,
                                   "drop.json from tune-categories");
  auto* pp_maxr_o = pp->add_option("--max-remove",
                                   pp_config.max_removed_edits,
                                   "Most edits removable per sentence");
  auto* pp_exh_o = pp->add_option("--exhaustive-limit",
                                  pp_config.exhaustive_edit_limit,
                                  "Edit count up to which search is exact");
  auto* pp_unk_o =
      pp->add_option("--unk-marker", pp_config.unk_marker, "Unknown marker");
  auto* pp_out_o = pp->add_option("--out", pp_out, "Corrected output");
  auto* pp_m2_o = pp->add_option("--m2-out", pp_m2, "Also write edits as M2");

  // tune-categories ----------------------------------------------------------
  auto* tc = app.add_subcommand(
      "tune-categories", "Search for categories worth dropping wholesale");
  std::string tc_hyp, tc_ref, tc_out;
  PostprocessConfig tc_config;
  auto* tc_hyp_o = tc->add_option("--hyp", tc_hyp, "Hypothesis M2");
  auto* tc_ref_o = tc->add_option("--ref", tc_ref, "Reference M2");
  auto* tc_max_o = tc->add_option("--max-categories",
                                  tc_config.max_categories,
                                  "Largest subset size");
  auto* tc_rounds_o =
      tc->add_option("--rounds", tc_config.search_rounds, "Evaluation budget");
  auto* tc_seed_o = tc->add_option("--seed", tc_config.seed, "Random seed");
  auto* tc_out_o = tc->add_option("--out", tc_out, "Output drop.json");

  // copymix-selftest ----------------------------------------------------------
  auto* cm = app.add_subcommand("copymix-selftest",
                                "Verify the copy-mixture layer numerically");
  std::uint64_t cm_seed = 0, cm_trials = 25;
  int cm_hidden = 8, cm_vocab = 20, cm_source_len = 6;
  double cm_step = 1e-5;
  std::string cm_json;
  auto* cm_seed_o = cm->add_option("--seed", cm_seed, "Random seed");
  auto* cm_trials_o = cm->add_option("--trials", cm_trials, "Instances");
  auto* cm_hidden_o = cm->add_option("--hidden", cm_hidden, "Hidden size");
  auto* cm_vocab_o = cm->add_option("--vocab", cm_vocab, "Vocabulary size");
  auto* cm_srclen_o =
      cm->add_option("--source-len", cm_source_len, "Source length");
  auto* cm_step_o =
      cm->add_option("--step", cm_step, "Finite difference step");
  auto* cm_json_o = cm->add_option("--json", cm_json, "Write report JSON");

  // lexicon-build ---------------------------------------------------------------
  auto* lb = app.add_subcommand("lexicon-build",
                                "Compile word lists into a lexicon");
  std::string lb_nouns, lb_verbs, lb_preps, lb_priority, lb_out;
  auto* lb_nouns_o = lb->add_option("--nouns", lb_nouns, "Noun list");
  auto* lb_verbs_o = lb->add_option("--verbs", lb_verbs, "Verb list");
  auto* lb_preps_o =
      lb->add_option("--prepositions", lb_preps, "Preposition list");
  auto* lb_prio_o = lb->add_option("--priority", lb_priority,
                                   "Comma list, e.g. VERB,NOUN,PREP");
  auto* lb_out_o = lb->add_option("--out", lb_out, "Output lexicon JSON");

  // pipeline -----------------------------------------------------------------
  auto* pl = app.add_subcommand(
      "pipeline", "Tokenize, spellcheck, optionally correct, postprocess");
  std::string pl_in, pl_lm, pl_vocab, pl_caps, pl_corrector, pl_lexicon;
  std::string pl_drop, pl_out, pl_m2;
  SpellConfig pl_spell;
  PostprocessConfig pl_config;
  auto* pl_in_o = pl->add_option("--in", pl_in, "Input sentences");
  auto* pl_lm_o = pl->add_option("--lm", pl_lm, "Language model");
  auto* pl_vocab_o = pl->add_option("--vocab", pl_vocab, "Known words");
  auto* pl_caps_o =
      pl->add_option("--capitals", pl_caps, "Capitalization list");
  auto* pl_corr_o = pl->add_option(
      "--corrector", pl_corrector,
      "Shell command reading sentences on stdin, writing corrections");
  auto* pl_lex_o =
      pl->add_option("--lexicon", pl_lexicon, "Lexicon for categories");
  auto* pl_drop_o = pl->add_option("--drop-categories", pl_drop,
                                   "drop.json from tune-categories");
  auto* pl_maxr_o = pl->add_option("--max-remove",
                                   pl_config.max_removed_edits,
                                   "Most edits removable per sentence");
  auto* pl_maxc_o = pl->add_option("--max-candidates",
                                   pl_spell.max_candidates,
                                   "Spelling candidates per misspelling");
  auto* pl_maxd_o = pl->add_option("--max-edit-distance",
                                   pl_spell.max_edit_distance,
                                   "Spelling search radius");
  auto* pl_lmw_o = pl->add_option("--lm-weight", pl_spell.lm_weight,
                                  "0 disables spelling LM re-ranking");
  auto* pl_out_o = pl->add_option("--out", pl_out, "Corrected output");
  auto* pl_m2_o = pl->add_option("--m2-out", pl_m2, "Also write edits as M2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help / --version
    }
    app.exit(e);
    return 1;
  }

  try {
    const Settings settings = Settings::load(config_path);
    const Fallback fb(&settings);

    if (*extract) {
      fb.apply(ee_src_o, "src", ee_src);
      fb.apply(ee_tgt_o, "tgt", ee_tgt);
      fb.apply(ee_out_o, "out", ee_out);
      fb.apply(ee_lex_o, "lexicon", ee_lexicon);
      if (ee_src.empty() || ee_tgt.empty() || ee_out.empty()) {
        throw ValidationError("extract-edits needs --src, --tgt and --out");
      }
      return cmd_extract_edits(ee_src, ee_tgt, ee_out, ee_lexicon);
    }
    if (*build) {
      fb.apply(bd_m2_o, "m2", bd_m2);
      fb.apply(bd_min_o, "min-count", bd_min_count);
      fb.apply(bd_out_o, "out", bd_out);
      if (bd_m2.empty() || bd_out.empty()) {
        throw ValidationError("build-dict needs --m2 and --out");
      }
      return cmd_build_dict(bd_m2, bd_min_count, bd_out);
    }
    if (*noise) {
      fb.apply(nz_corpus_o, "corpus", nz_corpus);
      fb.apply(nz_dict_o, "dict", nz_dict);
      fb.apply(nz_lex_o, "lexicon", nz_lexicon);
      fb.apply(nz_vocab_o, "vocab", nz_vocab);
      fb.apply(nz_mode_o, "mode", nz_mode);
      fb.apply(nz_seed_o, "seed", nz_config.seed);
      fb.apply(nz_reps_o, "reps", nz_reps);
      fb.apply(nz_workers_o, "workers", nz_workers);
      fb.apply(nz_tok_o, "token-error-prob", nz_config.token_error_prob);
      fb.apply(nz_typ_o, "type-error-prob", nz_config.type_error_prob);
      fb.apply(nz_rnd_o, "random-op-prob", nz_config.random_op_prob);
      fb.apply(nz_out_o, "out", nz_out);
      if (nz_corpus.empty() || nz_out.empty()) {
        throw ValidationError("noise needs --corpus and --out");
      }
      if (nz_mode == "realistic") {
        nz_config.mode = NoiseMode::kRealistic;
      } else if (nz_mode == "random") {
        nz_config.mode = NoiseMode::kRandom;
      } else {
        throw ValidationError("--mode must be realistic or random");
      }
      return cmd_noise(nz_corpus, nz_dict, nz_lexicon, nz_vocab, nz_config,
                       nz_reps, nz_workers, nz_out);
    }
    if (*train) {
      fb.apply(tl_corpus_o, "corpus", tl_corpus);
      fb.apply(tl_out_o, "out", tl_out);
      fb.apply(tl_l1_o, "lambda1", tl_options.lambda1);
      fb.apply(tl_l2_o, "lambda2", tl_options.lambda2);
      fb.apply(tl_l3_o, "lambda3", tl_options.lambda3);
      fb.apply(tl_alpha_o, "alpha", tl_options.alpha);
      fb.apply(tl_vout_o, "vocab-out", tl_vocab_out);
      fb.apply(tl_cout_o, "capitals-out", tl_caps_out);
      fb.apply(tl_cratio_o, "capital-ratio", tl_capitals.ratio);
      fb.apply(tl_cmargin_o, "capital-margin", tl_capitals.margin);
      fb.apply(tl_crule_o, "capital-rule", tl_capital_rule);
      fb.apply(tl_cmin_o, "capital-min-count", tl_capitals.min_capital_count);
      if (tl_corpus.empty() || tl_out.empty()) {
        throw ValidationError("train-lm needs --corpus and --out");
      }
      if (tl_capital_rule == "ratio") {
        tl_capitals.use_margin = false;
      } else if (tl_capital_rule == "margin") {
        tl_capitals.use_margin = true;
      } else {
        throw ValidationError("--capital-rule must be ratio or margin");
      }
      tl_options.validate();
      return cmd_train_lm(tl_corpus, tl_options, tl_out, tl_vocab_out,
                          tl_caps_out, tl_capitals);
    }
    if (*score) {
      fb.apply(sc_lm_o, "lm", sc_lm);
      fb.apply(sc_in_o, "in", sc_in);
      fb.apply(sc_out_o, "out", sc_out);
      if (sc_lm.empty() || sc_in.empty()) {
        throw ValidationError("score needs --lm and --in");
      }
      return cmd_score(sc_lm, sc_in, sc_out);
    }
    if (*spell) {
      fb.apply(sp_lm_o, "lm", sp_lm);
      fb.apply(sp_vocab_o, "vocab", sp_vocab);
      fb.apply(sp_caps_o, "capitals", sp_caps);
      fb.apply(sp_in_o, "in", sp_in);
      fb.apply(sp_out_o, "out", sp_out);
      fb.apply(sp_m2_o, "m2-out", sp_m2);
      fb.apply(sp_maxc_o, "max-candidates", sp_config.max_candidates);
      fb.apply(sp_maxd_o, "max-edit-distance", sp_config.max_edit_distance);
      fb.apply(sp_lmw_o, "lm-weight", sp_config.lm_weight);
      if (sp_lm.empty() || sp_vocab.empty() || sp_in.empty() ||
          sp_out.empty()) {
        throw ValidationError(
            "spellcheck needs --lm, --vocab, --in and --out");
      }
      return cmd_spellcheck(sp_lm, sp_vocab, sp_caps, sp_in, sp_out, sp_m2,
                            sp_config);
    }
    if (*bl) {
      fb.apply(bl_corpus_o, "corpus", bl_corpus);
      fb.apply(bl_vs_o, "vocab-size", bl_vocab_size);
      fb.apply(bl_out_o, "out", bl_out);
      if (bl_corpus.empty() || bl_out.empty()) {
        throw ValidationError("bpe-learn needs --corpus and --out");
      }
      return cmd_bpe_learn(bl_corpus, bl_vocab_size, bl_out);
    }
    if (*ba) {
      fb.apply(ba_model_o, "model", ba_model);
      fb.apply(ba_in_o, "in", ba_in);
      fb.apply(ba_out_o, "out", ba_out);
      fb.apply(ba_rev_o, "revert", ba_revert);
      if (ba_model.empty() || ba_in.empty() || ba_out.empty()) {
        throw ValidationError("bpe-apply needs --model, --in and --out");
      }
      return cmd_bpe_apply(ba_model, ba_in, ba_out, ba_revert);
    }
    if (*sm) {
      fb.apply(sm_hyp_o, "hyp", sm_hyp);
      fb.apply(sm_ref_o, "ref", sm_ref);
      fb.apply(sm_json_o, "json", sm_json);
      if (sm_hyp.empty() || sm_ref.empty()) {
        throw ValidationError("score-m2 needs --hyp and --ref");
      }
      return cmd_score_m2(sm_hyp, sm_ref, sm_json);
    }
    if (*st) {
      fb.apply(st_m2_o, "m2", st_m2);
      fb.apply(st_all_o, "all-annotators", st_all);
      fb.apply(st_rounds_o, "perm-rounds", st_rounds);
      fb.apply(st_seed_o, "seed", st_seed);
      fb.apply(st_json_o, "json", st_json);
      return cmd_stats(st_m2, st_all, st_rounds, st_seed, st_json);
    }
    if (*pp) {
      fb.apply(pp_src_o, "src", pp_src);
      fb.apply(pp_hyp_o, "hyp", pp_hyp);
      fb.apply(pp_lm_o, "lm", pp_lm);
      fb.apply(pp_lex_o, "lexicon", pp_lexicon);
      fb.apply(pp_drop_o, "drop-categories", pp_drop);
      fb.apply(pp_maxr_o, "max-remove", pp_config.max_removed_edits);
      fb.apply(pp_exh_o, "exhaustive-limit", pp_config.exhaustive_edit_limit);
      fb.apply(pp_unk_o, "unk-marker", pp_config.unk_marker);
      fb.apply(pp_out_o, "out", pp_out);
      fb.apply(pp_m2_o, "m2-out", pp_m2);
      if (pp_src.empty() || pp_hyp.empty() || pp_lm.empty() ||
          pp_out.empty()) {
        throw ValidationError(
            "postprocess needs --src, --hyp, --lm and --out");
      }
      RefineOptions opts;
      opts.config = pp_config;
      if (!pp_lexicon.empty()) {
        opts.lexicon = load_lexicon_file(pp_lexicon);
        opts.have_lexicon = true;
      }
      if (!pp_drop.empty()) opts.dropped = load_drop_list(pp_drop);
      return cmd_postprocess(pp_src, pp_hyp, pp_lm, pp_out, pp_m2, opts);
    }
    if (*tc) {
      fb.apply(tc_hyp_o, "hyp", tc_hyp);
      fb.apply(tc_ref_o, "ref", tc_ref);
      fb.apply(tc_max_o, "max-categories", tc_config.max_categories);
      fb.apply(tc_rounds_o, "rounds", tc_config.search_rounds);
      fb.apply(tc_seed_o, "seed", tc_config.seed);
      fb.apply(tc_out_o, "out", tc_out);
      if (tc_hyp.empty() || tc_ref.empty() || tc_out.empty()) {
        throw ValidationError("tune-categories needs --hyp, --ref and --out");
      }
      return cmd_tune_categories(tc_hyp, tc_ref, tc_config, tc_out);
    }
    if (*cm) {
      fb.apply(cm_seed_o, "seed", cm_seed);
      fb.apply(cm_trials_o, "trials", cm_trials);
      fb.apply(cm_hidden_o, "hidden", cm_hidden);
      fb.apply(cm_vocab_o, "vocab", cm_vocab);
      fb.apply(cm_srclen_o, "source-len", cm_source_len);
      fb.apply(cm_step_o, "step", cm_step);
      fb.apply(cm_json_o, "json", cm_json);
      return cmd_copymix_selftest(cm_seed, cm_trials, cm_hidden, cm_vocab,
                                  cm_source_len, cm_step, cm_json);
    }
    if (*lb) {
      fb.apply(lb_nouns_o, "nouns", lb_nouns);
      fb.apply(lb_verbs_o, "verbs", lb_verbs);
      fb.apply(lb_preps_o, "prepositions", lb_preps);
      fb.apply(lb_prio_o, "priority", lb_priority);
      fb.apply(lb_out_o, "out", lb_out);
      if (lb_nouns.empty() || lb_verbs.empty() || lb_preps.empty() ||
          lb_out.empty()) {
        throw ValidationError(
            "lexicon-build needs --nouns, --verbs, --prepositions and --out");
      }
      return cmd_lexicon_build(lb_nouns, lb_verbs, lb_preps, lb_priority,
                               lb_out);
    }
    if (*pl) {
      fb.apply(pl_in_o, "in", pl_in);
      fb.apply(pl_lm_o, "lm", pl_lm);
      fb.apply(pl_vocab_o, "vocab", pl_vocab);
      fb.apply(pl_caps_o, "capitals", pl_caps);
      fb.apply(pl_corr_o, "corrector", pl_corrector);
      fb.apply(pl_lex_o, "lexicon", pl_lexicon);
      fb.apply(pl_drop_o, "drop-categories", pl_drop);
      fb.apply(pl_maxr_o, "max-remove", pl_config.max_removed_edits);
      fb.apply(pl_maxc_o, "max-candidates", pl_spell.max_candidates);
      fb.apply(pl_maxd_o, "max-edit-distance", pl_spell.max_edit_distance);
      fb.apply(pl_lmw_o, "lm-weight", pl_spell.lm_weight);
      fb.apply(pl_out_o, "out", pl_out);
      fb.apply(pl_m2_o, "m2-out", pl_m2);
      if (pl_in.empty() || pl_lm.empty() || pl_vocab.empty() ||
          pl_out.empty()) {
        throw ValidationError("pipeline needs --in, --lm, --vocab and --out");
      }
      RefineOptions opts;
      opts.config = pl_config;
      if (!pl_lexicon.empty()) {
        opts.lexicon = load_lexicon_file(pl_lexicon);
        opts.have_lexicon = true;
      }
      if (!pl_drop.empty()) opts.dropped = load_drop_list(pl_drop);
      return cmd_pipeline(pl_in, pl_lm, pl_vocab, pl_caps, pl_corrector,
                          pl_spell, opts, pl_out, pl_m2);
    }
    throw ValidationError("no subcommand selected");
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

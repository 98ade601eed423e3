#include "compskip/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "compskip/error.hpp"

namespace compskip {

double vector_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("cosine: dimension mismatch");
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw std::invalid_argument("cosine: zero vector");
  return std::clamp(uv / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    // positions i..j (0-based) share rank mean((i+1)..(j+1))
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("spearman: length mismatch");
  if (xs.size() < 2) throw std::invalid_argument("spearman: need at least two points");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(xs.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw std::domain_error("spearman: undefined for a constant sequence");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// Datasets

namespace {

std::string lowered(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  if (line.find('\t') != std::string::npos) {
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, '\t')) fields.push_back(field);
  } else {
    std::istringstream ls(line);
    std::string field;
    while (ls >> field) fields.push_back(field);
  }
  for (auto& f : fields) {
    while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.pop_back();
    while (!f.empty() && f.front() == ' ') f.erase(f.begin());
  }
  return fields;
}

bool skippable(const std::string& line) {
  auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

double parse_score(const std::string& field, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size() || !std::isfinite(v)) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw DataError(where + ": bad number '" + field + "'");
  }
}

template <class Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset: " + path.string());
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (skippable(line)) continue;
    fn(line, path.string() + ":" + std::to_string(no));
  }
}

std::string word_field(std::string s, bool lowercase, const std::string& where) {
  if (s.empty()) throw DataError(where + ": empty word");
  return lowercase ? lowered(std::move(s)) : s;
}

}  // namespace

std::size_t AnalogyDataset::size() const {
  std::size_t n = 0;
  for (const auto& s : sections) n += s.questions.size();
  return n;
}

SimilarityDataset load_similarity_dataset(const std::filesystem::path& path, bool lowercase) {
  SimilarityDataset dataset;
  for_each_line(path, [&](const std::string& line, const std::string& where) {
    auto f = split_fields(line);
    if (f.size() != 3) throw DataError(where + ": expected word_a, word_b, score");
    dataset.push_back({word_field(f[0], lowercase, where), word_field(f[1], lowercase, where),
                       parse_score(f[2], where)});
  });
  return dataset;
}

AnalogyDataset load_analogy_dataset(const std::filesystem::path& path, bool lowercase) {
  AnalogyDataset dataset;
  for_each_line(path, [&](const std::string& line, const std::string& where) {
    auto first = line.find_first_not_of(" \t");
    if (line[first] == ':') {
      auto f = split_fields(line.substr(first + 1));
      dataset.sections.push_back({f.empty() ? std::string() : f.front(), {}});
      return;
    }
    auto f = split_fields(line);
    if (f.size() != 4) throw DataError(where + ": expected four words");
    if (dataset.sections.empty()) dataset.sections.push_back({"default", {}});
    dataset.sections.back().questions.push_back(
        {word_field(f[0], lowercase, where), word_field(f[1], lowercase, where),
         word_field(f[2], lowercase, where), word_field(f[3], lowercase, where)});
  });
  return dataset;
}

PhraseCompositionDataset load_phrase_dataset(const std::filesystem::path& path, bool lowercase) {
  PhraseCompositionDataset dataset;
  for_each_line(path, [&](const std::string& line, const std::string& where) {
    auto f = split_fields(line);
    if (f.size() != 4) throw DataError(where + ": expected subject, reference, landmark, rating");
    dataset.push_back({word_field(f[0], lowercase, where), word_field(f[1], lowercase, where),
                       word_field(f[2], lowercase, where), parse_score(f[3], where)});
  });
  return dataset;
}

// ---------------------------------------------------------------------------
// Evaluations

double CorrelationResult::coverage() const {
  const std::size_t total = used + dropped;
  return total == 0 ? 0.0 : static_cast<double>(used) / static_cast<double>(total);
}

namespace {

std::optional<std::size_t> nonzero_id(const Embeddings& e, const std::string& word) {
  auto id = e.find(word);
  if (!id || vector_norm(e.vector(*id)) == 0.0) return std::nullopt;
  return id;
}

CorrelationResult correlate(const std::vector<double>& model, const std::vector<double>& human,
                            std::size_t dropped, const char* what) {
  if (model.size() < 2) {
    throw DataError(std::string(what) + ": fewer than two usable items (" + std::to_string(model.size()) +
                    " usable, " + std::to_string(dropped) + " dropped)");
  }
  return CorrelationResult{spearman(model, human), model.size(), dropped};
}

}  // namespace

CorrelationResult word_similarity_eval(const Embeddings& embeddings, const SimilarityDataset& dataset) {
  std::vector<double> model, human;
  std::size_t dropped = 0;
  for (const auto& item : dataset) {
    auto a = nonzero_id(embeddings, item.a);
    auto b = nonzero_id(embeddings, item.b);
    if (!a || !b) {
      ++dropped;
      continue;
    }
    model.push_back(cosine(embeddings.vector(*a), embeddings.vector(*b)));
    human.push_back(item.score);
  }
  return correlate(model, human, dropped, "word similarity");
}

AnalogySolver::AnalogySolver(const Embeddings& embeddings)
    : unit_(embeddings.matrix()), usable_(embeddings.size(), false) {
  for (std::size_t i = 0; i < unit_.rows(); ++i) {
    auto row = unit_.row(i);
    const double norm = vector_norm(row);
    if (norm == 0.0) continue;
    for (double& x : row) x /= norm;
    usable_[i] = true;
  }
}

std::optional<std::size_t> AnalogySolver::solve(std::size_t a, std::size_t b, std::size_t c) const {
  const std::size_t d = unit_.dim();
  std::vector<double> query(d);
  auto va = unit_.row(a), vb = unit_.row(b), vc = unit_.row(c);
  for (std::size_t k = 0; k < d; ++k) query[k] = vb[k] - va[k] + vc[k];

  // Candidates are unit vectors, so the dot product ranks like the cosine.
  std::optional<std::size_t> best;
  double best_score = -INFINITY;
  for (std::size_t i = 0; i < unit_.rows(); ++i) {
    if (i == a || i == b || i == c || !usable_[i]) continue;
    auto v = unit_.row(i);
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += query[k] * v[k];
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

double SectionScore::accuracy() const {
  return used == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(used);
}

double AnalogyResult::accuracy() const {
  return used == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(used);
}

AnalogyResult analogy_eval(const Embeddings& embeddings, const AnalogyDataset& dataset) {
  const AnalogySolver solver(embeddings);
  AnalogyResult result;
  for (const auto& section : dataset.sections) {
    SectionScore score{section.name, 0, 0, 0};
    for (const auto& q : section.questions) {
      auto a = embeddings.find(q.a), b = embeddings.find(q.b), c = embeddings.find(q.c),
           d = embeddings.find(q.d);
      if (!a || !b || !c || !d) {
        ++score.dropped;
        continue;
      }
      ++score.used;
      if (solver.solve(*a, *b, *c) == d) ++score.correct;
    }
    result.correct += score.correct;
    result.used += score.used;
    result.dropped += score.dropped;
    result.sections.push_back(std::move(score));
  }
  if (result.used == 0) throw DataError("analogy: no usable questions");
  return result;
}

CorrelationResult phrase_similarity_eval(const Embeddings& embeddings, const CompositionConfig& comp,
                                         const PhraseCompositionDataset& dataset) {
  std::vector<double> model, human;
  std::size_t dropped = 0;
  for (const auto& item : dataset) {
    auto s = embeddings.find(item.subject);
    auto r = embeddings.find(item.reference);
    auto l = nonzero_id(embeddings, item.landmark);
    if (!s || !r || !l) {
      ++dropped;
      continue;
    }
    const std::span<const double> parts[] = {embeddings.vector(*s), embeddings.vector(*r)};
    const std::vector<double> composed = compose_phrase(parts, comp);
    if (vector_norm(composed) == 0.0) {
      ++dropped;
      continue;
    }
    model.push_back(cosine(composed, embeddings.vector(*l)));
    human.push_back(item.rating);
  }
  return correlate(model, human, dropped, "phrase similarity");
}

}  // namespace compskip

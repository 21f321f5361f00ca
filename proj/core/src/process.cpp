#include "qhmm/process.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qhmm/errors.hpp"
#include "random.hpp"

namespace qhmm {

namespace {

constexpr double kImagTolerance = 1e-10;
constexpr double kUnderflow = 1e-300;

double clamp_unit(double p) { return std::clamp(p, 0.0, 1.0); }

void check_word(const Alphabet& alphabet, const Word& word) {
  for (std::size_t s : word) {
    if (s >= alphabet.size()) throw DomainError("word contains unknown symbol index " + std::to_string(s));
  }
}

double quantum_trace(const ComplexMatrix& rho) {
  const Complex tr = rho.trace();
  if (std::abs(tr.imag()) > kImagTolerance) {
    throw NumericalError("trace has imaginary part " + std::to_string(tr.imag()) +
                         "; the model is not a valid instrument");
  }
  return tr.real();
}

// Sequential evolution of the (unnormalized) memory state for either model
// class, so enumeration and sampling share one traversal.
struct ClassicalStepper {
  const ClassicalHmm& model;
  using State = RealVector;
  State initial() const { return model.initial(); }
  State step(const State& s, std::size_t x) const { return model.transition(x) * s; }
  double mass(const State& s) const { return s.sum(); }
};

struct QuantumStepper {
  const Qhmm& model;
  using State = ComplexMatrix;
  State initial() const { return model.initial(); }
  State step(const State& s, std::size_t x) const { return model.apply(x, s); }
  double mass(const State& s) const { return quantum_trace(s); }
};

std::size_t checked_word_count(std::size_t alphabet_size, std::size_t length, std::size_t cap) {
  std::size_t count = 1;
  for (std::size_t k = 0; k < length; ++k) {
    if (count > cap / alphabet_size) {
      throw CapExceededError("enumerating " + std::to_string(alphabet_size) + "^" +
                             std::to_string(length) + " words exceeds the cap of " +
                             std::to_string(cap));
    }
    count *= alphabet_size;
  }
  if (count > cap) throw CapExceededError("word count exceeds the enumeration cap");
  return count;
}

// Depth-first traversal in lexicographic order; the visitor receives each
// full-length word with its raw (unclamped) probability.
template <typename Stepper, typename Visitor>
void for_each_word(const Stepper& stepper, std::size_t alphabet_size, std::size_t length,
                   Visitor&& visit) {
  using State = typename Stepper::State;
  std::vector<State> states;
  states.reserve(length + 1);
  states.push_back(stepper.initial());
  Word word(length, 0);
  if (length == 0) {
    visit(word, stepper.mass(states.front()));
    return;
  }
  std::size_t depth = 0;  // number of fixed symbols whose states are in `states`
  while (true) {
    while (depth < length) {
      states.push_back(stepper.step(states.back(), word[depth]));
      ++depth;
    }
    visit(word, stepper.mass(states.back()));
    // Advance to the next word: pop finished positions.
    while (depth > 0) {
      states.pop_back();
      --depth;
      if (++word[depth] < alphabet_size) break;
      word[depth] = 0;
      if (depth == 0) return;
    }
  }
}

template <typename Visitor>
void visit_words(const AnyModel& model, std::size_t length, Visitor&& visit) {
  const std::size_t n = alphabet_of(model).size();
  if (const auto* c = std::get_if<ClassicalHmm>(&model)) {
    for_each_word(ClassicalStepper{*c}, n, length, visit);
  } else {
    for_each_word(QuantumStepper{std::get<Qhmm>(model)}, n, length, visit);
  }
}

template <typename Stepper>
Word sample_with(const Stepper& stepper, std::size_t alphabet_size, std::size_t length,
                 detail::Rng& rng) {
  Word word;
  word.reserve(length);
  auto state = stepper.initial();
  std::vector<decltype(state)> next(alphabet_size);
  std::vector<double> weight(alphabet_size);
  for (std::size_t k = 0; k < length; ++k) {
    double total = 0.0;
    for (std::size_t x = 0; x < alphabet_size; ++x) {
      next[x] = stepper.step(state, x);
      weight[x] = std::max(0.0, stepper.mass(next[x]));
      total += weight[x];
    }
    if (!(total > kUnderflow)) throw NumericalError("conditional distribution vanished while sampling");
    const double u = rng.uniform() * total;
    std::size_t chosen = alphabet_size - 1;
    double acc = 0.0;
    for (std::size_t x = 0; x < alphabet_size; ++x) {
      acc += weight[x];
      if (u < acc && weight[x] > 0.0) {
        chosen = x;
        break;
      }
    }
    while (weight[chosen] == 0.0 && chosen > 0) --chosen;
    if (weight[chosen] < kUnderflow) {
      throw NumericalError("probability of the sampled prefix underflowed");
    }
    state = next[chosen] / weight[chosen];
    word.push_back(chosen);
  }
  return word;
}

}  // namespace

double word_probability(const ClassicalHmm& model, const Word& word) {
  check_word(model.alphabet(), word);
  RealVector state = model.initial();
  for (std::size_t x : word) state = model.transition(x) * state;
  return clamp_unit(state.sum());
}

double word_probability(const Qhmm& model, const Word& word) {
  check_word(model.alphabet(), word);
  ComplexMatrix rho = model.initial();
  for (std::size_t x : word) rho = model.apply(x, rho);
  return clamp_unit(quantum_trace(rho));
}

double word_probability(const AnyModel& model, const Word& word) {
  return std::visit([&](const auto& m) { return word_probability(m, word); }, model);
}

WordDistribution enumerate_distribution(const AnyModel& model, std::size_t length,
                                        std::size_t cap) {
  const std::size_t count = checked_word_count(alphabet_of(model).size(), length, cap);
  WordDistribution dist;
  dist.length = length;
  dist.words.reserve(count);
  dist.probabilities.reserve(count);
  visit_words(model, length, [&](const Word& w, double raw) {
    dist.most_negative = std::min(dist.most_negative, raw);
    const double p = clamp_unit(raw);
    dist.words.push_back(w);
    dist.probabilities.push_back(p);
    dist.total += p;
  });
  return dist;
}

double squared_moment(const AnyModel& model, std::size_t length, std::size_t cap) {
  checked_word_count(alphabet_of(model).size(), length, cap);
  double sum = 0.0;
  visit_words(model, length, [&](const Word&, double raw) {
    const double p = clamp_unit(raw);
    sum += p * p;
  });
  return sum;
}

double overlap_moment(const AnyModel& a, const AnyModel& b, std::size_t length, std::size_t cap) {
  if (!(alphabet_of(a) == alphabet_of(b))) throw DomainError("models have different alphabets");
  const auto da = enumerate_distribution(a, length, cap);
  const auto db = enumerate_distribution(b, length, cap);
  double sum = 0.0;
  for (std::size_t k = 0; k < da.size(); ++k) sum += da.probabilities[k] * db.probabilities[k];
  return sum;
}

Word sample(const AnyModel& model, std::size_t length, std::uint64_t seed) {
  detail::Rng rng(seed);
  const std::size_t n = alphabet_of(model).size();
  if (const auto* c = std::get_if<ClassicalHmm>(&model)) {
    return sample_with(ClassicalStepper{*c}, n, length, rng);
  }
  return sample_with(QuantumStepper{std::get<Qhmm>(model)}, n, length, rng);
}

std::vector<Word> sample_many(const AnyModel& model, std::size_t length, std::size_t count,
                              std::uint64_t seed) {
  detail::Rng rng(seed);
  const std::size_t n = alphabet_of(model).size();
  std::vector<Word> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    if (const auto* c = std::get_if<ClassicalHmm>(&model)) {
      out.push_back(sample_with(ClassicalStepper{*c}, n, length, rng));
    } else {
      out.push_back(sample_with(QuantumStepper{std::get<Qhmm>(model)}, n, length, rng));
    }
  }
  return out;
}

}  // namespace qhmm

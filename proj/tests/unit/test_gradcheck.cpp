#include <gtest/gtest.h>

#include "oracles.hpp"
#include "seedlab/nn/char_encoders.hpp"
#include "seedlab/nn/crf.hpp"
#include "seedlab/nn/heads.hpp"
#include "seedlab/nn/lstm.hpp"

using namespace seedlab;
using namespace seedlab::nn;

namespace {

constexpr double kTolerance = 1e-4;

double dot(const Tensor& a, const Tensor& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * w[i];
  return s;
}

double dot(const std::vector<double>& a, const Tensor& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * w[i];
  return s;
}

void zero(std::vector<Parameter*> ps) {
  for (auto* p : ps) p->zero_grad();
}

using Probes = std::vector<std::pair<std::string, Tensor*>>;
using Analytic = std::vector<const Tensor*>;

void add(Probes& probes, Analytic& analytic, Parameter& p) {
  probes.emplace_back(p.name, &p.value);
  analytic.push_back(&p.grad);
}

DropoutMasks fixed_masks(DropoutMode mode, std::size_t steps, std::size_t in, std::size_t units,
                         std::uint64_t seed) {
  Rng rng(seed);
  return dropout_masks(mode, 0.25, steps, in, units, rng);
}

}  // namespace

class LstmGrad : public ::testing::TestWithParam<std::tuple<DropoutMode, bool>> {};

TEST_P(LstmGrad, MatchesFiniteDifferences) {
  const auto [mode, reverse] = GetParam();
  Rng rng(21);
  const std::size_t T = 5, D = 3, H = 4;
  auto p = make_lstm_params("lstm", D, H, rng);
  Tensor x = oracle::random_tensor(rng, T, D);
  const Tensor w = oracle::random_tensor(rng, T, H);
  const auto masks = fixed_masks(mode, T, D, H, 99);

  auto loss = [&] { return dot(lstm_forward(p, x, reverse, masks, nullptr), w); };
  zero({&p.wx, &p.wh, &p.bias});
  LstmTrace trace;
  lstm_forward(p, x, reverse, masks, &trace);
  const Tensor dx = lstm_backward(p, trace, w);

  Probes probes;
  Analytic analytic;
  add(probes, analytic, p.wx);
  add(probes, analytic, p.wh);
  add(probes, analytic, p.bias);
  probes.emplace_back("x", &x);
  analytic.push_back(&dx);
  const auto r = oracle::check_gradients(loss, probes, analytic);
  EXPECT_LT(r.max_rel, kTolerance) << r.worst;
  EXPECT_GT(r.checked, 100u);
}

INSTANTIATE_TEST_SUITE_P(Modes, LstmGrad,
                         ::testing::Combine(::testing::Values(DropoutMode::none, DropoutMode::naive,
                                                              DropoutMode::variational),
                                            ::testing::Bool()));

class BiLstmGrad : public ::testing::TestWithParam<DropoutMode> {};

TEST_P(BiLstmGrad, StackMatchesFiniteDifferences) {
  Rng rng(22);
  const std::size_t T = 4, D = 3;
  auto stack = make_bilstm_stack("bi", D, {3, 2}, GetParam(), 0.25, rng);
  Tensor x = oracle::random_tensor(rng, T, D);
  const Tensor w = oracle::random_tensor(rng, T, 4);

  // Every evaluation starts from the same mask stream.
  auto loss = [&] {
    Rng masks(5);
    return dot(bilstm_forward(stack, x, true, masks, nullptr), w);
  };
  std::vector<Parameter*> params;
  stack.collect(params);
  zero(params);
  BiLstmTrace trace;
  Rng masks(5);
  bilstm_forward(stack, x, true, masks, &trace);
  const Tensor dx = bilstm_backward(stack, trace, w);

  Probes probes;
  Analytic analytic;
  for (auto* p : params) add(probes, analytic, *p);
  probes.emplace_back("x", &x);
  analytic.push_back(&dx);
  const auto r = oracle::check_gradients(loss, probes, analytic);
  EXPECT_LT(r.max_rel, kTolerance) << r.worst;
}

INSTANTIATE_TEST_SUITE_P(Modes, BiLstmGrad,
                         ::testing::Values(DropoutMode::none, DropoutMode::naive,
                                           DropoutMode::variational));

TEST(CharCnnGrad, MatchesFiniteDifferences) {
  Rng rng(23);
  auto p = make_char_cnn("cnn", 8, 4, 5, rng);
  const Tensor w = oracle::random_tensor(rng, 1, 5);
  for (const std::vector<int>& word : {std::vector<int>{2, 5, 3, 7, 2}, std::vector<int>{4}}) {
    auto loss = [&] { return dot(char_cnn_encode(p, word, nullptr), w); };
    zero({&p.embedding, &p.kernel, &p.bias});
    CharCnnTrace trace;
    char_cnn_encode(p, word, &trace);
    char_cnn_backward(p, trace, w.values());
    Probes probes;
    Analytic analytic;
    add(probes, analytic, p.embedding);
    add(probes, analytic, p.kernel);
    add(probes, analytic, p.bias);
    const auto r = oracle::check_gradients(loss, probes, analytic);
    EXPECT_LT(r.max_rel, kTolerance) << r.worst;
  }
}

TEST(CharLstmGrad, MatchesFiniteDifferences) {
  Rng rng(24);
  auto p = make_char_lstm("cl", 8, 3, 4, rng);
  const Tensor w = oracle::random_tensor(rng, 1, 8);
  for (const std::vector<int>& word : {std::vector<int>{2, 5, 3, 7}, std::vector<int>{6}}) {
    std::vector<Parameter*> params;
    p.collect(params);
    auto loss = [&] { return dot(char_lstm_encode(p, word, nullptr), w); };
    zero(params);
    CharLstmTrace trace;
    char_lstm_encode(p, word, &trace);
    char_lstm_backward(p, trace, w.values());
    Probes probes;
    Analytic analytic;
    for (auto* q : params) add(probes, analytic, *q);
    const auto r = oracle::check_gradients(loss, probes, analytic);
    EXPECT_LT(r.max_rel, kTolerance) << r.worst;
  }
}

TEST(HeadGrad, LinearAndSoftmax) {
  Rng rng(25);
  auto lin = make_linear("out", 4, 3, rng);
  Tensor x = oracle::random_tensor(rng, 5, 4);
  const std::vector<int> gold = {0, 2, 1, 1, 0};
  auto loss = [&] { return softmax_nll(linear_forward(lin, x), gold).loss; };
  zero({&lin.weight, &lin.bias});
  const auto head = softmax_nll(linear_forward(lin, x), gold);
  const Tensor dx = linear_backward(lin, x, head.grad);
  Probes probes;
  Analytic analytic;
  add(probes, analytic, lin.weight);
  add(probes, analytic, lin.bias);
  probes.emplace_back("x", &x);
  analytic.push_back(&dx);
  const auto r = oracle::check_gradients(loss, probes, analytic);
  EXPECT_LT(r.max_rel, kTolerance) << r.worst;
}

TEST(CrfGrad, EmissionsAndTransitions) {
  Rng rng(26);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t T = 1 + rng.below(5), L = 1 + rng.below(4);
    Tensor e = oracle::random_tensor(rng, T, L);
    Tensor tr = oracle::random_tensor(rng, L + 2, L + 2);
    std::vector<int> gold(T);
    for (auto& y : gold) y = static_cast<int>(rng.below(L));
    auto loss = [&] { return crf_nll(e, tr, gold).loss; };
    const auto nll = crf_nll(e, tr, gold);
    Probes probes = {{"emissions", &e}, {"transitions", &tr}};
    Analytic analytic = {&nll.d_emissions, &nll.d_transitions};
    const auto r = oracle::check_gradients(loss, probes, analytic);
    EXPECT_LT(r.max_rel, kTolerance) << r.worst;
  }
}
